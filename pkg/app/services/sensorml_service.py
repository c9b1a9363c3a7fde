"""
Inclusão e leitura do identificador persistente em descrições SensorML.

O PID fica em sml:identification/sml:IdentifierList como um sml:Term com o
rótulo "Instrument persistent identifier" e a URL de resolução como valor.
"""

import logging
from typing import Optional

from lxml import etree as ET

from app.exceptions import ConflictingIdentifier, MalformedDocument
from app.services.schema_model import Pid

logger = logging.getLogger(__name__)

PID_LABEL = "Instrument persistent identifier"

SML_20 = "http://www.opengis.net/sensorml/2.0"
SML_101 = "http://www.opengis.net/sensorML/1.0.1"
GML_32 = "http://www.opengis.net/gml/3.2"
GML_311 = "http://www.opengis.net/gml"

SENSORML_NAMESPACES = (SML_20, SML_101)

# Filhos que precedem sml:identification no modelo de processo
_LEADING_TAGS = {"keywords", "extension"}


def _parse(doc: str):
    parser = ET.XMLParser(resolve_entities=False, no_network=True)
    try:
        return ET.fromstring(doc.encode("utf-8"), parser)
    except ET.XMLSyntaxError as e:
        raise MalformedDocument(f"XML malformado: {e}") from e


def _namespace(el) -> str:
    return ET.QName(el).namespace or ""


def _process_element(root):
    """Primeiro elemento SensorML do documento (o próprio root na maioria dos casos)"""
    for el in root.iter(ET.Element):
        if _namespace(el) in SENSORML_NAMESPACES:
            return el
    raise MalformedDocument("Documento sem elementos SensorML")


def _find_pid_term(root, ns: str):
    for term in root.iterfind(".//sml:identifier/sml:Term", {"sml": ns}):
        label = term.findtext("sml:label", "", {"sml": ns})
        if label.strip() == PID_LABEL:
            return term
    return None


def embed_sensorml_identifier(doc: str, pid: Pid, replace: bool = False,
                              resolver: Optional[str] = None) -> str:
    """
    Grava o PID na lista de identificadores do documento.

    Se o mesmo PID já estiver presente, o documento volta sem alterações.

    Raises:
        MalformedDocument: XML inválido ou sem elementos SensorML
        ConflictingIdentifier: já existe outro PID e replace=False
    """
    root = _parse(doc)
    process = _process_element(root)
    ns = _namespace(process)
    nsmap = {"sml": ns}
    url = pid.to_url(resolver) or pid.value

    term = _find_pid_term(root, ns)
    if term is not None:
        value_el = term.find("sml:value", nsmap)
        atual = (value_el.text or "").strip() if value_el is not None else ""
        if atual == url:
            return doc
        if not replace:
            raise ConflictingIdentifier(atual, url)
        if value_el is None:
            value_el = ET.SubElement(term, f"{{{ns}}}value")
        value_el.text = url
        logger.info(f"PID substituído no documento SensorML: {atual} -> {url}")
    else:
        identifier_list = process.find("sml:identification/sml:IdentifierList", nsmap)
        if identifier_list is None:
            identifier_list = ET.SubElement(_new_identification(process, ns), f"{{{ns}}}IdentifierList")
        identifier = ET.SubElement(identifier_list, f"{{{ns}}}identifier")
        novo_term = ET.SubElement(identifier, f"{{{ns}}}Term")
        ET.SubElement(novo_term, f"{{{ns}}}label").text = PID_LABEL
        ET.SubElement(novo_term, f"{{{ns}}}value").text = url
        logger.debug(f"PID {pid.value} incluído no documento SensorML")

    declaracao = doc.lstrip().startswith("<?xml")
    return ET.tostring(root, xml_declaration=declaracao, encoding="UTF-8").decode("utf-8")


def _new_identification(process, ns: str):
    """Cria sml:identification logo após descrição, nome, keywords e extensões"""
    posicao = 0
    for i, child in enumerate(process):
        if not isinstance(child.tag, str):
            continue
        child_ns = _namespace(child)
        if child_ns in (GML_32, GML_311) or (child_ns == ns and ET.QName(child).localname in _LEADING_TAGS):
            posicao = i + 1
    identification = ET.SubElement(process, f"{{{ns}}}identification")
    process.insert(posicao, identification)
    return identification


def extract_sensorml_identifier(doc: str, resolver: Optional[str] = None) -> Optional[Pid]:
    """
    PID gravado no termo "Instrument persistent identifier", ou None.

    Raises:
        MalformedDocument: XML inválido ou sem elementos SensorML
    """
    root = _parse(doc)
    ns = _namespace(_process_element(root))
    term = _find_pid_term(root, ns)
    if term is None:
        return None
    valor = (term.findtext("sml:value", "", {"sml": ns}) or "").strip()
    if not valor:
        return None
    return Pid.from_text(valor, resolver=resolver)
