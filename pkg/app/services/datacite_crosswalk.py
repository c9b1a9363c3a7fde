"""
Projeção de registros PIDINST no schema DataCite 4.3.

Algumas propriedades precisam ser "esticadas": o DataCite não tem tipo de
recurso Instrument nem propriedade para o modelo, e relações como
HasComponent não existem na lista controlada. As decisões de mapeamento
estão concentradas aqui e cada perda gera um aviso de conversão.
"""

import json
import logging
from dataclasses import dataclass
from datetime import datetime
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple

from lxml import etree as ET

from app.exceptions import MalformedDocument
from app.services.schema_model import (
    InstrumentRecord,
    Pid,
    PidScheme,
    RelationType,
    TypedIdentifier,
)
from app.utils.converters import parse_iso_date

logger = logging.getLogger(__name__)

KERNEL_NAMESPACE = "http://datacite.org/schema/kernel-4"
XSI_NAMESPACE = "http://www.w3.org/2001/XMLSchema-instance"
SCHEMA_LOCATION = f"{KERNEL_NAMESPACE} http://schema.datacite.org/meta/kernel-4.3/metadata.xsd"
XMLNS = {"dc": KERNEL_NAMESPACE}

MODEL_TITLE_PREFIX = "Model: "
HOSTING_INSTITUTION = "HostingInstitution"
PRODUCER = "Producer"

RESOURCE_TYPE_GENERAL = (
    "Audiovisual", "Collection", "DataPaper", "Dataset", "Event", "Image",
    "InteractiveResource", "Model", "PhysicalObject", "Service", "Software",
    "Sound", "Text", "Workflow", "Other",
)

RELATION_TYPES = (
    "IsCitedBy", "Cites", "IsSupplementTo", "IsSupplementedBy", "IsContinuedBy",
    "Continues", "IsDescribedBy", "Describes", "HasMetadata", "IsMetadataFor",
    "HasVersion", "IsVersionOf", "IsNewVersionOf", "IsPreviousVersionOf",
    "IsPartOf", "HasPart", "IsReferencedBy", "References", "IsDocumentedBy",
    "Documents", "IsCompiledBy", "Compiles", "IsVariantFormOf",
    "IsOriginalFormOf", "IsIdenticalTo", "IsReviewedBy", "Reviews",
    "IsDerivedFrom", "IsSourceOf", "IsRequiredBy", "Requires",
    "IsObsoletedBy", "Obsoletes",
)

RELATED_IDENTIFIER_TYPES = (
    "ARK", "arXiv", "bibcode", "DOI", "EAN13", "EISSN", "Handle", "IGSN",
    "ISBN", "ISSN", "ISTC", "LISSN", "LSID", "PMID", "PURL", "UPC", "URL",
    "URN", "w3id",
)

# Relações PIDINST sem equivalente direto
RELATION_FALLBACKS = {
    RelationType.HAS_COMPONENT: "HasPart",
    RelationType.IS_COMPONENT_OF: "IsPartOf",
}


class CreatorPolicy(Enum):
    OWNER_AS_CREATOR = "OwnerAsCreator"
    MANUFACTURER_AS_CREATOR = "ManufacturerAsCreator"


class DataCiteFormat(Enum):
    XML = "xml"
    JSON = "json"


@dataclass(frozen=True)
class Creator:
    name: str
    identifier: Optional[TypedIdentifier] = None


@dataclass(frozen=True)
class Title:
    title: str
    title_type: Optional[str] = None


@dataclass(frozen=True)
class Contributor:
    name: str
    contributor_type: str
    identifier: Optional[TypedIdentifier] = None


@dataclass(frozen=True)
class DataCiteDate:
    date: str
    date_type: str
    date_information: Optional[str] = None


@dataclass(frozen=True)
class DataCiteAlternateIdentifier:
    value: str
    type: str


@dataclass(frozen=True)
class DataCiteRelatedIdentifier:
    value: str
    identifier_type: str
    relation_type: str


@dataclass(frozen=True)
class Description:
    text: str
    description_type: str = "Abstract"


@dataclass(frozen=True)
class Subject:
    subject: str
    scheme: Optional[str] = None


@dataclass(frozen=True)
class ResourceType:
    general: str
    specific: str


@dataclass(frozen=True)
class DataCiteRecord:
    doi: Pid
    url: Optional[str]
    creators: Tuple[Creator, ...]
    titles: Tuple[Title, ...]
    publisher: str
    publication_year: int
    resource_type: ResourceType = ResourceType("Other", "Instrument")
    contributors: Tuple[Contributor, ...] = ()
    dates: Tuple[DataCiteDate, ...] = ()
    alternate_identifiers: Tuple[DataCiteAlternateIdentifier, ...] = ()
    related_identifiers: Tuple[DataCiteRelatedIdentifier, ...] = ()
    descriptions: Tuple[Description, ...] = ()
    subjects: Tuple[Subject, ...] = ()

    def __post_init__(self):
        if self.resource_type.general not in RESOURCE_TYPE_GENERAL:
            raise ValueError(f"resourceTypeGeneral fora da lista DataCite: {self.resource_type.general}")
        for rel in self.related_identifiers:
            if rel.relation_type not in RELATION_TYPES:
                raise ValueError(f"relationType fora da lista DataCite: {rel.relation_type}")


@dataclass(frozen=True)
class DataCiteOptions:
    publisher: str
    publication_year: int
    creator_policy: CreatorPolicy = CreatorPolicy.OWNER_AS_CREATOR

    @classmethod
    def for_record(cls, record: InstrumentRecord,
                   creator_policy: CreatorPolicy = CreatorPolicy.OWNER_AS_CREATOR) -> "DataCiteOptions":
        """Editor = primeiro owner; ano = data de comissionamento ou o ano corrente"""
        publisher = record.owners[0].owner_name if record.owners else ""
        ano = datetime.now().year
        for d in record.dates:
            data = parse_iso_date(d.date)
            if data is not None:
                ano = data.year
                break
        return cls(publisher, ano, creator_policy)


# ===== PROJEÇÃO =====

def to_datacite(record: InstrumentRecord,
                opts: Optional[DataCiteOptions] = None) -> Tuple[DataCiteRecord, List[str]]:
    """
    Projeta um registro válido no DataCite 4.3.

    Returns:
        (DataCiteRecord, avisos de conversão)
    """
    opts = opts or DataCiteOptions.for_record(record)
    avisos: List[str] = []

    if record.identifier.scheme != PidScheme.DOI:
        avisos.append(
            f"Identifier '{record.identifier.value}' não é DOI; o DataCite só registra DOIs"
        )

    owners_como_nome = [
        (owner.owner_name, owner.owner_identifier) for owner in record.owners
    ]
    manufacturers_como_nome = [
        (m.manufacturer_name, m.manufacturer_identifier) for m in record.manufacturers
    ]

    contributors: List[Contributor] = []
    if opts.creator_policy == CreatorPolicy.OWNER_AS_CREATOR:
        creators = [Creator(nome, ident) for nome, ident in owners_como_nome]
        contributors.extend(Contributor(nome, HOSTING_INSTITUTION, ident) for nome, ident in owners_como_nome)
        contributors.extend(Contributor(nome, PRODUCER, ident) for nome, ident in manufacturers_como_nome)
    else:
        creators = [Creator(nome, ident) for nome, ident in manufacturers_como_nome]
        contributors.extend(Contributor(nome, HOSTING_INSTITUTION, ident) for nome, ident in owners_como_nome)

    titles = [Title(record.name)]
    titles.extend(
        Title(f"{MODEL_TITLE_PREFIX}{m.model_name}", "Other")
        for m in record.manufacturers if m.model_name
    )

    related: List[DataCiteRelatedIdentifier] = []
    for rel in record.related_identifiers:
        convertido = _convert_related(rel.value, rel.identifier_type, rel.relation_type, avisos)
        if convertido is not None:
            related.append(convertido)

    subjects = [Subject(t.value, t.scheme_hint) for t in record.instrument_types]
    subjects.extend(Subject(v.value, v.scheme_hint) for v in record.measured_variables)

    dc = DataCiteRecord(
        doi=record.identifier,
        url=record.landing_page,
        creators=tuple(creators),
        titles=tuple(titles),
        publisher=opts.publisher,
        publication_year=opts.publication_year,
        contributors=tuple(contributors),
        dates=tuple(DataCiteDate(d.date, "Other", d.date_type) for d in record.dates),
        alternate_identifiers=tuple(
            DataCiteAlternateIdentifier(alt.value, alt.type) for alt in record.alternate_identifiers
        ),
        related_identifiers=tuple(related),
        descriptions=(Description(record.description),) if record.description else (),
        subjects=tuple(subjects),
    )

    for aviso in avisos:
        logger.warning(f"Conversão DataCite de {record.identifier.value}: {aviso}")
    return dc, avisos


def _canonical(value: str, allowed: Tuple[str, ...]) -> Optional[str]:
    alvo = value.strip().lower()
    for item in allowed:
        if item.lower() == alvo:
            return item
    return None


def _convert_related(value: str, identifier_type: str, relation_type: str,
                     avisos: List[str]) -> Optional[DataCiteRelatedIdentifier]:
    tipo_id = _canonical(identifier_type, RELATED_IDENTIFIER_TYPES)
    if tipo_id is None:
        avisos.append(f"relatedIdentifierType '{identifier_type}' não existe no DataCite; '{value}' descartado")
        return None

    relacao = _canonical(relation_type, RELATION_TYPES)
    if relacao is None:
        fallback = next(
            (dc for pidinst, dc in RELATION_FALLBACKS.items()
             if pidinst.lower() == relation_type.strip().lower()),
            None,
        )
        if fallback is None:
            avisos.append(f"relationType '{relation_type}' não existe no DataCite; '{value}' descartado")
            return None
        avisos.append(f"relationType '{relation_type}' convertido para '{fallback}'")
        relacao = fallback

    return DataCiteRelatedIdentifier(value, tipo_id, relacao)


# ===== RENDERIZAÇÃO =====

def render_datacite(dc: DataCiteRecord, format: DataCiteFormat = DataCiteFormat.JSON) -> str:
    if format == DataCiteFormat.XML:
        return _render_xml(dc)
    return json.dumps(datacite_to_dict(dc), indent=2, ensure_ascii=False) + "\n"


def _name_identifiers(identifier: Optional[TypedIdentifier]) -> List[Dict[str, str]]:
    if identifier is None:
        return []
    return [{"nameIdentifier": identifier.value, "nameIdentifierScheme": identifier.type}]


def datacite_to_dict(dc: DataCiteRecord) -> Dict[str, Any]:
    """Atributos no formato JSON da API REST do DataCite; blocos vazios são omitidos"""
    doc: Dict[str, Any] = {"doi": dc.doi.value}
    if dc.url is not None:
        doc["url"] = dc.url
    doc["types"] = {
        "resourceTypeGeneral": dc.resource_type.general,
        "resourceType": dc.resource_type.specific,
    }

    creators = []
    for creator in dc.creators:
        item: Dict[str, Any] = {"name": creator.name}
        if creator.identifier is not None:
            item["nameIdentifiers"] = _name_identifiers(creator.identifier)
        creators.append(item)
    doc["creators"] = creators

    titles = []
    for title in dc.titles:
        item = {"title": title.title}
        if title.title_type:
            item["titleType"] = title.title_type
        titles.append(item)
    doc["titles"] = titles

    doc["publisher"] = dc.publisher
    doc["publicationYear"] = dc.publication_year

    if dc.subjects:
        doc["subjects"] = [
            {"subject": s.subject, **({"subjectScheme": s.scheme} if s.scheme else {})}
            for s in dc.subjects
        ]
    if dc.contributors:
        contributors = []
        for contributor in dc.contributors:
            item = {"name": contributor.name, "contributorType": contributor.contributor_type}
            if contributor.identifier is not None:
                item["nameIdentifiers"] = _name_identifiers(contributor.identifier)
            contributors.append(item)
        doc["contributors"] = contributors
    if dc.dates:
        doc["dates"] = [
            {"date": d.date, "dateType": d.date_type,
             **({"dateInformation": d.date_information} if d.date_information else {})}
            for d in dc.dates
        ]
    if dc.alternate_identifiers:
        doc["alternateIdentifiers"] = [
            {"alternateIdentifier": a.value, "alternateIdentifierType": a.type}
            for a in dc.alternate_identifiers
        ]
    if dc.related_identifiers:
        doc["relatedIdentifiers"] = [
            {
                "relationType": r.relation_type,
                "relatedIdentifier": r.value,
                "relatedIdentifierType": r.identifier_type,
            }
            for r in dc.related_identifiers
        ]
    if dc.descriptions:
        doc["descriptions"] = [
            {"description": d.text, "descriptionType": d.description_type}
            for d in dc.descriptions
        ]
    return doc


def _sub(parent, tag: str, text: Optional[str] = None, **attrs: Optional[str]):
    el = ET.SubElement(parent, f"{{{KERNEL_NAMESPACE}}}{tag}")
    for nome, valor in attrs.items():
        if valor:
            el.set(nome, valor)
    if text is not None:
        el.text = text
    return el


def _name_identifier_xml(parent, identifier: Optional[TypedIdentifier]) -> None:
    if identifier is not None:
        _sub(parent, "nameIdentifier", identifier.value, nameIdentifierScheme=identifier.type)


def _render_xml(dc: DataCiteRecord) -> str:
    root = ET.Element(f"{{{KERNEL_NAMESPACE}}}resource", nsmap={None: KERNEL_NAMESPACE, "xsi": XSI_NAMESPACE})
    root.set(f"{{{XSI_NAMESPACE}}}schemaLocation", SCHEMA_LOCATION)

    _sub(root, "identifier", dc.doi.value, identifierType=dc.doi.scheme.value)

    creators = _sub(root, "creators")
    for creator in dc.creators:
        el = _sub(creators, "creator")
        _sub(el, "creatorName", creator.name)
        _name_identifier_xml(el, creator.identifier)

    titles = _sub(root, "titles")
    for title in dc.titles:
        _sub(titles, "title", title.title, titleType=title.title_type)

    _sub(root, "publisher", dc.publisher)
    _sub(root, "publicationYear", str(dc.publication_year))
    _sub(root, "resourceType", dc.resource_type.specific, resourceTypeGeneral=dc.resource_type.general)

    if dc.subjects:
        subjects = _sub(root, "subjects")
        for s in dc.subjects:
            _sub(subjects, "subject", s.subject, subjectScheme=s.scheme)
    if dc.contributors:
        contributors = _sub(root, "contributors")
        for contributor in dc.contributors:
            el = _sub(contributors, "contributor", contributorType=contributor.contributor_type)
            _sub(el, "contributorName", contributor.name)
            _name_identifier_xml(el, contributor.identifier)
    if dc.dates:
        dates = _sub(root, "dates")
        for d in dc.dates:
            _sub(dates, "date", d.date, dateType=d.date_type, dateInformation=d.date_information)
    if dc.alternate_identifiers:
        alternates = _sub(root, "alternateIdentifiers")
        for a in dc.alternate_identifiers:
            _sub(alternates, "alternateIdentifier", a.value, alternateIdentifierType=a.type)
    if dc.related_identifiers:
        related = _sub(root, "relatedIdentifiers")
        for r in dc.related_identifiers:
            _sub(related, "relatedIdentifier", r.value,
                 relatedIdentifierType=r.identifier_type, relationType=r.relation_type)
    if dc.descriptions:
        descriptions = _sub(root, "descriptions")
        for d in dc.descriptions:
            _sub(descriptions, "description", d.text, descriptionType=d.description_type)

    return ET.tostring(root, pretty_print=True, xml_declaration=True, encoding="UTF-8").decode("utf-8")


# ===== LEITURA =====

def parse_datacite(text: str, format: DataCiteFormat = DataCiteFormat.JSON) -> DataCiteRecord:
    """
    Inverso de render_datacite. O XML do kernel não carrega a URL de registro,
    então `url` volta como None nesse formato.

    Raises:
        MalformedDocument: texto que não é DataCite no formato pedido
    """
    try:
        if format == DataCiteFormat.XML:
            return _parse_xml(text)
        return _parse_json(text)
    except MalformedDocument:
        raise
    except (ValueError, KeyError, TypeError, AttributeError) as e:
        raise MalformedDocument(f"Metadados DataCite inválidos: {e}") from e


def _identifier_from(item: Dict[str, Any]) -> Optional[TypedIdentifier]:
    ids = item.get("nameIdentifiers") or []
    if not ids:
        return None
    return TypedIdentifier(ids[0]["nameIdentifier"], ids[0]["nameIdentifierScheme"])


def _parse_json(text: str) -> DataCiteRecord:
    doc = json.loads(text)
    # Aceita tanto os atributos quanto a resposta completa da API ({"data": {"attributes": ...}})
    if "data" in doc and isinstance(doc["data"], dict):
        doc = doc["data"].get("attributes", doc["data"])

    types = doc.get("types", {})
    return DataCiteRecord(
        doi=Pid.from_text(doc["doi"]),
        url=doc.get("url"),
        creators=tuple(Creator(c["name"], _identifier_from(c)) for c in doc.get("creators", [])),
        titles=tuple(Title(t["title"], t.get("titleType")) for t in doc.get("titles", [])),
        publisher=doc["publisher"],
        publication_year=int(doc["publicationYear"]),
        resource_type=ResourceType(types.get("resourceTypeGeneral", "Other"), types.get("resourceType", "")),
        contributors=tuple(
            Contributor(c["name"], c["contributorType"], _identifier_from(c))
            for c in doc.get("contributors", [])
        ),
        dates=tuple(
            DataCiteDate(d["date"], d["dateType"], d.get("dateInformation"))
            for d in doc.get("dates", [])
        ),
        alternate_identifiers=tuple(
            DataCiteAlternateIdentifier(a["alternateIdentifier"], a["alternateIdentifierType"])
            for a in doc.get("alternateIdentifiers", [])
        ),
        related_identifiers=tuple(
            DataCiteRelatedIdentifier(r["relatedIdentifier"], r["relatedIdentifierType"], r["relationType"])
            for r in doc.get("relatedIdentifiers", [])
        ),
        descriptions=tuple(
            Description(d["description"], d.get("descriptionType", "Abstract"))
            for d in doc.get("descriptions", [])
        ),
        subjects=tuple(Subject(s["subject"], s.get("subjectScheme")) for s in doc.get("subjects", [])),
    )


def _xml_name_identifier(el) -> Optional[TypedIdentifier]:
    ident = el.find("dc:nameIdentifier", XMLNS)
    if ident is None:
        return None
    return TypedIdentifier(ident.text or "", ident.get("nameIdentifierScheme", ""))


def _parse_xml(text: str) -> DataCiteRecord:
    parser = ET.XMLParser(resolve_entities=False, no_network=True)
    try:
        root = ET.fromstring(text.encode("utf-8"), parser)
    except ET.XMLSyntaxError as e:
        raise MalformedDocument(f"XML malformado: {e}") from e
    if root.tag != f"{{{KERNEL_NAMESPACE}}}resource":
        raise MalformedDocument(f"Elemento raiz inesperado: {root.tag}")

    identifier = root.find("dc:identifier", XMLNS)
    resource_type = root.find("dc:resourceType", XMLNS)

    return DataCiteRecord(
        doi=Pid.from_text(identifier.text, identifier.get("identifierType")),
        url=None,
        creators=tuple(
            Creator(el.findtext("dc:creatorName", "", XMLNS), _xml_name_identifier(el))
            for el in root.findall("dc:creators/dc:creator", XMLNS)
        ),
        titles=tuple(
            Title(el.text or "", el.get("titleType"))
            for el in root.findall("dc:titles/dc:title", XMLNS)
        ),
        publisher=root.findtext("dc:publisher", "", XMLNS),
        publication_year=int(root.findtext("dc:publicationYear", "", XMLNS)),
        resource_type=ResourceType(resource_type.get("resourceTypeGeneral"), resource_type.text or ""),
        contributors=tuple(
            Contributor(el.findtext("dc:contributorName", "", XMLNS), el.get("contributorType"),
                        _xml_name_identifier(el))
            for el in root.findall("dc:contributors/dc:contributor", XMLNS)
        ),
        dates=tuple(
            DataCiteDate(el.text or "", el.get("dateType"), el.get("dateInformation"))
            for el in root.findall("dc:dates/dc:date", XMLNS)
        ),
        alternate_identifiers=tuple(
            DataCiteAlternateIdentifier(el.text or "", el.get("alternateIdentifierType"))
            for el in root.findall("dc:alternateIdentifiers/dc:alternateIdentifier", XMLNS)
        ),
        related_identifiers=tuple(
            DataCiteRelatedIdentifier(el.text or "", el.get("relatedIdentifierType"), el.get("relationType"))
            for el in root.findall("dc:relatedIdentifiers/dc:relatedIdentifier", XMLNS)
        ),
        descriptions=tuple(
            Description(el.text or "", el.get("descriptionType"))
            for el in root.findall("dc:descriptions/dc:description", XMLNS)
        ),
        subjects=tuple(
            Subject(el.text or "", el.get("subjectScheme"))
            for el in root.findall("dc:subjects/dc:subject", XMLNS)
        ),
    )
