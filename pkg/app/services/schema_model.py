"""
Modelo de dados do schema PIDINST e o formato canônico (application/pidinst+json).

O formato canônico é JSON com as propriedades nomeadas exatamente como na
coluna "Schema" da análise de propriedades (Identifier, identifierType,
LandingPage, ...). A ordem das chaves é fixa, listas vazias são omitidas e a
saída termina com uma quebra de linha.
"""

import json
import logging
import os
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Any, Dict, List, Optional, Tuple

from jsonschema.exceptions import best_match
from jsonschema.validators import validator_for

from app.exceptions import RecordSyntaxError, TypeMismatch, UnknownProperty
from app.utils.converters import (
    ORCID_PATTERN,
    ROR_PATTERN,
    is_absolute_url,
    is_doi,
    strip_resolver_prefix,
)

logger = logging.getLogger(__name__)

HANDLE_RESOLVER = "http://hdl.handle.net/"
DOI_RESOLVER = "https://doi.org/"
MEDIA_TYPE = "application/pidinst+json"


class PidScheme(Enum):
    """Esquemas de identificador persistente"""
    HANDLE = "Handle"
    DOI = "DOI"
    URL = "URL"
    ORCID = "ORCID"
    ROR = "ROR"
    OTHER = "Other"


class DateType:
    """Lista controlada de dateType"""
    COMMISSIONED = "Commissioned"
    DECOMMISSIONED = "DeCommissioned"

    ALL = (COMMISSIONED, DECOMMISSIONED)


class RelationType:
    """Tipos de relação usados pelos RelatedIdentifier"""
    IS_DESCRIBED_BY = "IsDescribedBy"
    HAS_METADATA = "HasMetadata"
    HAS_COMPONENT = "HasComponent"
    IS_COMPONENT_OF = "IsComponentOf"
    IS_NEW_VERSION_OF = "IsNewVersionOf"
    IS_PREVIOUS_VERSION_OF = "IsPreviousVersionOf"
    WAS_USED_IN = "WasUsedIn"

    ALL = (
        IS_DESCRIBED_BY, HAS_METADATA, HAS_COMPONENT, IS_COMPONENT_OF,
        IS_NEW_VERSION_OF, IS_PREVIOUS_VERSION_OF, WAS_USED_IN,
    )


class IdentifierType:
    """Tokens recomendados para identifierType (texto livre)"""
    MEASURING_INSTRUMENT = "MeasuringInstrument"
    HANDLE = "Handle"
    DOI = "DOI"


SERIAL_NUMBER = "SerialNumber"


@dataclass(frozen=True)
class Pid:
    """
    Identificador persistente. `value` é sempre a forma nua
    (ex.: 21.T11998/0000-001A-3905-F); a URL resolvível é derivada.
    """
    scheme: PidScheme
    value: str

    @classmethod
    def from_text(cls, text: str, identifier_type: Optional[str] = None,
                  resolver: Optional[str] = None) -> "Pid":
        """
        Interpreta um identificador na forma nua ou de URL de resolver.

        O esquema vem de identifier_type quando este é "Handle" ou "DOI";
        depois, do resolver da URL (hdl.handle.net, doi.org, o resolver
        informado); só então é inferido da forma nua do valor.
        """
        texto = text.strip()
        if resolver and texto.startswith(resolver):
            implicito, nu = PidScheme.HANDLE.value, texto[len(resolver):]
        else:
            implicito, nu = strip_resolver_prefix(texto)

        tipo = (identifier_type or "").strip().lower()
        if tipo == "handle":
            return cls(PidScheme.HANDLE, nu)
        if tipo == "doi":
            return cls(PidScheme.DOI, nu)
        if implicito is not None:
            return cls(PidScheme(implicito), nu)
        return cls(_infer_scheme(nu), nu)

    def to_url(self, resolver: Optional[str] = None) -> Optional[str]:
        """URL de exibição; o resolver de Handles é configurável"""
        if self.scheme == PidScheme.HANDLE:
            return f"{resolver or HANDLE_RESOLVER}{self.value}"
        if self.scheme == PidScheme.DOI:
            return f"{DOI_RESOLVER}{self.value}"
        if self.scheme == PidScheme.URL:
            return self.value
        if self.scheme == PidScheme.ORCID:
            return f"https://orcid.org/{self.value}"
        if self.scheme == PidScheme.ROR:
            return f"https://ror.org/{self.value}"
        return None

    @property
    def display_url(self) -> Optional[str]:
        return self.to_url()

    @property
    def prefix(self) -> str:
        return self.value.split("/", 1)[0]

    @property
    def suffix(self) -> str:
        return self.value.split("/", 1)[1] if "/" in self.value else ""

    def __str__(self) -> str:
        return self.value


def _infer_scheme(value: str) -> PidScheme:
    if is_doi(value):
        return PidScheme.DOI
    if ORCID_PATTERN.match(value):
        return PidScheme.ORCID
    if ROR_PATTERN.match(value):
        return PidScheme.ROR
    if is_absolute_url(value):
        return PidScheme.URL
    # prefixo/... conta como Handle mesmo malformado; a sintaxe fica com o validador
    prefixo, barra, _ = value.partition("/")
    if barra and prefixo and not any(c.isspace() for c in prefixo):
        return PidScheme.HANDLE
    return PidScheme.OTHER


@dataclass(frozen=True)
class TypedIdentifier:
    """Par (valor, tipo) de ownerIdentifier / manufacturerIdentifier"""
    value: str
    type: str


@dataclass(frozen=True)
class Owner:
    owner_name: str
    owner_contact: Optional[str] = None
    owner_identifier: Optional[TypedIdentifier] = None


@dataclass(frozen=True)
class Manufacturer:
    manufacturer_name: str
    model_name: Optional[str] = None
    manufacturer_identifier: Optional[TypedIdentifier] = None


@dataclass(frozen=True)
class InstrumentDate:
    # Texto YYYY-MM-DD; datas impossíveis chegam ao validador como BadDate
    date: str
    date_type: str


@dataclass(frozen=True)
class AlternateIdentifier:
    value: str
    type: str


@dataclass(frozen=True)
class RelatedIdentifier:
    value: str
    identifier_type: str
    relation_type: str


@dataclass(frozen=True)
class TypedTerm:
    value: str
    scheme_hint: Optional[str] = None


@dataclass(frozen=True)
class InstrumentRecord:
    """
    Descrição PIDINST completa de um instrumento físico.

    Os campos obrigatórios aceitam None para que o validador possa apontar
    a ausência (MissingMandatory) em vez de o parser falhar.
    """
    identifier: Optional[Pid] = None
    identifier_type: Optional[str] = None
    landing_page: Optional[str] = None
    name: Optional[str] = None
    owners: Tuple[Owner, ...] = ()
    manufacturers: Tuple[Manufacturer, ...] = ()
    description: Optional[str] = None
    instrument_types: Tuple[TypedTerm, ...] = ()
    measured_variables: Tuple[TypedTerm, ...] = ()
    dates: Tuple[InstrumentDate, ...] = ()
    alternate_identifiers: Tuple[AlternateIdentifier, ...] = ()
    related_identifiers: Tuple[RelatedIdentifier, ...] = ()

    def serial_numbers(self) -> List[str]:
        """Valores de AlternateIdentifier do tipo SerialNumber (sem diferenciar caixa)"""
        return [
            alt.value for alt in self.alternate_identifiers
            if alt.type.strip().lower() == SERIAL_NUMBER.lower()
        ]


# ===== FORMATO CANÔNICO =====

TOP_LEVEL_PROPERTIES = (
    "Identifier", "identifierType", "LandingPage", "AlternateIdentifier",
    "Name", "Description", "InstrumentType", "Owner", "Manufacturer",
    "Date", "VariableMeasured", "RelatedIdentifier",
)

SCHEMA_PATH = os.path.join(os.path.dirname(os.path.dirname(__file__)), "data", "pidinst.schema.json")

# Nomes dos tipos JSON nas mensagens de TypeMismatch
_TIPOS_JSON = {"object": "objeto", "array": "lista", "string": "texto"}


@lru_cache(maxsize=1)
def _schema_validator():
    with open(SCHEMA_PATH, encoding="utf-8") as f:
        schema = json.load(f)
    Validator = validator_for(schema)
    Validator.check_schema(schema)
    return Validator(schema)


def _reject_duplicate_keys(pairs: List[Tuple[str, Any]]) -> Dict[str, Any]:
    obj: Dict[str, Any] = {}
    for chave, valor in pairs:
        if chave in obj:
            raise RecordSyntaxError(f"Propriedade repetida '{chave}'")
        obj[chave] = valor
    return obj


def parse_record(text: str) -> InstrumentRecord:
    """
    Lê um registro no formato canônico.

    Raises:
        RecordSyntaxError: JSON malformado (com linha/coluna) ou propriedade repetida
        UnknownProperty: propriedade fora do schema
        TypeMismatch: valor com tipo inesperado
    """
    try:
        data = json.loads(text, object_pairs_hook=_reject_duplicate_keys)
    except json.JSONDecodeError as e:
        raise RecordSyntaxError(e.msg, e.lineno, e.colno) from e
    return record_from_dict(data)


def canonicalize(record: InstrumentRecord) -> str:
    """Serialização determinística do registro"""
    return json.dumps(record_to_dict(record), indent=2, ensure_ascii=False) + "\n"


def record_to_dict(record: InstrumentRecord) -> Dict[str, Any]:
    """Registro -> dicionário com as chaves na ordem canônica"""
    doc: Dict[str, Any] = {}

    if record.identifier is not None:
        doc["Identifier"] = record.identifier.value
    if record.identifier_type is not None:
        doc["identifierType"] = record.identifier_type
    if record.landing_page is not None:
        doc["LandingPage"] = record.landing_page
    if record.alternate_identifiers:
        doc["AlternateIdentifier"] = [
            {"AlternateIdentifier": alt.value, "alternateIdentifierType": alt.type}
            for alt in record.alternate_identifiers
        ]
    if record.name is not None:
        doc["Name"] = record.name
    if record.description is not None:
        doc["Description"] = record.description
    if record.instrument_types:
        doc["InstrumentType"] = [
            _term_to_dict(term, "InstrumentType", "instrumentTypeScheme")
            for term in record.instrument_types
        ]
    if record.owners:
        doc["Owner"] = [_owner_to_dict(owner) for owner in record.owners]
    if record.manufacturers:
        doc["Manufacturer"] = [_manufacturer_to_dict(m) for m in record.manufacturers]
    if record.dates:
        doc["Date"] = [{"Date": d.date, "dateType": d.date_type} for d in record.dates]
    if record.measured_variables:
        doc["VariableMeasured"] = [
            _term_to_dict(term, "VariableMeasured", "variableMeasuredScheme")
            for term in record.measured_variables
        ]
    if record.related_identifiers:
        doc["RelatedIdentifier"] = [
            {
                "RelatedIdentifier": rel.value,
                "relatedIdentifierType": rel.identifier_type,
                "relationType": rel.relation_type,
            }
            for rel in record.related_identifiers
        ]
    return doc


def _term_to_dict(term: TypedTerm, value_key: str, scheme_key: str) -> Dict[str, str]:
    item = {value_key: term.value}
    if term.scheme_hint is not None:
        item[scheme_key] = term.scheme_hint
    return item


def _owner_to_dict(owner: Owner) -> Dict[str, str]:
    item = {"ownerName": owner.owner_name}
    if owner.owner_contact is not None:
        item["ownerContact"] = owner.owner_contact
    if owner.owner_identifier is not None:
        item["ownerIdentifier"] = owner.owner_identifier.value
        item["ownerIdentifierType"] = owner.owner_identifier.type
    return item


def _manufacturer_to_dict(manufacturer: Manufacturer) -> Dict[str, str]:
    item = {"manufacturerName": manufacturer.manufacturer_name}
    if manufacturer.model_name is not None:
        item["modelName"] = manufacturer.model_name
    if manufacturer.manufacturer_identifier is not None:
        item["manufacturerIdentifier"] = manufacturer.manufacturer_identifier.value
        item["manufacturerIdentifierType"] = manufacturer.manufacturer_identifier.type
    return item




def _json_path(parts) -> str:
    """deque(['Owner', 0]) -> '$.Owner[0]'"""
    return "$" + "".join(f"[{p}]" if isinstance(p, int) else f".{p}" for p in parts)


def check_structure(data: Any) -> None:
    """
    Confere o documento decodificado contra pidinst.schema.json.

    Raises:
        UnknownProperty: additionalProperties violado (primeira chave fora do schema)
        TypeMismatch: qualquer outra violação estrutural
    """
    erro = best_match(_schema_validator().iter_errors(data))
    if erro is None:
        return
    path = _json_path(erro.absolute_path)
    if erro.validator == "additionalProperties":
        conhecidas = erro.schema.get("properties", {})
        extras = [chave for chave in erro.instance if chave not in conhecidas]
        raise UnknownProperty(extras[0], path)
    if erro.validator == "type":
        raise TypeMismatch(path, _TIPOS_JSON.get(erro.validator_value, str(erro.validator_value)))
    raise TypeMismatch(path, erro.message)


def record_from_dict(data: Any) -> InstrumentRecord:
    """Dicionário já decodificado -> InstrumentRecord"""
    check_structure(data)

    identifier_type = data.get("identifierType")
    identifier = None
    if "Identifier" in data:
        identifier = Pid.from_text(data["Identifier"], identifier_type)

    return InstrumentRecord(
        identifier=identifier,
        identifier_type=identifier_type,
        landing_page=data.get("LandingPage"),
        name=data.get("Name"),
        owners=tuple(_owner_from_dict(item) for item in data.get("Owner", [])),
        manufacturers=tuple(_manufacturer_from_dict(item) for item in data.get("Manufacturer", [])),
        description=data.get("Description"),
        instrument_types=tuple(
            TypedTerm(item.get("InstrumentType", ""), item.get("instrumentTypeScheme"))
            for item in data.get("InstrumentType", [])
        ),
        measured_variables=tuple(
            TypedTerm(item.get("VariableMeasured", ""), item.get("variableMeasuredScheme"))
            for item in data.get("VariableMeasured", [])
        ),
        dates=tuple(
            InstrumentDate(item.get("Date", ""), item.get("dateType", ""))
            for item in data.get("Date", [])
        ),
        alternate_identifiers=tuple(
            AlternateIdentifier(item.get("AlternateIdentifier", ""), item.get("alternateIdentifierType", ""))
            for item in data.get("AlternateIdentifier", [])
        ),
        related_identifiers=tuple(
            RelatedIdentifier(
                item.get("RelatedIdentifier", ""),
                item.get("relatedIdentifierType", ""),
                item.get("relationType", ""),
            )
            for item in data.get("RelatedIdentifier", [])
        ),
    )


def _owner_from_dict(item: Dict[str, str]) -> Owner:
    return Owner(
        owner_name=item.get("ownerName", ""),
        owner_contact=item.get("ownerContact"),
        owner_identifier=_typed_identifier(item, "ownerIdentifier", "ownerIdentifierType"),
    )


def _manufacturer_from_dict(item: Dict[str, str]) -> Manufacturer:
    return Manufacturer(
        manufacturer_name=item.get("manufacturerName", ""),
        model_name=item.get("modelName"),
        manufacturer_identifier=_typed_identifier(item, "manufacturerIdentifier", "manufacturerIdentifierType"),
    )


def _typed_identifier(item: Dict[str, str], value_key: str, type_key: str) -> Optional[TypedIdentifier]:
    if value_key not in item and type_key not in item:
        return None
    return TypedIdentifier(item.get(value_key, ""), item.get(type_key, ""))
