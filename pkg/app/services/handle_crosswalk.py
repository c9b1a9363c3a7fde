"""
Crosswalk InstrumentRecord <-> registro Handle (perfil ePIC).

Cada propriedade do schema vira uma entrada do registro Handle cujo tipo é
o type-handle da propriedade. Propriedades compostas são gravadas como texto
JSON com a mesma estrutura aninhada que o ePIC publica.
"""

import json
import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Tuple

from app.exceptions import (
    MalformedEntryData,
    MissingMandatory,
    MissingTypeHandle,
    UnknownTypeHandle,
)
from app.services.schema_model import (
    AlternateIdentifier,
    InstrumentDate,
    InstrumentRecord,
    Manufacturer,
    Owner,
    Pid,
    RelatedIdentifier,
    TypedIdentifier,
    TypedTerm,
)

logger = logging.getLogger(__name__)

URL_TYPE = "URL"
NAME_INFO_TYPE = "NAME"
LANDING_PAGE_INFO_TYPE = "LANDING_PAGE"

# Tipos presentes em registros reais que não carregam propriedades do schema
IGNORED_TYPES = {NAME_INFO_TYPE, LANDING_PAGE_INFO_TYPE, "HS_ADMIN"}

DEFAULT_TYPE_HANDLES = {
    "Identifier": "21.T11148/8eb858ee0b12e8e463a5",
    "LandingPage": "21.T11148/9a15a4735d4bda329d80",
    "Name": "21.T11148/709a23220f2c3d64d1e1",
    "Owners": "21.T11148/4eaec4bc0f1df68ab2a7",
    "Manufacturers": "21.T11148/1f3e82ddf0697a497432",
    "Description": "21.T11148/55f8ebc805e65b5b71dd",
    "InstrumentType": "21.T11148/f76ad9d0324302fc47dd",
    "MeasuredVariables": "21.T11148/72928b84e060d491ee41",
    "Dates": "21.T11148/22c62082a4d2d9ae2602",
    "AlternateIdentifiers": "21.T11148/eb3c713572f681e6c4c3",
    "RelatedIdentifiers": "21.T11148/178fb558abc755ca7046",
}

# Ordem das entradas tipadas (índices 2..n)
PROPERTY_ORDER = tuple(DEFAULT_TYPE_HANDLES)

# Alguns registros publicados trazem o prefixo sem o "T"
_LEGACY_TYPE_PREFIX = "21.11148/"
_TYPE_PREFIX = "21.T11148/"


@dataclass(frozen=True)
class HandleEntry:
    index: int
    type: str
    data: str


@dataclass(frozen=True)
class HandleRecord:
    handle: Pid
    entries: Tuple[HandleEntry, ...]

    def __post_init__(self):
        indices = [e.index for e in self.entries]
        if any(i <= 0 for i in indices):
            raise ValueError("Índices do registro Handle devem ser positivos")
        if indices != sorted(set(indices)):
            raise ValueError(f"Índices repetidos ou fora de ordem: {indices}")
        if sum(1 for e in self.entries if e.type == URL_TYPE) != 1:
            raise ValueError("O registro Handle deve ter exatamente uma entrada URL")
        tipos = [e.type for e in self.entries if e.type != URL_TYPE]
        if len(tipos) != len(set(tipos)):
            raise ValueError("Tipo repetido no registro Handle")

    def entry(self, type_: str) -> Optional[HandleEntry]:
        for e in self.entries:
            if e.type == type_:
                return e
        return None


@dataclass(frozen=True)
class TypeHandleMap:
    """Propriedade do schema -> type-handle. Precisa ser bijetivo."""
    handles: Dict[str, str] = field(default_factory=lambda: dict(DEFAULT_TYPE_HANDLES))

    def __post_init__(self):
        valores = list(self.handles.values())
        if len(valores) != len(set(valores)):
            raise ValueError("TypeHandleMap não é bijetivo: type-handle repetido")

    @classmethod
    def default(cls) -> "TypeHandleMap":
        return cls()

    def handle_for(self, property_name: str) -> str:
        try:
            return self.handles[property_name]
        except KeyError:
            raise MissingTypeHandle(property_name)

    def property_for(self, type_handle: str) -> Optional[str]:
        normalizado = type_handle.strip()
        if normalizado.startswith(_LEGACY_TYPE_PREFIX):
            normalizado = _TYPE_PREFIX + normalizado[len(_LEGACY_TYPE_PREFIX):]
        for nome, handle in self.handles.items():
            if handle == normalizado:
                return nome
        return None


def _dumps(value: Any) -> str:
    return json.dumps(value, ensure_ascii=False)


# ===== InstrumentRecord -> HandleRecord =====

def to_handle_record(record: InstrumentRecord, types: Optional[TypeHandleMap] = None,
                     include_info_types: bool = False,
                     resolver: Optional[str] = None) -> HandleRecord:
    """
    Monta o registro Handle de um registro válido.

    A entrada 1 é a URL (landing page); as demais seguem PROPERTY_ORDER e só
    aparecem quando a propriedade está presente. Com include_info_types, as
    entradas NAME e LANDING_PAGE são acrescentadas ao final.

    Raises:
        MissingTypeHandle: propriedade presente sem type-handle configurado
    """
    types = types or TypeHandleMap.default()
    pid = record.identifier

    dados: List[Tuple[str, str]] = []
    for nome in PROPERTY_ORDER:
        valor = _PROPERTY_WRITERS[nome](record, resolver)
        if valor is not None:
            dados.append((types.handle_for(nome), valor))

    entries = [HandleEntry(1, URL_TYPE, record.landing_page)]
    entries.extend(HandleEntry(i, tipo, valor) for i, (tipo, valor) in enumerate(dados, start=2))

    if include_info_types:
        proximo = len(entries) + 1
        entries.append(HandleEntry(proximo, NAME_INFO_TYPE, record.name))
        entries.append(HandleEntry(proximo + 1, LANDING_PAGE_INFO_TYPE, record.landing_page))

    return HandleRecord(pid, tuple(entries))


def _write_identifier(record: InstrumentRecord, resolver: Optional[str]) -> str:
    pid = record.identifier
    return _dumps({
        "identifierValue": pid.to_url(resolver) or pid.value,
        "identifierType": record.identifier_type,
    })


def _write_owners(record: InstrumentRecord, resolver: Optional[str]) -> str:
    itens = []
    for owner in record.owners:
        interno: Dict[str, Any] = {"ownerName": owner.owner_name}
        if owner.owner_contact is not None:
            interno["ownerContact"] = owner.owner_contact
        if owner.owner_identifier is not None:
            interno["ownerIdentifier"] = {
                "ownerIdentifierValue": owner.owner_identifier.value,
                "ownerIdentifierType": owner.owner_identifier.type,
            }
        itens.append({"Owner": interno})
    return _dumps(itens)


def _write_manufacturers(record: InstrumentRecord, resolver: Optional[str]) -> str:
    itens = []
    for manufacturer in record.manufacturers:
        interno: Dict[str, Any] = {"manufacturerName": manufacturer.manufacturer_name}
        if manufacturer.model_name is not None:
            interno["modelName"] = manufacturer.model_name
        if manufacturer.manufacturer_identifier is not None:
            interno["manufacturerIdentifier"] = {
                "manufacturerIdentifierValue": manufacturer.manufacturer_identifier.value,
                "manufacturerIdentifierType": manufacturer.manufacturer_identifier.type,
            }
        itens.append({"Manufacturer": interno})
    return _dumps(itens)


def _write_instrument_type(record: InstrumentRecord, resolver: Optional[str]) -> Optional[str]:
    termos = record.instrument_types
    if not termos:
        return None
    # Um único termo sem esquema vai como texto puro, como no ePIC
    if len(termos) == 1 and termos[0].scheme_hint is None and not termos[0].value.startswith("["):
        return termos[0].value
    return _dumps([
        {"InstrumentType": _term(term, "InstrumentType", "instrumentTypeScheme")}
        for term in termos
    ])


def _write_measured_variables(record: InstrumentRecord, resolver: Optional[str]) -> Optional[str]:
    if not record.measured_variables:
        return None
    return _dumps([
        {"MeasuredVariable": _term(term, "VariableMeasured", "variableMeasuredScheme")}
        for term in record.measured_variables
    ])


def _term(term: TypedTerm, value_key: str, scheme_key: str) -> Dict[str, str]:
    item = {value_key: term.value}
    if term.scheme_hint is not None:
        item[scheme_key] = term.scheme_hint
    return item


def _write_dates(record: InstrumentRecord, resolver: Optional[str]) -> Optional[str]:
    if not record.dates:
        return None
    return _dumps([{"date": {"date": d.date, "dateType": d.date_type}} for d in record.dates])


def _write_alternate_identifiers(record: InstrumentRecord, resolver: Optional[str]) -> Optional[str]:
    if not record.alternate_identifiers:
        return None
    return _dumps([
        {"AlternateIdentifier": {"AlternateIdentifierValue": alt.value, "alternateIdentifierType": alt.type}}
        for alt in record.alternate_identifiers
    ])


def _write_related_identifiers(record: InstrumentRecord, resolver: Optional[str]) -> Optional[str]:
    if not record.related_identifiers:
        return None
    return _dumps([
        {
            "RelatedIdentifier": {
                "RelatedIdentifierValue": rel.value,
                "RelatedIdentifierType": rel.identifier_type,
                "relationType": rel.relation_type,
            }
        }
        for rel in record.related_identifiers
    ])


_PROPERTY_WRITERS: Dict[str, Callable[[InstrumentRecord, Optional[str]], Optional[str]]] = {
    "Identifier": _write_identifier,
    "LandingPage": lambda r, _: r.landing_page,
    "Name": lambda r, _: r.name,
    "Owners": _write_owners,
    "Manufacturers": _write_manufacturers,
    "Description": lambda r, _: r.description,
    "InstrumentType": _write_instrument_type,
    "MeasuredVariables": _write_measured_variables,
    "Dates": _write_dates,
    "AlternateIdentifiers": _write_alternate_identifiers,
    "RelatedIdentifiers": _write_related_identifiers,
}


# ===== HandleRecord -> InstrumentRecord =====

def from_handle_record(hr: HandleRecord, types: Optional[TypeHandleMap] = None,
                       resolver: Optional[str] = None) -> InstrumentRecord:
    """
    Leitura inversa de to_handle_record.

    Raises:
        UnknownTypeHandle: tipo de entrada que não corresponde a nenhuma propriedade
        MalformedEntryData: dado de entrada que não tem a estrutura esperada
        MissingMandatory: Identifier, LandingPage, Name, Owners ou Manufacturers ausentes
    """
    types = types or TypeHandleMap.default()

    por_propriedade: Dict[str, HandleEntry] = {}
    for entry in hr.entries:
        if entry.type == URL_TYPE or entry.type in IGNORED_TYPES:
            continue
        nome = types.property_for(entry.type)
        if nome is None:
            raise UnknownTypeHandle(entry.type, entry.index)
        por_propriedade[nome] = entry

    for obrigatoria in ("Identifier", "LandingPage", "Name", "Owners", "Manufacturers"):
        if obrigatoria not in por_propriedade:
            raise MissingMandatory(obrigatoria)

    valores: Dict[str, Any] = {}
    for nome, entry in por_propriedade.items():
        leitor = _PROPERTY_READERS[nome]
        try:
            valores[nome] = leitor(entry.data, resolver)
        except MalformedEntryData:
            raise
        except (ValueError, KeyError, TypeError, AttributeError) as e:
            raise MalformedEntryData(entry.index, str(e)) from e

    identifier, identifier_type = valores["Identifier"]
    return InstrumentRecord(
        identifier=identifier,
        identifier_type=identifier_type,
        landing_page=valores["LandingPage"],
        name=valores["Name"],
        owners=valores["Owners"],
        manufacturers=valores["Manufacturers"],
        description=valores.get("Description"),
        instrument_types=valores.get("InstrumentType", ()),
        measured_variables=valores.get("MeasuredVariables", ()),
        dates=valores.get("Dates", ()),
        alternate_identifiers=valores.get("AlternateIdentifiers", ()),
        related_identifiers=valores.get("RelatedIdentifiers", ()),
    )


def _load_list(data: str) -> List[Dict[str, Any]]:
    valor = json.loads(data)
    if not isinstance(valor, list):
        raise ValueError("esperado um array JSON")
    return valor


def _optional_text(item: Dict[str, Any], key: str) -> Optional[str]:
    valor = item.get(key)
    if valor is not None and not isinstance(valor, str):
        raise TypeError(f"'{key}' deve ser texto")
    return valor


def _read_identifier(data: str, resolver: Optional[str]) -> Tuple[Pid, str]:
    item = json.loads(data)
    identifier_type = item["identifierType"]
    return Pid.from_text(item["identifierValue"], identifier_type, resolver), identifier_type


def _read_owners(data: str, resolver: Optional[str]) -> Tuple[Owner, ...]:
    owners = []
    for item in _load_list(data):
        interno = item["Owner"]
        identificador = interno.get("ownerIdentifier")
        owners.append(Owner(
            owner_name=interno["ownerName"],
            owner_contact=_optional_text(interno, "ownerContact"),
            owner_identifier=TypedIdentifier(
                identificador["ownerIdentifierValue"], identificador["ownerIdentifierType"]
            ) if identificador is not None else None,
        ))
    return tuple(owners)


def _read_manufacturers(data: str, resolver: Optional[str]) -> Tuple[Manufacturer, ...]:
    manufacturers = []
    for item in _load_list(data):
        interno = item["Manufacturer"]
        identificador = interno.get("manufacturerIdentifier")
        manufacturers.append(Manufacturer(
            manufacturer_name=interno["manufacturerName"],
            model_name=_optional_text(interno, "modelName"),
            manufacturer_identifier=TypedIdentifier(
                identificador["manufacturerIdentifierValue"], identificador["manufacturerIdentifierType"]
            ) if identificador is not None else None,
        ))
    return tuple(manufacturers)


def _read_instrument_type(data: str, resolver: Optional[str]) -> Tuple[TypedTerm, ...]:
    if not data.startswith("["):
        return (TypedTerm(data),)
    return tuple(
        TypedTerm(item["InstrumentType"]["InstrumentType"],
                  _optional_text(item["InstrumentType"], "instrumentTypeScheme"))
        for item in _load_list(data)
    )


def _read_measured_variables(data: str, resolver: Optional[str]) -> Tuple[TypedTerm, ...]:
    return tuple(
        TypedTerm(item["MeasuredVariable"]["VariableMeasured"],
                  _optional_text(item["MeasuredVariable"], "variableMeasuredScheme"))
        for item in _load_list(data)
    )


def _read_dates(data: str, resolver: Optional[str]) -> Tuple[InstrumentDate, ...]:
    return tuple(
        InstrumentDate(item["date"]["date"], item["date"]["dateType"])
        for item in _load_list(data)
    )


def _read_alternate_identifiers(data: str, resolver: Optional[str]) -> Tuple[AlternateIdentifier, ...]:
    return tuple(
        AlternateIdentifier(
            item["AlternateIdentifier"]["AlternateIdentifierValue"],
            item["AlternateIdentifier"]["alternateIdentifierType"],
        )
        for item in _load_list(data)
    )


def _read_related_identifiers(data: str, resolver: Optional[str]) -> Tuple[RelatedIdentifier, ...]:
    return tuple(
        RelatedIdentifier(
            item["RelatedIdentifier"]["RelatedIdentifierValue"],
            item["RelatedIdentifier"]["RelatedIdentifierType"],
            item["RelatedIdentifier"]["relationType"],
        )
        for item in _load_list(data)
    )


_PROPERTY_READERS: Dict[str, Callable[[str, Optional[str]], Any]] = {
    "Identifier": _read_identifier,
    "LandingPage": lambda data, _: data,
    "Name": lambda data, _: data,
    "Owners": _read_owners,
    "Manufacturers": _read_manufacturers,
    "Description": lambda data, _: data,
    "InstrumentType": _read_instrument_type,
    "MeasuredVariables": _read_measured_variables,
    "Dates": _read_dates,
    "AlternateIdentifiers": _read_alternate_identifiers,
    "RelatedIdentifiers": _read_related_identifiers,
}


# ===== Serialização (JSON do proxy Handle) =====

def handle_record_to_dict(hr: HandleRecord) -> Dict[str, Any]:
    return {
        "handle": hr.handle.value,
        "values": [
            {"index": e.index, "type": e.type, "data": {"format": "string", "value": e.data}}
            for e in hr.entries
        ],
    }


def render_handle_record(hr: HandleRecord) -> str:
    """Registro Handle no formato JSON do proxy (corpo do ?noredirect e dos golden files)"""
    return json.dumps(handle_record_to_dict(hr), indent=2, ensure_ascii=False) + "\n"


def parse_handle_record(text: str) -> HandleRecord:
    """
    Lê o JSON do proxy Handle. As entradas são reordenadas pelo índice.

    Raises:
        MalformedEntryData: JSON inválido ou entrada sem index/type/data
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise MalformedEntryData(0, f"JSON inválido: {e.msg}") from e

    if not isinstance(doc, dict) or "handle" not in doc or not isinstance(doc.get("values"), list):
        raise MalformedEntryData(0, "esperado objeto com 'handle' e 'values'")

    entries = []
    for i, valor in enumerate(doc["values"]):
        try:
            index = int(valor["index"])
            data = valor["data"]
            texto = data["value"] if isinstance(data, dict) else data
            if not isinstance(texto, str):
                texto = _dumps(texto)
            entries.append(HandleEntry(index, str(valor["type"]), texto))
        except (KeyError, TypeError, ValueError) as e:
            raise MalformedEntryData(i, f"entrada incompleta: {e}") from e

    entries.sort(key=lambda e: e.index)
    try:
        return HandleRecord(Pid.from_text(str(doc["handle"])), tuple(entries))
    except ValueError as e:
        raise MalformedEntryData(0, str(e)) from e
