"""
Validador de registros PIDINST.

Verifica propriedades obrigatórias, vocabulários controlados (snapshots
locais, sem acesso à rede) e sintaxe de identificadores. Nunca lança exceção
por problema no registro: tudo vira entrada do ValidationReport.
"""

import json
import logging
import os
from collections import Counter
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Any, Dict, Iterable, List, Mapping, Optional, Tuple, Union

from app.services.schema_model import (
    DateType,
    InstrumentRecord,
    PidScheme,
    TypedIdentifier,
    TypedTerm,
)
from app.utils.converters import (
    is_absolute_url,
    is_doi,
    is_handle,
    parse_iso_date,
    strip_resolver_prefix,
)

logger = logging.getLogger(__name__)

DEFAULT_VOCAB_DIR = os.path.join(os.path.dirname(os.path.dirname(__file__)), "data", "vocabularies")

# Esquemas de vocabulário consultados pelo validador
DATE_TYPE_SCHEME = "dateType"
RELATION_TYPE_SCHEME = "relationType"
ALTERNATE_TYPE_SCHEME = "alternateIdentifierType"
IDENTIFIER_TYPE_SCHEME = "identifierType"
INSTRUMENT_TYPE_SCHEME = "L22-instrument-types"
MEASURED_VARIABLE_SCHEME = "P01-measured-variables"


class ViolationCode(Enum):
    MISSING_MANDATORY = "MissingMandatory"
    EMPTY_VALUE = "EmptyValue"
    BAD_IDENTIFIER_SYNTAX = "BadIdentifierSyntax"
    UNKNOWN_VOCABULARY_TERM = "UnknownVocabularyTerm"
    DUPLICATE_ALTERNATE_IDENTIFIER = "DuplicateAlternateIdentifier"
    BAD_DATE = "BadDate"
    BAD_URL = "BadUrl"


class Severity(Enum):
    ERROR = "Error"
    WARNING = "Warning"


@dataclass(frozen=True)
class Violation:
    code: ViolationCode
    path: str
    message: str
    severity: Severity = Severity.ERROR

    def to_dict(self) -> Dict[str, str]:
        return {
            "code": self.code.value,
            "path": self.path,
            "message": self.message,
            "severity": self.severity.value,
        }


@dataclass(frozen=True)
class ValidationReport:
    violations: Tuple[Violation, ...] = ()

    @property
    def errors(self) -> List[Violation]:
        return [v for v in self.violations if v.severity == Severity.ERROR]

    @property
    def warnings(self) -> List[Violation]:
        return [v for v in self.violations if v.severity == Severity.WARNING]

    @property
    def is_valid(self) -> bool:
        return not self.errors

    def to_dict(self) -> Dict[str, Any]:
        return {
            "valid": self.is_valid,
            "errors": len(self.errors),
            "warnings": len(self.warnings),
            "violations": [v.to_dict() for v in self.violations],
        }


# ===== VOCABULÁRIOS =====

@dataclass(frozen=True)
class VocabularyTerm:
    token: str
    concept_url: Optional[str] = None
    definition: Optional[str] = None


@dataclass(frozen=True)
class VocabularySnapshot:
    """Lista plana de conceitos (recorte offline de um esquema SKOS)"""
    scheme_id: str
    terms: Tuple[VocabularyTerm, ...]
    source: str = ""

    def __post_init__(self):
        repetidos = [
            token for token, total in Counter(t.token.lower() for t in self.terms).items()
            if total > 1
        ]
        if repetidos:
            raise ValueError(f"Tokens repetidos no esquema {self.scheme_id}: {repetidos}")

    @property
    def tokens(self) -> List[str]:
        return [t.token for t in self.terms]

    @property
    def has_concepts(self) -> bool:
        return any(t.concept_url for t in self.terms)


class MatchKind(Enum):
    EXACT = "Exact"
    CASE_VARIANT = "CaseVariant"
    UNKNOWN = "Unknown"


@dataclass(frozen=True)
class VocabularyMatch:
    kind: MatchKind
    canonical: Optional[str] = None


def check_vocabulary(term: str, scheme: VocabularySnapshot) -> VocabularyMatch:
    """
    Procura `term` no esquema, comparando com o token e com a URL do conceito.

    Returns:
        Exact quando coincide com diferenciação de caixa; CaseVariant com o
        valor canônico quando só difere na caixa; Unknown caso contrário.
    """
    for vocab_term in scheme.terms:
        for canonical in (vocab_term.token, vocab_term.concept_url):
            if canonical and term == canonical:
                return VocabularyMatch(MatchKind.EXACT, canonical)

    folded = term.casefold()
    for vocab_term in scheme.terms:
        for canonical in (vocab_term.token, vocab_term.concept_url):
            if canonical and folded == canonical.casefold():
                return VocabularyMatch(MatchKind.CASE_VARIANT, canonical)

    return VocabularyMatch(MatchKind.UNKNOWN)


def load_vocabulary(path: str) -> VocabularySnapshot:
    """Lê um arquivo de snapshot (JSON: scheme, source, terms[token, conceptUrl, definition])"""
    with open(path, encoding="utf-8") as f:
        data = json.load(f)

    return VocabularySnapshot(
        scheme_id=data["scheme"],
        terms=tuple(
            VocabularyTerm(
                token=item["token"],
                concept_url=item.get("conceptUrl"),
                definition=item.get("definition"),
            )
            for item in data.get("terms", [])
        ),
        source=data.get("source", ""),
    )


def load_vocabularies(directory: Optional[str] = None) -> Dict[str, VocabularySnapshot]:
    """Carrega todos os snapshots *.json de um diretório, indexados pelo scheme_id"""
    directory = directory or DEFAULT_VOCAB_DIR
    vocabularios: Dict[str, VocabularySnapshot] = {}

    for nome in sorted(os.listdir(directory)):
        if not nome.endswith(".json"):
            continue
        snapshot = load_vocabulary(os.path.join(directory, nome))
        vocabularios[snapshot.scheme_id] = snapshot
        logger.debug(f"Vocabulário carregado: {snapshot.scheme_id} ({len(snapshot.terms)} termos)")

    return vocabularios


@lru_cache(maxsize=1)
def default_vocabularies() -> Tuple[VocabularySnapshot, ...]:
    return tuple(load_vocabularies(DEFAULT_VOCAB_DIR).values())


_BUILTIN_DATE_TYPES = VocabularySnapshot(
    DATE_TYPE_SCHEME, tuple(VocabularyTerm(token) for token in DateType.ALL), "embutido"
)


# ===== VALIDAÇÃO =====

VocabularyInput = Union[Iterable[VocabularySnapshot], Mapping[str, VocabularySnapshot], None]


def validate(record: InstrumentRecord, vocabularies: VocabularyInput = None) -> ValidationReport:
    """
    Valida o registro e devolve todas as violações, ordenadas por caminho e código.

    Termos desconhecidos em campos de texto livre geram no máximo Warning.
    """
    if vocabularies is None:
        vocabularies = default_vocabularies()
    if isinstance(vocabularies, Mapping):
        vocabularies = vocabularies.values()
    esquemas = {snapshot.scheme_id: snapshot for snapshot in vocabularies}

    checker = _RecordChecker(esquemas)
    checker.check(record)

    violacoes = sorted(checker.violations, key=lambda v: (v.path, v.code.value))
    return ValidationReport(tuple(violacoes))


class _RecordChecker:
    """Acumula violações de um único registro"""

    def __init__(self, schemes: Dict[str, VocabularySnapshot]):
        self.schemes = schemes
        self.violations: List[Violation] = []

    def _add(self, code: ViolationCode, path: str, message: str,
             severity: Severity = Severity.ERROR) -> None:
        self.violations.append(Violation(code, path, message, severity))

    def check(self, record: InstrumentRecord) -> None:
        self._check_identifier(record)
        self._check_landing_page(record.landing_page)
        self._check_name(record.name)
        self._check_owners(record)
        self._check_manufacturers(record)
        self._check_terms(record.instrument_types, "instrument_types", "InstrumentType", INSTRUMENT_TYPE_SCHEME)
        self._check_terms(record.measured_variables, "measured_variables", "VariableMeasured",
                          MEASURED_VARIABLE_SCHEME)
        self._check_dates(record)
        self._check_alternate_identifiers(record)
        self._check_related_identifiers(record)
        if record.description is not None and not record.description.strip():
            self._add(ViolationCode.EMPTY_VALUE, "description", "Description vazia", Severity.WARNING)

    # --- Identificação ---

    def _check_identifier(self, record: InstrumentRecord) -> None:
        pid = record.identifier
        if pid is None:
            self._add(ViolationCode.MISSING_MANDATORY, "identifier", "Identifier é obrigatório")
        elif not pid.value:
            self._add(ViolationCode.EMPTY_VALUE, "identifier", "Identifier vazio")
        elif any(c.isspace() for c in pid.value):
            self._add(ViolationCode.BAD_IDENTIFIER_SYNTAX, "identifier",
                      f"Identifier contém espaço em branco: '{pid.value}'")
        elif pid.scheme == PidScheme.HANDLE and not is_handle(pid.value):
            self._add(ViolationCode.BAD_IDENTIFIER_SYNTAX, "identifier",
                      f"Handle deve ter a forma prefixo/sufixo: '{pid.value}'")
        elif pid.scheme == PidScheme.DOI and not is_doi(pid.value):
            self._add(ViolationCode.BAD_IDENTIFIER_SYNTAX, "identifier",
                      f"DOI deve ter a forma 10.<registrante>/<sufixo>: '{pid.value}'")

        if record.identifier_type is None:
            self._add(ViolationCode.MISSING_MANDATORY, "identifier_type", "identifierType é obrigatório")
        elif not record.identifier_type.strip():
            self._add(ViolationCode.EMPTY_VALUE, "identifier_type", "identifierType vazio")
        else:
            self._check_case_variant(record.identifier_type, IDENTIFIER_TYPE_SCHEME, "identifier_type")

    def _check_landing_page(self, landing_page: Optional[str]) -> None:
        if landing_page is None:
            self._add(ViolationCode.MISSING_MANDATORY, "landing_page", "LandingPage é obrigatória")
        elif not landing_page.strip():
            self._add(ViolationCode.EMPTY_VALUE, "landing_page", "LandingPage vazia")
        elif not is_absolute_url(landing_page):
            self._add(ViolationCode.BAD_URL, "landing_page",
                      f"LandingPage não é uma URL absoluta: '{landing_page}'")

    def _check_name(self, name: Optional[str]) -> None:
        if name is None:
            self._add(ViolationCode.MISSING_MANDATORY, "name", "Name é obrigatório")
        elif not name.strip():
            self._add(ViolationCode.EMPTY_VALUE, "name", "Name vazio")

    # --- Owners e Manufacturers ---

    def _check_owners(self, record: InstrumentRecord) -> None:
        if not record.owners:
            self._add(ViolationCode.MISSING_MANDATORY, "owners", "Pelo menos um Owner é obrigatório")
        for i, owner in enumerate(record.owners):
            path = f"owners[{i}]"
            if not owner.owner_name.strip():
                self._add(ViolationCode.EMPTY_VALUE, f"{path}.ownerName", "ownerName vazio")
            if owner.owner_contact is not None and not owner.owner_contact.strip():
                self._add(ViolationCode.EMPTY_VALUE, f"{path}.ownerContact", "ownerContact vazio",
                          Severity.WARNING)
            self._check_typed_identifier(owner.owner_identifier, f"{path}.ownerIdentifier")

    def _check_manufacturers(self, record: InstrumentRecord) -> None:
        if not record.manufacturers:
            self._add(ViolationCode.MISSING_MANDATORY, "manufacturers",
                      "Pelo menos um Manufacturer é obrigatório")
        for i, manufacturer in enumerate(record.manufacturers):
            path = f"manufacturers[{i}]"
            if not manufacturer.manufacturer_name.strip():
                self._add(ViolationCode.EMPTY_VALUE, f"{path}.manufacturerName", "manufacturerName vazio")
            if manufacturer.model_name is not None and not manufacturer.model_name.strip():
                self._add(ViolationCode.EMPTY_VALUE, f"{path}.modelName", "modelName vazio",
                          Severity.WARNING)
            self._check_typed_identifier(manufacturer.manufacturer_identifier,
                                         f"{path}.manufacturerIdentifier")

    def _check_typed_identifier(self, typed: Optional[TypedIdentifier], path: str) -> None:
        if typed is None:
            return
        if not typed.value.strip():
            self._add(ViolationCode.EMPTY_VALUE, path, "Valor do identificador vazio")
        if not typed.type.strip():
            self._add(ViolationCode.EMPTY_VALUE, f"{path}Type", "Tipo do identificador vazio")

    # --- Termos (InstrumentType, VariableMeasured) ---

    def _check_terms(self, terms: Tuple[TypedTerm, ...], field_name: str, label: str,
                     scheme_id: str) -> None:
        scheme = self.schemes.get(scheme_id)
        for i, term in enumerate(terms):
            path = f"{field_name}[{i}]"
            if not term.value.strip():
                self._add(ViolationCode.EMPTY_VALUE, path, f"{label} vazio")
                continue
            # Com esquema de conceitos configurado, texto livre só gera aviso
            if scheme is not None and scheme.has_concepts and not is_absolute_url(term.value):
                match = check_vocabulary(term.value, scheme)
                sugestao = ""
                for vocab_term in scheme.terms:
                    if match.canonical == vocab_term.token and vocab_term.concept_url:
                        sugestao = f"; use {vocab_term.concept_url}"
                self._add(ViolationCode.UNKNOWN_VOCABULARY_TERM, path,
                          f"{label} em texto livre, sem URL de conceito ({scheme_id}){sugestao}",
                          Severity.WARNING)

    # --- Datas ---

    def _check_dates(self, record: InstrumentRecord) -> None:
        scheme = self.schemes.get(DATE_TYPE_SCHEME, _BUILTIN_DATE_TYPES)
        for i, instrument_date in enumerate(record.dates):
            path = f"dates[{i}]"
            if not instrument_date.date.strip():
                self._add(ViolationCode.EMPTY_VALUE, f"{path}.date", "Date vazia")
            elif parse_iso_date(instrument_date.date) is None:
                self._add(ViolationCode.BAD_DATE, f"{path}.date",
                          f"Data inválida (esperado YYYY-MM-DD): '{instrument_date.date}'")

            if not instrument_date.date_type.strip():
                self._add(ViolationCode.EMPTY_VALUE, f"{path}.dateType", "dateType vazio")
                continue
            match = check_vocabulary(instrument_date.date_type, scheme)
            if match.kind == MatchKind.CASE_VARIANT:
                self._add(ViolationCode.UNKNOWN_VOCABULARY_TERM, f"{path}.dateType",
                          f"dateType '{instrument_date.date_type}' difere na caixa; use '{match.canonical}'",
                          Severity.WARNING)
            elif match.kind == MatchKind.UNKNOWN:
                self._add(ViolationCode.UNKNOWN_VOCABULARY_TERM, f"{path}.dateType",
                          f"dateType fora da lista controlada: '{instrument_date.date_type}' "
                          f"(aceitos: {', '.join(scheme.tokens)})")

    # --- Identificadores alternativos e relacionados ---

    def _check_alternate_identifiers(self, record: InstrumentRecord) -> None:
        vistos = set()
        for i, alt in enumerate(record.alternate_identifiers):
            path = f"alternate_identifiers[{i}]"
            if not alt.value.strip():
                self._add(ViolationCode.EMPTY_VALUE, f"{path}.value", "AlternateIdentifier vazio")
            if not alt.type.strip():
                self._add(ViolationCode.EMPTY_VALUE, f"{path}.alternateIdentifierType",
                          "alternateIdentifierType vazio")
            else:
                self._check_case_variant(alt.type, ALTERNATE_TYPE_SCHEME, f"{path}.alternateIdentifierType")

            # o tipo compara como o vocabulário: serialNumber e SerialNumber são o mesmo termo
            chave = (alt.value.strip(), alt.type.strip().casefold())
            if chave in vistos:
                self._add(ViolationCode.DUPLICATE_ALTERNATE_IDENTIFIER, path,
                          f"AlternateIdentifier repetido: ({alt.value}, {alt.type})")
            vistos.add(chave)

    def _check_related_identifiers(self, record: InstrumentRecord) -> None:
        for i, rel in enumerate(record.related_identifiers):
            path = f"related_identifiers[{i}]"
            if not rel.value.strip():
                self._add(ViolationCode.EMPTY_VALUE, f"{path}.value", "RelatedIdentifier vazio")
            if not rel.identifier_type.strip():
                self._add(ViolationCode.EMPTY_VALUE, f"{path}.relatedIdentifierType",
                          "relatedIdentifierType vazio")
            elif rel.identifier_type.strip().upper() == "DOI" and rel.value.strip():
                _, nu = strip_resolver_prefix(rel.value)
                if not is_doi(nu):
                    self._add(ViolationCode.BAD_IDENTIFIER_SYNTAX, f"{path}.value",
                              f"Valor não tem sintaxe de DOI: '{rel.value}'", Severity.WARNING)

            if not rel.relation_type.strip():
                self._add(ViolationCode.EMPTY_VALUE, f"{path}.relationType", "relationType vazio")
                continue
            scheme = self.schemes.get(RELATION_TYPE_SCHEME)
            if scheme is None:
                continue
            match = check_vocabulary(rel.relation_type, scheme)
            if match.kind == MatchKind.CASE_VARIANT:
                self._add(ViolationCode.UNKNOWN_VOCABULARY_TERM, f"{path}.relationType",
                          f"relationType '{rel.relation_type}' difere na caixa; use '{match.canonical}'",
                          Severity.WARNING)
            elif match.kind == MatchKind.UNKNOWN:
                self._add(ViolationCode.UNKNOWN_VOCABULARY_TERM, f"{path}.relationType",
                          f"relationType não reconhecido: '{rel.relation_type}'", Severity.WARNING)

    def _check_case_variant(self, value: str, scheme_id: str, path: str) -> None:
        """Texto livre: só avisa quando o valor é variante de caixa de um token recomendado"""
        scheme = self.schemes.get(scheme_id)
        if scheme is None:
            return
        match = check_vocabulary(value, scheme)
        if match.kind == MatchKind.CASE_VARIANT:
            self._add(ViolationCode.UNKNOWN_VOCABULARY_TERM, path,
                      f"'{value}' difere na caixa do token recomendado '{match.canonical}'",
                      Severity.WARNING)
