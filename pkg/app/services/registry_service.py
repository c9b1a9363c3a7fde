"""
Serviço do registry de PIDs de instrumentos: mint, resolução, atualização
versionada e tombstone.

Cada PID tem um documento no store com o histórico completo de versões.
Mutações de um mesmo PID são serializadas por lock; o mint serializa apenas
a alocação do sufixo.
"""

import logging
import secrets
from dataclasses import dataclass, replace
from datetime import datetime
from enum import Enum
from typing import Any, Dict, Iterable, List, Optional, Tuple

import requests

from app.config import RegistryConfig, SuffixPolicy
from app.exceptions import (
    AlreadyTombstoned,
    IdentifierMismatch,
    PidGone,
    PidNotFound,
    ValidationFailed,
    VersionConflict,
)
from app.repositories.instrument_repository import InstrumentRepository
from app.services.handle_crosswalk import HandleRecord, TypeHandleMap, to_handle_record
from app.services.schema_model import (
    IdentifierType,
    InstrumentRecord,
    Pid,
    SERIAL_NUMBER,
    record_from_dict,
    record_to_dict,
)
from app.services.validator import ValidationReport, VocabularySnapshot, validate
from app.utils.converters import format_timestamp, next_timestamp, parse_timestamp

logger = logging.getLogger(__name__)

DEFAULT_PAGE_SIZE = 50
MAX_PAGE_SIZE = 500


class EntryState(Enum):
    ACTIVE = 'Active'
    TOMBSTONED = 'Tombstoned'


class ResolutionMode(Enum):
    REDIRECT = 'Redirect'
    NO_REDIRECT = 'NoRedirect'


@dataclass(frozen=True)
class HistoryItem:
    version: int
    timestamp: datetime
    record: InstrumentRecord


@dataclass(frozen=True)
class RegistryEntry:
    pid: Pid
    current: InstrumentRecord
    version: int
    history: Tuple[HistoryItem, ...]
    state: EntryState
    created_at: datetime
    updated_at: datetime

    def record_at(self, version: int) -> Optional[InstrumentRecord]:
        if 1 <= version <= len(self.history):
            return self.history[version - 1].record
        return None


@dataclass(frozen=True)
class Resolution:
    pid: Pid
    mode: ResolutionMode
    version: int
    location: Optional[str] = None
    handle_record: Optional[HandleRecord] = None


@dataclass(frozen=True)
class LandingPageStatus:
    identifier: str
    url: Optional[str]
    status: Optional[int] = None
    error: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.status is not None and self.status < 400


class RegistryService:
    """Regras do registry sobre o InstrumentRepository"""

    def __init__(self, config: RegistryConfig, repository: Optional[InstrumentRepository] = None,
                 vocabularies: Optional[Iterable[VocabularySnapshot]] = None,
                 types: Optional[TypeHandleMap] = None):
        self.config = config
        self.repository = repository or InstrumentRepository(config.store_path)
        self.vocabularies = tuple(vocabularies) if vocabularies is not None else None
        self.types = types or TypeHandleMap.default()

    # ===== Conversões documento <-> entrada =====

    def _entry_from_doc(self, doc: Dict[str, Any]) -> RegistryEntry:
        history = tuple(
            HistoryItem(item['version'], parse_timestamp(item['timestamp']), record_from_dict(item['record']))
            for item in doc['history']
        )
        return RegistryEntry(
            pid=Pid.from_text(doc['pid']),
            current=history[-1].record,
            version=doc['version'],
            history=history,
            state=EntryState(doc['state']),
            created_at=parse_timestamp(doc['created_at']),
            updated_at=parse_timestamp(doc['updated_at']),
        )

    def _validate(self, record: InstrumentRecord) -> ValidationReport:
        report = validate(record, self.vocabularies)
        if not report.is_valid:
            raise ValidationFailed(report)
        return report

    def _load(self, pid: Pid) -> Dict[str, Any]:
        doc = self.repository.buscar(pid.value)
        if doc is None:
            raise PidNotFound(pid.value)
        return doc

    # ===== Mint =====

    def mint(self, record: InstrumentRecord) -> Pid:
        """
        Atribui um novo PID ao registro e grava a versão 1.

        Raises:
            ValidationFailed: registro com erros (o identificador é ignorado na validação)
            StoreUnavailable: falha de E/S no store
        """
        if record.identifier is not None:
            logger.warning(f"Identifier informado no mint será substituído: {record.identifier.value}")

        identifier_type = record.identifier_type or IdentifierType.MEASURING_INSTRUMENT
        if identifier_type.strip().upper() == IdentifierType.DOI:
            # O PID emitido é sempre um handle do prefixo configurado
            identifier_type = IdentifierType.MEASURING_INSTRUMENT
        provisorio = replace(
            record,
            identifier=Pid.from_text(f"{self.config.prefix}/0000-0000-0000"),
            identifier_type=identifier_type,
        )
        self._validate(provisorio)

        with self.repository.bloquear_alocacao():
            contador = None
            if self.config.suffix_policy == SuffixPolicy.SEQUENTIAL:
                contador = self.repository.ler_contador() + 1
                pid = Pid.from_text(f"{self.config.prefix}/{format_sequential_suffix(contador)}")
            else:
                pid = Pid.from_text(f"{self.config.prefix}/{random_hex_suffix()}")
                while self.repository.existe(pid.value):
                    pid = Pid.from_text(f"{self.config.prefix}/{random_hex_suffix()}")

            agora = next_timestamp()
            final = replace(record, identifier=pid, identifier_type=identifier_type)
            doc = {
                'pid': pid.value,
                'version': 1,
                'state': EntryState.ACTIVE.value,
                'created_at': format_timestamp(agora),
                'updated_at': format_timestamp(agora),
                'history': [{'version': 1, 'timestamp': format_timestamp(agora), 'record': record_to_dict(final)}],
            }
            self.repository.registrar_intencao(doc, contador)
            if contador is not None:
                self.repository.gravar_contador(contador)

        with self.repository.bloquear(pid.value):
            self.repository.salvar(doc)
            self.repository.concluir_intencao(pid.value)

        logger.info(f"PID registrado: {pid.value}")
        return pid

    # ===== Leitura =====

    def get(self, pid: Pid) -> RegistryEntry:
        """Entrada completa, inclusive tombstoned (quem chama decide o que fazer com o estado)"""
        return self._entry_from_doc(self._load(pid))

    def get_record(self, pid: Pid, version: Optional[int] = None) -> Tuple[InstrumentRecord, int]:
        """
        Registro atual ou de uma versão do histórico.

        Raises:
            PidNotFound: PID ou versão inexistente
            PidGone: PID em tombstone (a entrada segue anexada)
        """
        entry = self.get(pid)
        if entry.state == EntryState.TOMBSTONED:
            raise PidGone(pid.value, entry)
        if version is None:
            return entry.current, entry.version
        record = entry.record_at(version)
        if record is None:
            raise PidNotFound(f"{pid.value} (versão {version})")
        return record, version

    def resolve(self, pid: Pid, mode: ResolutionMode = ResolutionMode.REDIRECT) -> Resolution:
        """
        Raises:
            PidNotFound: PID desconhecido
            PidGone: PID em tombstone; a exceção carrega a última entrada
        """
        entry = self.get(pid)
        if entry.state == EntryState.TOMBSTONED:
            raise PidGone(pid.value, entry)
        if mode == ResolutionMode.REDIRECT:
            return Resolution(entry.pid, mode, entry.version, location=entry.current.landing_page)
        return Resolution(entry.pid, mode, entry.version, handle_record=self.handle_record(entry.current))

    def handle_record(self, record: InstrumentRecord) -> HandleRecord:
        return to_handle_record(record, self.types, include_info_types=self.config.include_info_types,
                                resolver=self.config.base_resolver_url)

    # ===== Atualização e tombstone =====

    def update(self, pid: Pid, record: InstrumentRecord, expected_version: int) -> int:
        """
        Grava uma nova versão se expected_version for a versão atual.

        Raises:
            PidNotFound, PidGone, VersionConflict, IdentifierMismatch, ValidationFailed
        """
        with self.repository.bloquear(pid.value):
            doc = self._load(pid)
            if doc['state'] == EntryState.TOMBSTONED.value:
                raise PidGone(pid.value, self._entry_from_doc(doc))
            if expected_version != doc['version']:
                raise VersionConflict(expected_version, doc['version'])

            if record.identifier is None:
                record = replace(record, identifier=Pid.from_text(pid.value, record.identifier_type))
            elif record.identifier.value != pid.value:
                raise IdentifierMismatch(pid.value, record.identifier.value)
            self._validate(record)

            ultimo = parse_timestamp(doc['history'][-1]['timestamp'])
            agora = next_timestamp(max(ultimo, parse_timestamp(doc['updated_at'])))
            nova_versao = doc['version'] + 1
            doc['history'].append({
                'version': nova_versao,
                'timestamp': format_timestamp(agora),
                'record': record_to_dict(record),
            })
            doc['version'] = nova_versao
            doc['updated_at'] = format_timestamp(agora)
            self.repository.salvar(doc)

        logger.info(f"PID {pid.value} atualizado para a versão {nova_versao}")
        return nova_versao

    def tombstone(self, pid: Pid) -> None:
        """
        Raises:
            PidNotFound: PID desconhecido
            AlreadyTombstoned: PID já em tombstone
        """
        with self.repository.bloquear(pid.value):
            doc = self._load(pid)
            if doc['state'] == EntryState.TOMBSTONED.value:
                raise AlreadyTombstoned(pid.value)
            doc['state'] = EntryState.TOMBSTONED.value
            doc['updated_at'] = format_timestamp(next_timestamp(parse_timestamp(doc['updated_at'])))
            self.repository.salvar(doc)
        logger.info(f"PID {pid.value} em tombstone")

    # ===== Listagem e busca =====

    def list_pids(self, cursor: Optional[str] = None,
                  limit: int = DEFAULT_PAGE_SIZE) -> Tuple[List[str], Optional[str]]:
        """
        Página de PIDs em ordem lexicográfica, a partir do PID seguinte a `cursor`.

        Returns:
            (PIDs da página, cursor da próxima página ou None)
        """
        limit = max(1, min(limit, MAX_PAGE_SIZE))
        pids = self.repository.listar_pids()
        if cursor:
            pids = [p for p in pids if p > cursor]
        pagina = pids[:limit]
        proximo = pagina[-1] if len(pids) > limit else None
        return pagina, proximo

    def find_by_alternate_identifier(self, value: str, type_: str = SERIAL_NUMBER) -> List[Pid]:
        """PIDs ativos com AlternateIdentifier igual a `value` (tipo comparado sem diferenciar caixa)"""
        alvo = type_.strip().casefold()
        encontrados = []
        for doc in self.repository.listar_documentos():
            if doc['state'] != EntryState.ACTIVE.value:
                continue
            atual = record_from_dict(doc['history'][-1]['record'])
            if any(alt.value == value and alt.type.strip().casefold() == alvo
                   for alt in atual.alternate_identifiers):
                encontrados.append(Pid.from_text(doc['pid']))
        return sorted(encontrados, key=lambda p: p.value)


def format_sequential_suffix(n: int) -> str:
    """Contador em 12 dígitos hexadecimais, em grupos de 4: 0000-0000-001A"""
    texto = f"{n:012X}"
    return "-".join(texto[i:i + 4] for i in range(0, 12, 4))


def random_hex_suffix() -> str:
    return "-".join(secrets.token_hex(2).upper() for _ in range(4))


def check_landing_pages(records: Iterable[InstrumentRecord], session: Optional[requests.Session] = None,
                        timeout: float = 10.0) -> List[LandingPageStatus]:
    """
    Status HTTP da landing page de cada registro. Apenas relata; nada é alterado.
    """
    session = session or requests.Session()
    resultado = []
    for record in records:
        identificador = record.identifier.value if record.identifier else ""
        url = record.landing_page
        if not url:
            resultado.append(LandingPageStatus(identificador, url, error="LandingPage ausente"))
            continue
        try:
            resposta = session.head(url, allow_redirects=True, timeout=timeout)
            if resposta.status_code == 405:
                resposta = session.get(url, allow_redirects=True, timeout=timeout)
            resultado.append(LandingPageStatus(identificador, url, status=resposta.status_code))
        except requests.RequestException as e:
            logger.warning(f"Landing page inacessível ({url}): {e}")
            resultado.append(LandingPageStatus(identificador, url, error=str(e)))
    return resultado
