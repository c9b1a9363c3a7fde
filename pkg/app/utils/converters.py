"""
Conversores de identificadores, URLs e datas usados pelos serviços PIDINST
"""

import re
import logging
from datetime import date, datetime, timedelta, timezone
from typing import Optional, Tuple
from urllib.parse import urlparse

from dateutil import parser as date_parser

logger = logging.getLogger(__name__)

# Prefixos de resolvers reconhecidos -> esquema implícito
RESOLVER_PREFIXES = [
    (re.compile(r'^https?://hdl\.handle\.net/', re.IGNORECASE), 'Handle'),
    (re.compile(r'^https?://(dx\.)?doi\.org/', re.IGNORECASE), 'DOI'),
    (re.compile(r'^doi:', re.IGNORECASE), 'DOI'),
    (re.compile(r'^https?://orcid\.org/', re.IGNORECASE), 'ORCID'),
    (re.compile(r'^https?://ror\.org/', re.IGNORECASE), 'ROR'),
]

DOI_PATTERN = re.compile(r'^10\.[^/\s]+/\S+$')
HANDLE_PATTERN = re.compile(r'^[^/\s]+/[^/\s]+$')
ORCID_PATTERN = re.compile(r'^\d{4}-\d{4}-\d{4}-\d{3}[\dX]$')
ROR_PATTERN = re.compile(r'^0[a-z0-9]{6}\d{2}$')
ISO_DATE_PATTERN = re.compile(r'^\d{4}-\d{2}-\d{2}$')


def strip_resolver_prefix(value: str) -> Tuple[Optional[str], str]:
    """
    Remove o prefixo de resolver de um identificador.

    Returns:
        (esquema implícito pelo resolver ou None, valor sem prefixo)
    """
    texto = value.strip()
    for padrao, esquema in RESOLVER_PREFIXES:
        if padrao.match(texto):
            return esquema, padrao.sub('', texto, count=1)
    return None, texto


def is_absolute_url(text: Optional[str]) -> bool:
    """URL absoluta: esquema + host, sem espaços"""
    if not text or any(c.isspace() for c in text):
        return False
    try:
        partes = urlparse(text)
    except ValueError:
        return False
    return bool(partes.scheme) and bool(partes.netloc)


def is_doi(value: str) -> bool:
    return bool(DOI_PATTERN.match(value))


def is_handle(value: str) -> bool:
    return bool(HANDLE_PATTERN.match(value))


def parse_iso_date(text: Optional[str]) -> Optional[date]:
    """
    Converte 'YYYY-MM-DD' em date. Retorna None para texto fora do formato
    ou data impossível (ex.: mês 13).
    """
    if not text or not ISO_DATE_PATTERN.match(text):
        return None
    try:
        return date.fromisoformat(text)
    except ValueError:
        return None


def parse_timestamp(text: str) -> datetime:
    """Timestamp ISO-8601 armazenado no store -> datetime UTC"""
    dt = date_parser.isoparse(text)
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt.astimezone(timezone.utc)


def format_timestamp(dt: datetime) -> str:
    return dt.astimezone(timezone.utc).isoformat()


def next_timestamp(previous: Optional[datetime] = None) -> datetime:
    """
    Agora em UTC, sempre estritamente maior que `previous`.
    """
    agora = datetime.now(timezone.utc)
    if previous is not None and agora <= previous:
        agora = previous + timedelta(microseconds=1)
    return agora
