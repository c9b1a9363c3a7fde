"""
Funções compartilhadas pelos blueprints do registry
"""

import logging
from functools import wraps
from typing import Optional

from flask import current_app, request

from app.exceptions import (
    AlreadyTombstoned,
    IdentifierMismatch,
    PidGone,
    PidNotFound,
    PidinstError,
    RecordSyntaxError,
    StoreUnavailable,
    TypeMismatch,
    UnknownProperty,
    ValidationFailed,
    VersionConflict,
)
from app.services.registry_service import RegistryService
from app.services.schema_model import Pid
from app.utils.json_encoder import json_response

logger = logging.getLogger(__name__)

REGISTRY_EXTENSION = 'pidinst_registry'

_STATUS_POR_ERRO = (
    ((RecordSyntaxError, UnknownProperty, TypeMismatch), 400),
    ((PidNotFound,), 404),
    ((VersionConflict, AlreadyTombstoned), 409),
    ((PidGone,), 410),
    ((IdentifierMismatch,), 412),
    ((ValidationFailed,), 422),
    ((StoreUnavailable,), 503),
)


def get_registry() -> RegistryService:
    return current_app.extensions[REGISTRY_EXTENSION]


def pid_from_path(prefix: str, suffix: str) -> Pid:
    return Pid.from_text(f"{prefix}/{suffix}")


def status_for(error: Exception) -> int:
    for classes, status in _STATUS_POR_ERRO:
        if isinstance(error, classes):
            return status
    return 500


def error_response(error: Exception, **extra):
    """Resposta JSON padrão de erro; o relatório de validação segue junto quando houver"""
    status = status_for(error)
    if status == 500 and not isinstance(error, PidinstError):
        logger.error(f"Erro inesperado: {error}", exc_info=True)
    corpo = {'success': False, 'error': str(error)}
    if isinstance(error, ValidationFailed):
        corpo['report'] = error.report.to_dict()
    corpo.update(extra)
    return json_response(corpo, status)


def _bearer_token() -> Optional[str]:
    header = request.headers.get('Authorization', '')
    if header.startswith('Bearer '):
        return header[len('Bearer '):].strip()
    return None


def require_token(view):
    """Exige o token estático nas operações de escrita, quando configurado"""

    @wraps(view)
    def wrapper(*args, **kwargs):
        esperado = get_registry().config.api_token
        if esperado and _bearer_token() != esperado:
            return json_response({'success': False, 'error': 'Token de API ausente ou inválido'}, 401)
        return view(*args, **kwargs)

    return wrapper
