from flask import Blueprint, Response, request
import logging

from app.exceptions import PidGone
from app.routes.route_helpers import (
    error_response,
    get_registry,
    pid_from_path,
    require_token,
)
from app.services.registry_service import DEFAULT_PAGE_SIZE
from app.services.schema_model import (
    MEDIA_TYPE,
    SERIAL_NUMBER,
    canonicalize,
    parse_record,
    record_to_dict,
)
from app.utils.cache_utils import cached_render
from app.utils.json_encoder import json_response

logger = logging.getLogger(__name__)

# Criar blueprint
instrument_bp = Blueprint('instrument', __name__, url_prefix='/api/v1/instruments')


def _etag(version: int) -> str:
    return f'"{version}"'


def _parse_if_match(valor: str) -> int:
    texto = valor.strip()
    if texto.startswith('W/'):
        texto = texto[2:]
    return int(texto.strip('"'))


@instrument_bp.route('', methods=['POST'])
@require_token
def registrar():
    """API para registrar um instrumento e obter um novo PID"""
    try:
        record = parse_record(request.get_data(as_text=True))
        pid = get_registry().mint(record)
    except Exception as e:
        logger.error(f"Erro na API de registro: {e}")
        return error_response(e)

    return json_response({'success': True, 'pid': pid.value}, 201, headers={'Location': f'/{pid.value}'})


@instrument_bp.route('', methods=['GET'])
def listar():
    """Listagem paginada por cursor; com ?serialNumber=... busca pelo número de série"""
    registry = get_registry()
    try:
        serial = request.args.get('serialNumber')
        if serial is not None:
            pids = registry.find_by_alternate_identifier(serial, SERIAL_NUMBER)
            return json_response({'success': True, 'items': [p.value for p in pids]})

        limite = int(request.args.get('limit', DEFAULT_PAGE_SIZE))
        pagina, proximo = registry.list_pids(request.args.get('cursor'), limite)
        return json_response({'success': True, 'items': pagina, 'next_cursor': proximo})
    except ValueError:
        return json_response({'success': False, 'error': 'Parâmetro limit inválido'}, 400)
    except Exception as e:
        logger.error(f"Erro na API de listagem: {e}")
        return error_response(e)


@instrument_bp.route('/<prefix>/<suffix>', methods=['GET'])
def consultar(prefix, suffix):
    """Registro canônico atual ou de uma versão (?version=n)"""
    pid = pid_from_path(prefix, suffix)
    try:
        versao = request.args.get('version')
        record, numero = get_registry().get_record(pid, int(versao) if versao is not None else None)
    except ValueError:
        return json_response({'success': False, 'error': 'Parâmetro version inválido'}, 400)
    except PidGone as e:
        return error_response(e, state='Tombstoned', record=record_to_dict(e.entry.current))
    except Exception as e:
        logger.error(f"Erro ao consultar {pid.value}: {e}")
        return error_response(e)

    corpo = cached_render(pid.value, numero, 'canonical', lambda: canonicalize(record))
    return Response(corpo, mimetype=MEDIA_TYPE, status=200, headers={'ETag': _etag(numero)})


@instrument_bp.route('/<prefix>/<suffix>', methods=['PUT'])
@require_token
def atualizar(prefix, suffix):
    """Nova versão do registro; exige If-Match com a versão atual"""
    pid = pid_from_path(prefix, suffix)
    if_match = request.headers.get('If-Match')
    if not if_match:
        return json_response({'success': False, 'error': 'Cabeçalho If-Match é obrigatório'}, 428)
    try:
        esperada = _parse_if_match(if_match)
    except ValueError:
        return json_response({'success': False, 'error': f'If-Match inválido: {if_match}'}, 400)

    try:
        record = parse_record(request.get_data(as_text=True))
        nova_versao = get_registry().update(pid, record, esperada)
    except Exception as e:
        logger.error(f"Erro ao atualizar {pid.value}: {e}")
        return error_response(e)

    return json_response({'success': True, 'pid': pid.value, 'version': nova_versao},
                         headers={'ETag': _etag(nova_versao)})


@instrument_bp.route('/<prefix>/<suffix>', methods=['DELETE'])
@require_token
def remover(prefix, suffix):
    """Tombstone do PID (o registro nunca é apagado)"""
    pid = pid_from_path(prefix, suffix)
    try:
        get_registry().tombstone(pid)
    except Exception as e:
        logger.error(f"Erro no tombstone de {pid.value}: {e}")
        return error_response(e)
    return Response(status=204)
