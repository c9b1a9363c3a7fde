from flask import Blueprint, Response, redirect, request
import logging

from app.exceptions import PidGone
from app.services.handle_crosswalk import handle_record_to_dict, render_handle_record
from app.services.registry_service import ResolutionMode
from app.routes.route_helpers import error_response, get_registry, pid_from_path
from app.utils.cache_utils import cached_render

logger = logging.getLogger(__name__)

# Criar blueprint
resolver_bp = Blueprint('resolver', __name__)


@resolver_bp.route('/<prefix>/<suffix>', methods=['GET'])
def resolver(prefix, suffix):
    """Resolve o PID: 302 para a landing page ou, com ?noredirect, o registro Handle"""
    pid = pid_from_path(prefix, suffix)
    registry = get_registry()
    modo = ResolutionMode.NO_REDIRECT if 'noredirect' in request.args else ResolutionMode.REDIRECT

    try:
        resolucao = registry.resolve(pid, modo)
    except PidGone as e:
        ultimo = registry.handle_record(e.entry.current)
        return error_response(e, state='Tombstoned', handle=handle_record_to_dict(ultimo))
    except Exception as e:
        logger.error(f"Erro ao resolver {pid.value}: {e}")
        return error_response(e)

    if modo == ResolutionMode.REDIRECT:
        return redirect(resolucao.location, code=302)

    corpo = cached_render(
        pid.value, resolucao.version, 'handle',
        lambda: render_handle_record(resolucao.handle_record),
    )
    return Response(corpo, mimetype='application/json', status=200)
