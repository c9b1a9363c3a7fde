"""
JSON Encoder customizado para os tipos de domínio do PIDINST
"""

import dataclasses
import json
from datetime import date, datetime
from enum import Enum

from app.services.schema_model import Pid


class PidinstJSONEncoder(json.JSONEncoder):
    """Encoder JSON para Enum, datas, Pid e dataclasses"""

    def default(self, obj):
        if isinstance(obj, Enum):
            return obj.value
        elif isinstance(obj, (datetime, date)):
            return obj.isoformat()
        elif isinstance(obj, Pid):
            return obj.value
        elif dataclasses.is_dataclass(obj) and not isinstance(obj, type):
            return {f.name: getattr(obj, f.name) for f in dataclasses.fields(obj)}

        return super().default(obj)


def dumps(data, indent=None) -> str:
    return json.dumps(data, cls=PidinstJSONEncoder, ensure_ascii=False, indent=indent)


def json_response(data, status_code=200, headers=None):
    """Helper para retornar resposta JSON com encoder customizado"""
    from flask import Response

    return Response(dumps(data), mimetype='application/json', status=status_code, headers=headers)
