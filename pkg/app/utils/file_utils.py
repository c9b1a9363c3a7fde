import json
import os
import tempfile
from contextlib import suppress
from typing import Any


def atomic_write_text(path: str, text: str) -> None:
    """
    Grava em arquivo temporário no mesmo diretório e troca com os.replace;
    quem lê vê o conteúdo antigo ou o novo, nunca um arquivo truncado.
    """
    diretorio = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(prefix=f".{os.path.basename(path)}.", suffix=".tmp", dir=diretorio)
    try:
        with os.fdopen(fd, 'w', encoding='utf-8', newline='\n') as f:
            f.write(text)
            f.flush()
            os.fsync(f.fileno())
        # mkstemp cria com 0600; o arquivo substituído mantém a permissão original
        with suppress(FileNotFoundError):
            os.chmod(tmp, os.stat(path).st_mode & 0o7777)
        os.replace(tmp, path)
    except BaseException:
        with suppress(FileNotFoundError):
            os.remove(tmp)
        raise


def atomic_write_json(path: str, obj: Any) -> None:
    atomic_write_text(path, json.dumps(obj, indent=2, ensure_ascii=False) + '\n')
