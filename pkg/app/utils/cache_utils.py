import hashlib
import os
from typing import Callable

from flask import current_app
from flask_caching import Cache

cache = Cache()


def version_key(pid: str, version: int, kind: str) -> str:
    """Chave de uma renderização de versão: <pid>:v<versão>:<tipo>"""
    return f"{pid}:v{version}:{kind}"


def cached_render(pid: str, version: int, kind: str, render: Callable[[], str]) -> str:
    """
    Renderização de uma versão do histórico, via cache.

    Versões gravadas nunca mudam, então a entrada não precisa de invalidação.
    O estado do PID (ativo/tombstone) não passa por aqui.
    """
    key = version_key(pid, version, kind)
    try:
        texto = cache.get(key)
    except Exception as e:
        current_app.logger.error(f"Erro ao recuperar dados do cache: {e}")
        texto = None

    if texto is None:
        texto = render()
        try:
            cache.set(key, texto)
            current_app.logger.debug(f"Renderização armazenada - Key: {key}")
        except Exception as e:
            current_app.logger.error(f"Erro ao armazenar dados no cache: {e}")
    return texto


def render_fingerprint(config, store_id: str) -> str:
    """
    Resumo de tudo que muda o corpo renderizado de uma versão: o store
    (caminho e store_id, que muda se o store for recriado no mesmo caminho)
    e as opções de renderização do registro Handle.
    """
    partes = [
        os.path.abspath(config.store_path),
        store_id,
        config.base_resolver_url,
        str(config.include_info_types),
    ]
    return hashlib.sha256('\x1f'.join(partes).encode('utf-8')).hexdigest()[:16]


def configure_cache(app, config, store_id: str):
    """
    Configura o Flask-Caching a partir da RegistryConfig.

    O prefixo das chaves carrega o render_fingerprint: outro store, um store
    recriado ou outra configuração de renderização nunca reaproveitam
    entradas antigas do mesmo diretório de cache.
    """
    cache_config = {
        "CACHE_TYPE": config.cache_type,
        "CACHE_DEFAULT_TIMEOUT": 0,
        "CACHE_THRESHOLD": 1000,
        "CACHE_KEY_PREFIX": f"pidinst_{render_fingerprint(config, store_id)}:",
    }

    if config.cache_type == "FileSystemCache":
        cache_dir = os.path.abspath(config.cache_dir)
        os.makedirs(cache_dir, exist_ok=True)
        cache_config["CACHE_DIR"] = cache_dir
        app.config['CACHE_DIR'] = cache_dir

    cache.init_app(app, config=cache_config)
    app.logger.info(f"Cache configurado: {config.cache_type}")
