"""
Configuração do registry PIDINST.

Os valores vêm de um único arquivo dotenv (pidinst.env por padrão) e podem ser
sobrescritos por variáveis de ambiente com o mesmo nome (prefixo PIDINST_).
"""

import os
from dataclasses import dataclass
from enum import Enum
from typing import Mapping, Optional

from dotenv import dotenv_values

ENV_PREFIX = 'PIDINST_'
CONFIG_FILE = os.getenv('PIDINST_CONFIG', 'pidinst.env')
CACHE_DIR_PATH = os.getenv('PIDINST_CACHE_DIR', os.path.join(os.getcwd(), 'cache'))


class SuffixPolicy(Enum):
    SEQUENTIAL = 'Sequential'
    RANDOM_HEX = 'RandomHex'


@dataclass(frozen=True)
class RegistryConfig:
    prefix: str = '21.T11998'
    suffix_policy: SuffixPolicy = SuffixPolicy.SEQUENTIAL
    store_path: str = './store'
    base_resolver_url: str = 'http://hdl.handle.net/'
    bind: str = '0.0.0.0:5005'
    api_token: Optional[str] = None
    cache_type: str = 'FileSystemCache'
    cache_dir: str = CACHE_DIR_PATH
    include_info_types: bool = False

    def __post_init__(self):
        if not self.prefix or '/' in self.prefix:
            raise ValueError(f"Prefixo inválido (vazio ou contém '/'): '{self.prefix}'")
        if not self.base_resolver_url.endswith('/'):
            raise ValueError(f"base_resolver_url deve terminar com '/': '{self.base_resolver_url}'")


def _bool(texto: str) -> bool:
    return texto.strip().lower() in ('1', 'true', 'yes', 'sim', 'on')


def load_registry_config(path: Optional[str] = None,
                         environ: Optional[Mapping[str, str]] = None) -> RegistryConfig:
    """
    Lê a configuração do arquivo dotenv e aplica as variáveis de ambiente PIDINST_*.

    Raises:
        ValueError: prefixo inválido ou política de sufixo desconhecida
    """
    path = path or CONFIG_FILE
    environ = os.environ if environ is None else environ

    valores = {}
    if os.path.exists(path):
        valores.update({k: v for k, v in dotenv_values(path).items() if v is not None})
    valores.update({k: v for k, v in environ.items() if k.startswith(ENV_PREFIX)})

    def valor(nome: str, padrao):
        return valores.get(f'{ENV_PREFIX}{nome}', padrao)

    politica = valor('SUFFIX_POLICY', SuffixPolicy.SEQUENTIAL.value)
    try:
        suffix_policy = SuffixPolicy(politica)
    except ValueError:
        raise ValueError(f"Política de sufixo desconhecida: '{politica}'")

    defaults = RegistryConfig()
    return RegistryConfig(
        prefix=valor('PREFIX', defaults.prefix).strip(),
        suffix_policy=suffix_policy,
        store_path=valor('STORE_PATH', defaults.store_path),
        base_resolver_url=valor('BASE_RESOLVER_URL', defaults.base_resolver_url),
        bind=valor('BIND', defaults.bind),
        api_token=valor('API_TOKEN', None) or None,
        cache_type=valor('CACHE_TYPE', defaults.cache_type),
        cache_dir=valor('CACHE_DIR', defaults.cache_dir),
        include_info_types=_bool(valor('INCLUDE_INFO_TYPES', 'false')),
    )
