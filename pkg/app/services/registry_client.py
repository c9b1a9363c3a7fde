"""
Cliente HTTP da API do registry (usado pela CLI)
"""

import logging
from typing import Optional

import requests

from app.exceptions import RegistryClientError
from app.services.schema_model import MEDIA_TYPE

logger = logging.getLogger(__name__)

DEFAULT_TIMEOUT = 30


class RegistryClient:
    """Operações do registry via HTTP; erros HTTP viram RegistryClientError"""

    def __init__(self, base_url: str, session=None, token: Optional[str] = None,
                 timeout: float = DEFAULT_TIMEOUT):
        self.base_url = base_url.rstrip('/')
        self.session = session or requests.Session()
        self.token = token
        self.timeout = timeout

    def _headers(self, extra: Optional[dict] = None) -> dict:
        headers = {'Content-Type': MEDIA_TYPE}
        if self.token:
            headers['Authorization'] = f'Bearer {self.token}'
        headers.update(extra or {})
        return headers

    def _request(self, method: str, path: str, data: Optional[str] = None,
                 headers: Optional[dict] = None, allow_redirects: bool = True):
        url = f"{self.base_url}{path}"
        logger.info(f"{method} {url}")
        resposta = self.session.request(
            method, url, data=data.encode('utf-8') if data is not None else None,
            headers=self._headers(headers), allow_redirects=allow_redirects, timeout=self.timeout,
        )
        if resposta.status_code >= 400:
            raise RegistryClientError(resposta.status_code, self._error_message(resposta))
        return resposta

    @staticmethod
    def _error_message(resposta) -> str:
        try:
            return resposta.json().get('error', resposta.text)
        except ValueError:
            return resposta.text

    def mint(self, record_text: str) -> str:
        return self._request('POST', '/api/v1/instruments', data=record_text).json()['pid']

    def resolve(self, pid: str, noredirect: bool = False) -> str:
        """Landing page (Location do 302) ou, com noredirect, o registro Handle em JSON"""
        if noredirect:
            return self._request('GET', f'/{pid}?noredirect').text
        resposta = self._request('GET', f'/{pid}', allow_redirects=False)
        if resposta.status_code != 302:
            raise RegistryClientError(resposta.status_code, 'Resposta sem redirecionamento')
        return resposta.headers['Location']

    def get(self, pid: str, version: Optional[int] = None) -> str:
        sufixo = f'?version={version}' if version is not None else ''
        return self._request('GET', f'/api/v1/instruments/{pid}{sufixo}').text

    def update(self, pid: str, record_text: str, if_match: int) -> int:
        resposta = self._request('PUT', f'/api/v1/instruments/{pid}', data=record_text,
                                 headers={'If-Match': f'"{if_match}"'})
        return resposta.json()['version']

    def tombstone(self, pid: str) -> None:
        self._request('DELETE', f'/api/v1/instruments/{pid}')
