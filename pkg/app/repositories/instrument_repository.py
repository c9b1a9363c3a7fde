"""
Repository de registros de instrumentos em arquivos JSON.

Layout do store:
    records/<h[:2]>/<h[2:4]>/<h>.json   um arquivo por PID (h = md5 do PID)
    intents/<h>.json                   intenção de mint ainda não concluída
    locks/<h>.lock                     lock entre processos por PID
    counter                            último valor da política Sequential
    store_id                           identificador desta instância do store
"""

import hashlib
import json
import logging
import os
import threading
import uuid
import weakref
from contextlib import contextmanager, suppress
from typing import Any, Dict, Iterator, List, Optional

from filelock import FileLock, Timeout

from app.exceptions import StoreUnavailable
from app.utils.file_utils import atomic_write_json, atomic_write_text

logger = logging.getLogger(__name__)

LOCK_TIMEOUT = 30


def _hash(pid: str) -> str:
    return hashlib.md5(pid.encode('utf-8')).hexdigest()


class InstrumentRepository:
    """Repository para os documentos de registro (um arquivo por PID)"""

    def __init__(self, store_path: str):
        self.store_path = os.path.abspath(store_path)
        self.records_dir = os.path.join(self.store_path, 'records')
        self.intents_dir = os.path.join(self.store_path, 'intents')
        self.locks_dir = os.path.join(self.store_path, 'locks')
        self.counter_path = os.path.join(self.store_path, 'counter')
        self.store_id_path = os.path.join(self.store_path, 'store_id')

        try:
            for diretorio in (self.records_dir, self.intents_dir, self.locks_dir):
                os.makedirs(diretorio, exist_ok=True)
        except OSError as e:
            logger.error(f"Erro ao preparar o store em {self.store_path}: {e}")
            raise StoreUnavailable(f"Store indisponível em {self.store_path}: {e}") from e

        self._guard = threading.Lock()
        # A entrada some quando nenhuma thread segura mais o lock do PID
        self._thread_locks = weakref.WeakValueDictionary()
        self._allocation_thread_lock = threading.Lock()
        self._allocation_file_lock = FileLock(os.path.join(self.locks_dir, 'allocation.lock'),
                                              timeout=LOCK_TIMEOUT)

        self.store_id = self._carregar_store_id()
        self.recuperar_intencoes()

    # --- Caminhos ---

    def _record_path(self, pid: str) -> str:
        h = _hash(pid)
        return os.path.join(self.records_dir, h[:2], h[2:4], f'{h}.json')

    def _intent_path(self, pid: str) -> str:
        return os.path.join(self.intents_dir, f'{_hash(pid)}.json')

    # --- Locks ---

    @contextmanager
    def bloquear(self, pid: str) -> Iterator[None]:
        """Exclusão mútua por PID (threads e processos)"""
        with self._guard:
            thread_lock = self._thread_locks.get(pid)
            if thread_lock is None:
                thread_lock = threading.Lock()
                self._thread_locks[pid] = thread_lock
        file_lock = FileLock(os.path.join(self.locks_dir, f'{_hash(pid)}.lock'), timeout=LOCK_TIMEOUT)
        with thread_lock:
            try:
                with file_lock:
                    yield
            except Timeout as e:
                raise StoreUnavailable(f"Timeout aguardando lock do PID {pid}") from e

    @contextmanager
    def bloquear_alocacao(self) -> Iterator[None]:
        with self._allocation_thread_lock:
            try:
                with self._allocation_file_lock:
                    yield
            except Timeout as e:
                raise StoreUnavailable("Timeout aguardando lock de alocação") from e

    # --- Leitura ---

    def buscar(self, pid: str) -> Optional[Dict[str, Any]]:
        """Documento do PID ou None"""
        path = self._record_path(pid)
        try:
            with open(path, encoding='utf-8') as f:
                return json.load(f)
        except FileNotFoundError:
            return None
        except (OSError, json.JSONDecodeError) as e:
            logger.error(f"Erro ao ler registro {pid}: {e}")
            raise StoreUnavailable(f"Falha ao ler {pid}: {e}") from e

    def existe(self, pid: str) -> bool:
        return os.path.exists(self._record_path(pid)) or os.path.exists(self._intent_path(pid))

    def listar_documentos(self) -> Iterator[Dict[str, Any]]:
        for raiz, _, arquivos in os.walk(self.records_dir):
            for nome in arquivos:
                if not nome.endswith('.json'):
                    continue
                try:
                    with open(os.path.join(raiz, nome), encoding='utf-8') as f:
                        yield json.load(f)
                except (OSError, json.JSONDecodeError) as e:
                    logger.error(f"Erro ao ler {nome}: {e}")
                    raise StoreUnavailable(f"Falha ao ler {nome}: {e}") from e

    def listar_pids(self) -> List[str]:
        return sorted(doc['pid'] for doc in self.listar_documentos())

    # --- Escrita ---

    def salvar(self, doc: Dict[str, Any]) -> None:
        path = self._record_path(doc['pid'])
        try:
            os.makedirs(os.path.dirname(path), exist_ok=True)
            atomic_write_json(path, doc)
        except OSError as e:
            logger.error(f"Erro ao gravar registro {doc['pid']}: {e}")
            raise StoreUnavailable(f"Falha ao gravar {doc['pid']}: {e}") from e

    # --- Alocação ---

    def ler_contador(self) -> int:
        try:
            with open(self.counter_path, encoding='utf-8') as f:
                return int(f.read().strip() or 0)
        except FileNotFoundError:
            return 0

    def gravar_contador(self, valor: int) -> None:
        atomic_write_text(self.counter_path, f'{valor}\n')

    # --- Intenções de mint ---

    def registrar_intencao(self, doc: Dict[str, Any], contador: Optional[int] = None) -> None:
        try:
            atomic_write_json(self._intent_path(doc['pid']), {'counter': contador, 'document': doc})
        except OSError as e:
            raise StoreUnavailable(f"Falha ao gravar intenção de mint: {e}") from e

    def concluir_intencao(self, pid: str) -> None:
        with suppress(FileNotFoundError):
            os.remove(self._intent_path(pid))

    def recuperar_intencoes(self) -> int:
        """
        Conclui mints interrompidos: grava o registro que faltou e ajusta o
        contador. Retorna quantas intenções foram processadas.

        Pode rodar em um worker enquanto outro faz mint ou update: cada
        intenção é tratada sob o lock do PID e o registro em disco nunca é
        sobrescrito.
        """
        recuperadas = 0
        with self.bloquear_alocacao():
            for nome in sorted(os.listdir(self.intents_dir)):
                path = os.path.join(self.intents_dir, nome)
                if not nome.endswith('.json'):
                    continue
                try:
                    with open(path, encoding='utf-8') as f:
                        intencao = json.load(f)
                except FileNotFoundError:
                    continue
                except (OSError, json.JSONDecodeError) as e:
                    logger.warning(f"Intenção ilegível descartada ({nome}): {e}")
                    with suppress(FileNotFoundError):
                        os.remove(path)
                    continue

                doc = intencao['document']
                with self.bloquear(doc['pid']):
                    if not os.path.exists(path):
                        # o mint dono da intenção terminou enquanto esperávamos o lock
                        continue
                    if self.buscar(doc['pid']) is None:
                        self.salvar(doc)
                        logger.warning(f"Mint interrompido de {doc['pid']} concluído na recuperação")
                    contador = intencao.get('counter')
                    if contador is not None and contador > self.ler_contador():
                        self.gravar_contador(contador)
                    with suppress(FileNotFoundError):
                        os.remove(path)
                recuperadas += 1
        return recuperadas

    # --- Identidade do store ---

    def _carregar_store_id(self) -> str:
        """Lê o store_id; na criação do store, grava um novo (uuid4)"""
        with self.bloquear_alocacao():
            try:
                with open(self.store_id_path, encoding='utf-8') as f:
                    valor = f.read().strip()
                if valor:
                    return valor
            except FileNotFoundError:
                pass
            except OSError as e:
                raise StoreUnavailable(f"Falha ao ler store_id: {e}") from e

            valor = uuid.uuid4().hex
            try:
                atomic_write_text(self.store_id_path, f'{valor}\n')
            except OSError as e:
                raise StoreUnavailable(f"Falha ao gravar store_id: {e}") from e
            logger.info(f"Novo store em {self.store_path} (id {valor})")
            return valor
