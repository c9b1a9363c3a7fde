"""
Exceções de domínio do PIDINST.

Todas derivam de PidinstError para que rotas e CLI possam separar falhas
de domínio de falhas de ambiente.
"""

from typing import Any, Optional


class PidinstError(Exception):
    """Raiz das exceções de domínio"""


# ===== PARSING DO FORMATO CANÔNICO =====

class RecordSyntaxError(PidinstError):
    """Texto malformado no formato canônico"""

    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.line = line
        self.column = column
        if line:
            message = f"{message} (linha {line}, coluna {column})"
        super().__init__(message)


class UnknownProperty(PidinstError):
    """Propriedade que não existe no schema"""

    def __init__(self, name: str, path: str):
        self.name = name
        self.path = path
        super().__init__(f"Propriedade desconhecida '{name}' em '{path}'")


class TypeMismatch(PidinstError):
    """Valor com tipo diferente do esperado pelo schema"""

    def __init__(self, path: str, expected: str):
        self.path = path
        self.expected = expected
        super().__init__(f"Tipo inválido em '{path}': esperado {expected}")


# ===== CROSSWALK =====

class MissingTypeHandle(PidinstError):
    def __init__(self, property_name: str):
        self.property_name = property_name
        super().__init__(f"Type handle não configurado para a propriedade '{property_name}'")


class UnknownTypeHandle(PidinstError):
    def __init__(self, type_handle: str, index: int):
        self.type_handle = type_handle
        self.index = index
        super().__init__(f"Type handle desconhecido '{type_handle}' no índice {index}")


class MalformedEntryData(PidinstError):
    def __init__(self, index: int, detail: str = ""):
        self.index = index
        super().__init__(f"Dados malformados na entrada {index}: {detail}".rstrip(": "))


class MissingMandatory(PidinstError):
    def __init__(self, property_name: str):
        self.property_name = property_name
        super().__init__(f"Propriedade obrigatória ausente: '{property_name}'")


class MalformedDocument(PidinstError):
    """Documento SensorML malformado ou sem estrutura esperada"""


class ConflictingIdentifier(PidinstError):
    def __init__(self, existing: str, requested: str):
        self.existing = existing
        self.requested = requested
        super().__init__(
            f"O documento já possui identificador persistente '{existing}' "
            f"(solicitado: '{requested}')"
        )


# ===== REGISTRY =====

class ValidationFailed(PidinstError):
    """Registro com erros de validação; carrega o relatório completo"""

    def __init__(self, report: Any):
        self.report = report
        codes = ", ".join(f"{v.code.value}@{v.path}" for v in report.errors)
        super().__init__(f"Registro inválido: {codes}")


class StoreUnavailable(PidinstError):
    pass


class PidNotFound(PidinstError):
    def __init__(self, pid: str):
        self.pid = pid
        super().__init__(f"PID não encontrado: {pid}")


class PidGone(PidinstError):
    """PID tombstoned; o último estado conhecido segue anexado"""

    def __init__(self, pid: str, entry: Optional[Any] = None):
        self.pid = pid
        self.entry = entry
        super().__init__(f"PID removido (tombstone): {pid}")


class VersionConflict(PidinstError):
    def __init__(self, expected: int, current: int):
        self.expected = expected
        self.current = current
        super().__init__(f"Conflito de versão: esperado {expected}, atual {current}")


class IdentifierMismatch(PidinstError):
    def __init__(self, expected: str, found: Optional[str]):
        self.expected = expected
        self.found = found
        super().__init__(f"Identificador do registro ({found}) difere do PID ({expected})")


class AlreadyTombstoned(PidinstError):
    def __init__(self, pid: str):
        self.pid = pid
        super().__init__(f"PID já está em tombstone: {pid}")


# ===== GRAFO =====

class DuplicateInstrumentPid(PidinstError):
    def __init__(self, pid: str):
        self.pid = pid
        super().__init__(f"Dois registros do corpus compartilham o identificador {pid}")


class NodeNotFound(PidinstError):
    def __init__(self, pid: str):
        self.pid = pid
        super().__init__(f"Nó inexistente no grafo: {pid}")


# ===== CLIENTE HTTP =====

class RegistryClientError(PidinstError):
    def __init__(self, status: int, message: str):
        self.status = status
        super().__init__(f"HTTP {status}: {message}")
