"""
Linha de comando do PIDINST.

Códigos de saída: 0 sucesso; 1 falha de domínio (registro inválido, PID
inexistente, identificador ausente); 2 falha de ambiente (E/S, sintaxe, rede).
A saída padrão leva apenas o resultado; diagnósticos vão para stderr.

Uso:
    python -m app.cli validate fixtures/bodc-sbe37.pidinst
    python -m app.cli convert fixtures/bodc-sbe37.pidinst --to handle
    python -m app.cli --registry-url http://localhost:5005 mint registro.pidinst
"""

import argparse
import glob
import json
import logging
import os
import sys
from dataclasses import dataclass
from enum import Enum
from typing import List, Optional

import requests

from app.exceptions import (
    MalformedDocument,
    PidinstError,
    RecordSyntaxError,
    RegistryClientError,
    TypeMismatch,
    UnknownProperty,
)
from app.services import property_analysis
from app.services.datacite_crosswalk import (
    CreatorPolicy,
    DataCiteFormat,
    DataCiteOptions,
    render_datacite,
    to_datacite,
)
from app.services.handle_crosswalk import render_handle_record, to_handle_record
from app.services.pidgraph import (
    Direction,
    build_graph,
    dangling,
    export_edge_list,
    export_json,
    neighbors,
)
from app.services.registry_client import RegistryClient
from app.services.registry_service import check_landing_pages
from app.services.schema_model import HANDLE_RESOLVER, InstrumentRecord, Pid, canonicalize, parse_record
from app.services.sensorml_service import embed_sensorml_identifier, extract_sensorml_identifier
from app.services.validator import DEFAULT_VOCAB_DIR, Severity, ValidationReport, load_vocabularies, validate
from app.utils.file_utils import atomic_write_text

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_ENVIRONMENT = 2

DEFAULT_REGISTRY_URL = 'http://localhost:5005'
CORPUS_PATTERN = '*.pidinst'

# Erros de entrada que não são do domínio: texto malformado
SYNTAX_ERRORS = (RecordSyntaxError, UnknownProperty, TypeMismatch, MalformedDocument)

_RED = '\033[31m'
_YELLOW = '\033[33m'
_GREEN = '\033[32m'
_RESET = '\033[0m'


class OutputFormat(Enum):
    CANONICAL = 'canonical'
    HANDLE = 'handle'
    DATACITE_XML = 'datacite-xml'
    DATACITE_JSON = 'datacite-json'


@dataclass(frozen=True)
class CliConfig:
    registry_url: Optional[str]
    vocab_dir: str
    output_format: OutputFormat
    color: bool
    api_token: Optional[str] = None
    resolver: str = HANDLE_RESOLVER


def _env_bool(value: Optional[str]) -> Optional[bool]:
    if value is None:
        return None
    return value.strip().lower() in ('1', 'true', 'yes', 'sim', 'on')


def build_config(args: argparse.Namespace) -> CliConfig:
    """Flags têm precedência; depois variáveis PIDINST_*; depois os padrões"""
    color = args.color
    if color is None:
        color = _env_bool(os.getenv('PIDINST_COLOR'))
    if color is None:
        color = sys.stdout.isatty()

    return CliConfig(
        registry_url=args.registry_url or os.getenv('PIDINST_REGISTRY_URL') or DEFAULT_REGISTRY_URL,
        vocab_dir=args.vocab_dir or os.getenv('PIDINST_VOCAB_DIR') or DEFAULT_VOCAB_DIR,
        output_format=OutputFormat(args.format or os.getenv('PIDINST_FORMAT') or OutputFormat.CANONICAL.value),
        color=color,
        api_token=args.token or os.getenv('PIDINST_API_TOKEN') or None,
        resolver=os.getenv('PIDINST_BASE_RESOLVER_URL') or HANDLE_RESOLVER,
    )


class CommandFailed(Exception):
    """Interrompe um comando com o código de saída indicado"""

    def __init__(self, message: str, exit_code: int):
        self.exit_code = exit_code
        super().__init__(message)


# ===== Helpers =====

def _read_text(path: str) -> str:
    try:
        with open(path, encoding='utf-8') as f:
            return f.read()
    except OSError as e:
        raise CommandFailed(f"Não foi possível ler {path}: {e}", EXIT_ENVIRONMENT)


def _load_record(path: str) -> InstrumentRecord:
    texto = _read_text(path)
    try:
        return parse_record(texto)
    except SYNTAX_ERRORS as e:
        raise CommandFailed(f"{path}: {e}", EXIT_ENVIRONMENT)


def _load_vocabularies(config: CliConfig):
    if not os.path.isdir(config.vocab_dir):
        raise CommandFailed(f"Diretório de vocabulários inexistente: {config.vocab_dir}", EXIT_ENVIRONMENT)
    try:
        return load_vocabularies(config.vocab_dir)
    except (OSError, ValueError, KeyError) as e:
        raise CommandFailed(f"Vocabulários inválidos em {config.vocab_dir}: {e}", EXIT_ENVIRONMENT)


def _paint(text: str, color: str, config: CliConfig) -> str:
    return f"{color}{text}{_RESET}" if config.color else text


def _format_report(path: str, report: ValidationReport, config: CliConfig) -> str:
    if report.is_valid:
        cabecalho = _paint('OK', _GREEN, config)
        linhas = [f"{path}: {cabecalho} ({len(report.warnings)} aviso(s))"]
    else:
        cabecalho = _paint(f"{len(report.errors)} erro(s)", _RED, config)
        linhas = [f"{path}: {cabecalho}, {len(report.warnings)} aviso(s)"]
    for v in report.violations:
        cor = _RED if v.severity == Severity.ERROR else _YELLOW
        linhas.append(f"  {_paint(v.severity.value, cor, config)} {v.code.value} {v.path}: {v.message}")
    return "\n".join(linhas) + "\n"


def _require_valid(path: str, record: InstrumentRecord, config: CliConfig) -> None:
    report = validate(record, _load_vocabularies(config))
    if not report.is_valid:
        sys.stderr.write(_format_report(path, report, config))
        raise CommandFailed(f"{path}: registro inválido", EXIT_DOMAIN)


def _client(config: CliConfig, session=None) -> RegistryClient:
    return RegistryClient(config.registry_url, session=session, token=config.api_token)


def _load_corpus(directory: str) -> List[InstrumentRecord]:
    if not os.path.isdir(directory):
        raise CommandFailed(f"Diretório inexistente: {directory}", EXIT_ENVIRONMENT)
    return [_load_record(path) for path in sorted(glob.glob(os.path.join(directory, CORPUS_PATTERN)))]


# ===== Comandos =====

def cmd_validate(args, config: CliConfig, session=None) -> int:
    vocabularios = _load_vocabularies(config)
    codigo = EXIT_OK
    resultados = []

    for path in args.files:
        try:
            record = _load_record(path)
        except CommandFailed as e:
            sys.stderr.write(f"{e}\n")
            resultados.append({'file': path, 'error': str(e)})
            codigo = EXIT_ENVIRONMENT
            continue

        report = validate(record, vocabularios)
        if not report.is_valid and codigo == EXIT_OK:
            codigo = EXIT_DOMAIN
        if args.json:
            resultados.append({'file': path, **report.to_dict()})
        else:
            sys.stdout.write(_format_report(path, report, config))

    if args.json:
        sys.stdout.write(json.dumps(resultados, indent=2, ensure_ascii=False) + "\n")
    return codigo


def cmd_convert(args, config: CliConfig, session=None) -> int:
    record = _load_record(args.file)
    _require_valid(args.file, record, config)
    formato = OutputFormat(args.to) if args.to else config.output_format

    if formato == OutputFormat.CANONICAL:
        saida = canonicalize(record)
    elif formato == OutputFormat.HANDLE:
        saida = render_handle_record(to_handle_record(record, resolver=config.resolver))
    else:
        opts = DataCiteOptions.for_record(record, CreatorPolicy(args.creator_policy))
        if args.publisher:
            opts = DataCiteOptions(args.publisher, opts.publication_year, opts.creator_policy)
        if args.publication_year:
            opts = DataCiteOptions(opts.publisher, args.publication_year, opts.creator_policy)
        dc, avisos = to_datacite(record, opts)
        for aviso in avisos:
            sys.stderr.write(f"aviso: {aviso}\n")
        destino = DataCiteFormat.XML if formato == OutputFormat.DATACITE_XML else DataCiteFormat.JSON
        saida = render_datacite(dc, destino)

    sys.stdout.write(saida)
    return EXIT_OK


def cmd_mint(args, config: CliConfig, session=None) -> int:
    texto = _read_text(args.file)
    pid = _client(config, session).mint(texto)
    sys.stdout.write(f"{pid}\n")
    return EXIT_OK


def cmd_resolve(args, config: CliConfig, session=None) -> int:
    pid = Pid.from_text(args.pid).value
    resultado = _client(config, session).resolve(pid, noredirect=args.noredirect)
    sys.stdout.write(resultado if resultado.endswith("\n") else f"{resultado}\n")
    return EXIT_OK


def cmd_update(args, config: CliConfig, session=None) -> int:
    texto = _read_text(args.file)
    pid = Pid.from_text(args.pid).value
    versao = _client(config, session).update(pid, texto, args.if_match)
    sys.stdout.write(f"{versao}\n")
    return EXIT_OK


def cmd_tombstone(args, config: CliConfig, session=None) -> int:
    _client(config, session).tombstone(Pid.from_text(args.pid).value)
    return EXIT_OK


def cmd_graph(args, config: CliConfig, session=None) -> int:
    grafo = build_graph(_load_corpus(args.corpus_dir))

    if args.graph_command == 'build':
        sys.stdout.write(export_json(grafo) if args.json else export_edge_list(grafo))
    elif args.graph_command == 'neighbors':
        direcao = Direction(args.direction)
        for edge in neighbors(grafo, args.pid, args.relation, direcao):
            sys.stdout.write(f"{edge.source}\t{edge.relation}\t{edge.target}\n")
    else:
        for valor in dangling(grafo):
            sys.stdout.write(f"{valor}\n")
    return EXIT_OK


def cmd_sensorml(args, config: CliConfig, session=None) -> int:
    documento = _read_text(args.document)

    if args.sensorml_command == 'extract':
        pid = extract_sensorml_identifier(documento, resolver=config.resolver)
        if pid is None:
            sys.stderr.write(f"{args.document}: nenhum identificador persistente encontrado\n")
            return EXIT_DOMAIN
        sys.stdout.write(f"{pid.value}\n")
        return EXIT_OK

    saida = embed_sensorml_identifier(documento, Pid.from_text(args.pid), replace=args.replace,
                                      resolver=config.resolver)
    if args.in_place:
        try:
            atomic_write_text(args.document, saida)
        except OSError as e:
            raise CommandFailed(f"Não foi possível gravar {args.document}: {e}", EXIT_ENVIRONMENT)
    else:
        sys.stdout.write(saida)
    return EXIT_OK


def cmd_check(args, config: CliConfig, session=None) -> int:
    records = [_load_record(path) for path in args.files]
    codigo = EXIT_OK
    for status in check_landing_pages(records, session=session):
        resultado = str(status.status) if status.status is not None else f"erro: {status.error}"
        sys.stdout.write(f"{status.identifier}\t{status.url}\t{resultado}\n")
        if not status.ok:
            codigo = EXIT_DOMAIN
    return codigo


def cmd_properties(args, config: CliConfig, session=None) -> int:
    if args.common:
        propriedades = property_analysis.common_properties()
    elif args.unmapped:
        propriedades = property_analysis.unmapped_properties()
    else:
        propriedades = property_analysis.collected_properties()

    for p in propriedades:
        sys.stdout.write(f"{p.number}\t{p.name}\t{p.category}\t{p.occurrence}\t{', '.join(p.schema)}\n")
    return EXIT_OK


# ===== Parser =====

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog='pidinst', description='Ferramentas PIDINST: validação, crosswalks, registry e grafo.')
    ap.add_argument('--format', choices=[f.value for f in OutputFormat], help='Formato de saída padrão do convert.')
    ap.add_argument('--vocab-dir', help='Diretório com os snapshots de vocabulário.')
    ap.add_argument('--registry-url', help='URL base do registry.')
    ap.add_argument('--token', help='Token de API para operações de escrita.')
    ap.add_argument('--color', dest='color', action='store_true', default=None, help='Saída colorida.')
    ap.add_argument('--no-color', dest='color', action='store_false', default=None, help='Saída sem cores.')
    ap.add_argument('-v', '--verbose', action='store_true', help='Log detalhado em stderr.')

    sub = ap.add_subparsers(dest='command', required=True)

    p = sub.add_parser('validate', help='Valida registros no formato canônico.')
    p.add_argument('files', nargs='+')
    p.add_argument('--json', action='store_true', help='Relatório em JSON.')
    p.set_defaults(handler=cmd_validate)

    p = sub.add_parser('convert', help='Converte um registro para outro formato.')
    p.add_argument('file')
    p.add_argument('--to', choices=[f.value for f in OutputFormat])
    p.add_argument('--publisher')
    p.add_argument('--publication-year', type=int)
    p.add_argument('--creator-policy', choices=[c.value for c in CreatorPolicy],
                   default=CreatorPolicy.OWNER_AS_CREATOR.value)
    p.set_defaults(handler=cmd_convert)

    p = sub.add_parser('mint', help='Registra um instrumento no registry.')
    p.add_argument('file')
    p.set_defaults(handler=cmd_mint)

    p = sub.add_parser('resolve', help='Resolve um PID.')
    p.add_argument('pid')
    p.add_argument('--noredirect', action='store_true', help='Mostra o registro Handle em vez da landing page.')
    p.set_defaults(handler=cmd_resolve)

    p = sub.add_parser('update', help='Grava nova versão de um registro.')
    p.add_argument('file')
    p.add_argument('--pid', required=True)
    p.add_argument('--if-match', type=int, required=True, help='Versão atual esperada.')
    p.set_defaults(handler=cmd_update)

    p = sub.add_parser('tombstone', help='Retira um PID (tombstone).')
    p.add_argument('pid')
    p.set_defaults(handler=cmd_tombstone)

    p = sub.add_parser('graph', help='Grafo de relações de um corpus (DIR/*.pidinst).')
    graph_sub = p.add_subparsers(dest='graph_command', required=True)
    g = graph_sub.add_parser('build')
    g.add_argument('corpus_dir')
    g.add_argument('--json', action='store_true')
    g = graph_sub.add_parser('neighbors')
    g.add_argument('corpus_dir')
    g.add_argument('pid')
    g.add_argument('--relation')
    g.add_argument('--direction', choices=[d.value for d in Direction], default=Direction.OUT.value)
    g = graph_sub.add_parser('dangling')
    g.add_argument('corpus_dir')
    p.set_defaults(handler=cmd_graph)

    p = sub.add_parser('sensorml', help='Inclui ou lê o PID em documentos SensorML.')
    sensorml_sub = p.add_subparsers(dest='sensorml_command', required=True)
    s = sensorml_sub.add_parser('embed')
    s.add_argument('document')
    s.add_argument('--pid', required=True)
    s.add_argument('--replace', action='store_true', help='Substitui um PID diferente já presente.')
    s.add_argument('--in-place', action='store_true', help='Grava no próprio arquivo.')
    s = sensorml_sub.add_parser('extract')
    s.add_argument('document')
    p.set_defaults(handler=cmd_sensorml)

    p = sub.add_parser('check', help='Verifica o status HTTP das landing pages (apenas relata).')
    p.add_argument('files', nargs='+')
    p.set_defaults(handler=cmd_check)

    p = sub.add_parser('properties', help='Propriedades coletadas nos casos de uso.')
    filtro = p.add_mutually_exclusive_group()
    filtro.add_argument('--common', action='store_true', help='Só as presentes em 5 ou mais casos de uso.')
    filtro.add_argument('--unmapped', action='store_true', help='Só as sem propriedade no schema.')
    p.set_defaults(handler=cmd_properties)

    return ap


def main(argv: Optional[List[str]] = None, session=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)

    logging.basicConfig(
        stream=sys.stderr,
        level=logging.INFO if args.verbose else logging.WARNING,
        format='%(levelname)s %(name)s: %(message)s',
    )

    try:
        config = build_config(args)
        return args.handler(args, config, session)
    except CommandFailed as e:
        sys.stderr.write(f"{e}\n")
        return e.exit_code
    except SYNTAX_ERRORS as e:
        sys.stderr.write(f"{e}\n")
        return EXIT_ENVIRONMENT
    except RegistryClientError as e:
        sys.stderr.write(f"{e}\n")
        return EXIT_ENVIRONMENT if e.status >= 500 else EXIT_DOMAIN
    except PidinstError as e:
        sys.stderr.write(f"{e}\n")
        return EXIT_DOMAIN
    except requests.RequestException as e:
        sys.stderr.write(f"Falha de comunicação com o registry: {e}\n")
        return EXIT_ENVIRONMENT
    except (OSError, ValueError) as e:
        sys.stderr.write(f"{e}\n")
        return EXIT_ENVIRONMENT


if __name__ == '__main__':
    sys.exit(main(sys.argv[1:]))
