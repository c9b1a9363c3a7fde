"""
Grafo de relações entre PIDs induzido pelos RelatedIdentifier de um corpus
de registros de instrumentos.

Nós são identificadores normalizados (sem prefixo de resolver); arestas são
triplas (origem, destino, relação). Relações inversas não são materializadas:
consultas usam a direção.
"""

import json
import logging
from dataclasses import dataclass
from enum import Enum
from typing import FrozenSet, Iterable, List, Optional, Tuple

import networkx as nx

from app.exceptions import DuplicateInstrumentPid, NodeNotFound
from app.services.schema_model import InstrumentRecord
from app.utils.converters import strip_resolver_prefix

logger = logging.getLogger(__name__)


class NodeKind(Enum):
    INSTRUMENT = "Instrument"
    EXTERNAL = "External"


class Direction(Enum):
    OUT = "Out"
    IN = "In"
    BOTH = "Both"


@dataclass(frozen=True, order=True)
class PidEdge:
    source: str
    target: str
    relation: str
    identifier_type: str


def normalize_identifier(value: str) -> str:
    """'https://doi.org/10.x/y' -> '10.x/y'; 'http://hdl.handle.net/X' -> 'X'"""
    _, nu = strip_resolver_prefix(value)
    return nu.strip()


class PidGraph:
    """Grafo imutável depois de construído; consultas podem ser concorrentes"""

    def __init__(self, graph: nx.MultiDiGraph):
        self._graph = graph

    @property
    def nodes(self) -> FrozenSet[Tuple[str, NodeKind]]:
        return frozenset((n, data["kind"]) for n, data in self._graph.nodes(data=True))

    @property
    def edges(self) -> FrozenSet[PidEdge]:
        return frozenset(
            PidEdge(u, v, key, data["identifier_type"])
            for u, v, key, data in self._graph.edges(keys=True, data=True)
        )

    def kind(self, value: str) -> NodeKind:
        valor = normalize_identifier(value)
        if valor not in self._graph:
            raise NodeNotFound(valor)
        return self._graph.nodes[valor]["kind"]

    def __contains__(self, value: str) -> bool:
        return normalize_identifier(value) in self._graph

    def __eq__(self, other) -> bool:
        if not isinstance(other, PidGraph):
            return NotImplemented
        return self.nodes == other.nodes and self.edges == other.edges

    def __hash__(self):
        return hash((self.nodes, self.edges))

    @property
    def graph(self) -> nx.MultiDiGraph:
        return self._graph.copy(as_view=True)


def build_graph(corpus: Iterable[InstrumentRecord]) -> PidGraph:
    """
    Um nó Instrument por registro, um nó External por destino fora do corpus
    e uma aresta por tripla (origem, destino, relação) distinta.

    Raises:
        DuplicateInstrumentPid: dois registros com o mesmo identificador
    """
    registros = list(corpus)
    graph = nx.MultiDiGraph()

    for record in registros:
        pid = normalize_identifier(record.identifier.value)
        if pid in graph:
            raise DuplicateInstrumentPid(pid)
        graph.add_node(pid, kind=NodeKind.INSTRUMENT)

    for record in registros:
        origem = normalize_identifier(record.identifier.value)
        for rel in record.related_identifiers:
            destino = normalize_identifier(rel.value)
            relacao = rel.relation_type.strip()
            if destino not in graph:
                graph.add_node(destino, kind=NodeKind.EXTERNAL)
            tipo = rel.identifier_type.strip()
            if graph.has_edge(origem, destino, key=relacao):
                # Triplas repetidas colapsam; o tipo escolhido não depende da ordem do corpus
                tipo = min(tipo, graph.edges[origem, destino, relacao]["identifier_type"])
            graph.add_edge(origem, destino, key=relacao, identifier_type=tipo)

    logger.info(
        f"Grafo construído: {graph.number_of_nodes()} nós, {graph.number_of_edges()} arestas"
    )
    return PidGraph(graph)


def _sort_key(edge: PidEdge):
    return (edge.relation, edge.target, edge.source)


def neighbors(g: PidGraph, pid: str, relation_filter: Optional[str] = None,
              direction: Direction = Direction.OUT) -> List[PidEdge]:
    """
    Arestas do nó filtradas por relação e direção, ordenadas por (relação, destino, origem).

    Raises:
        NodeNotFound: pid não é nó do grafo
    """
    graph = g._graph
    valor = normalize_identifier(pid)
    if valor not in graph:
        raise NodeNotFound(valor)

    encontrados = set()
    if direction in (Direction.OUT, Direction.BOTH):
        for u, v, key, data in graph.out_edges(valor, keys=True, data=True):
            encontrados.add(PidEdge(u, v, key, data["identifier_type"]))
    if direction in (Direction.IN, Direction.BOTH):
        for u, v, key, data in graph.in_edges(valor, keys=True, data=True):
            encontrados.add(PidEdge(u, v, key, data["identifier_type"]))

    if relation_filter is not None:
        encontrados = {e for e in encontrados if e.relation == relation_filter}
    return sorted(encontrados, key=_sort_key)


def dangling(g: PidGraph) -> List[str]:
    """Destinos sem registro no corpus (nós External), ordenados"""
    return sorted(n for n, kind in g.nodes if kind == NodeKind.EXTERNAL)


# ===== Exportação =====

def export_edge_list(g: PidGraph) -> str:
    """Uma aresta por linha: origem<TAB>relação<TAB>destino"""
    linhas = [
        f"{e.source}\t{e.relation}\t{e.target}"
        for e in sorted(g.edges, key=lambda e: (e.source, e.relation, e.target))
    ]
    return "".join(f"{linha}\n" for linha in linhas)


def export_json(g: PidGraph) -> str:
    doc = {
        "nodes": [{"id": n, "kind": kind.value} for n, kind in sorted(g.nodes, key=lambda x: x[0])],
        "edges": [
            {"from": e.source, "relation": e.relation, "to": e.target, "identifierType": e.identifier_type}
            for e in sorted(g.edges, key=lambda e: (e.source, e.relation, e.target))
        ],
    }
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"
