import glob
import os
import random
from dataclasses import replace

import pytest

from app.exceptions import DuplicateInstrumentPid, NodeNotFound
from app.services.pidgraph import (
    Direction,
    NodeKind,
    PidEdge,
    build_graph,
    dangling,
    export_edge_list,
    export_json,
    neighbors,
    normalize_identifier,
)
from app.services.schema_model import Pid, RelatedIdentifier, RelationType, parse_record
from tests.factories import fixture_path, random_record


def _radar_corpus():
    records = []
    for path in sorted(glob.glob(os.path.join(fixture_path("radar-corpus"), "*.pidinst"))):
        with open(path, encoding="utf-8") as f:
            records.append(parse_record(f.read()))
    return records


def _naive_graph(corpus):
    """Oráculo simples: conjuntos de nós e arestas calculados diretamente"""
    instrumentos = {normalize_identifier(r.identifier.value) for r in corpus}
    arestas = {}
    for r in corpus:
        origem = normalize_identifier(r.identifier.value)
        for rel in r.related_identifiers:
            chave = (origem, normalize_identifier(rel.value), rel.relation_type.strip())
            tipo = rel.identifier_type.strip()
            arestas[chave] = min(tipo, arestas.get(chave, tipo))
    destinos = {destino for _, destino, _ in arestas}
    nos = {(n, NodeKind.INSTRUMENT) for n in instrumentos}
    nos |= {(n, NodeKind.EXTERNAL) for n in destinos - instrumentos}
    return nos, {PidEdge(o, d, rel, tipo) for (o, d, rel), tipo in arestas.items()}


def _linked_corpus(rng, tamanho):
    records = [random_record(rng) for _ in range(tamanho)]
    pids = [r.identifier.value for r in records]
    ligados = []
    for record in records:
        extras = tuple(
            RelatedIdentifier(
                rng.choice([alvo, f"http://hdl.handle.net/{alvo}"]) if not alvo.startswith("10.") else alvo,
                "Handle", rng.choice(RelationType.ALL),
            )
            for alvo in rng.sample(pids, k=min(2, len(pids)))
        )
        ligados.append(replace(record, related_identifiers=record.related_identifiers + extras))
    return ligados


class TestBuildGraph:

    def test_hzb_single_record(self, hzb_record):
        g = build_graph([hzb_record])
        assert g.nodes == {("10.5442/NI000001", NodeKind.INSTRUMENT), ("10.17815/jlsrf-4-110", NodeKind.EXTERNAL)}
        assert g.edges == {PidEdge("10.5442/NI000001", "10.17815/jlsrf-4-110", "IsDescribedBy", "DOI")}

    def test_radar_components(self):
        g = build_graph(_radar_corpus())
        assert len(g.nodes) == 4
        assert all(kind == NodeKind.INSTRUMENT for _, kind in g.nodes)
        assert len(g.edges) == 3
        assert {e.relation for e in g.edges} == {"HasComponent"}
        assert dangling(g) == []

    def test_matches_naive_oracle(self):
        rng = random.Random(17)
        for _ in range(20):
            corpus = _linked_corpus(rng, rng.randint(1, 12))
            nos, arestas = _naive_graph(corpus)
            g = build_graph(corpus)
            assert g.nodes == nos
            assert g.edges == arestas

    def test_corpus_order_does_not_matter(self):
        rng = random.Random(23)
        for _ in range(10):
            corpus = _linked_corpus(rng, 8)
            embaralhado = list(corpus)
            rng.shuffle(embaralhado)
            assert build_graph(corpus) == build_graph(embaralhado)

    def test_repeated_triples_collapse(self, hzb_record):
        rel = hzb_record.related_identifiers[0]
        repetido = replace(hzb_record, related_identifiers=(rel, replace(rel, value=f"https://doi.org/{rel.value}")))
        assert len(build_graph([repetido]).edges) == 1

    def test_resolver_urls_link_to_instruments(self):
        radar, *unidades = _radar_corpus()
        url = f"http://hdl.handle.net/{unidades[0].identifier.value}"
        radar = replace(radar, related_identifiers=(RelatedIdentifier(url, "Handle", "HasComponent"),))
        g = build_graph([radar] + unidades)
        assert dangling(g) == []

    def test_duplicate_instrument(self, hzb_record):
        with pytest.raises(DuplicateInstrumentPid):
            build_graph([hzb_record, replace(hzb_record, name="Outro")])

    def test_duplicate_after_normalization(self, hzb_record):
        outro = replace(hzb_record, identifier=Pid.from_text("https://doi.org/10.5442/NI000001"))
        with pytest.raises(DuplicateInstrumentPid):
            build_graph([hzb_record, outro])

    def test_empty_corpus(self):
        g = build_graph([])
        assert g.nodes == frozenset()
        assert export_edge_list(g) == ""


class TestQueries:

    def test_article_edge(self, hzb_record):
        g = build_graph([hzb_record])
        assert neighbors(g, "10.5442/NI000001", "IsDescribedBy", Direction.OUT) == [
            PidEdge("10.5442/NI000001", "10.17815/jlsrf-4-110", "IsDescribedBy", "DOI"),
        ]

    def test_incoming_edges(self):
        g = build_graph(_radar_corpus())
        entrada = neighbors(g, "21.T11998/EISCAT-UNIT-0002", direction=Direction.IN)
        assert [(e.source, e.relation) for e in entrada] == [("21.T11998/EISCAT-RADAR-0001", "HasComponent")]
        assert neighbors(g, "21.T11998/EISCAT-UNIT-0002", direction=Direction.OUT) == []

    def test_outgoing_edges_are_sorted(self):
        g = build_graph(_radar_corpus())
        saida = neighbors(g, "http://hdl.handle.net/21.T11998/EISCAT-RADAR-0001")
        assert [e.target for e in saida] == [
            "21.T11998/EISCAT-UNIT-0001", "21.T11998/EISCAT-UNIT-0002", "21.T11998/EISCAT-UNIT-0003",
        ]

    def test_both_directions_match_oracle(self):
        rng = random.Random(29)
        corpus = _linked_corpus(rng, 10)
        g = build_graph(corpus)
        _, arestas = _naive_graph(corpus)
        for no, _ in g.nodes:
            esperado = sorted({e for e in arestas if no in (e.source, e.target)},
                              key=lambda e: (e.relation, e.target, e.source))
            assert neighbors(g, no, direction=Direction.BOTH) == esperado

    def test_relation_filter_without_matches(self, hzb_record):
        g = build_graph([hzb_record])
        assert neighbors(g, "10.5442/NI000001", "HasMetadata") == []

    def test_unknown_node(self, hzb_record):
        with pytest.raises(NodeNotFound):
            neighbors(build_graph([hzb_record]), "10.9999/nada")

    def test_dangling_hzb(self, hzb_record):
        assert dangling(build_graph([hzb_record])) == ["10.17815/jlsrf-4-110"]


class TestExport:

    def test_edge_list(self):
        texto = export_edge_list(build_graph(_radar_corpus()))
        assert texto.splitlines() == [
            f"21.T11998/EISCAT-RADAR-0001\tHasComponent\t21.T11998/EISCAT-UNIT-000{n}" for n in (1, 2, 3)
        ]
        assert texto.endswith("\n")

    def test_json(self, hzb_record):
        import json
        doc = json.loads(export_json(build_graph([hzb_record])))
        assert doc["nodes"] == [
            {"id": "10.17815/jlsrf-4-110", "kind": "External"},
            {"id": "10.5442/NI000001", "kind": "Instrument"},
        ]
        assert doc["edges"] == [{
            "from": "10.5442/NI000001", "relation": "IsDescribedBy",
            "to": "10.17815/jlsrf-4-110", "identifierType": "DOI",
        }]
