import json
import random
from dataclasses import replace

import pytest

from app.exceptions import MalformedDocument
from app.services.datacite_crosswalk import (
    HOSTING_INSTITUTION,
    PRODUCER,
    RELATION_TYPES,
    CreatorPolicy,
    DataCiteFormat,
    DataCiteOptions,
    DataCiteRecord,
    DataCiteRelatedIdentifier,
    ResourceType,
    datacite_to_dict,
    parse_datacite,
    render_datacite,
    to_datacite,
)
from app.services.schema_model import Pid, RelatedIdentifier
from tests.factories import random_record, read_fixture

HZB_OPTIONS = DataCiteOptions("HZB", 2019)


class TestToDataCite:

    def test_hzb_related_identifier_block(self, hzb_record):
        dc, avisos = to_datacite(hzb_record, HZB_OPTIONS)
        assert avisos == []
        bloco = datacite_to_dict(dc)["relatedIdentifiers"]
        assert bloco == [{
            "relationType": "IsDescribedBy",
            "relatedIdentifier": "10.17815/jlsrf-4-110",
            "relatedIdentifierType": "DOI",
        }]
        assert json.dumps(bloco[0], separators=(",", ":")) == (
            '{"relationType":"IsDescribedBy","relatedIdentifier":"10.17815/jlsrf-4-110",'
            '"relatedIdentifierType":"DOI"}'
        )

    def test_hzb_matches_golden_file(self, hzb_record):
        dc, _ = to_datacite(hzb_record, HZB_OPTIONS)
        assert render_datacite(dc) == read_fixture("hzb-e2.datacite")

    def test_owner_is_creator_and_hosting_institution(self, hzb_record):
        dc, _ = to_datacite(hzb_record, HZB_OPTIONS)
        assert "HZB" in [c.name for c in dc.creators]
        assert ("HZB", HOSTING_INSTITUTION) in [(c.name, c.contributor_type) for c in dc.contributors]

    def test_manufacturer_as_creator_policy(self, bodc_record):
        opts = DataCiteOptions("BODC", 1999, CreatorPolicy.MANUFACTURER_AS_CREATOR)
        dc, _ = to_datacite(bodc_record, opts)
        assert [c.name for c in dc.creators] == ["Sea-Bird Scientific"]
        assert [(c.name, c.contributor_type) for c in dc.contributors] == [
            ("National Oceanography Centre", HOSTING_INSTITUTION),
        ]

    def test_model_name_becomes_other_title(self, bodc_record):
        dc, _ = to_datacite(bodc_record)
        assert [(t.title, t.title_type) for t in dc.titles] == [
            ("Sea-Bird SBE 37-IM MicroCAT C-T Sensor", None),
            ("Model: SBE 37-IM", "Other"),
        ]

    def test_resource_type_is_other_instrument(self, bodc_record):
        dc, _ = to_datacite(bodc_record)
        assert dc.resource_type == ResourceType("Other", "Instrument")

    def test_default_options_use_first_owner_and_date(self, bodc_record):
        dc, _ = to_datacite(bodc_record)
        assert dc.publisher == "National Oceanography Centre"
        assert dc.publication_year == 1999

    def test_dates_keep_pidinst_type_as_information(self, bodc_record):
        dc, _ = to_datacite(bodc_record)
        assert [(d.date, d.date_type, d.date_information) for d in dc.dates] == [
            ("1999-11-01", "Other", "Commissioned"),
        ]

    def test_handle_identifier_warns(self, bodc_record):
        _, avisos = to_datacite(bodc_record)
        assert len(avisos) == 1
        assert "21.T11998/0000-001A-3905-F" in avisos[0]

    def test_has_component_falls_back_to_has_part(self, hzb_record):
        rel = RelatedIdentifier("10.5442/NI000002", "DOI", "HasComponent")
        dc, avisos = to_datacite(replace(hzb_record, related_identifiers=(rel,)), HZB_OPTIONS)
        assert [r.relation_type for r in dc.related_identifiers] == ["HasPart"]
        assert len(avisos) == 1

    def test_is_component_of_falls_back_to_is_part_of(self, hzb_record):
        rel = RelatedIdentifier("10.5442/NI000002", "DOI", "IsComponentOf")
        dc, avisos = to_datacite(replace(hzb_record, related_identifiers=(rel,)), HZB_OPTIONS)
        assert [r.relation_type for r in dc.related_identifiers] == ["IsPartOf"]
        assert len(avisos) == 1

    def test_was_used_in_is_dropped(self, hzb_record):
        rel = RelatedIdentifier("10.5442/EXP1", "DOI", "WasUsedIn")
        dc, avisos = to_datacite(replace(hzb_record, related_identifiers=(rel,)), HZB_OPTIONS)
        assert dc.related_identifiers == ()
        assert len(avisos) == 1

    def test_relation_case_is_normalized(self, hzb_record):
        rel = RelatedIdentifier("10.17815/jlsrf-4-110", "doi", "isdescribedby")
        dc, avisos = to_datacite(replace(hzb_record, related_identifiers=(rel,)), HZB_OPTIONS)
        assert dc.related_identifiers == (DataCiteRelatedIdentifier("10.17815/jlsrf-4-110", "DOI", "IsDescribedBy"),)
        assert avisos == []

    def test_only_datacite_relation_types_are_emitted(self):
        rng = random.Random(5)
        for _ in range(100):
            dc, _ = to_datacite(random_record(rng))
            assert all(r.relation_type in RELATION_TYPES for r in dc.related_identifiers)

    def test_record_rejects_unknown_relation(self):
        with pytest.raises(ValueError):
            DataCiteRecord(
                doi=Pid.from_text("10.5442/NI000001"), url=None, creators=(), titles=(),
                publisher="HZB", publication_year=2019,
                related_identifiers=(DataCiteRelatedIdentifier("x", "DOI", "HasComponent"),),
            )


class TestRenderAndParse:

    def test_json_key_names(self, hzb_record):
        dc, _ = to_datacite(hzb_record, HZB_OPTIONS)
        texto = render_datacite(dc, DataCiteFormat.JSON)
        for chave in ('"relationType"', '"relatedIdentifier"', '"relatedIdentifierType"'):
            assert chave in texto

    def test_json_round_trip(self, bodc_record):
        dc, _ = to_datacite(bodc_record)
        assert parse_datacite(render_datacite(dc)) == dc

    def test_xml_round_trip_without_url(self, bodc_record):
        dc, _ = to_datacite(bodc_record)
        texto = render_datacite(dc, DataCiteFormat.XML)
        assert texto.startswith("<?xml")
        assert 'relationType="IsDescribedBy"' in texto
        assert parse_datacite(texto, DataCiteFormat.XML) == replace(dc, url=None)

    def test_random_records_round_trip(self):
        rng = random.Random(9)
        for _ in range(100):
            dc, _ = to_datacite(random_record(rng), DataCiteOptions("Editora", 2020))
            assert parse_datacite(render_datacite(dc)) == dc
            assert parse_datacite(render_datacite(dc, DataCiteFormat.XML), DataCiteFormat.XML) == replace(dc, url=None)

    def test_rendering_is_deterministic(self, bodc_record):
        dc, _ = to_datacite(bodc_record)
        assert render_datacite(dc) == render_datacite(dc)
        assert render_datacite(dc, DataCiteFormat.XML) == render_datacite(dc, DataCiteFormat.XML)

    def test_api_response_wrapper_is_accepted(self, hzb_record):
        dc, _ = to_datacite(hzb_record, HZB_OPTIONS)
        resposta = json.dumps({"data": {"id": "10.5442/ni000001", "attributes": datacite_to_dict(dc)}})
        assert parse_datacite(resposta) == dc

    def test_malformed_json(self):
        with pytest.raises(MalformedDocument):
            parse_datacite('{"doi": "10.1/x"}')

    def test_malformed_xml(self):
        with pytest.raises(MalformedDocument):
            parse_datacite("<resource", DataCiteFormat.XML)
