import json
from dataclasses import replace

import pytest

from app.services.datacite_crosswalk import (
    DataCiteFormat,
    DataCiteOptions,
    datacite_to_dict,
    parse_datacite,
    render_datacite,
    to_datacite,
)
from app.services.handle_crosswalk import (
    from_handle_record,
    parse_handle_record,
    render_handle_record,
    to_handle_record,
)
from app.services.schema_model import (
    SCHEMA_PATH,
    AlternateIdentifier,
    InstrumentDate,
    InstrumentRecord,
    Manufacturer,
    Owner,
    Pid,
    PidScheme,
    RelatedIdentifier,
    TypedIdentifier,
    TypedTerm,
    canonicalize,
    parse_record,
    record_to_dict,
)
from app.services.validator import validate

# Todas as propriedades e subpropriedades preenchidas, com mais de um item por lista
FULL_RECORD = InstrumentRecord(
    identifier=Pid(PidScheme.DOI, "10.5442/NI000042"),
    identifier_type="DOI",
    landing_page="https://instrumente.example.org/ni000042",
    name="Difratômetro de nêutrons E2",
    owners=(
        Owner("Helmholtz-Zentrum Berlin", "user@helmholtz-berlin.de",
              TypedIdentifier("https://ror.org/02aj13c28", "ROR")),
        Owner("Instituto Oceanográfico", "contato@io.example.org",
              TypedIdentifier("https://ror.org/00abcd123", "ROR")),
    ),
    manufacturers=(
        Manufacturer("Sea-Bird Scientific", "SBE 37-IM",
                     TypedIdentifier("https://ror.org/0190ak572", "ROR")),
        Manufacturer("HZB Oficina", "E2 rev. 3",
                     TypedIdentifier("https://orcid.org/0000-0002-1825-0097", "ORCID")),
    ),
    description="Difratômetro de pó com detector de área; opera desde 1998.",
    instrument_types=(
        TypedTerm("Neutron Diffractometer", "http://vocab.nerc.ac.uk/collection/L22/current/"),
        TypedTerm("Powder Diffractometer", "https://w3id.org/pidinst/instrument-types"),
    ),
    measured_variables=(
        TypedTerm("Neutron intensity", "http://vocab.nerc.ac.uk/collection/P01/current/"),
        TypedTerm("Sample temperature", "http://vocab.nerc.ac.uk/collection/P02/current/"),
    ),
    dates=(
        InstrumentDate("1998-04-01", "Commissioned"),
        InstrumentDate("2021-12-31", "DeCommissioned"),
    ),
    alternate_identifiers=(
        AlternateIdentifier("2490", "SerialNumber"),
        AlternateIdentifier("HZB-E2", "InventoryNumber"),
    ),
    related_identifiers=(
        RelatedIdentifier("10.17815/jlsrf-4-74", "DOI", "IsDescribedBy"),
        RelatedIdentifier("21.T11998/0000-0000-0007", "Handle", "IsNewVersionOf"),
    ),
)


def _schema_keys(node):
    chaves = set(node.get("properties", {}))
    for definicao in node.get("$defs", {}).values():
        chaves |= _schema_keys(definicao)
    return chaves


def _document_keys(value):
    if isinstance(value, dict):
        chaves = set(value)
        for item in value.values():
            chaves |= _document_keys(item)
        return chaves
    if isinstance(value, list):
        return set().union(*(_document_keys(item) for item in value))
    return set()


class TestFullRecord:

    def test_every_schema_property_is_populated(self):
        with open(SCHEMA_PATH, encoding="utf-8") as f:
            schema = json.load(f)
        assert _schema_keys(schema) <= _document_keys(record_to_dict(FULL_RECORD))

    def test_full_record_is_valid(self):
        relatorio = validate(FULL_RECORD)
        assert relatorio.is_valid()

    def test_canonical_round_trip(self):
        texto = canonicalize(FULL_RECORD)
        assert parse_record(texto) == FULL_RECORD
        assert canonicalize(parse_record(texto)) == texto

    @pytest.mark.parametrize("include_info_types", [False, True])
    def test_handle_round_trip(self, include_info_types):
        hr = to_handle_record(FULL_RECORD, include_info_types=include_info_types)
        assert from_handle_record(hr) == FULL_RECORD
        assert from_handle_record(parse_handle_record(render_handle_record(hr))) == FULL_RECORD

    def test_handle_entries_cover_every_property(self):
        hr = to_handle_record(FULL_RECORD)
        # URL + Identifier, LandingPage, Name, Owners, Manufacturers, Description,
        # InstrumentType, MeasuredVariable, Dates, AlternateIdentifiers, RelatedIdentifiers
        assert len(hr.entries) == 12
        assert [e.index for e in hr.entries] == list(range(1, 13))

    def test_datacite_projection_has_no_warnings(self):
        dc, avisos = to_datacite(FULL_RECORD)
        assert avisos == []

        doc = datacite_to_dict(dc)
        assert doc["doi"] == "10.5442/NI000042"
        assert doc["url"] == FULL_RECORD.landing_page
        assert doc["publisher"] == "Helmholtz-Zentrum Berlin"
        assert doc["publicationYear"] == 1998
        assert [c["name"] for c in doc["creators"]] == ["Helmholtz-Zentrum Berlin", "Instituto Oceanográfico"]
        assert [t["title"] for t in doc["titles"]] == [
            "Difratômetro de nêutrons E2", "Model: SBE 37-IM", "Model: E2 rev. 3",
        ]
        assert len(doc["contributors"]) == 4
        assert [d["dateInformation"] for d in doc["dates"]] == ["Commissioned", "DeCommissioned"]
        assert [a["alternateIdentifier"] for a in doc["alternateIdentifiers"]] == ["2490", "HZB-E2"]
        assert [r["relationType"] for r in doc["relatedIdentifiers"]] == ["IsDescribedBy", "IsNewVersionOf"]
        assert len(doc["subjects"]) == 4
        assert doc["descriptions"][0]["description"] == FULL_RECORD.description

    @pytest.mark.parametrize("formato", [DataCiteFormat.JSON, DataCiteFormat.XML])
    def test_datacite_render_and_parse(self, formato):
        dc, _ = to_datacite(FULL_RECORD, DataCiteOptions("HZB", 2019))
        lido = parse_datacite(render_datacite(dc, formato), formato)
        if formato == DataCiteFormat.XML:
            assert lido.url is None
            lido = replace(lido, url=dc.url)
        assert lido == dc
