import json
import random
from dataclasses import replace

import pytest

from app.services.schema_model import (
    AlternateIdentifier,
    InstrumentDate,
    Pid,
    PidScheme,
    RelatedIdentifier,
    TypedTerm,
)
from app.services.validator import (
    MatchKind,
    ViolationCode,
    VocabularySnapshot,
    VocabularyTerm,
    check_vocabulary,
    load_vocabularies,
    validate,
)
from tests.factories import random_record


def _codes(report):
    return [(v.code, v.path) for v in report.violations]


class TestValidate:

    def test_bodc_fixture_has_no_errors(self, bodc_record):
        report = validate(bodc_record)
        assert report.is_valid
        assert report.errors == []

    def test_lowercase_serial_number_type_is_a_warning(self, bodc_record):
        report = validate(bodc_record)
        assert len(report.warnings) == 1
        aviso = report.warnings[0]
        assert aviso.code == ViolationCode.UNKNOWN_VOCABULARY_TERM
        assert aviso.path == "alternate_identifiers[0].alternateIdentifierType"
        assert "SerialNumber" in aviso.message

    def test_canonical_serial_number_type_is_clean(self, bodc_record):
        record = replace(bodc_record, alternate_identifiers=(AlternateIdentifier("2490", "SerialNumber"),))
        assert validate(record).violations == ()

    def test_missing_name(self, bodc_record):
        report = validate(replace(bodc_record, name=None))
        assert len(report.errors) == 1
        assert (report.errors[0].code, report.errors[0].path) == (ViolationCode.MISSING_MANDATORY, "name")

    @pytest.mark.parametrize("campo,caminho", [
        ("identifier", "identifier"),
        ("identifier_type", "identifier_type"),
        ("landing_page", "landing_page"),
    ])
    def test_missing_mandatory_scalar(self, bodc_record, campo, caminho):
        report = validate(replace(bodc_record, **{campo: None}))
        assert (ViolationCode.MISSING_MANDATORY, caminho) in _codes(report)
        assert len(report.errors) == 1

    def test_missing_owners_and_manufacturers(self, bodc_record):
        report = validate(replace(bodc_record, owners=(), manufacturers=()))
        assert [(v.code, v.path) for v in report.errors] == [
            (ViolationCode.MISSING_MANDATORY, "manufacturers"),
            (ViolationCode.MISSING_MANDATORY, "owners"),
        ]

    def test_optional_common_properties_can_be_removed(self, bodc_record):
        record = replace(bodc_record, description=None, instrument_types=(), dates=())
        assert validate(record).is_valid

    def test_impossible_month(self, bodc_record):
        record = replace(bodc_record, dates=(InstrumentDate("1999-13-01", "Commissioned"),))
        report = validate(record)
        assert len(report.errors) == 1
        assert (report.errors[0].code, report.errors[0].path) == (ViolationCode.BAD_DATE, "dates[0].date")

    def test_unknown_date_type_is_an_error(self, bodc_record):
        record = replace(bodc_record, dates=(InstrumentDate("1999-11-01", "Installed"),))
        report = validate(record)
        assert [(v.code, v.path) for v in report.errors] == [
            (ViolationCode.UNKNOWN_VOCABULARY_TERM, "dates[0].dateType"),
        ]

    def test_date_type_case_variant_is_a_warning(self, bodc_record):
        record = replace(bodc_record, dates=(InstrumentDate("1999-11-01", "commissioned"),))
        report = validate(record)
        assert report.is_valid
        assert "dates[0].dateType" in [v.path for v in report.warnings]

    def test_builtin_date_types_without_vocabularies(self, bodc_record):
        record = replace(bodc_record, dates=(InstrumentDate("1999-11-01", "Installed"),))
        report = validate(record, [])
        assert not report.is_valid

    def test_landing_page_must_be_absolute(self, bodc_record):
        report = validate(replace(bodc_record, landing_page="linkedsystems.uk/system"))
        assert (ViolationCode.BAD_URL, "landing_page") in _codes(report)

    def test_empty_name(self, bodc_record):
        report = validate(replace(bodc_record, name="   "))
        assert (ViolationCode.EMPTY_VALUE, "name") in _codes(report)

    def test_duplicate_alternate_identifier(self, bodc_record):
        alt = AlternateIdentifier("2490", "SerialNumber")
        report = validate(replace(bodc_record, alternate_identifiers=(alt, alt)))
        assert (ViolationCode.DUPLICATE_ALTERNATE_IDENTIFIER, "alternate_identifiers[1]") in _codes(report)

    def test_duplicate_alternate_identifier_ignores_type_case(self, bodc_record):
        alternates = (AlternateIdentifier("2490", "serialNumber"), AlternateIdentifier("2490", "SerialNumber"))
        report = validate(replace(bodc_record, alternate_identifiers=alternates))
        assert (ViolationCode.DUPLICATE_ALTERNATE_IDENTIFIER, "alternate_identifiers[1]") in _codes(report)
        assert not report.is_valid

    def test_same_value_with_other_type_is_not_a_duplicate(self, bodc_record):
        alternates = (AlternateIdentifier("2490", "SerialNumber"), AlternateIdentifier("2490", "InventoryNumber"))
        report = validate(replace(bodc_record, alternate_identifiers=alternates))
        assert ViolationCode.DUPLICATE_ALTERNATE_IDENTIFIER not in [c for c, _ in _codes(report)]

    def test_handle_with_extra_slash_is_rejected(self, bodc_record):
        record = replace(bodc_record, identifier=Pid.from_text("21.T11998/A/B"))
        assert record.identifier.scheme == PidScheme.HANDLE
        report = validate(record)
        assert (ViolationCode.BAD_IDENTIFIER_SYNTAX, "identifier") in _codes(report)
        assert not report.is_valid

    def test_free_text_instrument_type_is_only_a_warning(self, bodc_record):
        record = replace(bodc_record, instrument_types=(TypedTerm("tool0022"),))
        report = validate(record)
        assert report.is_valid
        aviso = [v for v in report.warnings if v.path == "instrument_types[0]"][0]
        assert "http://vocab.nerc.ac.uk/collection/L22/current/TOOL0022/" in aviso.message

    def test_unknown_relation_type_is_a_warning(self, bodc_record):
        rel = RelatedIdentifier("10.17815/jlsrf-4-110", "DOI", "Mentions")
        report = validate(replace(bodc_record, related_identifiers=(rel,)))
        assert report.is_valid
        assert (ViolationCode.UNKNOWN_VOCABULARY_TERM, "related_identifiers[0].relationType") in _codes(report)

    def test_bad_doi_syntax_in_related_identifier(self, bodc_record):
        rel = RelatedIdentifier("jlsrf-4-110", "DOI", "IsDescribedBy")
        report = validate(replace(bodc_record, related_identifiers=(rel,)))
        assert report.is_valid
        assert (ViolationCode.BAD_IDENTIFIER_SYNTAX, "related_identifiers[0].value") in _codes(report)

    def test_violations_are_sorted(self, bodc_record):
        record = replace(bodc_record, name=None, owners=(), landing_page=None)
        caminhos = [(v.path, v.code.value) for v in validate(record).violations]
        assert caminhos == sorted(caminhos)

    def test_report_to_dict(self, bodc_record):
        doc = validate(replace(bodc_record, name=None)).to_dict()
        assert doc["valid"] is False
        assert doc["errors"] == 1
        assert doc["violations"][0]["severity"] in ("Error", "Warning")
        json.dumps(doc)

    def test_random_records_are_valid(self):
        rng = random.Random(11)
        vocabularios = load_vocabularies()
        for _ in range(120):
            report = validate(random_record(rng), vocabularios)
            assert report.is_valid, report.to_dict()

    def test_validation_is_deterministic(self, bodc_record):
        record = replace(bodc_record, name="", landing_page="x y")
        assert validate(record) == validate(record)


class TestVocabularies:

    @pytest.fixture
    def relation_scheme(self):
        return VocabularySnapshot("relationType", (VocabularyTerm("IsDescribedBy"), VocabularyTerm("HasMetadata")))

    def test_exact_match(self, relation_scheme):
        assert check_vocabulary("HasMetadata", relation_scheme).kind == MatchKind.EXACT

    def test_case_variant(self, relation_scheme):
        match = check_vocabulary("hasmetadata", relation_scheme)
        assert match.kind == MatchKind.CASE_VARIANT
        assert match.canonical == "HasMetadata"

    def test_unknown(self, relation_scheme):
        assert check_vocabulary("Cites", relation_scheme).kind == MatchKind.UNKNOWN

    def test_concept_url_matches(self):
        scheme = VocabularySnapshot("L22", (VocabularyTerm("TOOL0022", "http://vocab.nerc.ac.uk/collection/L22/current/TOOL0022/"),))
        match = check_vocabulary("http://vocab.nerc.ac.uk/collection/L22/current/TOOL0022/", scheme)
        assert match.kind == MatchKind.EXACT

    def test_duplicate_tokens_are_rejected(self):
        with pytest.raises(ValueError):
            VocabularySnapshot("x", (VocabularyTerm("SerialNumber"), VocabularyTerm("serialnumber")))

    def test_bundled_snapshots(self):
        vocabularios = load_vocabularies()
        assert set(vocabularios) >= {"dateType", "relationType", "alternateIdentifierType", "identifierType"}
        assert vocabularios["dateType"].tokens == ["Commissioned", "DeCommissioned"]
        assert "HasComponent" in vocabularios["relationType"].tokens

    def test_custom_directory(self, tmp_path):
        (tmp_path / "local.json").write_text(json.dumps({
            "scheme": "relationType",
            "terms": [{"token": "IsDescribedBy"}],
        }), encoding="utf-8")
        vocabularios = load_vocabularies(str(tmp_path))
        assert list(vocabularios) == ["relationType"]
        assert vocabularios["relationType"].source == ""
