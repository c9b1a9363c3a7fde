"""
Registros de teste: fixtures em disco e geração aleatória com semente
"""

import os
import random
import string

from app.services.schema_model import (
    AlternateIdentifier,
    DateType,
    InstrumentDate,
    InstrumentRecord,
    Manufacturer,
    Owner,
    Pid,
    RelatedIdentifier,
    RelationType,
    TypedIdentifier,
    TypedTerm,
    parse_record,
)

FIXTURES_DIR = os.path.join(os.path.dirname(os.path.dirname(__file__)), "fixtures")


def fixture_path(name: str) -> str:
    return os.path.join(FIXTURES_DIR, name)


def read_fixture(name: str) -> str:
    with open(fixture_path(name), encoding="utf-8") as f:
        return f.read()


def load_fixture_record(name: str) -> InstrumentRecord:
    return parse_record(read_fixture(name))


# Inclui texto fora do ASCII para exercitar ensure_ascii=False
_ALFABETO = string.ascii_letters + string.digits + " -_.,çãéüøß"


def _texto(rng: random.Random, minimo: int = 1, maximo: int = 24) -> str:
    texto = "".join(rng.choice(_ALFABETO) for _ in range(rng.randint(minimo, maximo))).strip()
    return texto or "x"


def _url(rng: random.Random) -> str:
    caminho = "".join(rng.choice(string.ascii_lowercase + string.digits) for _ in range(rng.randint(3, 12)))
    return f"https://{rng.choice(['example.org', 'instr.example.net', 'vocab.example.com'])}/{caminho}/"


def _handle(rng: random.Random, prefix: str = "21.T11998") -> str:
    return f"{prefix}/" + "-".join(f"{rng.randrange(16 ** 4):04X}" for _ in range(3))


def _doi(rng: random.Random) -> str:
    return f"10.{rng.randint(1000, 99999)}/{_texto(rng, 3, 10).replace(' ', '')}"


def _typed(rng: random.Random):
    if rng.random() < 0.4:
        return None
    return TypedIdentifier(_url(rng), rng.choice(["URL", "ROR", "EDMO"]))


def _term(rng: random.Random) -> TypedTerm:
    valor = _url(rng) if rng.random() < 0.6 else _texto(rng)
    return TypedTerm(valor, rng.choice([None, "L22", "P01", "Local"]))


def random_record(rng: random.Random, identifier: str = None) -> InstrumentRecord:
    """Registro válido aleatório; todos os opcionais podem aparecer ou não"""
    if identifier is None:
        identifier = _handle(rng) if rng.random() < 0.7 else _doi(rng)
    identifier_type = "DOI" if identifier.startswith("10.") else "MeasuringInstrument"

    owners = tuple(
        Owner(_texto(rng), rng.choice([None, f"{_texto(rng, 3, 8).replace(' ', '')}@example.org"]), _typed(rng))
        for _ in range(rng.randint(1, 3))
    )
    manufacturers = tuple(
        Manufacturer(_texto(rng), rng.choice([None, _texto(rng)]), _typed(rng))
        for _ in range(rng.randint(1, 2))
    )
    dates = tuple(
        InstrumentDate(f"{rng.randint(1950, 2030)}-{rng.randint(1, 12):02d}-{rng.randint(1, 28):02d}",
                       rng.choice(DateType.ALL))
        for _ in range(rng.randint(0, 2))
    )
    alternates = tuple(
        AlternateIdentifier(f"{_texto(rng, 2, 8).replace(' ', '')}{i}", rng.choice(["SerialNumber", "InventoryNumber"]))
        for i in range(rng.randint(0, 2))
    )
    related = tuple(
        RelatedIdentifier(*rng.choice([
            (_doi(rng), "DOI"),
            (_url(rng), "URL"),
            (_handle(rng), "Handle"),
        ]), rng.choice(RelationType.ALL))
        for _ in range(rng.randint(0, 3))
    )

    return InstrumentRecord(
        identifier=Pid.from_text(identifier, identifier_type),
        identifier_type=identifier_type,
        landing_page=_url(rng),
        name=_texto(rng),
        owners=owners,
        manufacturers=manufacturers,
        description=rng.choice([None, _texto(rng, 10, 80)]),
        instrument_types=tuple(_term(rng) for _ in range(rng.randint(0, 2))),
        measured_variables=tuple(_term(rng) for _ in range(rng.randint(0, 3))),
        dates=dates,
        alternate_identifiers=alternates,
        related_identifiers=related,
    )
