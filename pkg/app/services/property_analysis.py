"""
Análise das propriedades coletadas nos casos de uso de instrumentos.

Tabela com as 43 propriedades harmonizadas (categoria, número de casos de uso
em que aparecem) e o mapeamento para as propriedades do schema PIDINST.
Propriedades sem mapeamento ficam fora do InstrumentRecord.
"""

from dataclasses import dataclass
from typing import List, Tuple

COMMON_THRESHOLD = 5


@dataclass(frozen=True)
class CollectedProperty:
    number: int
    name: str
    category: str
    occurrence: int
    schema: Tuple[str, ...]

    @property
    def mapped(self) -> bool:
        return bool(self.schema)


_PROPERTIES: Tuple[CollectedProperty, ...] = (
    CollectedProperty(1, "Persistent Identifier", "Identification", 10, ("Identifier", "identifierType")),
    CollectedProperty(2, "Landing Page URL", "Identification", 4, ("LandingPage",)),
    CollectedProperty(3, "Alternative Identifier", "", 2, ("AlternateIdentifier", "alternateIdentifierType")),
    CollectedProperty(4, "Resource Type", "", 4, ()),
    CollectedProperty(5, "Instrument Name", "Instrument", 10, ("Name",)),
    CollectedProperty(6, "Instrument Description", "Instrument", 6, ("Description",)),
    CollectedProperty(7, "Instrument Category", "Instrument", 3, ()),
    CollectedProperty(8, "Instrument Type", "Instrument", 5, ("InstrumentType",)),
    CollectedProperty(9, "Device URL", "Instrument", 1, ()),
    CollectedProperty(10, "Model", "Model", 4, ("modelName",)),
    CollectedProperty(11, "Sub-model", "Model", 2, ()),
    CollectedProperty(12, "Instrument Owner", "Owner", 6, ("Owner",)),
    CollectedProperty(13, "Owner Identifier", "Owner", 4, ("ownerIdentifier", "ownerIdentifierType")),
    CollectedProperty(14, "Country", "Owner", 2, ()),
    CollectedProperty(15, "Ownership Start Date", "Owner", 1, ()),
    CollectedProperty(16, "Ownership End Date", "Owner", 1, ()),
    CollectedProperty(17, "Contact Name", "", 2, ("ownerName",)),
    CollectedProperty(18, "Contact eMail", "", 2, ("ownerContact",)),
    CollectedProperty(19, "Contact Phone", "", 2, ()),
    CollectedProperty(20, "Contact Institution", "", 2, ()),
    CollectedProperty(21, "Institution Identifier", "", 1, ()),
    CollectedProperty(22, "Manufacturer", "Manufacturer", 6, ("Manufacturer", "manufacturerName")),
    CollectedProperty(23, "Manufacturer Identifier", "Manufacturer", 1,
                      ("manufacturerIdentifier", "manufacturerIdentifierType")),
    CollectedProperty(24, "Serial Number", "Manufacturer", 3, ()),
    CollectedProperty(25, "Date", "Date", 5, ("Date",)),
    CollectedProperty(26, "Date Type", "Date", 2, ("dateType",)),
    CollectedProperty(27, "Capability", "Capability", 3, ()),
    CollectedProperty(28, "Capability Type", "Capability", 1, ()),
    CollectedProperty(29, "Capability Extent", "Capability", 1, ()),
    CollectedProperty(30, "Characteristic", "", 2, ()),
    CollectedProperty(31, "Event", "", 2, ()),
    CollectedProperty(32, "Output/Observable Property", "Output", 3, ("VariableMeasured",)),
    CollectedProperty(33, "Related Instrument Name", "Related Instrument", 2, ()),
    CollectedProperty(34, "Related Instrument Identifier", "Related Instrument", 1, ()),
    CollectedProperty(35, "Publisher", "Publisher", 2, ()),
    CollectedProperty(36, "Publication Year", "Publisher", 2, ()),
    CollectedProperty(37, "Instance Reference", "", 1, ()),
    CollectedProperty(38, "Funding Reference", "", 1, ()),
    CollectedProperty(39, "Related Identifier", "", 1, ("RelatedIdentifier",)),
    CollectedProperty(40, "Related Identifier Type", "", 1, ("relatedIdentifierType",)),
    CollectedProperty(41, "Relation Type", "", 1, ("relationType",)),
    CollectedProperty(42, "Contributor", "", 1, ()),
    CollectedProperty(43, "Contributor Type", "", 1, ()),
)


def collected_properties() -> List[CollectedProperty]:
    return list(_PROPERTIES)


def common_properties(threshold: int = COMMON_THRESHOLD) -> List[CollectedProperty]:
    """Propriedades presentes em pelo menos `threshold` casos de uso"""
    return [p for p in _PROPERTIES if p.occurrence >= threshold]


def unmapped_properties() -> List[CollectedProperty]:
    return [p for p in _PROPERTIES if not p.mapped]


def schema_symbols() -> List[str]:
    """Os símbolos da coluna Schema, na ordem da tabela e sem repetição"""
    simbolos: List[str] = []
    for prop in _PROPERTIES:
        for simbolo in prop.schema:
            if simbolo not in simbolos:
                simbolos.append(simbolo)
    return simbolos
