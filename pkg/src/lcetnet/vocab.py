"""Classification vocabularies: LCET categories, CPC code mapping, WoS fields."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field


class Lcet(str, enum.Enum):
    PV = "PV"
    WIND = "Wind"
    THERMAL = "Thermal"
    OCEAN = "Ocean"
    HYDRO = "Hydro"
    GEO = "Geo"
    BIOFUELS = "Biofuels"
    WASTE = "Waste"
    FISSION = "Fission"
    FUSION = "Fusion"

    def __str__(self) -> str:
        return self.value


# Deterministic column order for the ten-technology matrices.
LCET_ORDER: tuple[Lcet, ...] = (
    Lcet.PV,
    Lcet.WIND,
    Lcet.THERMAL,
    Lcet.OCEAN,
    Lcet.HYDRO,
    Lcet.GEO,
    Lcet.BIOFUELS,
    Lcet.WASTE,
    Lcet.FISSION,
    Lcet.FUSION,
)

# Six non-fuel renewables (the Y02E10 group).
RENEWABLES: frozenset[Lcet] = frozenset(
    {Lcet.PV, Lcet.WIND, Lcet.THERMAL, Lcet.OCEAN, Lcet.HYDRO, Lcet.GEO}
)

# Y02E 6-digit groups selected at subsetting step 1.
LCET_GROUPS: tuple[str, ...] = ("Y02E10", "Y02E30", "Y02E50")

# 7-digit prefix (group + first digit after the slash) to technology.
_DIRECT_PREFIX = {
    ("Y02E10", "1"): Lcet.GEO,
    ("Y02E10", "2"): Lcet.HYDRO,
    ("Y02E10", "3"): Lcet.OCEAN,
    ("Y02E10", "4"): Lcet.THERMAL,
    ("Y02E10", "5"): Lcet.PV,
    ("Y02E10", "7"): Lcet.WIND,
    ("Y02E50", "1"): Lcet.BIOFUELS,
    ("Y02E50", "3"): Lcet.WASTE,
    ("Y02E30", "1"): Lcet.FUSION,
    ("Y02E30", "3"): Lcet.FISSION,
    ("Y02E30", "4"): Lcet.FISSION,
}

# Multi-purpose tags split into several technologies; exactly these four codes.
MULTI_PURPOSE: dict[str, frozenset[Lcet]] = {
    "Y02E10/00": frozenset(RENEWABLES),
    "Y02E10/60": frozenset({Lcet.THERMAL, Lcet.PV}),
    "Y02E50/00": frozenset({Lcet.BIOFUELS, Lcet.WASTE}),
    "Y02E30/00": frozenset({Lcet.FUSION, Lcet.FISSION}),
}


def is_lcet_code(code: str) -> bool:
    """True when the CPC code belongs to one of the three Y02E energy groups."""
    return code[:6] in LCET_GROUPS


def split_multipurpose(code: str) -> frozenset[Lcet]:
    """Technologies a multi-purpose tag splits into; empty set when not one."""
    return MULTI_PURPOSE.get(code, frozenset())


def classify_code(code: str) -> tuple[frozenset[Lcet], bool]:
    """Map one Y02E CPC code to its technologies.

    Returns (technologies, via_split). An unmapped Y02E code yields an empty
    set with via_split False; callers report these as diagnostics.
    """
    if code in MULTI_PURPOSE:
        return MULTI_PURPOSE[code], True
    group = code[:6]
    rest = code[7:] if len(code) > 6 and code[6] == "/" else ""
    if not rest:
        return frozenset(), False
    tech = _DIRECT_PREFIX.get((group, rest[0]))
    if tech is None:
        return frozenset(), False
    return frozenset({tech}), False


def cpc4_class(code: str) -> str:
    """4-digit CPC class of a code: section letter + class digits + subclass letter."""
    return code[:4]


@dataclass
class FieldVocabulary:
    """Immutable WoS field vocabulary with dense integer ids."""

    names: tuple[str, ...] = ()
    _index: dict[str, int] = field(default_factory=dict, repr=False)

    @classmethod
    def from_names(cls, names) -> "FieldVocabulary":
        ordered = tuple(names)
        seen = set()
        for n in ordered:
            if n in seen:
                raise ValueError(f"duplicate field name: {n!r}")
            seen.add(n)
        return cls(names=ordered, _index={n: i for i, n in enumerate(ordered)})

    @classmethod
    def from_file(cls, path) -> "FieldVocabulary":
        with open(path, encoding="utf-8") as fh:
            names = [line.rstrip("\n") for line in fh if line.strip()]
        return cls.from_names(names)

    def __len__(self) -> int:
        return len(self.names)

    def __contains__(self, name: str) -> bool:
        return name in self._index

    def id_of(self, name: str) -> int:
        return self._index[name]

    def name_of(self, fid: int) -> str:
        return self.names[fid]
