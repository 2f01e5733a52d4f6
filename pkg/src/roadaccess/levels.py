"""Closed vocabularies shared across the pipeline."""

from __future__ import annotations

import enum


class Surface(str, enum.Enum):
    """Road surface type, used as the road-quality proxy."""

    PAVED = "paved"
    UNPAVED = "unpaved"
    UNKNOWN = "unknown"


# Raw OSM-style surface strings folded onto the binary vocabulary.
# Anything not listed maps to UNKNOWN.
SURFACE_ALIASES: dict[str, Surface] = {
    "asphalt": Surface.PAVED,
    "concrete": Surface.PAVED,
    "paving_stones": Surface.PAVED,
    "paved": Surface.PAVED,
    "dirt": Surface.UNPAVED,
    "gravel": Surface.UNPAVED,
    "ground": Surface.UNPAVED,
    "sand": Surface.UNPAVED,
    "earth": Surface.UNPAVED,
    "compacted": Surface.UNPAVED,
    "unpaved": Surface.UNPAVED,
}


def normalize_surface(raw: object) -> Surface:
    """Map a raw surface attribute onto {paved, unpaved, unknown}."""
    if raw is None:
        return Surface.UNKNOWN
    return SURFACE_ALIASES.get(str(raw).strip().lower(), Surface.UNKNOWN)


class DeprivationLevel(enum.IntEnum):
    """Three-level road access deprivation scale, ordered low < medium < high."""

    LOW = 0
    MEDIUM = 1
    HIGH = 2

    @property
    def label(self) -> str:
        return self.name.lower()

    @classmethod
    def from_label(cls, raw: str) -> "DeprivationLevel":
        try:
            return cls[str(raw).strip().upper()]
        except KeyError:
            raise ValueError(f"unknown deprivation level: {raw!r}") from None


LEVELS: tuple[DeprivationLevel, ...] = (
    DeprivationLevel.LOW,
    DeprivationLevel.MEDIUM,
    DeprivationLevel.HIGH,
)
