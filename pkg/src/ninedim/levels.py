"""Ordinal scales and the dimension vocabulary.

Risk and reliability are deliberately ordinal: five named levels each,
totally ordered, with saturating step arithmetic. There is no numeric
score anywhere in the engine.
"""

from __future__ import annotations

import enum


class OrdinalRisk(enum.IntEnum):
    """Ordinal risk severity, least to most severe."""

    LOW = 1
    MODERATE = 2
    ELEVATED = 3
    HIGH = 4
    CRITICAL = 5

    @property
    def label(self) -> str:
        return _RISK_LABELS[self]

    @classmethod
    def parse(cls, text: str) -> "OrdinalRisk":
        try:
            return _RISK_BY_LABEL[text]
        except KeyError:
            raise ValueError(f"unknown risk level: {text!r}") from None

    def demoted(self, steps: int) -> "OrdinalRisk":
        """Lower the level by `steps`, saturating at LOW."""
        return OrdinalRisk(max(OrdinalRisk.LOW, self.value - max(0, steps)))

    def __str__(self) -> str:  # pragma: no cover - repr convenience
        return self.label


_RISK_LABELS = {
    OrdinalRisk.LOW: "Low",
    OrdinalRisk.MODERATE: "Moderate",
    OrdinalRisk.ELEVATED: "Elevated",
    OrdinalRisk.HIGH: "High",
    OrdinalRisk.CRITICAL: "Critical",
}
_RISK_BY_LABEL = {label: level for level, label in _RISK_LABELS.items()}


class Reliability(enum.IntEnum):
    """Assessment reliability: evidence quality, completeness, verifiability."""

    VERY_LOW = 1
    LOW = 2
    MODERATE = 3
    HIGH = 4
    VERY_HIGH = 5

    @property
    def label(self) -> str:
        return _RELIABILITY_LABELS[self]

    @classmethod
    def parse(cls, text: str) -> "Reliability":
        try:
            return _RELIABILITY_BY_LABEL[text]
        except KeyError:
            raise ValueError(f"unknown reliability level: {text!r}") from None

    def stepped(self, steps: int) -> "Reliability":
        """Shift by `steps` (positive or negative), saturating at scale bounds."""
        value = self.value + steps
        return Reliability(min(max(value, Reliability.VERY_LOW), Reliability.VERY_HIGH))

    def __str__(self) -> str:  # pragma: no cover - repr convenience
        return self.label


_RELIABILITY_LABELS = {
    Reliability.VERY_LOW: "VeryLow",
    Reliability.LOW: "Low",
    Reliability.MODERATE: "Moderate",
    Reliability.HIGH: "High",
    Reliability.VERY_HIGH: "VeryHigh",
}
_RELIABILITY_BY_LABEL = {label: level for level, label in _RELIABILITY_LABELS.items()}


class Dimension(enum.Enum):
    """The nine assessment dimensions, D1 through D9."""

    SMART_CONTRACT = "D1"
    MARKET = "D2"
    ORACLE = "D3"
    GOVERNANCE = "D4"
    REGULATORY = "D5"
    COUNTERPARTY = "D6"
    COMPOSABILITY = "D7"
    COMPREHENSION_DEBT = "D8"
    TEMPORAL_DYNAMICS = "D9"

    @property
    def code(self) -> str:
        return self.value

    @property
    def label(self) -> str:
        return _DIMENSION_LABELS[self]

    @classmethod
    def parse(cls, text: str) -> "Dimension":
        for dim in cls:
            if text in (dim.value, dim.label):
                return dim
        raise ValueError(f"unknown dimension: {text!r}")

    def __str__(self) -> str:  # pragma: no cover - repr convenience
        return self.value


_DIMENSION_LABELS = {
    Dimension.SMART_CONTRACT: "SmartContract",
    Dimension.MARKET: "Market",
    Dimension.ORACLE: "Oracle",
    Dimension.GOVERNANCE: "Governance",
    Dimension.REGULATORY: "Regulatory",
    Dimension.COUNTERPARTY: "Counterparty",
    Dimension.COMPOSABILITY: "Composability",
    Dimension.COMPREHENSION_DEBT: "ComprehensionDebt",
    Dimension.TEMPORAL_DYNAMICS: "TemporalDynamics",
}

ALL_DIMENSIONS: tuple[Dimension, ...] = tuple(Dimension)

#: Dimensions introduced beyond the classic six-dimension taxonomy.
NOVEL_DIMENSIONS: frozenset[Dimension] = frozenset(
    {Dimension.COMPOSABILITY, Dimension.COMPREHENSION_DEBT, Dimension.TEMPORAL_DYNAMICS}
)
