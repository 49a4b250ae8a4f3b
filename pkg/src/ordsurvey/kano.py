"""Kano typing of attributes and detection of threshold values."""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from ordsurvey.ordeval import FactorCell, ReinforcementProfile

DEFAULT_TAU = 0.6


class KanoLabel(str, Enum):
    PERFORMANCE = "performance"
    BASIC = "basic"
    EXCITEMENT = "excitement"
    NEGLIGIBLE = "negligible"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class ThresholdFinding:
    attribute: str
    value: int
    direction: str
    factor: float
    significant: bool


def _prob(x) -> float | None:
    if isinstance(x, FactorCell):
        return x.probability
    return x


def classify_attribute(up, down, tau: float = DEFAULT_TAU) -> KanoLabel:
    """Kano label from attribute-level upward and downward factors.

    Both at least ``tau``: performance. Only downward: basic. Only upward:
    excitement. Neither: negligible. An undefined factor (None) counts as
    below ``tau``. Factors may be floats, None or :class:`FactorCell`.
    """
    if not 0 < tau < 1:
        raise ValueError(f"tau must lie in (0, 1), got {tau}")
    u, d = _prob(up), _prob(down)
    high_up = u is not None and u >= tau
    high_down = d is not None and d >= tau
    if high_up and high_down:
        return KanoLabel.PERFORMANCE
    if high_down:
        return KanoLabel.BASIC
    if high_up:
        return KanoLabel.EXCITEMENT
    return KanoLabel.NEGLIGIBLE


def classify_profile(profile: ReinforcementProfile, tau: float = DEFAULT_TAU) -> dict[str, KanoLabel]:
    return {
        name: classify_attribute(profile.aggregate(a, "up"), profile.aggregate(a, "down"), tau)
        for a, name in enumerate(profile.attribute_names)
    }


def detect_thresholds(profile: ReinforcementProfile, flags: dict,
                      tau: float = DEFAULT_TAU) -> list[ThresholdFinding]:
    """Value-level cells that are significant or reach ``tau``.

    ``flags`` maps (attribute, value, direction) to a bool, as returned by
    :func:`ordsurvey.significance.significance_flags`; missing keys count as
    not significant. Findings are ordered by attribute (dataset order), value,
    then direction ("down" before "up").
    """
    found = []
    for a, name in enumerate(profile.attribute_names):
        for v in profile.scales[a].values:
            for d in ("down", "up"):
                cell = profile.cell(a, v, d)
                if not cell.defined:
                    continue
                sig = bool(flags.get((name, v, d), False))
                if sig or cell.probability >= tau:
                    found.append(ThresholdFinding(name, v, d, cell.probability, sig))
    return found
