"""Permutation null distributions and box-and-whiskers statistics for reinforcement factors.

Each resample permutes the response column among the labeled rows and
recomputes the whole profile. Attribute values are never touched, so the
neighbor table is computed once and shared by all resamples.

Box statistics use nearest-rank percentiles: the p-th percentile of m sorted
samples is the ceil(p * m)-th smallest (at least the first). The box spans
the 25th to 75th percentile, the whiskers the 100*alpha/2 and
100*(1 - alpha/2) percentiles.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from ordsurvey.dataset import OrdinalDataset
from ordsurvey.errors import InputError, OrdSurveyError
from ordsurvey.ordeval import DIRECTIONS, OrdEvalParams, ReinforcementProfile, _PairTally

AGGREGATE = None  # value slot of an attribute-level cell key


class MismatchedShapes(OrdSurveyError, ValueError):
    pass


@dataclass(frozen=True)
class SignificanceParams:
    B: int = 200
    alpha: float = 0.05
    seed: int = 0

    def __post_init__(self):
        if int(self.B) != self.B or self.B < 20:
            raise InputError(f"B must be an integer >= 20, got {self.B}")
        if not 0 < self.alpha < 0.5:
            raise InputError(f"alpha must lie in (0, 0.5), got {self.alpha}")


@dataclass(frozen=True)
class ConfidenceBox:
    q1: float
    median: float
    q3: float
    whisker_low: float
    whisker_high: float
    sample_count: int


def nearest_rank(sorted_samples: np.ndarray, p: float) -> float:
    m = len(sorted_samples)
    # round() absorbs binary noise such as 0.975 * 100 = 97.50000000000001
    rank = max(1, math.ceil(round(p * m, 9)))
    return float(sorted_samples[min(rank, m) - 1])


def confidence_box(samples: Iterable[float], alpha: float) -> ConfidenceBox | None:
    """Box statistics of the defined (non-NaN) samples; None when there are none."""
    s = np.asarray(list(samples) if not isinstance(samples, np.ndarray) else samples, dtype=float)
    s = np.sort(s[~np.isnan(s)])
    if s.size == 0:
        return None
    return ConfidenceBox(
        q1=nearest_rank(s, 0.25),
        median=nearest_rank(s, 0.5),
        q3=nearest_rank(s, 0.75),
        whisker_low=nearest_rank(s, alpha / 2),
        whisker_high=nearest_rank(s, 1 - alpha / 2),
        sample_count=int(s.size),
    )


@dataclass(frozen=True, eq=False)
class NullCell:
    """Resampled factor values of one cell (NaN where undefined) and their box.

    A cell undefined in at least half of the resamples is unassessable.
    """

    samples: np.ndarray
    box: ConfidenceBox | None

    @property
    def defined_count(self) -> int:
        return int((~np.isnan(self.samples)).sum())

    @property
    def assessable(self) -> bool:
        undefined = len(self.samples) - self.defined_count
        return self.box is not None and 2 * undefined < len(self.samples)


@dataclass(frozen=True, eq=False)
class NullDistribution:
    attribute_names: tuple
    scales: tuple
    k: int
    params: SignificanceParams
    cells: dict

    def cell(self, attribute: str, value: int | None, direction: str) -> NullCell:
        return self.cells[(attribute, value, direction)]

    def aggregate(self, attribute: str, direction: str) -> NullCell:
        return self.cells[(attribute, AGGREGATE, direction)]

    def __eq__(self, other) -> bool:
        if not isinstance(other, NullDistribution):
            return NotImplemented
        return (
            self.attribute_names == other.attribute_names
            and self.scales == other.scales
            and self.params == other.params
            and self.cells.keys() == other.cells.keys()
            and all(
                np.array_equal(c.samples, other.cells[key].samples, equal_nan=True)
                and c.box == other.cells[key].box
                for key, c in self.cells.items()
            )
        )

    __hash__ = None


def _ratio(succ: np.ndarray, pairs: np.ndarray) -> np.ndarray:
    out = np.full(pairs.shape, np.nan)
    np.divide(succ, pairs, out=out, where=pairs > 0)
    return out


def _record(profile: ReinforcementProfile) -> dict:
    row = {}
    for a, name in enumerate(profile.attribute_names):
        sc = profile.scales[a]
        for d, pairs, succ in (("up", profile.up_pairs[a], profile.up_success[a]),
                               ("down", profile.down_pairs[a], profile.down_success[a])):
            ratios = _ratio(succ, pairs)
            for off, v in enumerate(sc.values):
                row[(name, v, d)] = ratios[off]
            total = pairs.sum()
            row[(name, AGGREGATE, d)] = succ.sum() / total if total > 0 else np.nan
    return row


def resample_permutation(seed: int, b: int, n: int) -> np.ndarray:
    """Permutation used by resample ``b``; depends only on (seed, b)."""
    return np.random.default_rng([seed, b]).permutation(n)


def null_distribution(ds: OrdinalDataset, params: OrdEvalParams = OrdEvalParams(),
                      sp: SignificanceParams = SignificanceParams()) -> NullDistribution:
    """Resample the profile ``sp.B`` times with the response permuted among labeled rows."""
    tally = _PairTally(ds, params)
    labeled = np.flatnonzero(ds.labeled_mask)
    samples: dict = {}
    for b in range(sp.B):
        perm = resample_permutation(sp.seed, b, labeled.size)
        y = ds.y.copy()
        y[labeled] = ds.y[labeled][perm]
        for key, v in _record(tally.profile(y)).items():
            samples.setdefault(key, []).append(v)
    cells = {}
    for key, vals in samples.items():
        arr = np.array(vals, dtype=float)
        arr.setflags(write=False)
        cells[key] = NullCell(arr, confidence_box(arr, sp.alpha))
    return NullDistribution(ds.attribute_names, ds.scales, tally.k, sp, cells)


def significance_flags(profile: ReinforcementProfile, nd: NullDistribution) -> dict:
    """Map (attribute, value, direction) to a significance flag.

    ``value`` is None for the attribute-level cell. A cell is significant when
    its observed factor is defined, its null cell is assessable, and the factor
    strictly exceeds the upper whisker.
    """
    if profile.attribute_names != nd.attribute_names or profile.scales != nd.scales:
        raise MismatchedShapes("profile and null distribution describe different attributes or scales")
    flags = {}
    for a, name in enumerate(profile.attribute_names):
        for d in DIRECTIONS:
            keyed = [(v, profile.cell(a, v, d)) for v in profile.scales[a].values]
            keyed.append((AGGREGATE, profile.aggregate(a, d)))
            for v, observed in keyed:
                null = nd.cells[(name, v, d)]
                flags[(name, v, d)] = (
                    observed.defined
                    and null.assessable
                    and observed.probability > null.box.whisker_high
                )
    return flags
