"""Value-level reinforcement factors computed among similar respondents.

For every labeled respondent R and each of its k nearest neighbors H, and for
each attribute A with j = A(R):

* if A(H) > j the pair counts towards the upward factor of value j and is a
  success when the neighbor's response is higher than R's;
* if A(H) < j the pair counts towards the downward factor of value j and is a
  success when the neighbor's response is lower.

Pairs with a missing value in A or in either response are skipped for A.
The factor is successes / pairs; with no pairs the factor is undefined.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce
from typing import Sequence

import numpy as np

from ordsurvey.dataset import OrdinalDataset, Scale
from ordsurvey.errors import InputError, TooFewRows

DIRECTIONS = ("up", "down")


@dataclass(frozen=True)
class OrdEvalParams:
    """``k`` is the neighborhood size; it is clamped to n - 1 at run time."""

    k: int = 10

    def __post_init__(self):
        if int(self.k) != self.k or self.k < 1:
            raise InputError(f"k must be a positive integer, got {self.k}")

    def effective_k(self, n: int) -> int:
        return min(self.k, n - 1)


@dataclass(frozen=True)
class FactorCell:
    probability: float | None
    pair_count: float

    @classmethod
    def from_counts(cls, successes: float, pairs: float) -> "FactorCell":
        if pairs > 0:
            return cls(float(successes) / float(pairs), float(pairs))
        return cls(None, 0.0)

    @property
    def defined(self) -> bool:
        return self.probability is not None


def _is_missing(v) -> bool:
    return v is None or (isinstance(v, float) and math.isnan(v))


def distance(r1: Sequence, r2: Sequence, scales: Sequence[Scale]) -> float:
    """Normalized Manhattan distance between two attribute rows.

    Each attribute contributes |v1 - v2| / (max - min); a missing value on
    either side contributes 0.5. The result is the mean over attributes.
    """
    if not scales:
        return 0.0
    total = 0.0
    for v1, v2, sc in zip(r1, r2, scales):
        if _is_missing(v1) or _is_missing(v2):
            total += 0.5
        else:
            total += abs(v1 - v2) / sc.span
    return total / len(scales)


def _integer_distances(X: np.ndarray, scales: Sequence[Scale]) -> np.ndarray:
    """Pairwise distances scaled to exact integers, so ties compare exactly.

    Each attribute contributes 2 * |d| * (L / span) with L the lcm of all
    spans, and L for a missing value; dividing by 2 * L * a gives
    :func:`distance`.
    """
    n, a = X.shape
    D = np.zeros((n, n), dtype=np.int64)
    if a == 0:
        return D
    lcm = reduce(math.lcm, (sc.span for sc in scales), 1)
    for col, sc in zip(X.T, scales):
        miss = np.isnan(col)
        v = np.where(miss, 0, col).astype(np.int64)
        contrib = 2 * np.abs(v[:, None] - v[None, :]) * (lcm // sc.span)
        contrib[miss[:, None] | miss[None, :]] = lcm
        D += contrib
    return D


def neighbor_table(ds: OrdinalDataset, k: int) -> np.ndarray:
    """(n, k') array of nearest-neighbor row indices, nearest first, k' = min(k, n - 1).

    Ties are broken by ascending row index.
    """
    n = ds.n
    if n < 2:
        raise TooFewRows(f"need at least 2 rows, got {n}")
    k = min(k, n - 1)
    D = _integer_distances(ds.X, ds.scales)
    np.fill_diagonal(D, np.iinfo(np.int64).max)
    # stable sort keeps ascending index order inside equal distances
    return np.argsort(D, axis=1, kind="stable")[:, :k]


def nearest_neighbors(ds: OrdinalDataset, i: int, k: int) -> list[int]:
    return [int(h) for h in neighbor_table(ds, k)[i]]


@dataclass(frozen=True, eq=False)
class ReinforcementProfile:
    """Upward/downward success and pair tallies per attribute and value.

    ``up_pairs[a][v]`` is the evidence for the upward factor of value
    ``scales[a].min + v``; likewise for the other three arrays.
    """

    attribute_names: tuple[str, ...]
    scales: tuple[Scale, ...]
    k: int
    up_pairs: tuple[np.ndarray, ...]
    up_success: tuple[np.ndarray, ...]
    down_pairs: tuple[np.ndarray, ...]
    down_success: tuple[np.ndarray, ...]

    def _index(self, attribute) -> int:
        if isinstance(attribute, str):
            return self.attribute_names.index(attribute)
        return int(attribute)

    def cell(self, attribute, value: int, direction: str) -> FactorCell:
        a = self._index(attribute)
        off = value - self.scales[a].min
        if not 0 <= off < self.scales[a].size:
            raise KeyError(value)
        if direction == "up":
            return FactorCell.from_counts(self.up_success[a][off], self.up_pairs[a][off])
        if direction == "down":
            return FactorCell.from_counts(self.down_success[a][off], self.down_pairs[a][off])
        raise ValueError(f"direction must be 'up' or 'down', got {direction!r}")

    def up(self, attribute, value: int) -> FactorCell:
        return self.cell(attribute, value, "up")

    def down(self, attribute, value: int) -> FactorCell:
        return self.cell(attribute, value, "down")

    def aggregate(self, attribute, direction: str) -> FactorCell:
        a = self._index(attribute)
        if direction == "up":
            return FactorCell.from_counts(self.up_success[a].sum(), self.up_pairs[a].sum())
        if direction == "down":
            return FactorCell.from_counts(self.down_success[a].sum(), self.down_pairs[a].sum())
        raise ValueError(f"direction must be 'up' or 'down', got {direction!r}")

    def cells(self):
        """Yield (attribute_name, value, direction, FactorCell) in report order."""
        for a, (name, sc) in enumerate(zip(self.attribute_names, self.scales)):
            for v in sc.values:
                for d in DIRECTIONS:
                    yield name, v, d, self.cell(a, v, d)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ReinforcementProfile):
            return NotImplemented
        arrays = ("up_pairs", "up_success", "down_pairs", "down_success")
        return (
            self.attribute_names == other.attribute_names
            and self.scales == other.scales
            and all(
                np.array_equal(x, z)
                for f in arrays
                for x, z in zip(getattr(self, f), getattr(other, f))
            )
        )

    __hash__ = None


class _PairTally:
    """Pair structure of a dataset under a fixed neighbor table.

    Everything that depends only on attribute values is computed once; only
    the response vector varies between calls to :meth:`profile`, which is what
    the permutation null distribution needs.
    """

    def __init__(self, ds: OrdinalDataset, params: OrdEvalParams):
        nb = neighbor_table(ds, params.k)
        self.ds = ds
        self.k = nb.shape[1]
        self.R = np.repeat(np.arange(ds.n), self.k)
        self.H = nb.ravel()
        self.attr = []
        for a, sc in enumerate(ds.scales):
            vR, vH = ds.X[self.R, a], ds.X[self.H, a]
            ok = ~(np.isnan(vR) | np.isnan(vH))
            up = ok & (vH > vR)
            down = ok & (vH < vR)
            j = np.where(ok, vR - sc.min, 0).astype(np.int64)
            self.attr.append((up, down, j, sc.size))

    def profile(self, y: np.ndarray) -> ReinforcementProfile:
        yR, yH = y[self.R], y[self.H]
        have = ~(np.isnan(yR) | np.isnan(yH))
        higher = have & (yH > yR)
        lower = have & (yH < yR)
        tallies: list[list[np.ndarray]] = [[], [], [], []]
        for up, down, j, size in self.attr:
            up = up & have
            down = down & have
            tallies[0].append(np.bincount(j[up], minlength=size).astype(float))
            tallies[1].append(np.bincount(j[up & higher], minlength=size).astype(float))
            tallies[2].append(np.bincount(j[down], minlength=size).astype(float))
            tallies[3].append(np.bincount(j[down & lower], minlength=size).astype(float))
        return ReinforcementProfile(self.ds.attribute_names, self.ds.scales, self.k,
                                    *(tuple(t) for t in tallies))


def reinforcement_profile(ds: OrdinalDataset, params: OrdEvalParams = OrdEvalParams()) -> ReinforcementProfile:
    """Reinforcement factors of every attribute value, from the k-neighborhoods of ``ds``.

    Rows with a missing response take part in neighbor search but never form
    a pair; pass a labeled dataset.
    """
    return _PairTally(ds, params).profile(ds.y)


def attribute_factors(profile: ReinforcementProfile, attribute) -> tuple[FactorCell, FactorCell]:
    """Attribute-level (up, down) factors: pair-weighted means of the value-level cells."""
    return profile.aggregate(attribute, "up"), profile.aggregate(attribute, "down")
