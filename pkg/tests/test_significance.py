from fractions import Fraction
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ordsurvey.dataset import Scale, dataset_from_arrays, generate_synthetic, SyntheticSpec
from ordsurvey.errors import InputError
from ordsurvey.ordeval import OrdEvalParams, ReinforcementProfile, _PairTally, reinforcement_profile
from ordsurvey.significance import (
    ConfidenceBox,
    MismatchedShapes,
    NullCell,
    NullDistribution,
    SignificanceParams,
    confidence_box,
    null_distribution,
    significance_flags,
)

L5 = Scale(1, 5)


def test_params_bounds():
    with pytest.raises(InputError):
        SignificanceParams(B=19)
    with pytest.raises(InputError):
        SignificanceParams(alpha=0.5)
    with pytest.raises(InputError):
        SignificanceParams(alpha=0.0)


def test_degenerate_box():
    box = confidence_box([0.5] * 50, 0.05)
    assert box == ConfidenceBox(0.5, 0.5, 0.5, 0.5, 0.5, 50)


def _rank_oracle(m, p):
    return max(1, math.ceil(Fraction(p) * m))


def test_percentile_rule_hundred_samples():
    samples = [i / 100 for i in range(1, 101)]
    rng = np.random.default_rng(0)
    box = confidence_box(rng.permutation(samples), 0.05)
    # nearest rank: ceil(0.025 * 100) = 3rd and ceil(0.975 * 100) = 98th order statistic
    assert _rank_oracle(100, Fraction(1, 40)) == 3
    assert _rank_oracle(100, Fraction(39, 40)) == 98
    assert box.whisker_low == samples[2] == 0.03
    assert box.whisker_high == samples[97] == 0.98
    assert (box.q1, box.median, box.q3) == (0.25, 0.5, 0.75)


def test_box_ignores_undefined_samples():
    box = confidence_box([np.nan, 0.2, np.nan, 0.4], 0.05)
    assert box.sample_count == 2
    assert confidence_box([np.nan, np.nan], 0.05) is None


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(0, 1), min_size=1, max_size=300), st.floats(0.001, 0.499))
def test_box_ordering(samples, alpha):
    b = confidence_box(samples, alpha)
    assert b.whisker_low <= b.q1 <= b.median <= b.q3 <= b.whisker_high
    s = sorted(samples)
    assert b.whisker_high == s[max(1, math.ceil(round((1 - alpha / 2) * len(s), 9))) - 1]


@pytest.fixture(scope="module")
def small_ds():
    spec = SyntheticSpec(60, ("performance", "basic", "noise"), (None, 3, None), 0.1)
    return generate_synthetic(spec, 11)


def test_null_deterministic(small_ds):
    sp = SignificanceParams(B=30, seed=4)
    a = null_distribution(small_ds, OrdEvalParams(8), sp)
    b = null_distribution(small_ds, OrdEvalParams(8), sp)
    assert a == b
    c = null_distribution(small_ds, OrdEvalParams(8), SignificanceParams(B=30, seed=5))
    assert a != c


def test_null_cells_complete(small_ds):
    nd = null_distribution(small_ds, OrdEvalParams(8), SignificanceParams(B=25, seed=1))
    for name in small_ds.attribute_names:
        for d in ("up", "down"):
            assert len(nd.aggregate(name, d).samples) == 25
            for v in L5.values:
                assert len(nd.cell(name, v, d).samples) == 25
        assert not nd.cell(name, 5, "up").assessable
        assert nd.cell(name, 5, "up").box is None


def test_identity_permutation_reproduces_profile(small_ds):
    tally = _PairTally(small_ds, OrdEvalParams(8))
    ident = np.arange(small_ds.n)
    assert tally.profile(small_ds.y[ident]) == reinforcement_profile(small_ds, OrdEvalParams(8))


def test_permutation_only_moves_labeled_responses():
    ds = dataset_from_arrays([[1], [2], [3], [4], [5]] * 5, [1, 2, 3, 4, 5] * 5)
    nd = null_distribution(ds, OrdEvalParams(4), SignificanceParams(B=20, seed=0))
    assert all(np.isnan(c.samples).sum() in (0, 20) for key, c in nd.cells.items())


def _one_cell_fixture(observed: float | None, whisker_high: float, defined_samples: int = 20):
    up_pairs = np.zeros(5)
    up_succ = np.zeros(5)
    if observed is not None:
        up_pairs[2] = 100
        up_succ[2] = observed * 100
    z = np.zeros(5)
    prof = ReinforcementProfile(("a",), (L5,), 1, (up_pairs,), (up_succ,), (z,), (z,))
    box = ConfidenceBox(0.3, 0.4, 0.5, 0.2, whisker_high, defined_samples)
    samples = np.array([0.4] * defined_samples + [np.nan] * (20 - defined_samples))
    empty = NullCell(np.full(20, np.nan), None)
    cells = {("a", v, d): empty for v in list(L5.values) + [None] for d in ("up", "down")}
    cells[("a", 3, "up")] = NullCell(samples, box)
    nd = NullDistribution(("a",), (L5,), 1, SignificanceParams(B=20), cells)
    return prof, nd


@pytest.mark.parametrize("observed, whisker, expected", [
    (0.9, 0.7, True),
    (0.7, 0.7, False),
    (None, 0.7, False),
])
def test_flag_rule(observed, whisker, expected):
    prof, nd = _one_cell_fixture(observed, whisker)
    assert significance_flags(prof, nd)[("a", 3, "up")] is expected


def test_unassessable_cell_never_significant():
    prof, nd = _one_cell_fixture(0.9, 0.7, defined_samples=10)
    assert not nd.cell("a", 3, "up").assessable
    assert significance_flags(prof, nd)[("a", 3, "up")] is False
    prof, nd = _one_cell_fixture(0.9, 0.7, defined_samples=11)
    assert significance_flags(prof, nd)[("a", 3, "up")] is True


def test_mismatched_shapes(small_ds):
    nd = null_distribution(small_ds, OrdEvalParams(8), SignificanceParams(B=20))
    other = dataset_from_arrays([[1], [2], [3]], [1, 2, 3])
    with pytest.raises(MismatchedShapes):
        significance_flags(reinforcement_profile(other), nd)


def test_strong_attribute_is_flagged():
    X = [[v] for v in range(1, 6) for _ in range(8)]
    y = [v for v in range(1, 6) for _ in range(8)]
    ds = dataset_from_arrays(X, y)
    prof = reinforcement_profile(ds, OrdEvalParams(10))
    flags = significance_flags(prof, null_distribution(ds, OrdEvalParams(10), SignificanceParams(B=50)))
    assert flags[("a1", None, "up")] and flags[("a1", None, "down")]
