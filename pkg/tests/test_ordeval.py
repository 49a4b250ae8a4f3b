import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import brute_neighbors, brute_profile
from ordsurvey.dataset import Scale, dataset_from_arrays
from ordsurvey.errors import TooFewRows
from ordsurvey.ordeval import (
    FactorCell,
    OrdEvalParams,
    ReinforcementProfile,
    attribute_factors,
    distance,
    nearest_neighbors,
    reinforcement_profile,
)

L5 = Scale(1, 5)


def test_distance_examples():
    assert distance((3, 4), (3, 4), (L5, L5)) == 0
    assert distance((1, 5), (5, 1), (L5, L5)) == 1
    assert distance((1, 3), (2, 5), (L5, L5)) == pytest.approx(0.375, abs=1e-15)


def test_distance_missing_and_symmetry():
    assert distance((None, 1), (2, 1), (L5, L5)) == 0.25
    assert distance((1, 3), (2, 5), (L5, Scale(1, 7))) == distance((2, 5), (1, 3), (L5, Scale(1, 7)))


def _ds(X, y, scale=L5, response_scale=L5):
    return dataset_from_arrays(X, y, scales=scale, response_scale=response_scale)


def test_nearest_neighbors_hand_table():
    # distances (in eighths): d01=3, d02=8, d03=1, d12=5, d13=2, d23=7
    ds = _ds([[1, 1], [2, 3], [5, 5], [1, 2]], [1, 1, 1, 1])
    assert nearest_neighbors(ds, 0, 3) == [3, 1, 2]
    assert nearest_neighbors(ds, 1, 3) == [3, 0, 2]
    assert nearest_neighbors(ds, 2, 3) == [1, 3, 0]
    assert nearest_neighbors(ds, 3, 3) == [0, 1, 2]


def test_nearest_neighbors_duplicate_first_and_ties():
    ds = _ds([[1], [2], [3], [2]], [1, 1, 1, 1])
    assert nearest_neighbors(ds, 1, 1) == [3]
    ds = _ds([[1], [2], [3]], [1, 1, 1])
    assert nearest_neighbors(ds, 1, 2) == [0, 2]


def test_nearest_neighbors_clamped():
    ds = _ds([[1], [4], [2]], [1, 1, 1])
    assert nearest_neighbors(ds, 0, 50) == [2, 1]


def test_profile_identity_response():
    X = [[v] for v in range(1, 6) for _ in range(2)]
    y = [v for v in range(1, 6) for _ in range(2)]
    prof = reinforcement_profile(_ds(X, y), OrdEvalParams(k=4))
    for j in range(1, 5):
        assert prof.up(0, j).probability == 1.0
    for j in range(2, 6):
        assert prof.down(0, j).probability == 1.0
    assert not prof.up(0, 5).defined
    assert not prof.down(0, 1).defined


def test_profile_constant_attribute():
    prof = reinforcement_profile(_ds([[3]] * 6, [1, 2, 3, 4, 5, 1]), OrdEvalParams(k=3))
    assert all(c.pair_count == 0 and not c.defined for *_, c in prof.cells())


def test_profile_too_few_rows():
    with pytest.raises(TooFewRows):
        reinforcement_profile(_ds([[1]], [1]))


def assert_matches_oracle(X, y, scales, k):
    ds = dataset_from_arrays(X, y, scales=scales, response_scale=L5)
    prof = reinforcement_profile(ds, OrdEvalParams(k=k))
    oracle = brute_profile(X, y, [(s.min, s.max) for s in scales], k)
    for (a, v, d), (succ, pairs) in oracle.items():
        cell = prof.cell(a, v, d)
        assert cell.pair_count == pairs
        if pairs == 0:
            assert cell.probability is None
        else:
            assert abs(cell.probability - succ / pairs) <= 1e-12


def test_profile_matches_oracle_6x2():
    X = [[1, 2], [2, 2], [3, 5], [4, 1], [5, 3], [2, 4]]
    y = [1, 3, 4, 2, 5, 3]
    assert_matches_oracle(X, y, [L5, L5], k=5)
    # the oracle also has to agree on neighbor order
    ds = _ds(X, y)
    spans = [4, 4]
    for i in range(6):
        assert nearest_neighbors(ds, i, 5) == brute_neighbors(X, spans, i, 5)


small_datasets = st.integers(2, 12).flatmap(
    lambda n: st.integers(1, 4).flatmap(
        lambda a: st.tuples(
            st.lists(st.lists(st.one_of(st.integers(1, 5), st.none()), min_size=a, max_size=a),
                     min_size=n, max_size=n),
            st.lists(st.integers(1, 5), min_size=n, max_size=n),
            st.integers(1, n - 1),
        )
    )
)


@settings(max_examples=150, deadline=None)
@given(small_datasets)
def test_profile_matches_oracle_random(data):
    X, y, k = data
    assert_matches_oracle(X, y, [L5] * len(X[0]), k)


@settings(max_examples=30, deadline=None)
@given(small_datasets, st.randoms(use_true_random=False))
def test_column_permutation(data, rnd):
    X, y, k = data
    a = len(X[0])
    order = list(range(a))
    rnd.shuffle(order)
    p1 = reinforcement_profile(_ds(X, y), OrdEvalParams(k))
    p2 = reinforcement_profile(_ds([[r[i] for i in order] for r in X], y), OrdEvalParams(k))
    for new, old in enumerate(order):
        for v in L5.values:
            for d in ("up", "down"):
                assert p2.cell(new, v, d) == p1.cell(old, v, d)


@settings(max_examples=40, deadline=None)
@given(small_datasets)
def test_factor_bounds_and_edges(data):
    X, y, k = data
    prof = reinforcement_profile(_ds(X, y), OrdEvalParams(k))
    for _, v, d, cell in prof.cells():
        assert cell.defined == (cell.pair_count > 0)
        if cell.defined:
            assert 0.0 <= cell.probability <= 1.0
    for a in range(len(X[0])):
        assert not prof.up(a, 5).defined
        assert not prof.down(a, 1).defined


@pytest.mark.parametrize("reverse", [False, True])
def test_monotone_extremes_with_constant_column(reverse):
    rng = np.random.default_rng(1)
    A = rng.integers(1, 6, size=40)
    C = 6 - A if reverse else A
    X = np.column_stack([A, np.full(40, 3)])
    prof = reinforcement_profile(_ds(X, C), OrdEvalParams(k=10))
    expected = 0.0 if reverse else 1.0
    defined = [c.probability for name, v, d, c in prof.cells() if c.defined]
    assert defined and all(p == expected for p in defined)


def test_profile_deterministic():
    rng = np.random.default_rng(5)
    X = rng.integers(1, 6, size=(30, 3))
    y = rng.integers(1, 6, size=30)
    assert reinforcement_profile(_ds(X, y)) == reinforcement_profile(_ds(X, y))


def test_missing_values_skip_only_that_attribute():
    X = [[1, 1], [2, None], [3, 3]]
    y = [1, 2, 3]
    assert_matches_oracle(X, y, [L5, L5], k=2)
    prof = reinforcement_profile(_ds(X, y), OrdEvalParams(k=2))
    assert prof.up(0, 1).pair_count == 2
    assert prof.up(1, 1).pair_count == 1


def _profile_from_cells(up_succ, up_pairs):
    z = np.zeros(5)
    return ReinforcementProfile(("a",), (L5,), 1, (np.array(up_pairs, float),),
                                (np.array(up_succ, float),), (z,), (z,))


def test_attribute_factors_weighted_mean():
    prof = _profile_from_cells([2, 0, 0, 0, 0], [2, 2, 0, 0, 0])
    up, down = attribute_factors(prof, "a")
    assert up == FactorCell(0.5, 4.0)
    assert down == FactorCell(None, 0.0)


def test_attribute_factors_single_cell():
    prof = _profile_from_cells([0, 0, 3, 0, 0], [0, 0, 4, 0, 0])
    assert attribute_factors(prof, "a")[0].probability == prof.up("a", 3).probability == 0.75
