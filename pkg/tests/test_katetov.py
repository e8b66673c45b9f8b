import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from urysohn.core_metric import FiniteMetricSpace, random_metric_space, restrict, validate
from urysohn.katetov import KatetovMap, claim_map, enumerate_katetov, extend, is_katetov
from conftest import grid_spaces

F = Fraction


def pair(d):
    return FiniteMetricSpace([[0, d], [d, 0]])


def product_filter(X, S):
    return [f for f in itertools.product(sorted(S), repeat=X.n) if is_katetov(X, f)]


def test_is_katetov_examples():
    assert is_katetov(FiniteMetricSpace.single_point(), [F(1, 3)])
    assert not is_katetov(pair(F(1)), [F(1, 3), F(1, 3)])
    assert is_katetov(pair(F(1, 2)), [F(1, 2), F(1)])
    assert not is_katetov(pair(F(1, 2)), [0, F(1, 2)])
    with pytest.raises(ValueError):
        is_katetov(pair(F(1)), [F(1)])


def test_extend_examples():
    Y = extend(FiniteMetricSpace.single_point(), [F(1, 3)])
    assert Y == pair(F(1, 3))
    X = pair(F(1, 2))
    Z = extend(X, [F(1, 2), F(1, 2)])
    assert validate(Z) == [] and restrict(Z, [0, 1]) == X
    with pytest.raises(ValueError):
        extend(pair(F(1)), [F(1, 3), F(1, 3)])
    with pytest.raises(ValueError):
        KatetovMap(pair(F(1)), (F(1, 3), F(1, 3)))


def test_enumerate_examples():
    S = [F(1, 2), F(1)]
    assert [f.values for f in enumerate_katetov(FiniteMetricSpace.single_point(), S)] == [(F(1, 2),), (F(1),)]
    thirds = [F(1, 3), F(2, 3), F(1)]
    maps = enumerate_katetov(pair(F(1)), thirds)
    # product-filter oracle: every pair except (1/3, 1/3) survives
    assert len(maps) == 8
    assert [f.values for f in maps] == product_filter(pair(F(1)), thirds)
    assert [f.values for f in enumerate_katetov(pair(F(1, 2)), [F(1, 2)])] == [(F(1, 2), F(1, 2))]


def all_grid_spaces(n, m):
    vals = [F(k, m) for k in range(1, m + 1)]
    pairs = list(itertools.combinations(range(n), 2))
    for choice in itertools.product(vals, repeat=len(pairs)):
        d = [[F(0)] * n for _ in range(n)]
        for (i, j), v in zip(pairs, choice):
            d[i][j] = d[j][i] = v
        X = FiniteMetricSpace(d)
        if not validate(X):
            yield X


@pytest.mark.parametrize("m", [1, 2, 3])
def test_enumerate_matches_oracle_exhaustively(m):
    S = [F(k, m) for k in range(1, m + 1)]
    for n in range(1, 5):
        for X in all_grid_spaces(n, m):
            maps = enumerate_katetov(X, S)
            assert [f.values for f in maps] == product_filter(X, S)
            for f in maps:
                assert validate(extend(X, f)) == []


def test_claim_map_examples():
    amb = pair(F(3, 10))
    f = claim_map(amb, [0], 1, 2)
    assert f.values == (F(1, 2), F(1, 5))
    q = F(1, 4)
    amb = FiniteMetricSpace([[0, F(1, 2), q], [F(1, 2), 0, q], [q, q, 0]])
    f = claim_map(amb, [0, 1], 2, 2)
    assert f.values == (F(1, 2), F(1, 2), F(1, 4))
    # grid-aligned: no map, y itself realizes the rounded profile
    assert claim_map(pair(F(1, 2)), [0], 1, 2) is None


def test_claim_map_preconditions():
    amb = FiniteMetricSpace([[0, F(1, 3), F(1, 2)], [F(1, 3), 0, F(1, 2)], [F(1, 2), F(1, 2), 0]])
    with pytest.raises(ValueError):
        claim_map(amb, [0, 1], 2, 2)
    with pytest.raises(ValueError):
        claim_map(amb, [0], 0, 2)
    with pytest.raises(ValueError):
        claim_map(amb, [], 0, 2)


def random_claim_instance(rng, m):
    """A space whose first points are grid-valued, plus one rational outsider."""
    k = rng.randint(1, 4)
    X = random_metric_space(k, [F(i, m) for i in range(1, m + 1)], rng)
    den = rng.choice([7, 10, 12, 30, 60])
    for _ in range(200):
        row = [F(rng.randint(1, den), den) for _ in range(k)]
        if is_katetov(X, row):
            return extend(X, row), k
    return None


@settings(max_examples=300, deadline=None)
@given(st.integers(1, 5), st.integers(0, 10**9))
def test_claim_map_always_katetov(m, seed):
    inst = random_claim_instance(random.Random(seed), m)
    if inst is None:
        return
    amb, k = inst
    f = claim_map(amb, list(range(k)), k, m)
    if f is not None:
        assert is_katetov(f.base, f.values)
        assert 0 < f.values[-1] < F(1, m)
