import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from urysohn.builder import build_approx
from urysohn.core_metric import FiniteMetricSpace, find_embeddings, is_metric, random_metric_space, restrict
from urysohn.ramsey import (
    Coloring, EmbeddingWitness, epsilon_components, experiment, fattening, find_mono_copy,
    greedy_coloring, lambda_, lambda_curve, lambda_eps, parity_coloring, random_coloring,
    report_csv, success_rates, verify_witness,
)

F = Fraction
S2 = [F(1, 2), F(1)]
S3 = [F(1, 3), F(2, 3), F(1)]


def line(n, step):
    return FiniteMetricSpace.from_function(n, lambda i, j: abs(i - j) * step)


def triangles(vals):
    out = []
    for a, b, c in itertools.combinations_with_replacement(vals, 3):
        T = FiniteMetricSpace([[0, a, b], [a, 0, c], [b, c, 0]])
        if is_metric(T):
            out.append(T)
    return out


def test_components_examples():
    X = random_metric_space(6, S3, random.Random(2))
    assert epsilon_components(X, X.diameter()) == [list(range(6))]
    assert epsilon_components(X, F(1, 4)) == [[i] for i in range(6)]
    assert epsilon_components(line(4, F(1, 5)), F(1, 5)) == [[0, 1, 2, 3]]
    with pytest.raises(ValueError):
        epsilon_components(X, 0)


def test_lambda_examples():
    X = random_metric_space(5, S3, random.Random(1))
    assert lambda_eps(X, 0, F(1, 9)) == 0
    assert lambda_eps(line(5, F(1, 4)), 2, F(1, 4)) == 1
    q = F(1, 8)
    # two clusters of diameter 1/4 at distance 1 from each other
    d = [[0, q, 2 * q, 1, 1], [q, 0, q, 1, 1], [2 * q, q, 0, 1, 1], [1, 1, 1, 0, q], [1, 1, 1, q, 0]]
    assert lambda_eps(FiniteMetricSpace(d), 0, F(1, 2)) == F(1, 4)
    assert lambda_(X, 0, [X.diameter()]) == X.diameter()
    with pytest.raises(ValueError):
        lambda_(X, 0, [])


def test_lambda_vanishes_below_min_gap():
    A = build_approx([F(k, 32) for k in range(1, 33)], rounds=1, budget=1).space
    grid = [F(1, 2**j) for j in range(7)]
    assert lambda_(A, 0, grid) == 0
    curve = [v for _, v in lambda_curve(A, 0, grid)]
    assert curve == [1, 1, F(1, 2), F(1, 4), F(1, 16), F(1, 32), 0]


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 7), st.integers(0, 10**6), st.integers(1, 12), st.integers(1, 12))
def test_lambda_monotone_in_eps(n, seed, a, b):
    X = random_metric_space(n, [F(k, 12) for k in range(1, 13)], random.Random(seed))
    lo, hi = sorted((F(a, 12), F(b, 12)))
    for x in range(n):
        assert lambda_eps(X, x, lo) <= lambda_eps(X, x, hi)


def test_colorings():
    assert parity_coloring(5).colors == (0, 1, 0, 1, 0)
    assert random_coloring(20, 3, 4) == random_coloring(20, 3, 4)
    with pytest.raises(ValueError):
        Coloring((0, 2), 2)


@pytest.fixture(scope="module")
def s2_space():
    return build_approx(S2, rounds=6, budget=2).space


def test_mono_copy_examples(s2_space):
    X = s2_space
    T = restrict(X, [0, 1, 2])
    chi = parity_coloring(X.n)
    w = find_mono_copy(X, chi, T, 0)
    # frozen after a brute-force scan of both parity classes
    assert w == EmbeddingWitness(0, (0, 4, 2), F(0))
    assert verify_witness(X, chi, T, w)
    one = Coloring((0,) * X.n, 1)
    assert find_mono_copy(X, one, T, 0).image == find_embeddings(T, X, limit=1)[0]
    pt = FiniteMetricSpace.single_point()
    chi = Coloring(tuple(1 if p < 10 else 0 for p in range(X.n)), 2)
    assert find_mono_copy(X, chi, pt, 0).color == 0


def test_fattening_monotone(s2_space):
    X = s2_space
    T = restrict(X, [0, 3, 5])
    for seed in range(10):
        chi = random_coloring(X.n, 3, seed)
        hit = False
        for eps in (0, F(1, 2), 1):
            w = find_mono_copy(X, chi, T, eps)
            if hit:
                assert w is not None
            hit = w is not None
            if w:
                assert verify_witness(X, chi, T, w)
        assert find_mono_copy(X, chi, T, 1) is not None
    assert fattening(X, [0], 0) == [0]


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6), st.integers(0, 2))
def test_k1_agrees_with_find_embeddings(seed, t):
    X = random_metric_space(9, S3, random.Random(seed))
    T = restrict(X, list(range(t + 1)))
    w = find_mono_copy(X, Coloring((0,) * X.n, 1), T, 0)
    assert w.image == find_embeddings(T, X, limit=1)[0]


def test_tampered_witness_fails(s2_space):
    X = s2_space
    T = restrict(X, [0, 1, 2])
    chi = parity_coloring(X.n)
    assert not verify_witness(X, chi, T, EmbeddingWitness(0, (0, 1, 2), F(0)))
    assert not verify_witness(X, chi, T, EmbeddingWitness(0, (0, 4), F(0)))


def test_greedy_coloring_is_deterministic(s2_space):
    T = triangles(S2)
    assert greedy_coloring(s2_space, 2, T) == greedy_coloring(s2_space, 2, T)


def test_experiment_golden_thirds():
    X = build_approx(S3, rounds=2, budget=2).space
    targets = triangles(S3)
    assert len(targets) == 9
    rows = experiment(X, targets, 0, 2, range(100))
    rates = success_rates(rows)
    for key, rate in rates.items():
        expect = F(97, 100) if key[0] == "random" and key[1] in (0, 8) else 1
        assert rate == expect, key
    again = experiment(X, targets, 0, 2, range(100))
    assert report_csv(rows) == report_csv(again)
    assert report_csv(rows).splitlines()[0] == "seed,coloring_kind,k,eps,target_id,found,color,witness_size,millis"


def test_experiment_whole_space_fattening():
    X = build_approx(S3, rounds=2, budget=2).space
    rows = experiment(X, triangles(S3), 1, 3, range(5), kinds=("random",))
    assert all(r.found for r in rows)
