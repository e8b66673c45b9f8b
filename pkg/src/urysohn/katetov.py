"""Katetov maps: one-point extension profiles over finite metric spaces."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .core_metric import FiniteMetricSpace, as_rat, restrict
from .discretize import ceil_m, on_grid


@dataclass(frozen=True)
class KatetovMap:
    base: FiniteMetricSpace
    values: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(as_rat(v) for v in self.values))
        if not is_katetov(self.base, self.values):
            raise ValueError(f"not a Katetov map: {self.values}")

    def __iter__(self):
        return iter(self.values)

    def __len__(self) -> int:
        return len(self.values)


def is_katetov(X: FiniteMetricSpace, f: Sequence) -> bool:
    """|f(x) - f(y)| <= d(x, y) <= f(x) + f(y) for all pairs, and f > 0."""
    if len(f) != X.n:
        raise ValueError(f"profile has {len(f)} values for {X.n} points")
    f = [as_rat(v) for v in f]
    if any(v <= 0 for v in f):
        return False
    d = X.d
    for i in range(X.n):
        for j in range(i + 1, X.n):
            if not abs(f[i] - f[j]) <= d[i][j] <= f[i] + f[j]:
                return False
    return True


def extend(X: FiniteMetricSpace, f: KatetovMap | Sequence) -> FiniteMetricSpace:
    """``X`` with one new last point realizing ``f``."""
    values = f.values if isinstance(f, KatetovMap) else tuple(as_rat(v) for v in f)
    if not is_katetov(X, values):
        raise ValueError("extend: profile is not Katetov over the space")
    rows = [list(row) + [values[i]] for i, row in enumerate(X.d)]
    rows.append(list(values) + [Fraction(0)])
    return FiniteMetricSpace(rows)


def enumerate_katetov(X: FiniteMetricSpace, S: Sequence) -> list[KatetovMap]:
    """Every Katetov map over ``X`` with values in ``S``, lexicographically.

    Backtracking over points in order, pruning on pairs already fixed; the
    output equals filtering the full product ``S^n`` by :func:`is_katetov`.
    """
    vals = sorted(set(as_rat(v) for v in S))
    vals = [v for v in vals if v > 0]
    d, n = X.d, X.n
    out: list[KatetovMap] = []
    prefix: list[Fraction] = []

    def rec(i: int) -> None:
        if i == n:
            out.append(KatetovMap(X, tuple(prefix)))
            return
        for v in vals:
            if all(abs(v - prefix[j]) <= d[i][j] <= v + prefix[j] for j in range(i)):
                prefix.append(v)
                rec(i + 1)
                prefix.pop()

    rec(0)
    return out


def claim_map(
    ambient: FiniteMetricSpace, X: Sequence[int], y: int, m: int
) -> KatetovMap | None:
    """Round the distances from ``y`` to the grid-valued set ``X`` upward.

    Returns the map over ``restrict(ambient, X + [y])`` (``y`` last) giving
    each ``x`` the value ``ceil_m(d(x, y))`` and ``y`` the largest rounding
    gap. The map is re-checked with :func:`is_katetov` before it is returned.

    Returns ``None`` when every ``d(x, y)`` is already on the grid. The gap
    would be 0, which is not an admissible Katetov value; ``y`` itself then
    realizes the rounded profile over ``X``.
    """
    X = list(X)
    if y in X:
        raise ValueError("claim_map: y must not belong to X")
    if not X:
        raise ValueError("claim_map: X must be nonempty")
    for a in range(len(X)):
        for b in range(a + 1, len(X)):
            if not on_grid(ambient.d[X[a]][X[b]], m):
                raise ValueError(
                    f"claim_map: d({X[a]}, {X[b]}) = {ambient.d[X[a]][X[b]]} is off the grid 1/{m}"
                )
    dy = [ambient.d[x][y] for x in X]
    rounded = [ceil_m(v, m) for v in dy]
    gap = max(r - v for r, v in zip(rounded, dy))
    if gap == 0:
        return None
    base = restrict(ambient, X + [y])
    values = tuple(rounded) + (gap,)
    if not is_katetov(base, values):
        raise AssertionError(f"claim map is not Katetov: {values}")
    return KatetovMap(base, values)
