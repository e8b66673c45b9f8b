"""Exact-rational finite metric spaces, isometries and embedding search."""
from __future__ import annotations

import itertools
import math
import random
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

Rat = Fraction

ZERO = Fraction(0)
ONE = Fraction(1)


def as_rat(value) -> Fraction:
    """Coerce ints, Fractions and ``"p/q"`` strings. Floats are refused."""
    if isinstance(value, float):
        raise TypeError(f"floating point distance {value!r}; use an exact rational")
    if isinstance(value, str):
        value = value.strip()
        if not value or any(c in value for c in ".eE"):
            raise ValueError(f"not a rational literal: {value!r}")
    return Fraction(value)


def rat_str(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}" if q.denominator != 1 else str(q.numerator)


def grid(m: int) -> tuple[Fraction, ...]:
    """The grid {0, 1/m, ..., 1}."""
    if m < 1:
        raise ValueError("grid order must be positive")
    return tuple(Fraction(k, m) for k in range(m + 1))


def positive_grid(m: int) -> tuple[Fraction, ...]:
    return grid(m)[1:]


@dataclass(frozen=True)
class FiniteMetricSpace:
    """Points ``0..n-1`` with a square matrix of rational distances in [0, 1].

    Construction only checks shape and range; metric axioms are reported by
    :func:`validate`, so non-metric matrices can still be represented.
    """

    d: tuple[tuple[Fraction, ...], ...]

    def __init__(self, d: Iterable[Iterable]):
        rows = tuple(tuple(as_rat(v) for v in row) for row in d)
        n = len(rows)
        for row in rows:
            if len(row) != n:
                raise ValueError("distance matrix must be square")
            for v in row:
                if v < 0 or v > 1:
                    raise ValueError(f"distance {v} outside [0, 1]")
        object.__setattr__(self, "d", rows)

    @property
    def n(self) -> int:
        return len(self.d)

    def __len__(self) -> int:
        return len(self.d)

    def __call__(self, i: int, j: int) -> Fraction:
        return self.d[i][j]

    @classmethod
    def single_point(cls) -> FiniteMetricSpace:
        return cls([[0]])

    @classmethod
    def from_function(cls, n: int, dist) -> FiniteMetricSpace:
        return cls([[dist(i, j) if i != j else 0 for j in range(n)] for i in range(n)])

    def distances(self) -> set[Fraction]:
        """Set of distances between distinct points."""
        return {self.d[i][j] for i in range(self.n) for j in range(i + 1, self.n)}

    def diameter(self) -> Fraction:
        return max(self.distances(), default=ZERO)

    def min_distance(self) -> Fraction | None:
        return min(self.distances(), default=None)

    @cached_property
    def denominator(self) -> int:
        return math.lcm(1, *(v.denominator for row in self.d for v in row))

    @cached_property
    def scaled(self) -> np.ndarray:
        """Integer matrix ``D * d`` with ``D = self.denominator``; exact."""
        den = self.denominator
        return np.array(
            [[v.numerator * (den // v.denominator) for v in row] for row in self.d],
            dtype=np.int64,
        ).reshape(self.n, self.n)

    @cached_property
    def row_profiles(self) -> tuple[tuple[Fraction, ...], ...]:
        """Sorted distance row of each point (the multiset used for pruning)."""
        return tuple(tuple(sorted(row)) for row in self.d)

    def __hash__(self) -> int:
        return hash(self.d)

    def __eq__(self, other) -> bool:
        return isinstance(other, FiniteMetricSpace) and self.d == other.d

    def __repr__(self) -> str:
        return f"FiniteMetricSpace(n={self.n}, d={[[rat_str(v) for v in r] for r in self.d]})"


@dataclass(frozen=True)
class Violation:
    kind: str  # "diagonal" | "symmetry" | "positivity" | "triangle"
    points: tuple[int, ...]

    def __str__(self) -> str:
        return f"{self.kind}{self.points}"


def validate(X: FiniteMetricSpace) -> list[Violation]:
    """All violations of the metric axioms, in a fixed scan order.

    Triangle violations are reported once per unordered triple as
    ``(i, j, k)`` with ``i < k`` when ``d(i, k) > d(i, j) + d(j, k)``.
    """
    d, n = X.d, X.n
    out: list[Violation] = []
    for i in range(n):
        if d[i][i] != 0:
            out.append(Violation("diagonal", (i,)))
    for i in range(n):
        for j in range(i + 1, n):
            if d[i][j] != d[j][i]:
                out.append(Violation("symmetry", (i, j)))
            if d[i][j] <= 0 or d[j][i] <= 0:
                out.append(Violation("positivity", (i, j)))
    if out:
        return out
    for i, j, k in itertools.combinations(range(n), 3):
        # each side against the sum of the other two
        if d[i][k] > d[i][j] + d[j][k]:
            out.append(Violation("triangle", (i, j, k)))
        elif d[i][j] > d[i][k] + d[k][j]:
            out.append(Violation("triangle", (i, k, j)))
        elif d[j][k] > d[j][i] + d[i][k]:
            out.append(Violation("triangle", (j, i, k)))
    return out


def is_metric(X: FiniteMetricSpace) -> bool:
    return not validate(X)


def restrict(X: FiniteMetricSpace, idx: Sequence[int]) -> FiniteMetricSpace:
    idx = list(idx)
    if len(set(idx)) != len(idx):
        raise ValueError("restrict: repeated index")
    for i in idx:
        if not 0 <= i < X.n:
            raise IndexError(f"restrict: index {i} out of range for {X.n} points")
    return FiniteMetricSpace([[X.d[i][j] for j in idx] for i in idx])


def is_isometry(A: FiniteMetricSpace, B: FiniteMetricSpace, mapping: Sequence[int]) -> bool:
    if len(mapping) != A.n or len(set(mapping)) != len(mapping):
        return False
    if any(not 0 <= b < B.n for b in mapping):
        return False
    return all(
        B.d[mapping[i]][mapping[j]] == A.d[i][j]
        for i in range(A.n)
        for j in range(i + 1, A.n)
    )


def _submultiset(small: Sequence, big: Sequence) -> bool:
    need = Counter(small)
    have = Counter(big)
    return all(have[v] >= c for v, c in need.items())


def find_embeddings(
    A: FiniteMetricSpace, B: FiniteMetricSpace, limit: int | None = None
) -> list[tuple[int, ...]]:
    """Isometric embeddings of ``A`` into ``B`` in lexicographic order.

    A point ``a`` may only go to ``b`` when the distance row of ``a`` is a
    sub-multiset of the row of ``b``; the rest is plain backtracking.
    """
    if limit is not None and limit <= 0:
        return []
    if A.n == 0:
        return [()]
    if A.n > B.n:
        return []
    candidates = [
        [b for b in range(B.n) if _submultiset(A.row_profiles[a], B.row_profiles[b])]
        for a in range(A.n)
    ]
    out: list[tuple[int, ...]] = []
    image: list[int] = []
    used: set[int] = set()
    Ad, Bd = A.d, B.d

    def extend(a: int) -> bool:
        if a == A.n:
            out.append(tuple(image))
            return limit is not None and len(out) >= limit
        for b in candidates[a]:
            if b in used:
                continue
            if all(Bd[image[i]][b] == Ad[i][a] for i in range(a)):
                image.append(b)
                used.add(b)
                stop = extend(a + 1)
                image.pop()
                used.discard(b)
                if stop:
                    return True
        return False

    extend(0)
    return out


def embeds(A: FiniteMetricSpace, B: FiniteMetricSpace) -> bool:
    return bool(find_embeddings(A, B, limit=1))


def random_metric_space(
    n: int, values: Sequence[Fraction], rng: random.Random | None = None
) -> FiniteMetricSpace:
    """Random metric space with distances from ``values``.

    Points are added one at a time; each new distance is drawn uniformly from
    the values compatible with every triangle already fixed. If some point
    gets stuck the whole point is redrawn.
    """
    rng = rng or random.Random(0)
    vals = sorted(set(as_rat(v) for v in values if as_rat(v) > 0))
    if not vals:
        raise ValueError("need at least one positive value")
    d = [[ZERO]]
    while len(d) < n:
        for _ in range(1000):
            row: list[Fraction] = []
            for j in range(len(d)):
                lo = max((abs(row[w] - d[w][j]) for w in range(j)), default=ZERO)
                hi = min((row[w] + d[w][j] for w in range(j)), default=ONE)
                ok = [v for v in vals if lo <= v <= hi]
                if not ok:
                    break
                row.append(rng.choice(ok))
            else:
                break
        else:
            raise RuntimeError("could not extend random metric space")
        for j, v in enumerate(row):
            d[j].append(v)
        d.append(row + [ZERO])
    return FiniteMetricSpace(d[:n] if n else [])
