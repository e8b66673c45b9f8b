"""Finite distance sets: the similarity relation, the 4-values condition and
the enumeration of similarity classes of a given size.

Two increasing sets ``s`` and ``t`` of the same size are similar when
``s_i <= s_j + s_k`` and ``t_i <= t_j + t_k`` agree for every index triple.
"""
from __future__ import annotations

import bisect
import itertools
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from . import feasibility
from .core_metric import as_rat, rat_str


def as_distance_set(values: Iterable) -> tuple:
    """Sorted tuple of distinct positive rationals (ints stay ints)."""
    vals = [v if isinstance(v, int) else as_rat(v) for v in values]
    if any(v <= 0 for v in vals):
        raise ValueError("distance sets contain positive values only")
    out = tuple(sorted(set(vals)))
    if len(out) != len(vals):
        raise ValueError("repeated value in distance set")
    return out


Cube = tuple[tuple[tuple[bool, ...], ...], ...]


@dataclass(frozen=True)
class TrianglePattern:
    """Truth table ``bits[i][j][k] = (s_i <= s_j + s_k)`` of a distance set."""

    bits: Cube

    @property
    def size(self) -> int:
        return len(self.bits)

    def violations(self) -> list[str]:
        """Breaches of the symmetry and monotonicity forced by increasing sets."""
        b, m = self.bits, self.size
        out = []
        for i, j, k in itertools.product(range(m), repeat=3):
            if b[i][j][k] != b[i][k][j]:
                out.append(f"asymmetric at {(i, j, k)}")
            if b[i][j][k]:
                if i > 0 and not b[i - 1][j][k]:
                    out.append(f"not monotone in i at {(i, j, k)}")
                if j + 1 < m and not b[i][j + 1][k]:
                    out.append(f"not monotone in j at {(i, j, k)}")
            if i <= max(j, k) and not b[i][j][k]:
                out.append(f"forced bit false at {(i, j, k)}")
        return out

    def is_consistent(self) -> bool:
        return not self.violations()

    @property
    def thresholds(self) -> tuple[int, ...]:
        """For each pair ``j <= k`` the number of ``i`` with ``s_i <= s_j + s_k``."""
        m = self.size
        return tuple(
            sum(self.bits[i][j][k] for i in range(m)) for j, k in _pairs(m)
        )

    @classmethod
    def from_thresholds(cls, m: int, th: Sequence[int]) -> TrianglePattern:
        tab = dict(zip(_pairs(m), th))
        return cls(
            tuple(
                tuple(
                    tuple(i < tab[min(j, k), max(j, k)] for k in range(m))
                    for j in range(m)
                )
                for i in range(m)
            )
        )

    def key(self) -> str:
        """Flat bit string in ``i, j, k`` order."""
        return "".join("1" if b else "0" for plane in self.bits for row in plane for b in row)


def _pairs(m: int) -> list[tuple[int, int]]:
    return [(j, k) for j in range(m) for k in range(j, m)]


def pattern_of(S: Iterable) -> TrianglePattern:
    s = as_distance_set(S)
    m = len(s)
    return TrianglePattern(
        tuple(
            tuple(tuple(s[i] <= s[j] + s[k] for k in range(m)) for j in range(m))
            for i in range(m)
        )
    )


def _int_thresholds(s: Sequence[int]) -> tuple[int, ...]:
    m = len(s)
    return tuple(bisect.bisect_right(s, s[j] + s[k]) for j, k in _pairs(m))


def similar(S: Iterable, T: Iterable) -> bool:
    S, T = as_distance_set(S), as_distance_set(T)
    return len(S) == len(T) and pattern_of(S) == pattern_of(T)


def _admissible(a, b, c) -> bool:
    # c can be the third side of a triangle with sides a, b
    return abs(a - b) <= c <= a + b


def four_values_counterexample(S: Iterable) -> tuple | None:
    """First quadruple breaking the 4-values condition, or ``None``.

    Quadruples ``(s0, s1, s0', s1')`` are scanned in lexicographic order of
    values. The result is ``(s0, s1, s0', s1', t)`` with ``t`` the least
    common third side of the triangles ``(s0, s1)`` and ``(s0', s1')``, when
    no ``u`` in ``S`` closes both ``(s0, s0')`` and ``(s1, s1')``.
    """
    s = as_distance_set(S)
    n = len(s)
    if not n:
        return None
    den = math.lcm(*(v.denominator for v in s))
    v = np.array([int(x * den) for x in s], dtype=np.int64)
    a, b, c = np.ix_(v, v, v)
    # adm[i, j, t]: s[t] is a possible third side next to s[i] and s[j]
    adm = ((np.abs(a - b) <= c) & (c <= a + b)).reshape(n * n, n).astype(np.int32)
    share = (adm @ adm.T).reshape(n, n, n, n) > 0
    # share[i, j, k, l] is about pairs (i, j) and (k, l); closing needs (i, k) and (j, l)
    bad = share & ~share.transpose(0, 2, 1, 3)
    hits = np.argwhere(bad)
    if not len(hits):
        return None
    i, j, k, l = hits[0]
    t = int(np.flatnonzero(adm[i * n + j] & adm[k * n + l])[0])
    return (s[i], s[j], s[k], s[l], s[t])


def check_four_values(S: Iterable) -> bool:
    return four_values_counterexample(S) is None


def _system(p: TrianglePattern) -> list[list[int]]:
    """Rows ``r`` meaning ``r . (s_0..s_{m-1}, eps) <= 0``."""
    m = p.size
    rows = []

    def row(plus: Sequence[int], minus: Sequence[int], eps: int = 0) -> list[int]:
        r = [0] * (m + 1)
        for v in plus:
            r[v] += 1
        for v in minus:
            r[v] -= 1
        r[m] = eps
        return r

    rows.append(row([], [0], 1))  # s_0 >= eps
    for i in range(m - 1):
        rows.append(row([i], [i + 1], 1))  # s_i + eps <= s_{i+1}
    if p.is_consistent():
        # with an increasing chain only the last true / first false i matter
        for (j, k), t in zip(_pairs(m), p.thresholds):
            if t - 1 > k:
                rows.append(row([t - 1], [j, k]))
            if t < m:
                rows.append(row([j, k], [t], 1))
    else:
        for i, j, k in itertools.product(range(m), repeat=3):
            if p.bits[i][j][k]:
                rows.append(row([i], [j, k]))
            else:
                rows.append(row([j, k], [i], 1))
    return rows


def realize_pattern(p: TrianglePattern) -> tuple[int, ...] | None:
    """Integer increasing set with pattern ``p``, or ``None`` if none exists.

    Exact Fourier-Motzkin feasibility on the strict linear system of the
    pattern; the rational witness is scaled to integers.
    """
    m = p.size
    if m == 0:
        return ()
    x = feasibility.solve(_system(p), slack=m)
    if x is None:
        return None
    vals = x[:m]
    den = math.lcm(1, *(v.denominator for v in vals))
    ints = [int(v * den) for v in vals]
    g = math.gcd(*ints)
    ints = tuple(v // g for v in ints)
    if pattern_of(ints) != p:
        raise AssertionError(f"witness {ints} does not realize the pattern")
    return ints


def candidate_patterns(m: int) -> list[TrianglePattern]:
    """All threshold tables that are monotone in both pair coordinates."""
    pairs = _pairs(m)
    out: list[TrianglePattern] = []
    chosen: dict[tuple[int, int], int] = {}

    def rec(idx: int) -> None:
        if idx == len(pairs):
            out.append(TrianglePattern.from_thresholds(m, [chosen[p] for p in pairs]))
            return
        j, k = pairs[idx]
        lo = k + 1
        if j > 0:
            lo = max(lo, chosen[j - 1, k])
        if k > j:
            lo = max(lo, chosen[j, k - 1])
        for t in range(lo, m + 1):
            chosen[j, k] = t
            rec(idx + 1)
        chosen.pop((j, k), None)

    rec(0)
    return out


def increasing_tuples(m: int, max_value: int):
    """Increasing positive integer ``m``-tuples ordered by maximum, then lexicographically."""
    if m == 0:
        yield ()
        return
    for top in range(m, max_value + 1):
        for head in itertools.combinations(range(1, top), m - 1):
            yield head + (top,)


def canonical_representative(p: TrianglePattern, bound: int) -> tuple[int, ...] | None:
    """Least realization of ``p`` by (maximum, lexicographic) with values <= bound."""
    target = p.thresholds
    for s in increasing_tuples(p.size, bound):
        if _int_thresholds(s) == target:
            return s
    return None


@dataclass
class PatternClass:
    pattern_id: int
    pattern: TrianglePattern
    representative: tuple[int, ...]
    four_values: bool
    canonical: bool = True

    def to_json(self) -> dict:
        return {
            "pattern_id": self.pattern_id,
            "representative": list(self.representative),
            "four_values": self.four_values,
            "canonical": self.canonical,
            "bits": [[[int(b) for b in row] for row in plane] for plane in self.pattern.bits],
        }


@dataclass
class ClassificationReport:
    m: int
    classes: list[PatternClass] = field(default_factory=list)
    candidates: int = 0

    @property
    def total(self) -> int:
        return len(self.classes)

    @property
    def four_values_count(self) -> int:
        return sum(c.four_values for c in self.classes)

    def four_values_classes(self) -> list[PatternClass]:
        return [c for c in self.classes if c.four_values]

    def to_csv(self) -> str:
        lines = ["m,pattern_id,representative,four_values,canonical"]
        for c in self.classes:
            rep = " ".join(str(v) for v in c.representative)
            lines.append(
                f"{self.m},{c.pattern_id},{rep},{str(c.four_values).lower()},{str(c.canonical).lower()}"
            )
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        return json.dumps(
            {
                "m": self.m,
                "candidates": self.candidates,
                "total": self.total,
                "four_values": self.four_values_count,
                "classes": [c.to_json() for c in self.classes],
            },
            indent=1,
        )


def classify(m: int, workers: int = 1, canonical_bound: int = 200) -> ClassificationReport:
    """Every similarity class of ``m``-element distance sets.

    Candidates come from :func:`candidate_patterns`; each is kept iff
    :func:`realize_pattern` finds it feasible. Representatives are the least
    realizations by (maximum, lexicographic) order, searched up to the
    Fourier-Motzkin witness maximum (or ``canonical_bound`` if smaller).
    """
    if m < 1:
        raise ValueError("classify needs m >= 1")
    cands = candidate_patterns(m)
    if workers == 1:
        witnesses = [realize_pattern(p) for p in cands]
    else:
        with ProcessPoolExecutor(max_workers=workers or None) as ex:
            witnesses = list(ex.map(realize_pattern, cands, chunksize=16))
    feasible = {p.thresholds: (p, w) for p, w in zip(cands, witnesses) if w is not None}

    # one shared sweep finds the least realization of every feasible pattern
    found: dict[tuple[int, ...], tuple[int, ...]] = {}
    limit = min(max(max(w) for _, w in feasible.values()), canonical_bound)
    for s in increasing_tuples(m, limit):
        key = _int_thresholds(s)
        if key in feasible and key not in found:
            found[key] = s
            if len(found) == len(feasible):
                break

    rows = []
    for key, (p, w) in feasible.items():
        rep = found.get(key)
        rows.append((rep if rep is not None else w, p, rep is not None))
    rows.sort(key=lambda r: (max(r[0]), r[0]))
    report = ClassificationReport(m=m, candidates=len(cands))
    for pid, (rep, p, canon) in enumerate(rows):
        report.classes.append(PatternClass(pid, p, rep, check_four_values(rep), canon))
    return report


def format_set(S: Iterable) -> str:
    return "{" + ", ".join(rat_str(Fraction(v)) for v in S) + "}"
