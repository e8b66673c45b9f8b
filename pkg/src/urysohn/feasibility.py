"""Exact Fourier-Motzkin elimination for homogeneous systems ``A x <= 0``.

Strict inequalities are written with a shared slack variable placed last
(``a.x + eps <= 0``). Because the systems are homogeneous, the strict system
is feasible iff eliminating every other variable leaves only constraints
``c * eps <= 0`` with ``c <= 0``; a witness is then recovered with ``eps = 1``.
"""
from __future__ import annotations

import math
from fractions import Fraction
from typing import Sequence

Row = tuple[int, ...]


def _normalize(row: Sequence) -> Row | None:
    """Scale to coprime integers; ``None`` for the all-zero row."""
    fr = [Fraction(v) for v in row]
    den = math.lcm(1, *(v.denominator for v in fr))
    ints = [int(v * den) for v in fr]
    g = math.gcd(*ints)
    if g == 0:
        return None
    return tuple(v // g for v in ints)


def eliminate(rows: set[Row], var: int) -> set[Row]:
    """Project out ``var``; positive multipliers keep the direction of ``<= 0``."""
    pos = [r for r in rows if r[var] > 0]
    neg = [r for r in rows if r[var] < 0]
    out = {r for r in rows if r[var] == 0}
    for p in pos:
        for q in neg:
            a, b = p[var], -q[var]
            comb = _normalize([b * x + a * y for x, y in zip(p, q)])
            if comb is not None:
                out.add(comb)
    return out


def solve(rows: Sequence[Sequence], slack: int | None = None):
    """Decide ``rows . x <= 0`` with ``x[slack] > 0``.

    Variables other than ``slack`` are eliminated from the highest index
    down. Returns a rational witness (with ``x[slack] = 1``) or ``None``.
    With ``slack=None`` the trivial solution decides nothing, so a slack is
    required.
    """
    if slack is None:
        raise ValueError("homogeneous feasibility needs a slack variable")
    system = {r for r in (_normalize(r) for r in rows) if r is not None}
    nvar = len(next(iter(system))) if system else slack + 1
    order = [v for v in reversed(range(nvar)) if v != slack]
    stages: list[tuple[int, set[Row]]] = []
    for v in order:
        stages.append((v, system))
        system = eliminate(system, v)
    for r in system:
        if any(c != 0 for i, c in enumerate(r) if i != slack):
            raise AssertionError("elimination left a non-slack variable")
        if r[slack] > 0:
            return None
    x: list[Fraction | None] = [None] * nvar
    x[slack] = Fraction(1)
    for v, rows_v in reversed(stages):
        lo: Fraction | None = None
        hi: Fraction | None = None
        for r in rows_v:
            if r[v] == 0:
                continue
            rest = sum(
                (Fraction(c) * x[i] for i, c in enumerate(r) if i != v and c != 0),
                Fraction(0),
            )
            bound = -rest / r[v]
            if r[v] > 0:
                hi = bound if hi is None else min(hi, bound)
            else:
                lo = bound if lo is None else max(lo, bound)
        if lo is not None and hi is not None and lo > hi:
            raise AssertionError("back substitution found an empty interval")
        x[v] = lo if lo is not None else (hi if hi is not None and hi < 0 else Fraction(0))
    return x
