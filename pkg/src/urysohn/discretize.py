"""Rounding distances onto the grid [0,1]_m.

Three devices live here: the ceiling map and the metric it induces, the
collapse map from the fine grid of order ``2(m^2+m)`` onto the grid of order
``m``, and the back-and-forth construction of a grid-valued copy that is
``1/m``-dense in a rational ambient space.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .core_metric import FiniteMetricSpace, as_rat, rat_str, validate


def on_grid(a, m: int) -> bool:
    a = as_rat(a)
    return 0 <= a <= 1 and (a * m).denominator == 1


def ceil_m(a, m: int) -> Fraction:
    """Least grid value ``k/m`` that is ``>= a``."""
    a = as_rat(a)
    if m < 1:
        raise ValueError("grid order must be positive")
    if not 0 <= a <= 1:
        raise ValueError(f"ceil_m: {a} outside [0, 1]")
    return Fraction(math.ceil(a * m), m)


def ceil_metric(X: FiniteMetricSpace, m: int) -> FiniteMetricSpace:
    """Round every distance of ``X`` up to the grid of order ``m``."""
    out = FiniteMetricSpace([[ceil_m(v, m) for v in row] for row in X.d])
    bad = validate(out)
    if bad and not validate(X):
        raise AssertionError(f"ceiling metric is not a metric: {bad[0]}")
    return out


def fine_order(m: int) -> int:
    """Order ``2(m^2 + m)`` of the fine grid collapsed by :func:`collapse_value`."""
    return 2 * (m * m + m)


def collapse_value(x, m: int) -> Fraction:
    """Collapse a fine-grid value onto the grid of order ``m``.

    Returns ``l/m`` for the least integer ``l`` with
    ``x <= l * (1/m + 1/(m^2+m))``. Only values on the fine grid are accepted.
    """
    x = as_rat(x)
    if m < 1:
        raise ValueError("grid order must be positive")
    if not on_grid(x, fine_order(m)):
        raise ValueError(f"collapse_value: {x} is not on the grid 1/{fine_order(m)}")
    step = Fraction(1, m) + Fraction(1, m * m + m)
    return Fraction(math.ceil(x / step), m)


def collapse_decomposition(x, m: int) -> tuple[int, int]:
    """Write a positive fine-grid ``x`` as ``(l-1)/m + (l-1)/(m^2+m) + n/(2(m^2+m))``.

    Returns ``(l, n)`` with ``collapse_value(x) == l/m``; on the fine grid
    ``n`` always falls in ``1..2m+4``.
    """
    x = as_rat(x)
    l = int(collapse_value(x, m) * m)
    step = Fraction(1, m) + Fraction(1, m * m + m)
    n = (x - (l - 1) * step) * fine_order(m)
    assert n.denominator == 1
    return l, int(n)


def collapse_metric(X: FiniteMetricSpace, m: int) -> FiniteMetricSpace:
    out = FiniteMetricSpace([[collapse_value(v, m) for v in row] for row in X.d])
    bad = validate(out)
    if bad and not validate(X):
        raise AssertionError(f"collapsed metric is not a metric: {bad[0]}")
    return out


@dataclass(frozen=True)
class CoverEntry:
    ambient_index: int
    distance: Fraction
    covered: bool


@dataclass
class DenseCopy:
    """Result of :func:`dense_discrete_copy`.

    ``copy[i]`` is the ambient point playing the model point
    ``model_indices[i]``; ``cover`` lists every processed ambient point with
    its distance to the copy. ``diverged`` holds the reason the construction
    stopped early, if it did.
    """

    m: int
    copy: list[int] = field(default_factory=list)
    model_indices: list[int] = field(default_factory=list)
    cover: list[CoverEntry] = field(default_factory=list)
    trace: list[str] = field(default_factory=list)
    diverged: str | None = None

    @property
    def ok(self) -> bool:
        return self.diverged is None and all(c.covered for c in self.cover)

    def cover_csv(self) -> str:
        lines = ["ambient_index,distance_to_copy,covered"]
        for c in self.cover:
            lines.append(f"{c.ambient_index},{rat_str(c.distance)},{str(c.covered).lower()}")
        return "\n".join(lines) + "\n"


def _least_realizer(space, exclude, targets) -> int | None:
    # targets: list of (point, required distance)
    for a in range(space.n):
        if a in exclude:
            continue
        if all(space.d[p][a] == v for p, v in targets):
            return a
    return None


def dense_discrete_copy(
    ambient: FiniteMetricSpace,
    m: int,
    steps: int,
    model: FiniteMetricSpace | None = None,
) -> DenseCopy:
    """Finite run of the back-and-forth that builds a grid copy inside ``ambient``.

    ``model`` plays the enumerated grid space (default: the ceiling metric of
    ``ambient``). Each step first copies the least unused model point, then
    takes the next ambient point ``y``: if ``y`` is farther than ``1/m`` from
    the copy, the claim map over ``copy + [y]`` is realized in ``ambient``
    (least index wins) and the matching model point is located. Failure to
    find a realizer stops the run and is recorded in ``diverged``.
    """
    from .katetov import claim_map

    if model is None:
        model = ceil_metric(ambient, m)
    for row in model.d:
        for v in row:
            if not on_grid(v, m):
                raise ValueError(f"model distance {v} is off the grid 1/{m}")
    res = DenseCopy(m=m)
    if ambient.n == 0 or model.n == 0:
        res.diverged = "empty space"
        return res
    radius = Fraction(1, m)
    res.copy.append(0)
    res.model_indices.append(0)
    res.trace.append("sigma(0)=0 -> ambient 0")

    def copy_next_model_point(label: str) -> bool:
        used = set(res.model_indices)
        k = next((i for i in range(model.n) if i not in used), None)
        if k is None:
            res.diverged = f"{label}: model exhausted"
            return False
        targets = [(c, model.d[s][k]) for c, s in zip(res.copy, res.model_indices)]
        a = _least_realizer(ambient, set(res.copy), targets)
        if a is None:
            res.diverged = f"{label}: no ambient realizer for model point {k}"
            return False
        res.copy.append(a)
        res.model_indices.append(k)
        res.trace.append(f"{label}: model {k} -> ambient {a}")
        return True

    processed: list[int] = []
    for n in range(steps):
        if not copy_next_model_point(f"step {2 * n + 1}"):
            break
        if n >= ambient.n:
            res.trace.append(f"ambient exhausted after {n} points")
            break
        y = n
        processed.append(y)
        label = f"step {2 * n + 2}"
        if min(ambient.d[y][c] for c in res.copy) <= radius:
            if not copy_next_model_point(label):
                break
            continue
        f = claim_map(ambient, res.copy, y, m)
        if f is None:
            a = y
            profile = [ambient.d[c][y] for c in res.copy]
        else:
            profile = list(f.values[:-1])
            targets = list(zip(res.copy, profile)) + [(y, f.values[-1])]
            a = _least_realizer(ambient, set(res.copy), targets)
            if a is None:
                res.diverged = f"{label}: claim map for ambient {y} has no realizer"
                break
        used = set(res.model_indices)
        k = next(
            (
                i
                for i in range(model.n)
                if i not in used
                and all(model.d[s][i] == v for s, v in zip(res.model_indices, profile))
            ),
            None,
        )
        if k is None:
            res.diverged = f"{label}: no model point realizes {[rat_str(v) for v in profile]}"
            break
        res.copy.append(a)
        res.model_indices.append(k)
        res.trace.append(f"{label}: cover ambient {y} via ambient {a} (model {k})")

    for y in processed:
        dist = min(ambient.d[y][c] for c in res.copy)
        res.cover.append(CoverEntry(y, dist, dist <= radius))
    return res
