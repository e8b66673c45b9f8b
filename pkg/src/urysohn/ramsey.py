"""Colorings, the chain-span obstruction and monochromatic copy search."""
from __future__ import annotations

import itertools
import random
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .core_metric import FiniteMetricSpace, as_rat, find_embeddings, rat_str, restrict


def epsilon_components(X: FiniteMetricSpace, eps) -> list[list[int]]:
    """Components of the graph joining points at distance ``<= eps``, by least member."""
    eps = as_rat(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    parent = list(range(X.n))

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for a, b in itertools.combinations(range(X.n), 2):
        if X.d[a][b] <= eps:
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)
    groups: dict[int, list[int]] = {}
    for a in range(X.n):
        groups.setdefault(find(a), []).append(a)
    return sorted(groups.values())


def lambda_eps(X: FiniteMetricSpace, x: int, eps) -> Fraction:
    """Largest distance (capped at 1) between two points of the eps-component of ``x``."""
    comp = next(c for c in epsilon_components(X, eps) if x in c)
    return max((min(X.d[a][b], Fraction(1)) for a, b in itertools.combinations(comp, 2)), default=Fraction(0))


def lambda_curve(X: FiniteMetricSpace, x: int, eps_grid: Sequence) -> list[tuple[Fraction, Fraction]]:
    return [(as_rat(e), lambda_eps(X, x, e)) for e in eps_grid]


def lambda_(X: FiniteMetricSpace, x: int, eps_grid: Sequence) -> Fraction:
    """Minimum of :func:`lambda_eps` over a finite grid of positive eps values."""
    if not eps_grid:
        raise ValueError("empty eps grid")
    return min(v for _, v in lambda_curve(X, x, eps_grid))


@dataclass(frozen=True)
class Coloring:
    colors: tuple[int, ...]
    k: int
    kind: str = "given"

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("need at least one color")
        if any(not 0 <= c < self.k for c in self.colors):
            raise ValueError("color out of range")

    def __len__(self) -> int:
        return len(self.colors)

    def classes(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in range(self.k)]
        for p, c in enumerate(self.colors):
            out[c].append(p)
        return out


def random_coloring(n: int, k: int, seed: int) -> Coloring:
    rng = random.Random(f"coloring:{seed}")
    return Coloring(tuple(rng.randrange(k) for _ in range(n)), k, "random")


def parity_coloring(n: int, k: int = 2) -> Coloring:
    return Coloring(tuple(p % k for p in range(n)), k, "parity")


def greedy_coloring(X: FiniteMetricSpace, k: int, targets: Sequence[FiniteMetricSpace]) -> Coloring:
    """Color points in order, each time picking the color that closes the fewest target copies.

    A copy counts when it lies inside the color class and uses the new point.
    Ties go to the smallest color.
    """
    colors: list[int] = []
    classes: list[list[int]] = [[] for _ in range(k)]
    for p in range(X.n):
        best, best_cost = 0, None
        for c in range(k):
            pts = classes[c] + [p]
            sub = restrict(X, pts)
            last = len(pts) - 1
            cost = sum(
                sum(1 for e in find_embeddings(T, sub) if last in e) for T in targets if T.n <= len(pts)
            )
            if best_cost is None or cost < best_cost:
                best, best_cost = c, cost
        colors.append(best)
        classes[best].append(p)
    return Coloring(tuple(colors), k, "greedy")


def fattening(X: FiniteMetricSpace, points: Sequence[int], eps) -> list[int]:
    """Points of ``X`` within ``eps`` of some point of ``points``."""
    eps = as_rat(eps)
    return [a for a in range(X.n) if any(X.d[a][p] <= eps for p in points)]


@dataclass(frozen=True)
class EmbeddingWitness:
    color: int
    image: tuple[int, ...]
    eps: Fraction


def find_mono_copy(
    X: FiniteMetricSpace, chi: Coloring, target: FiniteMetricSpace, eps=0
) -> EmbeddingWitness | None:
    """First isometric copy of ``target`` inside the eps-fattening of one color class.

    Colors are tried in order; within a color the lexicographically least
    embedding wins. ``None`` means every class was searched exhaustively.
    """
    eps = as_rat(eps)
    if eps < 0:
        raise ValueError("eps must be >= 0")
    if len(chi) != X.n:
        raise ValueError("coloring does not match the space")
    for c, cls in enumerate(chi.classes()):
        allowed = fattening(X, cls, eps) if cls else []
        if len(allowed) < target.n:
            continue
        emb = find_embeddings(target, restrict(X, allowed), limit=1)
        if emb:
            return EmbeddingWitness(c, tuple(allowed[i] for i in emb[0]), eps)
    return None


def verify_witness(
    X: FiniteMetricSpace, chi: Coloring, target: FiniteMetricSpace, w: EmbeddingWitness
) -> bool:
    """Re-check a witness from scratch: injective, isometric, and inside the fattened class."""
    img = w.image
    if len(img) != target.n or len(set(img)) != len(img):
        return False
    for i, j in itertools.combinations(range(target.n), 2):
        if X.d[img[i]][img[j]] != target.d[i][j]:
            return False
    for a in img:
        if not any(chi.colors[p] == w.color and X.d[a][p] <= w.eps for p in range(X.n)):
            return False
    return True


@dataclass(frozen=True)
class ExperimentRow:
    seed: int
    coloring_kind: str
    k: int
    eps: Fraction
    target_id: int
    found: bool
    color: int | None
    witness_size: int
    millis: int

    def csv(self) -> str:
        color = "" if self.color is None else str(self.color)
        return (
            f"{self.seed},{self.coloring_kind},{self.k},{rat_str(self.eps)},{self.target_id},"
            f"{str(self.found).lower()},{color},{self.witness_size},{self.millis}"
        )


CSV_HEADER = "seed,coloring_kind,k,eps,target_id,found,color,witness_size,millis"

KINDS = ("random", "parity", "greedy")


def experiment(
    X: FiniteMetricSpace,
    targets: Sequence[FiniteMetricSpace],
    eps,
    k: int,
    seeds: Sequence[int],
    kinds: Sequence[str] = KINDS,
    timing: bool = False,
) -> list[ExperimentRow]:
    """Search every target under every coloring; rows come in (seed, kind, target) order.

    Only random colorings depend on the seed. ``millis`` is measured only
    when ``timing`` is set, so untimed reports replay byte for byte.
    """
    eps = as_rat(eps)
    for kind in kinds:
        if kind not in KINDS:
            raise ValueError(f"unknown coloring kind {kind!r}")
    fixed = {}
    if "parity" in kinds:
        fixed["parity"] = parity_coloring(X.n, k)
    if "greedy" in kinds:
        fixed["greedy"] = greedy_coloring(X, k, targets)
    rows = []
    for seed in seeds:
        for kind in kinds:
            chi = random_coloring(X.n, k, seed) if kind == "random" else fixed[kind]
            for tid, T in enumerate(targets):
                t0 = time.perf_counter()
                w = find_mono_copy(X, chi, T, eps)
                ms = round((time.perf_counter() - t0) * 1000) if timing else 0
                if w is not None and not verify_witness(X, chi, T, w):
                    raise AssertionError(f"witness failed verification: {w}")
                rows.append(
                    ExperimentRow(
                        seed, kind, k, eps, tid, w is not None,
                        None if w is None else w.color, 0 if w is None else len(w.image), ms,
                    )
                )
    return rows


def success_rates(rows: Sequence[ExperimentRow]) -> dict[tuple[str, int], Fraction]:
    """Fraction of runs with a witness, per (coloring kind, target)."""
    tally: dict[tuple[str, int], list[int]] = {}
    for r in rows:
        t = tally.setdefault((r.coloring_kind, r.target_id), [0, 0])
        t[0] += r.found
        t[1] += 1
    return {key: Fraction(a, b) for key, (a, b) in sorted(tally.items())}


def report_csv(rows: Sequence[ExperimentRow]) -> str:
    return "\n".join([CSV_HEADER] + [r.csv() for r in rows]) + "\n"
