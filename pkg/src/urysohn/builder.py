"""Finite approximations of the universal ultrahomogeneous spaces U_S.

``build_approx`` runs a budgeted closure: each round looks at every small
subspace of the current space and adds a point for each Katetov profile (with
values in the alphabet) that nothing realizes yet. ``check_extension`` is the
matching certificate, ``back_and_forth`` compares two builds, and
``kuratowski_embed`` sends a grid-valued space into step functions.
"""
from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .core_metric import FiniteMetricSpace, as_rat, rat_str
from .discretize import on_grid
from .distance_sets import four_values_counterexample

DEFAULT_SIZE_CAP = 200


class BuildCapExceeded(RuntimeError):
    pass


@dataclass
class ApproxSpace:
    space: FiniteMetricSpace
    alphabet: tuple[Fraction, ...]
    rounds: int
    budget: int
    seed: int = 0
    completion: str = "random"
    log: list[tuple[int, tuple[int, ...], tuple[Fraction, ...], int]] = field(default_factory=list)
    added_per_round: list[int] = field(default_factory=list)
    deferred: int = 0

    @property
    def n(self) -> int:
        return self.space.n

    @property
    def closed_at(self) -> int | None:
        """First round (1-based) that added nothing, if any."""
        for r, added in enumerate(self.added_per_round, start=1):
            if added == 0:
                return r
        return None


class _Codes:
    """Alphabet values as integers over a common denominator."""

    def __init__(self, alphabet: Sequence[Fraction]):
        self.values = tuple(sorted(set(as_rat(v) for v in alphabet)))
        if not self.values or self.values[0] <= 0 or self.values[-1] > 1:
            raise ValueError("alphabet must be nonempty and inside (0, 1]")
        self.den = math.lcm(*(v.denominator for v in self.values))
        self.codes = np.array([int(v * self.den) for v in self.values], dtype=np.int64)

    def encode_space(self, X: FiniteMetricSpace) -> np.ndarray:
        if X.n and self.den % X.denominator:
            raise ValueError("space uses distances outside the alphabet's denominator")
        return X.scaled * (self.den // X.denominator) if X.n else np.zeros((0, 0), np.int64)

    def decode(self, c) -> Fraction:
        return Fraction(int(c), self.den)


def _katetov_profiles(sub: tuple[tuple[int, ...], ...], codes: Sequence[int]) -> list[tuple[int, ...]]:
    """Katetov profiles over an integer-coded subspace, lexicographic."""
    n = len(sub)
    out: list[tuple[int, ...]] = []
    prefix: list[int] = []

    def rec(i):
        if i == n:
            out.append(tuple(prefix))
            return
        for v in codes:
            if all(abs(v - prefix[j]) <= sub[i][j] <= v + prefix[j] for j in range(i)):
                prefix.append(v)
                rec(i + 1)
                prefix.pop()

    rec(0)
    return out


class _Builder:
    def __init__(self, codes: _Codes, cap: int, seed: int, completion: str):
        self.c = codes
        self.cap = cap
        self.seed = seed
        self.completion = completion
        self.dist = np.zeros((cap, cap), dtype=np.int64)
        self.n = 1
        self._profiles: dict = {}

    def profiles(self, F: tuple[int, ...]) -> list[tuple[int, ...]]:
        idx = list(F)
        sub = tuple(map(tuple, self.dist[np.ix_(idx, idx)].tolist()))
        if sub not in self._profiles:
            self._profiles[sub] = _katetov_profiles(sub, [int(c) for c in self.c.codes])
        return self._profiles[sub]

    def realized(self, F: tuple[int, ...]) -> set[tuple[int, ...]]:
        keep = np.ones(self.n, dtype=bool)
        keep[list(F)] = False
        block = self.dist[list(F), : self.n][:, keep]
        return set(zip(*block.tolist()))

    def add_point(self, F: tuple[int, ...], f: tuple[int, ...]) -> bool:
        """Adjoin a point realizing ``f`` over ``F``; ``False`` if the completion gets stuck."""
        if self.n >= self.cap:
            raise BuildCapExceeded(f"size cap {self.cap} reached")
        n, dist = self.n, self.dist
        rng = random.Random(f"{self.seed}:{n}")
        row = np.zeros(n, dtype=np.int64)
        lo = np.zeros(n, dtype=np.int64)
        hi = np.full(n, np.iinfo(np.int64).max // 4, dtype=np.int64)
        fixed = np.zeros(n, dtype=bool)

        def fix(w: int, v: int) -> None:
            row[w] = v
            fixed[w] = True
            np.maximum(lo, np.abs(v - dist[w, :n]), out=lo)
            np.minimum(hi, v + dist[w, :n], out=hi)

        for w, v in zip(F, f):
            fix(w, v)
        for z in range(n):
            if fixed[z]:
                continue
            ok = self.c.codes[(self.c.codes >= lo[z]) & (self.c.codes <= hi[z])]
            if ok.size == 0:
                return False
            v = int(ok[0]) if self.completion == "minimal" else int(rng.choice(ok.tolist()))
            fix(z, v)
        dist[n, :n] = row
        dist[:n, n] = row
        self.n += 1
        return True

    def space(self) -> FiniteMetricSpace:
        den = self.c.den
        return FiniteMetricSpace(
            [[Fraction(int(v), den) for v in self.dist[i, : self.n]] for i in range(self.n)]
        )


def build_approx(
    S: Sequence,
    rounds: int,
    budget: int,
    seed: int = 0,
    size_cap: int = DEFAULT_SIZE_CAP,
    completion: str = "random",
) -> ApproxSpace:
    """Grow a finite approximation of U_S from one point.

    Every round enumerates the subsets of size ``1..budget`` of the space as
    it stood when the round began, in size-then-lexicographic order (shuffled
    per round when ``seed != 0``), and for each Katetov profile over the
    subset with values in ``S`` that no other point realizes, adds a point.

    Distances from a new point to points outside the subset are filled in
    point order; each is drawn among the alphabet values allowed by the
    triangles already fixed, uniformly from an RNG keyed by ``(seed, point
    index)`` (``completion="random"``) or as the least allowed value
    (``completion="minimal"``). A profile whose completion gets stuck is
    skipped and counted in ``deferred``; a later round retries it.

    Raises ``ValueError`` if ``S`` fails the 4-values condition and
    :class:`BuildCapExceeded` past ``size_cap`` points.
    """
    if completion not in ("random", "minimal"):
        raise ValueError(f"unknown completion rule {completion!r}")
    codes = _Codes(S)
    bad = four_values_counterexample(codes.values)
    if bad is not None:
        raise ValueError(f"alphabet fails the 4-values condition at {bad}")
    b = _Builder(codes, size_cap, seed, completion)
    out = ApproxSpace(
        space=FiniteMetricSpace.single_point(),
        alphabet=codes.values,
        rounds=rounds,
        budget=budget,
        seed=seed,
        completion=completion,
    )
    for r in range(rounds):
        start = b.n
        subsets = [
            F for size in range(1, budget + 1) for F in itertools.combinations(range(start), size)
        ]
        if seed:
            random.Random(f"{seed}:round:{r}").shuffle(subsets)
        for F in subsets:
            seen = b.realized(F)
            for f in b.profiles(F):
                if f in seen:
                    continue
                if b.add_point(F, f):
                    seen.add(f)
                    out.log.append((r, F, tuple(codes.decode(v) for v in f), b.n - 1))
                else:
                    out.deferred += 1
        out.added_per_round.append(b.n - start)
    out.space = b.space()
    return out


Unrealized = tuple[tuple[int, ...], tuple[Fraction, ...]]


def check_extension(
    X: ApproxSpace | FiniteMetricSpace, k: int, alphabet: Sequence | None = None
) -> list[Unrealized]:
    """Profiles over subsets of size ``<= k`` that no point outside the subset realizes.

    The empty subset counts as realized as soon as the space has a point.
    """
    if isinstance(X, ApproxSpace):
        space, alphabet = X.space, X.alphabet if alphabet is None else alphabet
    else:
        space = X
    if alphabet is None:
        raise ValueError("check_extension needs an alphabet")
    if k > space.n:
        raise ValueError("k larger than the space")
    codes = _Codes(alphabet)
    dist = codes.encode_space(space)
    n = space.n
    out: list[Unrealized] = []
    if n == 0:
        out.append(((), ()))
    cache: dict = {}
    code_list = [int(c) for c in codes.codes]
    for size in range(1, k + 1):
        for F in itertools.combinations(range(n), size):
            sub = tuple(tuple(int(v) for v in dist[a, list(F)]) for a in F)
            if sub not in cache:
                cache[sub] = _katetov_profiles(sub, code_list)
            keep = np.ones(n, dtype=bool)
            keep[list(F)] = False
            seen = set(zip(*dist[list(F)][:, keep].tolist()))
            for f in cache[sub]:
                if f not in seen:
                    out.append((F, tuple(codes.decode(v) for v in f)))
    return out


def forbidden_triangles(X: FiniteMetricSpace, labels: Sequence) -> list[tuple[int, int, int]]:
    """Triples of points whose three distances are ``labels`` as a multiset."""
    want = sorted(as_rat(v) for v in labels)
    d = X.d
    return [
        (a, b, c)
        for a, b, c in itertools.combinations(range(X.n), 3)
        if sorted((d[a][b], d[a][c], d[b][c])) == want
    ]


def rado_failures(
    X: FiniteMetricSpace, k: int = 2, near=Fraction(1, 2), far=Fraction(1)
) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
    """Disjoint ``(A, B)`` with ``|A| + |B| <= k`` lacking a point near all of A and far from all of B.

    Pairs come ordered by ``|A| + |B|``, then the underlying set, then the
    bitmask of A inside it.
    """
    near, far = as_rat(near), as_rat(far)
    if near <= 0 or far <= 0:
        raise ValueError("near and far must be positive")
    d = np.array([[v for v in row] for row in X.d], dtype=object)
    is_near = (d == near).astype(bool)
    is_far = (d == far).astype(bool)
    out = []
    for size in range(1, k + 1):
        combos = np.array(list(itertools.combinations(range(X.n), size)), dtype=np.intp)
        if not len(combos):
            break
        miss = np.zeros((len(combos), 2**size), dtype=bool)
        for lo in range(0, len(combos), 20000):
            chunk = combos[lo : lo + 20000]
            for mask in range(2**size):
                ok = np.ones((len(chunk), X.n), dtype=bool)
                for i in range(size):
                    rows = is_near if mask >> i & 1 else is_far
                    ok &= rows[chunk[:, i]]
                # points of U never qualify: their distance to themselves is 0
                miss[lo : lo + len(chunk), mask] = ~ok.any(axis=1)
        for c, mask in zip(*np.nonzero(miss)):
            U = combos[c].tolist()
            A = tuple(u for i, u in enumerate(U) if mask >> i & 1)
            B = tuple(u for i, u in enumerate(U) if not mask >> i & 1)
            out.append((A, B))
    return out


@dataclass
class BackAndForth:
    pairs: list[tuple[int, int]]
    failure: str | None = None

    @property
    def ok(self) -> bool:
        return self.failure is None


def back_and_forth(A: FiniteMetricSpace, B: FiniteMetricSpace, depth: int) -> BackAndForth:
    """Alternate forth/back steps building a partial isometry of ``depth`` pairs.

    Each step takes the least unmatched point on its side and maps it to the
    least unmatched point on the other side with the right distances.
    """
    if isinstance(A, ApproxSpace):
        A = A.space
    if isinstance(B, ApproxSpace):
        B = B.space
    res = BackAndForth(pairs=[])
    for step in range(depth):
        forth = step % 2 == 0
        src, dst = (A, B) if forth else (B, A)
        src_used = {p[0] if forth else p[1] for p in res.pairs}
        dst_used = {p[1] if forth else p[0] for p in res.pairs}
        s = next((i for i in range(src.n) if i not in src_used), None)
        if s is None:
            res.failure = f"step {step}: {'A' if forth else 'B'} exhausted"
            return res
        matched = [(p[0], p[1]) if forth else (p[1], p[0]) for p in res.pairs]
        t = next(
            (
                j
                for j in range(dst.n)
                if j not in dst_used and all(dst.d[tj][j] == src.d[si][s] for si, tj in matched)
            ),
            None,
        )
        if t is None:
            side = "A" if forth else "B"
            res.failure = f"step {step}: no image for {side} point {s}"
            return res
        res.pairs.append((s, t) if forth else (t, s))
    return res


@dataclass(frozen=True)
class StepFunctionSpace:
    """Grid-valued step functions on ``2**depth`` dyadic cells, sup metric."""

    m: int
    depth: int
    functions: tuple[tuple[Fraction, ...], ...]

    def distance(self, i: int, j: int) -> Fraction:
        return max((abs(a - b) for a, b in zip(self.functions[i], self.functions[j])), default=Fraction(0))

    def as_metric_space(self) -> FiniteMetricSpace:
        n = len(self.functions)
        return FiniteMetricSpace([[self.distance(i, j) for j in range(n)] for i in range(n)])


def kuratowski_embed(X: FiniteMetricSpace, m: int) -> StepFunctionSpace:
    """Send point ``x`` to the step function ``p -> d(x, x_{cell(p)})``.

    Cell ``p`` of the dyadic partition of depth ``ceil(log2 n)`` is attached
    to point ``min(p, n - 1)``.
    """
    for row in X.d:
        for v in row:
            if not on_grid(v, m):
                raise ValueError(f"distance {rat_str(v)} is off the grid 1/{m}")
    n = X.n
    depth = max(0, math.ceil(math.log2(n))) if n else 0
    cells = [min(p, n - 1) for p in range(2**depth)]
    funcs = tuple(tuple(X.d[x][c] for c in cells) for x in range(n))
    out = StepFunctionSpace(m, depth, funcs)
    return out
