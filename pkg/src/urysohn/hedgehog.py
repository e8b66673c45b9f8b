"""The hedgehog graph Z: a coarse grid space with fine branches glued on.

Given a fine rational metric ``y`` on points ``0..N-1`` and its ceiling image
``x`` on the grid of order ``m``, the vertices of Z are the points of ``x``
together with a tree T of index tuples. A tuple ``t`` (strictly increasing)
is a node when ``x_i -> x_{t_i}`` is an isometry. Labels:

* two points: their ``x`` distance;
* two comparable nodes ``s, t``: ``y(|s|-1, |t|-1)``;
* node ``t`` and the point ``x_{max t}``: ``1/m``.

The metric of Z is the shortest-path distance capped at 1.
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .core_metric import FiniteMetricSpace, rat_str, validate
from .discretize import ceil_metric

POINT, NODE = "point", "node"


@dataclass
class HedgehogGraph:
    """Edge-labelled graph on ``points + nodes``.

    Vertex ``v < n_points`` is the grid point ``v``; vertex ``n_points + i`` is
    ``nodes[i]``. Labels are stored as integers over ``unit``.
    """

    m: int
    fine: FiniteMetricSpace
    coarse: FiniteMetricSpace
    nodes: list[tuple[int, ...]]
    unit: int
    weight: np.ndarray  # -1 where there is no edge
    max_tree_size: int

    @property
    def n_points(self) -> int:
        return self.coarse.n

    @property
    def size(self) -> int:
        return self.n_points + len(self.nodes)

    def is_point(self, v: int) -> bool:
        return v < self.n_points

    def node(self, v: int) -> tuple[int, ...]:
        return self.nodes[v - self.n_points]

    def vertex_of(self, t: Sequence[int]) -> int:
        return self.n_points + self._index[tuple(t)]

    def projection(self, v: int) -> int:
        return v if self.is_point(v) else max(self.node(v))

    def below(self, u: int, v: int) -> bool:
        """``u`` is a proper initial segment of ``v`` (both nodes)."""
        if self.is_point(u) or self.is_point(v):
            return False
        s, t = self.node(u), self.node(v)
        return len(s) < len(t) and t[: len(s)] == s

    def comparable(self, u: int, v: int) -> bool:
        return self.below(u, v) or self.below(v, u)

    def has_edge(self, u: int, v: int) -> bool:
        return u != v and self.weight[u, v] >= 0

    def delta(self, u: int, v: int) -> Fraction:
        if not self.has_edge(u, v):
            raise KeyError(f"no edge between {self.label(u)} and {self.label(v)}")
        return Fraction(int(self.weight[u, v]), self.unit)

    def neighbours(self, v: int) -> list[int]:
        return [int(u) for u in np.flatnonzero(self.weight[v] >= 0) if u != v]

    def edges(self):
        n = self.size
        for u in range(n):
            for v in range(u + 1, n):
                if self.weight[u, v] >= 0:
                    yield u, v

    def label(self, v: int) -> str:
        if self.is_point(v):
            return f"x{v}"
        return "{" + ",".join(map(str, self.node(v))) + "}"

    def __post_init__(self):
        self._index = {t: i for i, t in enumerate(self.nodes)}

    def to_json(self) -> str:
        verts = [{"id": v, "kind": POINT, "index": v} for v in range(self.n_points)]
        verts += [
            {"id": self.n_points + i, "kind": NODE, "set": list(t)} for i, t in enumerate(self.nodes)
        ]
        edges = [[u, v, rat_str(self.delta(u, v))] for u, v in self.edges()]
        return json.dumps(
            {"m": self.m, "max_tree_size": self.max_tree_size, "vertices": verts, "edges": edges},
            indent=1,
        )


def tree_nodes(coarse: FiniteMetricSpace, max_size: int) -> list[tuple[int, ...]]:
    """Increasing tuples ``t`` with ``x_i -> x_{t_i}`` isometric, by size then lex."""
    d = coarse.d
    out: list[tuple[int, ...]] = []
    level = [(k,) for k in range(coarse.n)]
    size = 1
    while level and size <= max_size:
        out.extend(level)
        nxt = []
        for t in level:
            i = len(t)
            for k in range(t[-1] + 1, coarse.n):
                if all(d[j][i] == d[t[j]][k] for j in range(i)):
                    nxt.append(t + (k,))
        level = nxt
        size += 1
    return out


def build_Z(
    fine: FiniteMetricSpace,
    m: int,
    max_tree_size: int,
    coarse: FiniteMetricSpace | None = None,
) -> HedgehogGraph:
    """Build Z from a fine metric and its ceiling image on the grid of order ``m``.

    ``coarse`` defaults to the ceiling metric of ``fine``; when given, it must
    equal it.
    """
    if m < 1 or max_tree_size < 1:
        raise ValueError("need m >= 1 and max_tree_size >= 1")
    bad = validate(fine)
    if bad:
        raise ValueError(f"fine space is not a metric: {bad[0]}")
    expected = ceil_metric(fine, m)
    if coarse is None:
        coarse = expected
    elif coarse != expected:
        raise ValueError("coarse space is not the ceiling image of the fine space")
    nodes = tree_nodes(coarse, max_tree_size)
    unit = math.lcm(fine.denominator, m)
    npt = coarse.n
    size = npt + len(nodes)
    w = np.full((size, size), -1, dtype=np.int64)
    np.fill_diagonal(w, 0)
    fine_i = fine.scaled * (unit // fine.denominator) if fine.n else None
    coarse_i = coarse.scaled * (unit // coarse.denominator) if npt else None
    if npt:
        w[:npt, :npt] = coarse_i
    for a, s in enumerate(nodes):
        w[npt + a, s[-1]] = w[s[-1], npt + a] = unit // m
    index = {t: i for i, t in enumerate(nodes)}
    for a, s in enumerate(nodes):
        va = npt + a
        for h in range(1, len(s)):
            vb = npt + index[s[:h]]
            w[va, vb] = w[vb, va] = fine_i[len(s) - 1, h - 1]
    return HedgehogGraph(m, fine, coarse, nodes, unit, w, max_tree_size)


def _floyd_warshall(w: np.ndarray) -> np.ndarray:
    n = len(w)
    big = np.iinfo(np.int64).max // 4
    d = np.where(w >= 0, w, big)
    for k in range(n):
        np.minimum(d, d[:, k : k + 1] + d[k : k + 1, :], out=d)
    return d


@dataclass
class PathMetric:
    """Shortest-path distances of Z, before and after the cap at 1."""

    graph: HedgehogGraph
    raw: np.ndarray
    capped: np.ndarray

    def __call__(self, u: int, v: int) -> Fraction:
        return Fraction(int(self.capped[u, v]), self.graph.unit)

    def as_metric_space(self) -> FiniteMetricSpace:
        unit = self.graph.unit
        return FiniteMetricSpace([[Fraction(int(v), unit) for v in row] for row in self.capped])

    def shortest_path(self, u: int, v: int) -> list[int]:
        """Lexicographically least vertex sequence among the shortest ``u``-``v`` paths."""
        g, raw = self.graph, self.raw
        path = [u]
        while path[-1] != v:
            a = path[-1]
            nxt = next(
                b
                for b in g.neighbours(a)
                if g.weight[a, b] + raw[b, v] == raw[a, v]
            )
            path.append(nxt)
        return path


def path_metric(G: HedgehogGraph) -> PathMetric:
    raw = _floyd_warshall(G.weight)
    if G.size and (raw >= np.iinfo(np.int64).max // 4).any():
        raise ValueError("graph is disconnected")
    return PathMetric(G, raw, np.minimum(raw, G.unit))


def extension_defects(G: HedgehogGraph, D: PathMetric) -> list[tuple[int, int]]:
    """Edges whose label differs from the path metric."""
    return [(u, v) for u, v in G.edges() if D.capped[u, v] != G.weight[u, v]]


# -- irreducible cycles -------------------------------------------------------


def chordless_cycles(G: HedgehogGraph, max_len: int):
    """Induced cycles of length ``3..max_len``, each once, rooted at its least vertex.

    The second vertex is smaller than the last one, fixing the direction.
    """
    adj = [set(G.neighbours(v)) for v in range(G.size)]

    def grow(path: list[int]):
        root, last = path[0], path[-1]
        for w in sorted(adj[last]):
            if w <= root or w in path:
                continue
            # w may only touch the root and the last vertex
            inner = adj[w] & set(path[1:-1])
            if inner:
                continue
            if root in adj[w]:
                if len(path) >= 2 and path[1] < w:
                    yield path + [w]
                continue
            if len(path) + 1 < max_len:
                yield from grow(path + [w])

    for root in range(G.size):
        for a in sorted(adj[root]):
            if a > root:
                yield from grow([root, a])


@dataclass
class CycleRecord:
    vertices: tuple[int, ...]
    shape: str
    problems: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.problems


@dataclass
class CycleCensus:
    m: int
    max_len: int
    records: list[CycleRecord] = field(default_factory=list)

    @property
    def violations(self) -> list[CycleRecord]:
        return [r for r in self.records if not r.ok]

    def counts(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for r in self.records:
            out[r.shape] = out.get(r.shape, 0) + 1
        return out

    def to_csv(self, G: HedgehogGraph) -> str:
        lines = ["cycle_id,size,shape,vertices,ok,problems"]
        for i, r in enumerate(self.records):
            verts = " ".join(G.label(v) for v in r.vertices)
            lines.append(f'{i},{len(r.vertices)},{r.shape},"{verts}",{str(r.ok).lower()},"{"; ".join(r.problems)}"')
        return "\n".join(lines) + "\n"


def _shape(G: HedgehogGraph, cyc: Sequence[int]) -> tuple[str, dict[str, int] | None]:
    pts = [v for v in cyc if G.is_point(v)]
    nds = [v for v in cyc if not G.is_point(v)]
    n = len(cyc)
    if not nds:
        return ("points", None) if n == 3 else ("unexpected", None)
    if not pts:
        if n == 3 and all(G.comparable(a, b) for a, b in itertools.combinations(nds, 2)):
            return "branch", None
        return "unexpected", None
    if len(pts) == 1 and n == 4:
        z0 = pts[0]
        ups = [v for v in nds if G.has_edge(v, z0)]
        low = [v for v in nds if v not in ups]
        if len(ups) == 2 and len(low) == 1:
            z1, z3 = ups
            z2 = low[0]
            if not G.comparable(z1, z3) and G.below(z2, z1) and G.below(z2, z3):
                return "case2", {"z0": z0, "z1": z1, "z2": z2, "z3": z3}
        return "unexpected", None
    if len(pts) == 2:
        z0, z4 = pts
        z1 = next((v for v in nds if G.projection(v) == z0 and G.has_edge(v, z0)), None)
        z3 = next((v for v in nds if G.projection(v) == z4 and G.has_edge(v, z4)), None)
        if z1 is None or z3 is None:
            return "unexpected", None
        if n == 4 and G.comparable(z1, z3):
            return "case1", {"z0": z0, "z1": z1, "z2": z3, "z3": z4}
        if n == 5:
            z2 = next(v for v in nds if v not in (z1, z3))
            if not G.comparable(z1, z3) and G.below(z2, z1) and G.below(z2, z3):
                return "case3", {"z0": z0, "z1": z1, "z2": z2, "z3": z3, "z4": z4}
    return "unexpected", None


def classify_cycles(G: HedgehogGraph, max_len: int = 6) -> CycleCensus:
    """Enumerate irreducible cycles and check their shape and metric inequalities.

    Irreducible cycles are the induced cycles of the graph. Each is tagged
    ``points``, ``branch``, ``case1``, ``case2``, ``case3`` or ``unexpected``;
    an unexpected shape, a cycle longer than 5 or any edge longer than the
    rest of its cycle is recorded as a problem.
    """
    if max_len < 3:
        raise ValueError("max_len must be at least 3")
    census = CycleCensus(G.m, max_len)
    two_m = Fraction(2, G.m)
    for cyc in chordless_cycles(G, max_len):
        shape, roles = _shape(G, cyc)
        rec = CycleRecord(tuple(cyc), shape)
        if shape == "unexpected":
            rec.problems.append("shape matches no allowed form")
        if len(cyc) > 5:
            rec.problems.append(f"irreducible cycle of size {len(cyc)}")
        k = len(cyc)
        labels = [G.delta(cyc[i], cyc[(i + 1) % k]) for i in range(k)]
        total = sum(labels)
        for i, lab in enumerate(labels):
            if lab > min(total - lab, 1):
                rec.problems.append(
                    f"edge {G.label(cyc[i])}-{G.label(cyc[(i + 1) % k])} longer than the rest"
                )
        if shape == "case2":
            a = G.delta(roles["z1"], roles["z2"])
            b = G.delta(roles["z2"], roles["z3"])
            if abs(a - b) > two_m:
                rec.problems.append("case 2 bound |d12 - d23| <= 2/m fails")
        if shape == "case3":
            a = G.delta(roles["z1"], roles["z2"])
            b = G.delta(roles["z2"], roles["z3"])
            c = G.delta(roles["z0"], roles["z4"])
            if c > a + b + two_m:
                rec.problems.append("case 3 bound d04 <= d12 + d23 + 2/m fails")
            if a > b + c + two_m:
                rec.problems.append("case 3 bound d12 <= d23 + d04 + 2/m fails")
        census.records.append(rec)
    return census


# -- branches -------------------------------------------------------------------


def maximal_nodes(G: HedgehogGraph) -> list[int]:
    """Nodes with no proper end-extension in the built tree."""
    has_child = {G.nodes[i][:-1] for i in range(len(G.nodes)) if len(G.nodes[i]) > 1}
    return [G.n_points + i for i, t in enumerate(G.nodes) if t not in has_child]


def branch_of(G: HedgehogGraph, v: int) -> list[int]:
    t = G.node(v)
    return [G.vertex_of(t[:h]) for h in range(1, len(t) + 1)]


@dataclass
class BranchReport:
    branch: list[int]
    mismatches: list[tuple[int, int, Fraction, Fraction]] = field(default_factory=list)
    far_from_projection: list[int] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.mismatches and not self.far_from_projection


def branch_cover_check(G: HedgehogGraph, branch: Sequence[int], D: PathMetric | None = None) -> BranchReport:
    """Compare a chain ``b(0) < b(1) < ...`` with the fine metric on ``0..len-1``.

    Also checks that each ``b(i)`` sits at distance exactly ``1/m`` from its
    projection.
    """
    D = D or path_metric(G)
    rep = BranchReport(list(branch))
    for i, j in itertools.combinations(range(len(branch)), 2):
        got, want = D(branch[i], branch[j]), G.fine.d[i][j]
        if got != want:
            rep.mismatches.append((i, j, got, want))
    for v in branch:
        if D(v, G.projection(v)) != Fraction(1, G.m):
            rep.far_from_projection.append(v)
    return rep


@dataclass
class HedgehogReport:
    graph: HedgehogGraph
    metric: PathMetric
    metric_violations: list
    extension_defects: list[tuple[int, int]]
    census: CycleCensus
    branches: list[BranchReport]

    @property
    def ok(self) -> bool:
        return (
            not self.metric_violations
            and not self.extension_defects
            and not self.census.violations
            and all(b.ok for b in self.branches)
        )

    def summary(self) -> dict:
        return {
            "points": self.graph.n_points,
            "nodes": len(self.graph.nodes),
            "metric_violations": len(self.metric_violations),
            "extension_defects": len(self.extension_defects),
            "cycles": self.census.counts(),
            "cycle_violations": len(self.census.violations),
            "branches": len(self.branches),
            "branch_failures": sum(not b.ok for b in self.branches),
            "ok": self.ok,
        }


def verify(G: HedgehogGraph, max_len: int = 6) -> HedgehogReport:
    """Run every check on Z."""
    D = path_metric(G)
    return HedgehogReport(
        graph=G,
        metric=D,
        metric_violations=validate(D.as_metric_space()),
        extension_defects=extension_defects(G, D),
        census=classify_cycles(G, max_len),
        branches=[branch_cover_check(G, branch_of(G, v), D) for v in maximal_nodes(G)],
    )

