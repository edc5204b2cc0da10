"""Core data model: multihypergraphs with multiset edges, colorings, instances.

Vertices are dense positive integers.  An edge is stored as a sorted tuple of
vertex ids; a vertex may repeat inside an edge only if it is flagged as an
amalgam vertex.  Edge copies of the same vertex tuple are addressed by a copy
index 0..mult-1 so that partial colorings can color some copies and not
others.  Canonical copy order is (sorted vertex tuple, copy index).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Iterator, Optional

from .errors import InvalidParams, UnknownColor, UnknownVertex

Edge = tuple[int, ...]

UNCOLORED = 0


@dataclass(frozen=True)
class Instance:
    """Parameter tuple (n, h, lambda, m, r, optional s) of an embedding job.

    ``r`` has one entry per color; ``s`` (when present) caps the first
    q = len(s) colors of the given partial coloring.
    """

    n: int
    h: int
    lam: int
    m: int
    r: tuple[int, ...]
    s: Optional[tuple[int, ...]] = None

    def __post_init__(self):
        object.__setattr__(self, "r", tuple(self.r))
        if self.s is not None:
            object.__setattr__(self, "s", tuple(self.s))
        if self.h < 2:
            raise InvalidParams(f"edge size h={self.h} must be at least 2")
        if not (self.n >= self.m >= self.h):
            raise InvalidParams(f"need n >= m >= h, got n={self.n} m={self.m} h={self.h}")
        if self.lam < 1:
            raise InvalidParams("lambda must be positive")
        if len(self.r) < 1 or any(x < 1 for x in self.r):
            raise InvalidParams("r must be a nonempty vector of positive integers")
        if self.s is not None:
            if len(self.s) > len(self.r):
                raise InvalidParams("len(s) must not exceed len(r)")
            if any(x < 1 for x in self.s):
                raise InvalidParams("s entries must be positive")
            for i, (si, ri) in enumerate(zip(self.s, self.r), start=1):
                if si > ri:
                    raise InvalidParams(f"s_{i}={si} exceeds r_{i}={ri}")

    @property
    def k(self) -> int:
        return len(self.r)

    @property
    def q(self) -> int:
        return 0 if self.s is None else len(self.s)


class MultiHypergraph:
    """Vertex set plus a multiset of edges (sorted tuples with multiplicity)."""

    __slots__ = ("vertices", "edges", "amalgam_vertices")

    def __init__(
        self,
        vertices: Iterable[int],
        edges: Optional[dict[Edge, int]] = None,
        amalgam_vertices: Iterable[int] = (),
    ):
        self.vertices: set[int] = set(vertices)
        self.amalgam_vertices: frozenset[int] = frozenset(amalgam_vertices)
        self.edges: dict[Edge, int] = {}
        if edges:
            for e, cnt in edges.items():
                self.add_edge(e, cnt)

    def add_edge(self, edge: Iterable[int], count: int = 1) -> Edge:
        e = tuple(sorted(edge))
        if count < 0:
            raise InvalidParams("negative multiplicity")
        if count == 0:
            return e
        for v in e:
            if v not in self.vertices:
                raise UnknownVertex(f"vertex {v} not in hypergraph")
        seen = set()
        for v in e:
            if v in seen and v not in self.amalgam_vertices:
                raise InvalidParams(f"vertex {v} repeats in edge {e} but is not an amalgam vertex")
            seen.add(v)
        self.edges[e] = self.edges.get(e, 0) + count
        return e

    def num_edge_copies(self) -> int:
        return sum(self.edges.values())

    def degree(self, v: int) -> int:
        if v not in self.vertices:
            raise UnknownVertex(f"vertex {v} not in hypergraph")
        return sum(e.count(v) * cnt for e, cnt in self.edges.items())

    def sorted_edges(self) -> list[tuple[Edge, int]]:
        return sorted(self.edges.items())

    def copy(self) -> "MultiHypergraph":
        return MultiHypergraph(self.vertices, dict(self.edges), self.amalgam_vertices)

    def __eq__(self, other):
        return (
            isinstance(other, MultiHypergraph)
            and self.vertices == other.vertices
            and self.edges == other.edges
        )

    def __repr__(self):
        return f"MultiHypergraph(|V|={len(self.vertices)}, copies={self.num_edge_copies()})"


class Coloring:
    """Assignment of edge copies to colors 1..k (0 marks an uncolored copy).

    Stored per edge as a list aligned with copy indices; missing edges are
    entirely uncolored.
    """

    __slots__ = ("k", "by_edge")

    def __init__(self, k: int, by_edge: Optional[dict[Edge, list[int]]] = None):
        if k < 1:
            raise InvalidParams("need at least one color")
        self.k = k
        self.by_edge: dict[Edge, list[int]] = {}
        if by_edge:
            for e, cols in by_edge.items():
                self.by_edge[tuple(e)] = list(cols)

    @classmethod
    def for_hypergraph(cls, H: MultiHypergraph, k: int) -> "Coloring":
        c = cls(k)
        for e, cnt in H.edges.items():
            c.by_edge[e] = [UNCOLORED] * cnt
        return c

    def validate_against(self, H: MultiHypergraph) -> None:
        for e, cols in self.by_edge.items():
            if e not in H.edges:
                raise UnknownVertex(f"colored edge {e} does not exist in host")
            if len(cols) > H.edges[e]:
                raise InvalidParams(f"{len(cols)} copies referenced for {e}, host has {H.edges[e]}")
            for j in cols:
                if j != UNCOLORED and not (1 <= j <= self.k):
                    raise UnknownColor(f"color {j} out of range 1..{self.k}")

    def set_color(self, edge: Edge, copy_index: int, color: int) -> None:
        if color != UNCOLORED and not (1 <= color <= self.k):
            raise UnknownColor(f"color {color} out of range 1..{self.k}")
        cols = self.by_edge.setdefault(tuple(edge), [])
        while len(cols) <= copy_index:
            cols.append(UNCOLORED)
        cols[copy_index] = color

    def colors_of(self, edge: Edge) -> list[int]:
        return self.by_edge.get(tuple(edge), [])

    def class_edges(self, j: int) -> Iterator[tuple[Edge, int]]:
        """Yield (edge, number of copies colored j) with positive count."""
        for e, cols in self.by_edge.items():
            c = cols.count(j)
            if c:
                yield e, c

    def class_size(self, j: int) -> int:
        return sum(cols.count(j) for cols in self.by_edge.values())

    def num_colored(self) -> int:
        return sum(len(cols) - cols.count(UNCOLORED) for cols in self.by_edge.values())

    def copy(self) -> "Coloring":
        return Coloring(self.k, {e: list(c) for e, c in self.by_edge.items()})

    def __eq__(self, other):
        if not isinstance(other, Coloring):
            return NotImplemented
        mine = {e: c for e, c in self.by_edge.items() if any(x != UNCOLORED for x in c) or c}
        return self.k == other.k and _trimmed(self.by_edge) == _trimmed(other.by_edge)


def _trimmed(by_edge: dict[Edge, list[int]]) -> dict[Edge, tuple[int, ...]]:
    out = {}
    for e, cols in by_edge.items():
        if cols:
            out[e] = tuple(cols)
    return out


def complete_hypergraph(n: int, h: int, lam: int) -> MultiHypergraph:
    """The complete lambda-fold h-uniform hypergraph on vertices 1..n.

    Every h-subset appears with multiplicity exactly lam, so there are
    lam*C(n,h) edge copies and every vertex has degree lam*C(n-1,h-1).
    """
    if n < h:
        raise InvalidParams(f"n={n} < h={h}")
    if h < 1 or lam < 1:
        raise InvalidParams("need h >= 1 and lambda >= 1")
    H = MultiHypergraph(range(1, n + 1))
    for combo in combinations(range(1, n + 1), h):
        H.edges[combo] = lam
    return H


def degree_in_class(H: MultiHypergraph, C: Coloring, v: int, j: int) -> int:
    """Occurrences of v, counting copy multiplicity and within-edge repeats,
    over edge copies colored j."""
    if v not in H.vertices:
        raise UnknownVertex(f"vertex {v} not in hypergraph")
    if not (1 <= j <= C.k):
        raise UnknownColor(f"color {j} out of range 1..{C.k}")
    total = 0
    for e, cols in C.by_edge.items():
        occ = e.count(v)
        if occ:
            total += occ * cols.count(j)
    return total


@dataclass
class PartialFactorizationReport:
    ok: bool
    caps: tuple[int, ...]
    violations: list[tuple[int, int, int, int]] = field(default_factory=list)
    # entries are (vertex, color, degree, cap)


def is_partial_factorization(
    G: MultiHypergraph, C: Coloring, caps: Iterable[int]
) -> PartialFactorizationReport:
    """Check per-vertex class degrees against caps; failures go in the report."""
    caps = tuple(caps)
    if len(caps) != C.k:
        raise InvalidParams(f"caps has length {len(caps)}, coloring has k={C.k}")
    deg: dict[int, dict[int, int]] = {}
    for e, cols in C.by_edge.items():
        for j in cols:
            if j == UNCOLORED:
                continue
            for v in e:
                deg.setdefault(v, {})
                deg[v][j] = deg[v].get(j, 0) + 1
    violations = []
    for v in sorted(deg):
        for j in sorted(deg[v]):
            if deg[v][j] > caps[j - 1]:
                violations.append((v, j, deg[v][j], caps[j - 1]))
    return PartialFactorizationReport(not violations, caps, violations)


def binom(n: int, k: int) -> int:
    if k < 0 or n < 0 or k > n:
        return 0
    return math.comb(n, k)
