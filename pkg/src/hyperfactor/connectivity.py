"""Components, cut vertices, wings at the amalgam vertex, irregularity tests.

A wing of a color class is a maximal piece hanging at alpha in which alpha is
not a cut vertex: every pure-alpha edge copy is its own (small) wing, and the
large wings are the components left after deleting alpha from every edge.
The derived counting is cross-checked against the definitional brute force
in the tests.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Mapping, Optional

from .amalgam import AmalgamState
from .errors import NotConnected
from .model import Coloring, Edge, MultiHypergraph


class UnionFind:
    __slots__ = ("parent",)

    def __init__(self):
        self.parent: dict = {}

    def add(self, x):
        if x not in self.parent:
            self.parent[x] = x
        return x

    def find(self, x):
        parent = self.parent
        if x not in parent:
            parent[x] = x
            return x
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[rb] = ra
        return self.find(a)

    def groups(self) -> dict:
        out: dict = {}
        for x in self.parent:
            out.setdefault(self.find(x), []).append(x)
        return out


@dataclass
class ComponentReport:
    components: list[tuple[frozenset, list[tuple[Edge, int]]]]
    isolated: frozenset

    @property
    def count(self) -> int:
        return len(self.components)


def components(
    class_edges: Mapping[Edge, int] | Iterable[tuple[Edge, int]],
    universe: Optional[Iterable] = None,
) -> ComponentReport:
    """Partition one color class into maximal connected pieces.

    Only covered vertices form components; vertices of ``universe`` that no
    edge touches are reported separately as isolated.
    """
    items = class_edges.items() if hasattr(class_edges, "items") else list(class_edges)
    uf = UnionFind()
    edges_by_root: dict = {}
    edge_list = []
    for e, cnt in items:
        if cnt <= 0:
            continue
        edge_list.append((e, cnt))
        first = e[0]
        uf.add(first)
        for v in e[1:]:
            uf.union(first, v)
    for e, cnt in edge_list:
        edges_by_root.setdefault(uf.find(e[0]), []).append((e, cnt))
    comps = []
    for root, verts in sorted(uf.groups().items()):
        comps.append((frozenset(verts), sorted(edges_by_root.get(root, []))))
    covered = set(uf.parent)
    isolated = frozenset(set(universe) - covered) if universe is not None else frozenset()
    return ComponentReport(comps, isolated)


def is_connected_class(class_edges, universe=None) -> bool:
    rep = components(class_edges, universe)
    return rep.count == 1 and not rep.isolated


@dataclass
class WingReport:
    color: int
    small_wings: int
    large_wings: int
    components_of_base: int
    bound: int

    @property
    def total(self) -> int:
        return self.small_wings + self.large_wings


def count_wings(state: AmalgamState, j: int) -> WingReport:
    """Wings of class j at alpha: pure-alpha copies are small wings, the
    alpha-deleted components are the large ones."""
    cells = state.class_cells[j]
    small = cells.get(((), state.h), 0)
    uf = UnionFind()
    for (X, _), cnt in cells.items():
        if not X or cnt <= 0:
            continue
        uf.add(X[0])
        for v in X[1:]:
            uf.union(X[0], v)
    large = len(uf.groups())
    # base components in the spanning sense: untouched base vertices count
    base_uf = UnionFind()
    covered = set()
    for (X, i), cnt in cells.items():
        if i == 0 and cnt > 0:
            covered.update(X)
            base_uf.add(X[0])
            for v in X[1:]:
                base_uf.union(X[0], v)
    base_comps = len(base_uf.groups()) + len(set(state.base) - covered)
    rj = state.r[j - 1]
    bound = (rj - 1) * (state.inst.n - state.inst.m) + 1
    return WingReport(j, small, large, base_comps, bound)


def brute_force_wings(class_copies: list[Edge], alpha) -> list[tuple[int, ...]]:
    """Enumerate wings straight from the definition, for tiny classes.

    ``class_copies`` lists each edge copy separately (an edge may repeat).
    Returns the wings as sorted tuples of copy indices.
    """
    n = len(class_copies)
    if n > 16:
        raise ValueError("brute force is meant for tiny classes")
    wings = []
    for size in range(1, n + 1):
        for subset in combinations(range(n), size):
            if _is_wing(class_copies, subset, alpha):
                wings.append(subset)
    return wings


def _edges_connected(copies: list[Edge], idxs) -> bool:
    uf = UnionFind()
    for i in idxs:
        e = copies[i]
        uf.add(e[0])
        for v in e[1:]:
            uf.union(e[0], v)
    roots = {uf.find(copies[i][0]) for i in idxs}
    return len(roots) <= 1


def _is_wing(copies: list[Edge], subset, alpha) -> bool:
    # (i) non-trivial (has an edge, guaranteed) and connected
    if not _edges_connected(copies, subset):
        return False
    verts = set()
    for i in subset:
        verts.update(copies[i])
    # (iii) no outside edge is incident with V(W) \ {alpha}
    inner = verts - {alpha}
    outside = [i for i in range(len(copies)) if i not in subset]
    for i in outside:
        if inner & set(copies[i]):
            return False
    # (ii) alpha is not a cut vertex of W
    if alpha in verts and _is_cut_vertex_of_copies([copies[i] for i in subset], alpha):
        return False
    return True


def _is_cut_vertex_of_copies(copies: list[Edge], v) -> bool:
    """Cut test on an edge-copy list: delete v everywhere; the class splits
    iff more than one piece remains, where each emptied copy is a piece."""
    pieces = 0
    uf = UnionFind()
    emptied = 0
    for e in copies:
        rest = tuple(x for x in e if x != v)
        if not rest:
            emptied += 1
            continue
        uf.add(rest[0])
        for x in rest[1:]:
            uf.union(rest[0], x)
    pieces = len(uf.groups()) + emptied
    return pieces > 1


def is_cut_vertex(class_edges: Mapping[Edge, int], v) -> bool:
    """True iff removing v from every edge splits the (connected) class."""
    if not is_connected_class(class_edges):
        raise NotConnected("cut vertices are only defined for connected classes")
    copies = []
    for e, cnt in class_edges.items():
        copies.extend([e] * cnt)
    if not any(v in e for e in copies):
        return False
    return _is_cut_vertex_of_copies(copies, v)


def is_irregular(class_edges: Mapping[Edge, int], r: int) -> bool:
    """True iff no connected component of the class is r-regular.

    Isolated vertices never count as components here; an empty class is
    vacuously irregular.
    """
    rep = components(class_edges)
    for verts, edges in rep.components:
        deg = {v: 0 for v in verts}
        for e, cnt in edges:
            for v in e:
                deg[v] += cnt
        if all(d == r for d in deg.values()):
            return False
    return True


@dataclass
class NecessityReport:
    results: dict[int, tuple[bool, str]] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(ok for ok, _ in self.results.values())

    def failures(self) -> list[int]:
        return [j for j, (ok, _) in sorted(self.results.items()) if not ok]


def theorem13_necessity_check(
    C: Coloring, r: tuple[int, ...], requested: Iterable[int]
) -> NecessityReport:
    """A class can only extend to a connected factor if its target degree is
    at least 2 and no current component is already full."""
    rep = NecessityReport()
    for j in sorted(set(requested)):
        rj = r[j - 1]
        if rj < 2:
            rep.results[j] = (False, f"r_{j}={rj} < 2")
            continue
        class_edges = dict(C.class_edges(j))
        if not is_irregular(class_edges, rj):
            rep.results[j] = (False, f"class {j} has an {rj}-regular component")
            continue
        rep.results[j] = (True, "")
    return rep
