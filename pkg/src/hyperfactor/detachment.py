"""Fair detachment: split the amalgam vertex into p new vertices.

Each step peels one vertex off alpha.  The step is a bounded transportation
problem (colors x cells) solved by an integer flow; every color hands the new
vertex its floor/ceil share of alpha's class degree and every cell sheds its
floor/ceil share of slots, one slot per donated copy.  In pipeline states all
shares divide exactly, which is what makes the final contracts exact: every
detached vertex ends with class degree r_j and every h-set with multiplicity
lambda.

Connectivity of requested classes is maintained by an invariant, not luck:
after every step, each alpha-deleted component of such a class must retain at
least one alpha slot.  Components that drain fully in a step drain into the
new vertex and merge with it, so the only failure mode is the new vertex's
merged component ending slotless; that is repaired by rotating donation units
along compensating chains through other classes, and as a last resort the
whole detachment is reseeded and retried.
"""

from __future__ import annotations

import logging
import random
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .amalgam import AmalgamState, Cell
from .connectivity import UnionFind, count_wings
from .errors import (
    ConnectivityRepairExhausted,
    FairnessInfeasible,
    InternalContractError,
    InvalidParams,
    NecessityViolated,
)
from .flow import solve_bounded_transport
from .model import Coloring, Edge, MultiHypergraph, binom

logger = logging.getLogger(__name__)


@dataclass
class SplitStep:
    step_index: int
    remaining_weight: int
    new_vertex: int
    assignment: dict[tuple[int, Cell], int] = field(default_factory=dict)


@dataclass
class DetachmentResult:
    hypergraph: MultiHypergraph
    coloring: Coloring
    trace: list[SplitStep]
    new_vertices: tuple[int, ...]
    seed: int
    connected_classes: frozenset[int]
    attempts: int = 1

    def class_edges(self, j: int):
        return dict(self.coloring.class_edges(j))


class _StepStuck(Exception):
    def __init__(self, color):
        self.color = color


class _ClassTracker:
    """Incremental alpha-deleted component structure of one color class."""

    __slots__ = ("j", "h", "uf", "slots", "small", "large_roots")

    def __init__(self, state: AmalgamState, j: int):
        self.j = j
        self.h = state.h
        self.uf = UnionFind()
        self.slots: dict = {}
        self.small = 0
        self.large_roots = 0
        for (X, i), cnt in state.class_cells[j].items():
            if not X:
                self.small += cnt
                continue
            self.uf.add(X[0])
            for v in X[1:]:
                self._union(X[0], v)
        roots = set()
        for (X, i), cnt in state.class_cells[j].items():
            if not X:
                continue
            r = self.uf.find(X[0])
            roots.add(r)
            self.slots[r] = self.slots.get(r, 0) + i * cnt
        self.large_roots = len(roots)

    def _union(self, a, b):
        ra, rb = self.uf.find(a), self.uf.find(b)
        if ra == rb:
            return ra
        sa = self.slots.pop(ra, 0)
        sb = self.slots.pop(rb, 0)
        root = self.uf.union(ra, rb)
        self.slots[root] = sa + sb
        return root

    def all_components_slotted(self) -> bool:
        return all(s >= 1 for s in self.slots.values())

    def wings(self) -> int:
        return self.small + self.large_roots

    def blob_after(self, donations: Iterable[tuple[Cell, int]]) -> int:
        """Slot count of the new vertex's merged component, hypothetically."""
        roots = set()
        donated = 0
        small_hits = 0
        for (X, i), cnt in donations:
            if X:
                roots.add(self.uf.find(X[0]))
                donated += cnt
            else:
                small_hits += cnt
        return sum(self.slots.get(r, 0) for r in roots) - donated + small_hits * (self.h - 1)

    def apply(self, beta: int, donations: Iterable[tuple[Cell, int]]) -> None:
        self.uf.add(beta)
        self.slots[self.uf.find(beta)] = self.slots.get(self.uf.find(beta), 0)
        self.large_roots += 1
        for (X, i), cnt in donations:
            rb = self.uf.find(beta)
            if X:
                rx = self.uf.find(X[0])
                if rx != rb:
                    self.large_roots -= 1
                    rb = self._union(beta, X[0])
                self.slots[rb] -= cnt
            else:
                self.small -= cnt
                self.slots[rb] += (self.h - 1) * cnt


def check_connected_detachment_criterion(state: AmalgamState, j: int, p: int) -> bool:
    """deg(alpha, j) minus the wing count must reach p - 1."""
    report = count_wings(state, j)
    return state.alpha_deg[j] - report.total >= p - 1


def _phantom_rows_cols(state: AmalgamState, w: int):
    rows = []
    row_of: dict[int, int] = {}
    for j in range(1, state.k + 1):
        deg = state.alpha_deg[j]
        if deg <= 0:
            continue
        row_of[j] = len(rows)
        rows.append((deg // w, -(-deg // w)))
    cols = []
    col_of: dict[Cell, int] = {}
    for cell in sorted(state.mult):
        X, i = cell
        if i < 1:
            continue
        share = state.mult[cell] * i
        col_of[cell] = len(cols)
        cols.append((share // w, -(-share // w)))
    return rows, row_of, cols, col_of


def _solve_step(state: AmalgamState, w: int, rng: random.Random):
    rows, row_of, cols, col_of = _phantom_rows_cols(state, w)
    row_perm = list(range(len(rows)))
    col_perm = list(range(len(cols)))
    rng.shuffle(row_perm)
    rng.shuffle(col_perm)
    row_inv = [0] * len(rows)
    col_inv = [0] * len(cols)
    for new, old in enumerate(row_perm):
        row_inv[old] = new
    for new, old in enumerate(col_perm):
        col_inv[old] = new
    arcs = []
    for j, ri in row_of.items():
        for cell, cnt in state.class_cells[j].items():
            if cell[1] >= 1 and cnt > 0:
                arcs.append((row_inv[ri], col_inv[col_of[cell]], cnt))
    y = solve_bounded_transport(
        [rows[old] for old in row_perm],
        [cols[old] for old in col_perm],
        arcs,
    )
    if y is None:
        return None
    colors = {ri: j for j, ri in row_of.items()}
    cells = {ci: cell for cell, ci in col_of.items()}
    out: dict[tuple[int, Cell], int] = {}
    for (rI, cI), val in y.items():
        out[(colors[row_perm[rI]], cells[col_perm[cI]])] = val
    return out


class _RotationIndex:
    """Residual structure over the step assignment for donation rotations."""

    def __init__(self, state: AmalgamState, y: dict[tuple[int, Cell], int]):
        self.state = state
        self.y = y
        self.donors_at: dict[Cell, set[int]] = {}
        for (j, cell), cnt in y.items():
            if cnt > 0:
                self.donors_at.setdefault(cell, set()).add(j)

    def residual_cells(self, j: int) -> list[Cell]:
        out = []
        for cell, cap in self.state.class_cells[j].items():
            if cell[1] >= 1 and self.y.get((j, cell), 0) < cap:
                out.append(cell)
        return out

    def move(self, j: int, src: Cell, dst: Cell) -> Optional[list[tuple[int, Cell, Cell]]]:
        """Move one unit of class j from src to dst, compensating through a
        chain of other classes.  Returns the applied hops or None."""
        if self.y.get((j, src), 0) <= 0:
            return None
        if self.y.get((j, dst), 0) >= self.state.class_cells[j].get(dst, 0):
            return None
        parent: dict[Cell, tuple[Cell, int]] = {dst: (dst, 0)}
        frontier = deque([dst])
        expanded: set[int] = set()
        found = src == dst
        budget = 6000
        while frontier and not found and budget > 0:
            z = frontier.popleft()
            for j2 in sorted(self.donors_at.get(z, ())):
                if j2 == j or j2 in expanded:
                    continue
                expanded.add(j2)
                if self.y.get((j2, z), 0) <= 0:
                    continue
                for z2 in self.residual_cells(j2):
                    if z2 in parent:
                        continue
                    budget -= 1
                    parent[z2] = (z, j2)
                    if z2 == src:
                        found = True
                        break
                    frontier.append(z2)
                if found:
                    break
        if not found:
            return None
        hops: list[tuple[int, Cell, Cell]] = []
        node = src
        while node != dst:
            prev, j2 = parent[node]
            hops.append((j2, prev, node))
            node = prev
        self._apply(j, src, dst, hops)
        return hops

    def _apply(self, j, src, dst, hops):
        self._adjust(j, src, -1)
        self._adjust(j, dst, +1)
        for j2, z, z2 in hops:
            self._adjust(j2, z, -1)
            self._adjust(j2, z2, +1)

    def _adjust(self, j, cell, delta):
        key = (j, cell)
        val = self.y.get(key, 0) + delta
        if val < 0 or val > self.state.class_cells[j].get(cell, 0):
            raise InternalContractError("rotation broke a donation cap")
        if val:
            self.y[key] = val
        else:
            self.y.pop(key, None)
        donors = self.donors_at.setdefault(cell, set())
        if val > 0:
            donors.add(j)
        else:
            donors.discard(j)


def _repair_connectivity(
    state: AmalgamState,
    y: dict[tuple[int, Cell], int],
    trackers: dict[int, _ClassTracker],
    w: int,
    rng: random.Random,
):
    """Ensure every requested class keeps its merged component slotted."""
    if not trackers:
        return
    index = _RotationIndex(state, y)
    order = sorted(trackers)
    rng.shuffle(order)
    pending = deque(order)
    guard = 12 * len(trackers) + 24
    while pending:
        guard -= 1
        if guard < 0:
            raise _StepStuck(pending[0])
        j = pending.popleft()
        donations = [(cell, cnt) for (jj, cell), cnt in y.items() if jj == j]
        if not donations:
            raise _StepStuck(j)
        if any(cell[1] >= 2 for cell, _ in donations):
            continue  # a surviving slot inside the blob is guaranteed
        tracker = trackers[j]
        if tracker.blob_after(donations) >= 1:
            continue
        repaired = False
        sources = sorted(cell for cell, _ in donations)
        rng.shuffle(sources)
        targets = sorted(index.residual_cells(j), key=lambda c: (-c[1], c))[:32]
        counts = {cell: cnt for cell, cnt in donations}
        for dst in targets:
            for src in sources:
                if src == dst:
                    continue
                trial = dict(counts)
                trial[src] -= 1
                if not trial[src]:
                    del trial[src]
                trial[dst] = trial.get(dst, 0) + 1
                if tracker.blob_after(trial.items()) < 1:
                    continue
                hops = index.move(j, src, dst)
                if hops is None:
                    continue
                for t in {j2 for j2, _, _ in hops} & set(trackers):
                    if t not in pending:
                        pending.append(t)
                pending.append(j)
                repaired = True
                break
            if repaired:
                break
        if not repaired:
            raise _StepStuck(j)


def _do_split(
    state: AmalgamState,
    w: int,
    beta: int,
    step_index: int,
    trackers: dict[int, _ClassTracker],
    rng: random.Random,
) -> SplitStep:
    if w < 2:
        raise InvalidParams("splitting needs remaining weight at least 2")
    y = _solve_step(state, w, rng)
    if y is None:
        raise FairnessInfeasible(step_index, f"weight {w}")
    _repair_connectivity(state, y, trackers, w, rng)
    state.add_fixed_vertex(beta)
    step = SplitStep(step_index, w, beta, dict(sorted(y.items())))
    for (j, cell), cnt in sorted(y.items()):
        state.donate(j, cell, beta, cnt)
    for j, tracker in trackers.items():
        donations = [(cell, cnt) for (jj, cell), cnt in step.assignment.items() if jj == j]
        tracker.apply(beta, donations)
        if tracker.slots.get(tracker.uf.find(beta), 0) < 1:
            raise InternalContractError(f"class {j} stranded its new vertex at step {step_index}")
        remaining = w - 1
        if remaining >= 2 and state.alpha_deg[j] - tracker.wings() < remaining - 1:
            logger.warning(
                "class %d: detachment criterion slack went negative at step %d",
                j,
                step_index,
            )
    return step


def single_split(
    state: AmalgamState,
    w: int,
    connectivity_bias: Iterable[int] = (),
    seed: int = 0,
    new_vertex: Optional[int] = None,
) -> tuple[AmalgamState, SplitStep]:
    """Peel one vertex off alpha, fairly; the input state is not modified."""
    work = state.copy()
    if work.uncolored:
        raise InvalidParams("splitting needs a fully colored state")
    if new_vertex is None:
        new_vertex = max(work.fixed, default=0) + 1
    rng = random.Random(f"{seed}:single")
    trackers = {j: _ClassTracker(work, j) for j in connectivity_bias}
    try:
        step = _do_split(work, w, new_vertex, 1, trackers, rng)
    except _StepStuck as stuck:
        raise FairnessInfeasible(1, f"connectivity repair failed for class {stuck.color}")
    return work, step


def fair_detach(
    state: AmalgamState,
    p: int,
    connected_classes: Iterable[int] = (),
    seed: int = 0,
    new_ids: Optional[Sequence[int]] = None,
    retries: int = 8,
) -> DetachmentResult:
    """Replace alpha by p new vertices meeting both fairness contracts.

    For every color j in ``connected_classes`` the resulting class is
    connected; this requires r_j >= 2, a class connected at alpha, and the
    degree-minus-wings criterion, all checked up front.
    """
    connected = frozenset(connected_classes)
    if state.uncolored:
        raise InvalidParams("detachment needs a fully colored state")
    if p < 0:
        raise InvalidParams("p must be nonnegative")
    if new_ids is None:
        start = max(state.fixed, default=0)
        new_ids = tuple(range(start + 1, start + p + 1))
    else:
        new_ids = tuple(new_ids)
    if len(new_ids) != p:
        raise InvalidParams(f"need {p} new vertex ids, got {len(new_ids)}")
    if p == 0:
        if any(state.alpha_deg) or any(c[1] > 0 for c in state.mult):
            raise InvalidParams("p=0 but alpha still carries edges")
        return _finalize(state.copy(), [], new_ids, seed, connected, 1)

    orig_alpha_deg = list(state.alpha_deg)
    for j in sorted(connected):
        if state.r[j - 1] < 2:
            raise NecessityViolated(j, f"r_{j}={state.r[j-1]} < 2")
        if not check_connected_detachment_criterion(state, j, p):
            raise NecessityViolated(j, "degree minus wings below p-1")

    last_stuck = None
    for attempt in range(1, retries + 1):
        rng = random.Random(f"{seed}:{attempt}")
        work = state.copy()
        trackers = {j: _ClassTracker(work, j) for j in sorted(connected)}
        for j, tracker in trackers.items():
            if not tracker.all_components_slotted():
                raise NecessityViolated(j, "a component of the class has no edge at alpha")
        trace: list[SplitStep] = []
        try:
            for step_index, w in enumerate(range(p, 1, -1), start=1):
                trace.append(
                    _do_split(work, w, new_ids[step_index - 1], step_index, trackers, rng)
                )
            work.rename_alpha(new_ids[-1])
            result = _finalize(work, trace, new_ids, seed, connected, attempt)
        except _StepStuck as stuck:
            last_stuck = stuck.color
            logger.info("detachment attempt %d stuck on class %d, reseeding", attempt, stuck.color)
            continue
        bad = _disconnected_classes(result, connected)
        if bad:
            last_stuck = bad[0]
            logger.info("attempt %d left classes %s disconnected, reseeding", attempt, bad)
            continue
        _verify_contracts(state, orig_alpha_deg, result, p)
        return result
    raise ConnectivityRepairExhausted(last_stuck, retries)


def _disconnected_classes(result: DetachmentResult, connected: frozenset[int]) -> list[int]:
    bad = []
    verts = set(result.hypergraph.vertices)
    for j in sorted(connected):
        uf = UnionFind()
        for v in verts:
            uf.add(v)
        for e, cnt in result.coloring.class_edges(j):
            for v in e[1:]:
                uf.union(e[0], v)
        if len(uf.groups()) != 1:
            bad.append(j)
    return bad


def _finalize(
    work: AmalgamState,
    trace: list[SplitStep],
    new_ids: tuple[int, ...],
    seed: int,
    connected: frozenset[int],
    attempts: int,
) -> DetachmentResult:
    verts = sorted(work.deg)
    H = MultiHypergraph(verts)
    for (X, i), cnt in work.mult.items():
        if i != 0:
            raise InternalContractError("alpha slots survived the detachment")
        H.edges[X] = cnt
    coloring = Coloring(work.k)
    per_edge: dict[Edge, list[int]] = {}
    for j in range(1, work.k + 1):
        for (X, i), cnt in work.class_cells[j].items():
            per_edge.setdefault(X, []).extend([j] * cnt)
    for e, cols in per_edge.items():
        coloring.by_edge[e] = sorted(cols)
    return DetachmentResult(H, coloring, trace, new_ids, seed, connected, attempts)


def _verify_contracts(
    original: AmalgamState,
    orig_alpha_deg: list[int],
    result: DetachmentResult,
    p: int,
) -> None:
    lam, h = original.lam, original.h
    n_final = len(result.hypergraph.vertices)
    if len(result.hypergraph.edges) != binom(n_final, h):
        raise InternalContractError("not every h-set is present after detachment")
    if any(cnt != lam for cnt in result.hypergraph.edges.values()):
        raise InternalContractError("an h-set has multiplicity != lambda")
    deg: dict[int, list[int]] = {
        v: [0] * (original.k + 1) for v in result.new_vertices
    }
    for e, cols in result.coloring.by_edge.items():
        for j in cols:
            for v in e:
                if v in deg:
                    deg[v][j] += 1
    for v in result.new_vertices:
        for j in range(1, original.k + 1):
            d = orig_alpha_deg[j]
            if not (d // p <= deg[v][j] <= -(-d // p)):
                raise InternalContractError(
                    f"vertex {v} got degree {deg[v][j]} in class {j}, share {d}/{p}"
                )
