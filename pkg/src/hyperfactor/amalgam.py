"""Amalgamated hypergraph and the three coloring phases.

The amalgam collapses the n-m future vertices into one distinguished vertex
alpha.  Edges are kept as sparse cells keyed by (X, i): X is the sorted tuple
of ordinary vertices in the edge and i the number of alpha slots, |X| + i = h.
Cell (X, 0) entries are the edges of the small host itself.

Phases run strictly in order: greedy coloring of the cells with
1 <= i <= h-2 (plus any uncolored base edges first), then the forced
deficit-filling of the i = h-1 cells, then the closed-form budget for the
pure-alpha cells.  After phase 2 every ordinary vertex has class degree
exactly r_j, and after phase 3 alpha has class degree r_j*(n-m).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from itertools import combinations

from .errors import (
    CapacityMismatch,
    ColoringStuck,
    InvalidParams,
    NegativeBudget,
    NotPartialFactorization,
)
from .model import (
    UNCOLORED,
    Coloring,
    Edge,
    Instance,
    MultiHypergraph,
    binom,
    is_partial_factorization,
)

ALPHA = 0  # reserved id; ordinary vertices are positive

Cell = tuple[Edge, int]

PHASE_BUILT = 0
PHASE_STARS = 1
PHASE_PENULTIMATE = 2
PHASE_FULL_ALPHA = 3


class AmalgamState:
    """Sparse multiplicity tables of the amalgam, colored and not."""

    __slots__ = (
        "inst",
        "base",
        "fixed",
        "alpha",
        "k",
        "r",
        "h",
        "lam",
        "mult",
        "uncolored",
        "class_cells",
        "deg",
        "alpha_deg",
        "level_mult",
        "phase",
    )

    def __init__(self, inst: Instance, base: tuple[int, ...]):
        self.inst = inst
        self.base = tuple(sorted(base))
        self.fixed: list[int] = list(self.base)
        self.alpha = ALPHA
        self.k = inst.k
        self.r = inst.r
        self.h = inst.h
        self.lam = inst.lam
        self.mult: dict[Cell, int] = {}
        self.uncolored: dict[Cell, int] = {}
        # class_cells[j] maps cell -> colored multiplicity; index 0 unused
        self.class_cells: list[dict[Cell, int]] = [dict() for _ in range(inst.k + 1)]
        self.deg: dict[int, list[int]] = {v: [0] * (inst.k + 1) for v in self.base}
        self.alpha_deg: list[int] = [0] * (inst.k + 1)
        # level_mult[j][l] = colored multiplicity of cells with l alpha slots
        self.level_mult: list[list[int]] = [[0] * (inst.h + 1) for _ in range(inst.k + 1)]
        self.phase = PHASE_BUILT

    # -- bookkeeping ------------------------------------------------------

    def _add_colored(self, j: int, cell: Cell, count: int) -> None:
        if count == 0:
            return
        X, i = cell
        cells = self.class_cells[j]
        cells[cell] = cells.get(cell, 0) + count
        for x in X:
            self.deg[x][j] += count
        self.alpha_deg[j] += i * count
        self.level_mult[j][i] += count

    def _take_uncolored(self, cell: Cell, count: int) -> None:
        left = self.uncolored.get(cell, 0) - count
        if left < 0:
            raise InvalidParams(f"cell {cell} has no {count} uncolored copies")
        if left:
            self.uncolored[cell] = left
        else:
            self.uncolored.pop(cell, None)

    def color_copies(self, j: int, cell: Cell, count: int) -> None:
        self._take_uncolored(cell, count)
        self._add_colored(j, cell, count)

    def class_alpha_level(self, j: int, level: int) -> int:
        """Colored multiplicity of *alpha^level cells in class j."""
        return self.level_mult[j][level]

    # -- detachment support ------------------------------------------------

    def add_fixed_vertex(self, v: int) -> None:
        if v in self.deg or v == self.alpha:
            raise InvalidParams(f"vertex {v} already present")
        self.fixed.append(v)
        self.deg[v] = [0] * (self.k + 1)

    def donate(self, j: int, cell: Cell, beta: int, count: int) -> Cell:
        """Move one alpha slot of `count` copies of a colored cell to beta."""
        if count <= 0:
            raise InvalidParams("donation count must be positive")
        X, i = cell
        if i < 1:
            raise InvalidParams(f"cell {cell} has no alpha slots")
        cells = self.class_cells[j]
        have = cells.get(cell, 0)
        if have < count:
            raise InvalidParams(f"class {j} holds {have} copies of {cell}, need {count}")
        new_cell = (tuple(sorted(X + (beta,))), i - 1)
        if have == count:
            del cells[cell]
        else:
            cells[cell] = have - count
        cells[new_cell] = cells.get(new_cell, 0) + count
        self.deg[beta][j] += count
        self.alpha_deg[j] -= count
        self.level_mult[j][i] -= count
        self.level_mult[j][i - 1] += count
        left = self.mult[cell] - count
        if left:
            self.mult[cell] = left
        else:
            del self.mult[cell]
        self.mult[new_cell] = self.mult.get(new_cell, 0) + count
        return new_cell

    def rename_alpha(self, last: int) -> None:
        """Replace the remaining weight-one alpha by a real vertex."""
        self.add_fixed_vertex(last)
        slotted = [c for c in self.mult if c[1] > 0]
        for X, i in slotted:
            if i != 1:
                raise InvalidParams(f"cell ({X}, {i}) cannot host a single vertex")
        for cell in slotted:
            X, _ = cell
            new_cell = (tuple(sorted(X + (last,))), 0)
            self.mult[new_cell] = self.mult.get(new_cell, 0) + self.mult.pop(cell)
            for j in range(1, self.k + 1):
                cnt = self.class_cells[j].pop(cell, 0)
                if not cnt:
                    continue
                cells = self.class_cells[j]
                cells[new_cell] = cells.get(new_cell, 0) + cnt
                self.deg[last][j] += cnt
                self.alpha_deg[j] -= cnt
                self.level_mult[j][1] -= cnt
                self.level_mult[j][0] += cnt
        if any(self.alpha_deg):
            raise InvalidParams("alpha still carries colored slots after rename")

    def degree_in_class(self, v: int, j: int) -> int:
        if v == self.alpha:
            return self.alpha_deg[j]
        return self.deg[v][j]

    def total_copies(self) -> int:
        return sum(self.mult.values())

    def cell_class_counts(self, cell: Cell) -> dict[int, int]:
        return {
            j: self.class_cells[j][cell]
            for j in range(1, self.k + 1)
            if cell in self.class_cells[j]
        }

    def check_conservation(self) -> None:
        for cell, total in self.mult.items():
            colored = sum(cells.get(cell, 0) for cells in self.class_cells[1:])
            if colored + self.uncolored.get(cell, 0) != total:
                raise CapacityMismatch(f"conservation broken at cell {cell}")

    def copy(self) -> "AmalgamState":
        st = AmalgamState.__new__(AmalgamState)
        st.inst = self.inst
        st.base = self.base
        st.fixed = list(self.fixed)
        st.alpha = self.alpha
        st.k = self.k
        st.r = self.r
        st.h = self.h
        st.lam = self.lam
        st.mult = dict(self.mult)
        st.uncolored = dict(self.uncolored)
        st.class_cells = [dict(c) for c in self.class_cells]
        st.deg = {v: list(row) for v, row in self.deg.items()}
        st.alpha_deg = list(self.alpha_deg)
        st.level_mult = [list(row) for row in self.level_mult]
        st.phase = self.phase
        return st

    def snapshot_key(self):
        """Hashable content view, used by determinism tests."""
        return (
            tuple(sorted(self.mult.items())),
            tuple(sorted(self.uncolored.items())),
            tuple(tuple(sorted(c.items())) for c in self.class_cells),
        )


def build_amalgam(G: MultiHypergraph, C: Coloring, inst: Instance) -> AmalgamState:
    """Attach the uncolored star cells of the future vertices to the colored
    small host.  Cell (X, i) starts with lam*C(n-m, i) copies."""
    report = is_partial_factorization(G, C, inst.r)
    if not report.ok:
        raise NotPartialFactorization(f"input exceeds caps at {report.violations[:5]}")
    if set(G.vertices) - set(range(1, inst.m + 1)):
        raise InvalidParams("input vertices must lie in 1..m")
    C.validate_against(G)

    st = AmalgamState(inst, tuple(range(1, inst.m + 1)))
    n, m, h, lam = inst.n, inst.m, inst.h, inst.lam

    for e, cnt in G.edges.items():
        if len(e) != h or len(set(e)) != h:
            raise InvalidParams(f"input edge {e} is not an h-set")
        if cnt > lam:
            raise NotPartialFactorization(f"{cnt} copies of {e} exceed lambda={lam}")
    for size in range(0, h):
        star = lam * binom(n - m, h - size)
        if star == 0:
            continue
        for X in combinations(range(1, m + 1), size):
            cell = (X, h - size)
            st.mult[cell] = star
            st.uncolored[cell] = star
    for e, cnt in sorted(G.edges.items()):
        cell = (e, 0)
        st.mult[cell] = lam
        st.uncolored[cell] = lam
        cols = C.colors_of(e)
        for j in cols:
            if j != UNCOLORED:
                st.color_copies(j, cell, 1)
    # remaining copies of host h-sets that G does not carry stay uncolored
    for X in combinations(range(1, m + 1), h):
        cell = (X, 0)
        if cell not in st.mult:
            st.mult[cell] = lam
            st.uncolored[cell] = lam

    if st.total_copies() != lam * binom(n, h):
        raise CapacityMismatch("amalgam copy total is off")
    d = lam * binom(n - 1, h - 1)
    total_deg = {v: 0 for v in st.base}
    for (X, _), c in st.mult.items():
        for x in X:
            total_deg[x] += c
    for v, tot in total_deg.items():
        if tot != d:
            raise CapacityMismatch(f"vertex {v} has amalgam degree {tot}, expected {d}")
    return st


def color_star_edges(state: AmalgamState) -> AmalgamState:
    """Greedily color cells with 1 <= i <= h-2 alpha slots (uncolored base
    edges first), smallest color index with capacity at every ordinary vertex.

    Raises ColoringStuck when no color fits; with the recommended host size
    this cannot happen, below it the diagnostic is the interesting output.
    """
    if state.phase != PHASE_BUILT:
        raise InvalidParams("star phase must run first")
    inst = state.inst
    if inst.n < (inst.h - 1) * (2 * inst.m - 1):
        warnings.warn(
            f"n={inst.n} below the guaranteed bound {(inst.h - 1) * (2 * inst.m - 1)};"
            " the greedy phase may get stuck",
            stacklevel=2,
        )
    r = state.r
    for i in range(0, state.h - 1):
        cells = sorted(c for c in state.uncolored if c[1] == i)
        for cell in cells:
            X, _ = cell
            remaining = state.uncolored.get(cell, 0)
            j = 1
            while remaining > 0 and j <= state.k:
                room = min(r[j - 1] - state.deg[x][j] for x in X)
                if room > 0:
                    take = min(room, remaining)
                    state.color_copies(j, cell, take)
                    remaining -= take
                j += 1
            if remaining > 0:
                raise ColoringStuck(X, i)
    state.phase = PHASE_STARS
    return state


def color_penultimate_edges(state: AmalgamState) -> AmalgamState:
    """Fill each vertex's class deficits with its (x, h-1 alpha) copies.

    The deficits of x sum to exactly lam*C(n-m, h-1), the number of such
    copies, so the assignment is forced.
    """
    if state.phase != PHASE_STARS:
        raise InvalidParams("penultimate phase must follow the star phase")
    inst = state.inst
    expected = inst.lam * binom(inst.n - inst.m, inst.h - 1)
    for x in state.base:
        cell = ((x,), state.h - 1)
        deficits = [state.r[j - 1] - state.deg[x][j] for j in range(1, state.k + 1)]
        if any(df < 0 for df in deficits):
            raise CapacityMismatch(f"vertex {x} above cap before penultimate phase")
        if sum(deficits) != expected:
            raise CapacityMismatch(
                f"vertex {x} deficits sum to {sum(deficits)}, expected {expected}"
            )
        for j, df in enumerate(deficits, start=1):
            if df:
                state.color_copies(j, cell, df)
    state.phase = PHASE_PENULTIMATE
    return state


def color_full_alpha_edges(state: AmalgamState) -> AmalgamState:
    """Give class j its closed-form share of the pure-alpha cell."""
    if state.phase != PHASE_PENULTIMATE:
        raise InvalidParams("full-alpha phase must follow the penultimate phase")
    inst = state.inst
    n, m, h = inst.n, inst.m, inst.h
    if n < h * m:
        warnings.warn(
            f"n={n} < h*m={h * m}: the pure-alpha budgets can go negative",
            stacklevel=2,
        )
    cell = ((), h)
    budgets = []
    for j in range(1, state.k + 1):
        rj = state.r[j - 1]
        if rj * n % h != 0:
            raise InvalidParams(f"h={h} does not divide r_{j}*n={rj * n}")
        b = rj * n // h - rj * m
        for level in range(0, h - 1):
            b += (h - level - 1) * state.level_mult[j][level]
        if b < 0:
            raise NegativeBudget(j, b)
        budgets.append(b)
    total = inst.lam * binom(n - m, h)
    if sum(budgets) != total:
        raise CapacityMismatch(f"pure-alpha budgets sum to {sum(budgets)}, expected {total}")
    for j, b in enumerate(budgets, start=1):
        if b:
            state.color_copies(j, cell, b)
    state.phase = PHASE_FULL_ALPHA
    return state


def run_phases(state: AmalgamState) -> AmalgamState:
    color_star_edges(state)
    color_penultimate_edges(state)
    color_full_alpha_edges(state)
    return state


@dataclass
class IdentityReport:
    base_regular: dict[int, bool] = field(default_factory=dict)
    slot_identity: dict[int, bool] = field(default_factory=dict)
    alpha_degree: dict[int, bool] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return (
            all(self.base_regular.values())
            and all(self.slot_identity.values())
            and all(self.alpha_degree.values())
        )


def assert_amalgam_identities(state: AmalgamState) -> IdentityReport:
    """Check, per color: base degrees equal r_j, the slot-count identity
    r_j*m = sum_l (h-l)*mult_j(*alpha^l), and deg(alpha, j) = r_j*(n-m)."""
    inst = state.inst
    rep = IdentityReport()
    for j in range(1, state.k + 1):
        rj = state.r[j - 1]
        rep.base_regular[j] = all(state.deg[x][j] == rj for x in state.base)
        lhs = rj * inst.m
        rhs = sum((state.h - l) * state.level_mult[j][l] for l in range(0, state.h))
        rep.slot_identity[j] = lhs == rhs
        rep.alpha_degree[j] = state.alpha_deg[j] == rj * (inst.n - inst.m)
    return rep
