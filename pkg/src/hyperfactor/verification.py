"""Ground-truth verifier and an exhaustive oracle for tiny instances.

The verifier re-derives everything from the raw edge lists: class degrees,
multiplicities, connectivity, preservation of the input coloring.  The oracle
is an independent backtracking search over all colorings of the remaining
copies, so pipeline and oracle can cross-check each other.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

from .arithmetic import check_admissible
from .connectivity import UnionFind, WingReport, is_connected_class
from .errors import CapExceeded, VertexMismatch
from .model import (
    UNCOLORED,
    Coloring,
    Edge,
    Instance,
    MultiHypergraph,
    binom,
    complete_hypergraph,
)


@dataclass
class ClassReport:
    color: int
    r: int
    regular: bool
    spanning: bool
    connected: Optional[bool] = None


@dataclass
class Certificate:
    admissibility_ok: bool
    all_colored: bool
    multiplicity_ok: bool
    per_class: list[ClassReport]
    preservation_ok: Optional[bool] = None
    connected_requested: frozenset[int] = frozenset()
    wing_reports: list[WingReport] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        if not (self.admissibility_ok and self.all_colored and self.multiplicity_ok):
            return False
        if self.preservation_ok is False:
            return False
        for rep in self.per_class:
            if not (rep.regular and rep.spanning):
                return False
            if rep.color in self.connected_requested and rep.connected is not True:
                return False
        return True


def verify_factorization(
    F: MultiHypergraph,
    C: Coloring,
    inst: Instance,
    connected_classes: Iterable[int] = (),
    input_G: Optional[MultiHypergraph] = None,
    input_C: Optional[Coloring] = None,
) -> Certificate:
    """Check that (F, C) is an r-factorization of the complete host and that
    it extends the given input coloring, copy for copy."""
    connected = frozenset(connected_classes)
    n, h, lam = inst.n, inst.h, inst.lam

    multiplicity_ok = (
        len(F.edges) == binom(len(F.vertices), h)
        and all(cnt == lam for cnt in F.edges.values())
        and all(len(e) == h and len(set(e)) == h for e in F.edges)
        and len(F.vertices) == n
    )

    all_colored = True
    deg: dict[int, list[int]] = {v: [0] * (inst.k + 1) for v in F.vertices}
    for e, cnt in F.edges.items():
        cols = C.colors_of(e)
        if len(cols) != cnt or any(j == UNCOLORED for j in cols):
            all_colored = False
        for j in cols:
            if j == UNCOLORED:
                continue
            for v in e:
                deg[v][j] += 1

    per_class = []
    for j in range(1, inst.k + 1):
        rj = inst.r[j - 1]
        degs = [deg[v][j] for v in F.vertices]
        regular = all(d == rj for d in degs)
        spanning = all(d >= 1 for d in degs)
        conn = None
        if j in connected:
            conn = is_connected_class(dict(C.class_edges(j)), F.vertices)
        per_class.append(ClassReport(j, rj, regular, spanning, conn))

    preservation = None
    if input_C is not None:
        preservation = True
        try:
            preservation = verify_extension(input_G, input_C, F, C)
        except VertexMismatch:
            preservation = False

    return Certificate(
        admissibility_ok=check_admissible(inst),
        all_colored=all_colored,
        multiplicity_ok=multiplicity_ok,
        per_class=per_class,
        preservation_ok=preservation,
        connected_requested=connected,
    )


def verify_extension(
    input_G: Optional[MultiHypergraph],
    input_C: Coloring,
    out_H: MultiHypergraph,
    out_C: Coloring,
) -> bool:
    """True iff every colored input copy appears in the output, same color."""
    if input_G is not None and not set(input_G.vertices) <= set(out_H.vertices):
        raise VertexMismatch("input vertices missing from the output")
    for e, cols in input_C.by_edge.items():
        out_cols = out_C.colors_of(e)
        for j in set(cols):
            if j == UNCOLORED:
                continue
            if cols.count(j) > out_cols.count(j):
                return False
    return True


@dataclass
class OracleOutcome:
    found: bool
    count: int
    witness: Optional[Coloring] = None
    capped: bool = False


def oracle_extend(
    input_C: Coloring,
    inst: Instance,
    connected_classes: Iterable[int] = (),
    max_copies: int = 64,
    count_cap: int = 10**6,
    first_only: bool = False,
) -> OracleOutcome:
    """Exhaustively decide whether the input extends to an r-factorization.

    Counts extensions up to ``count_cap``, where copies of the same h-set are
    interchangeable (their color multiset is what is counted).  Bails out with
    CapExceeded when the target host has more than ``max_copies`` copies.
    """
    n, h, lam, k = inst.n, inst.h, inst.lam, inst.k
    total = lam * binom(n, h)
    if total > max_copies:
        raise CapExceeded(f"{total} copies exceed the oracle cap {max_copies}")
    connected = frozenset(connected_classes)
    if not check_admissible(inst):
        return OracleOutcome(False, 0)

    r = inst.r
    deg = {v: [0] * (k + 1) for v in range(1, n + 1)}
    work: dict[Edge, list[int]] = {}
    host_sets = sorted(complete_hypergraph(n, h, 1).edges)
    for e in host_sets:
        work[e] = [UNCOLORED] * lam
    for e, cols in input_C.by_edge.items():
        if not set(e) <= set(range(1, n + 1)):
            raise VertexMismatch(f"input edge {e} outside host")
        fixed = [j for j in cols if j != UNCOLORED]
        for idx, j in enumerate(fixed):
            work[e][idx] = j
            for v in e:
                deg[v][j] += 1
                if deg[v][j] > r[j - 1]:
                    return OracleOutcome(False, 0)

    slots = [(e, idx) for e in host_sets for idx in range(lam) if work[e][idx] == UNCOLORED]
    outcome = OracleOutcome(False, 0)

    def feasible_colors(e):
        return [j for j in range(1, k + 1) if all(deg[v][j] < r[j - 1] for v in e)]

    def at_leaf():
        if connected:
            cview = Coloring(k, work)
            for j in connected:
                if not is_connected_class(dict(cview.class_edges(j)), range(1, n + 1)):
                    return
        outcome.found = True
        outcome.count += 1
        if outcome.witness is None:
            outcome.witness = Coloring(k, {e: list(c) for e, c in work.items()})

    def rec(pos: int):
        if outcome.count >= count_cap:
            outcome.capped = True
            return
        if first_only and outcome.found:
            return
        if pos == len(slots):
            at_leaf()
            return
        e, idx = slots[pos]
        lower = 0
        if idx > 0 and work[e][idx - 1] != UNCOLORED:
            # copies of one h-set carry nondecreasing colors
            lower = work[e][idx - 1]
        for j in feasible_colors(e):
            if j < lower:
                continue
            work[e][idx] = j
            for v in e:
                deg[v][j] += 1
            rec(pos + 1)
            work[e][idx] = UNCOLORED
            for v in e:
                deg[v][j] -= 1

    rec(0)
    return outcome


@dataclass
class SearchFinding:
    inst: Instance
    coloring: Coloring
    note: str


def search_counterexample(
    h: int,
    m_range: Iterable[int],
    n_range: Iterable[int],
    lam: int = 1,
    max_copies: int = 40,
    colorings_per_instance: int = 12,
    seed: int = 0,
    require_bound: bool = False,
) -> list[SearchFinding]:
    """Probe tiny instances for admissible-but-inextendable partial colorings.

    This is evidence gathering, not proof: each finding carries the witness
    coloring so it can be replayed.
    """
    import random as _random

    from .model import is_partial_factorization

    rng = _random.Random(seed)
    findings: list[SearchFinding] = []
    for m in m_range:
        if m < h:
            continue
        for n in n_range:
            if n < m:
                continue
            if require_bound and n < (h - 1) * (2 * m - 1):
                continue
            if lam * binom(n, h) > max_copies:
                continue
            d = lam * binom(n - 1, h - 1)
            for r_vec in _admissible_vectors(n, h, lam, d):
                inst = Instance(n=n, h=h, lam=lam, m=m, r=r_vec)
                for C in _candidate_colorings(m, h, lam, r_vec, rng, colorings_per_instance):
                    G = complete_hypergraph(m, h, lam)
                    if not is_partial_factorization(G, C, r_vec).ok:
                        continue
                    out = oracle_extend(C, inst, max_copies=max_copies, first_only=True)
                    if not out.found:
                        findings.append(
                            SearchFinding(inst, C, "admissible but no extension found")
                        )
    return findings


def _admissible_vectors(n, h, lam, d, limit=4):
    import math

    g = h // math.gcd(n, h)
    if d % g:
        return
    units = d // g
    seen = 0
    for r in sorted({g, 2 * g, d, g * max(1, units // 2)}):
        if r < 1 or d % r:
            continue
        if (r * n) % h:
            continue
        yield (r,) * (d // r)
        seen += 1
        if seen >= limit:
            return


def _candidate_colorings(m, h, lam, r_vec, rng, count):
    from .randomgen import random_partial_coloring

    G = complete_hypergraph(m, h, lam)
    yield Coloring(len(r_vec))  # the empty coloring
    greedy = Coloring(len(r_vec))
    for e in sorted(G.edges):
        for idx in range(lam):
            for j in range(1, len(r_vec) + 1):
                trial = greedy.copy()
                trial.set_color(e, idx, j)
                from .model import is_partial_factorization

                if is_partial_factorization(G, trial, r_vec).ok:
                    greedy = trial
                    break
    yield greedy  # lowest-color greedy fill
    for _ in range(count - 2):
        yield random_partial_coloring(m, h, lam, r_vec, rng, fraction=rng.uniform(0.3, 1.0))
