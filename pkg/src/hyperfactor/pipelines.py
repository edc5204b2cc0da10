"""End-to-end embedding pipelines for the four main theorems.

Each pipeline validates its hypotheses, builds and colors the amalgam,
detaches, and verifies the result; an invalid output is never returned
silently.  The hole-filling pipelines first color a one-vertex amalgam within
per-color budgets and detach it into the missing edges of the small host,
then hand the completed partial factorization to the plain pipeline.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .amalgam import (
    PHASE_FULL_ALPHA,
    AmalgamState,
    assert_amalgam_identities,
    build_amalgam,
    run_phases,
)
from .arithmetic import (
    admissibility_failures,
    check_admissible,
    derive_b,
    theorem12_hypothesis,
    theorem14_hypothesis,
    validate_subsets,
)
from .connectivity import count_wings, is_irregular, theorem13_necessity_check
from .detachment import (
    DetachmentResult,
    check_connected_detachment_criterion,
    fair_detach,
)
from .errors import (
    BudgetInfeasible,
    HypothesisNotSatisfied,
    InternalContractError,
    InvalidParams,
    MissingS,
    NecessityViolated,
    NotAdmissible,
)
from .model import (
    UNCOLORED,
    Coloring,
    Instance,
    MultiHypergraph,
    binom,
    complete_hypergraph,
    is_partial_factorization,
)
from .verification import Certificate, verify_factorization

MODES = ("THM11", "THM12", "THM13", "THM14")


@dataclass
class EmbeddingJob:
    inst: Instance
    coloring: Coloring
    mode: str = "THM11"
    A: frozenset[int] = frozenset()
    seed: int = 0

    def __post_init__(self):
        if self.mode not in MODES:
            raise InvalidParams(f"unknown mode {self.mode!r}")
        self.A = frozenset(self.A)


@dataclass
class EmbeddingOutcome:
    job: EmbeddingJob
    result: DetachmentResult
    certificate: Certificate
    overlay: Optional[Coloring] = None  # completed small-host coloring (hole modes)


def _require_admissible(inst: Instance) -> None:
    if not check_admissible(inst):
        raise NotAdmissible("; ".join(admissibility_failures(inst)))


def _input_host(inst: Instance) -> MultiHypergraph:
    return complete_hypergraph(inst.m, inst.h, inst.lam)


def _completed_amalgam(inst: Instance, C: Coloring) -> AmalgamState:
    host = _input_host(inst)
    state = build_amalgam(host, C, inst)
    run_phases(state)
    report = assert_amalgam_identities(state)
    if not report.ok:
        raise InternalContractError("amalgam identities failed after the phases")
    return state


def _certify(
    job: EmbeddingJob,
    result: DetachmentResult,
    state: AmalgamState,
    input_C: Coloring,
) -> Certificate:
    cert = verify_factorization(
        result.hypergraph,
        result.coloring,
        job.inst,
        connected_classes=job.A,
        input_G=_input_host(job.inst),
        input_C=input_C,
    )
    cert.wing_reports = [count_wings(state, j) for j in range(1, job.inst.k + 1)]
    if not cert.passed:
        raise InternalContractError("pipeline output failed verification")
    return cert


def _reorder_with_input(final_C: Coloring, input_C: Coloring) -> None:
    """Put the input's colored copies first in each edge's copy list."""
    for e, cols in input_C.by_edge.items():
        fixed = [j for j in cols if j != UNCOLORED]
        if not fixed:
            continue
        rest = list(final_C.by_edge.get(e, []))
        try:
            for j in fixed:
                rest.remove(j)
        except ValueError:
            raise InternalContractError(f"input copy of {e} lost by the pipeline")
        final_C.by_edge[e] = fixed + rest


def embed_thm11(job: EmbeddingJob) -> EmbeddingOutcome:
    """Extend a partial r-factorization of the full small host."""
    inst = job.inst
    if job.A:
        raise InvalidParams("connectivity requests go through the THM13/THM14 modes")
    _require_admissible(inst)
    state = _completed_amalgam(inst, job.coloring)
    detach_state = state.copy()
    result = fair_detach(
        detach_state,
        p=inst.n - inst.m,
        connected_classes=job.A,
        seed=job.seed,
        new_ids=range(inst.m + 1, inst.n + 1),
    )
    _reorder_with_input(result.coloring, job.coloring)
    cert = _certify(job, result, state, job.coloring)
    return EmbeddingOutcome(job, result, cert)


def embed_thm13(job: EmbeddingJob) -> EmbeddingOutcome:
    """As embed_thm11, with the classes in A forced connected."""
    inst = job.inst
    _require_admissible(inst)
    necessity = theorem13_necessity_check(job.coloring, inst.r, job.A)
    for j in necessity.failures():
        raise NecessityViolated(j, necessity.results[j][1])
    state = _completed_amalgam(inst, job.coloring)
    p = inst.n - inst.m
    for j in sorted(job.A):
        wings = count_wings(state, j)
        if wings.total > wings.bound:
            raise InternalContractError(
                f"wing bound violated for class {j}: {wings.total} > {wings.bound}"
            )
        if not check_connected_detachment_criterion(state, j, p):
            raise InternalContractError(f"connected-detachment criterion fails for class {j}")
    result = fair_detach(
        state.copy(),
        p=p,
        connected_classes=job.A,
        seed=job.seed,
        new_ids=range(inst.m + 1, inst.n + 1),
    )
    _reorder_with_input(result.coloring, job.coloring)
    cert = _certify(job, result, state, job.coloring)
    return EmbeddingOutcome(job, result, cert)


def _hole_budgets(inst: Instance, A: frozenset[int]) -> list[int]:
    """Per-color caps for the hole coloring; A holds back one degree unit."""
    B = derive_b(inst)
    budgets = []
    for i in range(1, inst.k + 1):
        ri = inst.r[i - 1]
        if i <= inst.q:
            si = inst.s[i - 1]
            drop = 1 if (i in A and i in B) else 0
            budgets.append(max(0, (ri - si - drop) * inst.m // inst.h))
        else:
            drop = 1 if i in A else 0
            budgets.append(max(0, (ri - drop) * inst.m // inst.h))
    return budgets


def _build_hole_state(inst: Instance, counts: list[int]) -> AmalgamState:
    state = AmalgamState(inst, base=())
    cell = ((), inst.h)
    total = inst.lam * binom(inst.m, inst.h)
    state.mult[cell] = total
    state.uncolored[cell] = total
    for j, cnt in enumerate(counts, start=1):
        if cnt:
            state.color_copies(j, cell, cnt)
    state.phase = PHASE_FULL_ALPHA
    return state


def _fill_hole(inst: Instance, budgets: list[int], seed: int) -> DetachmentResult:
    total = inst.lam * binom(inst.m, inst.h)
    if sum(budgets) < total:
        raise BudgetInfeasible(
            f"hole needs {total} copies, budgets only cover {sum(budgets)}"
        )
    counts = []
    remaining = total
    for b in budgets:
        take = min(b, remaining)
        counts.append(take)
        remaining -= take
    state = _build_hole_state(inst, counts)
    return fair_detach(
        state,
        p=inst.m,
        connected_classes=(),
        seed=seed,
        new_ids=range(1, inst.m + 1),
    )


def _overlay(inst: Instance, input_C: Coloring, hole: DetachmentResult) -> Coloring:
    """Color the host copies missing from the input with hole colors."""
    lam = inst.lam
    C1 = Coloring(inst.k)
    for S in complete_hypergraph(inst.m, inst.h, 1).edges:
        in_cols = [j for j in input_C.colors_of(S) if j != UNCOLORED]
        if len(in_cols) > lam:
            raise InvalidParams(f"{len(in_cols)} colored copies of {S} exceed lambda")
        hole_cols = sorted(hole.coloring.colors_of(S))
        need = lam - len(in_cols)
        C1.by_edge[S] = in_cols + hole_cols[:need]
    return C1


def _check_hole_input(inst: Instance, C: Coloring) -> None:
    if inst.s is None:
        raise MissingS("hole-filling requires the s-vector")
    for e, cols in C.by_edge.items():
        for j in cols:
            if j != UNCOLORED and j > inst.q:
                raise InvalidParams(f"input colors must lie in 1..q={inst.q}, found {j}")
    caps = list(inst.s) + [inst.r[i] for i in range(inst.q, inst.k)]
    host = _input_host(inst)
    C.validate_against(host)
    rep = is_partial_factorization(host, C, caps)
    if not rep.ok:
        raise InvalidParams(f"input is not a partial s-factorization: {rep.violations[:5]}")


def embed_thm12(job: EmbeddingJob) -> EmbeddingOutcome:
    """Embed a partial s-factorization of a sub-host via hole filling."""
    inst = job.inst
    _check_hole_input(inst, job.coloring)
    if not theorem12_hypothesis(inst):
        raise HypothesisNotSatisfied("color budgets cannot cover the hole")
    _require_admissible(inst)
    hole = _fill_hole(inst, _hole_budgets(inst, frozenset()), job.seed)
    overlay = _overlay(inst, job.coloring, hole)
    if not is_partial_factorization(_input_host(inst), overlay, inst.r).ok:
        raise InternalContractError("hole overlay broke the degree caps")
    inner = EmbeddingJob(inst=inst, coloring=overlay, mode="THM11", seed=job.seed)
    out = embed_thm11(inner)
    _reorder_with_input(out.result.coloring, job.coloring)
    cert = verify_factorization(
        out.result.hypergraph,
        out.result.coloring,
        inst,
        connected_classes=(),
        input_G=_input_host(inst),
        input_C=job.coloring,
    )
    cert.wing_reports = out.certificate.wing_reports
    if not cert.passed:
        raise InternalContractError("hole-filling output failed verification")
    return EmbeddingOutcome(job, out.result, cert, overlay=overlay)


def embed_thm14(job: EmbeddingJob) -> EmbeddingOutcome:
    """Hole filling that keeps the classes in A extendable to connected factors."""
    inst = job.inst
    _check_hole_input(inst, job.coloring)
    B = derive_b(inst)
    validate_subsets(inst, job.A, B)
    if not theorem14_hypothesis(inst, job.A, B):
        raise HypothesisNotSatisfied("connected color budgets cannot cover the hole")
    _require_admissible(inst)
    for j in sorted(job.A):
        rj = inst.r[j - 1]
        if not is_irregular(dict(job.coloring.class_edges(j)), rj):
            raise NecessityViolated(j, f"input class {j} has an {rj}-regular component")
    hole = _fill_hole(inst, _hole_budgets(inst, job.A), job.seed)
    overlay = _overlay(inst, job.coloring, hole)
    if not is_partial_factorization(_input_host(inst), overlay, inst.r).ok:
        raise InternalContractError("hole overlay broke the degree caps")
    for j in sorted(job.A):
        if not is_irregular(dict(overlay.class_edges(j)), inst.r[j - 1]):
            raise InternalContractError(f"overlay made class {j} regular somewhere")
    inner = EmbeddingJob(inst=inst, coloring=overlay, mode="THM13", A=job.A, seed=job.seed)
    out = embed_thm13(inner)
    _reorder_with_input(out.result.coloring, job.coloring)
    cert = verify_factorization(
        out.result.hypergraph,
        out.result.coloring,
        inst,
        connected_classes=job.A,
        input_G=_input_host(inst),
        input_C=job.coloring,
    )
    cert.wing_reports = out.certificate.wing_reports
    if not cert.passed:
        raise InternalContractError("connected hole-filling output failed verification")
    return EmbeddingOutcome(job, out.result, cert, overlay=overlay)


def run_job(job: EmbeddingJob) -> EmbeddingOutcome:
    return {
        "THM11": embed_thm11,
        "THM12": embed_thm12,
        "THM13": embed_thm13,
        "THM14": embed_thm14,
    }[job.mode](job)
