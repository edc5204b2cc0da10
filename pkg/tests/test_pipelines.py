import random

import pytest

from hyperfactor.errors import (
    HypothesisNotSatisfied,
    InvalidParams,
    MissingS,
    NecessityViolated,
    NotAdmissible,
)
from hyperfactor.model import Coloring, Instance, complete_hypergraph
from hyperfactor.pipelines import (
    EmbeddingJob,
    embed_thm11,
    embed_thm12,
    embed_thm13,
    embed_thm14,
    run_job,
)
from hyperfactor.randomgen import random_full_coloring, random_partial_coloring
from hyperfactor.verification import oracle_extend, verify_extension


class TestThm11:
    def test_k4_walkthrough(self, k4_instance, k4_coloring):
        out = embed_thm11(EmbeddingJob(inst=k4_instance, coloring=k4_coloring, seed=1))
        assert out.certificate.passed
        assert dict(out.result.coloring.class_edges(1)) == {(1, 2): 1, (3, 4): 1}
        # brute force confirms exactly two completions exist
        assert oracle_extend(k4_coloring, k4_instance).count == 2

    def test_empty_input_coloring(self):
        inst = Instance(n=8, h=2, lam=1, m=4, r=(1,) * 7)
        out = embed_thm11(EmbeddingJob(inst=inst, coloring=Coloring(7), seed=0))
        assert out.certificate.passed

    def test_not_admissible(self):
        inst = Instance(n=5, h=2, lam=1, m=2, r=(1, 1, 1, 1))
        with pytest.raises(NotAdmissible):
            embed_thm11(EmbeddingJob(inst=inst, coloring=Coloring(4)))

    def test_preservation_copy_for_copy(self, rng):
        inst = Instance(n=9, h=3, lam=1, m=4, r=(4, 4, 4, 4, 4, 8))
        C = random_partial_coloring(4, 3, 1, inst.r, rng, fraction=0.9)
        out = embed_thm11(EmbeddingJob(inst=inst, coloring=C, seed=2))
        assert out.certificate.passed
        for e, cols in C.by_edge.items():
            fixed = [j for j in cols if j]
            assert out.result.coloring.colors_of(e)[: len(fixed)] == fixed

    def test_rejects_connectivity_request(self, k4_instance, k4_coloring):
        with pytest.raises(InvalidParams):
            embed_thm11(
                EmbeddingJob(inst=k4_instance, coloring=k4_coloring, A=frozenset({1}))
            )


class TestThm13:
    def test_small_all_connected(self, rng):
        inst = Instance(n=12, h=2, lam=1, m=4, r=(2,) * 5 + (1,))
        C = random_partial_coloring(4, 2, 1, (1,) * 6, rng, fraction=1.0)
        A = frozenset(range(1, 6))
        out = embed_thm13(EmbeddingJob(inst=inst, coloring=C, mode="THM13", A=A, seed=1))
        assert out.certificate.passed
        assert all(r.connected for r in out.certificate.per_class if r.color in A)

    def test_regular_component_rejected(self):
        inst = Instance(n=12, h=2, lam=1, m=4, r=(2,) * 5 + (1,))
        C = Coloring(6, {(1, 2): [1], (2, 3): [1], (1, 3): [1]})
        with pytest.raises(NecessityViolated) as exc:
            embed_thm13(
                EmbeddingJob(inst=inst, coloring=C, mode="THM13", A=frozenset({1}), seed=0)
            )
        assert exc.value.color == 1

    def test_r1_in_a_rejected(self):
        inst = Instance(n=12, h=2, lam=1, m=4, r=(2,) * 5 + (1,))
        with pytest.raises(NecessityViolated) as exc:
            embed_thm13(
                EmbeddingJob(inst=inst, coloring=Coloring(6), mode="THM13", A=frozenset({6}))
            )
        assert exc.value.color == 6


class TestThm12:
    def test_small_hole_fill(self, rng):
        inst = Instance(n=8, h=2, lam=1, m=4, r=(2, 2, 2, 1), s=(1, 1))
        C = random_partial_coloring(4, 2, 1, (1, 1, 2, 1), rng, fraction=0.6, colors=2)
        out = embed_thm12(EmbeddingJob(inst=inst, coloring=C, mode="THM12", seed=4))
        assert out.certificate.passed
        assert verify_extension(None, C, out.result.hypergraph, out.result.coloring)
        # the overlay really is a total coloring of the small host
        assert out.overlay.num_colored() == complete_hypergraph(4, 2, 1).num_edge_copies()

    def test_empty_subhost_q0(self):
        inst = Instance(n=8, h=2, lam=1, m=4, r=(2, 2, 2, 1), s=())
        out = embed_thm12(EmbeddingJob(inst=inst, coloring=Coloring(4), mode="THM12", seed=0))
        assert out.certificate.passed

    def test_budget_hypothesis_enforced(self):
        inst = Instance(n=10, h=2, lam=1, m=4, r=(3, 3, 3), s=(3, 3, 3))
        with pytest.raises(HypothesisNotSatisfied):
            embed_thm12(EmbeddingJob(inst=inst, coloring=Coloring(3), mode="THM12"))

    def test_missing_s(self):
        inst = Instance(n=8, h=2, lam=1, m=4, r=(2, 2, 2, 1))
        with pytest.raises(MissingS):
            embed_thm12(EmbeddingJob(inst=inst, coloring=Coloring(4), mode="THM12"))

    def test_input_color_above_q_rejected(self):
        inst = Instance(n=8, h=2, lam=1, m=4, r=(2, 2, 2, 1), s=(1,))
        C = Coloring(4, {(1, 2): [3]})
        with pytest.raises(InvalidParams):
            embed_thm12(EmbeddingJob(inst=inst, coloring=C, mode="THM12"))


class TestThm14:
    def test_small_connected_hole_fill(self, rng):
        inst = Instance(n=12, h=2, lam=1, m=4, r=(2,) * 5 + (1,), s=(1, 1))
        C = random_partial_coloring(4, 2, 1, (1, 1, 2, 2, 2, 1), rng, fraction=0.5, colors=2)
        A = frozenset(range(1, 6))
        out = embed_thm14(EmbeddingJob(inst=inst, coloring=C, mode="THM14", A=A, seed=2))
        assert out.certificate.passed
        assert all(r.connected for r in out.certificate.per_class if r.color in A)

    def test_input_regular_class_in_a_rejected(self):
        inst = Instance(n=12, h=2, lam=1, m=4, r=(2,) * 5 + (1,), s=(2,))
        C = Coloring(6, {(1, 2): [1], (2, 3): [1], (1, 3): [1]})
        with pytest.raises(NecessityViolated):
            embed_thm14(
                EmbeddingJob(inst=inst, coloring=C, mode="THM14", A=frozenset({1}), seed=0)
            )

    def test_hypothesis_enforced(self):
        inst = Instance(n=12, h=2, lam=1, m=4, r=(2,) * 5 + (1,), s=(2,) * 5)
        A = frozenset(range(1, 6))
        with pytest.raises(HypothesisNotSatisfied):
            embed_thm14(EmbeddingJob(inst=inst, coloring=Coloring(6), mode="THM14", A=A))


class TestRunJob:
    def test_dispatch(self, k4_instance, k4_coloring):
        out = run_job(EmbeddingJob(inst=k4_instance, coloring=k4_coloring, mode="THM11"))
        assert out.certificate.passed

    def test_oracle_agreement_where_pipeline_succeeds(self, rng):
        # cross-validation: a pipeline success implies the oracle finds one too
        cases = [
            (Instance(n=4, h=2, lam=1, m=2, r=(1, 1, 1)), 1.0),
            (Instance(n=6, h=2, lam=1, m=3, r=(1,) * 5), 1.0),
            (Instance(n=6, h=2, lam=2, m=3, r=(2,) * 5), 0.7),
            (Instance(n=6, h=3, lam=1, m=3, r=(2, 2, 3, 3)), 0.8),
        ]
        for inst, fr in cases:
            C = random_partial_coloring(inst.m, inst.h, inst.lam, inst.r, rng, fraction=fr)
            try:
                out = run_job(EmbeddingJob(inst=inst, coloring=C, mode="THM11", seed=1))
            except Exception:
                continue
            assert out.certificate.passed
            assert oracle_extend(C, inst, first_only=True).found
