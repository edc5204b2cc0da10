import math
import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hyperfactor.arithmetic import (
    bound_71a,
    bound_71b,
    check_admissible,
    corollary_presets,
    delta_bar_vector,
    delta_vector,
    derive_b,
    derived_params,
    qmax_74,
    qmax_75,
    ryser_diagnostic,
    theorem12_hypothesis,
    theorem14_hypothesis,
)
from hyperfactor.errors import (
    BadSubsets,
    ConditionViolated,
    MissingS,
    NotApplicable,
)
from hyperfactor.model import Coloring, Instance, complete_hypergraph


class TestAdmissible:
    def test_k30_r2(self):
        inst = Instance(n=30, h=3, lam=1, m=8, r=(2,) * 203)
        assert check_admissible(inst)

    def test_k38_r6(self):
        inst = Instance(n=38, h=3, lam=1, m=10, r=(6,) * 111)
        assert check_admissible(inst)

    def test_parity_failure(self):
        inst = Instance(n=5, h=2, lam=1, m=2, r=(1, 1, 1, 1))
        assert not check_admissible(inst)

    @given(seed=st.integers(0, 500))
    def test_permutation_invariant(self, seed):
        rng = random.Random(seed)
        n, h, lam = 8, 2, 1
        parts = [rng.randint(1, 4) for _ in range(4)]
        inst1 = Instance(n=n, h=h, lam=lam, m=4, r=tuple(parts))
        shuffled = parts[:]
        rng.shuffle(shuffled)
        inst2 = Instance(n=n, h=h, lam=lam, m=4, r=tuple(shuffled))
        assert check_admissible(inst1) == check_admissible(inst2)


class TestTheorem12Hypothesis:
    def test_paper_105_colors(self):
        inst = Instance(n=38, h=3, lam=1, m=10, r=(6,) * 111, s=(6,) * 105)
        assert theorem12_hypothesis(inst)
        # one more color used and the budgets no longer cover the hole
        inst2 = Instance(n=38, h=3, lam=1, m=10, r=(6,) * 111, s=(6,) * 106)
        assert not theorem12_hypothesis(inst2)

    def test_full_q_equals_k_fails(self):
        inst = Instance(n=10, h=2, lam=1, m=4, r=(3, 3, 3), s=(3, 3, 3))
        assert not theorem12_hypothesis(inst)

    def test_paper_21_colors(self):
        inst = Instance(n=34, h=3, lam=1, m=9, r=(24,) * 22, s=(23,) * 21)
        assert theorem12_hypothesis(inst)

    def test_missing_s(self):
        inst = Instance(n=10, h=2, lam=1, m=4, r=(3, 3, 3))
        with pytest.raises(MissingS):
            theorem12_hypothesis(inst)


class TestTheorem14Hypothesis:
    def test_paper_103_colors(self):
        inst = Instance(n=38, h=3, lam=1, m=10, r=(6,) * 111, s=(6,) * 103)
        A = frozenset(range(1, 112))
        assert theorem14_hypothesis(inst, A, derive_b(inst))

    def test_everything_used_fails(self):
        inst = Instance(n=10, h=2, lam=1, m=4, r=(3, 3, 3), s=(3, 3, 3))
        assert not theorem14_hypothesis(inst, frozenset(), derive_b(inst))

    def test_paper_20_colors(self):
        inst = Instance(n=34, h=3, lam=1, m=9, r=(24,) * 22, s=(23,) * 20)
        A = frozenset(range(1, 23))
        assert theorem14_hypothesis(inst, A, derive_b(inst))

    def test_bad_subsets(self):
        inst = Instance(n=10, h=2, lam=1, m=4, r=(3, 3, 3), s=(2,))
        with pytest.raises(BadSubsets):
            theorem14_hypothesis(inst, frozenset({9}), derive_b(inst))
        with pytest.raises(BadSubsets):
            theorem14_hypothesis(inst, frozenset(), frozenset({2}))


class TestDeltas:
    @given(seed=st.integers(0, 300))
    def test_residue_ranges(self, seed):
        rng = random.Random(seed)
        h = rng.randint(2, 5)
        m = rng.randint(h, 9)
        k = rng.randint(1, 5)
        q = rng.randint(0, k)
        r = tuple(rng.randint(2, 6) for _ in range(k))
        s = tuple(rng.randint(1, r[i]) for i in range(q))
        inst = Instance(n=m, h=h, lam=1, m=m, r=r, s=s)
        A = frozenset(i + 1 for i in range(k) if r[i] >= 2 and rng.random() < 0.5)
        for d in delta_vector(inst) + delta_bar_vector(inst, A):
            assert 0 <= d <= h - 1


class TestBound71:
    def test_uniform_matches_qmax75(self):
        # with r = s uniform, the general inequality collapses to the simple bound
        m, h, lam, n, r = 10, 3, 1, 38, 6
        cutoff = qmax_75(m, h, lam, n, r, False)
        for q in (cutoff - 1, cutoff, cutoff + 1):
            inst = Instance(n=n, h=h, lam=lam, m=m, r=(r,) * 111, s=(r,) * q)
            assert bound_71a(inst) == (q <= cutoff)

    def test_single_color_empty_sums(self):
        # q = 0 with one color: holds iff d - c >= delta_1 / m
        inst = Instance(n=8, h=2, lam=1, m=4, r=(7,), s=())
        p = derived_params(inst)
        d1 = delta_vector(inst)[0]
        assert bound_71a(inst) == (Fraction(p.d - p.c) >= Fraction(d1, inst.m))

    def test_zero_deltas_q_equals_k(self):
        # delta_i = 0 and s = r: reduces to d - c >= sum(s)
        inst = Instance(n=12, h=2, lam=1, m=4, r=(2, 2, 2), s=(2, 2, 2))
        assert delta_vector(inst) == (0, 0, 0)
        p = derived_params(inst)
        assert bound_71a(inst) == (p.d - p.c >= 6)

    def test_connected_flavor_uniform(self):
        m, h, lam, n, r, s = 9, 3, 1, 34, 24, 23
        cutoff = qmax_74(m, h, lam, n, r, s, True)
        for q in (cutoff, cutoff + 1):
            inst = Instance(n=n, h=h, lam=lam, m=m, r=(r,) * 22, s=(s,) * q)
            A = frozenset(range(1, 23))
            assert bound_71b(inst, A, derive_b(inst)) == (q <= cutoff)


class TestQmax:
    def test_paper_example_38(self):
        assert qmax_75(10, 3, 1, 38, 6, connected=False) == 105
        assert qmax_75(10, 3, 1, 38, 6, connected=True) == 103

    def test_paper_example_34(self):
        assert qmax_74(9, 3, 1, 34, 24, 23, connected=False) == 21
        assert qmax_74(9, 3, 1, 34, 24, 23, connected=True) == 20

    def test_cruse_reduction_small(self):
        assert qmax_75(4, 2, 1, 8, 1, connected=False) == 4

    def test_qmax74_reduces_to_qmax75_at_s_equals_r(self):
        for m, h, n, r in [(4, 2, 8, 1), (10, 3, 38, 6), (9, 3, 34, 24)]:
            assert qmax_74(m, h, 1, n, r, r, False) == qmax_75(m, h, 1, n, r, False)

    def test_connected_with_s_equals_r_not_applicable(self):
        with pytest.raises(NotApplicable):
            qmax_74(10, 3, 1, 38, 6, 6, connected=True)
        with pytest.raises(NotApplicable):
            qmax_75(4, 2, 1, 8, 1, connected=True)

    def test_consistency_with_theorem12(self):
        # the closed-form cutoff is exactly where the budget inequality flips
        for m, h, lam, n, r in [(10, 3, 1, 38, 6), (9, 3, 1, 34, 24), (4, 2, 1, 8, 2), (5, 2, 2, 12, 2)]:
            d = lam * math.comb(n - 1, h - 1)
            if d % r:
                continue
            k = d // r
            cutoff = qmax_75(m, h, lam, n, r, False)
            for q in (cutoff, cutoff + 1):
                if not 0 <= q <= k:
                    continue
                inst = Instance(n=n, h=h, lam=lam, m=m, r=(r,) * k, s=(r,) * q)
                assert theorem12_hypothesis(inst) == (q <= cutoff)


class TestPresets:
    def test_variant2_part1_gives_proper_coloring(self):
        inst = Instance(n=6, h=2, lam=1, m=3, r=(1,))
        rep = corollary_presets("I", "2", inst)
        assert rep.r == (1,) * 5 and rep.k == 5 and rep.budget == 5

    def test_variant2_part1_condition(self):
        inst = Instance(n=7, h=2, lam=1, m=3, r=(1,))
        with pytest.raises(ConditionViolated):
            corollary_presets("I", "2", inst)

    def test_variant7_part4_budget(self):
        inst = Instance(n=21, h=3, lam=1, m=6, r=(1,))
        rep = corollary_presets("IV", "7", inst)
        assert rep.budget == 85 and rep.k == 95 and rep.connected

    def test_variant7_part5_h2_structure(self):
        # with h=2 this is the path-to-hamiltonian setting: r = (2,2,...)
        inst = Instance(n=9, h=2, lam=1, m=4, r=(1,))
        rep = corollary_presets("V", "7", inst)
        assert set(rep.r) == {2} and rep.connected and rep.irregular_required
        assert rep.budget == rep.k - 3

    def test_part_ii_admissible_across_hosts(self):
        for n, h in [(6, 4), (9, 6), (10, 4), (21, 3), (38, 3)]:
            inst = Instance(n=n, h=h, lam=1, m=h, r=(1,))
            try:
                rep = corollary_presets("II", "2", inst)
            except ConditionViolated:
                continue
            target = Instance(n=n, h=h, lam=1, m=h, r=rep.r)
            assert check_admissible(target)


class TestRyser:
    def test_vacuous_when_host_large(self):
        # n >= hm/(h-1) makes the lower bound nonpositive
        inst = Instance(n=12, h=2, lam=1, m=4, r=(2,) * 5, s=None)
        C = Coloring(5)
        G = complete_hypergraph(4, 2, 1)
        assert ryser_diagnostic(G, C, inst).ok

    def test_h2_matches_classic_form(self):
        inst = Instance(n=6, h=2, lam=1, m=4, r=(1,) * 5)
        C = Coloring(5, {(1, 2): [1], (3, 4): [1], (1, 3): [2]})
        rep = ryser_diagnostic(complete_hypergraph(4, 2, 1), C, inst)
        for j, size, lower, ok in rep.entries:
            assert lower == Fraction(4 - 6 / 2)  # m - n/2 with r=1

    def test_empty_class_small_host_fails(self):
        inst = Instance(n=5, h=2, lam=1, m=3, r=(2, 2))
        C = Coloring(2, {(1, 2): [1], (1, 3): [1], (2, 3): [1]})
        rep = ryser_diagnostic(complete_hypergraph(3, 2, 1), C, inst)
        assert not rep.ok
        assert [e[0] for e in rep.entries if not e[3]] == [2]
