"""Admissibility checks, derived parameters, bound calculators and presets.

Everything here is exact integer / rational arithmetic (Fraction, floor
division, cross-multiplication).  Floats could flip boundary cases such as a
color budget attained with equality, so they are never used.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import (
    BadSubsets,
    ConditionViolated,
    DegenerateDenominator,
    InvalidParams,
    MissingS,
    NotApplicable,
)
from .model import Coloring, Instance, MultiHypergraph, binom


@dataclass(frozen=True)
class DerivedParams:
    c: int  # degree of the small host: lam * C(m-1, h-1)
    d: int  # degree of the big host:   lam * C(n-1, h-1)
    g: int  # h / gcd(n, h)


def derived_params(inst: Instance) -> DerivedParams:
    return DerivedParams(
        c=inst.lam * binom(inst.m - 1, inst.h - 1),
        d=inst.lam * binom(inst.n - 1, inst.h - 1),
        g=inst.h // math.gcd(inst.n, inst.h),
    )


def check_admissible(inst: Instance) -> bool:
    """True iff h | r_i*n for every color and sum(r) equals the host degree."""
    d = inst.lam * binom(inst.n - 1, inst.h - 1)
    return all(ri * inst.n % inst.h == 0 for ri in inst.r) and sum(inst.r) == d


def admissibility_failures(inst: Instance) -> list[str]:
    out = []
    d = inst.lam * binom(inst.n - 1, inst.h - 1)
    bad = [i + 1 for i, ri in enumerate(inst.r) if ri * inst.n % inst.h != 0]
    if bad:
        out.append(f"h does not divide r_i*n for i in {bad[:8]}{'...' if len(bad) > 8 else ''}")
    if sum(inst.r) != d:
        out.append(f"sum(r)={sum(inst.r)} != lam*C(n-1,h-1)={d}")
    return out


def theorem12_hypothesis(inst: Instance) -> bool:
    """Color-budget inequality that makes hole-filling possible."""
    if inst.s is None:
        raise MissingS("this check needs the s-vector")
    total = 0
    for i in range(inst.k):
        if i < inst.q:
            total += (inst.r[i] - inst.s[i]) * inst.m // inst.h
        else:
            total += inst.r[i] * inst.m // inst.h
    return total >= inst.lam * binom(inst.m, inst.h)


def derive_b(inst: Instance) -> frozenset[int]:
    """Colors whose cap strictly grows: B = {i in [q] : r_i != s_i} (1-based)."""
    if inst.s is None:
        return frozenset()
    return frozenset(i + 1 for i in range(inst.q) if inst.r[i] != inst.s[i])


def validate_subsets(inst: Instance, A: frozenset[int], B: frozenset[int]) -> None:
    for i in A:
        if not (1 <= i <= inst.k):
            raise BadSubsets(f"A contains {i} outside 1..{inst.k}")
        if inst.r[i - 1] < 2:
            raise BadSubsets(f"A contains color {i} with r_{i}={inst.r[i-1]} < 2")
    if B != derive_b(inst):
        raise BadSubsets("B must equal {i in [q] : r_i != s_i}")


def r_bar(inst: Instance, A: frozenset[int]) -> tuple[int, ...]:
    return tuple(ri - 1 if (i + 1) in A else ri for i, ri in enumerate(inst.r))


def theorem14_hypothesis(inst: Instance, A: frozenset[int], B: frozenset[int]) -> bool:
    """Budget inequality with one unit per connected class held back."""
    if inst.s is None:
        raise MissingS("this check needs the s-vector")
    A, B = frozenset(A), frozenset(B)
    validate_subsets(inst, A, B)
    rb = r_bar(inst, A)
    total = 0
    for i in sorted(B):
        total += (rb[i - 1] - inst.s[i - 1]) * inst.m // inst.h
    for i in range(inst.q + 1, inst.k + 1):
        total += rb[i - 1] * inst.m // inst.h
    return total >= inst.lam * binom(inst.m, inst.h)


def delta_vector(inst: Instance) -> tuple[int, ...]:
    """Residues delta_i in [0, h-1] of the per-color leftover."""
    out = []
    for i in range(inst.k):
        if i < inst.q:
            out.append((inst.r[i] - inst.s[i]) * inst.m % inst.h)
        else:
            out.append(inst.r[i] * inst.m % inst.h)
    return tuple(out)


def delta_bar_vector(inst: Instance, A: frozenset[int]) -> tuple[int, ...]:
    rb = r_bar(inst, A)
    out = []
    for i in range(inst.k):
        if i < inst.q:
            out.append((rb[i] - inst.s[i]) * inst.m % inst.h)
        else:
            out.append(rb[i] * inst.m % inst.h)
    return tuple(out)


def bound_71a(inst: Instance) -> bool:
    """d - c >= sum_{i<=q} s_i + (1/m) sum_i delta_i, compared exactly."""
    p = derived_params(inst)
    s_sum = sum(inst.s) if inst.s is not None else 0
    lhs = Fraction(p.d - p.c)
    rhs = s_sum + Fraction(sum(delta_vector(inst)), inst.m)
    return lhs >= rhs


def bound_71b(inst: Instance, A: frozenset[int], B: frozenset[int]) -> bool:
    A, B = frozenset(A), frozenset(B)
    validate_subsets(inst, A, B)
    p = derived_params(inst)
    rb = r_bar(inst, A)
    db = delta_bar_vector(inst, A)
    idx = sorted(B) + list(range(inst.q + 1, inst.k + 1))
    lhs = Fraction(sum(rb[i - 1] for i in idx) - p.c)
    rhs = sum(inst.s[i - 1] for i in sorted(B)) + Fraction(sum(db[i - 1] for i in idx), inst.m)
    return lhs >= rhs


def _uniform_residues(m: int, h: int, r: int, s: int) -> tuple[int, int, int, int]:
    d1 = (r - s) * m % h
    d2 = r * m % h
    d1b = (r - 1 - s) * m % h
    d2b = (r - 1) * m % h
    return d1, d2, d1b, d2b


def qmax_74(m: int, h: int, lam: int, n: int, r: int, s: int, connected: bool) -> int:
    """Largest color budget q for embedding a uniform partial s-factorization
    into an r-factorization; the connected flavor needs s < r."""
    if not (1 <= s <= r):
        raise InvalidParams(f"need 1 <= s <= r, got s={s} r={r}")
    c = lam * binom(m - 1, h - 1)
    d = lam * binom(n - 1, h - 1)
    d1, d2, d1b, d2b = _uniform_residues(m, h, r, s)
    if connected:
        if s == r:
            raise NotApplicable("connected bound requires s < r")
        den = r * (s * m + d1b - d2b)
        if den <= 0:
            raise DegenerateDenominator(f"denominator {den} <= 0")
        num = d * r * m - c * r * m - d * d2b - d * m
        return math.floor(Fraction(num, den))
    den = r * (s * m + d1 - d2)
    if den <= 0:
        raise DegenerateDenominator(f"denominator {den} <= 0")
    num = d * r * m - c * r * m - d * d2
    return math.floor(Fraction(num, den))


def qmax_75(m: int, h: int, lam: int, n: int, r: int, connected: bool) -> int:
    """Largest q for re-embedding a uniform partial r-factorization."""
    if r < 1:
        raise InvalidParams("need r >= 1")
    c = lam * binom(m - 1, h - 1)
    d = lam * binom(n - 1, h - 1)
    d2 = r * m % h
    d2b = (r - 1) * m % h
    if connected:
        if r < 2:
            raise NotApplicable("connected bound requires r >= 2")
        den = r * m - m - d2b
        if den <= 0:
            raise DegenerateDenominator(f"denominator {den} <= 0")
        return math.floor(Fraction(d, r) - Fraction(c * m, den))
    den = r * m - d2
    if den <= 0:
        raise DegenerateDenominator(f"denominator {den} <= 0")
    return math.floor(Fraction(d, r) - Fraction(c * m, den))


@dataclass
class PresetReport:
    part: str
    variant: str
    r: tuple[int, ...]
    k: int
    budget: int  # colors the given partial coloring may use
    connected: bool
    irregular_required: bool
    conditions: list[tuple[str, bool]] = field(default_factory=list)


def corollary_presets(which: str, variant: str, inst_params) -> PresetReport:
    """Instantiate corollary part I..V for (n, h, lam, m).

    ``variant`` "2" allows the partial coloring to use every color but
    requires the full small host to be colored; "7" trades colors for the
    freedom to color an arbitrary sub-hypergraph.
    """
    n, h, lam, m = inst_params.n, inst_params.h, inst_params.lam, inst_params.m
    which = which.upper()
    if which not in {"I", "II", "III", "IV", "V"}:
        raise InvalidParams(f"unknown corollary part {which!r}")
    if variant not in {"2", "7"}:
        raise InvalidParams(f"unknown variant {variant!r}")
    c = lam * binom(m - 1, h - 1)
    d = lam * binom(n - 1, h - 1)
    g = h // math.gcd(n, h)

    conds: list[tuple[str, bool]] = []

    def need(name: str, ok: bool):
        conds.append((name, ok))

    if which == "I":
        if variant == "2":
            need("n == 0 (mod h)", n % h == 0)
            budget = d
        else:
            need("n == 0 (mod h)", n % h == 0)
            need("m == 0 (mod h)", m % h == 0)
            budget = d - c
        rvec = (1,) * d
        k = d
        connected = False
        irr = False
    elif which in {"II", "III"}:
        if d % g != 0:
            raise InvalidParams(f"g={g} does not divide d={d} (unexpected)")
        k = d // g
        rvec = (g,) * k
        connected = which == "III"
        irr = connected
        if which == "II":
            if variant == "7":
                need("g*m == 0 (mod h)", g * m % h == 0)
            budget = k if variant == "2" else k - -(-c // g)
        else:
            need("n != 0 (mod h)", n % h != 0)
            if variant == "7":
                need("m*(g-1) == 0 (mod h)", m * (g - 1) % h == 0)
            if g < 2:
                budget = 0
            else:
                budget = k if variant == "2" else k - -(-c // (g - 1))
    elif which == "IV":
        need("d == 0 (mod 2)", d % 2 == 0)
        need("2n == 0 (mod h)", 2 * n % h == 0)
        if variant == "7":
            need("m == 0 (mod h)", m % h == 0)
        k = d // 2
        rvec = (2,) * k
        budget = k if variant == "2" else k - c
        connected = True
        irr = True
    else:  # V
        need("h >= 2", h >= 2)
        need("d == 0 (mod h)", d % h == 0)
        if variant == "7":
            need("m == 0 (mod h)", m % h == 0)
        k = d // h
        rvec = (h,) * k
        budget = k if variant == "2" else k - -(-c // (h - 1))
        connected = True
        irr = True

    failures = [name for name, ok in conds if not ok]
    if failures:
        raise ConditionViolated(failures)
    return PresetReport(which, variant, rvec, k, budget, connected, irr, conds)


@dataclass
class RyserReport:
    ok: bool
    entries: list[tuple[int, int, Fraction, bool]] = field(default_factory=list)
    # entries are (color, class_size, required_lower_bound, ok)


def ryser_diagnostic(G: MultiHypergraph, C: Coloring, inst: Instance) -> RyserReport:
    """Per-class minimum edge count necessary for extendability.

    Class i needs at least r_i*(m - n*(1 - 1/h)) edge copies; with a large
    host the right side drops to zero or below and the check is vacuous.
    """
    entries = []
    ok = True
    for j in range(1, inst.k + 1):
        size = C.class_size(j)
        lower = Fraction(inst.r[j - 1] * (inst.m * inst.h - inst.n * (inst.h - 1)), inst.h)
        good = Fraction(size) >= lower
        ok = ok and good
        entries.append((j, size, lower, good))
    return RyserReport(ok, entries)
