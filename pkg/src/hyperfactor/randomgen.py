"""Random instance and coloring generators for experiments and tests."""

from __future__ import annotations

import math
import random
from typing import Optional

from .model import Coloring, Instance, binom, complete_hypergraph


def random_partial_coloring(
    m: int,
    h: int,
    lam: int,
    caps: tuple[int, ...],
    rng: random.Random,
    fraction: float = 1.0,
    colors: Optional[int] = None,
) -> Coloring:
    """Random greedy partial coloring of (a fraction of) the small host.

    Each selected copy gets a uniformly random feasible color, respecting the
    per-vertex caps; copies with no feasible color stay uncolored.
    """
    k = len(caps)
    usable = colors if colors is not None else k
    C = Coloring(k)
    deg: dict[int, list[int]] = {v: [0] * (k + 1) for v in range(1, m + 1)}
    copies = [(e, i) for e in complete_hypergraph(m, h, 1).edges for i in range(lam)]
    rng.shuffle(copies)
    for e, idx in copies:
        if rng.random() > fraction:
            continue
        feasible = [j for j in range(1, usable + 1) if all(deg[v][j] < caps[j - 1] for v in e)]
        if not feasible:
            continue
        j = rng.choice(feasible)
        C.set_color(e, idx, j)
        for v in e:
            deg[v][j] += 1
    return C


def random_full_coloring(
    m: int, h: int, lam: int, caps: tuple[int, ...], rng: random.Random, tries: int = 50
) -> Coloring:
    """Random total coloring of the small host within caps (retrying greedy)."""
    total = lam * binom(m, h)
    for _ in range(tries):
        C = random_partial_coloring(m, h, lam, caps, rng, fraction=1.0)
        if C.num_colored() == total:
            return C
    raise RuntimeError(f"could not totally color host within caps after {tries} tries")


def random_admissible_instance(
    rng: random.Random,
    h_choices=(2, 3, 4),
    m_max: int = 8,
    lam_choices=(1, 2),
    k_cap: int = 300,
    n_extra: int = 2,
) -> Instance:
    """Random admissible (n, h, lam, m, r) with n at least the phase bound.

    Entries of r are multiples of h/gcd(n,h), which is exactly the per-color
    divisibility condition; their number is capped to keep amalgams small.
    """
    while True:
        h = rng.choice(list(h_choices))
        m = rng.randint(h, m_max)
        lam = rng.choice(list(lam_choices))
        n_min = max((h - 1) * (2 * m - 1), h * m)
        n = n_min + rng.randint(0, n_extra)
        g = h // math.gcd(n, h)
        d = lam * binom(n - 1, h - 1)
        if d % g:
            continue
        units = d // g
        k = rng.randint(1, min(units, k_cap))
        # split `units` into k positive parts
        if k == 1:
            parts = [units]
        else:
            cuts = sorted(rng.sample(range(1, units), k - 1))
            parts = [b - a for a, b in zip([0] + cuts, cuts + [units])]
        r = tuple(g * p for p in parts)
        return Instance(n=n, h=h, lam=lam, m=m, r=r)
