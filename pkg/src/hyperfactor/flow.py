"""Feasible integer transportation with lower and upper bounds.

One split step of the detachment engine is a transportation problem: rows are
colors (degree share of the new vertex), columns are edge cells (fair share
of the cell), arcs are capped by how many copies the class holds in the cell.
Bounds are handled by the usual excess/deficit reduction to plain max-flow;
the max-flow core is scipy's.
"""

from __future__ import annotations

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_flow

Bounds = tuple[int, int]


def solve_bounded_transport(
    row_bounds: list[Bounds],
    col_bounds: list[Bounds],
    arcs: list[tuple[int, int, int]],
) -> dict[tuple[int, int], int] | None:
    """Find integral y with lo <= row/col sums <= hi and 0 <= y_rc <= cap.

    ``arcs`` lists (row, col, cap).  Returns {(row, col): y > 0} or None when
    no assignment exists.
    """
    R, C = len(row_bounds), len(col_bounds)
    for lo, hi in row_bounds + col_bounds:
        if lo > hi or hi < 0:
            return None
    # node layout: S, colors, cells, T, then super source/sink
    S = 0
    T = 1 + R + C
    S2 = T + 1
    T2 = T + 2
    N = T2 + 1
    excess = [0] * (T2 + 1)
    us, vs, caps = [], [], []

    def arc(u, v, lo, hi):
        if lo:
            excess[u] -= lo
            excess[v] += lo
        if hi - lo > 0:
            us.append(u)
            vs.append(v)
            caps.append(hi - lo)

    for i, (lo, hi) in enumerate(row_bounds):
        arc(S, 1 + i, lo, hi)
    arc_index: dict[tuple[int, int], int] = {}
    for r, c, cap in arcs:
        if cap <= 0:
            continue
        key = (1 + r, 1 + R + c)
        if key in arc_index:
            caps[arc_index[key]] += cap
            continue
        arc_index[key] = len(us)
        us.append(key[0])
        vs.append(key[1])
        caps.append(cap)
    for i, (lo, hi) in enumerate(col_bounds):
        arc(1 + R + i, T, lo, hi)
    inf = sum(hi for _, hi in row_bounds) + sum(hi for _, hi in col_bounds) + 1
    arc(T, S, 0, inf)
    need = 0
    for v in range(T2 + 1):
        if excess[v] > 0:
            us.append(S2)
            vs.append(v)
            caps.append(excess[v])
            need += excess[v]
        elif excess[v] < 0:
            us.append(v)
            vs.append(T2)
            caps.append(-excess[v])
    if need == 0 and not arcs:
        return {}
    graph = csr_matrix(
        (np.asarray(caps, dtype=np.int32), (np.asarray(us), np.asarray(vs))),
        shape=(N, N),
    )
    result = maximum_flow(graph, S2, T2)
    if result.flow_value != need:
        return None
    flow = result.flow.tocoo()
    out: dict[tuple[int, int], int] = {}
    for u, v, f in zip(flow.row, flow.col, flow.data):
        if f > 0 and 1 <= u <= R and 1 + R <= v < 1 + R + C:
            out[(u - 1, v - 1 - R)] = int(f)
    return out
