"""Exact optima for small instances.

Two independent routes: a branch and bound over node levels (an optimal
edge set may as well contain every edge its levels activate) and plain
enumeration of edge subsets, which is only practical for a dozen or so
edges and mainly serves to check the former.
"""

from __future__ import annotations

import math
from itertools import combinations

from .errors import InfeasibleInstance, OracleTooLarge
from .model import EdgeSet, Instance, activation_cost, first_deficient_node, is_feasible

DEFAULT_GUARD = 24
BRUTE_FORCE_GUARD = 16


def _require_feasible(inst: Instance) -> None:
    bad = first_deficient_node(inst, range(inst.edge_count))
    if bad is not None:
        raise InfeasibleInstance(f"node {bad} cannot meet its requirement", node=bad)


def _minimal(inst: Instance, J) -> EdgeSet:
    J = set(J)
    for eid in sorted(J, reverse=True):
        J.discard(eid)
        if not is_feasible(inst, J):
            J.add(eid)
    return frozenset(J)


def exact_optimum(inst: Instance, guard: int = DEFAULT_GUARD) -> tuple:
    """Minimum-cost r-edge-cover as ``(edge set, cost)``.

    The returned set is inclusion-minimal: edges are dropped from the highest
    id down while the cover stays feasible.
    """
    m = inst.edge_count
    if m > guard:
        raise OracleTooLarge(f"{m} edges exceed the oracle guard of {guard}")
    _require_feasible(inst)
    n = inst.node_count
    edges = inst.edges
    req = inst.requirements
    if not any(req):
        return frozenset(), 0

    # cheapest level at v that reaches at least r_v distinct neighbors
    floor = [0] * n
    cands = [[0] for _ in range(n)]
    for v in range(n):
        per_nbr = {}
        for eid in inst.incident[v]:
            e = edges[eid]
            c, x = e.cost_at(v), e.other(v)
            if x not in per_nbr or c < per_nbr[x]:
                per_nbr[x] = c
        if req[v]:
            floor[v] = sorted(per_nbr.values())[req[v] - 1]
        cands[v] = sorted({0, *(edges[eid].cost_at(v) for eid in inst.incident[v])})
        cands[v] = [c for c in cands[v] if c >= floor[v]]

    order = sorted(range(n), key=lambda v: (-req[v], -len(inst.incident[v]), v))
    rest = [0] * (n + 1)
    for i in range(n - 1, -1, -1):
        rest[i] = rest[i + 1] + floor[order[i]]

    levels = [None] * n

    def open_edge(e) -> bool:
        lu, lv = levels[e.u], levels[e.v]
        return (lu is None or e.cost_u <= lu) and (lv is None or e.cost_v <= lv)

    def could_cover() -> bool:
        nbrs = [set() for _ in range(n)]
        for e in edges:
            if open_edge(e):
                nbrs[e.u].add(e.v)
                nbrs[e.v].add(e.u)
        return all(len(nbrs[v]) >= req[v] for v in range(n))

    best = [math.inf, None]

    def dfs(i, cost):
        if i == n:
            best[0], best[1] = cost, list(levels)
            return
        v = order[i]
        for level in cands[v]:
            if cost + level + rest[i + 1] >= best[0]:
                break
            levels[v] = level
            if could_cover():
                dfs(i + 1, cost + level)
        levels[v] = None

    dfs(0, 0)
    levels[:] = best[1]
    active = [e.id for e in edges if open_edge(e)]
    J = _minimal(inst, active)
    return J, activation_cost(inst, J)


def brute_force_optimum(inst: Instance, guard: int = BRUTE_FORCE_GUARD) -> tuple:
    """Enumerate edge subsets by size; the cheapest feasible one wins, ties
    going to the lexicographically smallest id tuple."""
    m = inst.edge_count
    if m > guard:
        raise OracleTooLarge(f"{m} edges exceed the brute-force guard of {guard}")
    _require_feasible(inst)
    best_cost, best = math.inf, None
    for size in range(m + 1):
        for J in combinations(range(m), size):
            if is_feasible(inst, J):
                c = activation_cost(inst, J)
                if c < best_cost:
                    best_cost, best = c, J
    return frozenset(best), best_cost
