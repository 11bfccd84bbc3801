"""Potential bookkeeping and budgeted star coverage on bipartite instances.

Everything here works on the *residual* instance left after a base edge set
``J``: requirements shrink to ``max(r_b - deg_J(b), 0)`` and an edge only
helps ``b`` if it brings a neighbor that ``J`` (or the new edges) did not
already provide. The threshold weights ``w`` stay those of the full instance.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Iterable

from .errors import InfeasibleInstance, OracleTooLarge
from .model import EdgeSet
from .reductions import BipartiteInstance

DEFAULT_GUARD = 24


@dataclass(frozen=True)
class ThresholdWeights:
    w: tuple  # indexed by b in side B

    def __getitem__(self, b):
        return self.w[b]

    def __len__(self):
        return len(self.w)


@dataclass(frozen=True)
class Star:
    center: int
    edges: frozenset
    cost: object


@dataclass(frozen=True)
class CoverageSolution:
    edges: EdgeSet
    stars: tuple
    value: object
    a_cost: object
    b_cost: object


class AlreadyCovered(frozenset):
    """Empty cheap-edge set returned when the potential is already zero."""


class Residual:
    """Distinct neighbors and remaining deficits of side B after ``base``."""

    def __init__(self, bip: BipartiteInstance, base: Iterable[int] = ()):
        self.bip = bip
        self.base = set()
        self.linked = set()
        self.deficit = list(bip.requirements)
        self.add(base)

    def add(self, eids: Iterable[int]) -> None:
        edges = self.bip.edges
        for eid in eids:
            if eid in self.base:
                continue
            self.base.add(eid)
            e = edges[eid]
            if (e.u, e.v) not in self.linked:
                self.linked.add((e.u, e.v))
                if self.deficit[e.v] > 0:
                    self.deficit[e.v] -= 1

    def potential(self, w: ThresholdWeights):
        return sum(wb * d for wb, d in zip(w.w, self.deficit) if d)


def _base(bip: BipartiteInstance, base) -> Residual:
    if isinstance(base, Residual):
        return base
    return Residual(bip, bip.instance.check_edge_set(base))


def threshold_weights(bip: BipartiteInstance) -> ThresholdWeights:
    """For each ``b``: the ``r_b``-th smallest cost at ``b`` over distinct
    neighbors (each neighbor counted at its cheapest edge); 0 when ``r_b = 0``."""
    best = [dict() for _ in bip.side_b]
    for e in bip.edges:
        seen = best[e.v]
        if e.u not in seen or e.cost_v < seen[e.u]:
            seen[e.u] = e.cost_v
    w = []
    for b, r in enumerate(bip.requirements):
        if r == 0:
            w.append(0)
            continue
        costs = sorted(best[b].values())
        if len(costs) < r:
            raise InfeasibleInstance(
                f"node {b} needs {r} neighbors but has only {len(costs)}", node=b
            )
        w.append(costs[r - 1])
    return ThresholdWeights(tuple(w))


def residual_requirement(bip: BipartiteInstance, J: Iterable[int], b: int) -> int:
    return _base(bip, J).deficit[b]


def potential(bip: BipartiteInstance, w: ThresholdWeights, J: Iterable[int] = ()):
    return _base(bip, J).potential(w)


def cheap_edges(bip, w, tau, gamma, phi0, base: Iterable[int] = ()) -> EdgeSet:
    """Edges ``ab`` outside ``base`` with ``c_b <= gamma*tau*w_b*r_b/phi0``,
    ``r_b`` being the residual requirement. Compared without dividing."""
    if phi0 == 0:
        return AlreadyCovered()
    res = _base(bip, base)
    budget = gamma * tau
    out = []
    for e in bip.edges:
        if e.id in res.base:
            continue
        b = e.v
        if e.cost_v * phi0 <= budget * w[b] * res.deficit[b]:
            out.append(e.id)
    return frozenset(out)


def side_costs(bip: BipartiteInstance, I: Iterable[int]):
    """``(l_I(A), l_I(B))``."""
    la, lb = {}, {}
    for eid in I:
        e = bip.edges[eid]
        if e.cost_u > la.get(e.u, 0):
            la[e.u] = e.cost_u
        if e.cost_v > lb.get(e.v, 0):
            lb[e.v] = e.cost_v
    return sum(la.values()), sum(lb.values())


def coverage_value(bip, w, I: Iterable[int], base: Iterable[int] = ()):
    """``sum_b w_b * min(new distinct neighbors of b in I, residual r_b)``."""
    res = _base(bip, base)
    fresh = {}
    for eid in I:
        if eid in res.base:
            continue
        e = bip.edges[eid]
        if (e.u, e.v) not in res.linked:
            fresh.setdefault(e.v, set()).add(e.u)
    return sum(w[b] * min(len(s), res.deficit[b]) for b, s in fresh.items())


def _positive_part(bip, w, ordered: Iterable[int], res: Residual) -> list:
    """Keep each edge of ``ordered`` that still adds value; same total value."""
    linked, deficit, kept = set(), {}, []
    for eid in ordered:
        e = bip.edges[eid]
        pair = (e.u, e.v)
        if w[e.v] <= 0 or pair in linked or pair in res.linked:
            continue
        d = deficit.get(e.v, res.deficit[e.v])
        if d <= 0:
            continue
        deficit[e.v] = d - 1
        linked.add(pair)
        kept.append(eid)
    return kept


def _solution(bip, w, I, res: Residual) -> CoverageSolution:
    I = frozenset(I)
    groups = {}
    for eid in sorted(I):
        groups.setdefault(bip.edges[eid].u, []).append(eid)
    stars = tuple(
        Star(a, frozenset(ids), max(bip.edges[i].cost_u for i in ids))
        for a, ids in sorted(groups.items())
    )
    la, lb = side_costs(bip, I)
    return CoverageSolution(I, stars, coverage_value(bip, w, I, res), la, lb)


def _best_single_star(bip, w, by_center, tau, res: Residual):
    best_value, best_edges = 0, []
    for a in sorted(by_center):
        ids = sorted(by_center[a], key=lambda i: (bip.edges[i].cost_u, i))
        linked, deficit, value, taken = set(), {}, 0, []
        for pos, eid in enumerate(ids):
            e = bip.edges[eid]
            if e.cost_u > tau:
                break
            d = deficit.get(e.v, res.deficit[e.v])
            if w[e.v] > 0 and d > 0 and e.v not in linked and (a, e.v) not in res.linked:
                linked.add(e.v)
                deficit[e.v] = d - 1
                value += w[e.v]
                taken.append(eid)
            last_at_level = pos + 1 == len(ids) or bip.edges[ids[pos + 1]].cost_u != e.cost_u
            if last_at_level and value > best_value:
                best_value, best_edges = value, list(taken)
    return best_value, best_edges


def greedy_budgeted_coverage(bip, w, candidates: Iterable[int], tau, base=()) -> CoverageSolution:
    """Lazy greedy on value per unit of extra center cost, then compared
    against the best single star that fits the budget.

    Extending the star at ``a`` by edge ``ab`` costs ``max(c_a - l(S_a), 0)``
    of budget. Extensions that cost nothing are taken first.
    """
    res = _base(bip, base)
    edges = bip.edges
    linked = res.linked
    deficit = list(res.deficit)
    new_pairs = set()
    star = {}
    spent = 0
    chosen = []
    done = set()

    by_center = {}
    for eid in candidates:
        if eid not in res.base:
            by_center.setdefault(edges[eid].u, []).append(eid)

    def ratio(eid):
        e = edges[eid]
        b = e.v
        if deficit[b] <= 0 or w[b] <= 0 or (e.u, b) in new_pairs or (e.u, b) in linked:
            return None
        inc = e.cost_u - star.get(e.u, 0)
        if inc <= 0:
            return math.inf, 0
        return w[b] / inc, inc

    heap = []
    for ids in by_center.values():
        for eid in ids:
            r = ratio(eid)
            if r is not None:
                heap.append((-r[0], eid))
    heapq.heapify(heap)

    while heap:
        key, eid = heapq.heappop(heap)
        if eid in done:
            continue
        r = ratio(eid)
        if r is None:
            done.add(eid)
            continue
        if -r[0] > key:
            heapq.heappush(heap, (-r[0], eid))
            continue
        inc = r[1]
        if spent + inc > tau:
            # may become affordable once its center's star grows
            continue
        e = edges[eid]
        chosen.append(eid)
        done.add(eid)
        spent += inc
        new_pairs.add((e.u, e.v))
        deficit[e.v] -= 1
        if inc > 0:
            star[e.u] = e.cost_u
            for other in by_center[e.u]:
                if other not in done:
                    ro = ratio(other)
                    if ro is None:
                        done.add(other)
                    else:
                        heapq.heappush(heap, (-ro[0], other))
        elif e.u not in star:
            star[e.u] = e.cost_u

    greedy_value = sum(w[edges[i].v] for i in chosen)
    star_value, star_edges = _best_single_star(bip, w, by_center, tau, res)
    picked = star_edges if star_value > greedy_value else chosen
    return _solution(bip, w, picked, res)


def exact_budgeted_coverage(
    bip, w, candidates: Iterable[int], tau, base=(), guard: int = DEFAULT_GUARD
) -> CoverageSolution:
    """Maximum coverage value with ``l_I(A) <= tau``, by branch and bound.

    Coverage only grows with more edges, so at each center it suffices to try
    "no star" or "every candidate edge up to some cost level".
    """
    res = _base(bip, base)
    cands = sorted(i for i in set(candidates) if i not in res.base)
    if len(cands) > guard:
        raise OracleTooLarge(f"{len(cands)} candidate edges exceed the guard of {guard}")
    edges = bip.edges
    by_center = {}
    for eid in cands:
        by_center.setdefault(edges[eid].u, []).append(eid)
    centers = sorted(by_center)
    options = []
    for a in centers:
        ids = sorted(by_center[a], key=lambda i: (edges[i].cost_u, i))
        opts = []
        for pos, eid in enumerate(ids):
            c = edges[eid].cost_u
            if c > tau:
                break
            if pos + 1 == len(ids) or edges[ids[pos + 1]].cost_u != c:
                opts.append((c, ids[: pos + 1]))
        options.append(opts[::-1])

    # pairs still reachable from centers at index >= i, for the optimistic bound
    reach = [dict() for _ in range(len(centers) + 1)]
    for i in range(len(centers) - 1, -1, -1):
        acc = {b: set(s) for b, s in reach[i + 1].items()}
        if options[i]:
            for eid in options[i][0][1]:
                e = edges[eid]
                if (e.u, e.v) not in res.linked and w[e.v] > 0:
                    acc.setdefault(e.v, set()).add(e.u)
        reach[i] = acc

    gained = {}  # b -> set of new neighbors
    best = [-1, []]
    picked = []

    def value():
        return sum(w[b] * min(len(s), res.deficit[b]) for b, s in gained.items())

    def bound(i):
        total = 0
        for b in set(gained) | set(reach[i]):
            have = gained.get(b, set())
            extra = len(reach[i].get(b, set()) - have)
            total += w[b] * min(len(have) + extra, res.deficit[b])
        return total

    def dfs(i, spent):
        if bound(i) <= best[0]:
            return
        if i == len(centers):
            best[0], best[1] = value(), list(picked)
            return
        for cost, ids in options[i]:
            if spent + cost > tau:
                continue
            added = []
            for eid in ids:
                e = edges[eid]
                if (e.u, e.v) in res.linked:
                    continue
                s = gained.setdefault(e.v, set())
                if e.u not in s:
                    s.add(e.u)
                    added.append(e)
            picked.extend(ids)
            dfs(i + 1, spent + cost)
            del picked[len(picked) - len(ids):]
            for e in added:
                gained[e.v].discard(e.u)
        dfs(i + 1, spent)

    dfs(0, 0)
    kept = _positive_part(bip, w, sorted(best[1]), res)
    return _solution(bip, w, kept, res)
