"""Potential-driven approximation for activation edge-multicover.

Pipeline: optional cost scaling (for unbounded slope), bipartite double
cover, a search for the least budget ``tau`` under which repeated budgeted
coverage steps drive the potential below ``tau/theta``, then a cheapest-edge
completion, lifted back to the original instance.
"""

from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Callable, Optional

from .coverage import (
    Residual,
    ThresholdWeights,
    cheap_edges,
    exact_budgeted_coverage,
    greedy_budgeted_coverage,
    side_costs,
    threshold_weights,
)
from .errors import InfeasibleAtThisM, InfeasibleInstance, TauTooSmall
from .model import (
    EdgeSet,
    Instance,
    LevelAssignment,
    first_deficient_node,
    induced_levels,
    max_requirement,
    slope,
)
from .reductions import (
    BipartiteInstance,
    bipartite_double_cover,
    enumerate_M,
    lift_bipartite_solution,
    lift_scaled_solution,
    scale_costs,
)

log = logging.getLogger(__name__)

Probe = Optional[Callable[["StepRecord"], None]]


@dataclass(frozen=True)
class SolveConfig:
    gamma: float = 2
    # 1/2 - 1/e gives alpha = 3/4 at gamma = 2
    epsilon_inner: float = 0.5 - 1 / math.e
    use_exact_inner: bool = False
    enable_scaling: bool = True
    scaling_eps: float = 0.25

    def __post_init__(self):
        if not self.gamma > 1:
            raise ValueError(f"gamma must exceed 1, got {self.gamma}")
        if not 0 < self.alpha < 1:
            raise ValueError(f"alpha={self.alpha} is outside (0, 1)")
        if not 0 < self.scaling_eps <= 1:
            raise ValueError(f"scaling_eps must lie in (0, 1], got {self.scaling_eps}")

    @property
    def alpha(self) -> float:
        return 1 - (1 - 1 / self.gamma) * (1 - 1 / math.e - self.epsilon_inner)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["alpha"] = self.alpha
        return d


@dataclass(frozen=True)
class StepRecord:
    tau: object
    phi_before: object
    phi_after: object
    la: object  # l_I(A)
    lb: object  # l_I(B)
    cheap_lb: object  # l_C(B) of the whole cheap set
    gamma: object
    accepted: bool
    edges: EdgeSet = field(default=frozenset(), repr=False)

    def to_dict(self) -> dict:
        return {
            "phi_before": _num(self.phi_before),
            "phi_after": _num(self.phi_after),
            "la": _num(self.la),
            "lb": _num(self.lb),
        }


@dataclass
class LoopResult:
    J: EdgeSet
    records: list
    iterations: int
    phi: object


@dataclass
class SearchStats:
    evaluations: int = 0
    monotonicity_violations: int = 0
    fallback_scan: bool = False


@dataclass
class BipartiteOutcome:
    J: EdgeSet
    F: EdgeSet
    tau_star: object
    loop: LoopResult
    tail: dict
    search: SearchStats
    theta: object

    @property
    def edges(self) -> EdgeSet:
        return self.J | self.F


@dataclass
class SolveReport:
    solution: EdgeSet
    levels: LevelAssignment
    cost: object
    tau_star: object
    iterations: list
    reductions_applied: dict
    tail: dict
    search: dict
    config: dict

    def to_dict(self) -> dict:
        return {
            "edges": sorted(self.solution),
            "levels": [_num(x) for x in self.levels.levels],
            "cost": _num(self.cost),
            "tau": _num(self.tau_star),
            "trace": [r.to_dict() for r in self.iterations],
            "config": self.config,
            "reductions": self.reductions_applied,
            "tail": {k: _num(v) for k, v in self.tail.items()},
            "search": self.search,
        }


def _num(x):
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else float(x)
    if isinstance(x, float) and math.isinf(x):
        return "inf"
    return x


def loop_theta(bip: BipartiteInstance):
    """Slope used for the iteration count and the acceptance test.

    The true slope (at least 2); ``max(2, n)`` if the slope is unbounded,
    which only happens when scaling is switched off.
    """
    if not bip.edges:
        return 2
    theta = slope(bip.instance)
    if math.isinf(theta):
        return max(2, bip.b_count)
    return max(Fraction(2), theta)


def iteration_count(k: int, theta, alpha: float) -> int:
    """Least ``t`` with ``(1/alpha)**t >= k*theta``."""
    target = k * Fraction(theta)
    grow = 1 / Fraction(alpha)
    t, p = 0, Fraction(1)
    while p < target:
        p *= grow
        t += 1
    return t


def proven_bound(k: int, theta_eff, cfg: SolveConfig) -> int:
    """``2*((1+gamma)*ceil(log_{1/alpha}(k*theta_eff)) + 2)``."""
    if k == 0:
        return 0
    return 2 * ((1 + cfg.gamma) * iteration_count(k, theta_eff, cfg.alpha) + 2)


def effective_theta(inst: Instance):
    """``max(2, min(slope, n))``."""
    if not inst.edges:
        return 2
    return max(2, min(slope(inst), inst.node_count))


# -- one potential-reduction step ---------------------------------------------


def step(bip, w: ThresholdWeights, J, cfg: SolveConfig, tau, probe: Probe = None,
         residual: Residual | None = None) -> StepRecord:
    """Budgeted coverage over the tau-cheap edges of the residual instance.

    Returns the accepted record (its ``edges`` is the new set I) or raises
    :class:`TauTooSmall` when the potential did not drop to ``alpha`` times
    its value.
    """
    res = residual if residual is not None else Residual(bip, J)
    phi0 = res.potential(w)
    if phi0 == 0:
        rec = StepRecord(tau, 0, 0, 0, 0, 0, cfg.gamma, True)
        if probe:
            probe(rec)
        return rec
    C = cheap_edges(bip, w, tau, cfg.gamma, phi0, base=res)
    solver = exact_budgeted_coverage if cfg.use_exact_inner else greedy_budgeted_coverage
    sol = solver(bip, w, C, tau, base=res)
    phi1 = phi0 - sol.value
    _, cheap_lb = side_costs(bip, C)
    ok = phi1 <= cfg.alpha * phi0
    rec = StepRecord(tau, phi0, phi1, sol.a_cost, sol.b_cost, cheap_lb, cfg.gamma, ok, sol.edges)
    if probe:
        probe(rec)
    if not ok:
        raise TauTooSmall(tau, rec)
    return rec


def main_loop(bip, w: ThresholdWeights, cfg: SolveConfig, tau, probe: Probe = None) -> LoopResult:
    """Repeat :func:`step` ``ceil(log_{1/alpha}(k*theta))`` times from J = {}.

    Raises :class:`TauTooSmall` if any step is rejected. Once the potential
    reaches zero the remaining steps are no-ops and are skipped.
    """
    k = max(bip.requirements, default=0)
    if k == 0:
        return LoopResult(frozenset(), [], 0, 0)
    rounds = iteration_count(k, loop_theta(bip), cfg.alpha)
    res = Residual(bip)
    records = []
    for _ in range(rounds):
        if res.potential(w) == 0:
            break
        rec = step(bip, w, None, cfg, tau, probe, residual=res)
        records.append(rec)
        res.add(rec.edges)
    return LoopResult(frozenset(res.base), records, rounds, res.potential(w))


def tail_cover(bip, w: ThresholdWeights, J) -> EdgeSet:
    """For each ``b``, the cheapest-at-``b`` edges to new distinct neighbors
    until its requirement is met (ties by smallest edge id)."""
    res = Residual(bip, bip.instance.check_edge_set(J))
    chosen = []
    inc = bip.instance.incident
    for b in bip.side_b:
        need = res.deficit[b]
        if need == 0:
            continue
        best = {}
        for eid in inc[b]:
            if eid in res.base:
                continue
            e = bip.edges[eid]
            if (e.u, b) in res.linked:
                continue
            cur = best.get(e.u)
            if cur is None or (e.cost_v, eid) < (bip.edges[cur].cost_v, cur):
                best[e.u] = eid
        picks = sorted(best.values(), key=lambda i: (bip.edges[i].cost_v, i))
        if len(picks) < need:
            raise InfeasibleInstance(f"node {b} lacks {need - len(picks)} neighbors", node=b)
        chosen.extend(picks[:need])
    return frozenset(chosen)


def _upper_tau(bip) -> int:
    return math.ceil(sum(Fraction(e.cost_u) + Fraction(e.cost_v) for e in bip.edges))


def search_tau(bip, w: ThresholdWeights, cfg: SolveConfig, probe: Probe = None,
               stats: SearchStats | None = None):
    """Least integer ``tau`` whose main loop succeeds with ``phi <= tau/theta``.

    Doubling from 0 brackets the answer, bisection narrows it. A few probes
    above the answer check that acceptance is monotone; on a violation a
    capped linear scan below the answer looks for a smaller accepted tau.
    Returns ``(tau_star, LoopResult)``.
    """
    stats = stats if stats is not None else SearchStats()
    if max(bip.requirements, default=0) == 0:
        return 0, LoopResult(frozenset(), [], 0, 0)
    theta = loop_theta(bip)
    cache = {}

    def ok(t):
        if t in cache:
            return cache[t]
        stats.evaluations += 1
        try:
            res = main_loop(bip, w, cfg, t, probe)
        except TauTooSmall:
            res = None
        if res is not None and res.phi * theta > t:
            res = None
        cache[t] = res
        return res

    top = _upper_tau(bip)
    lo, t = -1, 0
    while ok(t) is None:
        lo = t
        if t >= top:
            raise AssertionError(f"no tau up to {top} accepted on a feasible instance")
        t = min(top, max(1, 2 * t))
    first_hit, floor = t, lo
    hi = t
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if ok(mid) is None:
            lo = mid
        else:
            hi = mid

    probes = sorted({p for p in (hi + 1, (hi + first_hit) // 2) if hi < p < first_hit})
    bad = [p for p in probes if ok(p) is None]
    if bad:
        stats.monotonicity_violations += len(bad)
        stats.fallback_scan = True
        log.info("non-monotone tau acceptance at %s (least found %s)", bad, hi)
        span = hi - floor - 1
        stride = max(1, math.ceil(span / 32))
        for cand in range(floor + 1, hi, stride):
            if ok(cand) is not None:
                hi = cand
                break

    final = main_loop(bip, w, cfg, hi, probe)
    assert final.J == cache[hi].J and final.phi * theta <= hi
    return hi, final


def solve_bipartite(bip: BipartiteInstance, cfg: SolveConfig = SolveConfig(),
                    probe: Probe = None) -> BipartiteOutcome:
    bad = first_deficient_node(bip.instance, range(bip.instance.edge_count))
    if bad is not None:
        raise InfeasibleInstance(f"node {bad} cannot meet its requirement", node=bad)
    w = threshold_weights(bip)
    stats = SearchStats()
    tau_star, loop = search_tau(bip, w, cfg, probe, stats)
    F = tail_cover(bip, w, loop.J)
    la, lb = side_costs(bip, F)
    theta = slope(bip.instance) if bip.edges else 1
    tail = {"la": la, "lb": lb, "sum_w": sum(w.w), "phi": loop.phi, "theta": theta}
    return BipartiteOutcome(loop.J, F, tau_star, loop, tail, stats, theta)


def default_rho(inst: Instance, cfg: SolveConfig) -> int:
    """Ratio bound of the bounded-slope solver, used to size the scaling."""
    return max(1, proven_bound(max(1, max_requirement(inst)), max(2, inst.node_count), cfg))


def needs_scaling(inst: Instance, cfg: SolveConfig) -> bool:
    if not cfg.enable_scaling or not inst.edges:
        return False
    n = inst.node_count
    return slope(inst) > n * (default_rho(inst, cfg) + 1) / Fraction(cfg.scaling_eps)


def _solve_plain(inst: Instance, cfg, probe):
    bip = bipartite_double_cover(inst)
    out = solve_bipartite(bip, cfg, probe)
    return lift_bipartite_solution(bip, out.edges), out


def solve(inst: Instance, cfg: SolveConfig = SolveConfig(), probe: Probe = None) -> SolveReport:
    bad = first_deficient_node(inst, range(inst.edge_count))
    if bad is not None:
        raise InfeasibleInstance(f"node {bad} cannot meet its requirement", node=bad)
    reductions = {"bipartite": True, "scaled": False}
    if needs_scaling(inst, cfg):
        rho = default_rho(inst, cfg)
        best = None
        for M in enumerate_M(inst):
            try:
                scaled = scale_costs(inst, M, rho, cfg.scaling_eps)
            except InfeasibleAtThisM:
                continue
            J_hat, out = _solve_plain(scaled.instance, cfg, probe)
            J = lift_scaled_solution(scaled, J_hat)
            cost = induced_levels(inst, J).total
            if best is None or cost < best[0]:
                best = (cost, J, out, scaled)
        cost, J, out, scaled = best
        reductions.update(
            scaled=True, M=_num(Fraction(scaled.M)), rho=rho, eps=cfg.scaling_eps,
            alpha=float(scaled.alpha), slope_bound=float(scaled.slope_bound),
        )
    else:
        J, out = _solve_plain(inst, cfg, probe)
    levels = induced_levels(inst, J)
    missing = first_deficient_node(inst, J)
    assert missing is None, f"solution leaves node {missing} uncovered"
    search = asdict(out.search)
    return SolveReport(
        solution=J,
        levels=levels,
        cost=levels.total,
        tau_star=out.tau_star,
        iterations=out.loop.records,
        reductions_applied=reductions,
        tail=out.tail,
        search=search,
        config=cfg.to_dict(),
    )
