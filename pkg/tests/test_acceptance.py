"""Exit criteria, one test each; a PASS/FAIL line per criterion is printed
in the pytest terminal summary."""

import json
import math
import random
import statistics
import time
from argparse import Namespace
from fractions import Fraction

import pytest

from actcover.cli import cmd_verify
from actcover.coverage import cheap_edges, coverage_value, potential, side_costs, threshold_weights
from actcover.generators import GeneratorSpec, generate
from actcover.model import activation_cost, is_feasible, slope
from actcover.oracle import exact_optimum
from actcover.reductions import (
    bipartite_double_cover,
    enumerate_M,
    lift_bipartite_solution,
    lift_scaled_solution,
    scale_costs,
)
from actcover.errors import InfeasibleAtThisM
from actcover.solver import SolveConfig, effective_theta, main_loop, proven_bound, solve

from conftest import record_criterion

THETAS = [1, 4, 64, math.inf]
CFG = SolveConfig()  # gamma = 2, alpha = 3/4


def random_instances(count, seed, n_range, m_max, k_max=3, cost_scale=50):
    rng = random.Random(seed)
    out = []
    for i in range(count):
        n = rng.randint(*n_range)
        m = rng.randint(max(1, n - 1), m_max)
        spec = GeneratorSpec(n=n, m=m, k_max=rng.randint(1, k_max), theta_target=THETAS[i % 4],
                             cost_scale=cost_scale, seed=seed * 100_000 + i)
        out.append(generate(spec))
    return out


def times_theta(theta, phi):
    if math.isinf(theta):
        return math.inf if phi > 0 else 0
    return Fraction(theta) * phi


@pytest.fixture(scope="module")
def feasibility_suite(tmp_path_factory):
    root = tmp_path_factory.mktemp("suite1")
    insts = random_instances(500, seed=1, n_range=(4, 40), m_max=200, k_max=5, cost_scale=100)
    runs = []
    elapsed = 0.0
    for i, inst in enumerate(insts):
        steps = []
        start = time.perf_counter()
        rep = solve(inst, CFG, probe=steps.append)
        elapsed += time.perf_counter() - start
        runs.append((i, inst, rep, steps))
        (root / f"i{i}.json").write_text(inst.dumps())
        (root / f"s{i}.json").write_text(json.dumps(rep.to_dict()))
    return root, runs, elapsed


def test_c01_feasibility_suite(feasibility_suite):
    root, runs, elapsed = feasibility_suite
    failures = [
        i for i, *_ in runs
        if cmd_verify(Namespace(input=str(root / f"i{i}.json"), solution=str(root / f"s{i}.json")))
    ]
    ok = not failures and elapsed < 60
    record_criterion(1, "500 generated instances verify", ok,
                     f"{len(runs) - len(failures)}/{len(runs)} verified, solve time {elapsed:.1f}s (< 60s)")
    assert not failures
    assert elapsed < 60


def test_c02_theorem_bound_vs_oracle():
    insts = random_instances(200, seed=2, n_range=(3, 9), m_max=18, k_max=3)
    ratios, violations = [], []
    for i, inst in enumerate(insts):
        assert inst.edge_count <= 18
        rep = solve(inst, CFG)
        opt = exact_optimum(inst)[1]
        k = max(inst.requirements)
        bound = proven_bound(k, effective_theta(inst), CFG)
        if rep.cost > bound * opt:
            violations.append(i)
        if opt:
            ratios.append(float(Fraction(rep.cost) / Fraction(opt)))
    median = statistics.median(ratios)
    q = statistics.quantiles(ratios, n=10)
    detail = (f"violations {len(violations)}; ratio min {min(ratios):.3f} median {median:.3f} "
              f"p90 {q[-1]:.3f} max {max(ratios):.3f}")
    record_criterion(2, "alg <= 2((1+g)ceil(log_{1/a} k*theta_eff)+2) opt", not violations and median < 3,
                     detail)
    print(detail)
    assert not violations
    assert median < 3


def test_c03_cheap_set_budget(feasibility_suite):
    _, runs, _ = feasibility_suite
    steps = [rec for *_, recs in runs for rec in recs]
    bad = [rec for rec in steps if not rec.cheap_lb <= rec.gamma * rec.tau]
    record_criterion(3, "l_C(B) <= gamma*tau at every step", not bad,
                     f"{len(steps)} step invocations, {len(bad)} violations")
    assert steps and not bad


def test_c04_cheap_part_of_optimum():
    insts = random_instances(100, seed=4, n_range=(3, 7), m_max=12)
    bad = 0
    for inst in insts:
        bip = bipartite_double_cover(inst)
        w = threshold_weights(bip)
        phi0 = potential(bip, w)
        F, _ = exact_optimum(bip.instance)
        _, tau = side_costs(bip, F)
        C = cheap_edges(bip, w, tau, CFG.gamma, phi0)
        if not potential(bip, w, C & F) * CFG.gamma <= phi0:
            bad += 1
    record_criterion(4, "Phi(C & F*) <= Phi0/gamma with tau = l_F*(B)", bad == 0,
                     f"100 instances, {bad} violations")
    assert bad == 0


def test_c05_submodularity():
    insts = random_instances(20, seed=5, n_range=(4, 10), m_max=25)
    rng = random.Random(5)
    bad = 0
    for t in range(1000):
        bip = bipartite_double_cover(insts[t % 20])
        w = threshold_weights(bip)
        m = bip.instance.edge_count
        T = {e for e in range(m) if rng.random() < rng.random()}
        S = {e for e in T if rng.random() < 0.5}
        outside = [e for e in range(m) if e not in T]
        if not outside:
            T.discard(0)
            S.discard(0)
            outside = [0]
        x = rng.choice(outside)

        def f(X):
            return coverage_value(bip, w, X)

        if not f(S | {x}) - f(S) >= f(T | {x}) - f(T) >= 0:
            bad += 1
    record_criterion(5, "coverage value is monotone submodular", bad == 0,
                     f"1000 triples over 20 instances, {bad} violations")
    assert bad == 0


def test_c06_exact_inner_potential_decay():
    cfg = SolveConfig(use_exact_inner=True)
    insts = random_instances(50, seed=6, n_range=(3, 7), m_max=12)
    bad, iterations = 0, 0
    for inst in insts:
        bip = bipartite_double_cover(inst)
        w = threshold_weights(bip)
        tau = math.ceil(exact_optimum(bip.instance)[1])
        res = main_loop(bip, w, cfg, tau)
        for rec in res.records:
            iterations += 1
            if not rec.phi_after * cfg.gamma <= rec.phi_before:
                bad += 1
    record_criterion(6, "exact inner: Phi(J+I) <= Phi(J)/gamma at tau = ceil(opt)", bad == 0,
                     f"50 instances, {iterations} iterations, {bad} violations")
    assert bad == 0 and iterations > 0


def test_c07_scaling_reduction():
    eps, rho = Fraction(1, 4), 1
    insts = random_instances(50, seed=7, n_range=(3, 7), m_max=14, cost_scale=200)
    ratio_bad, slope_bad = 0, 0
    for inst in insts:
        opt = exact_optimum(inst)[1]
        best = None
        for M in enumerate_M(inst):
            try:
                scaled = scale_costs(inst, M, rho, eps)
            except InfeasibleAtThisM:
                continue
            if scaled.instance.edges and not slope(scaled.instance) <= inst.node_count * (rho + 1) / eps:
                slope_bad += 1
            J_hat, _ = exact_optimum(scaled.instance)
            cost = activation_cost(inst, lift_scaled_solution(scaled, J_hat))
            best = cost if best is None else min(best, cost)
        if not best <= (1 + 2 * eps) * opt:
            ratio_bad += 1
    ok = ratio_bad == 0 and slope_bad == 0
    record_criterion(7, "scaled exact optimum <= (1+2eps) opt, slope <= n(rho+1)/eps", ok,
                     f"50 instances, {ratio_bad} ratio and {slope_bad} slope violations")
    assert ok


def test_c08_bipartite_doubling():
    insts = random_instances(50, seed=8, n_range=(3, 7), m_max=12)
    bad = 0
    for inst in insts:
        opt = exact_optimum(inst)[1]
        bip = bipartite_double_cover(inst)
        Jb, opt_b = exact_optimum(bip.instance)
        lifted = lift_bipartite_solution(bip, Jb)
        if not (opt_b <= 2 * opt and is_feasible(inst, lifted)
                and activation_cost(inst, lifted) <= opt_b):
            bad += 1
    record_criterion(8, "opt(bipartite) <= 2 opt, lifted optimum feasible and no dearer", bad == 0,
                     f"50 instances, {bad} violations")
    assert bad == 0


def test_c09_tail_cover_bounds(feasibility_suite):
    _, runs, _ = feasibility_suite
    bad = 0
    for _, _, rep, _ in runs:
        t = rep.tail
        if not (t["lb"] <= t["sum_w"] and t["la"] <= times_theta(t["theta"], t["phi"])):
            bad += 1
    record_criterion(9, "l_F(B) <= sum w and l_F(A) <= theta*Phi(J)", bad == 0,
                     f"{len(runs)} solves, {bad} violations")
    assert bad == 0


def test_c10_scale_smoke():
    inst = generate(GeneratorSpec(n=200, m=2000, k_max=10, theta_target=100, cost_scale=100, seed=10))
    start = time.perf_counter()
    rep = solve(inst, CFG)
    elapsed = time.perf_counter() - start
    ok = elapsed < 10 and is_feasible(inst, rep.solution) and rep.cost == activation_cost(inst, rep.solution)
    record_criterion(10, "n=200, m=2000, k=10, theta=100 in < 10s", ok, f"{elapsed:.2f}s, cost {rep.cost}")
    assert ok
