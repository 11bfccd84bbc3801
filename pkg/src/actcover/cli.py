"""Command-line interface: gen, reduce, solve, verify, oracle, compare.

Exit codes: 0 ok, 1 input error, 2 infeasible, 3 verification failure,
4 bound violation.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from pathlib import Path

from .errors import InfeasibleInstance, InputError, OracleTooLarge
from .generators import GeneratorSpec, dumps, generate
from .model import Instance, activation_cost, first_deficient_node, max_requirement, slope
from .oracle import exact_optimum
from .reductions import bipartite_double_cover, scale_costs
from .solver import SolveConfig, effective_theta, proven_bound, solve

EXIT_OK, EXIT_INPUT, EXIT_INFEASIBLE, EXIT_VERIFY, EXIT_BOUND = 0, 1, 2, 3, 4

COMPARE_COLUMNS = [
    "id", "n", "m", "k", "theta", "alg_cost", "opt_cost",
    "ratio", "proven_bound", "within_bound", "runtime_ms",
]


def number(text: str):
    """Parse an int when possible, else a float (``inf`` allowed)."""
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


def _fmt(x):
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else float(x)
    if isinstance(x, float) and math.isinf(x):
        return "inf"
    return x


def load_json(path) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from None


def load_instance(path) -> Instance:
    return Instance.from_dict(load_json(path))


def emit(text: str, out) -> None:
    if out in (None, "-"):
        sys.stdout.write(text + "\n")
    else:
        Path(out).write_text(text + "\n")


def config_from(args) -> SolveConfig:
    return SolveConfig(
        gamma=args.gamma,
        epsilon_inner=args.epsilon,
        use_exact_inner=args.exact_inner,
        enable_scaling=not args.no_scale,
        scaling_eps=args.scaling_eps,
    )


def cmd_gen(args) -> int:
    spec = GeneratorSpec(
        n=args.n, m=args.m, k_max=args.k, theta_target=float(args.theta),
        cost_scale=args.cost_scale, seed=args.seed, bipartite=args.bipartite,
    )
    emit(dumps(generate(spec), spec), args.out)
    return EXIT_OK


def cmd_reduce(args) -> int:
    inst = load_instance(args.input)
    meta = {}
    if args.scale_M is not None:
        scaled = scale_costs(inst, args.scale_M, args.rho, args.scaling_eps)
        inst = scaled.instance
        meta = {"M": args.scale_M, "alpha": float(scaled.alpha), "id_map": list(scaled.id_map)}
    data = bipartite_double_cover(inst).to_dict()
    if meta:
        data["scaling"] = meta
    emit(json.dumps(data, sort_keys=True), args.out)
    return EXIT_OK


def cmd_solve(args) -> int:
    inst = load_instance(args.input)
    report = solve(inst, config_from(args))
    emit(json.dumps(report.to_dict(), sort_keys=True), args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    inst = load_instance(args.input)
    sol = load_json(args.solution)
    try:
        J = inst.check_edge_set(sol["edges"])
        claimed = sol["cost"]
    except (KeyError, TypeError) as exc:
        raise InputError(f"solution JSON is missing field {exc}") from None
    bad = first_deficient_node(inst, J)
    if bad is not None:
        print(f"node {bad} is not covered: requirement {inst.requirements[bad]}", file=sys.stderr)
        return EXIT_VERIFY
    actual = activation_cost(inst, J)
    if claimed != actual:
        print(f"cost mismatch: claimed {claimed}, recomputed {_fmt(actual)}", file=sys.stderr)
        return EXIT_VERIFY
    print(f"ok: feasible, cost {_fmt(actual)}")
    return EXIT_OK


def cmd_oracle(args) -> int:
    inst = load_instance(args.input)
    J, cost = exact_optimum(inst, guard=args.oracle_guard)
    emit(json.dumps({"edges": sorted(J), "cost": _fmt(cost)}), args.out)
    return EXIT_OK


def compare_row(path: str, cfg: SolveConfig, guard: int, timing: bool = True) -> dict:
    inst = load_instance(path)
    k = max_requirement(inst)
    start = time.perf_counter()
    report = solve(inst, cfg)
    elapsed = (time.perf_counter() - start) * 1000
    opt = None
    if inst.edge_count <= guard:
        opt = exact_optimum(inst, guard=guard)[1]
    bound = proven_bound(k, effective_theta(inst), cfg)
    row = {
        "id": Path(path).stem,
        "n": inst.node_count,
        "m": inst.edge_count,
        "k": k,
        "theta": _fmt(slope(inst)) if inst.edges else 1,
        "alg_cost": _fmt(report.cost),
        "opt_cost": "" if opt is None else _fmt(opt),
        "ratio": "",
        "proven_bound": _fmt(bound),
        "within_bound": "",
        "runtime_ms": f"{elapsed:.1f}" if timing else "",
    }
    if opt is not None:
        if opt == 0:
            row["ratio"] = 1.0 if report.cost == 0 else "inf"
        else:
            row["ratio"] = round(float(Fraction(report.cost) / Fraction(opt)), 6)
        row["within_bound"] = report.cost <= bound * opt
    return row


def _threads() -> int:
    raw = os.environ.get("ACTCOVER_THREADS", "0")
    try:
        return max(0, int(raw))
    except ValueError:
        raise InputError(f"ACTCOVER_THREADS must be an integer, got {raw!r}") from None


def cmd_compare(args) -> int:
    root = Path(args.dir)
    if not root.is_dir():
        raise InputError(f"{root} is not a directory")
    paths = sorted(str(p) for p in root.glob("*.json"))
    cfg = config_from(args)
    workers = _threads()
    jobs = [(p, cfg, args.oracle_guard, not args.no_timing) for p in paths]
    if workers:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(compare_row, *zip(*jobs))) if jobs else []
    else:
        rows = [compare_row(*job) for job in jobs]
    out = sys.stdout if args.out in (None, "-") else open(args.out, "w", newline="")
    try:
        writer = csv.DictWriter(out, fieldnames=COMPARE_COLUMNS)
        writer.writeheader()
        writer.writerows(rows)
    finally:
        if out is not sys.stdout:
            out.close()
    violations = [r["id"] for r in rows if r["within_bound"] is False]
    if violations:
        print(f"bound violated on: {', '.join(violations)}", file=sys.stderr)
        return EXIT_BOUND
    return EXIT_OK


def _solver_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--gamma", type=number, default=2)
    p.add_argument("--epsilon", type=number, default=0.5 - 1 / math.e,
                   help="inner approximation slack (default 1/2 - 1/e, giving alpha = 3/4)")
    p.add_argument("--no-scale", action="store_true", help="never apply cost scaling")
    p.add_argument("--scaling-eps", type=number, default=0.25)
    p.add_argument("--exact-inner", action="store_true",
                   help="exact budgeted coverage in each step (small instances only)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="actcover", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a random instance")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--theta", type=number, default=1)
    p.add_argument("--cost-scale", type=number, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--bipartite", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("reduce", help="emit the bipartite double cover")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out")
    p.add_argument("--scale-M", type=number, help="apply cost scaling with this M first")
    p.add_argument("--rho", type=number, default=1)
    p.add_argument("--scaling-eps", type=number, default=0.25)
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("solve", help="run the approximation algorithm")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out")
    _solver_flags(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify", help="check a solution's feasibility and cost")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--solution", required=True)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("oracle", help="exact optimum of a small instance")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out")
    p.add_argument("--oracle-guard", type=int, default=24)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("compare", help="solve a directory of instances against the oracle")
    p.add_argument("--dir", required=True)
    p.add_argument("--out")
    p.add_argument("--oracle-guard", type=int, default=24)
    p.add_argument("--no-timing", action="store_true",
                   help="leave runtime_ms empty so reruns give identical CSV")
    _solver_flags(p)
    p.set_defaults(func=cmd_compare)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InfeasibleInstance as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (InputError, OracleTooLarge, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
