"""Batch experiment runner.

Subcommands: ``gen`` (random instances), ``solve-det`` (deterministic
solver), ``run-boost`` / ``run-indboost`` (two-stage policies with exact or
Monte-Carlo evaluation), ``run-saa`` (sample-average pipeline with optional
iteration trace), ``gap`` (correlation-gap report), and ``check`` (property
suites).  Reports are canonical JSON; rerunning a command with the same seed
and inputs reproduces the report byte for byte, so wall-clock time goes to
stderr rather than into the file.

Exit codes: 0 success, 1 a check or bound failed, 2 schema error,
3 enumeration cap exceeded, 4 solver failure (infeasible, unbounded, or
numerical), 5 refused to overwrite an existing output.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .boosting import (
    BoostPolicyBuilder,
    IndBoostPolicyBuilder,
    boost_and_sample,
    evaluate_policy,
    exact_two_stage_opt,
    ind_boost,
    policy_cost,
)
from .errors import (
    CapExceeded,
    Infeasible,
    NumericalFailure,
    SchemaError,
    StocombError,
    Unbounded,
)
from .gap import correlation_gap
from .generate import (
    random_explicit_distribution,
    random_gap_instance,
    random_marginals,
    random_problem,
)
from .io import (
    canonical_json,
    dump_instance,
    load_gap_instance,
    load_instance,
    load_stochastic_lp,
    read_json,
    write_json,
)
from .model import (
    IndependentBernoulli,
    check_monotone_feasibility,
    check_subadditive,
    enumerate_support,
    exact_opt,
)
from .rng import stream
from .saa import build_sample_average, h_exact, minimize, solve_deterministic_equivalent
from .sharing import check_fairness, equal_split_shares
from .solvers import algorithm_for, empirical_alpha
from .setfun import table as setfun_table

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_SCHEMA = 2
EXIT_CAP = 3
EXIT_SOLVER = 4
EXIT_OUTPUT = 5


def _emit(report: dict, args) -> None:
    if getattr(args, "format", "json") == "csv":
        text = _csv_view(report)
        if getattr(args, "output", None):
            path = Path(args.output)
            if path.exists() and not args.overwrite:
                raise FileExistsError(f"{path} exists; pass --overwrite to replace it")
            path.write_text(text, encoding="utf-8")
        else:
            sys.stdout.write(text)
        return
    if getattr(args, "output", None):
        write_json(args.output, report, overwrite=args.overwrite)
    else:
        sys.stdout.write(canonical_json(report))


def _csv_view(report: dict) -> str:
    """Tabular rendering of the report's record table, where one exists."""
    lines = []
    if "records" in report:
        lines.append("scenario,probability,recourse_cost")
        for rec in report["records"]:
            lines.append(f"{'|'.join(rec['scenario'])},{rec['probability']!r},"
                         f"{rec['recourse_cost']!r}")
    elif "worst_distribution" in report:
        lines.append("subset,probability")
        for subset, p in report["worst_distribution"].items():
            lines.append(f"{subset.replace(',', '|')},{p!r}")
    else:
        lines.append("key,value")
        for key in sorted(report):
            value = report[key]
            if isinstance(value, (int, float, str, bool)):
                lines.append(f"{key},{value}")
    return "\n".join(lines) + "\n"


def _config_echo(args, fields) -> dict:
    out = {}
    for k in fields:
        v = getattr(args, k, None)
        if v is None:
            continue
        if k == "instance":
            v = Path(v).name  # repo-relative goldens must not embed paths
        out[k] = v
    return out


def cmd_gen(args) -> int:
    if args.kind == "gap":
        inst = random_gap_instance(args.clients, args.seed)
        fn = inst.f
        payload = {
            "ground": list(inst.ground),
            "marginals": {str(i): inst.marginals[i] for i in inst.ground},
            "set_function": {
                "kind": "table",
                "values": [float(v) for v in setfun_table(fn, inst.ground)],
            },
        }
    else:
        problem = random_problem(args.kind, args.clients, args.elements, args.seed)
        if args.distribution == "explicit":
            dist = random_explicit_distribution(problem.clients, args.seed)
        elif args.distribution == "independent":
            dist = random_marginals(problem.clients, args.seed)
        else:
            dist = None
        payload = dump_instance(problem, dist)
    _emit(payload, args)
    return EXIT_OK


def cmd_solve_det(args) -> int:
    problem, _ = load_instance(read_json(args.instance))
    clients = (frozenset(args.clients.split(","))
               if args.clients else frozenset(problem.clients))
    unknown = clients - set(problem.clients)
    if unknown:
        raise SchemaError(f"unknown clients requested: {sorted(unknown)}")
    alg = algorithm_for(problem)
    sol = alg.solve(problem, clients)
    report = {
        "command": "solve-det",
        "config": _config_echo(args, ("instance", "clients")),
        "kind": problem.kind,
        "served": sorted(map(str, clients)),
        "chosen": sorted(map(str, sol.chosen)),
        "cost": float(sol.cost),
        "feasible": bool(problem.feasibility(sol.chosen, clients)),
        "artifact_version": __version__,
    }
    if args.exact:
        opt = exact_opt(problem, clients)
        report["exact_cost"] = float(opt.cost)
        report["ratio"] = float(sol.cost / opt.cost) if opt.cost > 0 else 1.0
    _emit(report, args)
    return EXIT_OK


def _boost_report(args, problem, dist, builder, seeded_policy, command: str) -> dict:
    sigma = problem.inflation
    support = enumerate_support(dist)
    records = []
    for realized, p in sorted(support, key=lambda kv: sorted(map(str, kv[0]))):
        patch = seeded_policy.recourse(realized)
        records.append({
            "scenario": sorted(map(str, realized)),
            "probability": float(p),
            "recourse": sorted(map(str, patch)),
            "recourse_cost": float(problem.cost(patch)),
        })
    evaluation = evaluate_policy(
        problem, builder, dist, sigma=sigma, mode=args.mode,
        rng=stream(args.seed, f"{command}-eval"), runs=args.runs)
    optimum = exact_two_stage_opt(problem, dist, sigma)
    ratio = (evaluation.expected_cost / optimum.value
             if optimum.value > 1e-12 else 1.0)
    report = {
        "command": command,
        "config": _config_echo(args, ("instance", "seed", "mode", "runs")),
        "seed": args.seed,
        "first_stage": sorted(map(str, seeded_policy.first_stage)),
        "records": records,
        "expected_cost": float(evaluation.expected_cost),
        "optimal_value": float(optimum.value),
        "optimal_first_stage": sorted(map(str, optimum.first_stage)),
        "ratio": float(ratio),
        "mode": evaluation.mode,
        "artifact_version": __version__,
    }
    if evaluation.ci_halfwidth is not None:
        report["ci_halfwidth"] = float(evaluation.ci_halfwidth)
    return report


def cmd_run_boost(args) -> int:
    problem, dist = load_instance(read_json(args.instance))
    if dist is None:
        raise SchemaError("run-boost needs a distribution in the instance file")
    alg = algorithm_for(problem)
    policy = boost_and_sample(problem, alg, dist,
                              stream(args.seed, "boost-draws"))
    builder = BoostPolicyBuilder(problem, alg)
    _emit(_boost_report(args, problem, dist, builder, policy, "run-boost"), args)
    return EXIT_OK


def cmd_run_indboost(args) -> int:
    problem, dist = load_instance(read_json(args.instance))
    if not isinstance(dist, IndependentBernoulli):
        raise SchemaError("run-indboost needs an independent distribution")
    alg = algorithm_for(problem)
    policy = ind_boost(problem, alg, dist, problem.inflation,
                       stream(args.seed, "indboost-draws"))
    builder = IndBoostPolicyBuilder(problem, alg, dist.marginals)
    _emit(_boost_report(args, problem, dist, builder, policy, "run-indboost"), args)
    return EXIT_OK


def cmd_run_saa(args) -> int:
    instance = load_stochastic_lp(read_json(args.instance))
    rng = stream(args.seed, "saa-sample")
    sampled = build_sample_average(instance, args.samples, rng)
    result = minimize(sampled, tolerance=args.tolerance,
                      keep_trace=args.trace is not None)
    true_value = h_exact(instance, result.x)
    opt_value, opt_x = solve_deterministic_equivalent(instance)
    report = {
        "command": "run-saa",
        "config": _config_echo(args, ("instance", "seed", "samples", "tolerance")),
        "seed": args.seed,
        "empirical_weights": [float(b.probability) for b in sampled.scenarios],
        "solution": [float(v) for v in result.x],
        "sample_average_value": float(result.value),
        "true_value": float(true_value),
        "optimal_value": float(opt_value),
        "optimal_solution": [float(v) for v in opt_x],
        "excess_over_optimum": float(true_value - opt_value),
        "converged": bool(result.converged),
        "iterations": int(result.iterations),
        "artifact_version": __version__,
    }
    if args.trace:
        lines = ["iteration,value,step"]
        lines += [f"{t},{v!r},{s!r}" for t, v, s in result.trace]
        trace_path = Path(args.trace)
        if trace_path.exists() and not args.overwrite:
            raise FileExistsError(f"{trace_path} exists; pass --overwrite")
        trace_path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    _emit(report, args)
    return EXIT_OK


def cmd_gap(args) -> int:
    inst = load_gap_instance(read_json(args.instance))
    report_data = correlation_gap(inst, eta=args.eta, beta=args.beta)
    satisfied = report_data.kappa <= report_data.bound + 1e-6
    report = {
        "command": "gap",
        "config": _config_echo(args, ("instance", "eta", "beta")),
        "ground": list(inst.ground),
        "worst_case": float(report_data.worst_case),
        "independent": float(report_data.independent),
        "kappa": float(report_data.kappa),
        "bound": float(report_data.bound),
        "bound_satisfied": bool(satisfied),
        "artifact_version": __version__,
    }
    if len(inst.ground) <= 8:
        report["worst_distribution"] = {
            ",".join(sorted(map(str, s))): float(p)
            for s, p in sorted(report_data.worst_distribution.items(),
                               key=lambda kv: ",".join(sorted(map(str, kv[0]))))
        }
    _emit(report, args)
    return EXIT_OK if satisfied else EXIT_CHECK_FAILED


def cmd_check(args) -> int:
    problem, _ = load_instance(read_json(args.instance))
    results = {}
    if args.suite == "subadditivity":
        rep = check_subadditive(problem)
        results["subadditivity"] = {"ok": rep.ok, "failure": rep.failure}
    elif args.suite == "monotone-feasibility":
        rep = check_monotone_feasibility(problem)
        results["monotone-feasibility"] = {"ok": rep.ok, "failure": rep.failure}
    elif args.suite == "solver":
        alg = algorithm_for(problem)
        alpha_hat = empirical_alpha(problem, alg)
        ok = alpha_hat <= alg.alpha + 1e-9
        results["solver"] = {"ok": bool(ok), "claimed_alpha": float(alg.alpha),
                             "empirical_alpha": float(alpha_hat)}
    elif args.suite == "fairness":
        rep = check_fairness(equal_split_shares(problem), problem)
        results["fairness"] = {"ok": rep.ok, "failure": rep.violation}
    else:
        raise SchemaError(f"unknown suite {args.suite!r}")
    passed = all(r["ok"] for r in results.values())
    report = {
        "command": "check",
        "config": _config_echo(args, ("instance", "suite")),
        "results": results,
        "passed": bool(passed),
        "artifact_version": __version__,
    }
    _emit(report, args)
    return EXIT_OK if passed else EXIT_CHECK_FAILED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stocomb",
        description="Two-stage stochastic combinatorial optimization harness")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, needs_seed: bool):
        p.add_argument("--output", help="write the report here (stdout otherwise)")
        p.add_argument("--overwrite", action="store_true",
                       help="allow replacing an existing output file")
        p.add_argument("--format", choices=("json", "csv"), default="json",
                       help="report rendering (csv emits the record table)")
        if needs_seed:
            p.add_argument("--seed", type=int, required=True,
                           help="seed for every random draw in this run")

    p = sub.add_parser("gen", help="generate a random instance")
    p.add_argument("--kind", required=True,
                   choices=("steiner", "ufl", "set_cover", "vertex_cover", "gap"))
    p.add_argument("--clients", type=int, default=4)
    p.add_argument("--elements", type=int, default=5)
    p.add_argument("--distribution",
                   choices=("explicit", "independent", "none"), default="explicit")
    common(p, needs_seed=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("solve-det", help="run the deterministic solver")
    p.add_argument("--instance", required=True)
    p.add_argument("--clients", help="comma-separated client ids (default: all)")
    p.add_argument("--exact", action="store_true",
                   help="also run the exhaustive optimizer and report the ratio")
    common(p, needs_seed=False)
    p.set_defaults(func=cmd_solve_det)

    for name, fn in (("run-boost", cmd_run_boost), ("run-indboost", cmd_run_indboost)):
        p = sub.add_parser(name, help=f"evaluate the {name[4:]} policy")
        p.add_argument("--instance", required=True)
        p.add_argument("--mode", choices=("exact", "monte_carlo"), default="exact")
        p.add_argument("--runs", type=int, default=10_000,
                       help="replications in monte_carlo mode")
        common(p, needs_seed=True)
        p.set_defaults(func=fn)

    p = sub.add_parser("run-saa", help="sample-average pipeline on a stochastic LP")
    p.add_argument("--instance", required=True)
    p.add_argument("--samples", type=int, default=2000)
    p.add_argument("--tolerance", type=float, default=1e-6)
    p.add_argument("--trace", help="write the per-iteration CSV trace here")
    common(p, needs_seed=True)
    p.set_defaults(func=cmd_run_saa)

    p = sub.add_parser("gap", help="correlation-gap report for a gap instance")
    p.add_argument("--instance", required=True)
    p.add_argument("--eta", type=float, default=1.0)
    p.add_argument("--beta", type=float, default=1.0)
    common(p, needs_seed=False)
    p.set_defaults(func=cmd_gap)

    p = sub.add_parser("check", help="run a property suite on an instance")
    p.add_argument("--instance", required=True)
    p.add_argument("--suite", required=True,
                   choices=("subadditivity", "monotone-feasibility",
                            "solver", "fairness"))
    common(p, needs_seed=False)
    p.set_defaults(func=cmd_check)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    start = time.perf_counter()
    try:
        code = args.func(args)
    except SchemaError as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    except CapExceeded as exc:
        print(f"cap exceeded: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (Infeasible, Unbounded, NumericalFailure) as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except FileExistsError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_OUTPUT
    except StocombError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CHECK_FAILED
    print(f"wall-clock: {time.perf_counter() - start:.3f}s", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
