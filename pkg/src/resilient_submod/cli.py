"""Command-line entry point.

Every subcommand writes CSV rows to stdout and diagnostics to stderr.
Exit status: 0 on success, 1 on domain errors, 2 on usage or parse errors.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import fields
from pathlib import Path

from .adversary import REMOVAL_CAP, worst_removal
from .analysis import compute_curvature, g_curve, run_property_checks, theorem1_bound
from .core import Subset
from .errors import InstanceParseError, ResilientSubmodError
from .experiments import ExperimentConfig, fmt, run_experiment, summarize
from .functions import instance_to_dict, load_instance, random_psd_instance
from .solvers import SOLVERS, ProblemInstance, solve


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _int_list(text):
    """``8..15`` or ``1,2,3``."""
    try:
        if ".." in text:
            lo, hi = text.split("..")
            return list(range(int(lo), int(hi) + 1))
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a range like 8..15 or a list like 1,2,3, got {text!r}")


def _solve_row(res):
    return ",".join([
        res.solver_name, str(res.selected), fmt(res.residual_value), fmt(res.eval_count),
        "" if res.curvature is None else fmt(res.curvature),
        "" if res.bound is None else fmt(res.bound),
    ])


def cmd_solve(args, out, solver=None):
    f = load_instance(args.instance)
    inst = ProblemInstance(f, args.alpha, args.beta)
    res = solve(inst, solver or args.solver, seed=args.seed, cap=args.cap, removal=args.removal)
    if args.header:
        print("solver,selected,residual,evals,kappa,bound", file=out)
    print(_solve_row(res), file=out)


def cmd_exact(args, out):
    cmd_solve(args, out, solver="exact")


def cmd_attack(args, out):
    f = load_instance(args.instance)
    subset = Subset.parse(args.subset, f.ground_size)
    res = worst_removal(f, subset, args.beta, args.method, args.cap or REMOVAL_CAP)
    if args.header:
        print("removed,residual,exact,evals", file=out)
    print(f"{res.removed},{fmt(res.residual_value)},{fmt(res.exact)},{res.eval_count_used}", file=out)


def cmd_curvature(args, out):
    rep = compute_curvature(load_instance(args.instance))
    if args.header:
        print("kappa,argmin,evals", file=out)
    print(f"{fmt(rep.kappa)},{rep.argmin_element},{rep.eval_count_used}", file=out)


def cmd_bound(args, out):
    rep = theorem1_bound(args.kappa, args.beta)
    if args.header:
        print("kappa,beta,bound,branch", file=out)
    print(f"{fmt(rep.kappa)},{rep.beta},{fmt(rep.bound)},{rep.branch}", file=out)


def cmd_gcurve(args, out):
    if args.header:
        print("kappa,g", file=out)
    if args.kappa is not None:
        kappas = [args.kappa]
    else:
        kappas = [(i + 1) / args.points for i in range(args.points)]
    for k in kappas:
        print(f"{fmt(k)},{fmt(g_curve(k))}", file=out)


def cmd_gen_logdet(args, out):
    f = random_psd_instance(args.m, args.d, args.seed)
    spec = ({"type": "logdet_random", "m": args.m, "d": args.d, "seed": args.seed}
            if args.compact else instance_to_dict(f))
    text = json.dumps(spec) + "\n"
    if args.output:
        Path(args.output).write_text(text)
    else:
        out.write(text)


def cmd_check(args, out):
    f = load_instance(args.instance)
    reports = run_property_checks(f, trials=args.trials, seed=args.seed)
    print("check,passed,trials,worst_slack", file=out)
    for r in reports:
        print(f"{r.name},{fmt(r.passed)},{r.trials},{fmt(r.worst_slack)}", file=out)
    return 0 if all(r.passed for r in reports) else 1


def cmd_experiment(args, out):
    cfg = ExperimentConfig.from_json(args.config) if args.config else ExperimentConfig()
    for f in fields(ExperimentConfig):
        val = getattr(args, f.name, None)
        if val is not None:
            setattr(cfg, f.name, val)
    report = run_experiment(cfg)
    for w in report.warnings:
        print(f"warning: {w}", file=sys.stderr)
    if not cfg.output_path:
        out.write(report.to_csv())
    else:
        s = summarize(report)
        means = " ".join(f"beta={b}:{v:.6f}" for b, v in s.mean_by_beta.items())
        print(f"wrote {len(report.rows)} rows to {cfg.output_path}; mean ratio by {means}",
              file=sys.stderr)


def build_parser():
    p = _Parser(prog="resilient-submod", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    def common(sp, instance=True):
        if instance:
            sp.add_argument("--instance", required=True, help="instance JSON file")
        sp.add_argument("--header", action="store_true", help="print a CSV header line first")

    for name, fn in (("solve", cmd_solve), ("exact", cmd_exact)):
        sp = sub.add_parser(name)
        common(sp)
        sp.add_argument("--alpha", type=int, required=True)
        sp.add_argument("--beta", type=int, required=True)
        if name == "solve":
            sp.add_argument("--solver", choices=SOLVERS, default="resilient")
        sp.add_argument("--seed", type=int)
        sp.add_argument("--removal", choices=("auto", "exact", "greedy"), default="auto")
        sp.add_argument("--cap", type=int)
        sp.set_defaults(func=fn)

    sp = sub.add_parser("attack")
    common(sp)
    sp.add_argument("--subset", required=True, help="e.g. '{0,1}'")
    sp.add_argument("--beta", type=int, required=True)
    sp.add_argument("--method", choices=("exact", "greedy"), default="exact")
    sp.add_argument("--cap", type=int)
    sp.set_defaults(func=cmd_attack)

    sp = sub.add_parser("curvature")
    common(sp)
    sp.set_defaults(func=cmd_curvature)

    sp = sub.add_parser("bound")
    common(sp, instance=False)
    sp.add_argument("--kappa", type=float, required=True)
    sp.add_argument("--beta", type=int, required=True)
    sp.set_defaults(func=cmd_bound)

    sp = sub.add_parser("gcurve")
    common(sp, instance=False)
    grp = sp.add_mutually_exclusive_group()
    grp.add_argument("--kappa", type=float)
    grp.add_argument("--points", type=int, default=20, help="evenly spaced kappa in (0, 1]")
    sp.set_defaults(func=cmd_gcurve)

    sp = sub.add_parser("gen-logdet")
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--d", type=int, default=20)
    sp.add_argument("--seed", type=int, required=True)
    sp.add_argument("--compact", action="store_true", help="emit a logdet_random spec instead of matrices")
    sp.add_argument("--output")
    sp.set_defaults(func=cmd_gen_logdet)

    sp = sub.add_parser("check")
    sp.add_argument("--instance", required=True)
    sp.add_argument("--trials", type=int, default=500)
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=cmd_check)

    sp = sub.add_parser("experiment")
    sp.add_argument("--config", help="JSON file with ExperimentConfig fields; flags override it")
    sp.add_argument("--m-values", dest="m_values", type=_int_list)
    sp.add_argument("--alpha", type=int)
    sp.add_argument("--beta-values", dest="beta_values", type=_int_list)
    sp.add_argument("--trials", type=int)
    sp.add_argument("--d", type=int)
    sp.add_argument("--seed", dest="base_seed", type=int)
    sp.add_argument("--removal", dest="removal_method", choices=("exact", "greedy"))
    sp.add_argument("--output", dest="output_path")
    sp.add_argument("--cap", type=int)
    sp.add_argument("--workers", type=int)
    sp.set_defaults(func=cmd_experiment)
    return p


def dispatch(argv, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(exc, file=err)
        return 2
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    try:
        code = args.func(args, out)
    except (InstanceParseError, json.JSONDecodeError, OSError) as exc:
        print(f"error: {exc}", file=err)
        return 2
    except ResilientSubmodError as exc:
        print(f"error: {exc}", file=err)
        return 1
    return code or 0


def main():
    sys.exit(dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
