"""Command-line entry point: ``covdecomp <subcommand> [flags]``.

Exit status is 0 on success, 1 on invalid input or usage, 2 on a numerical
failure. Every subcommand accepts ``--config FILE`` with ``key=value`` lines
(keys are flag names without the leading dashes); explicit flags win.
"""
import argparse
import math
import sys
import warnings
from pathlib import Path

import numpy as np

from . import __version__
from .assumptions import check_all
from .errors import InvalidInput, NumericalError
from .inference import InfoModel, lbp_compare
from .matrix import load_matrix, save_matrix
from .model import GroundTruthModel, read_keyvalue, write_keyvalue
from .rng import make_rng
from .sampling import sample_covariance, sample_gaussian
from .solver import ScheduleConfig, SolverOptions, decompose, regularization_schedule
from .sweep import METHODS, TUNED_C1, TUNED_C2, SweepConfig, run_sweep, summarize
from .synth import SynthConfig, gen_model

EXIT_OK, EXIT_INVALID, EXIT_NUMERICAL = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_help(sys.stderr)
        raise UsageError(message)


def _real_or_inf(text):
    if text.strip().lower() in ("inf", "infinity"):
        return math.inf
    return float(text)


def _int_list(text):
    return [int(tok) for tok in str(text).split(",") if tok.strip()]


def _str_list(text):
    return [tok.strip() for tok in str(text).split(",") if tok.strip()]


def cmd_synth(args):
    config = SynthConfig(
        rows=args.rows, cols=args.cols, edge_weight_magnitude=args.edge_weight,
        residual_fraction=args.residual_fraction, residual_magnitude=args.residual_magnitude,
        pd_margin=args.pd_margin, seed=args.seed,
    )
    model = gen_model(config)
    model.save(args.out)
    print(f"wrote model p={model.p} lambda_star={model.lambda_star:g} to {args.out}")


def cmd_sample(args):
    model = GroundTruthModel.load(args.model)
    samples = sample_gaussian(model.sigma, args.n, make_rng(args.seed))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    save_matrix(out / "sigma-hat.csv", sample_covariance(samples, centered=args.centered))
    if args.save_samples:
        samples.save(out / "samples.csv")
    print(f"wrote {out / 'sigma-hat.csv'} from n={args.n} samples")


def _resolve_penalties(args, p):
    gamma, lam = args.gamma, args.lam
    if "schedule" in (gamma, lam):
        if args.n is None:
            raise InvalidInput("--n is required for schedule mode")
        if lam == "schedule" and args.lambda_star is None:
            raise InvalidInput("--lambda-star is required for --lambda schedule")
        sched = ScheduleConfig(args.c1, args.c2, args.lambda_star or 0.0)
        g_s, l_s = regularization_schedule(p, args.n, sched)
        gamma = g_s if gamma == "schedule" else gamma
        lam = l_s if lam == "schedule" else lam
    try:
        return float(gamma), _real_or_inf(str(lam))
    except ValueError as exc:
        raise InvalidInput(f"bad --gamma/--lambda value: {exc}") from exc


def cmd_decompose(args):
    s_hat = load_matrix(args.cov)
    gamma, lam = _resolve_penalties(args, s_hat.shape[0])
    options = SolverOptions(gamma=gamma, lam=lam, tol=args.tol, max_iterations=args.max_iters)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        est = decompose(s_hat, options)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    save_matrix(out / "j_m_hat.csv", est.j_m_hat)
    save_matrix(out / "sigma_r_hat.csv", est.sigma_r_hat)
    write_keyvalue(out / "diagnostics.txt", {
        "gamma": repr(gamma),
        "lambda": "inf" if math.isinf(lam) else repr(lam),
        "iterations": est.iterations,
        "converged": est.converged,
        "objective": repr(est.final_objective),
        "stationarity_residual": repr(est.kkt.stationarity_residual),
        "dual_feasibility_residual": repr(est.kkt.dual_feasibility_residual),
        "box_violation": repr(est.kkt.box_violation),
    })
    print(f"{'converged' if est.converged else 'NOT converged'} after {est.iterations} "
          f"iterations; objective {est.final_objective:.10g}")
    return EXIT_OK if est.converged else EXIT_NUMERICAL


def cmd_check(args):
    model = GroundTruthModel.load(args.model)
    report = check_all(model, tol=args.tol)
    text = "\n".join(report.to_lines()) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    sys.stdout.write(text)


def cmd_lbp(args):
    model = GroundTruthModel.load(args.model)
    mean = model.mean if model.mean is not None else np.zeros(model.p)
    markov, composite = lbp_compare(
        InfoModel.from_mean(model.j_m, mean),
        InfoModel.from_mean(model.j_composite, mean),
        iterations=args.iters, tol=args.tol, damping=args.damping,
    )
    rows = max(markov.iterations, composite.iterations)

    def col(seq, k):
        return repr(seq[k]) if k < len(seq) else "nan"

    lines = ["iteration,mean_error_markov,var_error_markov,mean_error_composite,var_error_composite"]
    for k in range(rows):
        lines.append(",".join([str(k + 1), col(markov.mean_error, k), col(markov.variance_error, k),
                               col(composite.mean_error, k), col(composite.variance_error, k)]))
    Path(args.out).write_text("\n".join(lines) + "\n")
    for name, tr in (("markov", markov), ("composite", composite)):
        state = "converged" if tr.converged else ("diverged" if tr.diverged else "not converged")
        print(f"{name}: rho_bar={tr.rho_bar:.4f} {state} after {tr.iterations} iterations")


def cmd_sweep(args):
    config = SweepConfig(
        model_dir=args.model, sample_sizes=tuple(_int_list(args.sizes)),
        replicates=args.replicates, methods=tuple(_str_list(args.methods)),
        c1=args.c1, c2=args.c2, seed=args.seed, out=args.out, jobs=args.jobs,
    )
    rows = run_sweep(config)
    for column in ("edit_markov", "edit_residual", "linf_composite_precision"):
        for (method, n), value in summarize(rows, column).items():
            print(f"median {column} {method} n={n}: {value:g}")


def build_parser():
    parser = _Parser(prog="covdecomp", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    subs = {}

    p = subs["synth"] = sub.add_parser("synth", help="generate a grid ground-truth model")
    p.add_argument("--rows", type=int, default=8)
    p.add_argument("--cols", type=int, default=8)
    p.add_argument("--edge-weight", type=float, default=0.5)
    p.add_argument("--residual-fraction", type=float, default=0.2)
    p.add_argument("--residual-magnitude", type=float, default=0.2)
    p.add_argument("--pd-margin", type=float, default=SynthConfig.pd_margin)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_synth)

    p = subs["sample"] = sub.add_parser("sample", help="draw samples, write sigma-hat.csv")
    p.add_argument("--model", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--centered", action="store_true")
    p.add_argument("--save-samples", action="store_true")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_sample)

    p = subs["decompose"] = sub.add_parser("decompose", help="solve the decomposition program")
    p.add_argument("--cov", required=True)
    p.add_argument("--gamma", default="0", help="real or 'schedule'")
    p.add_argument("--lambda", dest="lam", default="inf", help="real, 'inf' or 'schedule'")
    p.add_argument("--lambda-star", type=float)
    p.add_argument("--c1", type=float, default=ScheduleConfig.c1)
    p.add_argument("--c2", type=float, default=ScheduleConfig.c2)
    p.add_argument("--n", type=int)
    p.add_argument("--tol", type=float, default=SolverOptions.tol)
    p.add_argument("--max-iters", type=int, default=SolverOptions.max_iterations)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_decompose)

    p = subs["check"] = sub.add_parser("check", help="check assumptions (A.0)-(A.5)")
    p.add_argument("--model", required=True)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--out")
    p.set_defaults(func=cmd_check)

    p = subs["lbp"] = sub.add_parser("lbp", help="loopy BP on Markov vs composite precision")
    p.add_argument("--model", required=True)
    p.add_argument("--iters", type=int, default=1000)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--damping", type=float, default=0.0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_lbp)

    p = subs["sweep"] = sub.add_parser("sweep", help="sample-size sweep of both methods")
    p.add_argument("--model", required=True)
    p.add_argument("--sizes", default="1000,2000,4000,8000")
    p.add_argument("--replicates", type=int, default=5)
    p.add_argument("--methods", default=",".join(METHODS))
    p.add_argument("--c1", type=float, default=TUNED_C1)
    p.add_argument("--c2", type=float, default=TUNED_C2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_sweep)

    for p in subs.values():
        p.add_argument("--config", help="key=value file of flag defaults")
    return parser, subs


def _apply_config(argv, parser, subs):
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("command", nargs="?")
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if not known.config or known.command not in subs:
        return
    sp = subs[known.command]
    dests = {a.dest: a for a in sp._actions}
    defaults = {}
    for key, value in read_keyvalue(known.config).items():
        dest = key.lstrip("-").replace("-", "_")
        dest = "lam" if dest == "lambda" else dest
        if dest not in dests:
            raise InvalidInput(f"unknown config key {key!r} for {known.command}")
        action = dests[dest]
        if isinstance(action, argparse._StoreTrueAction):
            value = value.lower() in ("1", "true", "yes")
        elif action.type is not None:
            value = action.type(value)
        action.required = False
        defaults[dest] = value
    sp.set_defaults(**defaults)


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    parser, subs = build_parser()
    try:
        _apply_config(argv, parser, subs)
        args = parser.parse_args(argv)
        if getattr(args, "jobs", 1) is None:
            args.jobs = SweepConfig().jobs
        status = args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (InvalidInput, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK if status is None else status


if __name__ == "__main__":
    sys.exit(main())
