"""Command-line front end.

Subcommands::

    simulate      write a simulated instance (truth, observed matrix, manifest)
    estimate      run modified USVT or the nuclear-norm estimator
    estimate-f    estimate the reveal function from an estimate
    energy-curve  cumulative rank-k energy of a matrix
    certify       feasibility / nuclear-norm gap of an estimate
    reproduce     simulate + estimate over several seeds, report medians

Every subcommand accepts ``--config FILE``: ``key = value`` lines whose
keys are long option names (``max-iters`` or ``max_iters``).  Flags given
on the command line override the file.

Exit codes: 0 success, 2 configuration error, 3 I/O error, 4 solver did not
converge.
"""

import argparse
import json
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import __version__
from .festimate import estimate_f, integrated_sq_error
from .ingest import (
    RatingScale,
    read_dense_csv,
    read_matrix_csv,
    read_triplets_csv,
    write_dense_csv,
    write_fhat_csv,
    write_matrix_csv,
)
from .linalg import SvdConvergenceError
from .metrics import rank_energy_curve, run_estimator, seed_summary
from .nucmin import SolverParams, certify_solution
from .obsmodel import parse_fspec, simulate
from .usvt import UsvtParams

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3
EXIT_NOT_CONVERGED = 4

log = logging.getLogger("mnarmc")


class ConfigError(Exception):
    pass


def _write_json(obj, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_config(path):
    """Parse a ``key = value`` file; ``#`` starts a comment."""
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key = value")
            key, value = (t.strip() for t in line.split("=", 1))
            out[key.replace("-", "_")] = value
    return out


def _usvt_params(args):
    return UsvtParams(eta=args.eta, mask_clamp_nonneg=not args.literal_mask_clamp)


def _solver_params(args):
    return SolverParams(
        rho=args.rho, tol=args.tol, max_iters=args.max_iters, over_relaxation=args.over_relaxation
    )


def _load_observed(args):
    if args.triplets:
        if not (args.rows and args.cols and args.scale):
            raise ConfigError("--triplets needs --rows, --cols and --scale")
        obs, _ = read_triplets_csv(
            args.triplets, args.rows, args.cols, RatingScale.parse(args.scale), one_based=args.one_based
        )
        return obs
    scale = RatingScale.parse(args.scale) if args.scale else None
    return read_dense_csv(args.observed, missing_token=args.missing_token, scale=scale)


def cmd_simulate(args):
    f = parse_fspec(args.f)
    M, X, obs = simulate(args.n, args.rank, f, args.noise, args.seed)
    os.makedirs(args.out, exist_ok=True)
    write_matrix_csv(M, os.path.join(args.out, "truth.csv"))
    write_dense_csv(obs, os.path.join(args.out, "observed.csv"))
    _write_json(
        {
            "version": __version__,
            "n": args.n,
            "rank": args.rank,
            "f": str(f),
            "noise": args.noise,
            "seed": args.seed,
            "revealed": obs.n_revealed,
        },
        os.path.join(args.out, "manifest.json"),
    )
    print(f"wrote {args.out} ({obs.n_revealed} of {M.size} entries revealed)")
    return EXIT_OK


def cmd_estimate(args):
    obs = _load_observed(args)
    truth = read_matrix_csv(args.truth) if args.truth else None
    if truth is not None and truth.shape != obs.shape:
        raise ConfigError(f"truth shape {truth.shape} != observed shape {obs.shape}")
    report = run_estimator(
        args.method, obs, truth, usvt_params=_usvt_params(args), solver_params=_solver_params(args)
    )
    os.makedirs(args.out, exist_ok=True)
    write_matrix_csv(report.estimate, os.path.join(args.out, f"estimate_{args.method}.csv"))
    payload = report.to_dict()
    _write_json(payload, os.path.join(args.out, f"report_{args.method}.json"))
    print(json.dumps(payload, sort_keys=True))
    if report.diagnostics is not None and not report.diagnostics["converged"]:
        return EXIT_NOT_CONVERGED
    return EXIT_OK


def cmd_estimate_f(args):
    obs = _load_observed(args)
    M_hat = read_matrix_csv(args.estimate)
    if M_hat.shape != obs.shape:
        raise ConfigError(f"estimate shape {M_hat.shape} != observed shape {obs.shape}")
    fhat = estimate_f(obs.mask, np.clip(M_hat, -1.0, 1.0), args.b, args.seed)
    os.makedirs(args.out, exist_ok=True)
    write_fhat_csv(fhat, os.path.join(args.out, "fhat.csv"))
    summary = {"b": args.b, "seed": args.seed, "intervals": fhat.n_intervals}
    if args.f:
        measure = read_matrix_csv(args.truth) if args.truth else M_hat
        summary["ise"] = integrated_sq_error(fhat, parse_fspec(args.f), np.clip(measure, -1.0, 1.0))
        summary["ise_measure"] = "truth" if args.truth else "estimate"
    _write_json(summary, os.path.join(args.out, "fhat.json"))
    print(json.dumps(summary, sort_keys=True))
    return EXIT_OK


def cmd_energy_curve(args):
    curve = rank_energy_curve(read_matrix_csv(args.matrix))
    lines = ["k,energy"] + [f"{k},{e:.17g}" for k, e in enumerate(curve, start=1)]
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_certify(args):
    obs = _load_observed(args)
    report = certify_solution(read_matrix_csv(args.estimate), obs, read_matrix_csv(args.truth))
    print(json.dumps(report, sort_keys=True))
    return EXIT_OK


def _replicate(job):
    n, rank, fspec, noise, seed, method, usvt_params, solver_params = job
    M, _, obs = simulate(n, rank, parse_fspec(fspec), noise, seed)
    report = run_estimator(method, obs, M, usvt_params=usvt_params, solver_params=solver_params)
    converged = report.diagnostics["converged"] if report.diagnostics else True
    return {"seed": seed, "mse": report.mse, "seconds": report.wall_time_seconds, "converged": converged}


def cmd_reproduce(args):
    jobs = [
        (args.n, args.rank, args.f, args.noise, args.seed + k, args.method,
         _usvt_params(args), _solver_params(args))
        for k in range(args.seeds)
    ]
    if args.workers > 1:
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            runs = list(pool.map(_replicate, jobs))
    else:
        runs = [_replicate(j) for j in jobs]
    summary = {
        "config": {"n": args.n, "rank": args.rank, "f": args.f, "noise": args.noise, "method": args.method},
        "runs": runs,
        "mse": seed_summary([r["mse"] for r in runs]),
        "seconds": seed_summary([r["seconds"] for r in runs]),
    }
    if args.out:
        os.makedirs(os.path.dirname(os.path.abspath(args.out)), exist_ok=True)
        _write_json(summary, args.out)
    print(json.dumps(summary, sort_keys=True))
    return EXIT_OK if all(r["converged"] for r in runs) else EXIT_NOT_CONVERGED


def _positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def _seed(text):
    v = int(text)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def _add_observed(p):
    p.add_argument("--observed", help="dense CSV with missing cells")
    p.add_argument("--missing-token", default="NA")
    p.add_argument("--triplets", help="row,col,rating CSV (alternative to --observed)")
    p.add_argument("--rows", type=_positive_int)
    p.add_argument("--cols", type=_positive_int)
    p.add_argument("--scale", help="source rating range lo:hi, mapped onto [-1, 1]")
    p.add_argument("--one-based", action="store_true", help="triplet indices start at 1")


def _add_estimator(p):
    p.add_argument("--method", choices=["usvt", "candes_recht"], default="usvt")
    p.add_argument("--eta", type=float, default=0.02)
    p.add_argument("--literal-mask-clamp", action="store_true",
                   help="clamp the denoised mask to [-1, 1] instead of [0, 1]")
    p.add_argument("--rho", type=float, default=1.0)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--max-iters", type=_positive_int, default=5000)
    p.add_argument("--over-relaxation", type=float, default=1.6)


def _add_simulation(p):
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--rank", type=int, required=True)
    p.add_argument("--f", default="quad", help="const:<c>, quad or identity")
    p.add_argument("--noise", choices=["none", "bernoulli"], default="none")
    p.add_argument("--seed", type=_seed, default=0)


def build_parser():
    parser = argparse.ArgumentParser(prog="mnarmc", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help):
        p = sub.add_parser(name, help=help)
        p.add_argument("--config", help="key = value defaults file")
        p.set_defaults(func=func)
        return p

    p = add("simulate", cmd_simulate, "write a simulated instance")
    _add_simulation(p)
    p.add_argument("--out", required=True, help="run directory")

    p = add("estimate", cmd_estimate, "estimate the full matrix")
    _add_observed(p)
    _add_estimator(p)
    p.add_argument("--truth", help="true matrix CSV; enables the mse field")
    p.add_argument("--out", required=True, help="run directory")

    p = add("estimate-f", cmd_estimate_f, "estimate the reveal function")
    _add_observed(p)
    p.add_argument("--estimate", required=True, help="completed matrix CSV")
    p.add_argument("--b", type=_positive_int, required=True, help="grid resolution (2b+2 intervals)")
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--f", help="true reveal function, enables the ise field")
    p.add_argument("--truth", help="true matrix CSV; the ise measure (defaults to the estimate)")
    p.add_argument("--out", required=True, help="run directory")

    p = add("energy-curve", cmd_energy_curve, "cumulative rank-k energy")
    p.add_argument("--matrix", required=True)
    p.add_argument("--out", help="CSV path (default: stdout)")

    p = add("certify", cmd_certify, "feasibility and nuclear-norm gap")
    _add_observed(p)
    p.add_argument("--estimate", required=True)
    p.add_argument("--truth", required=True, help="any feasible reference matrix")

    p = add("reproduce", cmd_reproduce, "multi-seed simulate + estimate")
    _add_simulation(p)
    _add_estimator(p)
    p.add_argument("--seeds", type=_positive_int, default=5)
    p.add_argument("--workers", type=_positive_int, default=1)
    p.add_argument("--out", help="JSON summary path")
    return parser, sub


def parse_args(argv=None):
    parser, sub = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if known.config and argv and argv[0] in sub.choices:
        sp = sub.choices[argv[0]]
        defaults = read_config(known.config)
        valid = {a.dest for a in sp._actions}
        unknown = set(defaults) - valid
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
        for action in sp._actions:
            if action.dest in defaults:
                # a config value satisfies a required flag
                action.required = False
                if isinstance(action, (argparse._StoreTrueAction, argparse._StoreFalseAction)):
                    defaults[action.dest] = defaults[action.dest].lower() in ("1", "true", "yes")
        sp.set_defaults(**defaults)
    return parser.parse_args(argv)


def main(argv=None):
    try:
        args = parse_args(argv)
    except ConfigError as exc:
        print(f"mnarmc: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"mnarmc: {exc}", file=sys.stderr)
        return EXIT_IO
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    try:
        if getattr(args, "observed", None) is None and getattr(args, "triplets", None) is None \
                and args.command in ("estimate", "estimate-f", "certify"):
            raise ConfigError("one of --observed or --triplets is required")
        return args.func(args)
    except (ConfigError, ValueError) as exc:
        print(f"mnarmc: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"mnarmc: {exc}", file=sys.stderr)
        return EXIT_IO
    except SvdConvergenceError as exc:
        print(f"mnarmc: {exc}", file=sys.stderr)
        return EXIT_NOT_CONVERGED


if __name__ == "__main__":
    sys.exit(main())
