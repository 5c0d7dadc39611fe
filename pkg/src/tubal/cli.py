"""Command-line front end: experiment sweeps and verification suites.

``tubal run`` builds a problem, runs the requested methods, and writes
per-method convergence CSVs plus a summary; ``tubal verify SUITE`` runs one
of the randomized verification batteries.  Exit codes: 0 success, 1
configuration/validation error, 2 suite failure.
"""

from __future__ import annotations

import argparse
import configparser
import sys

from .experiments import ConfigError, ExperimentConfig, MethodSpec, run_experiment
from .verify import SUITES, run_suite


class _Parser(argparse.ArgumentParser):
    # argparse exits with code 2 on usage errors; those are validation errors here
    def error(self, message):
        self.print_usage(sys.stderr)
        raise SystemExit(f"error: {message}") from None


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="tubal", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run an experiment sweep")
    run.add_argument("--config", help="INI config file; flags override its values")
    run.add_argument("--problem", choices=["blur", "baart_prolate"])
    run.add_argument("--n", type=int)
    run.add_argument("--band", type=int)
    run.add_argument("--sigma", type=float)
    run.add_argument("--w", type=float)
    run.add_argument("--solution", choices=["random", "ones"])
    run.add_argument("--seed", type=int)
    run.add_argument("--seeds", type=int, help="number of seeds aggregated in the summary")
    run.add_argument("--methods", help="comma list, e.g. TR:alpha_star,Richardson:mu_one,TSD")
    run.add_argument("--tol", type=float)
    run.add_argument("--maxit", type=int)
    run.add_argument("--guard", type=float, help="divergence guard multiple of delta_0")
    run.add_argument("--out")
    run.add_argument("--plot", action="store_true", default=None)

    ver = sub.add_parser("verify", help="run a verification suite")
    ver.add_argument("suite", help=f"one of {', '.join(sorted(SUITES))}")
    ver.add_argument("--json", action="store_true", help="machine-readable report")
    return parser


_CONFIG_FIELDS = {
    # section, key, type
    ("problem", "family"): ("problem", str),
    ("problem", "n"): ("n", int),
    ("problem", "band"): ("band", int),
    ("problem", "sigma"): ("sigma", float),
    ("problem", "w"): ("w", float),
    ("problem", "solution"): ("solution", str),
    ("problem", "seed"): ("seed", int),
    ("problem", "seeds"): ("seeds", int),
    ("iteration", "tol"): ("tol", float),
    ("iteration", "maxit"): ("maxit", int),
    ("iteration", "guard"): ("divergence_guard", float),
    ("methods", "list"): ("methods", str),
    ("output", "dir"): ("out", str),
    ("output", "plot"): ("plot", bool),
}


def _config_from_file(path) -> dict:
    ini = configparser.ConfigParser()
    if not ini.read(path):
        raise ConfigError(f"config: cannot read {path!r}")
    values: dict = {}
    for (section, key), (field, typ) in _CONFIG_FIELDS.items():
        if ini.has_option(section, key):
            raw = ini.get(section, key)
            try:
                if typ is bool:
                    values[field] = ini.getboolean(section, key)
                else:
                    values[field] = typ(raw)
            except ValueError as exc:
                raise ConfigError(f"config: bad value for [{section}] {key}: {raw!r}") from exc
    return values


def _assemble_config(args) -> ExperimentConfig:
    values = _config_from_file(args.config) if args.config else {}
    overrides = {
        "problem": args.problem,
        "n": args.n,
        "band": args.band,
        "sigma": args.sigma,
        "w": args.w,
        "solution": args.solution,
        "seed": args.seed,
        "seeds": args.seeds,
        "methods": args.methods,
        "tol": args.tol,
        "maxit": args.maxit,
        "divergence_guard": args.guard,
        "out": args.out,
        "plot": args.plot,
    }
    values.update({k: v for k, v in overrides.items() if v is not None})
    if isinstance(values.get("methods"), str):
        specs = [MethodSpec.parse(tok) for tok in values["methods"].split(",") if tok.strip()]
        values["methods"] = specs
    config = ExperimentConfig(**values)
    config.validate()
    return config


def _cmd_run(args) -> int:
    config = _assemble_config(args)
    outcomes = run_experiment(config)
    width = max(len(o.spec.label) for o in outcomes)
    print(f"wrote {len(outcomes)} histories to {config.out}/")
    for o in outcomes:
        err = "-" if o.final_rel_error is None else f"{o.final_rel_error:.4g}"
        print(
            f"  {o.spec.label:<{width}}  iters={o.iterations:<7g} delta={o.final_delta:.4g}  "
            f"rel_err={err}  stop={o.stop_reason}"
        )
    return 0


def _cmd_verify(args) -> int:
    if args.suite not in SUITES:
        print(f"error: unknown suite {args.suite!r}; choose from {', '.join(sorted(SUITES))}",
              file=sys.stderr)
        return 1
    report = run_suite(args.suite)
    if args.json:
        print(report.to_json())
    else:
        for check in report.checks:
            status = "PASS" if check.passed else "FAIL"
            print(f"[{status}] {report.suite}.{check.name}: {check.detail}")
        print(f"suite {report.suite}: {'PASS' if report.passed else 'FAIL'} "
              f"({report.seconds:.1f}s)")
    return 0 if report.passed else 2


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        if isinstance(exc.code, str):
            print(exc.code, file=sys.stderr)
            return 1
        return 0 if exc.code in (0, None) else 1
    try:
        if args.command == "run":
            return _cmd_run(args)
        return _cmd_verify(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
