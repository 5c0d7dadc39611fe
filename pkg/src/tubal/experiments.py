"""Experiment sweeps: build a problem, run a roster of methods, emit CSVs.

A sweep shares one coefficient tensor, one right-hand side, and the zero
initial guess across all methods, so histories are directly comparable.
Step parameters derive from a single eigenvalue pass over ``A^T * A``.
"""

from __future__ import annotations

import json
import statistics
import time
from dataclasses import dataclass, field
from pathlib import Path

from . import problems, solvers
from .core import Tensor3, Tube
from .solvers import ConvergenceHistory, IterOptions, SingularStepError, StepParams

__all__ = ["ExperimentConfig", "MethodSpec", "MethodOutcome", "run_experiment", "ConfigError"]

METHOD_NAMES = ("TR", "Richardson", "TSD", "SD", "TRR", "TSDR")
TUBULAR_STEP_TAGS = ("alpha_star", "alpha_one")
SCALAR_STEP_TAGS = ("mu_star", "mu_one")


class ConfigError(ValueError):
    """Invalid experiment configuration (named field in the message)."""


@dataclass(frozen=True)
class MethodSpec:
    """One roster entry: method name plus step-parameter choice.

    Text form ``NAME[:TAG[=VALUE]]``, e.g. ``TR:alpha_star``,
    ``Richardson:mu_one``, ``TR:user=0.25``, ``TSD``.
    """

    name: str
    step_tag: str = ""
    user_value: float | None = None

    @classmethod
    def parse(cls, text: str) -> "MethodSpec":
        text = text.strip()
        name, _, rest = text.partition(":")
        if name not in METHOD_NAMES:
            raise ConfigError(f"methods: unknown method {name!r} (choose from {METHOD_NAMES})")
        if name in ("TSD", "TSDR", "SD"):
            if rest:
                raise ConfigError(f"methods: {name} takes no step parameter, got {rest!r}")
            return cls(name)
        tag, _, value = rest.partition("=")
        tag = tag or ("mu_star" if name == "Richardson" else "alpha_star")
        if tag == "user":
            if not value:
                raise ConfigError(f"methods: {name}:user needs a value, e.g. {name}:user=0.25")
            try:
                return cls(name, "user", float(value))
            except ValueError as exc:
                raise ConfigError(f"methods: bad user value {value!r}") from exc
        allowed = SCALAR_STEP_TAGS if name == "Richardson" else TUBULAR_STEP_TAGS
        if tag not in allowed:
            raise ConfigError(f"methods: {name} accepts step tags {allowed} or user=VALUE, got {tag!r}")
        return cls(name, tag)

    @property
    def label(self) -> str:
        if not self.step_tag:
            return self.name
        if self.step_tag == "user":
            return f"{self.name}:user={self.user_value}"
        return f"{self.name}:{self.step_tag}"

    @property
    def file_tag(self) -> str:
        return self.label.replace(":", "_").replace("=", "_").replace(".", "p")


@dataclass
class ExperimentConfig:
    problem: str = "blur"
    n: int = 64
    band: int = 7
    sigma: float = 4.0
    w: float = 0.46
    solution: str = "random"
    seed: int = 0
    seeds: int = 1
    methods: list[MethodSpec] = field(default_factory=lambda: [MethodSpec.parse("TR:alpha_star")])
    tol: float = 1e-8
    maxit: int = 500
    divergence_guard: float = 1e6
    out: str = "experiment-out"
    plot: bool = False

    def validate(self):
        if self.problem not in ("blur", "baart_prolate"):
            raise ConfigError(f"problem: unknown family {self.problem!r}")
        if self.n < 4:
            raise ConfigError("n: must be >= 4")
        if not self.methods:
            raise ConfigError("methods: at least one method is required")
        if self.tol <= 0:
            raise ConfigError("tol: must be positive")
        if self.maxit < 1:
            raise ConfigError("maxit: must be >= 1")
        if self.seeds < 1:
            raise ConfigError("seeds: must be >= 1")
        if self.solution not in ("random", "ones"):
            raise ConfigError(f"solution: unknown kind {self.solution!r}")
        if self.problem == "blur" and self.solution != "random":
            raise ConfigError("solution: the blur family uses a random solution")


@dataclass
class MethodOutcome:
    spec: MethodSpec
    history: ConvergenceHistory  # first seed's history
    iterations: float  # median across seeds
    final_delta: float
    final_rel_error: float | None
    seconds: float
    stop_reason: str


def _build_problem(config: ExperimentConfig) -> problems.ProblemInstance:
    if config.problem == "blur":
        return problems.blur_problem(config.n, config.band, config.sigma, config.seed)
    return problems.baart_prolate_problem(config.n, config.w, config.seed, config.solution)


def _step_value(spec: MethodSpec, A: Tensor3, extremes) -> StepParams | None:
    if spec.name in ("TSD", "TSDR", "SD"):
        return None
    if spec.step_tag == "user":
        if spec.name == "Richardson":
            return StepParams(float(spec.user_value), "user")
        return StepParams(float(spec.user_value) * Tube.e1(A.p), "user")
    maker = {
        "alpha_star": solvers.alpha_star,
        "alpha_one": solvers.alpha_one,
        "mu_star": solvers.mu_star,
        "mu_one": solvers.mu_one,
    }[spec.step_tag]
    return StepParams(maker(A, extremes), spec.step_tag)


def _run_method(spec, A, B, opts, step: StepParams | None):
    """One solver run; breakdowns are reported, not raised."""
    try:
        if spec.name == "TR":
            return solvers.richardson_tubular(A, B, step.value, opts=opts)
        if spec.name == "Richardson":
            return solvers.richardson_global(A, B, step.value, opts=opts)
        if spec.name == "TSD":
            return solvers.sd_tubular(A, B, opts=opts)
        if spec.name == "SD":
            return solvers.sd_global(A, B, opts=opts)
        if spec.name == "TRR":
            update = solvers.richardson_tubular_update(A, B, step.value)
            return solvers.relax_wrap(update, A, B, opts=opts)
        if spec.name == "TSDR":
            update = solvers.sd_tubular_update(A, B)
            return solvers.relax_wrap(update, A, B, opts=opts)
    except SingularStepError as exc:
        return solvers.SolveResult(exc.X, exc.history)
    raise ConfigError(f"methods: unhandled method {spec.name!r}")


def run_experiment(config: ExperimentConfig) -> list[MethodOutcome]:
    """Run the configured sweep and write per-method CSVs plus a summary.

    Produces ``<out>/<method>.csv`` histories for the primary seed, a
    ``summary.csv`` with (median) per-method results across seeds, and
    ``metadata.json`` recording the full configuration and seed list.
    """
    config.validate()
    outdir = Path(config.out)
    outdir.mkdir(parents=True, exist_ok=True)

    instance = _build_problem(config)
    A = instance.A
    needs_step = any(m.name in ("TR", "Richardson", "TRR") for m in config.methods)
    extremes = solvers.normal_extremes(A) if needs_step else None

    seed_list = [config.seed + i for i in range(config.seeds)]
    outcomes: list[MethodOutcome] = []
    for spec in config.methods:
        step = _step_value(spec, A, extremes)
        per_seed = []
        first_history = None
        for s in seed_list:
            if s == config.seed:
                inst = instance
            elif config.solution == "ones":
                inst = instance  # the all-ones solution does not depend on the seed
            else:
                X_star = problems.random_solution(config.n, config.n, s)
                inst = problems.ProblemInstance(A, X_star, problems.make_rhs(A, X_star), instance.descriptor)
            opts = IterOptions(
                max_iterations=config.maxit,
                rel_residual_tol=config.tol,
                track_error_against=inst.X_star,
                divergence_guard=config.divergence_guard,
                rng_seed=s,
            )
            t0 = time.perf_counter()
            result = _run_method(spec, A, inst.B, opts, step)
            elapsed = time.perf_counter() - t0
            per_seed.append((result.history, elapsed))
            if first_history is None:
                first_history = result.history
        hists = [h for h, _ in per_seed]
        outcome = MethodOutcome(
            spec=spec,
            history=first_history,
            iterations=statistics.median(h.iterations for h in hists),
            final_delta=statistics.median(h.final_delta for h in hists),
            final_rel_error=(
                None
                if first_history.rel_errors is None
                else statistics.median(h.final_rel_error for h in hists)
            ),
            seconds=statistics.median(t for _, t in per_seed),
            stop_reason=(
                hists[0].stop_reason
                if len({h.stop_reason for h in hists}) == 1
                else "mixed"
            ),
        )
        outcomes.append(outcome)
        first_history.to_csv(outdir / f"{spec.file_tag}.csv")

    _write_summary(outdir, outcomes)
    _write_metadata(outdir, config, seed_list)
    if config.plot:
        _plot(outdir, outcomes)
    return outcomes


def _write_summary(outdir: Path, outcomes):
    import csv

    with open(outdir / "summary.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["method", "step_param", "iters", "final_delta", "final_rel_error", "seconds", "stop_reason"]
        )
        for o in outcomes:
            writer.writerow(
                [
                    o.spec.name,
                    o.spec.step_tag or "-",
                    repr(o.iterations),
                    repr(o.final_delta),
                    "" if o.final_rel_error is None else repr(o.final_rel_error),
                    f"{o.seconds:.6f}",
                    o.stop_reason,
                ]
            )


def _write_metadata(outdir: Path, config: ExperimentConfig, seed_list):
    meta = {
        "problem": config.problem,
        "n": config.n,
        "band": config.band,
        "sigma": config.sigma,
        "w": config.w,
        "solution": config.solution,
        "seeds": seed_list,
        "tol": config.tol,
        "maxit": config.maxit,
        "divergence_guard": config.divergence_guard,
        "methods": [m.label for m in config.methods],
    }
    with open(outdir / "metadata.json", "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)


def _plot(outdir: Path, outcomes):
    import math

    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(7.5, 5))
    for o in outcomes:
        ys = [math.log10(d) if d > 0 else float("nan") for d in o.history.deltas]
        ax.plot(range(len(ys)), ys, label=o.spec.label)
    ax.set_xlabel("k")
    ax.set_ylabel("log10 relative residual")
    ax.legend()
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(outdir / "convergence.png", dpi=120)
    plt.close(fig)
