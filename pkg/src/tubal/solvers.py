"""Stationary and steepest-descent solvers for ``A * X = B`` via the normal equation.

All iterations target ``A^T * A * X = A^T * B`` and come in two forms: a
*tubular* form whose step parameter is a tube (acting independently on each
Fourier slice) and a *global* form with one scalar step.  The global form
is the special case of the tubular one with a scalar-multiple-of-identity
tube, and the two coincide iterate for iterate in that case.

Convergence is tracked through the relative residual of the original
equation, ``delta_k = ||B - A*X_k||_F / ||B||_F``, evaluated in the Fourier
domain (Parseval makes the ratio exact).  Histories record one row per
iterate including ``k = 0``.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .core import Tensor3, Tube, tprod, zeros
from .spectra import t_linear_independent, tubular_spectral_radius
from .tubes import NotHermitianError, SingularTubeError, is_hermitian_tube, tube_inverse

__all__ = [
    "IterOptions",
    "ConvergenceHistory",
    "SolveResult",
    "StepParams",
    "SingularStepError",
    "SpectralRadiusError",
    "SingularProjectionError",
    "normal_extremes",
    "alpha_star",
    "alpha_one",
    "mu_star",
    "mu_one",
    "richardson_tubular",
    "richardson_global",
    "sd_tubular",
    "sd_global",
    "richardson_tubular_update",
    "richardson_global_update",
    "sd_tubular_update",
    "sd_global_update",
    "relax_wrap",
    "project_orthogonal",
    "neumann_inverse",
]

log = logging.getLogger(__name__)


class SingularStepError(RuntimeError):
    """A tubular step denominator had a (numerically) zero Fourier component.

    Carries the offending component, the denominator magnitudes, and the
    partial solve state collected up to the breakdown.
    """

    def __init__(self, message, component=None, magnitudes=None, history=None, X=None):
        super().__init__(message)
        self.component = component
        self.magnitudes = magnitudes
        self.history = history
        self.X = X


class SpectralRadiusError(ValueError):
    """The tubular spectral radius is not strictly below one componentwise."""


class SingularProjectionError(RuntimeError):
    """A Galerkin system in the projection step was singular."""

    def __init__(self, message, slice_index=None):
        super().__init__(message)
        self.slice_index = slice_index


@dataclass
class IterOptions:
    """Iteration controls shared by all solvers.

    ``divergence_guard`` aborts a run once ``delta_k`` exceeds that multiple
    of ``delta_0``.  ``track_error_against`` enables a relative-error column
    against a known solution.
    """

    max_iterations: int = 10_000
    rel_residual_tol: float = 1e-8
    track_error_against: Tensor3 | None = None
    rng_seed: int = 0
    divergence_guard: float = 1e6

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.rel_residual_tol <= 0 or self.divergence_guard <= 0:
            raise ValueError("tolerances must be positive")


@dataclass
class ConvergenceHistory:
    """Per-iterate relative residuals, optional errors, and timings.

    ``deltas[k]`` is the relative residual of iterate ``k`` (``k = 0``
    included); ``seconds[k]`` the wall time spent producing iterate ``k``.
    ``stop_reason`` is one of ``tol``, ``maxit``, ``diverged``,
    ``breakdown``.
    """

    deltas: list[float] = field(default_factory=list)
    rel_errors: list[float] | None = None
    seconds: list[float] = field(default_factory=list)
    stop_reason: str = "maxit"
    fallback_steps: list[int] = field(default_factory=list)

    @property
    def iterations(self) -> int:
        return len(self.deltas) - 1

    @property
    def final_delta(self) -> float:
        return self.deltas[-1]

    @property
    def final_rel_error(self) -> float | None:
        if self.rel_errors is None or not self.rel_errors:
            return None
        return self.rel_errors[-1]

    def to_csv(self, path):
        """Write rows ``k,delta,log10_delta,rel_error,seconds``."""
        import csv

        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["k", "delta", "log10_delta", "rel_error", "seconds"])
            for k, d in enumerate(self.deltas):
                log10 = math.log10(d) if d > 0 else float("-inf")
                err = "" if self.rel_errors is None else repr(self.rel_errors[k])
                writer.writerow([k, repr(d), repr(log10), err, repr(self.seconds[k])])


@dataclass
class SolveResult:
    X: Tensor3
    history: ConvergenceHistory


@dataclass(frozen=True)
class StepParams:
    """A step parameter with provenance: a tube or a scalar.

    ``tag`` is one of ``alpha_star``, ``alpha_one``, ``mu_star``,
    ``mu_one``, ``user``.
    """

    value: Tube | float
    tag: str

    @property
    def is_tubular(self) -> bool:
        return isinstance(self.value, Tube)


# -- step parameters -----------------------------------------------------------


def normal_extremes(A: Tensor3) -> tuple[np.ndarray, np.ndarray]:
    """Per-slice extreme eigenvalues ``(lam_min, lam_max)`` of ``A^T * A``.

    Works directly on the Fourier slices (the normal operator's slices are
    the slice Gram matrices), skipping the spatial round trip; at n = 256
    this saves several full-tensor transforms.
    """
    Af = A.fourier
    N = Af.conj().transpose(0, 2, 1) @ Af
    N = 0.5 * (N + N.conj().transpose(0, 2, 1))
    vals = np.linalg.eigvalsh(N)
    return vals[:, 0].copy(), vals[:, -1].copy()


def _extremes(A, extremes):
    return normal_extremes(A) if extremes is None else extremes


def alpha_star(A: Tensor3, extremes=None) -> Tube:
    """Best-asymptotic-rate tubular step: ``2 ([lam_max] + [lam_min])^-1`` of ``A^T*A``."""
    lo, hi = _extremes(A, extremes)
    return 2.0 * tube_inverse(Tube.from_fourier(hi + lo))


def alpha_one(A: Tensor3, extremes=None) -> Tube:
    """The tube ``[lam_max(A^T*A)]^-1`` (per-slice inverse largest eigenvalue)."""
    _, hi = _extremes(A, extremes)
    return tube_inverse(Tube.from_fourier(hi))


def mu_star(A: Tensor3, extremes=None) -> float:
    """Best scalar step ``2 / (max lam + min lam)`` over all slice eigenvalues of ``A^T*A``."""
    lo, hi = _extremes(A, extremes)
    denom = float(hi.max() + lo.min())
    if denom <= 0:
        raise SingularTubeError("degenerate spectrum: lam_max + lam_min is not positive")
    return 2.0 / denom


def mu_one(A: Tensor3, extremes=None) -> float:
    """The scalar ``1 / max lam`` over all slice eigenvalues of ``A^T*A``."""
    _, hi = _extremes(A, extremes)
    top = float(hi.max())
    if top <= 0:
        raise SingularTubeError("degenerate spectrum: lam_max is not positive")
    return 1.0 / top


# -- iteration driver -----------------------------------------------------------


def _norm(stack) -> float:
    return float(np.linalg.norm(stack))


class _Workspace:
    """Fourier-domain views shared by one solver run."""

    def __init__(self, A: Tensor3, B: Tensor3, X0: Tensor3 | None, opts: IterOptions):
        if A.n != A.m:
            raise ValueError(f"coefficient tensor must be square, got {A.shape}")
        if B.shape != (A.n, 1, A.p):
            raise ValueError(f"right-hand side must be {A.n} x 1 x {A.p}, got {B.shape}")
        if X0 is not None and X0.shape != B.shape:
            raise ValueError(f"initial guess must match {B.shape}, got {X0.shape}")
        self.A = A
        self.Af = A.fourier
        self.ATf = A.fourier_adjoint
        self.Bf = B.fourier
        self.Xf = np.zeros_like(self.Bf) if X0 is None else X0.fourier.copy()
        self.norm_B = _norm(self.Bf) or 1.0
        self.opts = opts
        self.Xstar_f = None
        self.norm_Xstar = None
        if opts.track_error_against is not None:
            self.Xstar_f = opts.track_error_against.fourier
            self.norm_Xstar = _norm(self.Xstar_f) or 1.0

    def residual(self):
        return self.Bf - self.Af @ self.Xf

    def delta(self, Rf) -> float:
        return _norm(Rf) / self.norm_B

    def rel_error(self) -> float | None:
        if self.Xstar_f is None:
            return None
        return _norm(self.Xf - self.Xstar_f) / self.norm_Xstar


def _drive(ws: _Workspace, step) -> SolveResult:
    """Run ``Xf += step(Rf)`` until tolerance, guard, or iteration budget.

    ``step`` receives the current Fourier-domain residual of the original
    equation and returns the Fourier-domain update.
    """
    opts = ws.opts
    hist = ConvergenceHistory(rel_errors=None if ws.Xstar_f is None else [])
    t_prev = time.perf_counter()

    def record(delta):
        now = time.perf_counter()
        hist.deltas.append(delta)
        hist.seconds.append(now - record.t_last)
        record.t_last = now
        if hist.rel_errors is not None:
            hist.rel_errors.append(ws.rel_error())

    record.t_last = t_prev
    Rf = ws.residual()
    delta0 = ws.delta(Rf)
    record(delta0)
    if delta0 <= opts.rel_residual_tol:
        hist.stop_reason = "tol"
        return SolveResult(Tensor3.from_fourier_stack(ws.Xf), hist)

    for _ in range(opts.max_iterations):
        try:
            ws.Xf = ws.Xf + step(Rf)
        except SingularStepError as exc:
            hist.stop_reason = "breakdown"
            exc.history = hist
            exc.X = Tensor3.from_fourier_stack(ws.Xf)
            raise
        Rf = ws.residual()
        d = ws.delta(Rf)
        record(d)
        if d <= opts.rel_residual_tol:
            hist.stop_reason = "tol"
            break
        if d > opts.divergence_guard * max(delta0, 1e-300):
            hist.stop_reason = "diverged"
            break
    else:
        hist.stop_reason = "maxit"
    return SolveResult(Tensor3.from_fourier_stack(ws.Xf), hist)


# -- stationary iterations -------------------------------------------------------


def richardson_tubular(
    A: Tensor3, B: Tensor3, alpha: Tube, X0: Tensor3 | None = None, opts: IterOptions | None = None
) -> SolveResult:
    """Tubular fixed-step iteration ``X <- X + A^T * (B - A*X) * [alpha]``.

    ``alpha`` must be a Hermitian tube.  Converges precisely when the
    iteration tensor ``I - D_[alpha] * A^T * A`` has tubular spectral radius
    componentwise below one.
    """
    if not is_hermitian_tube(alpha):
        raise NotHermitianError("tubular step parameter must be Hermitian")
    if alpha.p != A.p:
        raise ValueError(f"step tube length {alpha.p} does not match p={A.p}")
    opts = opts or IterOptions()
    ws = _Workspace(A, B, X0, opts)
    ahat = alpha.fourier[:, None, None]

    def step(Rf):
        return (ws.ATf @ Rf) * ahat

    return _drive(ws, step)


def richardson_global(
    A: Tensor3, B: Tensor3, mu: float, X0: Tensor3 | None = None, opts: IterOptions | None = None
) -> SolveResult:
    """Scalar fixed-step iteration ``X <- X + mu * A^T * (B - A*X)``.

    Coincides with :func:`richardson_tubular` run with the tube
    ``mu * [e_1]``, iterate for iterate.
    """
    if mu <= 0:
        raise ValueError("mu must be positive")
    opts = opts or IterOptions()
    ws = _Workspace(A, B, X0, opts)

    def step(Rf):
        return mu * (ws.ATf @ Rf)

    return _drive(ws, step)


# -- steepest descent --------------------------------------------------------------


def _tubular_sd_ratio(num: np.ndarray, den: np.ndarray, rtol: float) -> np.ndarray:
    """Componentwise step tube ``num / den`` with the singularity policy.

    The tube ``||A*D||^2`` is inverted under the scale-relative singularity
    rule: a component below ``rtol * max`` is a breakdown.  The one
    exemption is a slice whose direction ``||D||^2`` is itself at the
    converged floor (three orders below the working-precision scale of the
    largest slice): such a slice carries no information left to iterate on
    and its step is zero, which keeps long runs from tripping over slices
    that finished earlier than the rest.
    """
    den_cut = rtol * max(float(den.max()), 1e-300)
    freeze_cut = 1e3 * rtol * max(float(num.max()), 1e-300)
    small = den <= den_cut
    frozen = small & (num <= freeze_cut)
    bad = small & ~frozen
    if bad.any():
        comp = int(np.flatnonzero(bad)[0])
        raise SingularStepError(
            f"steepest-descent step broke down: ||A*D||^2 component {comp} is "
            f"{den[comp]:.3e} (threshold {den_cut:.3e}) against a direction of "
            f"size {num[comp]:.3e}",
            component=comp,
            magnitudes=den.copy(),
        )
    return np.where(frozen, 0.0, num / np.where(small, 1.0, den))


def _tubular_sd_step(ws: _Workspace):
    rtol = ws.Af.shape[0] * np.finfo(np.float64).eps

    def step(Rf):
        Df = ws.ATf @ Rf
        ADf = ws.Af @ Df
        num = np.einsum("pij,pij->p", np.conj(Df), Df).real
        den = np.einsum("pij,pij->p", np.conj(ADf), ADf).real
        return Df * _tubular_sd_ratio(num, den, rtol)[:, None, None]

    return step


def sd_tubular(
    A: Tensor3, B: Tensor3, X0: Tensor3 | None = None, opts: IterOptions | None = None
) -> SolveResult:
    """Steepest descent with a tube-valued exact line search per Fourier slice.

    ``X <- X + D * ||D||^2 * (||A*D||^2)^-1`` with ``D = A^T * (B - A*X)``.
    A Fourier component of ``||A*D||^2`` below the scale-relative threshold
    against a non-negligible direction raises :class:`SingularStepError`
    carrying the partial history: ill-posed slices legitimately break the
    method down, and hiding that behind a pseudo-inverse would be
    misleading.  Components where the direction itself is negligible are
    converged and are left unchanged.
    """
    opts = opts or IterOptions()
    ws = _Workspace(A, B, X0, opts)
    return _drive(ws, _tubular_sd_step(ws))


def sd_global(
    A: Tensor3, B: Tensor3, X0: Tensor3 | None = None, opts: IterOptions | None = None
) -> SolveResult:
    """Steepest descent with the scalar step ``||D||_F^2 / ||A*D||_F^2``."""
    opts = opts or IterOptions()
    ws = _Workspace(A, B, X0, opts)
    state = {"broke": False}

    def step(Rf):
        Df = ws.ATf @ Rf
        ADf = ws.Af @ Df
        den = _norm(ADf) ** 2
        if den == 0.0:
            raise SingularStepError("zero denominator in scalar steepest-descent step")
        return (_norm(Df) ** 2 / den) * Df

    try:
        return _drive(ws, step)
    except SingularStepError as exc:
        # scalar breakdown is a stop condition, not an error: the residual
        # gradient vanished, so the iterate cannnot improve further
        hist = exc.history
        hist.stop_reason = "breakdown"
        return SolveResult(exc.X, hist)


# -- update maps (for the relaxation wrapper and method composition) ---------------


def _update_factory(A: Tensor3, B: Tensor3, raw_step) -> Callable[[Tensor3], Tensor3]:
    Af = A.fourier
    ATf = A.fourier_adjoint
    Bf = B.fourier

    def F(X: Tensor3) -> Tensor3:
        Rf = Bf - Af @ X.fourier
        return Tensor3.from_fourier_stack(raw_step(Rf, Af, ATf))

    return F


def richardson_tubular_update(A: Tensor3, B: Tensor3, alpha: Tube):
    """The map ``X -> A^T * (B - A*X) * [alpha]`` (one tubular Richardson update)."""
    if not is_hermitian_tube(alpha):
        raise NotHermitianError("tubular step parameter must be Hermitian")
    ahat = alpha.fourier[:, None, None]
    return _update_factory(A, B, lambda Rf, Af, ATf: (ATf @ Rf) * ahat)


def richardson_global_update(A: Tensor3, B: Tensor3, mu: float):
    if mu <= 0:
        raise ValueError("mu must be positive")
    return _update_factory(A, B, lambda Rf, Af, ATf: mu * (ATf @ Rf))


def sd_tubular_update(A: Tensor3, B: Tensor3):
    rtol = A.p * np.finfo(np.float64).eps

    def raw(Rf, Af, ATf):
        Df = ATf @ Rf
        ADf = Af @ Df
        num = np.einsum("pij,pij->p", np.conj(Df), Df).real
        den = np.einsum("pij,pij->p", np.conj(ADf), ADf).real
        return Df * _tubular_sd_ratio(num, den, rtol)[:, None, None]

    return _update_factory(A, B, raw)


def sd_global_update(A: Tensor3, B: Tensor3):
    def raw(Rf, Af, ATf):
        Df = ATf @ Rf
        ADf = Af @ Df
        den = _norm(ADf) ** 2
        if den == 0.0:
            raise SingularStepError("zero denominator in scalar steepest-descent step")
        return (_norm(Df) ** 2 / den) * Df

    return _update_factory(A, B, raw)


# -- relaxation wrapper --------------------------------------------------------------


def relax_wrap(
    update: Callable[[Tensor3], Tensor3],
    A: Tensor3,
    B: Tensor3,
    X0: Tensor3 | None = None,
    opts: IterOptions | None = None,
) -> SolveResult:
    """Accelerate a fixed-point iteration ``X <- X + F(X)`` with residual smoothing.

    Two sequences run side by side: the plain iterates
    ``Xbar_{k+1} = Xbar_k + F(Xbar_k)`` and, after two plain warm-up steps,
    the relaxed iterates

        ``X_{k+1} = X_{k-1} + w_k (Xbar_{k+1} - X_{k-1})``,

    with the minimum-residual weight
    ``w_k = <R_{k-1}, R_{k-1} - Rbar_{k+1}> / ||R_{k-1} - Rbar_{k+1}||_F^2``
    (``R`` residuals of the original equation).  Each relaxed residual is
    the smallest on its segment, so it never exceeds the plain iterate's,
    and the relaxed sequence inherits any breakdown of the plain one.  A
    vanishing weight denominator falls back to the plain iterate and is
    recorded in ``history.fallback_steps``.
    """
    opts = opts or IterOptions()
    if B.shape != (A.n, 1, A.p):
        raise ValueError(f"right-hand side must be {A.n} x 1 x {A.p}, got {B.shape}")
    from .core import frob_norm as _fn

    start = zeros(*B.shape) if X0 is None else X0
    norm_B = _fn(B) or 1.0
    Xstar = opts.track_error_against
    norm_star = _fn(Xstar) if Xstar is not None else None

    hist = ConvergenceHistory(rel_errors=None if Xstar is None else [])
    t_last = time.perf_counter()

    def record(delta, X):
        nonlocal t_last
        now = time.perf_counter()
        hist.deltas.append(delta)
        hist.seconds.append(now - t_last)
        t_last = now
        if hist.rel_errors is not None:
            hist.rel_errors.append(_fn(X - Xstar) / (norm_star or 1.0))

    def resid(X):
        return B - tprod(A, X)

    delta0 = _fn(resid(start)) / norm_B
    record(delta0, start)
    if delta0 <= opts.rel_residual_tol:
        hist.stop_reason = "tol"
        return SolveResult(start, hist)

    Xbar = start  # plain sequence head
    X_prev = X_cur = start  # relaxed sequence, trailing pair
    R_prev = R_cur = resid(start)
    finished = False
    for k in range(opts.max_iterations):
        try:
            Xbar = Xbar + update(Xbar)
        except SingularStepError as exc:
            hist.stop_reason = "breakdown"
            exc.history = hist
            exc.X = X_cur
            raise
        if k < 2:
            X_next = Xbar
            R_next = resid(X_next)
        else:
            Rbar = resid(Xbar)
            diff = R_prev - Rbar
            den = _fn(diff) ** 2
            if den == 0.0:
                log.debug("relaxation fallback at iteration %d (stationary residuals)", k + 1)
                hist.fallback_steps.append(k + 1)
                X_next, R_next = Xbar, Rbar
            else:
                w = frob_inner_real(R_prev, diff) / den
                X_next = X_prev + w * (Xbar - X_prev)
                R_next = resid(X_next)
        X_prev, R_prev = X_cur, R_cur
        X_cur, R_cur = X_next, R_next
        d = _fn(R_cur) / norm_B
        record(d, X_cur)
        if d <= opts.rel_residual_tol:
            hist.stop_reason = "tol"
            finished = True
            break
        if d > opts.divergence_guard * max(delta0, 1e-300):
            hist.stop_reason = "diverged"
            finished = True
            break
    if not finished:
        hist.stop_reason = "maxit"
    return SolveResult(X_cur, hist)


def frob_inner_real(A: Tensor3, B: Tensor3) -> float:
    """Real part of the scalar Frobenius inner product."""
    return float(np.vdot(A.data, B.data).real)


# -- orthogonal projection step -------------------------------------------------------


def project_orthogonal(
    A: Tensor3,
    B: Tensor3,
    X_old: Tensor3,
    V: Sequence[Tensor3],
    mode: str = "tubular",
) -> Tensor3:
    """One Galerkin update of the normal equation over the span of ``V``.

    In ``tubular`` mode the coefficients are tubes determined by making the
    new normal-equation residual tube-orthogonal to every basis tensor; in
    ``global`` mode they are scalars determined by Frobenius orthogonality.
    The tubular update is at least as accurate in the energy norm whenever
    both are fed the same basis.
    """
    V = list(V)
    if mode not in ("tubular", "global"):
        raise ValueError(f"unknown mode {mode!r}")
    if not V:
        raise ValueError("basis must be nonempty")
    m = len(V)
    p, n = A.p, A.n
    if mode == "tubular":
        ok, bad = t_linear_independent(V)
        if not ok:
            raise SingularProjectionError(
                f"basis is T-linearly dependent in Fourier slice {bad}", slice_index=bad
            )
    else:
        from .core import unfold

        M = np.concatenate([unfold(Vq) for Vq in V], axis=1)  # (n*p, m)
        s = np.linalg.svd(M, compute_uv=False)
        if s[0] == 0.0 or s[-1] <= m * np.finfo(np.float64).eps * s[0]:
            raise SingularProjectionError("unfolded basis is linearly dependent")

    Af = A.fourier
    ATf = A.fourier_adjoint
    Nf = ATf @ Af
    rf = ATf @ (B.fourier - Af @ X_old.fourier)  # normal-equation residual, (p, n, 1)
    W = np.concatenate([Vq.fourier for Vq in V], axis=2)  # (p, n, m)
    G = W.conj().transpose(0, 2, 1) @ (Nf @ W)  # (p, m, m)
    rhs = W.conj().transpose(0, 2, 1) @ rf  # (p, m, 1)

    if mode == "tubular":
        # same scale-relative singularity doctrine as tube inversion: a slice
        # whose Galerkin system is negligible against the largest slice is
        # undetermined at working precision, not quietly invertible noise
        sv = np.linalg.svd(G, compute_uv=False)  # (p, m)
        cutoff = m * np.finfo(np.float64).eps * max(float(sv.max()), 1e-300)
        bad = np.flatnonzero(sv[:, -1] <= cutoff)
        if bad.size:
            j = int(bad[0])
            raise SingularProjectionError(
                f"singular Galerkin system in Fourier slice {j} "
                f"(smallest singular value {sv[j, -1]:.3e}, threshold {cutoff:.3e})",
                slice_index=j,
            )
        coeffs = np.empty((p, m, 1), dtype=np.complex128)
        for j in range(p):
            try:
                coeffs[j] = np.linalg.solve(G[j], rhs[j])
            except np.linalg.LinAlgError as exc:
                raise SingularProjectionError(
                    f"singular Galerkin system in Fourier slice {j}", slice_index=j
                ) from exc
        return Tensor3.from_fourier_stack(X_old.fourier + W @ coeffs)

    G_total = G.sum(axis=0)
    rhs_total = rhs.sum(axis=0)
    sv = np.linalg.svd(G_total, compute_uv=False)
    if sv[0] == 0.0 or sv[-1] <= m * np.finfo(np.float64).eps * sv[0]:
        raise SingularProjectionError("singular global Galerkin system")
    try:
        mu = np.linalg.solve(G_total, rhs_total)
    except np.linalg.LinAlgError as exc:
        raise SingularProjectionError("singular global Galerkin system") from exc
    return Tensor3.from_fourier_stack(X_old.fourier + W @ mu[None, :, :])


# -- truncated Neumann series -----------------------------------------------------------


def neumann_inverse(A: Tensor3, terms: int) -> Tensor3:
    """Partial sum ``I + A + ... + A^terms`` approximating ``(I - A)^-1``.

    Requires the tubular spectral radius of ``A`` to be componentwise below
    one (:class:`SpectralRadiusError` otherwise); the truncation error then
    decays geometrically in ``terms``.
    """
    if A.n != A.m:
        raise ValueError("Neumann series needs a square tensor")
    if terms < 0:
        raise ValueError("terms must be >= 0")
    rho = tubular_spectral_radius(A)
    comps = np.abs(rho.fourier.real)
    if comps.max() >= 1.0:
        raise SpectralRadiusError(
            f"tubular spectral radius has components up to {comps.max():.6f} >= 1"
        )
    p, n = A.p, A.n
    eye = np.zeros((p, n, n), dtype=np.complex128)
    eye[:, np.arange(n), np.arange(n)] = 1.0
    S = eye.copy()
    Af = A.fourier
    for _ in range(terms):
        S = eye + Af @ S
    return Tensor3.from_fourier_stack(S)
