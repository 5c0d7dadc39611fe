"""Tube calculus: circulant form, inverses, functions, roots, and the partial order.

Every operation here acts componentwise on a tube's Fourier components
``d_1 .. d_p`` (the eigenvalues of its circulant matrix).  A tube is
Hermitian iff all components are real, positive definite iff they are
real and positive, and singular iff some component vanishes relative to
the largest one.
"""

from __future__ import annotations

import enum
from typing import Callable

import numpy as np

from .core import Tensor3, Tube

__all__ = [
    "SingularTubeError",
    "NotHermitianError",
    "NotHPDError",
    "TubeDomainError",
    "TubeOrder",
    "circ_matrix",
    "singularity_threshold",
    "is_singular",
    "tube_inverse",
    "tube_apply",
    "tube_sqrt",
    "is_hermitian_tube",
    "is_hpd_tube",
    "hpd_components",
    "order_cmp",
    "dtensor",
]

# Hermitian detection: |Im d_i| <= HERMITIAN_RTOL * (1 + max|d_i|).
HERMITIAN_RTOL = 1e-10


class SingularTubeError(ValueError):
    """A tube with (numerically) zero Fourier components where an inverse is needed."""

    def __init__(self, message: str, indices=None, magnitudes=None):
        super().__init__(message)
        self.indices = [] if indices is None else list(indices)
        self.magnitudes = [] if magnitudes is None else list(magnitudes)


class NotHermitianError(ValueError):
    pass


class NotHPDError(ValueError):
    pass


class TubeDomainError(ValueError):
    """A scalar function was undefined at some Fourier component."""


class TubeOrder(enum.Enum):
    """Outcome of comparing two Hermitian tubes in the componentwise order."""

    PRECEDES = "a<=b"
    FOLLOWS = "b<=a"
    EQUAL = "equal"
    INCOMPARABLE = "incomparable"


def circ_matrix(a: Tube) -> np.ndarray:
    """Dense ``p x p`` circulant with first column ``(v_1 .. v_p)``.

    Each subsequent column is a downward cyclic shift of the previous one.
    """
    p = a.p
    idx = (np.arange(p)[:, None] - np.arange(p)[None, :]) % p
    return a.v[idx]


def singularity_threshold(a: Tube, rtol: float | None = None) -> float:
    """Absolute cutoff under which a Fourier component counts as zero.

    Defaults to ``p * eps * max|d_i|``, i.e. scale-relative.
    """
    mags = np.abs(a.fourier)
    if rtol is None:
        rtol = a.p * np.finfo(np.float64).eps
    return rtol * float(mags.max(initial=0.0))


def is_singular(a: Tube, rtol: float | None = None) -> bool:
    mags = np.abs(a.fourier)
    return bool(mags.min() <= singularity_threshold(a, rtol))


def tube_inverse(a: Tube, rtol: float | None = None) -> Tube:
    """Multiplicative inverse: componentwise reciprocal of the Fourier components.

    Raises :class:`SingularTubeError` naming the offending components when
    some ``|d_i|`` falls below the scale-relative threshold.
    """
    d = a.fourier
    cutoff = singularity_threshold(a, rtol)
    bad = np.flatnonzero(np.abs(d) <= cutoff)
    if bad.size:
        mags = np.abs(d[bad])
        raise SingularTubeError(
            f"tube is singular: components {bad.tolist()} have magnitudes "
            f"{mags.tolist()} (threshold {cutoff:.3e})",
            indices=bad,
            magnitudes=mags,
        )
    return Tube.from_fourier(1.0 / d)


def tube_apply(a: Tube, f: Callable) -> Tube:
    """The tube with Fourier components ``f(d_i)``.

    ``f`` must be defined (finite) at every component; otherwise a
    :class:`TubeDomainError` is raised.
    """
    d = a.fourier
    try:
        vals = np.asarray([f(di) for di in d], dtype=np.complex128)
    except (ValueError, ZeroDivisionError, FloatingPointError) as exc:
        raise TubeDomainError(f"function undefined on tube spectrum: {exc}") from exc
    if not np.all(np.isfinite(vals)):
        bad = np.flatnonzero(~np.isfinite(vals))
        raise TubeDomainError(f"function returned non-finite values at components {bad.tolist()}")
    return Tube.from_fourier(vals)


def is_hermitian_tube(a: Tube, rtol: float = HERMITIAN_RTOL) -> bool:
    """True iff all Fourier components are real to within the detection tolerance."""
    d = a.fourier
    scale = 1.0 + float(np.abs(d).max(initial=0.0))
    return bool(np.abs(d.imag).max(initial=0.0) <= rtol * scale)


def hpd_components(a: Tube) -> np.ndarray:
    """Real parts of the Fourier components (the data behind :func:`is_hpd_tube`)."""
    return a.fourier.real.copy()


def is_hpd_tube(a: Tube, tol: float | None = None, full: bool = False):
    """Whether ``a`` is Hermitian positive definite.

    True iff every Fourier component is real (``|Im d_i| <= tol``) and
    exceeds ``tol``.  With ``full=True`` also returns the component vector
    for reporting.
    """
    d = a.fourier
    if tol is None:
        tol = HERMITIAN_RTOL * (1.0 + float(np.abs(d).max(initial=0.0)))
    ok = bool(np.abs(d.imag).max(initial=0.0) <= tol and np.all(d.real > tol))
    if full:
        return ok, d.copy()
    return ok


def tube_sqrt(a: Tube, tol: float | None = None) -> Tube:
    """Principal square root of a Hermitian positive definite tube.

    Componentwise positive branch ``sqrt(d_i)``; the result is itself
    Hermitian positive definite and squares back to ``a``.  Raises
    :class:`NotHPDError` otherwise.
    """
    if not is_hpd_tube(a, tol):
        raise NotHPDError("tube square root requires a Hermitian positive definite tube")
    return Tube.from_fourier(np.sqrt(a.fourier.real))


def order_cmp(a: Tube, b: Tube, tol: float = 1e-12) -> TubeOrder:
    """Compare Hermitian tubes componentwise in the Fourier domain.

    Returns EQUAL when all component differences are within ``tol`` of the
    common scale, PRECEDES/FOLLOWS for one-sided differences, and
    INCOMPARABLE when the differences change sign (the order is partial).
    Raises :class:`NotHermitianError` for non-Hermitian operands.
    """
    if not (is_hermitian_tube(a) and is_hermitian_tube(b)):
        raise NotHermitianError("tube order is defined for Hermitian tubes only")
    da, db = a.fourier.real, b.fourier.real
    scale = max(np.abs(da).max(initial=0.0), np.abs(db).max(initial=0.0), 1.0)
    diff = db - da
    above = bool(np.any(diff > tol * scale))
    below = bool(np.any(diff < -tol * scale))
    if above and below:
        return TubeOrder.INCOMPARABLE
    if above:
        return TubeOrder.PRECEDES
    if below:
        return TubeOrder.FOLLOWS
    return TubeOrder.EQUAL


def dtensor(a: Tube, n: int) -> Tensor3:
    """The ``n x n x p`` tensor whose diagonal tubes all equal ``a``.

    Multiplying an ``n x 1 x p`` tensor by it on the left equals
    multiplying by the tube ``a`` on the right.
    """
    data = np.zeros((n, n, a.p), dtype=np.complex128)
    data[np.arange(n), np.arange(n), :] = a.v
    return Tensor3(data)
