"""Eigenvalue machinery for square third-order tensors under the t-product.

A square tensor's block-circulant matrix is similar to the block diagonal
of its Fourier slices, so its scalar eigenvalues (T-eigenvalues) are the
union of the per-slice spectra, and a tube eigenvalue is assembled by
picking one eigenvalue per Fourier slice and synthesizing the tube whose
components they are.  Hermitian tensors admit a full unitary
diagonalization with componentwise-ordered tube eigenvalues, which powers
Weyl-type bounds, Rayleigh-quotient sandwiches, product bounds, and a
Kantorovich inequality, all evaluated componentwise in the Fourier domain.
"""

from __future__ import annotations

import csv
import itertools
import warnings
from dataclasses import dataclass, field

import numpy as np

from .core import Tensor3, Tube, frob_norm, tprod, ttranspose
from .tubes import NotHermitianError, NotHPDError, SingularTubeError

__all__ = [
    "SliceSpectrum",
    "TubularEigenPair",
    "HermitianDecomposition",
    "is_hermitian_tensor",
    "slice_spectra",
    "t_eigenvalues",
    "eig_from_selection",
    "aligned_eigenpairs",
    "enumerate_eigenpairs",
    "hermitian_ordered_spectrum",
    "tubular_spectral_radius",
    "scalar_t_spectral_radius",
    "tube_to_eigentuple",
    "eigentuple_to_tube",
    "eigentensor_to_eigenmatrix",
    "eigenmatrix_to_eigentensor",
    "t_linear_independent",
    "is_positive_definite",
    "weyl_slack",
    "product_bound_slacks",
    "rayleigh_slack",
    "kantorovich_slack",
    "inequality_report",
    "spectrum_to_csv",
    "eigenpairs_to_csv",
]

HERMITIAN_TENSOR_RTOL = 1e-10
DEFECTIVE_COND_LIMIT = 1e12
ENUMERATION_LIMIT = 4096


def is_hermitian_tensor(A: Tensor3, rtol: float = HERMITIAN_TENSOR_RTOL) -> bool:
    """True iff ``||A - A^H||_F <= rtol * ||A||_F`` (zero tensors count as Hermitian)."""
    if A.n != A.m:
        return False
    nrm = frob_norm(A)
    return frob_norm(A - ttranspose(A)) <= rtol * max(nrm, 1e-300)


@dataclass
class SliceSpectrum:
    """Eigendecomposition of every Fourier slice of a square tensor.

    ``values[j]`` are the eigenvalues of slice ``j`` and ``vectors[j]`` the
    matching unit eigenvectors (as columns).  Hermitian input uses the
    Hermitian solver and real ascending eigenvalues; otherwise eigenvalues
    are sorted lexicographically by (real, imag) so that "aligned"
    selections are deterministic.
    """

    values: np.ndarray  # (p, n) complex (real for Hermitian input)
    vectors: np.ndarray  # (p, n, n)
    hermitian: bool
    vector_conds: np.ndarray | None = None  # (p,) condition numbers, general path only

    @property
    def p(self) -> int:
        return self.values.shape[0]

    @property
    def n(self) -> int:
        return self.values.shape[1]


def slice_spectra(A: Tensor3, hermitian: bool | None = None) -> SliceSpectrum:
    """Dense eigendecomposition of every Fourier slice.

    ``hermitian=None`` auto-detects.  Raises ``numpy.linalg.LinAlgError``
    annotated with the slice index if a slice fails to decompose.
    """
    if A.n != A.m:
        raise ValueError(f"slice spectra need square frontal slices, got {A.shape}")
    if hermitian is None:
        hermitian = is_hermitian_tensor(A)
    F = A.fourier
    if hermitian:
        # roundoff can leave the slices slightly non-Hermitian; symmetrize
        Fh = 0.5 * (F + F.conj().transpose(0, 2, 1))
        values, vectors = np.linalg.eigh(Fh)
        return SliceSpectrum(values.astype(np.complex128), vectors, True)
    try:
        values, vectors = np.linalg.eig(F)
    except np.linalg.LinAlgError as exc:
        # retry slice by slice to name the offender
        for j in range(F.shape[0]):
            try:
                np.linalg.eig(F[j])
            except np.linalg.LinAlgError:
                raise np.linalg.LinAlgError(
                    f"eigendecomposition failed on Fourier slice {j}"
                ) from exc
        raise
    # canonical per-slice sort: lexicographic by (real, imag)
    for j in range(values.shape[0]):
        order = np.lexsort((values[j].imag, values[j].real))
        values[j] = values[j][order]
        vectors[j] = vectors[j][:, order]
    conds = np.array([np.linalg.cond(vectors[j]) for j in range(vectors.shape[0])])
    return SliceSpectrum(values, vectors, False, vector_conds=conds)


def t_eigenvalues(A: Tensor3, spectrum: SliceSpectrum | None = None) -> np.ndarray:
    """All ``n*p`` scalar (T-)eigenvalues: the spectrum of ``bcirc(A)``."""
    spec = spectrum if spectrum is not None else slice_spectra(A)
    return spec.values.reshape(-1).copy()


@dataclass
class TubularEigenPair:
    """A tube eigenvalue with its eigentensor and per-slice provenance.

    ``selection[j]`` records which slice-``j`` eigenvalue (in the canonical
    order) was used.  The eigentensor's Fourier-slice vectors are unit
    eigenvectors, so its Gram tube is nonsingular by construction.
    """

    lam: Tube
    X: Tensor3
    selection: tuple[int, ...]
    residual: float = field(default=float("nan"))

    def residual_bound(self, A: Tensor3) -> float:
        """Scale for the defining residual ``||A*X - X*[lam]||_F``."""
        return frob_norm(A) * frob_norm(self.X)


def _pair_from_spectrum(spec: SliceSpectrum, selection) -> tuple[Tube, Tensor3]:
    sel = np.asarray(selection, dtype=int)
    if sel.shape != (spec.p,):
        raise ValueError(f"selection must have one index per slice ({spec.p}), got {sel.shape}")
    if np.any(sel < 0) or np.any(sel >= spec.n):
        raise IndexError(f"selection indices must lie in [0, {spec.n})")
    comps = spec.values[np.arange(spec.p), sel]
    lam = Tube.from_fourier(comps)
    vecs = spec.vectors[np.arange(spec.p), :, sel]  # (p, n)
    X = Tensor3.from_fourier_stack(vecs[:, :, None])
    return lam, X


def eig_from_selection(
    A: Tensor3, selection, spectrum: SliceSpectrum | None = None
) -> TubularEigenPair:
    """Assemble the tube eigenvalue for one eigenvalue index per Fourier slice.

    The tube's Fourier components are the selected slice eigenvalues; the
    eigentensor stacks the matching unit eigenvectors.  Slices whose
    eigenvector matrix is ill conditioned (beyond 1e12) are reported with a
    warning rather than an error, since the defining residual may then be
    inflated.
    """
    spec = spectrum if spectrum is not None else slice_spectra(A)
    lam, X = _pair_from_spectrum(spec, selection)
    res = frob_norm(tprod(A, X) - tprod(X, lam.as_tensor()))
    if spec.vector_conds is not None:
        bad = np.flatnonzero(spec.vector_conds > DEFECTIVE_COND_LIMIT)
        if bad.size:
            warnings.warn(
                f"Fourier slices {bad.tolist()} look defective "
                f"(eigenvector condition > {DEFECTIVE_COND_LIMIT:.0e}); "
                f"defining residual is {res:.3e}",
                RuntimeWarning,
                stacklevel=2,
            )
    return TubularEigenPair(lam, X, tuple(int(s) for s in np.asarray(selection)), res)


def aligned_eigenpairs(A: Tensor3, spectrum: SliceSpectrum | None = None) -> list[TubularEigenPair]:
    """The ``n`` tube eigenvalues from rank-aligned selections ``(i, ..., i)``."""
    spec = spectrum if spectrum is not None else slice_spectra(A)
    return [eig_from_selection(A, (i,) * spec.p, spec) for i in range(spec.n)]


def enumerate_eigenpairs(A: Tensor3, spectrum: SliceSpectrum | None = None):
    """Iterate over all ``n^p`` tube eigenvalues (only for ``n^p <= 4096``)."""
    spec = spectrum if spectrum is not None else slice_spectra(A)
    total = spec.n**spec.p
    if total > ENUMERATION_LIMIT:
        raise ValueError(
            f"n^p = {total} exceeds the enumeration limit {ENUMERATION_LIMIT}; "
            "use aligned or explicit selections instead"
        )
    for sel in itertools.product(range(spec.n), repeat=spec.p):
        yield eig_from_selection(A, sel, spec)


@dataclass
class HermitianDecomposition:
    """Unitary diagonalization ``A = Q^H * D * Q`` of a Hermitian tensor.

    ``pairs`` holds the ``n`` aligned tube eigenvalues in componentwise
    nondecreasing order; ``pairs[0]`` and ``pairs[-1]`` are the extreme
    tubes.  ``D`` is F-diagonal with ``D[i, i, :]`` the ``i``-th ordered
    tube.
    """

    pairs: list[TubularEigenPair]
    Q: Tensor3
    D: Tensor3

    @property
    def lam_min(self) -> Tube:
        return self.pairs[0].lam

    @property
    def lam_max(self) -> Tube:
        return self.pairs[-1].lam


def hermitian_ordered_spectrum(
    A: Tensor3, rtol: float = HERMITIAN_TENSOR_RTOL
) -> HermitianDecomposition:
    """Ordered tube eigenvalues and the unitary factor of a Hermitian tensor."""
    if not is_hermitian_tensor(A, rtol):
        raise NotHermitianError("ordered spectrum requires a Hermitian tensor")
    spec = slice_spectra(A, hermitian=True)
    pairs = aligned_eigenpairs(A, spec)
    n, p = spec.n, spec.p
    # per slice: F_j = V_j diag(w_j) V_j^H, so Q_j = V_j^H
    Q = Tensor3.from_fourier_stack(spec.vectors.conj().transpose(0, 2, 1))
    Dstack = np.zeros((p, n, n), dtype=np.complex128)
    Dstack[:, np.arange(n), np.arange(n)] = spec.values
    D = Tensor3.from_fourier_stack(Dstack)
    return HermitianDecomposition(pairs, Q, D)


def tubular_spectral_radius(A: Tensor3, spectrum: SliceSpectrum | None = None) -> Tube:
    """The Hermitian PSD tube whose component ``j`` is the spectral radius of slice ``j``.

    Every component is strictly below one exactly when powers of ``A``
    vanish, i.e. when the spectral radius of ``bcirc(A)`` is below one.
    """
    spec = spectrum if spectrum is not None else slice_spectra(A)
    return Tube.from_fourier(np.abs(spec.values).max(axis=1))


def scalar_t_spectral_radius(A: Tensor3, spectrum: SliceSpectrum | None = None) -> float:
    """Spectral radius of ``bcirc(A)``: the largest tube-radius component."""
    spec = spectrum if spectrum is not None else slice_spectra(A)
    return float(np.abs(spec.values).max())


def _reverse_tail(vec: np.ndarray) -> np.ndarray:
    out = np.empty_like(vec)
    out[0] = vec[0]
    out[1:] = vec[:0:-1]
    return out


def tube_to_eigentuple(lam: Tube) -> np.ndarray:
    """Index-reversal map from a tube eigenvalue to the eigentuple vector ``d``.

    ``d_1 = lam_1`` and ``d_i = lam_{p-i+2}``; applying the map twice is the
    identity.
    """
    return _reverse_tail(lam.v.copy())


def eigentuple_to_tube(d) -> Tube:
    """Inverse of :func:`tube_to_eigentuple` (the same index reversal)."""
    return Tube(_reverse_tail(np.asarray(d, dtype=np.complex128)))


def eigentensor_to_eigenmatrix(X: Tensor3) -> np.ndarray:
    """Reshape an ``n x 1 x p`` eigentensor to the ``n x p`` eigenmatrix (vec-compatible)."""
    if X.m != 1:
        raise ValueError(f"eigentensors are n x 1 x p, got {X.shape}")
    return X.data[:, 0, :].copy()


def eigenmatrix_to_eigentensor(X) -> Tensor3:
    X = np.asarray(X)
    return Tensor3(X[:, None, :])


def t_linear_independent(Xs, rtol: float | None = None):
    """Slice-wise linear-independence test for ``n x 1 x p`` tensors.

    Returns ``(True, None)`` when, in every Fourier slice, the stacked
    vectors have full column rank; otherwise ``(False, j)`` with the first
    failing slice.  The rank threshold ``k * eps * s_max`` uses the largest
    singular value across all slices, so a slice where the vectors
    collectively vanish is dependent rather than trivially full-rank.
    """
    Xs = list(Xs)
    if not Xs:
        raise ValueError("need at least one tensor")
    n, _, p = Xs[0].shape
    k = len(Xs)
    if k > n:
        raise ValueError(f"at most n={n} tensors can be T-linearly independent, got {k}")
    for X in Xs:
        if X.shape != (n, 1, p):
            raise ValueError("all tensors must share the same n x 1 x p shape")
    if rtol is None:
        rtol = k * np.finfo(np.float64).eps
    stacked = np.concatenate([X.fourier for X in Xs], axis=2)  # (p, n, k)
    smallest = np.empty(p)
    largest = 0.0
    for j in range(p):
        s = np.linalg.svd(stacked[j], compute_uv=False)
        smallest[j] = s[-1]
        largest = max(largest, float(s[0]))
    if largest == 0.0:
        return False, 0
    bad = np.flatnonzero(smallest <= rtol * largest)
    if bad.size:
        return False, int(bad[0])
    return True, None


def is_positive_definite(A: Tensor3, tol: float = 0.0) -> bool:
    """Positive definiteness of a Hermitian tensor via its slice eigenvalues.

    Equivalent to every aligned tube eigenvalue being Hermitian positive
    definite.  Raises for non-Hermitian input.
    """
    if not is_hermitian_tensor(A):
        raise NotHermitianError("positive definiteness is defined for Hermitian tensors")
    spec = slice_spectra(A, hermitian=True)
    return bool(np.all(spec.values.real > tol))


# -- inequality verifiers ----------------------------------------------------


def _hermitian_extremes(A: Tensor3) -> tuple[np.ndarray, np.ndarray]:
    spec = slice_spectra(A, hermitian=True)
    vals = spec.values.real
    return vals[:, 0], vals[:, -1]


def weyl_slack(A: Tensor3, B: Tensor3) -> float:
    """Worst slack of the additive eigenvalue bounds for ``A + B``.

    Every aligned tube eigenvalue of the Hermitian sum must lie
    componentwise between the sums of the extreme tubes of ``A`` and ``B``.
    Nonnegative up to roundoff when the bounds hold.
    """
    for name, T in (("A", A), ("B", B)):
        if not is_hermitian_tensor(T):
            raise NotHermitianError(f"additive bounds require Hermitian {name}")
    lo = _hermitian_extremes(A)[0] + _hermitian_extremes(B)[0]
    hi = _hermitian_extremes(A)[1] + _hermitian_extremes(B)[1]
    sum_vals = slice_spectra(A + B, hermitian=True).values.real  # (p, n)
    slack_lo = (sum_vals - lo[:, None]).min()
    slack_hi = (hi[:, None] - sum_vals).min()
    return float(min(slack_lo, slack_hi))


def product_bound_slacks(A: Tensor3, B: Tensor3) -> dict[str, float]:
    """Slacks of the four product-spectrum bounds and the definiteness claim.

    Requires ``A`` Hermitian negative definite and ``B`` Hermitian positive
    semidefinite; then the product's slice spectra are real and bounded by
    products of the operands' extreme eigenvalues, and every tube
    eigenvalue of ``A * B`` is Hermitian negative semidefinite.
    """
    if not is_hermitian_tensor(A) or not is_hermitian_tensor(B):
        raise NotHermitianError("product bounds require Hermitian operands")
    amin, amax = _hermitian_extremes(A)
    bmin, bmax = _hermitian_extremes(B)
    if np.any(amax >= 0):
        raise ValueError("product bounds require A Hermitian negative definite")
    if np.any(bmin < -1e-12 * max(1.0, float(np.abs(bmax).max()))):
        raise ValueError("product bounds require B Hermitian positive semidefinite")
    prod_vals = slice_spectra(tprod(A, B)).values
    real_vals = np.sort(prod_vals.real, axis=1)
    lmin, lmax = real_vals[:, 0], real_vals[:, -1]
    return {
        "max_lower": float((lmax - amin * bmin).min()),
        "max_upper": float((amax * bmin - lmax).min()),
        "min_lower": float((lmin - amin * bmax).min()),
        "min_upper": float((amax * bmax - lmin).min()),
        "definiteness": float((-prod_vals.real).min()),
        "imag_residue": float(np.abs(prod_vals.imag).max()),
    }


def _rayleigh_components(A: Tensor3, X: Tensor3) -> np.ndarray:
    xf = X.fourier[:, :, 0]  # (p, n)
    gram = np.einsum("pi,pi->p", np.conj(xf), xf).real
    if gram.min() <= A.p * np.finfo(np.float64).eps * max(gram.max(), 1e-300):
        raise SingularTubeError("X^H * X is singular: some Fourier-slice vector is zero")
    quad = np.einsum("pi,pij,pj->p", np.conj(xf), A.fourier, xf)
    return quad / gram


def rayleigh_slack(A: Tensor3, X: Tensor3) -> float:
    """Worst slack of the Rayleigh-quotient sandwich for a Hermitian tensor.

    The tube ``(X^H*A*X) * (X^H*X)^-1`` must lie componentwise between the
    extreme ordered tubes of ``A``.
    """
    if not is_hermitian_tensor(A):
        raise NotHermitianError("the Rayleigh sandwich requires a Hermitian tensor")
    lo, hi = _hermitian_extremes(A)
    q = _rayleigh_components(A, X).real
    return float(min((q - lo).min(), (hi - q).min()))


def kantorovich_slack(A: Tensor3, X: Tensor3) -> float:
    """Worst componentwise slack of the Kantorovich bound for a Hermitian PD tensor.

    Componentwise,
    ``(x^H x)^-2 (x^H A x)(x^H A^-1 x) <= (d_min + d_max)^2 / (4 d_min d_max)``
    over the Fourier slices.
    """
    if not is_positive_definite(A):
        raise NotHPDError("the Kantorovich bound requires a Hermitian positive definite tensor")
    dmin, dmax = _hermitian_extremes(A)
    xf = X.fourier[:, :, 0]
    gram = np.einsum("pi,pi->p", np.conj(xf), xf).real
    if gram.min() <= A.p * np.finfo(np.float64).eps * max(gram.max(), 1e-300):
        raise SingularTubeError("X^H * X is singular: some Fourier-slice vector is zero")
    quad = np.einsum("pi,pij,pj->p", np.conj(xf), A.fourier, xf).real
    inv_x = np.linalg.solve(A.fourier, X.fourier)  # (p, n, 1)
    inv_quad = np.einsum("pij,pij->p", np.conj(X.fourier), inv_x).real
    lhs = quad * inv_quad / gram**2
    rhs = (dmin + dmax) ** 2 / (4.0 * dmin * dmax)
    return float((rhs - lhs).min())


def inequality_report(A: Tensor3, B: Tensor3 | None = None, X: Tensor3 | None = None) -> dict:
    """Evaluate the applicable spectral inequalities for the given operands.

    Returns a mapping from inequality name to its worst slack (``>= -eps``
    when the inequality holds) or to the precondition violation message.
    """
    report: dict[str, object] = {}
    if B is not None:
        try:
            report["weyl"] = weyl_slack(A, B)
        except (NotHermitianError, ValueError) as exc:
            report["weyl"] = f"precondition violated: {exc}"
        try:
            report["product_bounds"] = product_bound_slacks(A, B)
        except (NotHermitianError, ValueError) as exc:
            report["product_bounds"] = f"precondition violated: {exc}"
    if X is not None:
        try:
            report["rayleigh"] = rayleigh_slack(A, X)
        except (NotHermitianError, SingularTubeError) as exc:
            report["rayleigh"] = f"precondition violated: {exc}"
        try:
            report["kantorovich"] = kantorovich_slack(A, X)
        except (NotHermitianError, NotHPDError, SingularTubeError) as exc:
            report["kantorovich"] = f"precondition violated: {exc}"
    return report


# -- CSV dumps ----------------------------------------------------------------


def spectrum_to_csv(spec: SliceSpectrum, path):
    """Write the per-slice eigenvalues as rows ``slice,index,re,im``."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["slice", "index", "re", "im"])
        for j in range(spec.p):
            for i in range(spec.n):
                v = spec.values[j, i]
                writer.writerow([j, i, repr(float(v.real)), repr(float(v.imag))])


def eigenpairs_to_csv(pairs, path):
    """Write tube eigenvalues as rows ``selection,entry,re,im`` (long format)."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["selection", "entry", "re", "im"])
        for pair in pairs:
            sel = "-".join(str(s) for s in pair.selection)
            for k, v in enumerate(pair.lam.v):
                writer.writerow([sel, k, repr(float(v.real)), repr(float(v.imag))])
