"""Test-problem generators: a mildly conditioned blur family and a severely
ill-posed integral-equation family.

Both families build an ``n x n x n`` coefficient tensor whose ``i``-th
frontal slice is ``t_i * M`` for a fixed matrix ``M`` and tube pattern
``t_i = M_1[i, 0]``, plus a right-hand side manufactured from a known
solution so that errors can be tracked exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import toeplitz

from .core import Tensor3, tprod

__all__ = [
    "ProblemInstance",
    "gaussian_blur_matrix",
    "baart_matrix",
    "prolate_matrix",
    "blur_problem",
    "baart_prolate_problem",
    "random_solution",
    "ones_solution",
    "make_rhs",
]


@dataclass
class ProblemInstance:
    """A generated system ``A * X = B`` with its known solution and provenance."""

    A: Tensor3
    X_star: Tensor3
    B: Tensor3
    descriptor: dict = field(default_factory=dict)


def _rng(seed: int) -> np.random.Generator:
    # PCG64 + ziggurat standard normals: reproducible across platforms
    return np.random.Generator(np.random.PCG64(seed))


def gaussian_blur_matrix(n: int, band: int = 7, sigma: float = 4.0) -> np.ndarray:
    """Periodic one-sided Gaussian blur matrix.

    With ``z_j = exp(-j^2 / (2 sigma^2))`` for ``j < band`` and zero padding,
    returns ``toeplitz([z_1, reverse(z_2..z_n)], z) / sqrt(2 pi sigma^2)``:
    first column ``(z_1, 0, ..., 0, z_band, ..., z_2)``, first row ``z``.
    The wrap-around makes the matrix circulant, hence well conditioned for
    this kernel despite the hard truncation.
    """
    if not 1 <= band <= n:
        raise ValueError(f"band must lie in [1, n], got band={band}, n={n}")
    z = np.zeros(n)
    j = np.arange(band)
    z[:band] = np.exp(-(j.astype(float) ** 2) / (2.0 * sigma**2))
    first_col = np.concatenate(([z[0]], z[1:][::-1]))
    return toeplitz(first_col, z) / np.sqrt(2.0 * np.pi * sigma**2)


def baart_matrix(n: int) -> np.ndarray:
    """Galerkin matrix of the first-kind integral equation with kernel
    ``exp(s cos t)`` for ``s in [0, pi/2]``, ``t in [0, pi]``.

    Orthonormal box functions on uniform grids; the ``s`` integration is
    exact, the ``t`` integration uses one Simpson rule per element.  The
    singular values decay exponentially, so the matrix is numerically
    rank deficient already for moderate ``n``.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    hs = np.pi / (2.0 * n)
    ht = np.pi / n
    s = hs * np.arange(n + 1)
    t = ht * np.arange(n + 1)

    def col(tv: float) -> np.ndarray:
        # integral of exp(s cos t) over each s element, at fixed t
        c = np.cos(tv)
        if abs(c) < 1e-13:
            return s[1:] - s[:-1]
        return (np.exp(s[1:] * c) - np.exp(s[:-1] * c)) / c

    A = np.empty((n, n))
    for j in range(n):
        tm = 0.5 * (t[j] + t[j + 1])
        A[:, j] = (ht / 6.0) * (col(t[j]) + 4.0 * col(tm) + col(t[j + 1]))
    return A / np.sqrt(hs * ht)


def prolate_matrix(n: int, w: float = 0.46) -> np.ndarray:
    """Symmetric Toeplitz prolate matrix: first row ``2w, sin(2 pi w k)/(pi k)``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    row = np.empty(n)
    row[0] = 2.0 * w
    k = np.arange(1, n)
    row[1:] = np.sin(2.0 * np.pi * w * k) / (np.pi * k)
    return toeplitz(row)


def random_solution(n: int, p: int, seed: int) -> Tensor3:
    """Standard-normal ``n x 1 x p`` tensor, bit-reproducible from the seed."""
    return Tensor3(_rng(seed).standard_normal((n, 1, p)))


def ones_solution(n: int, p: int) -> Tensor3:
    return Tensor3(np.ones((n, 1, p)))


def make_rhs(A: Tensor3, X_star: Tensor3) -> Tensor3:
    """Right-hand side ``B = A * X_star``."""
    return tprod(A, X_star)


def _tube_times_matrix_tensor(tube: np.ndarray, M: np.ndarray) -> Tensor3:
    n = M.shape[0]
    data = np.empty((n, n, tube.size), dtype=np.complex128)
    for i, ti in enumerate(tube):
        data[:, :, i] = ti * M
    return Tensor3(data)


def blur_problem(n: int, band: int = 7, sigma: float = 4.0, seed: int = 0) -> ProblemInstance:
    """Blur family: slice ``i`` is ``M[i, 0] * M`` for the blur matrix ``M``.

    Well conditioned at the default parameters; every slice is a scalar
    multiple of the same matrix, so all Fourier slices share one condition
    number.
    """
    M = gaussian_blur_matrix(n, band, sigma)
    A = _tube_times_matrix_tensor(M[:, 0], M)
    X_star = random_solution(n, n, seed)
    B = make_rhs(A, X_star)
    descriptor = {
        "family": "blur",
        "n": n,
        "band": band,
        "sigma": sigma,
        "seed": seed,
        "solution": "random",
    }
    return ProblemInstance(A, X_star, B, descriptor)


def baart_prolate_problem(
    n: int, w: float = 0.46, seed: int = 0, solution: str = "random"
) -> ProblemInstance:
    """Ill-posed family: slice ``i`` is ``A1[i, 0] * A2`` with ``A1`` the
    integral-equation matrix and ``A2`` the prolate matrix.

    Severely ill conditioned; steepest-descent methods legitimately break
    down on it, and fixed-step iterations act as regularizers when stopped
    early.  ``solution`` selects a random or an all-ones exact solution.
    """
    if n < 4:
        raise ValueError("n must be >= 4")
    if solution not in ("random", "ones"):
        raise ValueError(f"unknown solution kind {solution!r}")
    A1 = baart_matrix(n)
    A2 = prolate_matrix(n, w)
    A = _tube_times_matrix_tensor(A1[:, 0], A2)
    X_star = ones_solution(n, n) if solution == "ones" else random_solution(n, n, seed)
    B = make_rhs(A, X_star)
    descriptor = {
        "family": "baart_prolate",
        "n": n,
        "w": w,
        "seed": seed,
        "solution": solution,
    }
    return ProblemInstance(A, X_star, B, descriptor)
