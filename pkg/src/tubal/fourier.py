"""Mode-3 DFT layer: per-slice matrix form of a tensor and the DFT-matrix oracle.

Conventions (the single place they are pinned down):

* Fast transforms use the **unnormalized forward DFT** along the tube axis
  (``numpy.fft.fft``) and the ``1/p`` inverse.  ``to_fourier(A).slices[j]``
  is therefore the matrix whose entries are ``sum_k A[:, :, k] w^(jk)`` with
  ``w = exp(-2*pi*i/p)``.  Any tube length is supported (the FFT backend
  handles mixed-radix and prime sizes).
* The **unitary** DFT matrix ``F_p`` (``dft_matrix``) appears only in
  oracles.  The similarity ``(F_p^H (x) I_n) bcirc(A) (F_p (x) I_m)`` is
  block diagonal, and its ``j``-th diagonal block equals the fast-transform
  slice at index ``(-j) mod p``:

      unitary_diag_blocks(A)[j] == to_fourier(A).slices[(-j) % p]

  The index reversal is the bridge between the two conventions; it is a
  fixed permutation, so componentwise constructions (tube functions,
  spectra, selections) agree between the conventions object-for-object.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Tensor3, TensorLike, _as_tensor

__all__ = ["FourierSlices", "to_fourier", "from_fourier", "dft_matrix", "unitary_diag_blocks"]


@dataclass(frozen=True)
class FourierSlices:
    """The ``p`` complex ``n x m`` matrices of a tensor's mode-3 DFT.

    ``normalization`` records the transform convention; only
    ``"fft-forward"`` (unnormalized forward, ``1/p`` inverse) is produced.
    """

    slices: np.ndarray  # (p, n, m), read-only
    normalization: str = "fft-forward"

    @property
    def p(self) -> int:
        return self.slices.shape[0]

    def __getitem__(self, j: int) -> np.ndarray:
        return self.slices[j]


def to_fourier(A: TensorLike) -> FourierSlices:
    """Mode-3 DFT of ``A`` as a stack of per-slice matrices."""
    return FourierSlices(_as_tensor(A).fourier)


def from_fourier(S) -> Tensor3:
    """Inverse transform; exact round trip with :func:`to_fourier` to roundoff."""
    stack = S.slices if isinstance(S, FourierSlices) else np.asarray(S)
    return Tensor3.from_fourier_stack(stack)


def dft_matrix(p: int) -> np.ndarray:
    """Unitary DFT matrix with entries ``w^(jk) / sqrt(p)``, ``w = exp(-2*pi*i/p)``."""
    if p < 1:
        raise ValueError("p must be >= 1")
    j = np.arange(p)
    # reduce jk mod p before exponentiating to keep angles small
    phase = (j[:, None] * j[None, :]) % p
    return np.exp(-2j * np.pi * phase / p) / np.sqrt(p)


def unitary_diag_blocks(A: TensorLike) -> np.ndarray:
    """Diagonal blocks of ``(F_p^H (x) I) bcirc(A) (F_p (x) I)`` as a ``(p, n, m)`` stack.

    Computed from the fast-transform slices by the index-reversal bridge
    documented in the module docstring.
    """
    f = _as_tensor(A).fourier
    p = f.shape[0]
    order = (-np.arange(p)) % p
    return f[order]
