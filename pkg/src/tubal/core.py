"""Dense third-order tensors, tubes, and the t-product algebra.

A third-order tensor of shape ``n x m x p`` is a stack of ``p`` frontal
slices, each an ``n x m`` matrix.  The t-product of two tensors is the
matrix product of the block-circulant expansion of the left operand with
the unfolded right operand; computationally it reduces to independent
matrix products between the mode-3 DFT slices of the operands.  Tubes
(``1 x 1 x p`` tensors) act as the scalars of this algebra, with
multiplication given by circular convolution.

All values are immutable after construction and promote to complex128
internally.  The mode-3 transform of a tensor is computed on demand and
cached, so repeated products against the same operand (as in iterative
solvers) pay for a single FFT.  Immutability makes values safe to share
across threads (a cache race at worst computes the same read-only array
twice); norms and reductions inherit numpy's fixed pairwise summation
order, so results do not depend on thread count.
"""

from __future__ import annotations

from typing import Union

import numpy as np

__all__ = [
    "Tensor3",
    "Tube",
    "tprod",
    "ttranspose",
    "identity",
    "zeros",
    "unfold",
    "fold",
    "bcirc_explicit",
    "frob_norm",
    "frob_inner",
    "bilinear",
    "tubular_norm",
]

# Largest bcirc matrix (in entries) the explicit oracle will materialize.
_BCIRC_MAX_ENTRIES = 4_000_000

# Imaginary residue tolerance when restoring real storage, relative to scale.
REAL_RESTORE_TOL = 1e-12


def _as_complex(data) -> np.ndarray:
    arr = np.asarray(data)
    if not np.issubdtype(arr.dtype, np.number):
        raise TypeError(f"tensor entries must be numeric, got dtype {arr.dtype}")
    return arr.astype(np.complex128, copy=True)


class Tensor3:
    """Immutable dense complex tensor of shape ``(n, m, p)``.

    Parameters
    ----------
    data : array_like
        Three-dimensional array of entries; the last axis indexes frontal
        slices (equivalently, it is the tube direction).  Real input is
        promoted to complex128.
    """

    __slots__ = ("_data", "_fourier", "_fourier_adjoint")

    def __init__(self, data):
        arr = _as_complex(data)
        if arr.ndim != 3:
            raise ValueError(f"expected a 3-way array, got ndim={arr.ndim}")
        if min(arr.shape) < 1:
            raise ValueError(f"all dimensions must be >= 1, got shape {arr.shape}")
        arr.setflags(write=False)
        self._data = arr
        self._fourier = None
        self._fourier_adjoint = None

    # -- basic structure ------------------------------------------------

    @property
    def data(self) -> np.ndarray:
        """Read-only complex entries, shape ``(n, m, p)``."""
        return self._data

    @property
    def shape(self) -> tuple[int, int, int]:
        return self._data.shape

    @property
    def n(self) -> int:
        return self._data.shape[0]

    @property
    def m(self) -> int:
        return self._data.shape[1]

    @property
    def p(self) -> int:
        return self._data.shape[2]

    def frontal(self, k: int) -> np.ndarray:
        """The ``k``-th frontal slice (0-based), an ``n x m`` matrix."""
        return self._data[:, :, k]

    @property
    def fourier(self) -> np.ndarray:
        """Mode-3 DFT slices as a read-only ``(p, n, m)`` stack.

        Uses the unnormalized forward DFT along the tube axis; slice ``j``
        is the matrix acting on the ``j``-th Fourier component.  Cached on
        first access.
        """
        if self._fourier is None:
            f = np.fft.fft(self._data, axis=2)
            f = np.ascontiguousarray(np.moveaxis(f, 2, 0))
            f.setflags(write=False)
            self._fourier = f
        return self._fourier

    @property
    def fourier_adjoint(self) -> np.ndarray:
        """Per-slice conjugate transposes of :attr:`fourier` (read-only, cached).

        These are the Fourier slices of the conjugate-transposed tensor;
        iterative solvers multiply by them every step.
        """
        if self._fourier_adjoint is None:
            g = np.ascontiguousarray(self.fourier.conj().transpose(0, 2, 1))
            g.setflags(write=False)
            self._fourier_adjoint = g
        return self._fourier_adjoint

    @classmethod
    def from_fourier_stack(cls, stack) -> "Tensor3":
        """Inverse of :attr:`fourier`: build a tensor from ``(p, n, m)`` DFT slices."""
        stack = np.asarray(stack, dtype=np.complex128)
        if stack.ndim != 3:
            raise ValueError(f"expected a (p, n, m) stack, got ndim={stack.ndim}")
        return cls(np.fft.ifft(np.moveaxis(stack, 0, 2), axis=2))

    # -- conversions -----------------------------------------------------

    def as_tube(self) -> "Tube":
        """View a ``1 x 1 x p`` tensor as a tube."""
        if self.n != 1 or self.m != 1:
            raise ValueError(f"only 1x1xp tensors are tubes, got shape {self.shape}")
        return Tube(self._data[0, 0, :])

    def real_data(self, tol: float = REAL_RESTORE_TOL) -> np.ndarray:
        """Real float64 entries, checking that the imaginary residue is negligible.

        Raises ``ValueError`` if any imaginary part exceeds
        ``tol * (1 + max|entry|)``.
        """
        scale = 1.0 + (np.abs(self._data).max() if self._data.size else 0.0)
        resid = np.abs(self._data.imag).max() if self._data.size else 0.0
        if resid > tol * scale:
            raise ValueError(
                f"imaginary residue {resid:.3e} exceeds {tol:.1e} * scale; "
                "tensor is not numerically real"
            )
        return self._data.real.copy()

    # -- arithmetic -------------------------------------------------------

    def _check_same_shape(self, other: "Tensor3"):
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch: {self.shape} vs {other.shape}")

    def __add__(self, other: "Tensor3") -> "Tensor3":
        self._check_same_shape(other)
        return Tensor3(self._data + other._data)

    def __sub__(self, other: "Tensor3") -> "Tensor3":
        self._check_same_shape(other)
        return Tensor3(self._data - other._data)

    def __neg__(self) -> "Tensor3":
        return Tensor3(-self._data)

    def __mul__(self, scalar) -> "Tensor3":
        if isinstance(scalar, (Tensor3, Tube)):
            raise TypeError("use tprod() for tensor-tensor products")
        return Tensor3(self._data * complex(scalar))

    __rmul__ = __mul__

    def __matmul__(self, other) -> "Tensor3":
        if isinstance(other, Tube):
            other = other.as_tensor()
        return tprod(self, other)

    def conj_transpose(self) -> "Tensor3":
        return ttranspose(self)

    @property
    def H(self) -> "Tensor3":
        return ttranspose(self)

    def __repr__(self):
        return f"Tensor3(shape={self.shape})"


class Tube:
    """A tube: the ``1 x 1 x p`` scalar of the t-product algebra.

    Stores a length-``p`` complex vector ``v``; the associated circulant
    matrix has ``v`` as first column, so tube multiplication is circular
    convolution and is commutative.  The DFT of ``v`` (the tube's Fourier
    components) is cached; componentwise operations on it realize
    functions of the tube.
    """

    __slots__ = ("_v", "_fourier")

    def __init__(self, v):
        arr = _as_complex(v).reshape(-1)
        if arr.size < 1:
            raise ValueError("tube length must be >= 1")
        arr.setflags(write=False)
        self._v = arr
        self._fourier = None

    @property
    def v(self) -> np.ndarray:
        """Read-only entries ``v_1 .. v_p``."""
        return self._v

    @property
    def p(self) -> int:
        return self._v.size

    @property
    def fourier(self) -> np.ndarray:
        """Unnormalized forward DFT of the entries (read-only)."""
        if self._fourier is None:
            f = np.fft.fft(self._v)
            f.setflags(write=False)
            self._fourier = f
        return self._fourier

    @classmethod
    def from_fourier(cls, components) -> "Tube":
        return cls(np.fft.ifft(np.asarray(components, dtype=np.complex128)))

    @classmethod
    def e1(cls, p: int) -> "Tube":
        """The multiplicative unit ``(1, 0, ..., 0)``."""
        v = np.zeros(p)
        v[0] = 1.0
        return cls(v)

    @classmethod
    def zero(cls, p: int) -> "Tube":
        return cls(np.zeros(p))

    def as_tensor(self) -> Tensor3:
        return Tensor3(self._v.reshape(1, 1, -1))

    def conj_transpose(self) -> "Tube":
        """The adjoint tube: conjugate entries with indices 2..p reversed."""
        out = np.empty_like(self._v)
        out[0] = np.conj(self._v[0])
        out[1:] = np.conj(self._v[:0:-1])
        return Tube(out)

    @property
    def H(self) -> "Tube":
        return self.conj_transpose()

    def first(self) -> complex:
        """Entry in position (1,1,1)."""
        return complex(self._v[0])

    def _check_same_p(self, other: "Tube"):
        if self.p != other.p:
            raise ValueError(f"tube length mismatch: {self.p} vs {other.p}")

    def __add__(self, other: "Tube") -> "Tube":
        self._check_same_p(other)
        return Tube(self._v + other._v)

    def __sub__(self, other: "Tube") -> "Tube":
        self._check_same_p(other)
        return Tube(self._v - other._v)

    def __neg__(self) -> "Tube":
        return Tube(-self._v)

    def __mul__(self, other) -> "Tube":
        if isinstance(other, Tube):
            # circular convolution via the Fourier components
            self._check_same_p(other)
            return Tube.from_fourier(self.fourier * other.fourier)
        return Tube(self._v * complex(other))

    __rmul__ = __mul__

    def norm(self) -> float:
        return float(np.linalg.norm(self._v))

    def __repr__(self):
        return f"Tube(p={self.p})"


TensorLike = Union[Tensor3, Tube]


def _as_tensor(x: TensorLike) -> Tensor3:
    return x.as_tensor() if isinstance(x, Tube) else x


def tprod(A: TensorLike, B: TensorLike) -> Tensor3:
    """T-product of ``A`` (n x m x p) and ``B`` (m x l x p).

    Equals the fold of ``bcirc(A) @ unfold(B)``; computed as slice-wise
    matrix products in the Fourier domain, which agrees with the
    block-circulant path to roundoff.
    """
    A, B = _as_tensor(A), _as_tensor(B)
    if A.m != B.n or A.p != B.p:
        raise ValueError(
            f"t-product shape mismatch: {A.shape} * {B.shape} "
            "(inner dimension and tube length must agree)"
        )
    return Tensor3.from_fourier_stack(A.fourier @ B.fourier)


def ttranspose(A: TensorLike) -> Tensor3:
    """Conjugate transpose: slice 1 is ``A_1^H``; slice k is ``A_{p-k+2}^H``.

    Satisfies ``bcirc(ttranspose(A)) = bcirc(A)^H``.  For real tensors this
    coincides with the real transpose.
    """
    A = _as_tensor(A)
    sw = np.conj(A.data.transpose(1, 0, 2))
    out = np.empty_like(sw)
    out[:, :, 0] = sw[:, :, 0]
    out[:, :, 1:] = sw[:, :, :0:-1]
    return Tensor3(out)


def identity(n: int, p: int) -> Tensor3:
    """Identity tensor: first frontal slice is ``I_n``, the rest are zero."""
    if n < 1 or p < 1:
        raise ValueError("identity requires n >= 1 and p >= 1")
    data = np.zeros((n, n, p), dtype=np.complex128)
    data[:, :, 0] = np.eye(n)
    return Tensor3(data)


def zeros(n: int, m: int, p: int) -> Tensor3:
    return Tensor3(np.zeros((n, m, p)))


def unfold(A: TensorLike) -> np.ndarray:
    """Stack frontal slices into the ``np x m`` block column ``[A_1; ...; A_p]``."""
    A = _as_tensor(A)
    return A.data.transpose(2, 0, 1).reshape(A.n * A.p, A.m)


def fold(M, p: int) -> Tensor3:
    """Inverse of :func:`unfold` for a block column with ``p`` blocks."""
    M = np.asarray(M)
    if M.ndim != 2 or M.shape[0] % p:
        raise ValueError(f"cannot fold shape {M.shape} into {p} blocks")
    n = M.shape[0] // p
    return Tensor3(M.reshape(p, n, M.shape[1]).transpose(1, 2, 0))


def bcirc_explicit(A: TensorLike) -> np.ndarray:
    """Dense block-circulant matrix of ``A`` (test oracle only).

    Block ``(r, c)`` is the frontal slice ``1 + ((r - c) mod p)``.  Refuses
    to materialize more than 4e6 entries; this is an oracle for validating
    the FFT path, not a compute path.
    """
    A = _as_tensor(A)
    n, m, p = A.shape
    if (n * p) * (m * p) > _BCIRC_MAX_ENTRIES:
        raise ValueError(
            f"bcirc of shape {(n * p, m * p)} exceeds the oracle size limit"
        )
    idx = (np.arange(p)[:, None] - np.arange(p)[None, :]) % p
    blocks = A.data[:, :, idx]  # (n, m, p, p)
    return blocks.transpose(2, 0, 3, 1).reshape(n * p, m * p)


def frob_norm(A: TensorLike) -> float:
    """Scalar Frobenius norm: sqrt of the sum of squared entry moduli."""
    A = _as_tensor(A)
    return float(np.linalg.norm(A.data))


def frob_inner(A: TensorLike, B: TensorLike) -> complex:
    """Scalar Frobenius inner product ``sum(conj(A) * B)``."""
    A, B = _as_tensor(A), _as_tensor(B)
    if A.shape != B.shape:
        raise ValueError(f"shape mismatch: {A.shape} vs {B.shape}")
    return complex(np.vdot(A.data, B.data))


def bilinear(X: Tensor3, Y: Tensor3) -> Tube:
    """Tube-valued bilinear form ``<X, Y> = X^H * Y`` for ``n x 1 x p`` tensors.

    Additive in ``Y``, satisfies ``<X, Y * [a]> = [a] * <X, Y>`` and
    ``<X, Y> = <Y, X>^H``.
    """
    X, Y = _as_tensor(X), _as_tensor(Y)
    if X.shape != Y.shape or X.m != 1:
        raise ValueError(
            f"bilinear form needs matching n x 1 x p operands, got {X.shape}, {Y.shape}"
        )
    comps = np.einsum("pij,pij->p", np.conj(X.fourier), Y.fourier)
    return Tube.from_fourier(comps)


def tubular_norm(X: Tensor3) -> Tube:
    """Tube-valued norm ``<X, X>^(1/2)`` of an ``n x 1 x p`` tensor.

    The Fourier components of ``<X, X>`` are the squared Euclidean norms of
    the Fourier-slice vectors, so the principal square root always exists;
    zero components map to zero.  The result is a Hermitian positive
    semidefinite tube.
    """
    X = _as_tensor(X)
    if X.m != 1:
        raise ValueError(f"tubular norm is defined for n x 1 x p tensors, got {X.shape}")
    comps = np.einsum("pij,pij->p", np.conj(X.fourier), X.fourier).real
    return Tube.from_fourier(np.sqrt(np.maximum(comps, 0.0)))
