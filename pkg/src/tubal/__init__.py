"""Tubal: t-product tensor algebra, tube eigenvalues, and iterative solvers.

The package is organized around the t-product of third-order tensors:

* :mod:`tubal.core` -- tensors, tubes, products, transposes, norms
* :mod:`tubal.fourier` -- the mode-3 DFT layer and its explicit oracle
* :mod:`tubal.tubes` -- the tube calculus (inverses, functions, roots, order)
* :mod:`tubal.spectra` -- T-eigenvalues, tube eigenvalues, spectral bounds
* :mod:`tubal.solvers` -- fixed-step and steepest-descent iterations
* :mod:`tubal.problems` -- reproducible test-problem generators
* :mod:`tubal.serialize` -- tensor container formats
* :mod:`tubal.experiments` / :mod:`tubal.cli` -- sweep runner and CLI
"""

from .core import (
    Tensor3,
    Tube,
    bcirc_explicit,
    bilinear,
    fold,
    frob_inner,
    frob_norm,
    identity,
    tprod,
    ttranspose,
    tubular_norm,
    unfold,
    zeros,
)
from .fourier import FourierSlices, dft_matrix, from_fourier, to_fourier, unitary_diag_blocks
from .problems import (
    ProblemInstance,
    baart_matrix,
    baart_prolate_problem,
    blur_problem,
    gaussian_blur_matrix,
    make_rhs,
    ones_solution,
    prolate_matrix,
    random_solution,
)
from .solvers import (
    ConvergenceHistory,
    IterOptions,
    SingularStepError,
    SolveResult,
    SpectralRadiusError,
    StepParams,
    alpha_one,
    alpha_star,
    mu_one,
    mu_star,
    neumann_inverse,
    project_orthogonal,
    relax_wrap,
    richardson_global,
    richardson_tubular,
    sd_global,
    sd_tubular,
)
from .spectra import (
    HermitianDecomposition,
    SliceSpectrum,
    TubularEigenPair,
    aligned_eigenpairs,
    eig_from_selection,
    enumerate_eigenpairs,
    hermitian_ordered_spectrum,
    is_hermitian_tensor,
    is_positive_definite,
    scalar_t_spectral_radius,
    slice_spectra,
    t_eigenvalues,
    t_linear_independent,
    tubular_spectral_radius,
)
from .tubes import (
    NotHermitianError,
    NotHPDError,
    SingularTubeError,
    TubeOrder,
    circ_matrix,
    dtensor,
    is_hermitian_tube,
    is_hpd_tube,
    order_cmp,
    tube_apply,
    tube_inverse,
    tube_sqrt,
)

__version__ = "0.1.0"
