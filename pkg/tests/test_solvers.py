import numpy as np
import pytest

from tubal import Tensor3, Tube, identity, tprod, ttranspose, zeros
from tubal.core import frob_norm
from tubal.solvers import (
    ConvergenceHistory,
    IterOptions,
    SingularProjectionError,
    SingularStepError,
    SpectralRadiusError,
    StepParams,
    alpha_one,
    alpha_star,
    mu_one,
    mu_star,
    neumann_inverse,
    normal_extremes,
    project_orthogonal,
    relax_wrap,
    richardson_global,
    richardson_tubular,
    richardson_tubular_update,
    sd_global,
    sd_tubular,
)
from tubal.spectra import scalar_t_spectral_radius, tubular_spectral_radius
from tubal.tubes import NotHermitianError, dtensor
from tubal.verify import (
    _controlled_tensor,
    energy_error_sq,
    random_hermitian_tube,
    random_hpd_tube,
    random_tensor,
    random_tube,
)


def _system(rng, n=5, p=4):
    A = _controlled_tensor(rng, n, p, 1.0, 3.0)
    X_star = random_tensor(rng, n, 1, p)
    return A, X_star, tprod(A, X_star)


def test_iter_options_validation():
    with pytest.raises(ValueError):
        IterOptions(max_iterations=0)
    with pytest.raises(ValueError):
        IterOptions(rel_residual_tol=0.0)


def test_richardson_identity_one_step(rng):
    B = random_tensor(rng, 3, 1, 4)
    res = richardson_tubular(identity(3, 4), B, Tube.e1(4))
    assert res.history.iterations == 1
    assert res.history.stop_reason == "tol"
    assert frob_norm(res.X - B) <= 1e-12 * frob_norm(B)
    resg = richardson_global(identity(3, 4), B, 1.0)
    assert resg.history.iterations == 1


def test_richardson_requires_hermitian_step(rng):
    A, _, B = _system(rng)
    with pytest.raises(NotHermitianError):
        richardson_tubular(A, B, Tube([1.0, 1.0j, 0.0, 0.0]))
    with pytest.raises(ValueError):
        richardson_global(A, B, -0.5)
    with pytest.raises(ValueError):
        richardson_tubular(A, B, Tube.e1(3))


def test_richardson_shape_checks(rng):
    A, _, B = _system(rng)
    with pytest.raises(ValueError):
        richardson_tubular(A, random_tensor(rng, 4, 1, 4), Tube.e1(4))
    with pytest.raises(ValueError):
        richardson_tubular(random_tensor(rng, 5, 4, 4), B, Tube.e1(4))


def test_richardson_converges_under_spectral_condition(rng):
    A, X_star, B = _system(rng)
    alpha = alpha_star(A)
    # iteration tensor has tubular spectral radius strictly below one
    G = identity(5, 4) - tprod(dtensor(alpha, 5), tprod(ttranspose(A), A))
    rho = tubular_spectral_radius(G)
    assert rho.fourier.real.max() < 1.0
    res = richardson_tubular(A, B, alpha, opts=IterOptions(max_iterations=2000, rel_residual_tol=1e-10))
    assert res.history.stop_reason == "tol"
    assert frob_norm(res.X - X_star) <= 1e-7 * frob_norm(X_star)


def test_richardson_divergence_guard(rng):
    A, _, B = _system(rng)
    lo, _ = normal_extremes(A)
    bad = Tube.from_fourier(2.1 / lo)
    res = richardson_tubular(A, B, bad, opts=IterOptions(max_iterations=5000, rel_residual_tol=1e-10))
    assert res.history.stop_reason == "diverged"
    assert res.history.final_delta > 1e6


def test_global_matches_tubular_scalar_tube(rng):
    A, _, B = _system(rng)
    mu = mu_star(A)
    opts = IterOptions(max_iterations=30, rel_residual_tol=1e-300)
    rg = richardson_global(A, B, mu, opts=opts)
    rt = richardson_tubular(A, B, mu * Tube.e1(4), opts=opts)
    assert frob_norm(rg.X - rt.X) <= 1e-12 * max(1.0, frob_norm(rg.X))
    gaps = np.abs(np.asarray(rg.history.deltas) - np.asarray(rt.history.deltas))
    assert gaps.max() <= 1e-12


def test_step_parameters_identity():
    I = identity(3, 4)
    assert np.allclose(alpha_star(I).v, Tube.e1(4).v, atol=1e-12)
    assert np.allclose(alpha_one(I).v, Tube.e1(4).v, atol=1e-12)
    assert abs(mu_star(I) - 1.0) <= 1e-12
    assert abs(mu_one(I) - 1.0) <= 1e-12


def test_step_parameters_diagonal_tube_tensor(rng):
    v = random_hpd_tube(rng, 4, low=0.5, high=2.0)
    A = dtensor(v, 3)
    astar = alpha_star(A)
    expected = 1.0 / (v.fourier.real**2)
    assert np.abs(astar.fourier.real - expected).max() <= 1e-10
    a1 = alpha_one(A)
    assert np.abs(a1.fourier.real - expected).max() <= 1e-10


def test_alpha_star_rate_dominates_scalar_rate(rng):
    # per-slice optimal tube step beats the best scalar step in spectral radius
    for _ in range(100):
        n, p = int(rng.integers(2, 6)), int(rng.integers(1, 6))
        A = _controlled_tensor(rng, n, p, 0.5, 3.0)
        ext = normal_extremes(A)
        N = tprod(ttranspose(A), A)
        G_star = identity(n, p) - tprod(dtensor(alpha_star(A, ext), n), N)
        G_mu = identity(n, p) - mu_star(A, ext) * N
        r_star = tubular_spectral_radius(G_star).fourier.real
        r_mu = tubular_spectral_radius(G_mu).fourier.real
        assert (r_star <= r_mu + 1e-10).all()


def test_sd_exact_start_stops_immediately(rng):
    A, X_star, B = _system(rng)
    res = sd_tubular(A, B, X_star, IterOptions())
    assert res.history.iterations == 0 and res.history.stop_reason == "tol"
    resg = sd_global(A, B, X_star, IterOptions())
    assert resg.history.iterations == 0


def test_sd_tubular_one_step_for_scalar_slices(rng):
    # n = 1: the per-slice line search solves each scalar equation exactly
    a = random_tube(rng, 5)
    A = a.as_tensor()
    X_star = random_tensor(rng, 1, 1, 5)
    B = tprod(A, X_star)
    res = sd_tubular(A, B, opts=IterOptions(max_iterations=5, rel_residual_tol=1e-10))
    assert res.history.iterations == 1
    assert res.history.stop_reason == "tol"


def test_sd_global_reduces_to_matrix_sd_for_p1(rng):
    # p = 1 is classical steepest descent on the normal equations
    M = rng.standard_normal((4, 4)) + 4 * np.eye(4)
    A = Tensor3(M[:, :, None])
    x = rng.standard_normal((4, 1, 1))
    B = tprod(A, Tensor3(x))
    res = sd_global(A, B, opts=IterOptions(max_iterations=2, rel_residual_tol=1e-300))
    # manual two steps
    xk = np.zeros((4, 1))
    for _ in range(2):
        r = B.data[:, :, 0].real - M @ xk
        d = M.T @ r
        ad = M @ d
        xk = xk + (np.linalg.norm(d) ** 2 / np.linalg.norm(ad) ** 2) * d
    assert np.abs(res.X.data[:, :, 0].real - xk).max() <= 1e-12 * max(1.0, np.abs(xk).max())


def test_sd_energy_contraction_bound(rng):
    A, X_star, B = _system(rng)
    lo, hi = normal_extremes(A)
    kappa = hi / lo
    w = ((kappa - 1) / (kappa + 1)) ** 2
    X = None
    opts = IterOptions(max_iterations=1, rel_residual_tol=1e-300)
    AEf = A.fourier @ (-X_star.fourier)
    prev = np.einsum("pij,pij->p", AEf.conj(), AEf).real
    for _ in range(10):
        X = sd_tubular(A, B, X, opts).X
        AEf = A.fourier @ (X.fourier - X_star.fourier)
        cur = np.einsum("pij,pij->p", AEf.conj(), AEf).real
        assert (cur <= w * prev * (1 + 1e-8) + 1e-20).all()
        prev = cur


def test_sd_breakdown_reports_component_and_history():
    from tubal.problems import baart_prolate_problem

    ill = baart_prolate_problem(100, seed=0)
    with pytest.raises(SingularStepError) as exc:
        sd_tubular(ill.A, ill.B, opts=IterOptions(max_iterations=200, rel_residual_tol=5e-3))
    err = exc.value
    assert err.component is not None
    assert err.history is not None and err.history.stop_reason == "breakdown"
    assert err.X is not None
    assert len(err.magnitudes) == 100


def test_history_csv_round(tmp_path):
    hist = ConvergenceHistory(deltas=[1.0, 0.5, 0.0], rel_errors=[1.0, 0.4, 0.0],
                              seconds=[0.0, 0.01, 0.01], stop_reason="tol")
    f = tmp_path / "hist.csv"
    hist.to_csv(f)
    lines = f.read_text().strip().splitlines()
    assert lines[0] == "k,delta,log10_delta,rel_error,seconds"
    assert len(lines) == 4
    assert lines[3].split(",")[2] == "-inf"
    assert hist.iterations == 2 and hist.final_delta == 0.0 and hist.final_rel_error == 0.0


def test_project_orthogonal_reductions(rng):
    A, X_star, B = _system(rng)
    X_old = random_tensor(rng, 5, 1, 4)
    Rf = B.fourier - A.fourier @ X_old.fourier
    D = Tensor3.from_fourier_stack(A.fourier.conj().transpose(0, 2, 1) @ Rf)
    one_t = sd_tubular(A, B, X_old, IterOptions(max_iterations=1, rel_residual_tol=1e-300))
    assert frob_norm(project_orthogonal(A, B, X_old, [D], "tubular") - one_t.X) <= 1e-12
    one_g = sd_global(A, B, X_old, IterOptions(max_iterations=1, rel_residual_tol=1e-300))
    assert frob_norm(project_orthogonal(A, B, X_old, [D], "global") - one_g.X) <= 1e-12


def test_projection_orthogonality_conditions(rng):
    A, X_star, B = _system(rng)
    X_old = random_tensor(rng, 5, 1, 4)
    V = [random_tensor(rng, 5, 1, 4) for _ in range(3)]
    Xn = project_orthogonal(A, B, X_old, V, "tubular")
    ATf = A.fourier.conj().transpose(0, 2, 1)
    rf = ATf @ (B.fourier - A.fourier @ Xn.fourier)
    R = Tensor3.from_fourier_stack(rf)
    from tubal.core import bilinear

    for Vq in V:
        assert np.abs(bilinear(R, Vq).v).max() <= 1e-10
    Xg = project_orthogonal(A, B, X_old, V, "global")
    rg = Tensor3.from_fourier_stack(ATf @ (B.fourier - A.fourier @ Xg.fourier))
    from tubal.core import frob_inner

    for Vq in V:
        assert abs(frob_inner(rg, Vq)) <= 1e-10


def test_projection_energy_dominance(rng):
    A, X_star, B = _system(rng)
    X_old = random_tensor(rng, 5, 1, 4)
    V = [random_tensor(rng, 5, 1, 4) for _ in range(2)]
    Xt = project_orthogonal(A, B, X_old, V, "tubular")
    Xg = project_orthogonal(A, B, X_old, V, "global")
    et = energy_error_sq(A, Xt, X_star)
    eg = energy_error_sq(A, Xg, X_star)
    assert et <= eg + 1e-10
    for _ in range(10):
        cand = X_old
        for Vq in V:
            cand = cand + tprod(Vq, random_tube(rng, 4).as_tensor())
        assert et <= energy_error_sq(A, cand, X_star) + 1e-10


def test_projection_rejects_dependent_basis(rng):
    A, _, B = _system(rng)
    X_old = zeros(5, 1, 4)
    X = random_tensor(rng, 5, 1, 4)
    dep = [X, tprod(X, random_tube(rng, 4).as_tensor())]
    with pytest.raises(SingularProjectionError):
        project_orthogonal(A, B, X_old, dep, "tubular")
    with pytest.raises(ValueError, match="mode"):
        project_orthogonal(A, B, X_old, [X], "sideways")


def test_projection_reports_degenerate_slice(rng):
    # a coefficient tensor whose Fourier slice vanishes makes that slice's
    # Galerkin system undetermined; the slice index is reported
    f = np.array(random_tensor(rng, 3, 3, 4).fourier)
    f[2] = 0.0
    A = Tensor3.from_fourier_stack(f)
    B = random_tensor(rng, 3, 1, 4)
    V = [random_tensor(rng, 3, 1, 4) for _ in range(2)]
    with pytest.raises(SingularProjectionError) as exc:
        project_orthogonal(A, B, zeros(3, 1, 4), V, "tubular")
    assert exc.value.slice_index == 2


def test_relax_wrap_stops_before_relaxing(rng):
    B = random_tensor(rng, 3, 1, 4)
    update = richardson_tubular_update(identity(3, 4), B, Tube.e1(4))
    res = relax_wrap(update, identity(3, 4), B)
    assert res.history.iterations == 1 and res.history.stop_reason == "tol"
    assert not res.history.fallback_steps


def test_relax_wrap_fallback_on_stationary_residuals(rng):
    # an inner map that never moves makes the residual difference vanish
    A, _, B = _system(rng)
    update = lambda X: zeros(5, 1, 4)  # noqa: E731
    res = relax_wrap(update, A, B, opts=IterOptions(max_iterations=6, rel_residual_tol=1e-300))
    assert res.history.fallback_steps  # relaxation had nothing to work with
    assert res.history.stop_reason == "maxit"


def test_relax_wrap_accelerates_richardson(rng):
    A, X_star, B = _system(rng)
    alpha = alpha_one(A)
    opts = IterOptions(max_iterations=60, rel_residual_tol=1e-300)
    plain = richardson_tubular(A, B, alpha, opts=opts)
    relaxed = relax_wrap(richardson_tubular_update(A, B, alpha), A, B, opts=opts)
    k = min(plain.history.iterations, relaxed.history.iterations)
    assert relaxed.history.deltas[k] < plain.history.deltas[k]


def test_relax_wrap_propagates_breakdown():
    from tubal.problems import baart_prolate_problem
    from tubal.solvers import sd_tubular_update

    ill = baart_prolate_problem(100, seed=0)
    with pytest.raises(SingularStepError) as exc:
        relax_wrap(sd_tubular_update(ill.A, ill.B), ill.A, ill.B,
                   opts=IterOptions(max_iterations=100, rel_residual_tol=5e-3))
    assert exc.value.history is not None
    assert exc.value.history.stop_reason == "breakdown"


def test_neumann_zero_tensor():
    Z = zeros(3, 3, 4)
    for terms in (0, 3):
        S = neumann_inverse(Z, terms)
        assert frob_norm(S - identity(3, 4)) <= 1e-14


def test_neumann_geometric_series_on_diagonal_tubes(rng):
    comps = rng.uniform(-0.8, 0.8, 5)
    A = dtensor(Tube.from_fourier(comps), 3)
    terms = 25
    S = neumann_inverse(A, terms)
    expected = dtensor(Tube.from_fourier(1.0 / (1.0 - comps)), 3)
    bound = np.abs(comps).max() ** (terms + 1) / (1 - np.abs(comps).max())
    assert frob_norm(S - expected) <= 10 * bound + 1e-12


def test_neumann_partial_sum_error_bound(rng):
    A = random_tensor(rng, 4, 4, 3)
    A = (0.5 / scalar_t_spectral_radius(A)) * A
    I = identity(4, 3)
    for terms in (10, 20, 40):
        err = frob_norm(tprod(I - A, neumann_inverse(A, terms)) - I)
        # geometric tail; generous constant absorbs non-normal transients
        assert err <= 50 * 0.5 ** (terms + 1) * frob_norm(I)


def test_neumann_rejects_large_radius(rng):
    A = random_tensor(rng, 3, 3, 4)
    A = (1.2 / scalar_t_spectral_radius(A)) * A
    with pytest.raises(SpectralRadiusError):
        neumann_inverse(A, 5)


def test_step_params_record_provenance():
    sp = StepParams(0.5, "mu_one")
    assert not sp.is_tubular
    sp2 = StepParams(Tube.e1(3), "alpha_star")
    assert sp2.is_tubular


def test_track_error_column(rng):
    A, X_star, B = _system(rng)
    opts = IterOptions(max_iterations=50, rel_residual_tol=1e-8, track_error_against=X_star)
    res = richardson_tubular(A, B, alpha_star(A), opts=opts)
    assert res.history.rel_errors is not None
    assert len(res.history.rel_errors) == len(res.history.deltas)
    assert res.history.rel_errors[0] == 1.0  # zero initial guess


def test_richardson_matches_dense_fixed_point_oracle(rng):
    # the iterates coincide with the block-circulant fixed-point recursion
    # run in plain matrix arithmetic
    from tubal.core import bcirc_explicit, unfold
    from tubal.tubes import dtensor

    A, X_star, B = _system(rng, n=2, p=2)
    alpha = alpha_star(A)
    opts = IterOptions(max_iterations=25, rel_residual_tol=1e-300)
    res = richardson_tubular(A, B, alpha, opts=opts)

    bc = bcirc_explicit(A)
    d_alpha = bcirc_explicit(dtensor(alpha, 2))
    u = np.zeros((4, 1), dtype=complex)
    b = unfold(B)
    deltas = [1.0]
    for _ in range(25):
        u = u + d_alpha @ (bc.conj().T @ (b - bc @ u))
        deltas.append(np.linalg.norm(b - bc @ u) / np.linalg.norm(b))
    assert np.abs(unfold(res.X) - u).max() <= 1e-12 * max(1.0, np.abs(u).max())
    assert np.abs(np.asarray(res.history.deltas) - np.asarray(deltas)).max() <= 1e-12
    # residuals decrease monotonically with the optimal step
    assert all(b2 <= a2 + 1e-14 for a2, b2 in zip(deltas, deltas[1:]))


def test_richardson_global_step_bound(rng):
    # any scalar step below twice the inverse largest eigenvalue converges
    A, X_star, B = _system(rng)
    mu = 1.9 * mu_one(A)
    res = richardson_global(A, B, mu, opts=IterOptions(max_iterations=5000, rel_residual_tol=1e-8))
    assert res.history.stop_reason == "tol"
