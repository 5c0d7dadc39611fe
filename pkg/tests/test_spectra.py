import numpy as np
import pytest

from tubal import Tensor3, Tube, identity, tprod, ttranspose, zeros
from tubal.core import bcirc_explicit, bilinear, frob_norm
from tubal.spectra import (
    aligned_eigenpairs,
    eig_from_selection,
    eigenmatrix_to_eigentensor,
    eigenpairs_to_csv,
    eigentensor_to_eigenmatrix,
    eigentuple_to_tube,
    enumerate_eigenpairs,
    hermitian_ordered_spectrum,
    inequality_report,
    is_hermitian_tensor,
    is_positive_definite,
    kantorovich_slack,
    rayleigh_slack,
    scalar_t_spectral_radius,
    slice_spectra,
    spectrum_to_csv,
    t_eigenvalues,
    t_linear_independent,
    tube_to_eigentuple,
    tubular_spectral_radius,
    weyl_slack,
)
from tubal.tubes import NotHermitianError, circ_matrix, dtensor, is_hpd_tube, tube_inverse
from tubal.verify import (
    random_hermitian,
    random_hermitian_tube,
    random_hpd,
    random_hpd_tube,
    random_tensor,
    random_tube,
)

from conftest import rel_err


def test_slice_spectra_identity():
    spec = slice_spectra(identity(3, 4))
    assert spec.hermitian
    assert np.allclose(spec.values.real, 1.0, atol=1e-12)


def test_slice_spectra_of_diagonal_tube_tensor(rng):
    v = random_hermitian_tube(rng, 5)
    spec = slice_spectra(dtensor(v, 3))
    for j in range(5):
        assert np.allclose(spec.values[j], v.fourier[j].real, atol=1e-10)


def test_t_eigenvalues_match_bcirc(rng):
    A = random_tensor(rng, 3, 3, 2)
    mine = np.sort_complex(t_eigenvalues(A))
    dense = np.sort_complex(np.linalg.eigvals(bcirc_explicit(A)))
    assert np.abs(mine - dense).max() <= 1e-8 * max(1.0, np.abs(dense).max())
    assert np.allclose(t_eigenvalues(identity(4, 3)), np.ones(12), atol=1e-12)
    v = random_tube(rng, 6)
    assert np.allclose(
        np.sort_complex(t_eigenvalues(v.as_tensor())), np.sort_complex(v.fourier), atol=1e-10
    )


def test_eig_from_selection_identity():
    pair = eig_from_selection(identity(3, 4), (0, 0, 0, 0))
    assert np.allclose(pair.lam.v, Tube.e1(4).v, atol=1e-12)
    assert pair.residual <= 1e-12


def test_eig_from_selection_hermitian(rng):
    A = random_hermitian(rng, 2, 2)
    spec = slice_spectra(A)
    pair = eig_from_selection(A, (0, 0), spec)
    assert np.allclose(pair.lam.fourier.real, spec.values[:, 0].real, atol=1e-12)
    assert pair.residual <= 1e-8 * frob_norm(A) * frob_norm(pair.X)


def test_eig_from_selection_fdiagonal(rng):
    # an F-diagonal tensor's aligned tubes are its diagonal tubes, per-slice sorted
    p = 4
    tubes = [random_hermitian_tube(rng, p) for _ in range(3)]
    data = np.zeros((3, 3, p), dtype=complex)
    for i, t in enumerate(tubes):
        data[i, i, :] = t.v
    A = Tensor3(data)
    pairs = aligned_eigenpairs(A)
    got = np.sort(np.stack([pr.lam.fourier.real for pr in pairs]), axis=0)
    want = np.sort(np.stack([t.fourier.real for t in tubes]), axis=0)
    assert np.abs(got - want).max() <= 1e-10


def test_selection_validation(rng):
    A = random_tensor(rng, 2, 2, 3)
    with pytest.raises(IndexError):
        eig_from_selection(A, (0, 5, 0))
    with pytest.raises(ValueError):
        eig_from_selection(A, (0, 0))


def test_defective_slice_warns():
    data = np.zeros((2, 2, 1))
    data[:, :, 0] = [[0.0, 1.0], [0.0, 0.0]]  # a Jordan block in the only slice
    A = Tensor3(data)
    with pytest.warns(RuntimeWarning, match="defective"):
        eig_from_selection(A, (0,))


def test_enumeration(rng):
    A = random_tensor(rng, 2, 2, 3)
    pairs = list(enumerate_eigenpairs(A))
    assert len(pairs) == 2**3
    sels = {pr.selection for pr in pairs}
    assert len(sels) == 8
    big = random_tensor(rng, 4, 4, 7)  # 4^7 = 16384 > 4096
    with pytest.raises(ValueError, match="enumeration limit"):
        list(enumerate_eigenpairs(big))


def test_hermitian_ordered_spectrum(rng):
    dec = hermitian_ordered_spectrum(identity(3, 4))
    for pair in dec.pairs:
        assert np.allclose(pair.lam.v, Tube.e1(4).v, atol=1e-12)
    v = random_hpd_tube(rng, 4)
    dec2 = hermitian_ordered_spectrum(dtensor(v, 3))
    for pair in dec2.pairs:
        assert np.abs(pair.lam.fourier - v.fourier.real).max() <= 1e-10
    A = random_hermitian(rng, 3, 3)
    dec3 = hermitian_ordered_spectrum(A)
    recon = tprod(tprod(ttranspose(dec3.Q), dec3.D), dec3.Q)
    assert rel_err(recon.data, A.data) <= 1e-10
    comps = np.stack([pr.lam.fourier.real for pr in dec3.pairs])
    assert (comps[:-1] <= comps[1:] + 1e-12).all()
    with pytest.raises(NotHermitianError):
        hermitian_ordered_spectrum(random_tensor(rng, 3, 3, 2))


def test_tubular_spectral_radius(rng):
    r = tubular_spectral_radius(identity(3, 4))
    assert np.allclose(r.fourier.real, 1.0, atol=1e-12)
    assert np.allclose(r.v, Tube.e1(4).v, atol=1e-12)
    v = random_tube(rng, 5)
    rv = tubular_spectral_radius(v.as_tensor())
    assert np.abs(rv.fourier - np.abs(v.fourier)).max() <= 1e-10
    assert is_hpd_tube(rv) or np.abs(v.fourier).min() == 0.0
    assert abs(scalar_t_spectral_radius(v.as_tensor()) - np.abs(v.fourier).max()) <= 1e-10


def test_scalar_radius_matches_bcirc(rng):
    A = random_tensor(rng, 3, 3, 4)
    dense = np.abs(np.linalg.eigvals(bcirc_explicit(A))).max()
    assert abs(scalar_t_spectral_radius(A) - dense) <= 1e-8 * dense


def test_eigentuple_conversion():
    assert np.allclose(tube_to_eigentuple(Tube.e1(4)), Tube.e1(4).v)
    lam = Tube([1.0, 2.0, 3.0])
    assert np.allclose(tube_to_eigentuple(lam), [1.0, 3.0, 2.0])
    rt = eigentuple_to_tube(tube_to_eigentuple(lam))
    assert np.array_equal(rt.v, lam.v)


def test_eigentuple_satisfies_matrix_relation(rng):
    # the converted pair satisfies  A *_m X = X circ(d)
    A = random_tensor(rng, 3, 3, 4)
    pair = aligned_eigenpairs(A)[1]
    d = tube_to_eigentuple(pair.lam)
    X = eigentensor_to_eigenmatrix(pair.X)
    lhs = eigentensor_to_eigenmatrix(tprod(A, pair.X))
    rhs = X @ circ_matrix(Tube(d))
    assert np.abs(lhs - rhs).max() <= 1e-8 * max(1.0, np.abs(rhs).max())
    back = eigenmatrix_to_eigentensor(X)
    assert np.array_equal(back.data, pair.X.data)


def test_t_linear_independence(rng):
    X = random_tensor(rng, 3, 1, 4)
    ok, bad = t_linear_independent([X])
    assert ok and bad is None
    a = random_tube(rng, 4)
    dep, slice_idx = t_linear_independent([X, tprod(X, a.as_tensor())])
    assert not dep and slice_idx == 0
    with pytest.raises(ValueError):
        t_linear_independent([X] * 5)


def test_eigentensors_of_distinct_eigenvalues_independent(rng):
    # pairwise nonsingular eigenvalue differences imply T-linear independence
    for _ in range(10):
        A = random_hermitian(rng, 3, 3)
        pairs = aligned_eigenpairs(A)
        diffs_ok = True
        for i in range(3):
            for j in range(i + 1, 3):
                try:
                    tube_inverse(pairs[i].lam - pairs[j].lam)
                except Exception:
                    diffs_ok = False
        if diffs_ok:
            ok, _ = t_linear_independent([pr.X for pr in pairs])
            assert ok


def test_gram_criterion_with_planted_zero_slice(rng):
    X = random_tensor(rng, 3, 1, 4)
    f = np.array(X.fourier)
    f[2] = 0.0  # plant a zero Fourier-slice vector
    Xz = Tensor3.from_fourier_stack(f)
    gram = bilinear(Xz, Xz)
    assert np.abs(gram.fourier[2]) <= 1e-12
    ok, bad = t_linear_independent([Xz])
    assert not ok and bad == 2
    # a tube supported on that slice annihilates X
    ahat = np.zeros(4, dtype=complex)
    ahat[2] = 1.0
    a = Tube.from_fourier(ahat)
    assert frob_norm(tprod(Xz, a.as_tensor())) <= 1e-12 * frob_norm(Xz)


def test_commuted_spectra(rng):
    A = random_tensor(rng, 3, 3, 3)
    B = random_tensor(rng, 3, 3, 3)
    sa = slice_spectra(tprod(A, B)).values
    sb = slice_spectra(tprod(B, A)).values
    scale = max(1.0, float(np.abs(sa).max()))
    for j in range(3):
        x = np.sort_complex(sa[j])
        y = np.sort_complex(sb[j])
        assert np.abs(x - y).max() <= 1e-8 * scale


def test_positive_definiteness_routes(rng):
    for _ in range(30):
        n, p = int(rng.integers(1, 5)), int(rng.integers(1, 5))
        A = random_hpd(rng, n, p) if rng.uniform() < 0.5 else random_hermitian(rng, n, p)
        by_slices = is_positive_definite(A)
        by_tubes = all(is_hpd_tube(pr.lam) for pr in aligned_eigenpairs(A))
        assert by_slices == by_tubes
        if by_slices:
            for _probe in range(5):
                X = random_tensor(rng, n, 1, p)
                assert bilinear(X, tprod(A, X)).first().real > 0
    with pytest.raises(NotHermitianError):
        is_positive_definite(random_tensor(rng, 3, 3, 2))


def test_weyl_identity_case():
    I = identity(3, 4)
    assert weyl_slack(I, I) >= -1e-12
    # aligned eigenvalues of I + I are exactly 2
    vals = slice_spectra(identity(3, 4) + identity(3, 4)).values.real
    assert np.allclose(vals, 2.0, atol=1e-12)


def test_kantorovich_single_direction_is_tight(rng):
    # n = 1: the single eigendirection makes both sides equal
    v = random_hpd_tube(rng, 4)
    A = dtensor(v, 1)
    X = random_tensor(rng, 1, 1, 4)
    slack = kantorovich_slack(A, X)
    assert abs(slack) <= 1e-10


def test_rayleigh_slack_positive(rng):
    A = random_hermitian(rng, 4, 3)
    X = random_tensor(rng, 4, 1, 3)
    assert rayleigh_slack(A, X) >= -1e-10


def test_inequality_report_names_violations(rng):
    A = random_hermitian(rng, 3, 3)
    B = random_hermitian(rng, 3, 3)
    X = random_tensor(rng, 3, 1, 3)
    rep = inequality_report(A, B=B, X=X)
    assert isinstance(rep["weyl"], float)
    # a generic Hermitian A is not negative definite: named violation
    assert "precondition violated" in rep["product_bounds"]
    assert isinstance(rep["rayleigh"], float)
    assert "precondition violated" in rep["kantorovich"]  # A is not PD
    P = random_hpd(rng, 3, 3)
    rep2 = inequality_report(P, X=X)
    assert rep2["kantorovich"] >= -1e-10


def test_csv_dumps(tmp_path, rng):
    A = random_tensor(rng, 2, 2, 3)
    spec = slice_spectra(A)
    f1 = tmp_path / "spectrum.csv"
    spectrum_to_csv(spec, f1)
    lines = f1.read_text().strip().splitlines()
    assert lines[0] == "slice,index,re,im"
    assert len(lines) == 1 + 2 * 3
    pairs = aligned_eigenpairs(A, spec)
    f2 = tmp_path / "pairs.csv"
    eigenpairs_to_csv(pairs, f2)
    lines = f2.read_text().strip().splitlines()
    assert lines[0] == "selection,entry,re,im"
    assert len(lines) == 1 + 2 * 3


def test_is_hermitian_tensor(rng):
    H = random_hermitian(rng, 3, 4)
    assert is_hermitian_tensor(H)
    assert not is_hermitian_tensor(random_tensor(rng, 3, 3, 4))
    assert not is_hermitian_tensor(random_tensor(rng, 3, 2, 4))
    assert is_hermitian_tensor(zeros(2, 2, 2))
