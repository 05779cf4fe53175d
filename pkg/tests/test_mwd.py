import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from metagabor import mwd, sigrid, symplin as sp
from metagabor.errors import ConditioningError, NotCovariantError, NotShiftInvertibleError, OffLatticeError

PRESETS = [sp.a_st(1), sp.a_tau(0.25), sp.a_tau(0.5), sp.a_tau(0.75), sp.a_hbar(1 / (4 * np.pi))]


def tau_wigner_gaussian(tau, X, XI):
    """W_tau(g, g) for g = 2^{1/4} exp(-pi t^2), by completing the square."""
    a = tau ** 2 + (1 - tau) ** 2
    b = 2 * X * (2 * tau - 1)
    return math.sqrt(2) * np.exp(-2 * np.pi * X ** 2) / math.sqrt(a) * np.exp(
        np.pi * (b + 2j * XI) ** 2 / (4 * a))


def test_stft_of_gaussian_closed_form(gauss):
    V = mwd.stft(gauss, gauss)
    X, XI = V.nodes()
    ref = np.exp(-1j * np.pi * X * XI) * np.exp(-np.pi * (X ** 2 + XI ** 2) / 2)
    assert np.max(np.abs(V.values - ref)) < 1e-14


def test_wigner_of_gaussian_closed_form(gauss):
    W = mwd.wigner_fast(sp.a_tau(0.5), gauss, gauss)
    X, XI = W.nodes()
    assert np.max(np.abs(W.values - 2 * np.exp(-2 * np.pi * (X ** 2 + XI ** 2)))) < 1e-14


@pytest.mark.parametrize("tau", [0.25, 0.75])
def test_tau_wigner_closed_form(tau, gauss):
    W = mwd.wigner_fast(sp.a_tau(tau), gauss, gauss)
    X, XI = W.nodes()
    assert np.max(np.abs(W.values - tau_wigner_gaussian(tau, X, XI))) < 1e-8
    Wq = mwd.tau_wigner(tau, gauss, gauss)
    X, XI = Wq.nodes()
    assert np.max(np.abs(Wq.values - tau_wigner_gaussian(tau, X, XI))) < 1e-13


def test_rihaczek_closed_form(gauss):
    R = mwd.rihaczek(gauss, gauss)
    X, XI = R.nodes()
    ref = math.sqrt(2) * np.exp(-np.pi * (X ** 2 + XI ** 2)) * np.exp(-2j * np.pi * X * XI)
    assert np.max(np.abs(R.values - ref)) < 1e-14


def test_conj_rihaczek_is_conjugate_swap(hermites):
    f, g = hermites[1], hermites[2]
    assert np.allclose(mwd.conj_rihaczek(f, g).values, np.conj(mwd.rihaczek(g, f).values))


def test_tau_zero_quadrature_matches_rihaczek(hermites, gauss):
    f = hermites[2]
    a = mwd.tau_wigner(0.0, f, gauss, quadrature=True).values
    b = mwd.rihaczek(f, gauss).values
    assert np.max(np.abs(a - b)) < 1e-12


@pytest.mark.parametrize("A", PRESETS, ids=lambda A: A.label)
def test_fast_matches_reference(A, hermites, gauss):
    f = hermites[2]
    r = mwd.compare_fields(mwd.wigner_fast(A, f, gauss), mwd.wigner_ref(A, f, gauss))
    assert r["max_error"] < 1e-4 and r["count"] > 0


def test_reference_path_for_non_shift_invertible(hermites, gauss):
    A = sp.a_tau(0.0)
    W = mwd.wigner_ref(A, hermites[1], gauss)
    R = mwd.rihaczek(hermites[1], gauss)
    assert mwd.compare_fields(W, R)["max_error"] < 1e-8
    with pytest.raises(NotShiftInvertibleError):
        mwd.wigner_fast(A, hermites[1], gauss)
    assert mwd.wigner(A, hermites[1], gauss).path == "ref"


def test_hbar_representation(gauss, hermites):
    hbar = 1 / (4 * np.pi)
    assert mwd.hbar_compatible(hbar) == 2
    W = mwd.hbar_rep(hbar, hermites[1], gauss)
    fast = mwd.wigner_fast(sp.a_hbar(hbar), hermites[1], gauss)
    r = mwd.compare_fields(fast, W)
    assert r["max_error"] < 1e-12 and abs(r["phase"] - 1) < 1e-12


@pytest.mark.parametrize("quad", [(0, 0, 0, 0), (1, 0, 1, 0), (2, 3, 2, 3), (1, 2, 3, 0)])
def test_moyal(quad, hermites):
    a, b, c, d = (hermites[k] for k in quad)
    A = sp.a_tau(0.25)
    lhs = mwd.field_inner(mwd.wigner_ref(A, a, b), mwd.wigner_ref(A, c, d))
    rhs = sigrid.inner(a, c) * np.conj(sigrid.inner(b, d))
    assert abs(lhs - rhs) < 1e-10


def test_zero_signal_gives_zero_field(grid, gauss):
    assert mwd.wigner_ref(sp.a_st(1), sigrid.zeros(grid), gauss).norm() == 0.0


def _node(W, k, j):
    X, XI = W.nodes()
    return np.array([X[k, j], XI[k, j]])


@pytest.mark.parametrize("A", [sp.a_st(1), sp.a_tau(0.5), sp.a_hbar(1 / (4 * np.pi))],
                         ids=lambda A: A.label)
def test_atom_duality(A, hermites, gauss):
    f = hermites[3]
    W = mwd.wigner_fast(A, f, gauss)
    for k, j in ((128, 128), (131, 120), (100, 150)):
        z = _node(W, k, j)
        assert abs(sigrid.inner(f, mwd.atom(A, z, gauss)) - W.values[k, j]) < 1e-10


def test_atom_off_grid(gauss):
    with pytest.raises(OffLatticeError):
        mwd.atom(sp.a_st(1), (0.01, 0.0), gauss)


@pytest.mark.parametrize("form", ["direct", "explicit"])
def test_atom_inverse(form, hermites, gauss):
    A = sp.a_tau(0.5)
    W = mwd.wigner_fast(A, gauss, gauss)
    z = _node(W, 136, 124)
    f = hermites[2]
    back = mwd.atom_inv(A, z, mwd.atom(A, z, f), form=form)
    err, c = sigrid.phase_aligned_error(back.values, f.values)
    assert err < 1e-6 and abs(abs(c) - 1) < 1e-6


def test_atom_adjoint_bilinear(hermites, gauss):
    A = sp.a_tau(0.5)
    z = _node(mwd.wigner_fast(A, gauss, gauss), 140, 130)
    f, h = hermites[1], hermites[2] + 0.3j * hermites[0]
    lhs = sigrid.inner(mwd.atom(A, z, f), h)
    rhs = sigrid.inner(f, mwd.atom_adj(A, z, h, form="direct"))
    assert abs(lhs - rhs) < 1e-8


@pytest.mark.parametrize("A", [sp.a_st(1), sp.a_tau(0.5)], ids=lambda A: A.label)
def test_inversion(A, hermites, gauss):
    for k in (0, 3, 6):
        f = hermites[k]
        ft = mwd.inversion(A, mwd.wigner_fast(A, f, gauss), gauss, gauss)
        assert mwd.reconstruction_error(f, ft) < 1e-8


def test_inversion_rejects_orthogonal_windows(hermites, gauss):
    W = mwd.wigner_fast(sp.a_st(1), hermites[0], gauss)
    with pytest.raises(ConditioningError):
        mwd.inversion(sp.a_st(1), W, gauss, hermites[1])


@pytest.mark.parametrize("A", [sp.a_st(1), sp.a_tau(0.3), sp.covariant(0.3, 0.2, -0.1)],
                         ids=lambda A: A.label)
def test_covariance_shift(A, hermites, gauss):
    w = (4 * gauss.grid.delta, -3 * gauss.grid.dual_delta)
    assert mwd.covariance_shift_check(A, hermites[1], gauss, w) < 1e-6


@pytest.mark.parametrize("tau", [0.25, 0.5, 0.75])
def test_cohen_check(tau, gauss, hermites):
    assert mwd.cohen_check(sp.a_tau(tau), gauss, gauss) < 1e-3
    assert mwd.cohen_check(sp.a_tau(tau), hermites[2], gauss) < 1e-3


def test_cohen_rejects_a_st(gauss):
    with pytest.raises(NotCovariantError):
        mwd.cohen_check(sp.a_st(1), gauss, gauss)


@pytest.mark.parametrize("A", PRESETS, ids=lambda A: A.label)
def test_star(A, hermites, gauss):
    assert mwd.star_check(A, hermites[1], gauss) < 1e-4


@settings(deadline=None, max_examples=10)
@given(st.integers(0, 4), st.integers(0, 4), st.floats(-2, 2), st.floats(-2, 2))
def test_sesquilinearity_property(j, k, a, b):
    grid = sigrid.default_grid()
    f, h, g = sigrid.hermite(grid, j), sigrid.hermite(grid, k), sigrid.gaussian(grid)
    A = sp.a_tau(0.5)
    lhs = mwd.wigner_fast(A, f * a + h * (1j * b), g).values
    rhs = a * mwd.wigner_fast(A, f, g).values + 1j * b * mwd.wigner_fast(A, h, g).values
    assert np.max(np.abs(lhs - rhs)) < 1e-12
