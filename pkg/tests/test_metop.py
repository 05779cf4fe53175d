import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from metagabor import metop, sigrid, symplin as sp
from metagabor.errors import GridMismatchError, NotShiftInvertibleError
from metagabor.sigrid import Grid, Signal

PRESETS = [sp.a_st(1), sp.a_tau(0.25), sp.a_tau(0.5), sp.a_tau(0.75), sp.a_hbar(1 / (4 * np.pi))]


def test_chirp_lower_zero_is_identity(gauss):
    out = metop.apply_factor(sp.ChirpLower(0.0), gauss)
    assert np.array_equal(out.values, gauss.values)


def test_fourier_factor_on_gaussian(grid):
    g = sigrid.from_function(lambda t: np.exp(-np.pi * t ** 2), grid)
    out = metop.apply_factor(sp.FourierJ(1), g)
    assert sigrid.distance(out, g) < 1e-12


def test_dilation_factor(grid):
    g = sigrid.from_function(lambda t: np.exp(-np.pi * t ** 2), grid)
    out = metop.apply_factor(sp.Dilation(2.0), g)
    ref = np.sqrt(2) * np.exp(-np.pi * (2 * grid.nodes()) ** 2)
    assert np.max(np.abs(out.values - ref)) < 1e-6


def test_identity_and_J(hermites):
    f = hermites[2]
    assert sigrid.distance(metop.apply(np.eye(2), f), f) == 0.0
    assert sigrid.distance(metop.apply(sp.std_J(1), f), sigrid.cdft(f)) < 1e-14


def test_apply_inverse_roundtrip(hermites):
    S = sp.product([sp.ChirpUpper(0.5), sp.FourierJ(1), sp.Dilation(0.75)])
    f = hermites[1]
    assert sigrid.distance(metop.apply_inverse(S, metop.apply(S, f)), f) < 1e-10


def test_fft_factors_need_self_dual_grid():
    g = sigrid.gaussian(Grid(1, 64, 4.0))
    with pytest.raises(GridMismatchError):
        metop.apply(sp.std_J(1), g)


def test_intertwining(grid, hermites):
    # S^ pi(z) f = c(z) pi(Sz) S^ f with |c(z)| = 1
    S = sp.product([sp.ChirpLower(1.0), sp.FourierJ(1)])
    f = hermites[1]
    Sf = metop.apply(S, f)
    rng = np.random.default_rng(0)
    for _ in range(10):
        k, j = rng.integers(-16, 17, size=2)
        z = np.array([k * grid.delta, j * grid.dual_delta])
        lhs = metop.apply(S, sigrid.tf_shift(z, f))
        rhs = sigrid.tf_shift(S @ z, Sf)
        err, c = sigrid.phase_aligned_error(lhs.values, rhs.values)
        assert err < 1e-10 and abs(abs(c) - 1) < 1e-10


def test_tensor(grid, hermites):
    f, g = hermites[1], hermites[2]
    F = metop.tensor(f, g)
    assert F.norm() == pytest.approx(f.norm() * g.norm())
    ones = Signal(grid, np.ones(grid.n))
    R = metop.tensor(f, ones)
    assert np.array_equal(R.values, np.repeat(f.values[:, None], grid.n, axis=1))
    G0 = metop.tensor(hermites[0], hermites[0]).values
    assert np.allclose(G0, np.conj(G0.T))


def test_apply_2d_partial_fourier(grid, hermites):
    F = metop.tensor(hermites[1], hermites[0])
    out = metop.apply_2d(sp.a_ft2(1), F)
    ref = sigrid.cdft(F, axes=[1])
    err, c = sigrid.phase_aligned_error(out.values, ref.values)
    assert err < 1e-12


def test_apply_2d_unitary(hermites):
    F = metop.tensor(hermites[2], hermites[0])
    for A in PRESETS:
        assert metop.apply_2d(A, F).norm() == pytest.approx(F.norm(), abs=1e-6)


@pytest.mark.parametrize("A", PRESETS, ids=lambda A: A.label)
def test_deformation_projection_and_unitarity(A, gauss):
    op = metop.deformation_op(A)
    assert np.max(np.abs(op.matrix() - sp.derived_pack(A).delta)) < 1e-8
    assert metop.deformation(A, gauss).norm() == pytest.approx(1.0, abs=1e-6)


def test_deformation_rejects_singular_E(gauss):
    with pytest.raises(NotShiftInvertibleError):
        metop.deformation(sp.a_tau(0.0), gauss)


def test_chirp_fourier_constant():
    # |cdft(Phi_C)| = |C|^{-1/2} on the band, phase exp(i pi sgn(C) / 4)
    for C in (2.0, -2.0, 1.5):
        r = metop.chirp_ft_measurement(C)
        assert r["flatness"] < 0.05
        assert r["abs_constant"] == pytest.approx(abs(C) ** -0.5, rel=1e-3)
        assert abs(np.angle(r["constant"]) - np.sign(C) * np.pi / 4) < 1e-3
        assert r["exponent"] == pytest.approx(-0.5, abs=1e-3)
    r = metop.chirp_ft_measurement(1.0)
    assert not r["tapered"] and r["flatness"] < 1e-12


@settings(deadline=None, max_examples=20)
@given(st.floats(0.6, 1.6), st.floats(-0.8, 0.8))
def test_norm_preserved_property(a, c):
    g = sigrid.gaussian(sigrid.default_grid())
    S = sp.product([sp.Dilation(a), sp.ChirpLower(c), sp.FourierJ(1)])
    assert metop.apply(S, g).norm() == pytest.approx(1.0, abs=1e-6)
