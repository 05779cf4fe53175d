import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from metagabor import sigrid
from metagabor.errors import GridMismatchError, OffLatticeError
from metagabor.sigrid import Grid, Signal

from conftest import gaussian_values


def test_default_grid_is_self_dual(grid):
    assert (grid.n, grid.T, grid.delta) == (256, 16.0, 1 / 16)
    assert grid.self_dual and grid.dual_delta == 1 / 16


def test_nodes_are_centred(grid):
    t = grid.nodes()
    assert t[0] == -8.0 and t[128] == 0.0 and t[-1] == 8 - 1 / 16


def test_odd_n_rejected():
    with pytest.raises(ValueError):
        Grid(1, 7, 2.0)


def test_gaussian_unit_norm(gauss):
    assert gauss.norm() == pytest.approx(1.0, abs=1e-14)


def test_hermite_orthonormal(hermites):
    G = np.array([[sigrid.inner(a, b) for b in hermites] for a in hermites])
    assert np.max(np.abs(G - np.eye(9))) < 1e-12


def test_cdft_of_gaussian_is_gaussian(grid):
    g = sigrid.from_function(lambda t: np.exp(-np.pi * t ** 2), grid)
    assert sigrid.distance(sigrid.cdft(g), g) < 1e-12


def test_cdft_of_hermite_eigenvalue(grid):
    # h_k is an eigenfunction of F with eigenvalue (-i)^k
    for k in range(5):
        h = sigrid.hermite(grid, k)
        assert sigrid.distance(sigrid.cdft(h), h * (-1j) ** k) < 1e-10


def test_icdft_inverts(grid, hermites):
    f = hermites[3] + hermites[1] * 0.5j
    assert sigrid.distance(sigrid.icdft(sigrid.cdft(f)), f) < 1e-14


def test_tf_shift_is_exact_translation_and_modulation(grid, gauss):
    x, xi = 0.5, 0.25
    out = sigrid.tf_shift((x, xi), gauss)
    t = grid.nodes()
    ref = np.exp(2j * np.pi * xi * t) * gaussian_values(t - x)
    assert np.max(np.abs(out.values - ref)) < 1e-15


def test_off_grid_shift_is_an_error(gauss):
    with pytest.raises(OffLatticeError):
        sigrid.tf_shift((0.01, 0.0), gauss)


def test_resample_dilation_by_two(grid):
    g = sigrid.from_function(lambda t: np.exp(-np.pi * t ** 2), grid)
    out = sigrid.resample(g, 2.0)
    assert np.max(np.abs(out.values - np.exp(-np.pi * (2 * grid.nodes()) ** 2))) < 1e-6


@pytest.mark.parametrize("method,tol", [("sinc", 1e-10), ("linear", 5e-3), ("nearest", 0.2)])
def test_resample_methods(grid, method, tol):
    g = sigrid.from_function(lambda t: np.exp(-np.pi * t ** 2), grid)
    out = sigrid.resample(g, 0.7, method=method)
    ref = np.exp(-np.pi * (0.7 * grid.nodes()) ** 2)
    assert np.max(np.abs(out.values - ref)) < tol


def test_resample_periodic_extension_wraps(grid):
    g = sigrid.from_function(lambda t: np.exp(-np.pi * (t - 6) ** 2), grid)
    zero = sigrid.resample(g, 2.0)
    wrap = sigrid.resample(g, 2.0, extension="periodic")
    # f(2t) at t = -5 reads f(-10), which only the periodic model wraps to f(6)
    k = grid.index_of([-5.0])[0] + grid.n // 2
    assert abs(zero.values[k]) < 1e-12 and abs(wrap.values[k] - 1) < 1e-6


def test_resample_2d_shear_matches_closed_form():
    G = Grid(2, 32, math.sqrt(32))
    X, Y = G.mesh()
    f = Signal(G, np.exp(-np.pi * (X ** 2 + Y ** 2)))
    E = np.array([[1.0, 0.5], [0.0, 1.0]])
    out = sigrid.resample(f, E)
    u, v = X + 0.5 * Y, Y
    assert np.max(np.abs(out.values - np.exp(-np.pi * (u ** 2 + v ** 2)))) < 1e-6


def test_chirp_signal(grid):
    c = sigrid.chirp_signal(0.5, grid)
    assert np.allclose(c.values, np.exp(1j * np.pi * 0.5 * grid.nodes() ** 2))


def test_smooth_taper_profile():
    t = np.array([0.0, 2.0, 2.5, 3.0, 3.95, 4.0])
    w = sigrid.smooth_taper(t, 2.0, 3.95)
    assert w[0] == w[1] == 1.0 and w[-1] == w[-2] == 0.0
    assert 0 < w[3] < w[2] < 1


def test_parse_signal(grid):
    assert sigrid.parse_signal("hermite:2", grid).norm() == pytest.approx(1.0)
    assert sigrid.parse_signal("zero", grid).norm() == 0.0
    with pytest.raises(ValueError):
        sigrid.parse_signal("bogus", grid)


def test_characteristic_norm(grid):
    # closed interval [-1, 1] holds 33 nodes of step 1/16
    assert sigrid.characteristic(grid).norm() ** 2 == pytest.approx(33 / 16)


def test_grid_mismatch(grid):
    other = Grid(1, 64, 8.0)
    with pytest.raises(GridMismatchError):
        sigrid.inner(sigrid.gaussian(grid), sigrid.gaussian(other))


def test_phase_aligned_error_removes_constant(hermites):
    a = hermites[2].values
    err, c = sigrid.phase_aligned_error(a * np.exp(0.7j), a)
    assert err < 1e-15 and abs(c - np.exp(0.7j)) < 1e-14


@settings(deadline=None, max_examples=30)
@given(st.integers(-40, 40), st.integers(-40, 40))
def test_tf_shift_is_unitary(k, j):
    grid = sigrid.default_grid()
    f = sigrid.hermite(grid, 3)
    out = sigrid.tf_shift((k * grid.delta, j * grid.dual_delta), f)
    assert out.norm() == pytest.approx(1.0, abs=1e-12)


@settings(deadline=None, max_examples=30)
@given(st.floats(0.6, 1.6))
def test_dilation_preserves_norm(a):
    grid = sigrid.default_grid()
    g = sigrid.gaussian(grid)
    assert (sigrid.resample(g, a) * math.sqrt(a)).norm() == pytest.approx(1.0, abs=1e-8)
