"""Metaplectic Wigner distributions on the sampled phase plane.

Fields are stored over the base index grid ``(k, j)`` with base nodes
``w = (x_k, xi_j)``; a field's actual nodes are ``node_matrix @ w``.
Reference fields (``wigner_ref``) use the identity.  Fast fields
(``wigner_fast``) carry ``E_A``, so no interpolation is ever needed to
evaluate the rescaled STFT.  Cross-path comparisons happen on the nodes
the two fields share, after fixing one global unimodular constant.

Only one-dimensional signals (two-dimensional fields) are supported.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import metop, sigrid
from .errors import (
    ConditioningError,
    DimensionError,
    GridMismatchError,
    NotCovariantError,
    NotShiftInvertibleError,
    OffLatticeError,
)
from .sigrid import Grid, PhasePoint, Signal, cdft, inner
from .symplin import (
    BlockSymplectic,
    L_matrix,
    Q_matrix,
    a_hbar,
    a_st,
    a_tau,
    derived_pack,
    star,
)

NODE_MATCH_RTOL = 1e-6


@dataclass(frozen=True)
class WignerField:
    """Samples of ``W_A(f, g)`` at the nodes ``node_matrix @ (x_k, xi_j)``.

    ``values[k, j]`` belongs to base node ``(x_k, xi_j)``.
    """

    grid: Grid
    values: np.ndarray
    matrix: BlockSymplectic | None = None
    node_matrix: np.ndarray = field(default_factory=lambda: np.eye(2))
    windows: tuple = ()
    path: str = "ref"

    def __post_init__(self):
        v = np.array(self.values, dtype=complex)
        if v.shape != (self.grid.n, self.grid.n):
            raise DimensionError(f"field shape {v.shape} does not match grid n={self.grid.n}")
        v.setflags(write=False)
        E = np.array(self.node_matrix, dtype=float)
        E.setflags(write=False)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "node_matrix", E)

    @property
    def grid_xi(self) -> Grid:
        return self.grid.dual()

    @property
    def cell(self) -> float:
        """Phase-space area represented by one sample."""
        return abs(np.linalg.det(self.node_matrix)) * self.grid.delta * self.grid.dual_delta

    def base_nodes(self) -> tuple[np.ndarray, np.ndarray]:
        x = self.grid.nodes()[:, None] * np.ones((1, self.grid.n))
        xi = np.ones((self.grid.n, 1)) * self.grid.dual_nodes()[None, :]
        return x, xi

    def nodes(self) -> tuple[np.ndarray, np.ndarray]:
        """Actual node coordinates ``(X, XI)``, each ``n x n``."""
        x, xi = self.base_nodes()
        E = self.node_matrix
        return E[0, 0] * x + E[0, 1] * xi, E[1, 0] * x + E[1, 1] * xi

    def with_values(self, values) -> "WignerField":
        return WignerField(self.grid, values, self.matrix, self.node_matrix, self.windows, self.path)

    def norm(self) -> float:
        return math.sqrt(self.cell) * float(np.linalg.norm(self.values))


def field_inner(W1: WignerField, W2: WignerField) -> complex:
    """``L^2`` inner product of two fields sampled on the same nodes."""
    if W1.grid != W2.grid or not np.allclose(W1.node_matrix, W2.node_matrix):
        raise GridMismatchError("fields are sampled on different nodes")
    return complex(W1.cell * np.vdot(W2.values, W1.values))


def _check_pair(f: Signal, g: Signal):
    if f.grid != g.grid:
        raise GridMismatchError("signal and window live on different grids")
    if f.grid.d != 1:
        raise DimensionError("Wigner fields are implemented for one-dimensional signals")


def _label(s) -> str:
    return getattr(s, "label", None) or "signal"


def common_nodes(W1: WignerField, W2: WignerField):
    """Index pairs of nodes shared by two fields.

    Returns
    -------
    (idx1, idx2) : tuple of (rows, cols) index arrays into ``values``.
    """
    if W1.grid != W2.grid:
        raise GridMismatchError("fields built on different grids")
    g = W1.grid
    X, XI = W1.nodes()
    # base coordinates of W1's nodes in W2's parametrization
    Ein = np.linalg.inv(W2.node_matrix)
    bx = Ein[0, 0] * X + Ein[0, 1] * XI
    bxi = Ein[1, 0] * X + Ein[1, 1] * XI
    rk = bx / g.delta + g.n // 2
    rj = bxi / g.dual_delta + g.n // 2
    k, j = np.rint(rk), np.rint(rj)
    ok = ((np.abs(rk - k) < NODE_MATCH_RTOL) & (np.abs(rj - j) < NODE_MATCH_RTOL)
          & (k >= 0) & (k < g.n) & (j >= 0) & (j < g.n))
    i1 = np.nonzero(ok)
    return i1, (k[ok].astype(int), j[ok].astype(int))


def compare_fields(W1: WignerField, W2: WignerField, modulus: bool = False) -> dict:
    """Phase-aligned max deviation over the shared nodes.

    With ``modulus=True`` the moduli are compared instead.
    """
    i1, i2 = common_nodes(W1, W2)
    a, b = W1.values[i1], W2.values[i2]
    if modulus:
        err = float(np.max(np.abs(np.abs(a) - np.abs(b)), initial=0.0))
        c = 1.0 + 0j
    else:
        err, c = sigrid.phase_aligned_error(a, b)
    scale = float(max(np.max(np.abs(a), initial=0.0), np.max(np.abs(b), initial=0.0)))
    return {"max_error": err, "phase": c, "count": int(a.size), "scale": scale}


# ---------------------------------------------------------------- reference paths

def wigner_ref(A: BlockSymplectic, f: Signal, g: Signal, method: str = "sinc") -> WignerField:
    """``A^ (f (x) conj g)`` computed on the product grid (any ``A``)."""
    _check_pair(f, g)
    if not f.grid.self_dual:
        raise GridMismatchError("the reference path needs a self-dual grid (T^2 == n)")
    F = metop.apply_2d(A, metop.tensor(f, g), method)
    return WignerField(f.grid, F.values, A, np.eye(2), (_label(f), _label(g)), "ref")


def stft(f: Signal, g: Signal) -> WignerField:
    """``V_g f(x_k, xi_j) = <f, pi(x_k, xi_j) g>`` with one FFT per time node."""
    _check_pair(f, g)
    grid = f.grid
    n = grid.n
    m = np.arange(n)
    shift = np.arange(n) - n // 2
    idx = (m[None, :] - shift[:, None]) % n
    prod = f.values[None, :] * np.conj(g.values[idx])
    V = np.fft.fftshift(np.fft.fft(np.fft.ifftshift(prod, axes=1), axis=1), axes=1) * grid.delta
    return WignerField(grid, V, a_st(1), np.eye(2), (_label(f), _label(g)), "stft")


def _check_tau(tau: float):
    if not (0.0 <= tau <= 1.0):
        raise ValueError(f"tau must lie in [0, 1], got {tau}")


def rihaczek(f: Signal, g: Signal) -> WignerField:
    """``exp(-2 pi i x xi) f(x) conj(g^(xi))``."""
    _check_pair(f, g)
    x = f.grid.nodes()[:, None]
    xi = f.grid.dual_nodes()[None, :]
    v = np.exp(-2j * np.pi * x * xi) * f.values[:, None] * np.conj(cdft(g).values)[None, :]
    return WignerField(f.grid, v, a_tau(0.0), np.eye(2), (_label(f), _label(g)), "closed")


def conj_rihaczek(f: Signal, g: Signal) -> WignerField:
    """``exp(2 pi i x xi) f^(xi) conj(g(x))``."""
    _check_pair(f, g)
    x = f.grid.nodes()[:, None]
    xi = f.grid.dual_nodes()[None, :]
    v = np.exp(2j * np.pi * x * xi) * np.conj(g.values)[:, None] * cdft(f).values[None, :]
    return WignerField(f.grid, v, a_tau(1.0), np.eye(2), (_label(f), _label(g)), "closed")


def tau_wigner(tau: float, f: Signal, g: Signal, quadrature: bool = False) -> WignerField:
    """``int f(x + tau t) conj(g(x - (1 - tau) t)) exp(-2 pi i xi t) dt``.

    Evaluated on the signal grid: each t-shift of ``f`` and ``g`` is one
    band-limited fractional shift, then one FFT over ``t`` per ``x``.
    The endpoints use the closed Rihaczek forms unless ``quadrature``.
    """
    _check_pair(f, g)
    _check_tau(tau)
    if not quadrature and tau == 0.0:
        return rihaczek(f, g)
    if not quadrature and tau == 1.0:
        return conj_rihaczek(f, g)
    grid = f.grid
    t = grid.nodes()
    Sf = sigrid.shifted_samples(f, tau * t)
    Sg = sigrid.shifted_samples(g, -(1 - tau) * t)
    prod = Sf * np.conj(Sg)
    V = np.fft.fftshift(np.fft.fft(np.fft.ifftshift(prod, axes=1), axis=1), axes=1) * grid.delta
    return WignerField(grid, V, a_tau(tau), np.eye(2), (_label(f), _label(g)), "quadrature")


def hbar_compatible(hbar: float, tol: float = 1e-9) -> int:
    """The integer ``1/(2 pi hbar)``.

    Raises
    ------
    ValueError
        If ``1/(2 pi hbar)`` is not a positive integer.
    """
    if not hbar > 0:
        raise ValueError("hbar must be positive")
    r = 1.0 / (2 * np.pi * hbar)
    m = int(round(r))
    if m < 1 or abs(r - m) > tol * max(1.0, r):
        raise ValueError(
            f"1/(2 pi hbar) = {r!r} is not a positive integer; frequencies xi/(2 pi hbar) "
            "would leave the dual grid")
    return m


def hbar_rep(hbar: float, f: Signal, g: Signal) -> WignerField:
    """``(2 pi hbar)^{-1/2} exp(i x xi/(2 hbar)) V_g f(x, xi/(2 pi hbar))`` on the base grid.

    Needs ``1/(2 pi hbar)`` to be an integer ``m``; base frequencies that
    map beyond the dual grid (``|m xi| >= n/(2T)``) are set to zero.
    """
    _check_pair(f, g)
    m = hbar_compatible(hbar)
    h = 2 * np.pi * hbar
    V = stft(f, g).values
    n = f.grid.n
    j = (np.arange(n) - n // 2) * m + n // 2
    ok = (j >= 0) & (j < n)
    out = np.zeros((n, n), complex)
    out[:, ok] = V[:, j[ok]]
    x = f.grid.nodes()[:, None]
    xi = f.grid.dual_nodes()[None, :]
    out *= h ** -0.5 * np.exp(1j * x * xi / (2 * hbar))
    return WignerField(f.grid, out, a_hbar(hbar), np.eye(2), (_label(f), _label(g)), "closed")


# ---------------------------------------------------------------- fast path

def _shift_invertible_pack(A: BlockSymplectic):
    pack = derived_pack(A)
    if not pack.shift_invertible:
        raise NotShiftInvertibleError(
            "E_A is singular: the fast path is unavailable, use wigner_ref")
    return pack


def _phase_quadratic(Mq: np.ndarray, x: np.ndarray, xi: np.ndarray) -> np.ndarray:
    """``w.Mw`` for ``w = (x, xi)`` (d = 1)."""
    return Mq[0, 0] * x * x + (Mq[0, 1] + Mq[1, 0]) * x * xi + Mq[1, 1] * xi * xi


def wigner_fast(A: BlockSymplectic, f: Signal, g: Signal, method: str = "sinc") -> WignerField:
    """``|det E|^{-1/2} Phi_{M+L}(w) V_{delta^ g} f(w)`` at nodes ``z = E w``.

    Raises
    ------
    NotShiftInvertibleError
        If ``E_A`` is singular.
    """
    _check_pair(f, g)
    pack = _shift_invertible_pack(A)
    dg = metop.deformation(A, g, method)
    V = stft(f, dg).values
    x = f.grid.nodes()[:, None]
    xi = f.grid.dual_nodes()[None, :]
    phase = np.exp(1j * np.pi * _phase_quadratic(pack.M + L_matrix(1), x, xi))
    v = abs(pack.det_E) ** -0.5 * phase * V
    return WignerField(f.grid, v, A, pack.E, (_label(f), _label(g)), "fast")


def wigner(A: BlockSymplectic, f: Signal, g: Signal, path: str = "auto") -> WignerField:
    """Dispatch to the fast path when available, else the reference path."""
    if path == "ref":
        return wigner_ref(A, f, g)
    if path == "fast":
        return wigner_fast(A, f, g)
    if path != "auto":
        raise ValueError(f"unknown path {path!r}")
    return wigner_fast(A, f, g) if derived_pack(A).shift_invertible else wigner_ref(A, f, g)


# ---------------------------------------------------------------- atoms

def _base_point(A, z, pack) -> np.ndarray:
    z = z.vector() if isinstance(z, PhasePoint) else np.asarray(z, dtype=float).ravel()
    if z.size != 2 * A.d:
        raise DimensionError(f"phase point must have {2 * A.d} coordinates")
    return np.linalg.solve(pack.E, z)


def _check_on_grid(w: np.ndarray, grid: Grid, what: str):
    d = grid.d
    grid.index_of(w[:d], what=f"{what} (time part)")
    grid.index_of(w[d:], step=grid.dual_delta, what=f"{what} (frequency part)")


def atom(A: BlockSymplectic, z, g: Signal, method: str = "sinc") -> Signal:
    """``pi_A(z) g = |det E|^{-1/2} Phi_{-M-L}(w) pi(w) delta^ g`` with ``w = E^{-1} z``.

    Raises
    ------
    OffLatticeError
        If ``E^{-1} z`` is not a grid node.
    """
    pack = _shift_invertible_pack(A)
    w = _base_point(A, z, pack)
    _check_on_grid(w, g.grid, "E^{-1} z")
    c = abs(pack.det_E) ** -0.5 * np.exp(-1j * np.pi * w @ (pack.M + L_matrix(A.d)) @ w)
    return sigrid.tf_shift(w, metop.deformation(A, g, method)) * c


def atom_inv(A: BlockSymplectic, z, g: Signal, form: str = "explicit",
             method: str = "sinc") -> Signal:
    """Inverse of the atom operator applied to ``g``.

    ``form="explicit"`` evaluates::

        |det E|^{1/2} Phi_{M+L/2}(E^{-1}z) Phi_{L/2}(Es^{-1}z) pi(Q Es^{-1} z) delta^{-1} g

    and needs ``Q Es^{-1} z`` on the grid; ``form="direct"`` inverts the
    three factors of :func:`atom` one by one and only needs ``E^{-1} z``.
    Both agree up to a unimodular constant.
    """
    pack = _shift_invertible_pack(A)
    d = A.d
    w = _base_point(A, z, pack)
    zv = pack.E @ w
    op = metop.deformation_op(A)
    L = L_matrix(d)
    if form == "direct":
        _check_on_grid(w, g.grid, "E^{-1} z")
        c = abs(pack.det_E) ** 0.5 * np.exp(1j * np.pi * w @ (pack.M + L) @ w)
        # pi(w)^{-1} = exp(-2 pi i x.xi) pi(-w)
        c *= np.exp(-2j * np.pi * (w[:d] @ w[d:]))
        return op.apply_inverse(sigrid.tf_shift(-w, g), method) * c
    if form != "explicit":
        raise ValueError(f"unknown form {form!r}")
    u = np.linalg.solve(pack.Escript, zv)
    v = Q_matrix(d) @ u
    _check_on_grid(v, g.grid, "Q Es^{-1} z")
    c = (abs(pack.det_E) ** 0.5
         * np.exp(1j * np.pi * w @ (pack.M + L / 2) @ w)
         * np.exp(1j * np.pi * u @ (L / 2) @ u))
    return sigrid.tf_shift(v, op.apply_inverse(g, method)) * c


def atom_adj(A: BlockSymplectic, z, g: Signal, form: str = "explicit",
             method: str = "sinc") -> Signal:
    """Adjoint of the atom operator: ``|det E|^{-1}`` times its inverse."""
    pack = _shift_invertible_pack(A)
    return atom_inv(A, z, g, form, method) * (1.0 / abs(pack.det_E))


# ---------------------------------------------------------------- inversion

def inversion(A: BlockSymplectic, W: WignerField, g: Signal, gamma: Signal,
              method: str = "sinc", min_overlap: float = 1e-6) -> Signal:
    """Riemann sum ``<gamma, g>^{-1} sum_z W(z) pi_A(z) gamma`` over the field's nodes.

    Every node ``z`` must satisfy ``E^{-1} z`` on the base grid; atoms whose
    base point leaves the box are wrapped periodically.

    Raises
    ------
    ConditioningError
        If ``|<gamma, g>| <= min_overlap``.
    """
    ov = inner(gamma, g)
    if abs(ov) <= min_overlap:
        raise ConditioningError(f"|<gamma, g>| = {abs(ov):.3e} is too small for inversion")
    pack = _shift_invertible_pack(A)
    grid = gamma.grid
    n = grid.n
    X, XI = W.nodes()
    Ein = np.linalg.inv(pack.E)
    wx = Ein[0, 0] * X + Ein[0, 1] * XI
    wxi = Ein[1, 0] * X + Ein[1, 1] * XI
    kx = wx / grid.delta
    kxi = wxi / grid.dual_delta
    if (np.max(np.abs(kx - np.rint(kx))) > 1e-6 or np.max(np.abs(kxi - np.rint(kxi))) > 1e-6):
        raise OffLatticeError("field nodes do not map to grid nodes under E^{-1}")
    phase = np.exp(-1j * np.pi * _phase_quadratic(pack.M + L_matrix(1), wx, wxi))
    coef = W.values * phase
    # accumulate on the base grid: c[k, j] multiplies pi(x_k, xi_j)
    C = np.zeros((n, n), complex)
    ki = (np.rint(kx).astype(int) + n // 2) % n
    ji = (np.rint(kxi).astype(int) + n // 2) % n
    np.add.at(C, (ki, ji), coef)
    dg = metop.deformation(A, gamma, method).values
    # sum_j C[k, j] exp(2 pi i xi_j t) for every t, via one inverse FFT per k
    modsum = np.fft.fftshift(np.fft.ifft(np.fft.ifftshift(C, axes=1), axis=1), axes=1) * n
    shift = np.arange(n) - n // 2
    m = np.arange(n)
    idx = (m[None, :] - shift[:, None]) % n
    out = np.sum(modsum * dg[idx], axis=0)
    scale = abs(pack.det_E) ** -0.5 * W.cell / ov
    return Signal(grid, out * scale)


def reconstruction_error(f: Signal, ftilde: Signal) -> float:
    return (ftilde - f).norm() / f.norm()


# ---------------------------------------------------------------- covariance

def covariance_shift_check(A: BlockSymplectic, f: Signal, g: Signal, w,
                           path: str = "fast", modulus: bool = False) -> float:
    """Max deviation in ``W(pi(w) f, g) = Phi_{-M}(w) pi(E w, F w) W(f, g)``.

    On the fast path the translation by ``E w`` is a shift of base indices,
    so only ``w`` has to be on the grid.  The reference path also needs
    ``E w`` on the grid.
    """
    w = w.vector() if isinstance(w, PhasePoint) else np.asarray(w, dtype=float).ravel()
    grid = f.grid
    pack = derived_pack(A)
    Ew, Fw = pack.E @ w, pack.F @ w
    lhs_f = sigrid.tf_shift(w, f)
    if path == "fast":
        W0 = wigner_fast(A, f, g)
        W1 = wigner_fast(A, lhs_f, g)
        kx = int(grid.index_of(w[:1])[0])
        kj = int(grid.index_of(w[1:], step=grid.dual_delta)[0])
        shifted = np.roll(W0.values, (kx, kj), axis=(0, 1))
    elif path == "ref":
        W0 = wigner_ref(A, f, g)
        W1 = wigner_ref(A, lhs_f, g)
        _check_on_grid(Ew, grid, "E w")
        kx = int(grid.index_of(Ew[:1])[0])
        kj = int(grid.index_of(Ew[1:], step=grid.dual_delta)[0])
        shifted = np.roll(W0.values, (kx, kj), axis=(0, 1))
    else:
        raise ValueError(f"unknown path {path!r}")
    Z, ZI = W0.nodes()
    rhs = (np.exp(-1j * np.pi * w @ pack.M @ w)
           * np.exp(2j * np.pi * (Fw[0] * Z + Fw[1] * ZI)) * shifted)
    if modulus:
        return float(np.max(np.abs(np.abs(W1.values) - np.abs(rhs))))
    return sigrid.phase_aligned_error(W1.values, rhs)[0]


def _cdft2(v: np.ndarray, grid: Grid) -> np.ndarray:
    return np.fft.fftshift(np.fft.fft2(np.fft.ifftshift(v))) * grid.delta * grid.dual_delta


def _icdft2(v: np.ndarray, grid: Grid) -> np.ndarray:
    return np.fft.fftshift(np.fft.ifft2(np.fft.ifftshift(v))) / (grid.delta * grid.dual_delta)


def _require_covariant(A):
    pack = derived_pack(A)
    if not pack.covariant:
        raise NotCovariantError("matrix does not have the covariant block pattern")
    return pack


def cohen_kernel(A: BlockSymplectic, grid: Grid) -> WignerField:
    """``Sigma_A = F^{-1} Phi_{-B_A}`` sampled on the (self-dual) phase grid."""
    pack = _require_covariant(A)
    if not grid.self_dual:
        raise GridMismatchError("the Cohen kernel needs a self-dual grid")
    x = grid.nodes()[:, None]
    xi = grid.dual_nodes()[None, :]
    chirp = np.exp(-1j * np.pi * _phase_quadratic(pack.B, x, xi))
    return WignerField(grid, _icdft2(chirp, grid), A, np.eye(2), ("kernel",), "kernel")


def cohen_check(A: BlockSymplectic, f: Signal, g: Signal) -> float:
    """Max deviation between ``W_A(f, g)`` and ``Sigma_A * W_{1/2}(f, g)``.

    The convolution is evaluated in the Fourier domain as
    ``F^{-1}(Phi_{-B_A} . F W_{1/2})``; both fields use the reference path.
    """
    pack = _require_covariant(A)
    grid = f.grid
    Wh = wigner_ref(a_tau(0.5), f, g).values
    x = grid.nodes()[:, None]
    xi = grid.dual_nodes()[None, :]
    chirp = np.exp(-1j * np.pi * _phase_quadratic(pack.B, x, xi))
    conv = _icdft2(chirp * _cdft2(Wh, grid), grid)
    WA = wigner_ref(A, f, g).values
    return sigrid.phase_aligned_error(WA, conv)[0]


def star_check(A: BlockSymplectic, f: Signal, g: Signal) -> float:
    """Max deviation between ``W_A(g, f)`` and ``conj(W_{A*}(f, g))``."""
    lhs = wigner_ref(A, g, f).values
    rhs = np.conj(wigner_ref(star(A), f, g).values)
    return sigrid.phase_aligned_error(lhs, rhs)[0]
