"""Centered uniform grids and sampled signals.

A :class:`Grid` with ``n`` samples per axis and extent ``T`` has spacing
``delta = T/n``, nodes ``x_k = (k - n/2) delta`` and dual nodes
``xi_j = (j - n/2)/T``.  Everything is periodized: translations wrap and
the centred DFT is the finite model of the Fourier transform

    F(xi_j) = delta^d sum_k f(x_k) exp(-2 pi i xi_j . x_k).

When ``T**2 == n`` the grid is self-dual (``delta == 1/T``) and time and
frequency nodes coincide.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import ndimage

from .errors import DimensionError, GridMismatchError, OffLatticeError

ON_GRID_TOL = 1e-9


@dataclass(frozen=True)
class Grid:
    """Centered uniform grid on ``[-T/2, T/2)^d`` with ``n`` nodes per axis."""

    d: int
    n: int
    T: float

    def __post_init__(self):
        if self.d < 1:
            raise DimensionError("grid dimension must be positive")
        if self.n < 2 or self.n % 2:
            raise DimensionError(f"n must be even and >= 2, got {self.n}")
        if not (self.T > 0 and math.isfinite(self.T)):
            raise DimensionError(f"extent must be positive, got {self.T}")
        object.__setattr__(self, "T", float(self.T))

    @property
    def delta(self) -> float:
        return self.T / self.n

    @property
    def dual_delta(self) -> float:
        return 1.0 / self.T

    @property
    def shape(self) -> tuple:
        return (self.n,) * self.d

    @property
    def size(self) -> int:
        return self.n ** self.d

    def nodes(self) -> np.ndarray:
        """One-dimensional node vector ``x_k``."""
        return (np.arange(self.n) - self.n // 2) * self.delta

    def dual_nodes(self) -> np.ndarray:
        return (np.arange(self.n) - self.n // 2) / self.T

    def dual(self) -> "Grid":
        """Frequency grid: spacing ``1/T``, extent ``n/T``."""
        return Grid(self.d, self.n, self.n / self.T)

    def mesh(self) -> list[np.ndarray]:
        """Broadcastable coordinate arrays for each axis."""
        x = self.nodes()
        out = []
        for ax in range(self.d):
            shape = [1] * self.d
            shape[ax] = self.n
            out.append(x.reshape(shape))
        return out

    @property
    def self_dual(self) -> bool:
        return abs(self.T * self.T - self.n) <= 1e-9 * self.n

    def product(self) -> "Grid":
        """Grid of twice the dimension (for tensors and phase-space fields)."""
        return Grid(2 * self.d, self.n, self.T)

    def index_of(self, x, step: float | None = None, what: str = "point") -> np.ndarray:
        """Integer node offsets ``x/step`` (default step ``delta``).

        Raises
        ------
        OffLatticeError
            If some coordinate is not an integer multiple of ``step``.
        """
        step = self.delta if step is None else step
        x = np.atleast_1d(np.asarray(x, dtype=float))
        r = x / step
        k = np.rint(r)
        if np.any(np.abs(r - k) > ON_GRID_TOL * np.maximum(1.0, np.abs(r))):
            raise OffLatticeError(f"{what} {x.tolist()} is not on the grid (step {step})",
                                  point=x.tolist())
        return k.astype(int)


def default_grid() -> Grid:
    return Grid(1, 256, 16.0)


@dataclass(frozen=True)
class PhasePoint:
    """Phase-space point ``z = (x, xi)``."""

    x: np.ndarray
    xi: np.ndarray

    def __init__(self, x, xi):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        xi = np.atleast_1d(np.asarray(xi, dtype=float))
        if x.shape != xi.shape or x.ndim != 1:
            raise DimensionError("x and xi must be vectors of equal length")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(xi))):
            raise ValueError("phase point must be finite")
        x.setflags(write=False)
        xi.setflags(write=False)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "xi", xi)

    @classmethod
    def from_vector(cls, z) -> "PhasePoint":
        z = np.asarray(z, dtype=float).ravel()
        d = z.size // 2
        return cls(z[:d], z[d:])

    def vector(self) -> np.ndarray:
        return np.r_[self.x, self.xi]

    @property
    def d(self) -> int:
        return self.x.size


@dataclass(frozen=True)
class Signal:
    """Complex samples on a :class:`Grid`, stored with shape ``(n,)*d``."""

    grid: Grid
    values: np.ndarray

    def __init__(self, grid: Grid, values):
        v = np.array(values, dtype=complex)
        if v.shape != grid.shape:
            if v.size == grid.size:
                v = v.reshape(grid.shape)
            else:
                raise DimensionError(f"values of shape {v.shape} do not fit grid {grid.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("signal has non-finite samples")
        v.setflags(write=False)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", v)

    def flat(self) -> np.ndarray:
        return self.values.ravel()

    def norm(self) -> float:
        return math.sqrt(self.grid.delta ** self.grid.d) * float(np.linalg.norm(self.values))

    def with_values(self, values) -> "Signal":
        return Signal(self.grid, values)

    def __add__(self, other: "Signal") -> "Signal":
        _same_grid(self, other)
        return Signal(self.grid, self.values + other.values)

    def __sub__(self, other: "Signal") -> "Signal":
        _same_grid(self, other)
        return Signal(self.grid, self.values - other.values)

    def __mul__(self, c) -> "Signal":
        return Signal(self.grid, self.values * c)

    __rmul__ = __mul__

    def __neg__(self) -> "Signal":
        return Signal(self.grid, -self.values)


def _same_grid(f: Signal, g: Signal):
    if f.grid != g.grid:
        raise GridMismatchError(f"grids differ: {f.grid} vs {g.grid}")


def inner(f: Signal, g: Signal) -> complex:
    """``delta^d sum f conj(g)`` (linear in the first slot)."""
    _same_grid(f, g)
    return complex(f.grid.delta ** f.grid.d * np.vdot(g.values, f.values))


def distance(f: Signal, g: Signal) -> float:
    return (f - g).norm()


def phase_aligned_error(a, b) -> tuple[float, complex]:
    """Max deviation between ``a`` and ``c b`` for the best unimodular ``c``.

    ``c`` is the normalized inner product of the two arrays.
    """
    a = np.asarray(getattr(a, "values", a))
    b = np.asarray(getattr(b, "values", b))
    ip = np.vdot(b, a)
    c = ip / abs(ip) if abs(ip) > 0 else 1.0
    return float(np.max(np.abs(a - c * b), initial=0.0)), complex(c)


# ---------------------------------------------------------------- elementary signals

def chirp_signal(C, grid: Grid) -> Signal:
    """Samples of ``Phi_C(t) = exp(pi i t.Ct)``."""
    C = np.atleast_2d(np.asarray(C, dtype=float))
    if C.shape != (grid.d, grid.d):
        raise DimensionError(f"chirp matrix must be {grid.d}x{grid.d}")
    if np.max(np.abs(C - C.T)) > 1e-12 * max(1.0, np.max(np.abs(C))):
        raise ValueError("chirp matrix must be symmetric")
    return Signal(grid, np.exp(1j * np.pi * quadratic_form(C, grid)))


def quadratic_form(C, grid: Grid) -> np.ndarray:
    """``t.Ct`` evaluated at every node."""
    C = np.atleast_2d(np.asarray(C, dtype=float))
    mesh = grid.mesh()
    out = np.zeros(grid.shape)
    for a in range(grid.d):
        for b in range(grid.d):
            if C[a, b]:
                out = out + C[a, b] * mesh[a] * mesh[b]
    return out


def from_function(fn: Callable, grid: Grid) -> Signal:
    """Sample ``fn`` (called with one coordinate array per axis)."""
    mesh = np.meshgrid(*([grid.nodes()] * grid.d), indexing="ij")
    return Signal(grid, fn(*mesh))


def gaussian(grid: Grid, sigma: float = 1.0, normalized: bool = True) -> Signal:
    """``exp(-pi |t|^2/sigma^2)``, optionally scaled to unit continuum norm."""
    r2 = sum(m ** 2 for m in grid.mesh())
    v = np.exp(-np.pi * r2 / sigma ** 2) * np.ones(grid.shape)
    if normalized:
        v = v * (2 ** 0.25 / math.sqrt(sigma)) ** grid.d
    return Signal(grid, v)


def hermite_values(k: int, t: np.ndarray) -> np.ndarray:
    """L2-normalized Hermite function ``h_k`` adapted to ``exp(-pi t^2)``."""
    if k < 0:
        raise ValueError("Hermite index must be non-negative")
    u = math.sqrt(2 * math.pi) * t
    prev = np.zeros_like(t)
    cur = 2 ** 0.25 * np.exp(-np.pi * t ** 2)
    for j in range(k):
        prev, cur = cur, math.sqrt(2 / (j + 1)) * u * cur - math.sqrt(j / (j + 1)) * prev
    return cur


def hermite(grid: Grid, k: int) -> Signal:
    """Hermite function of order ``k`` (a tensor power for ``d > 1``)."""
    v = np.ones(grid.shape)
    for m in grid.mesh():
        v = v * hermite_values(k, m)
    return Signal(grid, v)


def chirped_gaussian(grid: Grid, c: float, sigma: float = 1.0) -> Signal:
    """Normalized Gaussian times ``exp(pi i c |t|^2)``."""
    g = gaussian(grid, sigma)
    return Signal(grid, g.values * chirp_signal(c * np.eye(grid.d), grid).values)


def characteristic(grid: Grid, interval: tuple[float, float] = (-1.0, 1.0)) -> Signal:
    """Indicator of ``interval`` along every axis."""
    lo, hi = interval
    v = np.ones(grid.shape)
    for m in grid.mesh():
        v = v * ((m >= lo) & (m <= hi))
    return Signal(grid, v)


def smooth_taper(t, plateau: float, support: float) -> np.ndarray:
    """C-infinity cutoff: 1 on ``|t| <= plateau``, 0 on ``|t| >= support``."""
    if not 0 <= plateau < support:
        raise ValueError("need 0 <= plateau < support")

    def bump(u):
        u = np.asarray(u, dtype=float)
        out = np.zeros_like(u)
        pos = u > 0
        out[pos] = np.exp(-1.0 / u[pos])
        return out

    s = np.clip((np.abs(np.asarray(t, dtype=float)) - plateau) / (support - plateau), 0.0, 1.0)
    return bump(1 - s) / (bump(1 - s) + bump(s))


def zeros(grid: Grid) -> Signal:
    return Signal(grid, np.zeros(grid.shape))


def parse_signal(spec: str, grid: Grid) -> Signal:
    """Preset from ``name`` or ``name:param`` (``gaussian:1.5``, ``hermite:3``,
    ``chirped_gaussian:0.5``, ``characteristic:-1,1``, ``zero``)."""
    name, _, arg = spec.partition(":")
    if name == "gaussian":
        return gaussian(grid, float(arg) if arg else 1.0)
    if name == "hermite":
        return hermite(grid, int(arg) if arg else 0)
    if name == "chirped_gaussian":
        return chirped_gaussian(grid, float(arg) if arg else 1.0)
    if name == "characteristic":
        lo, hi = (float(v) for v in arg.split(",")) if arg else (-1.0, 1.0)
        return characteristic(grid, (lo, hi))
    if name in ("zero", "zeros"):
        return zeros(grid)
    raise ValueError(f"unknown signal preset {spec!r}")


# ---------------------------------------------------------------- transforms

def _axes(grid: Grid, axes):
    return tuple(range(grid.d)) if axes is None else tuple(axes)


def cdft(f: Signal, axes: Sequence[int] | None = None) -> Signal:
    """Centred DFT along ``axes`` (all by default)."""
    ax = _axes(f.grid, axes)
    v = np.fft.fftshift(np.fft.fftn(np.fft.ifftshift(f.values, axes=ax), axes=ax), axes=ax)
    return Signal(f.grid, v * f.grid.delta ** len(ax))


def icdft(F: Signal, axes: Sequence[int] | None = None) -> Signal:
    """Inverse of :func:`cdft`."""
    ax = _axes(F.grid, axes)
    v = np.fft.fftshift(np.fft.ifftn(np.fft.ifftshift(F.values, axes=ax), axes=ax), axes=ax)
    return Signal(F.grid, v / F.grid.delta ** len(ax))


def tf_shift(z, f: Signal) -> Signal:
    """``pi(z) f(t) = exp(2 pi i xi.t) f(t - x)`` with circular translation.

    Raises
    ------
    OffLatticeError
        If ``x`` is not a multiple of the grid spacing.
    """
    z = z if isinstance(z, PhasePoint) else PhasePoint.from_vector(z)
    g = f.grid
    if z.d != g.d:
        raise DimensionError(f"point of dimension {z.d} on a {g.d}-d grid")
    k = g.index_of(z.x, what="time shift")
    v = np.roll(f.values, tuple(int(i) for i in k), axis=tuple(range(g.d)))
    mesh = g.mesh()
    phase = sum(xi * m for xi, m in zip(z.xi, mesh))
    return Signal(g, v * np.exp(2j * np.pi * phase))


def reflect(f: Signal) -> Signal:
    """``g(t) -> g(-t)`` on the periodized grid."""
    v = f.values
    for ax in range(f.grid.d):
        v = np.roll(np.flip(v, axis=ax), 1, axis=ax)
    return Signal(f.grid, v)


# ---------------------------------------------------------------- resampling

def _trig_matrix(grid: Grid, points: np.ndarray) -> np.ndarray:
    """Matrix mapping node samples to trigonometric-interpolant values.

    The Nyquist term is split symmetrically, so real data stays real.
    """
    n, T = grid.n, grid.T
    j = np.arange(n) - n // 2
    xi = j / T
    # coefficients c_j = (1/n) sum_k f_k exp(-2 pi i xi_j x_k)
    x = grid.nodes()
    Fk = np.exp(-2j * np.pi * np.outer(xi, x)) / n
    basis = np.exp(2j * np.pi * np.outer(points, xi))
    basis[:, 0] = np.cos(2 * np.pi * points * xi[0])
    # the cosine basis is matched by the Nyquist coefficient's real sampling
    Fk[0] = np.exp(-2j * np.pi * xi[0] * x).real / n
    return basis @ Fk


def _axis_apply(v: np.ndarray, M: np.ndarray, axis: int) -> np.ndarray:
    return np.moveaxis(np.tensordot(M, np.moveaxis(v, axis, 0), axes=(1, 0)), 0, axis)


def _outside(grid: Grid, u: np.ndarray) -> np.ndarray:
    return np.abs(u) > grid.T / 2 + 1e-12 * grid.T


def _mask_axis(out: np.ndarray, keep: np.ndarray, axis: int) -> np.ndarray:
    shape = [1] * out.ndim
    shape[axis] = keep.size
    return out * keep.reshape(shape)


def _scale_axis(v: np.ndarray, grid: Grid, a: float, axis: int, zero_ext: bool) -> np.ndarray:
    """Samples of ``t_axis -> v(a t_axis)``."""
    n = grid.n
    if a == 1:
        return v
    pts = a * grid.nodes()
    if float(a).is_integer():
        idx = (int(a) * (np.arange(n) - n // 2) + n // 2) % n
        out = np.take(v, idx, axis=axis)
    else:
        out = _axis_apply(v, _trig_matrix(grid, pts), axis)
    if zero_ext:
        out = _mask_axis(out, ~_outside(grid, pts), axis)
    return out


def _frac_shift(v: np.ndarray, grid: Grid, s: np.ndarray, axis: int, other: int,
                zero_ext: bool) -> np.ndarray:
    """``out[..t_axis.., ..t_other..] = v(t_axis + s(t_other))``."""
    n = grid.n
    shape = [1] * v.ndim
    shape[other] = n
    s = np.asarray(s, dtype=float).reshape(shape)
    r = s / grid.delta
    if np.all(np.abs(r - np.rint(r)) < 1e-12):
        out = np.empty_like(v)
        ks = np.rint(r).astype(int).ravel()
        for i, k in enumerate(ks):
            sl = [slice(None)] * v.ndim
            sl[other] = i
            out[tuple(sl)] = np.roll(v[tuple(sl)], -k, axis=axis if axis < other else axis - 1)
    else:
        V = np.fft.fft(np.fft.ifftshift(v, axes=axis), axis=axis)
        freq = np.fft.fftfreq(n, d=grid.delta)
        fshape = [1] * v.ndim
        fshape[axis] = n
        freq = freq.reshape(fshape)
        ramp = np.exp(2j * np.pi * freq * s)
        nyq = [slice(None)] * v.ndim
        nyq[axis] = slice(n // 2, n // 2 + 1)
        ramp[tuple(nyq)] = np.cos(2 * np.pi * freq[tuple(nyq)] * s)
        out = np.fft.fftshift(np.fft.ifft(V * ramp, axis=axis), axes=axis)
        if np.isrealobj(v):
            out = out.real
    if zero_ext:
        tshape = [1] * v.ndim
        tshape[axis] = n
        u = grid.nodes().reshape(tshape) + s
        out = out * ~_outside(grid, u)
    return out


def _shear(v, grid, c, axis, other, zero_ext):
    """``t -> v(t + c t_other e_axis)``."""
    if c == 0:
        return v
    return _frac_shift(v, grid, c * grid.nodes(), axis, other, zero_ext)


def _resample_sinc(v: np.ndarray, grid: Grid, E: np.ndarray, zero_ext: bool) -> np.ndarray:
    d = grid.d
    z = zero_ext
    if d == 1:
        return _scale_axis(v, grid, float(E[0, 0]), 0, z)
    if np.count_nonzero(E - np.diag(np.diag(E))) == 0:
        for ax in range(d):
            v = _scale_axis(v, grid, float(E[ax, ax]), ax, z)
        return v
    if d != 2:
        raise NotImplementedError("sinc resampling with non-diagonal E needs d <= 2")
    E = np.array(E, dtype=float)
    # f(E t) = f(P_r E' P_c t): pick the axis swaps giving the mildest shears
    best = None
    for sr in (False, True):
        for sc in (False, True):
            Ep = E[::-1] if sr else E
            Ep = Ep[:, ::-1] if sc else Ep
            a = Ep[0, 0]
            if abs(a) < 1e-8 * np.max(np.abs(E)):
                continue
            det = Ep[0, 0] * Ep[1, 1] - Ep[0, 1] * Ep[1, 0]
            cost = (abs(Ep[1, 0] / a) + abs(Ep[0, 1] / a)
                    + abs(math.log(abs(a))) + abs(math.log(abs(det / a))))
            if best is None or cost < best[0] - 1e-12:
                best = (cost, sr, sc, Ep)
    _, sr, sc, E = best
    a, b, c, dd = E[0, 0], E[0, 1], E[1, 0], E[1, 1]
    det = a * dd - b * c
    if sr:
        v = v.T
    # E = [[1,0],[c/a,1]] diag(a, det/a) [[1,b/a],[0,1]]; applied left to right
    v = _shear(v, grid, c / a, 1, 0, z)
    v = _scale_axis(v, grid, a, 0, z)
    v = _scale_axis(v, grid, det / a, 1, z)
    v = _shear(v, grid, b / a, 0, 1, z)
    if sc:
        v = v.T
    return v


def resample(f: Signal, E, method: str = "sinc", extension: str = "zero") -> Signal:
    """Samples of ``t -> f(Et)`` on the same grid.

    Parameters
    ----------
    method : {"sinc", "linear", "nearest"}
        ``sinc`` evaluates the trigonometric interpolant (exact for
        band-limited data); integer scalings and shears are exact gathers.
    extension : {"zero", "periodic"}
        Value used for arguments outside ``[-T/2, T/2]``.  ``zero`` treats
        samples as a compactly supported function, which keeps ``f(2t)``
        equal to the analytic contraction; ``periodic`` wraps.
    """
    if extension not in ("zero", "periodic"):
        raise ValueError(f"unknown extension {extension!r}")
    zero_ext = extension == "zero"
    g = f.grid
    E = np.atleast_2d(np.asarray(E, dtype=float))
    if E.shape != (g.d, g.d):
        raise DimensionError(f"E must be {g.d}x{g.d}")
    s = np.linalg.svd(E, compute_uv=False)
    if s[-1] <= 1e-12 * s[0]:
        raise np.linalg.LinAlgError("resampling matrix is singular")
    if np.array_equal(E, np.eye(g.d)):
        return f
    if method == "sinc":
        return Signal(g, _resample_sinc(f.values, g, E, zero_ext))
    if method not in ("linear", "nearest"):
        raise ValueError(f"unknown resampling method {method!r}")
    grids = np.meshgrid(*([g.nodes()] * g.d), indexing="ij")
    pts = np.tensordot(E, np.stack(grids), axes=(1, 0))
    coords = pts / g.delta + g.n // 2
    order = 1 if method == "linear" else 0
    kw = dict(order=order, mode="grid-wrap")
    v = f.values
    out = (ndimage.map_coordinates(v.real, coords, **kw)
           + 1j * ndimage.map_coordinates(v.imag, coords, **kw))
    if zero_ext:
        out = out * ~np.any(_outside(g, pts), axis=0)
    return Signal(g, out)


def shifted_samples(f: Signal, shifts, extension: str = "zero") -> np.ndarray:
    """Matrix ``out[k, m] = f(x_k + s_m)`` for a one-dimensional signal.

    Each column is a band-limited fractional shift computed with one FFT
    phase ramp; arguments outside ``[-T/2, T/2]`` give 0 unless
    ``extension == "periodic"``.
    """
    g = f.grid
    if g.d != 1:
        raise DimensionError("shifted_samples needs a one-dimensional signal")
    n = g.n
    s = np.asarray(shifts, dtype=float).ravel()
    freq = np.fft.fftfreq(n, d=g.delta)
    ramp = np.exp(2j * np.pi * np.outer(s, freq))
    ramp[:, n // 2] = np.cos(2 * np.pi * s * freq[n // 2])
    V = np.fft.fft(np.fft.ifftshift(f.values))
    out = np.fft.fftshift(np.fft.ifft(V[None, :] * ramp, axis=1), axes=1).T
    if extension == "zero":
        out = out * ~_outside(g, g.nodes()[:, None] + s[None, :])
    elif extension != "periodic":
        raise ValueError(f"unknown extension {extension!r}")
    return out
