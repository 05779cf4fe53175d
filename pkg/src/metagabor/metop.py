"""Numerical metaplectic operators.

An operator is a list of generator factors ``[f_1, ..., f_m]`` whose
matrices multiply left to right to the symplectic projection ``S``.  It
therefore acts on a signal by applying ``f_m`` first and ``f_1`` last:

* ``FourierJ``       -> centred DFT,
* ``Dilation(E)``     -> ``|det E|^{1/2} f(E .)``,
* ``ChirpLower(C)``   -> multiplication by ``Phi_C``,
* ``ChirpUpper(C)``   -> ``cdft . Phi_{-C} . icdft``.

The result equals the metaplectic operator up to one unimodular constant
that depends only on the factor list (so it is deterministic).  The DFT
model of ``J`` is exact only on self-dual grids (``T**2 == n``), which is
therefore required for every factor list containing ``FourierJ``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import sigrid
from .errors import DimensionError, GridMismatchError, NotShiftInvertibleError
from .sigrid import Grid, Signal, cdft, icdft
from .symplin import (
    BlockSymplectic,
    ChirpLower,
    ChirpUpper,
    Dilation,
    FourierJ,
    GeneratorFactor,
    SymplecticMatrix,
    bar,
    derived_pack,
    free_factorize,
    product,
)


def _require_self_dual(grid: Grid):
    if not grid.self_dual:
        raise GridMismatchError(
            f"Fourier factors need a self-dual grid (T^2 == n); got n={grid.n}, T={grid.T}")


def apply_factor(f: GeneratorFactor, s: Signal, method: str = "sinc") -> Signal:
    """Apply one generator to a signal."""
    if f.d != s.grid.d:
        raise DimensionError(f"factor of dimension {f.d} on a {s.grid.d}-d signal")
    if isinstance(f, FourierJ):
        _require_self_dual(s.grid)
        return cdft(s)
    if isinstance(f, Dilation):
        scale = np.sqrt(abs(np.linalg.det(f.E)))
        return sigrid.resample(s, f.E, method) * scale
    if isinstance(f, ChirpLower):
        return Signal(s.grid, s.values * sigrid.chirp_signal(f.C, s.grid).values)
    if isinstance(f, ChirpUpper):
        _require_self_dual(s.grid)
        inv = icdft(s)
        return cdft(Signal(s.grid, inv.values * sigrid.chirp_signal(-f.C, s.grid).values))
    raise TypeError(f"not a generator factor: {f!r}")


def apply_factor_inverse(f: GeneratorFactor, s: Signal, method: str = "sinc") -> Signal:
    """Apply the inverse of one generator."""
    if isinstance(f, FourierJ):
        _require_self_dual(s.grid)
        return icdft(s)
    if isinstance(f, Dilation):
        return apply_factor(Dilation(np.linalg.inv(f.E)), s, method)
    if isinstance(f, ChirpLower):
        return apply_factor(ChirpLower(-f.C), s, method)
    if isinstance(f, ChirpUpper):
        return apply_factor(ChirpUpper(-f.C), s, method)
    raise TypeError(f"not a generator factor: {f!r}")


@dataclass(frozen=True)
class MetaplecticOp:
    """Ordered generator factors realizing a metaplectic operator."""

    d: int
    factors: tuple
    source: SymplecticMatrix | None = None

    @classmethod
    def from_matrix(cls, S, seed: int = 0) -> "MetaplecticOp":
        S = S if isinstance(S, SymplecticMatrix) else (
            S.as_symplectic() if isinstance(S, BlockSymplectic) else SymplecticMatrix.from_array(S))
        return cls(S.d, tuple(free_factorize(S, seed=seed)), S)

    def matrix(self) -> np.ndarray:
        if not self.factors:
            return np.eye(2 * self.d)
        return product(self.factors)

    def apply(self, s: Signal, method: str = "sinc") -> Signal:
        for f in reversed(self.factors):
            s = apply_factor(f, s, method)
        return s

    def apply_inverse(self, s: Signal, method: str = "sinc") -> Signal:
        """Exact inverse of :meth:`apply` (same phase convention)."""
        for f in self.factors:
            s = apply_factor_inverse(f, s, method)
        return s

    def __call__(self, s: Signal) -> Signal:
        return self.apply(s)


def apply(S, s: Signal, method: str = "sinc") -> Signal:
    """``S^ s`` up to a unimodular constant fixed by the factorization."""
    return MetaplecticOp.from_matrix(S).apply(s, method)


def apply_inverse(S, s: Signal, method: str = "sinc") -> Signal:
    return MetaplecticOp.from_matrix(S).apply_inverse(s, method)


def tensor(f: Signal, g: Signal) -> Signal:
    """``(f (x) conj g)(x, y) = f(x) conj(g(y))`` on the product grid."""
    if f.grid != g.grid:
        raise GridMismatchError("tensor factors live on different grids")
    v = np.multiply.outer(f.values, np.conj(g.values))
    return Signal(f.grid.product(), v)


def apply_2d(A, F: Signal, method: str = "sinc") -> Signal:
    """Apply the ``2d``-dimensional operator of a ``4d x 4d`` matrix."""
    op = MetaplecticOp.from_matrix(A)
    if op.d != F.grid.d:
        raise DimensionError(f"matrix acts in dimension {op.d}, field has dimension {F.grid.d}")
    return op.apply(F, method)


def deformation_op(A: BlockSymplectic) -> MetaplecticOp:
    """The deformation operator ``F . (bar G)^`` as a factor list.

    Raises
    ------
    NotShiftInvertibleError
        If ``E`` is singular.
    """
    pack = derived_pack(A)
    if not pack.shift_invertible:
        raise NotShiftInvertibleError("deformation operator needs a shift-invertible matrix")
    Gbar = bar(SymplecticMatrix.from_array(pack.G, tol=1e-8))
    inner_op = MetaplecticOp.from_matrix(Gbar)
    factors = (FourierJ(A.d),) + inner_op.factors
    src = SymplecticMatrix.from_array(product(factors), tol=1e-8)
    return MetaplecticOp(A.d, factors, src)


def deformation(A: BlockSymplectic, g: Signal, method: str = "sinc") -> Signal:
    """``delta_A^ g = cdft(bar(G_A)^ g)``."""
    return deformation_op(A).apply(g, method)


def chirp_ft_measurement(C, grid: Grid | None = None, plateau: float = 2.0,
                         support: float = 3.95, band: float | None = None) -> dict:
    """Measure ``cdft(Phi_C) = c Phi_{-C^{-1}}`` on a finite grid.

    The chirp is cut off smoothly (unless ``|C| = 1``) and
    compared with ``Phi_{-C^{-1}}`` on ``|xi| <= band``.  Returns the modulus
    flatness ``max |r| / min |r| - 1`` of the ratio ``r``, its phase spread,
    the fitted constant ``c`` and the exponent ``e`` in ``|c| = |det C|^e``.

    Frequency ``xi`` is produced near ``t = xi / C``, so the default band
    ``|C| plateau / 2`` stays inside the untapered part.
    """
    grid = grid or sigrid.default_grid()
    _require_self_dual(grid)
    C = np.atleast_2d(np.asarray(C, dtype=float))
    if C.shape != (grid.d, grid.d) or grid.d != 1:
        raise DimensionError("chirp measurement is implemented for d = 1")
    detC = float(np.linalg.det(C))
    if detC == 0:
        raise ValueError("C must be invertible")
    t = grid.nodes()
    phi = sigrid.chirp_signal(C, grid).values
    # on a self-dual grid Phi_{+-1} is n-periodic and alias-free, so exact
    periodic = abs(abs(C[0, 0]) - 1) < 1e-12
    taper = np.ones_like(t) if periodic else sigrid.smooth_taper(t, plateau, support)
    F = cdft(Signal(grid, phi * taper)).values
    ref = sigrid.chirp_signal(-np.linalg.inv(C), grid).values
    if band is None:
        band = 0.5 * abs(C[0, 0]) * plateau
    xi = grid.dual_nodes()
    sel = np.abs(xi) <= band
    r = F[sel] / ref[sel]
    c = complex(np.mean(r))
    mod = np.abs(r)
    return {
        "C": C.tolist(),
        "det_C": detC,
        "tapered": not periodic,
        "band": float(band),
        "flatness": float(mod.max() / mod.min() - 1),
        "phase_spread": float(np.max(np.abs(np.angle(r / c)))),
        "constant": c,
        "abs_constant": abs(c),
        "exponent": float(np.log(abs(c)) / np.log(abs(detC))) if abs(abs(detC) - 1) > 1e-12 else None,
    }
