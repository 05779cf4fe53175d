"""Metaplectic Gabor systems on the finite periodic model.

A system ``(A, g, Lambda)`` has atoms ``pi_A(lambda) g``.  Because
``pi_A(lambda) = c(lambda) pi(E^{-1} lambda) delta^`` with a scalar
``c``, the atoms are materialized from one deformed window and exact
grid translations; ``E^{-1} lambda`` must therefore be a grid node.

Lattices are enumerated inside a box ``box_matrix @ [-T/2, T/2) x
[-n/(2T), n/(2T))``.  The default box for a metaplectic system is
``E_A`` times the phase grid, so that ``E^{-1} Lambda`` tiles the grid.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from . import metop
from ._parallel import pmap
from .errors import (
    DimensionError,
    LatticeIncompatibleError,
    NotAFrameError,
    NotShiftInvertibleError,
    OffLatticeError,
)
from .sigrid import Grid, Signal
from .symplin import BlockSymplectic, L_matrix, Q_matrix, a_hbar, a_st, derived_pack

FRAME_RTOL = 1e-8
MAX_MODEL_SIZE = 4096


def frame_grid(n: int = 48) -> Grid:
    """Self-dual model grid ``(n, sqrt(n))`` used for frame computations."""
    return Grid(1, n, math.sqrt(n))


@dataclass(frozen=True)
class LatticeSpec:
    """Points of ``gen @ Z^2`` inside ``box_matrix @ (phase grid box)``."""

    gen: np.ndarray
    points: np.ndarray
    box_matrix: np.ndarray
    grid: Grid

    @property
    def count(self) -> int:
        return int(self.points.shape[0])

    @property
    def redundancy(self) -> float:
        """Points per signal dimension."""
        return self.count / self.grid.size

    @classmethod
    def build(cls, grid: Grid, gen, box_matrix=None, check_on_grid: bool = True) -> "LatticeSpec":
        """Enumerate and validate a lattice.

        Raises
        ------
        LatticeIncompatibleError
            If a point leaves the grid or the point count does not equal
            ``n / |det(box^{-1} gen)|``.
        """
        if grid.d != 1:
            raise DimensionError("lattices are implemented for d = 1")
        gen = np.atleast_2d(np.asarray(gen, dtype=float))
        box = np.eye(2) if box_matrix is None else np.asarray(box_matrix, dtype=float)
        if gen.shape != (2, 2) or abs(np.linalg.det(gen)) < 1e-14:
            raise LatticeIncompatibleError("lattice generator must be an invertible 2x2 matrix")
        Mb = np.linalg.solve(box, gen)
        lo = np.array([-grid.T / 2, -grid.n / (2 * grid.T)])
        hi = -lo
        corners = np.array(list(itertools.product(*zip(lo, hi)))).T
        mc = np.linalg.solve(Mb, corners)
        mlo = np.floor(mc.min(axis=1)).astype(int) - 1
        mhi = np.ceil(mc.max(axis=1)).astype(int) + 1
        m1, m2 = np.meshgrid(np.arange(mlo[0], mhi[0] + 1), np.arange(mlo[1], mhi[1] + 1),
                             indexing="ij")
        ms = np.stack([m1.ravel(), m2.ravel()])
        base = Mb @ ms
        eps = 1e-9 * np.array([grid.delta, grid.dual_delta])[:, None]
        inside = np.all((base >= lo[:, None] - eps) & (base < hi[:, None] - eps), axis=0)
        pts = (gen @ ms[:, inside]).T
        # the box periods must be lattice vectors, otherwise wrapping breaks the lattice
        periods = np.diag(hi - lo)
        coef = np.linalg.solve(Mb, periods)
        for k in range(2):
            if np.max(np.abs(coef[:, k] - np.rint(coef[:, k]))) > 1e-8:
                p = box @ periods[:, k]
                raise LatticeIncompatibleError(
                    f"period ({float(p[0])!r}, {float(p[1])!r}) of the box is not a lattice point, "
                    "so the lattice does not tile the periodic model", point=list(map(float, p)))
        expected = grid.n / abs(np.linalg.det(Mb))
        if abs(expected - round(expected)) > 1e-6 or pts.shape[0] != round(expected):
            raise LatticeIncompatibleError(
                f"lattice does not tile the periodic box: {pts.shape[0]} points, "
                f"expected n/|det| = {expected:.6g}")
        if check_on_grid:
            for p in pts:
                _require_node(grid, p, "lattice point")
        pts = np.array(pts)
        pts.setflags(write=False)
        return cls(_ro(gen), pts, _ro(box), grid)


def _ro(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


def _require_node(grid: Grid, p, what: str):
    try:
        grid.index_of(p[:1], what=what)
        grid.index_of(p[1:], step=grid.dual_delta, what=what)
    except OffLatticeError as e:
        raise LatticeIncompatibleError(
            f"{what} ({float(p[0])!r}, {float(p[1])!r}) is off the phase grid", point=list(map(float, p))) from e


def separable_lattice(grid: Grid, a: int, b: int, box_matrix=None) -> LatticeSpec:
    """``box @ (a delta Z x (b/T) Z)`` for integer step multiples ``a, b``."""
    if int(a) != a or int(b) != b or a <= 0 or b <= 0:
        raise ValueError("lattice steps are positive integer multiples of the grid steps")
    box = np.eye(2) if box_matrix is None else np.asarray(box_matrix, dtype=float)
    gen = box @ np.diag([a * grid.delta, b * grid.dual_delta])
    return LatticeSpec.build(grid, gen, box)


@dataclass(frozen=True)
class MetaplecticGaborSystem:
    matrix: BlockSymplectic
    window: Signal
    lattice: LatticeSpec

    def __post_init__(self):
        if not derived_pack(self.matrix).shift_invertible:
            raise NotShiftInvertibleError("metaplectic Gabor systems need a shift-invertible matrix")
        if not np.any(self.window.values):
            raise ValueError("window must be nonzero")
        if self.window.grid != self.lattice.grid:
            raise DimensionError("window and lattice live on different grids")

    @property
    def grid(self) -> Grid:
        return self.window.grid


def system(A: BlockSymplectic, g: Signal, a: int = 4, b: int = 4, warped: bool = True
           ) -> MetaplecticGaborSystem:
    """System on ``E_A (a delta Z x (b/T) Z)`` (or the unwarped lattice)."""
    E = derived_pack(A).E if warped else np.eye(2)
    return MetaplecticGaborSystem(A, g, separable_lattice(g.grid, a, b, E))


def hbar_system(hbar: float, g: Signal, a: int = 4, b: int = 4) -> MetaplecticGaborSystem:
    return system(a_hbar(hbar), g, a, b)


def gabor_system(g: Signal, lattice: LatticeSpec) -> MetaplecticGaborSystem:
    """Classical Gabor system: the metaplectic system of ``A_ST``."""
    return MetaplecticGaborSystem(a_st(1), g, lattice)


@dataclass(frozen=True)
class CoefficientArray:
    points: np.ndarray
    values: np.ndarray


def atoms(sys: MetaplecticGaborSystem, window: Signal | None = None,
          deformed: Signal | None = None) -> np.ndarray:
    """Rows ``pi_A(lambda) h`` (``h`` defaults to the system window).

    ``deformed`` may supply ``delta^ h`` directly, which skips the
    deformation operator.

    Raises
    ------
    LatticeIncompatibleError
        Naming the first ``lambda`` with ``E^{-1} lambda`` off the grid.
    """
    h = sys.window if window is None else window
    grid = sys.grid
    pack = derived_pack(sys.matrix)
    Ein = np.linalg.inv(pack.E)
    W = sys.lattice.points @ Ein.T
    kx = W[:, 0] / grid.delta
    kj = W[:, 1] / grid.dual_delta
    bad = (np.abs(kx - np.rint(kx)) > 1e-9 * np.maximum(1, np.abs(kx))) | (
        np.abs(kj - np.rint(kj)) > 1e-9 * np.maximum(1, np.abs(kj)))
    if np.any(bad):
        p = sys.lattice.points[np.argmax(bad)]
        raise LatticeIncompatibleError(
            f"E^{{-1}} lambda is off the grid for lambda = ({float(p[0])!r}, {float(p[1])!r})",
            point=[float(p[0]), float(p[1])])
    dg = (metop.deformation(sys.matrix, h) if deformed is None else deformed).values
    kx = np.rint(kx).astype(int)
    t = grid.nodes()
    ML = pack.M + L_matrix(1)
    quad = ML[0, 0] * W[:, 0] ** 2 + 2 * ML[0, 1] * W[:, 0] * W[:, 1] + ML[1, 1] * W[:, 1] ** 2
    c = abs(pack.det_E) ** -0.5 * np.exp(-1j * np.pi * quad)

    def row(i):
        return c[i] * np.roll(dg, kx[i]) * np.exp(2j * np.pi * W[i, 1] * t)

    return np.array(pmap(row, range(W.shape[0])))


def analysis(sys: MetaplecticGaborSystem, f: Signal, _atoms=None) -> CoefficientArray:
    """``(<f, pi_A(lambda) g>)_lambda``."""
    Phi = atoms(sys) if _atoms is None else _atoms
    vals = sys.grid.delta * (np.conj(Phi) @ f.values)
    return CoefficientArray(sys.lattice.points, vals)


def synthesis(sys: MetaplecticGaborSystem, c, _atoms=None, window: Signal | None = None,
              deformed: Signal | None = None) -> Signal:
    """``sum_lambda c_lambda pi_A(lambda) g``."""
    vals = c.values if isinstance(c, CoefficientArray) else np.asarray(c)
    if vals.shape != (sys.lattice.count,):
        raise DimensionError(f"expected {sys.lattice.count} coefficients, got {vals.shape}")
    Phi = atoms(sys, window, deformed) if _atoms is None else _atoms
    return Signal(sys.grid, vals @ Phi)


def _guard(grid: Grid):
    if grid.size > MAX_MODEL_SIZE:
        raise MemoryError(f"dense frame operator of size {grid.size} exceeds {MAX_MODEL_SIZE}")


def frame_op(sys: MetaplecticGaborSystem) -> np.ndarray:
    """Dense Hermitian matrix of ``D_A C_A`` acting on sample vectors."""
    _guard(sys.grid)
    Phi = atoms(sys)
    S = sys.grid.delta * (Phi.T @ np.conj(Phi))
    return (S + S.conj().T) / 2


@dataclass(frozen=True)
class FrameReport:
    lower_A: float
    upper_B: float
    condition: float
    is_frame: bool
    spectrum: np.ndarray = field(repr=False)
    n: int = 0
    lattice_gen: tuple = ()
    matrix_preset: str = ""
    bound_factor: float = 1.0

    def to_json(self) -> dict:
        return {
            "A": self.lower_A,
            "B": self.upper_B,
            "condition": self.condition,
            "is_frame": self.is_frame,
            "n": self.n,
            "lattice_gen": [list(r) for r in self.lattice_gen],
            "matrix_preset": self.matrix_preset,
            "bound_factor": self.bound_factor,
        }


def frame_bounds(sys: MetaplecticGaborSystem) -> FrameReport:
    """Extremal eigenvalues of the frame operator.

    ``is_frame`` means ``A > 1e-8 B``.  ``bound_factor = |det E|^{-1}`` is
    the scale relating these bounds to the equivalent Gabor systems; for
    the hbar preset it equals ``(2 pi hbar)^{-d}``.
    """
    S = frame_op(sys)
    ev = np.linalg.eigvalsh(S)
    A = max(float(ev[0]), 0.0)
    B = float(ev[-1])
    is_frame = bool(B > 0 and A > FRAME_RTOL * B)
    cond = B / A if is_frame else math.inf
    pack = derived_pack(sys.matrix)
    return FrameReport(
        lower_A=A, upper_B=B, condition=cond, is_frame=is_frame, spectrum=ev,
        n=sys.grid.n, lattice_gen=tuple(tuple(float(v) for v in r) for r in sys.lattice.gen),
        matrix_preset=sys.matrix.label, bound_factor=1.0 / abs(pack.det_E))


def canonical_dual(sys: MetaplecticGaborSystem) -> Signal:
    """``gamma_A = delta^{-1} S_A^{-1} delta^ g``.

    Raises
    ------
    NotAFrameError
        If the frame operator is numerically singular.
    """
    op = metop.deformation_op(sys.matrix)
    return op.apply_inverse(canonical_dual_deformed(sys))


def canonical_dual_deformed(sys: MetaplecticGaborSystem) -> Signal:
    """``delta^ gamma_A = S_A^{-1} delta^ g``, without the inverse deformation.

    Feeding this to :func:`reconstruct` avoids resampling twice, which
    matters when ``delta^`` contains a non-integer dilation.
    """
    S = frame_op(sys)
    ev = np.linalg.eigvalsh(S)
    if not (ev[-1] > 0 and ev[0] > FRAME_RTOL * ev[-1]):
        raise NotAFrameError("frame operator is singular; the system is not a frame")
    dg = metop.deformation(sys.matrix, sys.window)
    return Signal(sys.grid, np.linalg.solve(S, dg.values))


def reconstruct(sys: MetaplecticGaborSystem, f: Signal, gamma: Signal | None = None,
                deformed_gamma: Signal | None = None) -> Signal:
    """``sum_lambda <f, pi_A(lambda) g> pi_A(lambda) gamma``.

    Pass either ``gamma`` or its deformation ``deformed_gamma``; with
    neither, the canonical dual is used.
    """
    if gamma is None and deformed_gamma is None:
        deformed_gamma = canonical_dual_deformed(sys)
    c = analysis(sys, f)
    return synthesis(sys, c, window=gamma, deformed=deformed_gamma)


@dataclass(frozen=True)
class EquivalentSystems:
    system1: MetaplecticGaborSystem
    system2: MetaplecticGaborSystem | None
    bound_scale: float
    status2: str


def equivalent_systems(sys: MetaplecticGaborSystem) -> EquivalentSystems:
    """``G(delta^ g, E^{-1} Lambda)`` and ``G(g, -Q Es^{-1} Lambda)``.

    Bounds of both equal ``|det E|`` times the bounds of ``sys``.  The
    second system is reported as ``"skipped: incompatible"`` when its
    lattice leaves the grid.
    """
    pack = derived_pack(sys.matrix)
    lat = sys.lattice
    grid = sys.grid
    Ein = np.linalg.inv(pack.E)
    lat1 = LatticeSpec.build(grid, Ein @ lat.gen, Ein @ lat.box_matrix)
    s1 = gabor_system(metop.deformation(sys.matrix, sys.window), lat1)
    K = -Q_matrix(1) @ np.linalg.inv(pack.Escript)
    try:
        lat2 = LatticeSpec.build(grid, K @ lat.gen, K @ lat.box_matrix)
        s2, status = gabor_system(sys.window, lat2), "ok"
    except LatticeIncompatibleError as e:
        s2, status = None, f"skipped: incompatible ({e})"
    return EquivalentSystems(s1, s2, abs(pack.det_E), status)


def equivalence_table(sys: MetaplecticGaborSystem) -> list[dict]:
    """Bounds of ``sys`` and of its equivalent systems divided by ``|det E|``."""
    eq = equivalent_systems(sys)
    r0 = frame_bounds(sys)
    rows = [{"system": "metaplectic", "A": r0.lower_A, "B": r0.upper_B, "ratio": 1.0,
             "status": "ok"}]
    for name, s, status in (("deformed window", eq.system1, "ok"),
                            ("transformed lattice", eq.system2, eq.status2)):
        if s is None:
            rows.append({"system": name, "A": None, "B": None, "ratio": None, "status": status})
            continue
        r = frame_bounds(s)
        rows.append({"system": name, "A": r.lower_A / eq.bound_scale,
                     "B": r.upper_B / eq.bound_scale,
                     "ratio": r.upper_B / r0.upper_B if r0.upper_B else None,
                     "status": status})
    return rows
