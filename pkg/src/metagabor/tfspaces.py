"""Weights, mixed norms and the modulation / amalgam characterizations.

Mixed quasi-norms are Riemann sums over a field's actual nodes::

    ||F||_{p,q} = ( sum_xi ( sum_x |F m|^p dx )^{q/p} dxi )^{1/q}

("time-inner" order; "frequency-inner" swaps the roles).  For a field
with node matrix ``E`` the sum is exact along index rows when the
integration lines are index lines: ``E`` upper triangular for
time-inner, lower triangular for frequency-inner.  ``p == q`` always
works.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import mwd
from ._parallel import pmap
from .errors import NotShiftInvertibleError
from .mwd import WignerField
from .sigrid import Grid, Signal
from .symplin import BlockSymplectic, a_st, derived_pack

TIME_INNER = "time-inner"
FREQUENCY_INNER = "frequency-inner"


@dataclass(frozen=True)
class Weight:
    """Positive weight on phase space.

    ``kind`` is ``"polynomial"`` (``v_s(z) = (1 + |z|)^s``), ``"separable"``
    (``m_x(x) m_xi(xi)``) or ``"custom"`` (any ``fn(x, xi)``).
    """

    kind: str
    s: float = 0.0
    m_x: Callable | None = field(default=None, compare=False)
    m_xi: Callable | None = field(default=None, compare=False)
    fn: Callable | None = field(default=None, compare=False)

    @classmethod
    def polynomial(cls, s: float) -> "Weight":
        return cls("polynomial", s=float(s))

    @classmethod
    def one(cls) -> "Weight":
        return cls("polynomial", s=0.0)

    @classmethod
    def separable(cls, m_x: Callable, m_xi: Callable) -> "Weight":
        return cls("separable", m_x=m_x, m_xi=m_xi)

    @classmethod
    def custom(cls, fn: Callable) -> "Weight":
        return cls("custom", fn=fn)

    def __call__(self, x, xi) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        xi = np.asarray(xi, dtype=float)
        if self.kind == "polynomial":
            if self.s == 0:
                out = np.ones(np.broadcast_shapes(x.shape, xi.shape))
            else:
                out = (1 + np.hypot(x, xi)) ** self.s
        elif self.kind == "separable":
            out = np.asarray(self.m_x(x), dtype=float) * np.asarray(self.m_xi(xi), dtype=float)
        elif self.kind == "custom":
            out = np.asarray(self.fn(x, xi), dtype=float)
        else:
            raise ValueError(f"unknown weight kind {self.kind!r}")
        if np.any(~np.isfinite(out)) or np.any(out <= 0):
            raise ValueError("weight must be finite and strictly positive on the grid")
        return np.broadcast_to(out, np.broadcast_shapes(x.shape, xi.shape))

    def describe(self) -> dict:
        return {"kind": self.kind, "s": self.s} if self.kind == "polynomial" else {"kind": self.kind}


def _exp(v) -> float:
    v = float(v)
    if not (v > 0):
        raise ValueError(f"exponents must be positive or inf, got {v}")
    return v


@dataclass(frozen=True)
class MixedNormSpec:
    p: float
    q: float
    weight: Weight = field(default_factory=Weight.one)
    order: str = TIME_INNER

    def __post_init__(self):
        object.__setattr__(self, "p", _exp(self.p))
        object.__setattr__(self, "q", _exp(self.q))
        if self.order not in (TIME_INNER, FREQUENCY_INNER):
            raise ValueError(f"unknown order {self.order!r}")

    def describe(self) -> dict:
        return {"p": _fmt_exp(self.p), "q": _fmt_exp(self.q), "order": self.order,
                "weight": self.weight.describe()}


def _fmt_exp(v):
    return "inf" if math.isinf(v) else v


def _lp(a: np.ndarray, p: float, h: float, axis: int) -> np.ndarray:
    if math.isinf(p):
        return np.max(a, axis=axis)
    return (np.sum(a ** p, axis=axis) * h) ** (1.0 / p)


def mixed_norm_array(absF: np.ndarray, p: float, q: float, h_inner: float, h_outer: float,
                     inner_axis: int) -> float:
    """Iterated Riemann-sum quasi-norm of a non-negative array."""
    inner = _lp(absF, p, h_inner, inner_axis)
    return float(_lp(inner, q, h_outer, 0))


def is_upper_triangular(E, tol: float = 0.0) -> bool:
    return bool(abs(np.asarray(E)[1, 0]) <= tol)


def is_lower_triangular(E, tol: float = 0.0) -> bool:
    return bool(abs(np.asarray(E)[0, 1]) <= tol)


def mixed_norm(W: WignerField, spec: MixedNormSpec) -> float:
    """Weighted mixed quasi-norm over the field's nodes.

    Raises
    ------
    ValueError
        If ``p != q`` and the node matrix does not align the integration
        lines with index rows.
    """
    E = W.node_matrix
    X, XI = W.nodes()
    a = np.abs(W.values) * spec.weight(X, XI)
    g = W.grid
    if spec.p == spec.q:
        if math.isinf(spec.p):
            return float(np.max(a))
        return float((np.sum(a ** spec.p) * W.cell) ** (1.0 / spec.p))
    if spec.order == TIME_INNER:
        if not is_upper_triangular(E):
            raise ValueError("time-inner mixed norm needs an upper-triangular node matrix")
        return mixed_norm_array(a, spec.p, spec.q, abs(E[0, 0]) * g.delta,
                                abs(E[1, 1]) * g.dual_delta, 0)
    if not is_lower_triangular(E):
        raise ValueError("frequency-inner mixed norm needs a lower-triangular node matrix")
    return mixed_norm_array(a.T, spec.p, spec.q, abs(E[1, 1]) * g.dual_delta,
                            abs(E[0, 0]) * g.delta, 0)


def _field_for(A: BlockSymplectic, f: Signal, g: Signal, spec: MixedNormSpec) -> WignerField:
    pack = derived_pack(A)
    if not pack.shift_invertible:
        raise NotShiftInvertibleError("the characterization needs a shift-invertible matrix")
    aligned = (spec.p == spec.q
               or (spec.order == TIME_INNER and is_upper_triangular(pack.E))
               or (spec.order == FREQUENCY_INNER and is_lower_triangular(pack.E)))
    if aligned:
        return mwd.wigner_fast(A, f, g)
    # integration lines are not index lines of the warped grid: use base nodes
    return mwd.wigner_ref(A, f, g)


def mod_norm(f: Signal, A: BlockSymplectic, g: Signal, spec: MixedNormSpec) -> float:
    """``||W_A(f, g)||_{L^{p,q}_m}``; see :func:`mod_norm_report` for flags."""
    return mixed_norm(_field_for(A, f, g, spec), spec)


def mod_norm_report(f: Signal, A: BlockSymplectic, g: Signal, spec: MixedNormSpec) -> dict:
    pack = derived_pack(A)
    W = _field_for(A, f, g, spec)
    return {
        "value": mixed_norm(W, spec),
        "E_upper_triangular": is_upper_triangular(pack.E),
        "E_lower_triangular": is_lower_triangular(pack.E),
        "characterization_hypothesis_met": spec.p == spec.q or is_upper_triangular(pack.E),
        "path": W.path,
        "spec": spec.describe(),
    }


def amalgam_norm(f: Signal, A: BlockSymplectic, g: Signal, spec: MixedNormSpec) -> float:
    """Swapped-order norm: inner over ``xi`` with ``m_xi``, outer over ``x`` with ``m_x``.

    Raises
    ------
    ValueError
        If the weight is not separable (``m_1 (x) m_2``); unit weights are
        accepted as separable.
    """
    w = spec.weight
    if not (w.kind == "separable" or (w.kind == "polynomial" and w.s == 0)):
        raise ValueError("amalgam norms need a separable weight m_x(x) m_xi(xi)")
    sw = MixedNormSpec(spec.p, spec.q, w, FREQUENCY_INNER)
    return mixed_norm(_field_for(A, f, g, sw), sw)


def amalgam_report(f: Signal, A: BlockSymplectic, g: Signal, spec: MixedNormSpec) -> dict:
    pack = derived_pack(A)
    return {"value": amalgam_norm(f, A, g, spec),
            "E_lower_triangular": is_lower_triangular(pack.E),
            "spec": spec.describe()}


def equivalence_report(A: BlockSymplectic, g: Signal, spec: MixedNormSpec,
                       corpus: Sequence[Signal], g0: Signal | None = None) -> dict:
    """Extremes of ``mod_norm(f; A, g) / mod_norm(f; A_ST, g0)`` over a corpus.

    Raises
    ------
    ValueError
        For an empty corpus or a zero signal.
    """
    corpus = list(corpus)
    if not corpus:
        raise ValueError("corpus is empty")
    for i, f in enumerate(corpus):
        if not np.any(f.values):
            raise ValueError(f"corpus entry {i} is the zero signal")
    g0 = g if g0 is None else g0
    ref = a_st(A.d)

    def one(f):
        return mod_norm(f, A, g, spec), mod_norm(f, ref, g0, spec)

    rows = pmap(one, corpus)
    ratios = [a / b for a, b in rows]
    return {
        "ratio_min": float(min(ratios)),
        "ratio_max": float(max(ratios)),
        "spread": float(max(ratios) / min(ratios)),
        "norms": [{"A": a, "ref": b, "ratio": a / b} for a, b in rows],
        "spec": spec.describe(),
        "matrix": A.label,
    }


# ---------------------------------------------------------------- dilations

def default_field_corpus() -> list[Callable]:
    """Anisotropic Gaussian-type phase-space functions."""
    out = []
    for a, b, c in ((1.0, 1.0, 0.0), (2.0, 0.5, 0.0), (1.0, 3.0, 1.0), (0.7, 1.3, -0.6)):
        out.append(lambda x, y, a=a, b=b, c=c: np.exp(-np.pi * (a * x * x + b * y * y + c * x * y)))
    out.append(lambda x, y: (1 + x * x) ** -2 * np.exp(-np.pi * y * y))
    return out


def _eval_norm(F: Callable, S: np.ndarray, p: float, q: float, grid: Grid) -> float:
    x = grid.nodes()[:, None]
    y = grid.dual_nodes()[None, :]
    X = S[0, 0] * x + S[0, 1] * y
    Y = S[1, 0] * x + S[1, 1] * y
    a = np.abs(F(X, Y)) * abs(np.linalg.det(S)) ** 0.5
    return mixed_norm_array(a, p, q, grid.delta, grid.dual_delta, 0)


def dilation_invariance_check(spec: MixedNormSpec, S, corpus: Sequence[Callable] | None = None,
                              grid: Grid | None = None) -> dict:
    """Extremes of ``||T_S F||_{p,q} / ||F||_{p,q}`` with ``T_S F = |det S|^{1/2} F o S``.

    The corpus holds callables ``F(x, xi)`` so that ``F o S`` is exact.

    Raises
    ------
    ValueError
        If ``S`` is singular, or lower triangular (non-diagonal) with ``p != q``.
    """
    S = np.asarray(S, dtype=float)
    if S.shape != (2, 2) or abs(np.linalg.det(S)) < 1e-14:
        raise ValueError("S must be an invertible 2x2 matrix")
    if spec.p != spec.q and not is_upper_triangular(S):
        raise ValueError("for p != q only upper-triangular S is admissible")
    grid = Grid(1, 256, 16.0) if grid is None else grid
    corpus = default_field_corpus() if corpus is None else list(corpus)
    I = np.eye(2)
    ratios = [_eval_norm(F, S, spec.p, spec.q, grid) / _eval_norm(F, I, spec.p, spec.q, grid)
              for F in corpus]
    return {"ratio_min": float(min(ratios)), "ratio_max": float(max(ratios)), "ratios": ratios}


def diagonal_dilation_ratio(a: float, d: float, p: float, q: float) -> float:
    """Closed form of the ratio for ``S = diag(a, d)``."""
    ip = 0.0 if math.isinf(p) else 1.0 / p
    iq = 0.0 if math.isinf(q) else 1.0 / q
    return abs(a * d) ** 0.5 * abs(a) ** -ip * abs(d) ** -iq


# ---------------------------------------------------------------- weight diagnostics

def moderateness_constant(m: Weight, v: Weight, grid: Grid | None = None,
                          radius: float = 1.0) -> float:
    """Sampled ``sup m(z1 + z2) / (v(z1) m(z2))`` over a 9-point stencil ``z1``."""
    grid = Grid(1, 64, 8.0) if grid is None else grid
    x = grid.nodes()[:, None] * np.ones((1, grid.n))
    y = np.ones((grid.n, 1)) * grid.dual_nodes()[None, :]
    worst = 0.0
    for dx in (-radius, 0.0, radius):
        for dy in (-radius, 0.0, radius):
            r = m(x + dx, y + dy) / (v(np.array(dx), np.array(dy)) * m(x, y))
            worst = max(worst, float(np.max(r)))
    return worst


def weight_symmetry_ratio(m: Weight, E, grid: Grid | None = None) -> tuple[float, float]:
    """Sampled ``(inf, sup)`` of ``m(E^{-1} z) / m(z)``."""
    grid = Grid(1, 64, 8.0) if grid is None else grid
    Ein = np.linalg.inv(np.asarray(E, dtype=float))
    x = grid.nodes()[:, None] * np.ones((1, grid.n))
    y = np.ones((grid.n, 1)) * grid.dual_nodes()[None, :]
    r = m(Ein[0, 0] * x + Ein[0, 1] * y, Ein[1, 0] * x + Ein[1, 1] * y) / m(x, y)
    return float(np.min(r)), float(np.max(r))
