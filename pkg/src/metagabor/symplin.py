"""Symplectic matrix calculus.

Conventions
-----------
A ``2d x 2d`` matrix ``S`` is symplectic when ``S.T @ J @ S == J`` with
``J = [[0, I], [-I, 0]]``.  Matrices of ``Sp(2d)`` (size ``4d x 4d``) are
read in ``d x d`` blocks ``A_ij``, ``i, j = 1..4``, and the derived
``2d x 2d`` submatrices are

    E  = [[A11, A13], [A21, A23]]      F  = [[A31, A33], [A41, A43]]
    Es = [[A12, A14], [A22, A24]]      Fs = [[A32, A34], [A42, A44]]

Generators are ``J``, the dilations ``D_E = diag(E^{-1}, E^T)`` and the
lower/upper chirps ``V_C = [[I, 0], [C, I]]`` and ``V_C^T``.

All returned arrays are read-only and every value type is immutable.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce
from typing import Iterable, Sequence, Union

import numpy as np

from .errors import (
    DimensionError,
    FactorizationError,
    InvalidFactorError,
    NotShiftInvertibleError,
    NotSymplecticError,
)

DEFAULT_TOL = 1e-9
SHIFT_INVERTIBLE_RTOL = 1e-8
COVARIANCE_TOL = 1e-10

RELATION_NAMES = ("R1a", "R1b", "R1c", "R2a", "R2b", "R2c",
                  "R3a", "R3b", "R3c", "R3d")


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


def _half(a: np.ndarray, what: str = "matrix") -> int:
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] % 2:
        raise DimensionError(f"{what} must be square of even size, got {a.shape}")
    return a.shape[0] // 2


def std_J(d: int) -> np.ndarray:
    """The standard skew form ``J`` of size ``2d``."""
    z, i = np.zeros((d, d)), np.eye(d)
    return np.block([[z, i], [-i, z]])


def L_matrix(d: int) -> np.ndarray:
    """``L = [[0, I], [I, 0]]`` (size ``2d``); ``x.xi = (L z).z / 2``."""
    z, i = np.zeros((d, d)), np.eye(d)
    return np.block([[z, i], [i, z]])


def P_matrix(d: int) -> np.ndarray:
    """``P = [[0, I], [0, 0]]`` (size ``2d``)."""
    z, i = np.zeros((d, d)), np.eye(d)
    return np.block([[z, i], [z, z]])


def Q_matrix(d: int) -> np.ndarray:
    """``Q = diag(I, -I) = -L J`` (size ``2d``)."""
    return np.diag(np.r_[np.ones(d), -np.ones(d)])


def is_well_conditioned(M, rtol: float = SHIFT_INVERTIBLE_RTOL) -> bool:
    """True when the smallest singular value exceeds ``rtol`` times the largest."""
    s = np.linalg.svd(np.asarray(M, dtype=float), compute_uv=False)
    return bool(s.size and s[0] > 0 and s[-1] > rtol * s[0])


def check_symplectic(S, d: int) -> float:
    """Max-norm of ``S^T J S - J``.

    Raises
    ------
    DimensionError
        If ``S`` is not ``2d x 2d``.
    """
    S = np.asarray(S, dtype=float)
    if S.shape != (2 * d, 2 * d):
        raise DimensionError(f"expected a {2 * d}x{2 * d} matrix, got {S.shape}")
    J = std_J(d)
    return float(np.max(np.abs(S.T @ J @ S - J)))


def symplectic_inverse(S) -> np.ndarray:
    """Closed-form inverse ``[[D^T, -B^T], [-C^T, A^T]]``."""
    S = np.asarray(S, dtype=float)
    d = _half(S)
    A, B, C, D = S[:d, :d], S[:d, d:], S[d:, :d], S[d:, d:]
    return np.block([[D.T, -B.T], [-C.T, A.T]])


def _bar_array(S) -> np.ndarray:
    S = np.array(S, dtype=float)
    d = _half(S)
    S[:d, d:] *= -1
    S[d:, :d] *= -1
    return S


@dataclass(frozen=True)
class SymplecticMatrix:
    """A validated element of ``Sp(d, R)``."""

    d: int
    data: np.ndarray
    residual: float

    @classmethod
    def from_array(cls, S, tol: float = DEFAULT_TOL) -> "SymplecticMatrix":
        S = np.asarray(S, dtype=float)
        d = _half(S)
        if not np.all(np.isfinite(S)):
            raise NotSymplecticError("matrix has non-finite entries")
        res = check_symplectic(S, d)
        if res > tol:
            raise NotSymplecticError(
                f"S^T J S - J has max-norm {res:.3e} > tol {tol:.1e}", residual=res)
        return cls(d, _frozen(S), res)

    # blocks of the 2x2 decomposition
    @property
    def A(self) -> np.ndarray:
        return self.data[: self.d, : self.d]

    @property
    def B(self) -> np.ndarray:
        return self.data[: self.d, self.d:]

    @property
    def C(self) -> np.ndarray:
        return self.data[self.d:, : self.d]

    @property
    def D(self) -> np.ndarray:
        return self.data[self.d:, self.d:]

    def matrix(self) -> np.ndarray:
        return self.data

    def inverse(self) -> "SymplecticMatrix":
        return SymplecticMatrix.from_array(symplectic_inverse(self.data))

    def __matmul__(self, other: "SymplecticMatrix") -> "SymplecticMatrix":
        return SymplecticMatrix.from_array(self.data @ _as_array(other))


# ---------------------------------------------------------------- 4d x 4d

def relation_residuals(M, d: int | None = None) -> dict[str, float]:
    """Residuals of the ten block relations (R1a)-(R3d) of ``Sp(2d)``."""
    M = np.asarray(M, dtype=float)
    if d is None:
        if M.shape[0] % 4:
            raise DimensionError(f"expected a 4d x 4d matrix, got {M.shape}")
        d = M.shape[0] // 4
    if M.shape != (4 * d, 4 * d):
        raise DimensionError(f"expected a {4 * d}x{4 * d} matrix, got {M.shape}")

    def a(i, j):
        return M[(i - 1) * d: i * d, (j - 1) * d: j * d]

    I = np.eye(d)
    lhs_rhs = {
        "R1a": (a(1, 1).T @ a(3, 1) + a(2, 1).T @ a(4, 1),
                a(3, 1).T @ a(1, 1) + a(4, 1).T @ a(2, 1)),
        "R1b": (a(1, 1).T @ a(3, 2) + a(2, 1).T @ a(4, 2),
                a(3, 1).T @ a(1, 2) + a(4, 1).T @ a(2, 2)),
        "R1c": (a(1, 2).T @ a(3, 2) + a(2, 2).T @ a(4, 2),
                a(3, 2).T @ a(1, 2) + a(4, 2).T @ a(2, 2)),
        "R2a": (a(1, 3).T @ a(3, 3) + a(2, 3).T @ a(4, 3),
                a(3, 3).T @ a(1, 3) + a(4, 3).T @ a(2, 3)),
        "R2b": (a(1, 3).T @ a(3, 4) + a(2, 3).T @ a(4, 4),
                a(3, 3).T @ a(1, 4) + a(4, 3).T @ a(2, 4)),
        "R2c": (a(1, 4).T @ a(3, 4) + a(2, 4).T @ a(4, 4),
                a(3, 4).T @ a(1, 4) + a(4, 4).T @ a(2, 4)),
        "R3a": (a(1, 1).T @ a(3, 3) + a(2, 1).T @ a(4, 3)
                - (a(3, 1).T @ a(1, 3) + a(4, 1).T @ a(2, 3)), I),
        "R3b": (a(1, 1).T @ a(3, 4) + a(2, 1).T @ a(4, 4),
                a(3, 1).T @ a(1, 4) + a(4, 1).T @ a(2, 4)),
        "R3c": (a(1, 2).T @ a(3, 3) + a(2, 2).T @ a(4, 3),
                a(3, 2).T @ a(1, 3) + a(4, 2).T @ a(2, 3)),
        "R3d": (a(1, 2).T @ a(3, 4) + a(2, 2).T @ a(4, 4)
                - (a(3, 2).T @ a(1, 4) + a(4, 2).T @ a(2, 4)), I),
    }
    return {k: float(np.max(np.abs(l - r))) for k, (l, r) in lhs_rhs.items()}


@dataclass(frozen=True)
class BlockSymplectic:
    """A ``4d x 4d`` symplectic matrix read in ``d x d`` blocks.

    ``label`` is free-form provenance (preset name) carried into exports.
    """

    d: int
    data: np.ndarray
    residual: float
    label: str = field(default="custom", compare=False)

    @classmethod
    def from_array(cls, M, tol: float = DEFAULT_TOL, label: str = "custom") -> "BlockSymplectic":
        M = np.asarray(M, dtype=float)
        if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] % 4:
            raise DimensionError(f"expected a 4d x 4d matrix, got {M.shape}")
        if not np.all(np.isfinite(M)):
            raise NotSymplecticError("matrix has non-finite entries")
        d = M.shape[0] // 4
        rel = relation_residuals(M, d)
        worst = max(rel, key=rel.get)
        if rel[worst] > tol:
            raise NotSymplecticError(
                f"relation {worst} violated (residual {rel[worst]:.3e})",
                residual=rel[worst], relation=worst)
        res = check_symplectic(M, 2 * d)
        if res > tol:
            raise NotSymplecticError(f"S^T J S - J has max-norm {res:.3e}", residual=res)
        return cls(d, _frozen(M), res, label)

    def block(self, i: int, j: int) -> np.ndarray:
        """The ``d x d`` block ``A_ij`` (1-indexed)."""
        if not (1 <= i <= 4 and 1 <= j <= 4):
            raise IndexError(f"block index ({i}, {j}) outside 1..4")
        d = self.d
        return self.data[(i - 1) * d: i * d, (j - 1) * d: j * d]

    def matrix(self) -> np.ndarray:
        return self.data

    def relations(self) -> dict[str, float]:
        return relation_residuals(self.data, self.d)

    def as_symplectic(self) -> SymplecticMatrix:
        return SymplecticMatrix(2 * self.d, self.data, self.residual)

    def with_label(self, label: str) -> "BlockSymplectic":
        return BlockSymplectic(self.d, self.data, self.residual, label)

    # derived submatrices
    def E(self) -> np.ndarray:
        b = self.block
        return np.block([[b(1, 1), b(1, 3)], [b(2, 1), b(2, 3)]])

    def F(self) -> np.ndarray:
        b = self.block
        return np.block([[b(3, 1), b(3, 3)], [b(4, 1), b(4, 3)]])

    def Escript(self) -> np.ndarray:
        b = self.block
        return np.block([[b(1, 2), b(1, 4)], [b(2, 2), b(2, 4)]])

    def Fscript(self) -> np.ndarray:
        b = self.block
        return np.block([[b(3, 2), b(3, 4)], [b(4, 2), b(4, 4)]])


# ---------------------------------------------------------------- generators

@dataclass(frozen=True)
class GeneratorFactor:
    """Base class of the elementary generators."""

    d: int

    def matrix(self) -> np.ndarray:
        raise NotImplementedError


@dataclass(frozen=True)
class FourierJ(GeneratorFactor):
    """The Fourier transform; projects to ``J``."""

    def matrix(self) -> np.ndarray:
        return std_J(self.d)


@dataclass(frozen=True, init=False)
class Dilation(GeneratorFactor):
    """``f -> |det E|^{1/2} f(E .)``; projects to ``D_E = diag(E^{-1}, E^T)``."""

    E: np.ndarray

    def __init__(self, E):
        E = np.atleast_2d(np.asarray(E, dtype=float))
        if E.ndim != 2 or E.shape[0] != E.shape[1]:
            raise InvalidFactorError(f"dilation matrix must be square, got {E.shape}")
        if not is_well_conditioned(E):
            raise InvalidFactorError("dilation matrix is singular")
        object.__setattr__(self, "d", E.shape[0])
        object.__setattr__(self, "E", _frozen(E))

    def matrix(self) -> np.ndarray:
        z = np.zeros((self.d, self.d))
        return np.block([[np.linalg.inv(self.E), z], [z, self.E.T]])

    def __eq__(self, other):
        return type(other) is Dilation and np.array_equal(self.E, other.E)

    def __hash__(self):
        return hash(("Dilation", self.E.tobytes()))


def _check_sym(C, what):
    C = np.atleast_2d(np.asarray(C, dtype=float))
    if C.ndim != 2 or C.shape[0] != C.shape[1]:
        raise InvalidFactorError(f"{what} matrix must be square, got {C.shape}")
    if np.max(np.abs(C - C.T), initial=0.0) > DEFAULT_TOL * max(1.0, np.max(np.abs(C))):
        raise InvalidFactorError(f"{what} matrix is not symmetric")
    return _frozen((C + C.T) / 2)


@dataclass(frozen=True, init=False)
class ChirpLower(GeneratorFactor):
    """Multiplication by ``exp(pi i t.Ct)``; projects to ``V_C``."""

    C: np.ndarray

    def __init__(self, C):
        C = _check_sym(C, "chirp")
        object.__setattr__(self, "d", C.shape[0])
        object.__setattr__(self, "C", C)

    def matrix(self) -> np.ndarray:
        z, i = np.zeros((self.d, self.d)), np.eye(self.d)
        return np.block([[i, z], [self.C, i]])

    def __eq__(self, other):
        return type(other) is ChirpLower and np.array_equal(self.C, other.C)

    def __hash__(self):
        return hash(("ChirpLower", self.C.tobytes()))


@dataclass(frozen=True, init=False)
class ChirpUpper(GeneratorFactor):
    """``F Phi_{-C} F^{-1}``; projects to ``V_C^T``."""

    C: np.ndarray

    def __init__(self, C):
        C = _check_sym(C, "chirp")
        object.__setattr__(self, "d", C.shape[0])
        object.__setattr__(self, "C", C)

    def matrix(self) -> np.ndarray:
        z, i = np.zeros((self.d, self.d)), np.eye(self.d)
        return np.block([[i, self.C], [z, i]])

    def __eq__(self, other):
        return type(other) is ChirpUpper and np.array_equal(self.C, other.C)

    def __hash__(self):
        return hash(("ChirpUpper", self.C.tobytes()))


def make_generator(f: GeneratorFactor) -> SymplecticMatrix:
    """Symplectic projection of a generator factor."""
    return SymplecticMatrix.from_array(f.matrix())


Factor = Union[GeneratorFactor, SymplecticMatrix, BlockSymplectic]


def _as_array(x) -> np.ndarray:
    if isinstance(x, (GeneratorFactor, SymplecticMatrix, BlockSymplectic)):
        return np.asarray(x.matrix())
    return np.asarray(x, dtype=float)


def product(factors: Iterable[Factor]) -> np.ndarray:
    """Left-to-right matrix product of a factor list."""
    mats = [_as_array(f) for f in factors]
    if not mats:
        raise ValueError("empty factor list")
    return reduce(np.matmul, mats)


# ---------------------------------------------------------------- derived data

@dataclass(frozen=True)
class DerivedPack:
    """Submatrices attached to a ``4d x 4d`` symplectic matrix.

    ``G`` and ``delta`` are ``None`` unless ``shift_invertible``.
    """

    E: np.ndarray
    F: np.ndarray
    Escript: np.ndarray
    Fscript: np.ndarray
    M: np.ndarray
    B: np.ndarray
    G: np.ndarray | None
    delta: np.ndarray | None
    shift_invertible: bool
    covariant: bool
    det_E: float


def is_covariant(A: BlockSymplectic, tol: float = COVARIANCE_TOL) -> bool:
    """Exact structural test against the Cohen-class block pattern.

    The pattern is::

        [[A11, I - A11, A13,      A13  ],
         [A21, -A21,    I - A11^T, -A11^T],
         [0,   0,       I,        I    ],
         [-I,  I,       0,        0    ]]

    with ``A13`` and ``A21`` symmetric.
    """
    d = A.d
    A11, A13, A21 = A.block(1, 1), A.block(1, 3), A.block(2, 1)
    pattern = _covariant_array(A11, A13, A21, d)
    if np.max(np.abs(A.data - pattern)) > tol:
        return False
    return bool(np.max(np.abs(A13 - A13.T), initial=0) <= tol
                and np.max(np.abs(A21 - A21.T), initial=0) <= tol)


def _covariant_array(A11, A13, A21, d):
    I, Z = np.eye(d), np.zeros((d, d))
    return np.block([
        [A11, I - A11, A13, A13],
        [A21, -A21, I - A11.T, -A11.T],
        [Z, Z, I, I],
        [-I, I, Z, Z],
    ])


def cohen_B(A: BlockSymplectic) -> np.ndarray:
    """``B_A = [[A13, I/2 - A11], [I/2 - A11^T, -A21]]``."""
    d = A.d
    A11, A13, A21 = A.block(1, 1), A.block(1, 3), A.block(2, 1)
    h = 0.5 * np.eye(d)
    return np.block([[A13, h - A11], [h - A11.T, -A21]])


def derived_pack(A: BlockSymplectic) -> DerivedPack:
    """All derived submatrices, flags and (when defined) ``G`` and ``delta``."""
    d = A.d
    E, F, Es, Fs = A.E(), A.F(), A.Escript(), A.Fscript()
    M = E.T @ F - P_matrix(d)
    M = (M + M.T) / 2
    si = is_well_conditioned(E)
    G = delta = None
    if si:
        EinvEs = np.linalg.solve(E, Es)
        G = L_matrix(d) @ EinvEs
        delta = -EinvEs @ Q_matrix(d)
    return DerivedPack(
        E=_frozen(E), F=_frozen(F), Escript=_frozen(Es), Fscript=_frozen(Fs),
        M=_frozen(M), B=_frozen(cohen_B(A)),
        G=None if G is None else _frozen(G),
        delta=None if delta is None else _frozen(delta),
        shift_invertible=si, covariant=is_covariant(A),
        det_E=float(np.linalg.det(E)),
    )


# ---------------------------------------------------------------- constructions

def _as_sp(S) -> SymplecticMatrix:
    if isinstance(S, SymplecticMatrix):
        return S
    if isinstance(S, BlockSymplectic):
        return S.as_symplectic()
    return SymplecticMatrix.from_array(S)


def lift(S) -> BlockSymplectic:
    """Matrix of ``f (x) g -> f (x) S^ g`` in ``Sp(2d)``.

    Raises
    ------
    NotSymplecticError
        If ``S`` is not symplectic.
    """
    S = _as_sp(S)
    d = S.d
    I, Z = np.eye(d), np.zeros((d, d))
    M = np.block([
        [I, Z, Z, Z],
        [Z, S.A, Z, S.B],
        [Z, Z, I, Z],
        [Z, S.C, Z, S.D],
    ])
    return BlockSymplectic.from_array(M, label="lift")


def bar(S) -> SymplecticMatrix:
    """Sign flip of the off-diagonal blocks: the matrix intertwined by conjugation."""
    S = _as_sp(S)
    return SymplecticMatrix.from_array(_bar_array(S.data))


def star(A: BlockSymplectic) -> BlockSymplectic:
    """The matrix ``A_*`` with ``W_A(g, f) = conj(W_{A_*}(f, g))``."""
    b = A.block
    M = np.block([
        [b(1, 2), b(1, 1), -b(1, 4), -b(1, 3)],
        [b(2, 2), b(2, 1), -b(2, 4), -b(2, 3)],
        [-b(3, 2), -b(3, 1), b(3, 4), b(3, 3)],
        [-b(4, 2), -b(4, 1), b(4, 4), b(4, 3)],
    ])
    return BlockSymplectic.from_array(M, label=f"star({A.label})")


@dataclass(frozen=True)
class Factorization:
    factors: tuple
    product_residual: float


def factorize_shift_invertible(A: BlockSymplectic) -> Factorization:
    """``A = D_{E^{-1}} V_M V_L^T Lift(G)`` for shift-invertible ``A``.

    Raises
    ------
    NotShiftInvertibleError
        If ``E`` is numerically singular.
    """
    pack = derived_pack(A)
    if not pack.shift_invertible:
        raise NotShiftInvertibleError("E_A is singular; no STFT factorization")
    d = A.d
    factors = (
        Dilation(np.linalg.inv(pack.E)),
        ChirpLower(pack.M),
        ChirpUpper(L_matrix(d)),
        lift(SymplecticMatrix.from_array(pack.G, tol=1e-8)),
    )
    res = float(np.max(np.abs(product(factors) - A.data)))
    return Factorization(factors, res)


def _is_identity(f: GeneratorFactor) -> bool:
    if isinstance(f, Dilation):
        return bool(np.array_equal(f.E, np.eye(f.d)))
    if isinstance(f, (ChirpLower, ChirpUpper)):
        return not np.any(f.C)
    return False


def simplify(factors: Sequence[GeneratorFactor]) -> list[GeneratorFactor]:
    """Drop identity factors and merge neighbouring factors of the same kind."""
    out: list[GeneratorFactor] = []
    for f in factors:
        if _is_identity(f):
            continue
        if out and type(out[-1]) is type(f) and not isinstance(f, FourierJ):
            prev = out.pop()
            if isinstance(f, Dilation):
                # D_{E1} D_{E2} = D_{E2 E1}
                merged = Dilation(f.E @ prev.E)
            else:
                merged = type(f)(prev.C + f.C)
            if not _is_identity(merged):
                out.append(merged)
            continue
        out.append(f)
    return out


def _free_factors(S: np.ndarray, d: int) -> list[GeneratorFactor]:
    A, B, D = S[:d, :d], S[:d, d:], S[d:, d:]
    Binv = np.linalg.inv(B)
    return [ChirpLower(D @ Binv), Dilation(Binv), FourierJ(d), ChirpLower(Binv @ A)]


def _sorted_singular_ratio(M):
    s = np.linalg.svd(M, compute_uv=False)
    return float(s[-1] / s[0]) if s[0] > 0 else 0.0


def free_factorize(S, tol: float = DEFAULT_TOL, seed: int = 0) -> list[GeneratorFactor]:
    """Ordered generator factors whose left-to-right product is ``S``.

    A matrix with invertible ``B`` block is *free* and splits as
    ``V_{DB^{-1}} D_{B^{-1}} J V_{B^{-1}A}``.  Otherwise a symmetric ``W``
    with ``A + BW`` invertible is searched (``wI`` for a fixed list of
    ``w``, then seeded random symmetric matrices) and ``S`` is written as
    the product of the two free matrices ``S V_W J`` and ``(S V_W J)^{-1} S``.
    Block-diagonal, pure-chirp and ``J`` inputs return a single factor.

    Raises
    ------
    FactorizationError
        If no regularizing ``W`` is found or the product check fails.
    """
    Sm = _as_sp(S)
    d, M = Sm.d, np.array(Sm.data)
    I, Z = np.eye(d), np.zeros((d, d))
    A, B, C, D = Sm.A, Sm.B, Sm.C, Sm.D
    direct = None
    if not np.any(B) and not np.any(C):
        direct = [Dilation(np.linalg.inv(A))]
    elif not np.any(B) and np.array_equal(A, I) and np.array_equal(D, I):
        direct = [ChirpLower(C)]
    elif not np.any(C) and np.array_equal(A, I) and np.array_equal(D, I):
        direct = [ChirpUpper(B)]

    diagnostics: dict = {"tried": []}
    if direct is not None:
        factors = direct
    elif is_well_conditioned(B):
        factors = _free_factors(M, d)
    else:
        candidates = [w * I for w in (0.0, 1.0, -1.0, 2.0, -2.0, 0.5, -0.5)]
        rng = np.random.default_rng(seed)
        for _ in range(16):
            R = rng.uniform(-2, 2, size=(d, d))
            candidates.append((R + R.T) / 2)
        factors = None
        for W in candidates:
            ratio = _sorted_singular_ratio(A + B @ W)
            diagnostics["tried"].append(ratio)
            if ratio > SHIFT_INVERTIBLE_RTOL:
                VW = np.block([[I, Z], [W, I]])
                S1 = M @ VW @ std_J(d)
                S2 = symplectic_inverse(S1) @ M
                factors = _free_factors(S1, d) + _free_factors(S2, d)
                break
        if factors is None:
            raise FactorizationError("no regularizing chirp found", diagnostics)
    factors = simplify(factors)
    if not factors:
        factors = []
    res = float(np.max(np.abs(product(factors) - M))) if factors else float(
        np.max(np.abs(M - np.eye(2 * d))))
    scale = max(1.0, float(np.max(np.abs(M))))
    if res > max(tol, 1e-12) * scale * 10:
        diagnostics["residual"] = res
        raise FactorizationError(f"factor product residual {res:.3e}", diagnostics)
    return factors


# ---------------------------------------------------------------- presets

def a_st(d: int = 1) -> BlockSymplectic:
    """Matrix of the short-time Fourier transform."""
    I, Z = np.eye(d), np.zeros((d, d))
    M = np.block([[I, -I, Z, Z], [Z, Z, I, I], [Z, Z, Z, -I], [-I, Z, Z, Z]])
    return BlockSymplectic.from_array(M, label="a_st")


def a_tau(tau: float, d: int = 1) -> BlockSymplectic:
    """Matrix of the tau-Wigner distribution (tau = 0: Rihaczek)."""
    I, Z = np.eye(d), np.zeros((d, d))
    t = float(tau)
    M = np.block([
        [(1 - t) * I, t * I, Z, Z],
        [Z, Z, t * I, -(1 - t) * I],
        [Z, Z, I, I],
        [-I, I, Z, Z],
    ])
    return BlockSymplectic.from_array(M, label=f"a_tau:{t!r}")


def a_hbar(hbar: float, d: int = 1) -> BlockSymplectic:
    """Matrix of the hbar-scaled STFT; ``E = diag(I, 2 pi hbar I)``."""
    if hbar <= 0:
        raise ValueError("hbar must be positive")
    I, Z = np.eye(d), np.zeros((d, d))
    h = 2 * np.pi * hbar
    M = np.block([
        [I, -I, Z, Z],
        [Z, Z, h * I, h * I],
        [Z, Z, 0.5 * I, -0.5 * I],
        [-I / (2 * h), -I / (2 * h), Z, Z],
    ])
    return BlockSymplectic.from_array(M, label=f"a_hbar:{hbar!r}")


def a_ft2(d: int = 1) -> BlockSymplectic:
    """Matrix of the partial Fourier transform in the second variable."""
    I, Z = np.eye(d), np.zeros((d, d))
    M = np.block([[I, Z, Z, Z], [Z, Z, Z, I], [Z, Z, I, Z], [Z, -I, Z, Z]])
    return BlockSymplectic.from_array(M, label="a_ft2")


def covariant(A11, A13, A21, d: int | None = None) -> BlockSymplectic:
    """Covariant (Cohen-class) matrix from its free blocks.

    Raises
    ------
    NotSymplecticError
        If ``A13`` or ``A21`` is not symmetric.
    """
    A11, A13, A21 = (np.atleast_2d(np.asarray(x, dtype=float)) for x in (A11, A13, A21))
    d = A11.shape[0] if d is None else d
    for name, X in (("A11", A11), ("A13", A13), ("A21", A21)):
        if X.shape != (d, d):
            raise DimensionError(f"{name} must be {d}x{d}, got {X.shape}")
    for name, X in (("A13", A13), ("A21", A21)):
        if np.max(np.abs(X - X.T)) > COVARIANCE_TOL:
            raise NotSymplecticError(f"{name} must be symmetric", relation=name)
    return BlockSymplectic.from_array(_covariant_array(A11, A13, A21, d), label="covariant")


def a_precomposed(S) -> BlockSymplectic:
    """Matrix of ``W(f, g) = V_g(S^ f)``; its ``E`` block equals ``S``."""
    S = _as_sp(S)
    d = S.d
    I, Z = np.eye(d), np.zeros((d, d))
    M = np.block([
        [S.A, -I, S.B, Z],
        [S.C, Z, S.D, I],
        [Z, Z, Z, -I],
        [-S.A, Z, -S.B, Z],
    ])
    return BlockSymplectic.from_array(M, label="precomposed")


PRESET_NAMES = ("a_st", "a_tau", "a_hbar", "a_ft2", "covariant")


def parse_preset(spec: str, d: int = 1) -> BlockSymplectic:
    """Build a preset from ``name`` or ``name:param`` (e.g. ``a_tau:0.25``).

    ``covariant:a11,a13,a21`` takes scalar multiples of the identity.
    """
    name, _, arg = spec.partition(":")
    name = name.strip()
    if name == "a_st":
        return a_st(d)
    if name == "a_ft2":
        return a_ft2(d)
    if name == "a_tau":
        return a_tau(float(arg) if arg else 0.5, d)
    if name == "a_hbar":
        return a_hbar(float(arg) if arg else 1 / (4 * np.pi), d)
    if name == "covariant":
        vals = [float(v) for v in arg.split(",")] if arg else [0.5, 0.0, 0.0]
        if len(vals) != 3:
            raise ValueError("covariant preset takes three scalars a11,a13,a21")
        I = np.eye(d)
        return covariant(vals[0] * I, vals[1] * I, vals[2] * I, d)
    raise ValueError(f"unknown matrix preset {spec!r}")


# ---------------------------------------------------------------- random matrices

def random_factor(rng: np.random.Generator, d: int) -> GeneratorFactor:
    """One random generator with entries from U[-2, 2] (regularized)."""
    kind = rng.integers(4)
    if kind == 0:
        return FourierJ(d)
    R = rng.uniform(-2, 2, size=(d, d))
    if kind == 1:
        # keep singular values away from 0 so that products stay moderate
        U, s, Vt = np.linalg.svd(R)
        s = np.clip(s, 0.5, 2.0)
        return Dilation(U @ np.diag(s) @ Vt)
    C = (R + R.T) / 2
    return ChirpLower(C) if kind == 2 else ChirpUpper(C)


def random_symplectic(rng: np.random.Generator, d: int,
                      n_factors: tuple[int, int] = (3, 6)) -> SymplecticMatrix:
    """Product of 3-6 random generator factors."""
    k = int(rng.integers(n_factors[0], n_factors[1] + 1))
    return SymplecticMatrix.from_array(product([random_factor(rng, d) for _ in range(k)]))


def random_shift_invertible(rng: np.random.Generator, d: int = 1,
                            max_tries: int = 1000) -> BlockSymplectic:
    """Random element of ``Sp(2d)`` whose ``E`` block is invertible."""
    for _ in range(max_tries):
        S = random_symplectic(rng, 2 * d)
        A = BlockSymplectic.from_array(S.data, label="random")
        if is_well_conditioned(A.E(), 1e-3):
            return A
    raise RuntimeError("could not draw a shift-invertible matrix")
