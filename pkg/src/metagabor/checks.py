"""Invariant checks behind ``metagabor verify``.

Every check returns ``(value, tolerance)`` and passes when
``value < tolerance``.  Presets are looked up through their modules at
call time, so a patched preset is seen by the suite.
"""
from __future__ import annotations

import math
import time
from typing import Callable

import numpy as np

from . import frames, metop, mwd, sigrid, symplin, tfspaces

SUITES: dict[str, list[tuple[str, Callable]]] = {}


def check(suite: str, name: str):
    def deco(fn):
        SUITES.setdefault(suite, []).append((name, fn))
        return fn
    return deco


def _presets():
    return [symplin.a_st(1), symplin.a_tau(0.25), symplin.a_tau(0.5),
            symplin.a_tau(0.75), symplin.a_hbar(1 / (4 * np.pi))]


def _rel(a, b):
    return abs(a - b) / max(abs(b), 1e-300)


# ---------------------------------------------------------------- symplin

@check("symplin", "random products are symplectic")
def _c_random_products(seed):
    rng = np.random.default_rng(seed)
    worst = max(symplin.check_symplectic(symplin.random_symplectic(rng, 2).data, 2)
                for _ in range(50))
    return worst, 1e-10


@check("symplin", "preset block relations")
def _c_relations(seed):
    mats = _presets() + [symplin.a_ft2(1)]
    return max(max(symplin.relation_residuals(A.data).values()) for A in mats), 1e-8


@check("symplin", "G symplectic, det Es = (-1)^d det E, delta = J bar(G)")
def _c_delta_identities(seed):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for A in _presets() + [symplin.random_shift_invertible(rng) for _ in range(10)]:
        p = symplin.derived_pack(A)
        worst = max(worst, symplin.check_symplectic(p.G, 1),
                    abs(np.linalg.det(p.Escript) - (-1) ** A.d * p.det_E),
                    np.max(np.abs(p.delta - symplin.std_J(1) @ symplin._bar_array(p.G))))
    return worst, 1e-8


@check("symplin", "shift-invertible factorization reconstructs A")
def _c_factorization(seed):
    rng = np.random.default_rng(seed)
    mats = _presets() + [symplin.random_shift_invertible(rng) for _ in range(10)]
    return max(symplin.factorize_shift_invertible(A).product_residual for A in mats), 1e-10


@check("symplin", "free factorization reconstructs S")
def _c_free(seed):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(20):
        S = symplin.random_symplectic(rng, 1)
        worst = max(worst, np.max(np.abs(symplin.product(symplin.free_factorize(S)) - S.data)))
    return worst, 1e-9


@check("symplin", "covariance flags (a_tau yes, a_st no)")
def _c_covariance(seed):
    ok = (all(symplin.is_covariant(symplin.a_tau(t)) for t in (0.25, 0.5, 0.75))
          and symplin.is_covariant(symplin.covariant(0.3, 0.2, -0.1))
          and not symplin.is_covariant(symplin.a_st(1)))
    return (0.0 if ok else 1.0), 0.5


# ---------------------------------------------------------------- sigrid / metop

@check("sigrid", "cdft is unitary and maps the Gaussian to itself")
def _c_cdft(seed):
    G = sigrid.default_grid()
    g = sigrid.from_function(lambda t: np.exp(-np.pi * t ** 2), G)
    return sigrid.distance(sigrid.cdft(g), g), 1e-10


@check("sigrid", "dilation by 2 of a Gaussian")
def _c_dilation(seed):
    G = sigrid.default_grid()
    g = sigrid.from_function(lambda t: np.exp(-np.pi * t ** 2), G)
    out = sigrid.resample(g, 2.0)
    ref = sigrid.from_function(lambda t: np.exp(-np.pi * (2 * t) ** 2), G)
    return float(np.max(np.abs(out.values - ref.values))), 1e-6


@check("metop", "apply(S) is unitary")
def _c_unitary(seed):
    g = sigrid.gaussian(sigrid.default_grid())
    # moderate factors keep the Gaussian inside the grid band
    lists = (
        [symplin.FourierJ(1)],
        [symplin.Dilation(1.5), symplin.ChirpLower(0.5)],
        [symplin.ChirpUpper(0.5), symplin.FourierJ(1), symplin.Dilation(0.75)],
        [symplin.ChirpLower(-1.0), symplin.ChirpUpper(0.7), symplin.Dilation(1.25)],
    )
    return max(abs(metop.apply(symplin.product(fs), g).norm() - 1) for fs in lists), 1e-6


@check("metop", "deformation projects to delta")
def _c_deformation(seed):
    worst = 0.0
    for A in _presets():
        op = metop.deformation_op(A)
        worst = max(worst, np.max(np.abs(op.matrix() - symplin.derived_pack(A).delta)))
    return worst, 1e-8


@check("metop", "Fourier transform of a chirp is flat")
def _c_chirp(seed):
    return metop.chirp_ft_measurement(2.0)["flatness"], 0.05


# ---------------------------------------------------------------- mwd

def _hermites(ks, grid=None):
    grid = grid or sigrid.default_grid()
    return [sigrid.hermite(grid, k) for k in ks]


@check("mwd", "Moyal identity on the reference path")
def _c_moyal(seed):
    f1, f2, g1, g2 = _hermites((0, 1, 2, 3))
    G = sigrid.gaussian(sigrid.default_grid())
    worst = 0.0
    for A in (symplin.a_st(1), symplin.a_tau(0.5)):
        for a, b, c, d in ((f1, G, f1, G), (f2, g1, f2, g1), (f1 + f2, G, f1 + f2, G)):
            lhs = mwd.field_inner(mwd.wigner_ref(A, a, b), mwd.wigner_ref(A, c, d))
            rhs = sigrid.inner(a, c) * np.conj(sigrid.inner(b, d))
            worst = max(worst, abs(lhs - rhs) / abs(rhs))
    return worst, 1e-5


@check("mwd", "fast path matches reference path")
def _c_fast(seed):
    f, g = _hermites((2,))[0], sigrid.gaussian(sigrid.default_grid())
    worst = 0.0
    for A in _presets():
        r = mwd.compare_fields(mwd.wigner_fast(A, f, g), mwd.wigner_ref(A, f, g))
        worst = max(worst, r["max_error"])
    return worst, 1e-4


@check("mwd", "a_st coincides with the STFT")
def _c_stft(seed):
    f, g = _hermites((1,))[0], sigrid.gaussian(sigrid.default_grid())
    A = symplin.a_st(1)
    r1 = mwd.compare_fields(mwd.wigner_fast(A, f, g), mwd.stft(f, g))
    r2 = mwd.compare_fields(mwd.wigner_ref(A, f, g), mwd.stft(f, g))
    return max(r1["max_error"], r2["max_error"]), 1e-8


@check("mwd", "inversion formula")
def _c_inversion(seed):
    f, g = _hermites((3,))[0], sigrid.gaussian(sigrid.default_grid())
    worst = 0.0
    for A in (symplin.a_st(1), symplin.a_tau(0.5)):
        ft = mwd.inversion(A, mwd.wigner_fast(A, f, g), g, g)
        worst = max(worst, mwd.reconstruction_error(f, ft))
    return worst, 1e-4


@check("mwd", "star relation")
def _c_star(seed):
    f, g = _hermites((1,))[0], sigrid.gaussian(sigrid.default_grid())
    return max(mwd.star_check(A, f, g) for A in (symplin.a_st(1), symplin.a_tau(0.25))), 1e-4


@check("mwd", "atom duality and inverse")
def _c_atoms(seed):
    grid = sigrid.default_grid()
    f, g = sigrid.hermite(grid, 2), sigrid.gaussian(grid)
    A = symplin.a_tau(0.5)
    W = mwd.wigner_fast(A, f, g)
    X, XI = W.nodes()
    worst = 0.0
    for k, j in ((128, 128), (140, 120), (100, 150)):
        z = (X[k, j], XI[k, j])
        worst = max(worst, abs(sigrid.inner(f, mwd.atom(A, z, g)) - W.values[k, j]))
        back = mwd.atom_inv(A, z, mwd.atom(A, z, f), form="direct")
        worst = max(worst, sigrid.phase_aligned_error(back.values, f.values)[0])
    return worst, 1e-6


@check("mwd", "Cohen kernel for a_tau(1/4)")
def _c_cohen(seed):
    g = sigrid.gaussian(sigrid.default_grid())
    return mwd.cohen_check(symplin.a_tau(0.25), g, g), 1e-3


# ---------------------------------------------------------------- frames

@check("frames", "metaplectic and equivalent bounds agree")
def _c_frame_equiv(seed):
    g = sigrid.gaussian(frames.frame_grid())
    worst = 0.0
    for A in (symplin.a_st(1), symplin.a_tau(0.5)):
        rows = frames.equivalence_table(frames.system(A, g))
        for r in rows[1:]:
            if r["A"] is None:
                continue
            worst = max(worst, _rel(r["A"], rows[0]["A"]), _rel(r["B"], rows[0]["B"]))
    return worst, 1e-4


@check("frames", "canonical dual reconstruction")
def _c_frame_rec(seed):
    grid = frames.frame_grid()
    g, f = sigrid.gaussian(grid), sigrid.hermite(grid, 3)
    worst = 0.0
    for A in (symplin.a_st(1), symplin.a_tau(0.5)):
        s = frames.system(A, g)
        worst = max(worst, (frames.reconstruct(s, f, frames.canonical_dual(s)) - f).norm() / f.norm())
    return worst, 1e-6


@check("frames", "frame operator is Hermitian")
def _c_hermitian(seed):
    g = sigrid.gaussian(frames.frame_grid())
    Sm = frames.frame_op(frames.system(symplin.a_tau(0.5), g))
    return float(np.max(np.abs(Sm - Sm.conj().T))), 1e-10


# ---------------------------------------------------------------- tfspaces

@check("tfspaces", "Moyal for the p=q=2 modulation norm")
def _c_modnorm(seed):
    grid = sigrid.default_grid()
    f, g = sigrid.hermite(grid, 2), sigrid.gaussian(grid)
    spec = tfspaces.MixedNormSpec(2, 2)
    A = symplin.a_tau(0.5)
    dg = metop.deformation(A, g)
    return abs(tfspaces.mod_norm(f, A, g, spec) / (f.norm() * dg.norm()) - 1), 1e-5


@check("tfspaces", "p=q amalgam equals modulation norm")
def _c_amalgam(seed):
    grid = sigrid.default_grid()
    f, g = sigrid.hermite(grid, 3), sigrid.gaussian(grid)
    A = symplin.a_tau(0.5)
    worst = 0.0
    for p in (1, 2, math.inf):
        spec = tfspaces.MixedNormSpec(p, p)
        worst = max(worst, _rel(tfspaces.amalgam_norm(f, A, g, spec), tfspaces.mod_norm(f, A, g, spec)))
    return worst, 1e-6


@check("tfspaces", "equivalence ratios bounded on a_tau(1/2)")
def _c_equiv(seed):
    grid = sigrid.default_grid()
    g = sigrid.gaussian(grid)
    corpus = [sigrid.hermite(grid, k) for k in range(9)]
    r = tfspaces.equivalence_report(symplin.a_tau(0.5), g, tfspaces.MixedNormSpec(1, 2), corpus)
    return r["spread"], 10.0


# ---------------------------------------------------------------- driver

SUITE_ORDER = ("symplin", "sigrid", "metop", "mwd", "frames", "tfspaces")


def run(suite: str = "all", seed: int = 0, timing: bool = False) -> dict:
    """Run one or all suites; the summary lists every result in order."""
    names = SUITE_ORDER if suite == "all" else (suite,)
    unknown = [s for s in names if s not in SUITES]
    if unknown:
        raise ValueError(f"unknown suite {unknown[0]!r}; choose from all, {', '.join(SUITE_ORDER)}")
    results = []
    for s in names:
        for name, fn in SUITES[s]:
            t0 = time.perf_counter()
            try:
                value, tol = fn(seed)
                value = float(value)
                ok = bool(np.isfinite(value) and value < tol)
                err = None
            except Exception as e:  # a crash is a failure with a message
                value, tol, ok, err = math.nan, math.nan, False, f"{type(e).__name__}: {e}"
            item = {"suite": s, "check": name, "passed": ok, "value": value, "tolerance": tol}
            if err:
                item["error"] = err
            if timing:
                item["seconds"] = time.perf_counter() - t0
            results.append(item)
    failed = [r for r in results if not r["passed"]]
    return {
        "suite": suite,
        "seed": seed,
        "passed": not failed,
        "total": len(results),
        "failures": len(failed),
        "first_failure": f"{failed[0]['suite']}: {failed[0]['check']}" if failed else None,
        "results": results,
    }
