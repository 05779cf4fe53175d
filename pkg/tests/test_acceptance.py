"""Acceptance criteria 1-11 at desk scale (d=1, n=256, T=16; frames on n=48).

Each test records one PASS/FAIL line, printed in the terminal summary and
to stdout (visible with ``-s``).  Tolerances are the contract values.
"""
import math

import numpy as np

from metagabor import frames, metop, mwd, sigrid, symplin as sp, tfspaces as tf

from conftest import ACCEPTANCE

INF = math.inf
HBAR = 1 / (4 * math.pi)


def record(k, title, ok, detail):
    line = f"criterion {k:2d} {'PASS' if ok else 'FAIL'}  {title}: {detail}"
    ACCEPTANCE[k] = line
    print(line)
    assert ok, line


def presets():
    return [sp.a_st(1), sp.a_tau(0.25), sp.a_tau(0.5), sp.a_tau(0.75), sp.a_hbar(HBAR)]


def test_criterion_01_symplectic_algebra():
    rng = np.random.default_rng(20240101)
    J = sp.std_J(1)
    worst_sp = worst_rel = worst_ident = 0.0
    n_si = 0
    for _ in range(200):
        M = sp.random_symplectic(rng, 2).data
        worst_sp = max(worst_sp, sp.check_symplectic(M, 2))
        worst_rel = max(worst_rel, max(sp.relation_residuals(M, 1).values()))
        A = sp.BlockSymplectic.from_array(M, tol=1e-8)
        p = sp.derived_pack(A)
        if not p.shift_invertible:
            continue
        n_si += 1
        E, F, Es, Fs = p.E, p.F, p.Escript, p.Fscript
        scale = max(1.0, np.linalg.cond(E))
        ident = [
            sp.check_symplectic(p.G, 1),
            abs(np.linalg.det(Es) - (-1) ** A.d * np.linalg.det(E)) / max(1, abs(np.linalg.det(E))),
            np.max(np.abs(Fs - np.linalg.solve(E.T, F.T @ Es))) / scale,
            np.max(np.abs(p.delta - J @ sp._bar_array(p.G))),
            np.max(np.abs(p.delta + np.linalg.solve(E, Es) @ sp.Q_matrix(1))),
        ]
        worst_ident = max(worst_ident, *ident)
    for A in presets():
        worst_rel = max(worst_rel, max(A.relations().values()))
    ok = worst_sp < 1e-10 and worst_rel < 1e-8 and worst_ident < 1e-8 and n_si > 0
    record(1, "symplectic algebra", ok,
           f"max residual {worst_sp:.2e} (<1e-10), relations {worst_rel:.2e}, "
           f"delta identities {worst_ident:.2e} over {n_si} shift-invertible (<1e-8)")


def test_criterion_02_factorization():
    rng = np.random.default_rng(7)
    mats = presets() + [sp.random_shift_invertible(rng) for _ in range(50)]
    worst = max(sp.factorize_shift_invertible(A).product_residual for A in mats)
    record(2, "four-factor factorization", worst < 1e-10,
           f"max residual {worst:.2e} over {len(mats)} matrices (<1e-10)")


def test_criterion_03_moyal(grid):
    rng = np.random.default_rng(3)
    H = [sigrid.hermite(grid, k) for k in range(9)]
    mats = presets() + [sp.a_ft2(1), sp.a_tau(0.0)]
    worst = 0.0
    for i in range(20):
        a, b, c, d, e, f = rng.integers(0, 9, size=6)
        f1, f2 = H[a] + H[b] * 0.5, H[a] + H[c] * 0.5j
        g1, g2 = H[d] + H[e] * 0.5, H[d] - H[f] * 0.5
        A = mats[i % len(mats)]
        lhs = mwd.field_inner(mwd.wigner_ref(A, f1, g1), mwd.wigner_ref(A, f2, g2))
        rhs = sigrid.inner(f1, f2) * np.conj(sigrid.inner(g1, g2))
        worst = max(worst, abs(lhs - rhs) / abs(rhs))
    record(3, "Moyal identity (reference path)", worst < 1e-5,
           f"max relative error {worst:.2e} over 20 quadruples (<1e-5)")


def test_criterion_04_stft_reduction(grid, gauss, hermites):
    worst = 0.0
    for A in presets() + [sp.covariant(0.3, 0.2, -0.1)]:
        for f in (hermites[0], hermites[3]):
            r = mwd.compare_fields(mwd.wigner_fast(A, f, gauss), mwd.wigner_ref(A, f, gauss))
            worst = max(worst, r["max_error"])
    f = hermites[2]
    A = sp.a_st(1)
    V = mwd.stft(f, gauss)
    st = max(np.max(np.abs(mwd.wigner_fast(A, f, gauss).values - V.values)),
             mwd.compare_fields(mwd.wigner_ref(A, f, gauss), V)["max_error"])
    record(4, "fast path equals reference path", worst < 1e-4 and st < 1e-8,
           f"max deviation {worst:.2e} (<1e-4); a_st vs stft {st:.2e} (<1e-8)")


def test_criterion_05_inversion(gauss, hermites):
    worst = 0.0
    for A in (sp.a_st(1), sp.a_tau(0.5)):
        for f in hermites:
            ft = mwd.inversion(A, mwd.wigner_fast(A, f, gauss), gauss, gauss)
            worst = max(worst, mwd.reconstruction_error(f, ft))
    record(5, "inversion formula", worst < 1e-4,
           f"max relative error {worst:.2e} over Hermite 0..8 (<1e-4)")


def test_criterion_06_adjoint_star(gauss, hermites):
    star = max(mwd.star_check(A, f, gauss) for A in presets() for f in (hermites[1], hermites[4]))
    dual = 0.0
    for A in presets():
        f = hermites[3]
        W = mwd.wigner_fast(A, f, gauss)
        X, XI = W.nodes()
        for k, j in ((128, 128), (133, 121), (110, 140), (150, 100)):
            z = (X[k, j], XI[k, j])
            dual = max(dual, abs(sigrid.inner(f, mwd.atom(A, z, gauss)) - W.values[k, j]))
    record(6, "star relation and atom duality", star < 1e-4 and dual < 1e-8,
           f"star deviation {star:.2e} (<1e-4); duality {dual:.2e} (<1e-8)")


def test_criterion_07_atom_calculus(gauss, hermites):
    inv = bil = 0.0
    for A in presets():
        W = mwd.wigner_fast(A, gauss, gauss)
        X, XI = W.nodes()
        for k, j in ((128, 128), (136, 124), (120, 140)):
            z = (X[k, j], XI[k, j])
            f, h = hermites[2], hermites[1] + 0.5j * hermites[0]
            back = mwd.atom_inv(A, z, mwd.atom(A, z, f), form="direct")
            inv = max(inv, sigrid.phase_aligned_error(back.values, f.values)[0])
            lhs = sigrid.inner(mwd.atom(A, z, f), h)
            rhs = sigrid.inner(f, mwd.atom_adj(A, z, h, form="direct"))
            bil = max(bil, abs(lhs - rhs))
    record(7, "atom inverse and adjoint", inv < 1e-6 and bil < 1e-6,
           f"inverse {inv:.2e} (<1e-6); bilinear identity {bil:.2e} (<1e-6)")


def test_criterion_08_frames(fgrid, fgauss):
    bounds = recon = 0.0
    sandwich_ok = True
    rng = np.random.default_rng(8)
    for A in (sp.a_st(1), sp.a_tau(0.5), sp.a_hbar(HBAR)):
        s = frames.system(A, fgauss)
        assert s.lattice.redundancy == 3
        rows = frames.equivalence_table(s)
        for r in rows[1:]:
            bounds = max(bounds, abs(r["A"] / rows[0]["A"] - 1), abs(r["B"] / rows[0]["B"] - 1))
        dg = frames.canonical_dual_deformed(s)
        for k in (0, 2, 5, 8):
            f = sigrid.hermite(fgrid, k)
            recon = max(recon, (frames.reconstruct(s, f, deformed_gamma=dg) - f).norm() / f.norm())
        rep = frames.frame_bounds(s)
        Phi = frames.atoms(s, deformed=dg)
        for _ in range(20):
            f = sigrid.Signal(fgrid, rng.normal(size=fgrid.n) + 1j * rng.normal(size=fgrid.n))
            e = np.sum(np.abs(frames.analysis(s, f, Phi).values) ** 2) / f.norm() ** 2
            sandwich_ok &= bool(1 / rep.upper_B * (1 - 1e-9) <= e <= 1 / rep.lower_A * (1 + 1e-9))
    record(8, "metaplectic Gabor frames", bounds < 1e-4 and recon < 1e-6 and sandwich_ok,
           f"bound mismatch {bounds:.2e} (<1e-4); reconstruction {recon:.2e} (<1e-6); "
           f"dual sandwich on 20 signals {'ok' if sandwich_ok else 'violated'}")


def test_criterion_09_covariance_cohen(gauss):
    rng = np.random.default_rng(9)
    accept = [sp.a_tau(t) for t in (0.0, 0.25, 0.5, 0.75, 1.0)] + [
        sp.covariant(0.3, 0.2, -0.1), sp.covariant(0.5, 0.0, 0.0), sp.covariant(1.0, -0.4, 0.7)]
    reject = [sp.a_st(1), sp.a_hbar(HBAR), sp.a_ft2(1)] + [
        sp.random_shift_invertible(rng) for _ in range(10)]
    structural = all(sp.is_covariant(A) for A in accept) and not any(sp.is_covariant(A) for A in reject)
    cohen = mwd.cohen_check(sp.a_tau(0.25), gauss, gauss)
    record(9, "covariance test and Cohen kernel", structural and cohen < 1e-3,
           f"structural test {'exact' if structural else 'wrong'} on {len(accept)}+{len(reject)} "
           f"matrices; cohen a_tau(1/4) {cohen:.2e} (<1e-3)")


def test_criterion_10_norm_equivalence(gauss, hermites):
    A = sp.a_tau(0.5)
    exps = (0.5, 1, 2, INF)
    spread = 0.0
    oracle = 0.0
    for p in exps:
        for q in exps:
            r = tf.equivalence_report(A, gauss, tf.MixedNormSpec(p, q), hermites)
            spread = max(spread, r["spread"])
            # |W(f, g)(x, xi)| = 2 |V_g f(2x, 2xi)| for even g, so ratio = 2^{1 - 1/p - 1/q}
            e = 1 - (0 if p == INF else 1 / p) - (0 if q == INF else 1 / q)
            oracle = max(oracle, abs(r["ratio_min"] / 2 ** e - 1), abs(r["ratio_max"] / 2 ** e - 1))
    # golden: worst spread measured 1.0000000034692924 (p = q = 1/2)
    agree = 0.0
    for p in exps:
        spec = tf.MixedNormSpec(p, p)
        for f in hermites:
            m = tf.mod_norm(f, A, gauss, spec)
            agree = max(agree, abs(tf.amalgam_norm(f, A, gauss, spec) - m) / m)
    ok = spread < 10 and abs(spread - 1.0000000034692924) < 1e-6 and oracle < 1e-6 and agree < 1e-6
    record(10, "modulation / amalgam characterizations", ok,
           f"max spread {spread:.10f} (<10, golden 1.0000000035); closed-form ratio "
           f"deviation {oracle:.2e}; p=q amalgam vs modulation {agree:.2e} (<1e-6)")


def test_criterion_11_chirp_constant():
    rows = [metop.chirp_ft_measurement(C) for C in (2.0, -2.0, 1.5, 0.75)]
    flat = max(r["flatness"] for r in rows)
    exps = [r["exponent"] for r in rows]
    consts = ", ".join(f"C={r['C'][0][0]:+g}: c={r['constant']:.5f}" for r in rows)
    record(11, "Fourier transform of a chirp", flat < 0.05,
           f"modulus flatness {flat:.2e} (<5%); measured |det C| exponent "
           f"{min(exps):.5f}..{max(exps):.5f} (recorded, not asserted); {consts}")
