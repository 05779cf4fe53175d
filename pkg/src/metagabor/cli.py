"""Command-line front end: ``metagabor {matrix,wigner,frame,modnorm,verify}``.

Exit codes: 0 success, 1 usage error, 2 invalid matrix, 3 fast path on a
matrix that is not shift-invertible, 4 incompatible lattice, 5 failed
verification.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import checks, frames, io, mwd, sigrid, symplin, tfspaces
from .errors import (
    DimensionError,
    LatticeIncompatibleError,
    MetagaborError,
    NotShiftInvertibleError,
    NotSymplecticError,
)
from .sigrid import Grid

EXIT_USAGE = 1
EXIT_MATRIX = 2
EXIT_NOT_SHIFT_INVERTIBLE = 3
EXIT_LATTICE = 4
EXIT_VERIFY = 5


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _exponent(text: str) -> float:
    t = str(text).strip().lower()
    v = math.inf if t in ("inf", "infinity") else float(t)
    if not v > 0:
        raise argparse.ArgumentTypeError(f"exponent must be in (0, inf], got {text}")
    return v


def _lattice(text: str) -> tuple[int, int]:
    try:
        a, b = (int(v) for v in str(text).split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"lattice must be 'a,b' with integers, got {text!r}")
    if a <= 0 or b <= 0:
        raise argparse.ArgumentTypeError("lattice steps must be positive")
    return a, b


# ---------------------------------------------------------------- helpers

def _emit(obj, args, name: str | None = None):
    text = io.dumps(obj)
    print(text)
    if name and getattr(args, "out_dir", None):
        d = Path(args.out_dir)
        d.mkdir(parents=True, exist_ok=True)
        (d / name).write_text(text + "\n")


def _grid(args) -> Grid:
    n, T = int(args.n), float(args.T)
    if n <= 0 or n % 2:
        raise UsageError(f"grid size n must be even and positive, got {n}")
    if T <= 0:
        raise UsageError(f"grid length T must be positive, got {T}")
    return Grid(1, n, T)


def _load_matrix(spec: str, tol: float):
    """Preset name or CSV path."""
    if Path(spec).suffix == ".csv" or Path(spec).exists():
        try:
            return io.read_matrix(spec, tol=tol)
        except (ValueError, OSError, DimensionError) as e:
            raise NotSymplecticError(f"cannot read matrix: {e}") from e
    try:
        return symplin.parse_preset(spec)
    except ValueError as e:
        raise UsageError(str(e)) from e


def _load_signal(spec: str, grid: Grid):
    if Path(spec).suffix == ".csv" or Path(spec).exists():
        return io.read_signal(spec)
    try:
        return sigrid.parse_signal(spec, grid)
    except ValueError as e:
        raise UsageError(str(e)) from e


def _arr(a):
    return None if a is None else np.asarray(a).tolist()


def describe_factor(f) -> dict:
    if isinstance(f, symplin.BlockSymplectic):
        return {"type": "Lift", "matrix": _arr(f.data)}
    out = {"type": type(f).__name__}
    for attr in ("E", "C"):
        if hasattr(f, attr):
            out[attr] = _arr(getattr(f, attr))
    return out


def _pack_json(p: symplin.DerivedPack) -> dict:
    return {
        "E": _arr(p.E), "F": _arr(p.F), "Escript": _arr(p.Escript), "Fscript": _arr(p.Fscript),
        "M": _arr(p.M), "B": _arr(p.B), "G": _arr(p.G), "delta": _arr(p.delta),
        "det_E": p.det_E,
    }


# ---------------------------------------------------------------- subcommands

def cmd_matrix(args) -> int:
    if bool(args.preset) == bool(args.input):
        raise UsageError("give exactly one of --preset or --in")
    M = _load_matrix(args.preset or args.input, args.tol)
    if isinstance(M, symplin.SymplecticMatrix):
        factors = symplin.free_factorize(M, seed=args.seed)
        res = float(np.max(np.abs(symplin.product(factors) - M.data)))
        _emit({"kind": "sp2d", "d": M.d, "matrix": _arr(M.data),
               "blocks": {"A": _arr(M.A), "B": _arr(M.B), "C": _arr(M.C), "D": _arr(M.D)},
               "residual": M.residual,
               "factorization": {"factors": [describe_factor(f) for f in factors],
                                 "product_residual": res}}, args, "matrix.json")
        return 0
    pack = symplin.derived_pack(M)
    report = {
        "kind": "sp4d",
        "label": M.label,
        "d": M.d,
        "matrix": _arr(M.data),
        "blocks": {f"A{i}{j}": _arr(M.block(i, j)) for i in range(1, 5) for j in range(1, 5)},
        "relations": M.relations(),
        "residual": M.residual,
        "derived": _pack_json(pack),
        "shift_invertible": pack.shift_invertible,
        "covariant": pack.covariant,
        "factorization": None,
    }
    if pack.shift_invertible:
        fz = symplin.factorize_shift_invertible(M)
        report["factorization"] = {"factors": [describe_factor(f) for f in fz.factors],
                                   "product_residual": fz.product_residual}
    _emit(report, args, "matrix.json")
    return 0


def cmd_wigner(args) -> int:
    A = _load_matrix(args.matrix, args.tol)
    if not isinstance(A, symplin.BlockSymplectic):
        raise UsageError("wigner needs a 4d x 4d matrix")
    grid = _grid(args)
    f = _load_signal(args.signal, grid)
    g = _load_signal(args.window, grid)
    path = args.path
    if path in ("fast", "both") and not symplin.derived_pack(A).shift_invertible:
        raise NotShiftInvertibleError(
            f"fast path needs a shift-invertible matrix; E of {A.label} is singular")
    W = mwd.wigner_fast(A, f, g) if path == "fast" else mwd.wigner_ref(A, f, g)
    W = dataclasses.replace(W, windows=(args.signal, args.window))
    summary = {"matrix": A.label, "path": path, "n": W.grid.n, "T": W.grid.T,
               "signal": args.signal, "window": args.window, "norm": W.norm()}
    if path == "both":
        cmp = mwd.compare_fields(mwd.wigner_fast(A, f, g), W)
        summary.update(max_deviation=cmp["max_error"], phase=cmp["phase"],
                       common_nodes=cmp["count"])
    if args.out:
        io.write_field(args.out, W, args.format)
        summary["out"] = str(args.out)
    _emit(summary, args, "wigner.json")
    return 0


def cmd_frame(args) -> int:
    A = _load_matrix(args.matrix, args.tol)
    grid = _grid(args)
    g = _load_signal(args.window, grid)
    a, b = args.lattice
    sysm = frames.system(A, g, a, b, warped=not args.unwarped)
    rep = frames.frame_bounds(sysm)
    out = rep.to_json()
    out.update(lattice_steps=[a, b], points=sysm.lattice.count,
               redundancy=sysm.lattice.redundancy, window=args.window)
    d = Path(args.out_dir) if args.out_dir else Path(".")
    if args.dual is not None or args.coefficients:
        d.mkdir(parents=True, exist_ok=True)
    if args.dual is not None:
        gamma = frames.canonical_dual(sysm)
        target = Path(args.dual) if args.dual else d / "dual.csv"
        io.write_signal(target, gamma)
        out["dual"] = str(target)
    if args.coefficients:
        f = _load_signal(args.coefficients, grid)
        target = d / "coefficients.csv"
        io.write_coefficients(target, frames.analysis(sysm, f))
        out["coefficients"] = str(target)
    if args.equiv:
        out["equivalence"] = frames.equivalence_table(sysm)
    _emit(out, args, "frame_report.json")
    return 0


def _weight(args) -> tfspaces.Weight:
    return tfspaces.Weight.one() if args.s == 0 else tfspaces.Weight.polynomial(args.s)


def cmd_modnorm(args) -> int:
    A = _load_matrix(args.matrix, args.tol)
    grid = _grid(args)
    g = _load_signal(args.window, grid)
    spec = tfspaces.MixedNormSpec(args.p, args.q, _weight(args), args.order)
    if args.corpus:
        corpus = [sigrid.hermite(grid, k) for k in range(args.corpus + 1)]
        rep = tfspaces.equivalence_report(A, g, spec, corpus)
        rep["corpus"] = f"hermite:0..{args.corpus}"
    else:
        f = _load_signal(args.signal, grid)
        rep = (tfspaces.amalgam_report if args.amalgam else tfspaces.mod_norm_report)(f, A, g, spec)
        rep["signal"] = args.signal
    rep["window"] = args.window
    _emit(rep, args, "modnorm.json")
    return 0


def cmd_verify(args) -> int:
    try:
        summary = checks.run(args.suite, seed=args.seed)
    except ValueError as e:
        raise UsageError(str(e)) from e
    for r in summary["results"]:
        tag = "PASS" if r["passed"] else "FAIL"
        print(f"{tag} [{r['suite']}] {r['check']}: {io.fmt(r['value'])} < {io.fmt(r['tolerance'])}"
              + (f" ({r['error']})" if "error" in r else ""), file=sys.stderr)
    _emit(summary, args, "verify.json")
    return 0 if summary["passed"] else EXIT_VERIFY


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="metagabor", description="Metaplectic Wigner distributions and frames.")
    p.add_argument("--config", help="JSON file whose keys override command-line flags")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, grid=(256, 16.0)):
        sp.add_argument("--n", type=int, default=grid[0], help="grid points (even)")
        sp.add_argument("--T", type=float, default=grid[1], help="grid length")
        sp.add_argument("--tol", type=float, default=symplin.DEFAULT_TOL,
                        help="symplectic validation tolerance")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--out-dir", dest="out_dir", help="also write the JSON report here")

    m = sub.add_parser("matrix", help="inspect a symplectic matrix")
    m.add_argument("--preset", help="a_st | a_tau:<tau> | a_hbar:<hbar> | a_ft2 | covariant:a11,a13,a21")
    m.add_argument("--in", dest="input", help="matrix CSV (with optional JSON sidecar)")
    common(m)
    m.set_defaults(func=cmd_matrix)

    w = sub.add_parser("wigner", help="compute a metaplectic Wigner field")
    w.add_argument("--matrix", required=True)
    w.add_argument("--signal", required=True)
    w.add_argument("--window", required=True)
    w.add_argument("--path", choices=("ref", "fast", "both"), default="ref")
    w.add_argument("--out", help="field output file")
    w.add_argument("--format", choices=("csv", "json"), default="csv")
    common(w)
    w.set_defaults(func=cmd_wigner)

    f = sub.add_parser("frame", help="frame bounds of a metaplectic Gabor system")
    f.add_argument("--matrix", default="a_st")
    f.add_argument("--window", default="gaussian")
    f.add_argument("--lattice", type=_lattice, default=(4, 4),
                   help="a,b: time step a*delta, frequency step b/T")
    f.add_argument("--unwarped", action="store_true",
                   help="use the lattice as given instead of E_A times it")
    f.add_argument("--dual", nargs="?", const="", default=None,
                   help="write the canonical dual window CSV (optional path)")
    f.add_argument("--coefficients", metavar="SIGNAL",
                   help="write analysis coefficients of SIGNAL as CSV")
    f.add_argument("--equiv", action="store_true", help="add the equivalent-system bound table")
    common(f, grid=(48, math.sqrt(48)))
    f.set_defaults(func=cmd_frame)

    mn = sub.add_parser("modnorm", help="modulation / amalgam norms")
    mn.add_argument("--matrix", default="a_st")
    mn.add_argument("--signal", default="gaussian")
    mn.add_argument("--window", default="gaussian")
    mn.add_argument("--p", type=_exponent, default=2.0)
    mn.add_argument("--q", type=_exponent, default=2.0)
    mn.add_argument("--s", type=float, default=0.0, help="polynomial weight exponent")
    mn.add_argument("--order", choices=("time-inner", "frequency-inner"), default="time-inner")
    mn.add_argument("--amalgam", action="store_true")
    mn.add_argument("--corpus", type=int, metavar="K",
                    help="equivalence report over Hermite functions 0..K")
    common(mn)
    mn.set_defaults(func=cmd_modnorm)

    v = sub.add_parser("verify", help="run the invariant suites")
    v.add_argument("--suite", default="all",
                   help="all | " + " | ".join(checks.SUITE_ORDER))
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--out-dir", dest="out_dir")
    v.set_defaults(func=cmd_verify)
    return p


_CONFIG_TYPES = {"p": _exponent, "q": _exponent, "lattice": _lattice}


def _apply_config(args, path: str):
    try:
        cfg = json.loads(Path(path).read_text())
    except (OSError, ValueError) as e:
        raise UsageError(f"cannot read config {path}: {e}") from e
    if not isinstance(cfg, dict):
        raise UsageError("config must be a JSON object")
    cfg = dict(cfg)
    grid = cfg.pop("grid", None) or {}
    if grid.get("d", 1) != 1:
        raise UsageError("only d = 1 is supported")
    for k in ("n", "T"):
        if k in grid:
            cfg[k] = grid[k]
    if "output_dir" in cfg:
        cfg["out_dir"] = cfg.pop("output_dir")
    for k, v in cfg.items():
        k = k.replace("-", "_")
        if k == "tolerance":
            k = "tol"
        if not hasattr(args, k):
            raise UsageError(f"config key {k!r} does not apply to {args.command}")
        try:
            conv = _CONFIG_TYPES.get(k)
            setattr(args, k, conv(v if not isinstance(v, list) else ",".join(map(str, v)))
                    if conv else v)
        except argparse.ArgumentTypeError as e:
            raise UsageError(str(e)) from e
    if getattr(args, "tol", 1.0) <= 0:
        raise UsageError("tolerance must be positive")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.config:
            _apply_config(args, args.config)
        return args.func(args)
    except UsageError as e:
        print(f"metagabor: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except NotSymplecticError as e:
        rel = getattr(e, "relation", None)
        print(f"metagabor: invalid matrix: {e}" + (f" [relation {rel}]" if rel else ""),
              file=sys.stderr)
        return EXIT_MATRIX
    except NotShiftInvertibleError as e:
        print(f"metagabor: not shift-invertible: {e}", file=sys.stderr)
        return EXIT_NOT_SHIFT_INVERTIBLE
    except LatticeIncompatibleError as e:
        print(f"metagabor: incompatible lattice: {e}", file=sys.stderr)
        return EXIT_LATTICE
    except (DimensionError, ValueError) as e:
        print(f"metagabor: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except MetagaborError as e:
        print(f"metagabor: error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
