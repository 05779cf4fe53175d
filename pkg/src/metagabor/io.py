"""File formats: CSV payloads with JSON sidecars, 17-significant-digit floats.

* matrix: one row per line, sidecar ``{"d": int, "kind": "sp2d" | "sp4d"}``
* signal: columns ``index,re,im``, sidecar ``{"d", "n", "T"}``
* field: columns ``x,xi,re,im``, sidecar with matrix, windows and grid
* coefficients: columns ``lambda_x,lambda_xi,re,im``

The sidecar of ``path`` is ``path + ".json"``.
"""
from __future__ import annotations

import csv
import io as _io
import json
import math
import re
from pathlib import Path

import numpy as np

from .sigrid import Grid, Signal
from .symplin import BlockSymplectic, SymplecticMatrix

_FLOAT_TOKEN = re.compile(r'"__f17__([^"]*)__"')


def fmt(x: float) -> str:
    """17 significant digits (round-trip exact)."""
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    s = f"{x:.17g}"
    return "0" if s == "-0" else s


def _tokenize(obj):
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            return fmt(x)
        return f"__f17__{fmt(x)}__"
    if isinstance(obj, complex):
        return {"re": _tokenize(obj.real), "im": _tokenize(obj.imag)}
    if isinstance(obj, np.ndarray):
        return _tokenize(obj.tolist())
    if isinstance(obj, dict):
        return {str(k): _tokenize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_tokenize(v) for v in obj]
    return obj


def dumps(obj, indent: int | None = 2) -> str:
    """JSON text with every finite float written with 17 significant digits.

    Non-finite floats become the strings ``"inf"``, ``"-inf"``, ``"nan"``.
    """
    text = json.dumps(_tokenize(obj), indent=indent, sort_keys=True)
    return _FLOAT_TOKEN.sub(lambda m: m.group(1), text)


def write_json(path, obj):
    Path(path).write_text(dumps(obj) + "\n")


def read_json(path) -> dict:
    return json.loads(Path(path).read_text())


def sidecar(path) -> Path:
    return Path(str(path) + ".json")


# ---------------------------------------------------------------- matrices

def write_matrix(path, M, kind: str | None = None):
    M = np.asarray(getattr(M, "data", M), dtype=float)
    if kind is None:
        kind = "sp4d" if M.shape[0] % 4 == 0 else "sp2d"
    d = M.shape[0] // (4 if kind == "sp4d" else 2)
    with open(path, "w", newline="") as fh:
        for row in M:
            fh.write(",".join(fmt(v) for v in row) + "\n")
    write_json(sidecar(path), {"d": d, "kind": kind})


def read_matrix_array(path) -> tuple[np.ndarray, dict]:
    """Parse a matrix CSV.

    Raises
    ------
    ValueError
        On ragged rows, non-numeric or non-finite entries, or a sidecar
        inconsistent with the shape.
    """
    rows = []
    with open(path, newline="") as fh:
        for line in csv.reader(fh):
            if not line or all(not c.strip() for c in line):
                continue
            try:
                rows.append([float(c) for c in line])
            except ValueError as e:
                raise ValueError(f"malformed matrix entry in {path}: {e}") from e
    if not rows or len({len(r) for r in rows}) != 1 or len(rows) != len(rows[0]):
        raise ValueError(f"matrix in {path} is not square")
    M = np.array(rows)
    if not np.all(np.isfinite(M)):
        raise ValueError(f"matrix in {path} has non-finite entries")
    meta = {}
    sc = sidecar(path)
    if sc.exists():
        meta = read_json(sc)
        kind = meta.get("kind")
        d = meta.get("d")
        factor = {"sp4d": 4, "sp2d": 2}.get(kind)
        if factor is None or d is None or factor * int(d) != M.shape[0]:
            raise ValueError(f"sidecar {sc} does not match a {M.shape[0]}x{M.shape[0]} matrix")
    else:
        meta = {"kind": "sp4d" if M.shape[0] % 4 == 0 else "sp2d"}
        meta["d"] = M.shape[0] // (4 if meta["kind"] == "sp4d" else 2)
    return M, meta


def read_matrix(path, tol: float = 1e-9):
    """``BlockSymplectic`` (kind sp4d) or ``SymplecticMatrix`` (kind sp2d)."""
    M, meta = read_matrix_array(path)
    if meta["kind"] == "sp4d":
        return BlockSymplectic.from_array(M, tol=tol, label=Path(path).name)
    return SymplecticMatrix.from_array(M, tol=tol)


# ---------------------------------------------------------------- signals

def write_signal(path, s: Signal):
    with open(path, "w", newline="") as fh:
        fh.write("index,re,im\n")
        for i, v in enumerate(s.flat()):
            fh.write(f"{i},{fmt(v.real)},{fmt(v.imag)}\n")
    write_json(sidecar(path), {"d": s.grid.d, "n": s.grid.n, "T": s.grid.T})


def read_signal(path) -> Signal:
    meta = read_json(sidecar(path))
    grid = Grid(int(meta.get("d", 1)), int(meta["n"]), float(meta["T"]))
    vals = np.zeros(grid.size, complex)
    seen = np.zeros(grid.size, bool)
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        for row in reader:
            i = int(row["index"])
            vals[i] = float(row["re"]) + 1j * float(row["im"])
            seen[i] = True
    if not seen.all():
        raise ValueError(f"signal file {path} misses samples")
    return Signal(grid, vals)


# ---------------------------------------------------------------- fields

def field_csv(W) -> str:
    X, XI = W.nodes()
    buf = _io.StringIO()
    buf.write("x,xi,re,im\n")
    for x, xi, v in zip(X.ravel(), XI.ravel(), W.values.ravel()):
        buf.write(f"{fmt(x)},{fmt(xi)},{fmt(v.real)},{fmt(v.imag)}\n")
    return buf.getvalue()


def field_meta(W) -> dict:
    return {
        "matrix_preset": W.matrix.label if W.matrix is not None else None,
        "windows": list(W.windows),
        "path": W.path,
        "n": W.grid.n,
        "T": W.grid.T,
        "d": W.grid.d,
        "node_matrix": W.node_matrix,
    }


def write_field(path, W, fmt_kind: str = "csv"):
    if fmt_kind == "json":
        X, XI = W.nodes()
        obj = dict(field_meta(W), x=X.ravel(), xi=XI.ravel(),
                   re=W.values.real.ravel(), im=W.values.imag.ravel())
        Path(path).write_text(dumps(obj, indent=None) + "\n")
        return
    Path(path).write_text(field_csv(W))
    write_json(sidecar(path), field_meta(W))


def write_coefficients(path, coeffs):
    with open(path, "w", newline="") as fh:
        fh.write("lambda_x,lambda_xi,re,im\n")
        for (lx, lxi), v in zip(coeffs.points, coeffs.values):
            fh.write(f"{fmt(lx)},{fmt(lxi)},{fmt(v.real)},{fmt(v.imag)}\n")
