"""Metaplectic Wigner distributions, metaplectic Gabor frames and
time-frequency norms on finite sampled models of the real line."""
from . import errors, frames, io, metop, mwd, sigrid, symplin, tfspaces
from .errors import MetagaborError
from .frames import frame_bounds, system
from .mwd import WignerField, wigner, wigner_fast, wigner_ref
from .sigrid import Grid, Signal, default_grid
from .symplin import BlockSymplectic, SymplecticMatrix, a_hbar, a_st, a_tau, parse_preset

__version__ = "0.1.0"

__all__ = [
    "errors", "frames", "io", "metop", "mwd", "sigrid", "symplin", "tfspaces",
    "MetagaborError", "Grid", "Signal", "default_grid",
    "BlockSymplectic", "SymplecticMatrix", "a_st", "a_tau", "a_hbar", "parse_preset",
    "WignerField", "wigner", "wigner_fast", "wigner_ref", "system", "frame_bounds",
]
