"""JSON and CSV files exchanged by the command-line tools.

Kernel file::

    {"grid": {"points": [...], "weights": [...], "cutoff": L},
     "values": [[re, im], ...],          # row-major, n*n pairs
     "header": {...}}                    # optional diagnostics

Eigensystem file::

    {"grid": {...}, "alphas": [[re, im], ...],
     "vectors": [[[re, im], ...], ...]}  # one row per alpha, same order

Floats are written with ``repr`` precision, so values round-trip exactly.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .kernel import KernelMatrix
from .quadrature import Grid
from .spectral import EigenSystem

__all__ = ["kernel_to_dict", "kernel_from_dict", "save_kernel", "load_kernel", "save_eigsys", "load_eigsys"]


def kernel_to_dict(K: KernelMatrix, header=None):
    flat = K.values.reshape(-1)
    d = {
        "grid": K.grid.to_dict(),
        "values": np.column_stack([flat.real, flat.imag]).tolist(),
    }
    if header is not None:
        d["header"] = header
    return d


def kernel_from_dict(d):
    grid = Grid.from_dict(d["grid"])
    pairs = np.asarray(d["values"], dtype=float).reshape(-1, 2)
    n = len(grid)
    values = (pairs[:, 0] + 1j * pairs[:, 1]).reshape(n, n)
    return KernelMatrix(grid, values), d.get("header", {})


def _dump(path, obj):
    Path(path).write_text(json.dumps(obj, allow_nan=False) + "\n")


def save_kernel(path, K: KernelMatrix, header=None):
    _dump(path, kernel_to_dict(K, header))


def load_kernel(path):
    """Return ``(KernelMatrix, header)``."""
    return kernel_from_dict(json.loads(Path(path).read_text()))


def save_eigsys(path, E: EigenSystem):
    _dump(path, E.to_dict())


def load_eigsys(path) -> EigenSystem:
    return EigenSystem.from_dict(json.loads(Path(path).read_text()))
