"""Sampled integral kernels on a quadrature grid.

A kernel ``K(s, t)`` is stored as the matrix ``K[i, j] = K(s_i, s_j)``
(row index is the first argument). Applying it to a function uses the
quadrature weights, ``(K f)_i = sum_j w_j K_ij f_j``.

Because the weights enter the operator but not the kernel, the kernel of
the adjoint operator is still the conjugate transpose ``conj(K[j, i])``;
only the operator matrix ``K W`` picks up the similarity
``W^-1 (K W)^H W``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import IncompatibleGrids, InvalidArgument, NonFiniteKernel
from .quadrature import Grid, GridFn

__all__ = [
    "KernelMatrix",
    "K0Report",
    "sample_kernel",
    "carleman_row",
    "carleman_col",
    "apply",
    "adjoint",
    "compose",
    "rotated_hermitian_part",
    "hermitian_defect",
    "sup_entry",
    "check_k0",
    "modulus_proxy",
]


@dataclass(frozen=True, eq=False)
class KernelMatrix:
    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        vals = np.array(self.values, dtype=complex)
        n = len(self.grid)
        if vals.shape != (n, n):
            raise InvalidArgument(f"kernel must be {n}x{n} to match its grid, got {vals.shape}")
        if not np.all(np.isfinite(vals)):
            raise NonFiniteKernel("kernel has NaN or infinite entries")
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)

    @property
    def n(self):
        return len(self.grid)

    def __add__(self, other):
        _same_grid(self, other)
        return KernelMatrix(self.grid, self.values + other.values)

    def __sub__(self, other):
        _same_grid(self, other)
        return KernelMatrix(self.grid, self.values - other.values)

    def __mul__(self, c):
        return KernelMatrix(self.grid, self.values * c)

    __rmul__ = __mul__

    @classmethod
    def zeros(cls, grid):
        return cls(grid, np.zeros((len(grid), len(grid)), complex))


@dataclass(frozen=True)
class K0Report:
    """Grid statistics standing in for the continuous K0-kernel conditions."""

    max_row_l2: float
    max_col_l2: float
    tail_sup: float
    hermitian_defect: float

    def as_dict(self):
        return {
            "max_row_l2": self.max_row_l2,
            "max_col_l2": self.max_col_l2,
            "tail_sup": self.tail_sup,
            "hermitian_defect": self.hermitian_defect,
        }


def _same_grid(a, b):
    if not a.grid.same_as(b.grid):
        raise IncompatibleGrids("operands live on different grids")


def sample_kernel(k, grid: Grid) -> KernelMatrix:
    """Evaluate ``k(s, t)`` on ``grid x grid``.

    ``k`` is called once with broadcast ``(n, 1)`` and ``(1, n)`` arrays, so
    it must be written with numpy ufuncs (wrap scalar code in
    ``np.vectorize``).
    """
    s = grid.points[:, None]
    t = grid.points[None, :]
    with np.errstate(all="ignore"):
        vals = np.broadcast_to(np.asarray(k(s, t), dtype=complex), (len(grid), len(grid)))
    if not np.all(np.isfinite(vals)):
        raise NonFiniteKernel("kernel callable produced NaN or infinite samples")
    return KernelMatrix(grid, vals)


def _check_index(K, i):
    if not (0 <= i < K.n):
        raise IndexError(f"node index {i} out of range for {K.n} nodes")


def carleman_row(K: KernelMatrix, i: int) -> GridFn:
    """Carleman function ``k(s_i) = conj(K(s_i, .))``."""
    _check_index(K, i)
    return GridFn(K.grid, np.conj(K.values[i]))


def carleman_col(K: KernelMatrix, j: int) -> GridFn:
    """Carleman function ``k*(t_j) = K(., t_j)``."""
    _check_index(K, j)
    return GridFn(K.grid, K.values[:, j])


def apply(K: KernelMatrix, f: GridFn) -> GridFn:
    if not K.grid.same_as(f.grid):
        raise IncompatibleGrids("kernel and function live on different grids")
    return GridFn(K.grid, K.values @ (K.grid.weights * f.values))


def adjoint(K: KernelMatrix) -> KernelMatrix:
    return KernelMatrix(K.grid, K.values.conj().T)


def compose(A: KernelMatrix, B: KernelMatrix) -> KernelMatrix:
    """Kernel of the operator product ``A B``: ``sum_k A_ik w_k B_kj``."""
    _same_grid(A, B)
    return KernelMatrix(A.grid, (A.values * A.grid.weights) @ B.values)


def rotated_hermitian_part(K: KernelMatrix, alpha: float = 0.0) -> KernelMatrix:
    """Kernel of ``(e^{i alpha} N + e^{-i alpha} N*) / 2``."""
    rot = np.exp(1j * alpha) * K.values
    vals = 0.5 * (rot + rot.conj().T)
    return KernelMatrix(K.grid, vals)


def hermitian_defect(K: KernelMatrix) -> float:
    return float(np.max(np.abs(K.values - K.values.conj().T)))


def sup_entry(K) -> float:
    vals = K.values if isinstance(K, KernelMatrix) else np.asarray(K)
    return float(np.max(np.abs(vals))) if vals.size else 0.0


def check_k0(K: KernelMatrix, tail_fraction: float = 0.1) -> K0Report:
    w = K.grid.weights
    mag2 = np.abs(K.values) ** 2
    rows = np.sqrt(mag2 @ w)
    cols = np.sqrt(w @ mag2)
    tail = K.grid.tail_mask(tail_fraction)
    region = tail[:, None] | tail[None, :]
    tail_sup = float(np.max(np.abs(K.values[region]))) if region.any() else 0.0
    return K0Report(
        max_row_l2=float(rows.max()),
        max_col_l2=float(cols.max()),
        tail_sup=tail_sup,
        hermitian_defect=hermitian_defect(K),
    )


def modulus_proxy(K: KernelMatrix) -> float:
    """Largest jump between adjacent nodes in either argument.

    Only a report statistic; continuity cannot be decided from samples.
    """
    if K.n < 2:
        return 0.0
    ds = np.abs(np.diff(K.values, axis=0)).max()
    dt = np.abs(np.diff(K.values, axis=1)).max()
    return float(max(ds, dt))
