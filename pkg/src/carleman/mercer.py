"""Bilinear expansions of normal kernels and their convergence checks.

For a normal kernel with spectrum in a sector, the bilinear series
``sum_n alpha_n phi_n(s) conj(phi_n(t))`` converges absolutely and
uniformly to the kernel. The argument runs through the rotated Hermitian
part ``T`` whose eigenvalues ``x_n = Re(e^{i rot} alpha_n)`` are positive.
Each inequality in that argument has a grid counterpart here that reduces
to a finite sum, so it can be checked exactly:

* diagonal majorant: ``T(s, s) >= sum_{n<=m} x_n |phi_n(s)|^2``
* Cauchy tail bound with ``M = max_s T(s, s)``
* Bessel bound by the largest Carleman-function norm
* monotone diagonal convergence (Dini)
* absolute tail bound ``|alpha_n| <= x_n sqrt(1 + slope^2)``

Orders ``m`` count terms, so ``m = 0`` is the empty sum.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from .errors import IncompatibleGrids, InvalidArgument, NotPositive, SectorRequired
from .kernel import KernelMatrix, check_k0, rotated_hermitian_part
from .spectral import EigenSystem, NULL_REL_TOL, Sector, _bilinear, null_mask

__all__ = [
    "ConvergenceTable",
    "partial_sum",
    "positive_part",
    "diag_lower_bound_check",
    "cauchy_tail_bound_check",
    "bessel_check",
    "dini_table",
    "mercer_report",
]

CSV_COLUMNS = ("m", "sup_err", "diag_sup_err", "abs_tail")


@dataclass
class ConvergenceTable:
    orders: list
    sup_err: list | None = None
    diag_sup_err: list | None = None
    abs_tail: list | None = None
    tail_bound: list | None = None

    def column(self, name):
        return np.asarray(getattr(self, name), dtype=float)

    def is_nonincreasing(self, name, atol=0.0):
        col = self.column(name)
        return bool(np.all(np.diff(col) <= atol))

    def estimate_slack(self):
        """Worst ``tail_bound - abs_tail`` over all orders."""
        if self.abs_tail is None or self.tail_bound is None:
            raise InvalidArgument("table has no absolute-tail columns")
        return float(np.min(self.column("tail_bound") - self.column("abs_tail")))

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for k, m in enumerate(self.orders):
            row = [m]
            for name in CSV_COLUMNS[1:]:
                col = getattr(self, name)
                row.append("" if col is None else repr(float(col[k])))
            writer.writerow(row)
        return buf.getvalue()


def _check_grid(K, E):
    if not K.grid.same_as(E.grid):
        raise IncompatibleGrids("kernel and eigensystem live on different grids")


def partial_sum(E: EigenSystem, m: int) -> KernelMatrix:
    if not (0 <= m <= E.count):
        raise InvalidArgument(f"order {m} outside [0, {E.count}]")
    return KernelMatrix(E.grid, _bilinear(E.alphas[:m], E.vectors[:m]))


def positive_part(E_herm: EigenSystem, neg_tol=1e-10):
    """Eigenvalues and eigenfunctions of the positive system.

    Raises :class:`NotPositive` if an eigenvalue is below
    ``-neg_tol * max(1, max|x|)``; eigenvalues at or below
    ``1e-12 * max x`` are dropped as the null atom.
    """
    x = E_herm.alphas.real
    if x.size == 0:
        return x, E_herm.vectors
    scale = max(1.0, float(np.abs(x).max()))
    if x.min() < -neg_tol * scale:
        raise NotPositive(f"eigenvalue {x.min():.3e} is negative")
    top = x.max()
    keep = x > NULL_REL_TOL * top if top > 0 else np.zeros(x.size, dtype=bool)
    return x[keep], E_herm.vectors[keep]


def _diag(K):
    return np.real(np.diag(K.values))


def diag_lower_bound_check(K_herm: KernelMatrix, E_herm: EigenSystem) -> float:
    """Worst ``K(s,s) - sum_{n<=m} x_n |phi_n(s)|^2`` over nodes and orders."""
    _check_grid(K_herm, E_herm)
    x, V = positive_part(E_herm)
    cum = np.cumsum(x[:, None] * np.abs(V) ** 2, axis=0)
    cum = np.vstack([np.zeros((1, K_herm.n)), cum])
    return float(np.min(_diag(K_herm)[None, :] - cum))


def cauchy_tail_bound_check(K_herm: KernelMatrix, E_herm: EigenSystem, p: int, q: int) -> float:
    """Worst slack of the Cauchy bound on the terms ``p..q`` (1-based, inclusive).

    The slack at ``(s, t)`` is
    ``M sum x_n |phi_n(s)|^2 - (sum x_n |phi_n(s)| |phi_n(t)|)^2``.
    """
    _check_grid(K_herm, E_herm)
    if not (1 <= p <= q <= max(E_herm.count, 1)):
        raise InvalidArgument(f"invalid term range {p}..{q} for {E_herm.count} terms")
    x, V = positive_part(E_herm)
    x, a = x[p - 1 : q], np.abs(V[p - 1 : q])
    M = float(_diag(K_herm).max())
    left = M * (x @ a**2)
    cross = (a.T * x) @ a
    return float(np.min(left[:, None] - cross**2))


def bessel_check(K_herm: KernelMatrix, E_herm: EigenSystem) -> float:
    """Worst ``max_s ||k(s)||^2 - sum_n x_n^2 |phi_n(s)|^2`` over nodes."""
    _check_grid(K_herm, E_herm)
    x, V = positive_part(E_herm)
    k_sup = check_k0(K_herm).max_row_l2
    return float(np.min(k_sup**2 - (x**2) @ np.abs(V) ** 2))


def dini_table(K_herm: KernelMatrix, E_herm: EigenSystem) -> ConvergenceTable:
    """Diagonal errors ``sup_s |K(s,s) - sum_{n<=m} x_n |phi_n(s)|^2|``."""
    _check_grid(K_herm, E_herm)
    x, V = positive_part(E_herm)
    cum = np.cumsum(x[:, None] * np.abs(V) ** 2, axis=0)
    cum = np.vstack([np.zeros((1, K_herm.n)), cum])
    err = np.abs(_diag(K_herm)[None, :] - cum).max(axis=1)
    return ConvergenceTable(orders=list(range(x.size + 1)), diag_sup_err=err.tolist())


def mercer_report(K: KernelMatrix, E: EigenSystem, sector: Sector | None) -> ConvergenceTable:
    """Convergence table for the complex bilinear series of ``K``.

    Null atoms of ``E`` are dropped. ``tail_bound[m]`` is
    ``sqrt(1 + slope^2) * max_s sum_{n>m} x_n |phi_n(s)|^2``, the majorant
    for ``abs_tail[m]``.
    """
    _check_grid(K, E)
    E = E.select(~null_mask(E.alphas))
    if sector is None:
        raise SectorRequired("a sector is required for the absolute tail estimate")
    if E.count and not np.all(sector.contains(E.alphas, atol=1e-12 * np.abs(E.alphas).max())):
        raise SectorRequired("eigenvalues fall outside the given sector")
    alphas = E.alphas
    x = sector.rotate(alphas).real
    a = np.abs(E.vectors)
    k = alphas.size
    n = K.n

    sup_err = []
    S = np.zeros((n, n), dtype=complex)
    sup_err.append(float(np.abs(K.values - S).max()))
    for j in range(k):
        v = E.vectors[j]
        S = S + alphas[j] * np.outer(v, v.conj())
        sup_err.append(float(np.abs(K.values - S).max()))

    T = rotated_hermitian_part(K, sector.rotation)
    cum = np.vstack([np.zeros((1, n)), np.cumsum(x[:, None] * a**2, axis=0)])
    diag_sup_err = np.abs(_diag(T)[None, :] - cum).max(axis=1)

    abs_tail = np.zeros(k + 1)
    tail_bound = np.zeros(k + 1)
    R = np.zeros((n, n))
    tail = np.zeros(n)
    factor = np.sqrt(1.0 + sector.slope**2)
    for m in range(k - 1, -1, -1):
        R = R + abs(alphas[m]) * np.outer(a[m], a[m])
        tail = tail + x[m] * a[m] ** 2
        abs_tail[m] = R.max()
        tail_bound[m] = factor * tail.max()

    return ConvergenceTable(
        orders=list(range(k + 1)),
        sup_err=sup_err,
        diag_sup_err=diag_sup_err.tolist(),
        abs_tail=abs_tail.tolist(),
        tail_bound=tail_bound.tolist(),
    )
