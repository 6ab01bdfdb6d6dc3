"""Functional calculus for normal kernels through their spectral function.

On a grid the resolution of the identity is atomic: it puts the
projection onto ``phi_n`` at the eigenvalue ``alpha_n``. The spectral
function of a Borel set ``omega`` (whose closure avoids 0) is then the
kernel ``E(s, t; omega) = sum_{alpha_n in omega} phi_n(s) conj(phi_n(t))``,
and Lebesgue-Stieltjes integrals against it are finite sums over atoms.

Admissible functions are ``phi(z) = z v(z)`` with bounded ``v``. Their
kernels are obtained as limits of ``Phi_eps``, the sum over atoms with
``|alpha_n| > eps``; :func:`phi_pv` tabulates that limit and
:func:`reid_bound_check` verifies the Cauchy estimate that drives it.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import (
    InvalidArgument,
    InvalidSequence,
    SectorRequired,
    SymbolError,
    UnknownSymbol,
)
from .kernel import KernelMatrix, compose, rotated_hermitian_part, sup_entry
from .spectral import EigenSystem, Sector, _bilinear, null_mask, reconstruct

__all__ = [
    "Symbol",
    "Region",
    "PVTable",
    "symbol_from_name",
    "BUILTIN_SYMBOLS",
    "spectral_function",
    "projector_identity_check",
    "phi_direct",
    "phi_pv",
    "x_epsilon",
    "monotonicity_margins",
    "monotonicity_check",
    "reid_bound_check",
    "require_sector",
]

BUILTIN_SYMBOLS = ("identity", "clip:EPS", "cayley", "phase")


@dataclass(frozen=True)
class Symbol:
    """``phi(z) = z * v(z)`` with ``sup |v| <= v_sup``."""

    v: Callable
    v_sup: float
    name: str = "symbol"

    def values(self, z, atol=1e-12):
        """Evaluate ``v`` at the points ``z``, enforcing finiteness and the bound."""
        z = np.asarray(z, dtype=complex)
        with np.errstate(all="ignore"):
            out = np.broadcast_to(np.asarray(self.v(z), dtype=complex), z.shape)
        if not np.all(np.isfinite(out)):
            raise SymbolError(f"symbol {self.name!r} produced non-finite values")
        if out.size and np.abs(out).max() > self.v_sup + atol:
            raise SymbolError(
                f"symbol {self.name!r} exceeds its declared bound {self.v_sup} "
                f"(|v| = {np.abs(out).max():.6g})"
            )
        return out

    def phi(self, z):
        z = np.asarray(z, dtype=complex)
        return z * self.values(z)


def symbol_from_name(name: str) -> Symbol:
    """Look up a built-in symbol.

    ``identity`` (v = 1), ``clip:EPS`` (v = 1/z outside the closed disk of
    radius EPS, else 0), ``cayley`` (v = 1/(1+|z|)), ``phase``
    (v = exp(-|z|)).
    """
    if name == "identity":
        return Symbol(lambda z: np.ones_like(z), 1.0, name)
    if name == "cayley":
        return Symbol(lambda z: 1.0 / (1.0 + np.abs(z)), 1.0, name)
    if name == "phase":
        return Symbol(lambda z: np.exp(-np.abs(z)), 1.0, name)
    if name.startswith("clip:"):
        try:
            eps = float(name.split(":", 1)[1])
        except ValueError:
            raise UnknownSymbol(name) from None
        if not (np.isfinite(eps) and eps > 0):
            raise UnknownSymbol(name)

        def clip(z, eps=eps):
            inside = np.abs(z) > eps
            return np.divide(1.0, z, out=np.zeros_like(z), where=inside)

        return Symbol(clip, 1.0 / eps, name)
    raise UnknownSymbol(name)


@dataclass(frozen=True)
class Region:
    """Borel set of the complex plane given by a vectorized membership test.

    ``inner_radius`` certifies that every member satisfies
    ``|z| > inner_radius``; zero is never a member.
    """

    predicate: Callable
    inner_radius: float = 0.0
    name: str = "region"

    def __post_init__(self):
        if self.inner_radius < 0:
            raise InvalidArgument("inner_radius must be nonnegative")
        if bool(np.asarray(self.predicate(np.zeros(1, complex)))[0]):
            raise InvalidArgument(f"region {self.name!r} contains 0")

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        inside = np.broadcast_to(np.asarray(self.predicate(z), dtype=bool), z.shape)
        return inside & (np.abs(z) > self.inner_radius) & (z != 0)

    @classmethod
    def outside_disk(cls, eps):
        """``omega_eps``: the complement of the closed disk ``|z| <= eps``."""
        if not eps > 0:
            raise InvalidArgument("eps must be positive")
        return cls(lambda z: np.abs(z) > eps, float(eps), f"|z|>{eps!r}")

    @classmethod
    def punctured_plane(cls):
        return cls(lambda z: z != 0, 0.0, "z!=0")

    @classmethod
    def empty(cls):
        return cls(lambda z: np.zeros(np.shape(z), dtype=bool), 0.0, "empty")

    @classmethod
    def annulus(cls, eps, outer):
        """``eps < |z| <= outer``."""
        if not 0 < eps < outer:
            raise InvalidArgument("need 0 < eps < outer")
        return cls(lambda z: (np.abs(z) > eps) & (np.abs(z) <= outer), float(eps), f"{eps!r}<|z|<={outer!r}")

    @classmethod
    def wedge(cls, eps, lo, hi):
        """``|z| > eps`` and ``lo <= arg z < hi`` (arguments in (-pi, pi])."""
        if not eps > 0:
            raise InvalidArgument("eps must be positive")
        return cls(
            lambda z: (np.abs(z) > eps) & (np.angle(z) >= lo) & (np.angle(z) < hi),
            float(eps),
            f"wedge({eps!r},{lo!r},{hi!r})",
        )

    @classmethod
    def around(cls, points, radius):
        """Union of open disks of ``radius`` about ``points``."""
        pts = np.asarray(points, dtype=complex).reshape(-1)
        if pts.size and radius >= np.abs(pts).min():
            raise InvalidArgument("disks around the points must not reach 0")
        inner = float(np.abs(pts).min() - radius) if pts.size else 0.0

        def pred(z):
            z = np.asarray(z, dtype=complex)
            if pts.size == 0:
                return np.zeros(z.shape, dtype=bool)
            return (np.abs(z[..., None] - pts) < radius).any(axis=-1)

        return cls(pred, inner, f"around({pts.size} points)")

    def union(self, other):
        a, b = self, other
        return Region(lambda z: a(z) | b(z), min(a.inner_radius, b.inner_radius), f"({a.name})|({b.name})")

    def intersection(self, other):
        a, b = self, other
        return Region(lambda z: a(z) & b(z), max(a.inner_radius, b.inner_radius), f"({a.name})&({b.name})")

    def difference(self, other):
        a, b = self, other
        return Region(lambda z: a(z) & ~b(z), a.inner_radius, f"({a.name})-({b.name})")


@dataclass
class PVTable:
    """Per-``eps`` statistics of the principal-value approximation."""

    eps: list
    sup_dist_to_direct: list
    reid_worst_slack: list | None = None
    monotonicity_margin: list | None = None
    columns: tuple = field(default=("eps", "sup_dist_to_direct", "reid_worst_slack", "monotonicity_margin"))

    def is_nonincreasing(self, atol=0.0):
        return bool(np.all(np.diff(np.asarray(self.sup_dist_to_direct)) <= atol))

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.columns)
        for k in range(len(self.eps)):
            row = []
            for name in self.columns:
                col = getattr(self, name)
                row.append("" if col is None else repr(float(col[k])))
            writer.writerow(row)
        return buf.getvalue()


def _atoms(E: EigenSystem):
    """Eigenvalues with the null atoms snapped to exactly 0."""
    return np.where(null_mask(E.alphas), 0.0, E.alphas)


def spectral_function(E: EigenSystem, omega: Region) -> KernelMatrix:
    inside = omega(_atoms(E))
    V = E.vectors[inside]
    return KernelMatrix(E.grid, _bilinear(np.ones(V.shape[0]), V))


def projector_identity_check(E: EigenSystem, omega: Region) -> float:
    """Sup-entry distance between ``E(omega)`` and ``N v_omega(N)``.

    ``v_omega(z) = chi_omega(z) / z``; the right-hand side is the weighted
    composition of the reconstructed kernel with the kernel of
    ``v_omega(N)``.
    """
    atoms = _atoms(E)
    inside = omega(atoms)
    v = np.zeros(atoms.size, dtype=complex)
    v[inside] = 1.0 / atoms[inside]
    V_kernel = KernelMatrix(E.grid, _bilinear(v, E.vectors))
    rhs = compose(reconstruct(E), V_kernel)
    return sup_entry(spectral_function(E, omega).values - rhs.values)


def _phi_sum(E, sym, mask):
    atoms = _atoms(E)
    coeff = sym.phi(atoms[mask])
    return _bilinear(coeff, E.vectors[mask])


def phi_direct(E: EigenSystem, sym: Symbol) -> KernelMatrix:
    """Kernel of ``phi(N)`` summed over all nonzero atoms."""
    mask = ~null_mask(E.alphas)
    return KernelMatrix(E.grid, _phi_sum(E, sym, mask))


def _validate_eps(eps_seq):
    eps = np.asarray(list(eps_seq), dtype=float)
    if eps.size == 0:
        raise InvalidSequence("eps sequence is empty")
    if not np.all(np.isfinite(eps)) or np.any(eps <= 0):
        raise InvalidSequence("eps values must be positive and finite")
    if np.any(np.diff(eps) >= 0):
        raise InvalidSequence("eps sequence must be strictly decreasing")
    return eps


def phi_pv(E: EigenSystem, sym: Symbol, eps_seq):
    """Principal-value kernels ``Phi_eps`` along a decreasing sequence.

    Returns
    -------
    kernels : list of KernelMatrix
    table : PVTable
        ``sup_dist_to_direct[k] = sup |Phi_{eps_k} - phi_direct|``.
    """
    eps = _validate_eps(eps_seq)
    nonnull = ~null_mask(E.alphas)
    mags = np.abs(E.alphas)
    direct = phi_direct(E, sym)
    kernels, dist = [], []
    for e in eps:
        mask = nonnull & (mags > e)
        K = KernelMatrix(E.grid, _phi_sum(E, sym, mask))
        kernels.append(K)
        dist.append(sup_entry(K.values - direct.values))
    return kernels, PVTable(eps=eps.tolist(), sup_dist_to_direct=dist)


def require_sector(E: EigenSystem, sector: Sector):
    """Raise unless every nonzero atom of ``E`` lies in ``sector``."""
    if sector is None:
        raise SectorRequired("a sector is required")
    alphas = E.alphas[~null_mask(E.alphas)]
    if alphas.size == 0:
        return
    atol = 1e-12 * np.abs(alphas).max()
    if not np.all(sector.contains(alphas, atol=atol)):
        raise SectorRequired("eigenvalues fall outside the given sector")


def _x_coeffs(E, sector, mask):
    return sector.rotate(E.alphas[mask]).real


def x_epsilon(E: EigenSystem, sector: Sector, eps: float) -> KernelMatrix:
    """``sum_{|alpha_n| > eps} Re(e^{i rot} alpha_n) phi_n(s) conj(phi_n(t))``."""
    require_sector(E, sector)
    mask = ~null_mask(E.alphas) & (np.abs(E.alphas) > eps)
    return KernelMatrix(E.grid, _bilinear(_x_coeffs(E, sector, mask), E.vectors[mask]))


def _check_pair(eps_m, eps_n):
    if not (0 < eps_m <= eps_n):
        raise InvalidArgument(f"need 0 < eps_m <= eps_n, got {eps_m!r}, {eps_n!r}")


def _diag_x(E, sector, mask):
    x = _x_coeffs(E, sector, mask)
    return x @ np.abs(E.vectors[mask]) ** 2


def monotonicity_margins(E: EigenSystem, sector: Sector, eps_m: float, eps_n: float):
    """Return ``(pair, majorant)`` margins.

    ``pair = min_s [X_{eps_m}(s,s) - X_{eps_n}(s,s)]`` and
    ``majorant = min over eps in {eps_m, eps_n} of min_s [X(s,s) - X_eps(s,s)]``
    where ``X`` is the rotated Hermitian part of the full kernel.
    """
    _check_pair(eps_m, eps_n)
    require_sector(E, sector)
    xm = np.real(np.diag(x_epsilon(E, sector, eps_m).values))
    xn = np.real(np.diag(x_epsilon(E, sector, eps_n).values))
    X = np.real(np.diag(rotated_hermitian_part(reconstruct(E), sector.rotation).values))
    pair = float(np.min(xm - xn))
    majorant = float(min(np.min(X - xm), np.min(X - xn)))
    return pair, majorant


def monotonicity_check(E: EigenSystem, sector: Sector, eps_m: float, eps_n: float) -> float:
    return min(monotonicity_margins(E, sector, eps_m, eps_n))


def reid_bound_check(E: EigenSystem, sector: Sector, sym: Symbol, eps_m: float, eps_n: float) -> float:
    """Worst slack of the Cauchy estimate between ``Phi_{eps_m}`` and ``Phi_{eps_n}``.

    With ``B = v_sup^2 (1 + slope^2)``, the slack at ``(s, t)`` is
    ``B dX(s) dX(t) - |Phi_{eps_m}(s,t) - Phi_{eps_n}(s,t)|^2`` where
    ``dX = X_{eps_m} - X_{eps_n}`` on the diagonal. Both differences are
    summed directly over the atoms with ``eps_m < |alpha| <= eps_n``.
    """
    _check_pair(eps_m, eps_n)
    require_sector(E, sector)
    mags = np.abs(E.alphas)
    band = ~null_mask(E.alphas) & (mags > eps_m) & (mags <= eps_n)
    bound = sym.v_sup**2 * (1.0 + sector.slope**2)
    dX = _diag_x(E, sector, band)
    dPhi = _phi_sum(E, sym, band)
    slack = bound * dX[:, None] * dX[None, :] - np.abs(dPhi) ** 2
    return float(np.min(slack))
