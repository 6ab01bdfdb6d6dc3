"""Slow, independent reference implementations for cross-checking.

Nothing here shares summation code with the primary modules: the
eigensolver is power iteration with deflation, operator products are
accumulated one rank-one term at a time, and inequality sweeps are plain
Python loops over grid points with ``math.fsum``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    IncompatibleGrids,
    InvalidArgument,
    NoConvergence,
    NotPositive,
    PreconditionViolation,
    UnknownCheck,
)
from .kernel import KernelMatrix
from .spectral import EigenSystem

__all__ = [
    "OracleConfig",
    "Witness",
    "power_eig_hermitian",
    "weighted_compose",
    "exhaustive_inequality_sweep",
    "CHECKS",
]

OP_ID = "oracle.exhaustive_inequality_sweep"


@dataclass(frozen=True)
class OracleConfig:
    max_iters: int = 10000
    tol: float = 1e-10
    seed: int = 0

    def __post_init__(self):
        if self.max_iters < 1:
            raise InvalidArgument("max_iters must be at least 1")
        if not self.tol > 0:
            raise InvalidArgument("tol must be positive")


@dataclass(frozen=True)
class Witness:
    check: str
    margin: float
    location: dict = field(default_factory=dict)
    op_id: str = OP_ID


def power_eig_hermitian(K: KernelMatrix, count: int, cfg: OracleConfig = OracleConfig()) -> EigenSystem:
    """Leading ``count`` eigenpairs by power iteration with Hotelling deflation.

    Each pair is accepted once ``||K phi - lam phi|| <= tol * ||K||_HS`` in the
    weighted norm. The Hilbert-Schmidt scale keeps the test attainable for
    small eigenvalues after deflation; the eigenvalue error is then of order
    ``(tol ||K||)^2 / gap``.
    """
    vals = np.array(K.values, dtype=complex)
    if np.max(np.abs(vals - vals.conj().T), initial=0.0) > 1e-10 * max(1.0, np.abs(vals).max(initial=0.0)):
        raise PreconditionViolation("power iteration oracle needs a Hermitian kernel")
    n = K.n
    if not 0 <= count <= n:
        raise InvalidArgument(f"count must be in [0, {n}]")
    w = np.array(K.grid.weights)
    rng = np.random.default_rng(cfg.seed)
    D = vals.copy()
    scale = math.sqrt(float(np.sum(w[:, None] * np.abs(vals) ** 2 * w[None, :])))

    def wnorm(f):
        return math.sqrt(math.fsum(w * np.abs(f) ** 2))

    lams, vecs, iters = [], [], []
    for k in range(count):
        x = rng.normal(size=n) + 1j * rng.normal(size=n)
        # start orthogonal to the pairs already found; deflation keeps it there
        for v in vecs:
            x = x - np.sum(w * x * v.conj()) * v
        x /= wnorm(x)
        lam = 0.0
        for it in range(1, cfg.max_iters + 1):
            y = D @ (w * x)
            lam = float(np.sum(w * y * x.conj()).real)
            ynorm = wnorm(y)
            if ynorm <= 1e-14 * max(scale, 1e-300):
                lam = 0.0
                break
            resid = wnorm(y - lam * x)
            if resid <= cfg.tol * scale:
                break
            x = y / ynorm
        else:
            raise NoConvergence(
                f"power iteration for eigenpair {k} did not converge in {cfg.max_iters} iterations",
                iterations=cfg.max_iters,
            )
        lams.append(lam)
        vecs.append(x)
        iters.append(it)
        D = D - lam * np.outer(x, x.conj())
    order = np.argsort(-np.abs(np.array(lams)), kind="stable") if lams else np.array([], int)
    alphas = np.array(lams, dtype=complex)[order] if lams else np.zeros(0, complex)
    V = np.array(vecs)[order] if vecs else np.zeros((0, n), complex)
    return EigenSystem(K.grid, alphas, V, {"method": "power", "iterations": iters})


def weighted_compose(A: KernelMatrix, B: KernelMatrix) -> KernelMatrix:
    """``C_ij = sum_k w_k A_ik B_kj``, accumulated term by term."""
    if not A.grid.same_as(B.grid):
        raise IncompatibleGrids("operands live on different grids")
    n = A.n
    C = np.zeros((n, n), dtype=complex)
    for k in range(n):
        C += A.grid.weights[k] * np.outer(A.values[:, k], B.values[k, :])
    return KernelMatrix(A.grid, C)


# ---------------------------------------------------------------------------
# exhaustive sweeps


def _positive_terms(E):
    xs = [a.real for a in E.alphas.tolist()]
    if not xs:
        return [], []
    big = max(abs(x) for x in xs)
    if min(xs) < -1e-10 * max(1.0, big):
        raise NotPositive("eigenvalue below zero")
    top = max(xs)
    keep = [i for i, x in enumerate(xs) if top > 0 and x > 1e-12 * top]
    return [xs[i] for i in keep], [E.vectors[i].tolist() for i in keep]


def _nonnull(alphas):
    mags = [abs(a) for a in alphas]
    top = max(mags) if mags else 0.0
    return [i for i, m in enumerate(mags) if m > 1e-12 * top]


def _sweep_diag(inst):
    K, E = inst["K_herm"], inst["E_herm"]
    x, V = _positive_terms(E)
    n = K.n
    best = Witness("diag_lower_bound", math.inf)
    for s in range(n):
        ks = K.values[s, s].real
        for m in range(len(x) + 1):
            margin = ks - math.fsum(x[k] * abs(V[k][s]) ** 2 for k in range(m))
            if margin < best.margin:
                best = Witness("diag_lower_bound", margin, {"s": s, "m": m})
    return best


def _sweep_cauchy(inst):
    K, E, p, q = inst["K_herm"], inst["E_herm"], inst["p"], inst["q"]
    x, V = _positive_terms(E)
    n = K.n
    M = max(K.values[i, i].real for i in range(n))
    terms = range(p - 1, min(q, len(x)))
    left = [M * math.fsum(x[k] * abs(V[k][s]) ** 2 for k in terms) for s in range(n)]
    absV = [[abs(z) for z in row] for row in V]
    best = Witness("cauchy_tail", math.inf)
    for s in range(n):
        for t in range(n):
            cross = math.fsum(x[k] * absV[k][s] * absV[k][t] for k in terms)
            margin = left[s] - cross * cross
            if margin < best.margin:
                best = Witness("cauchy_tail", margin, {"s": s, "t": t, "p": p, "q": q})
    return best


def _sweep_bessel(inst):
    K, E = inst["K_herm"], inst["E_herm"]
    x, V = _positive_terms(E)
    n = K.n
    w = K.grid.weights.tolist()
    k_sq = max(math.fsum(w[j] * abs(K.values[i, j]) ** 2 for j in range(n)) for i in range(n))
    best = Witness("bessel", math.inf)
    for s in range(n):
        margin = k_sq - math.fsum(x[k] ** 2 * abs(V[k][s]) ** 2 for k in range(len(x)))
        if margin < best.margin:
            best = Witness("bessel", margin, {"s": s})
    return best


def _rotated_re(alpha, rotation):
    return (complex(math.cos(rotation), math.sin(rotation)) * alpha).real


def _x_diag(E, sector, idx, s):
    return math.fsum(_rotated_re(E.alphas[k], sector.rotation) * abs(E.vectors[k, s]) ** 2 for k in idx)


def _sweep_monotonicity(inst):
    E, sector, em, en = inst["E"], inst["sector"], inst["eps_m"], inst["eps_n"]
    if not 0 < em <= en:
        raise InvalidArgument("need 0 < eps_m <= eps_n")
    nz = _nonnull(E.alphas.tolist())
    above_m = [k for k in nz if abs(E.alphas[k]) > em]
    above_n = [k for k in nz if abs(E.alphas[k]) > en]
    everything = range(E.count)
    best = Witness("monotonicity", math.inf)
    for s in range(len(E.grid)):
        xm = _x_diag(E, sector, above_m, s)
        xn = _x_diag(E, sector, above_n, s)
        full = _x_diag(E, sector, everything, s)
        for name, margin in (("pair", xm - xn), ("majorant_m", full - xm), ("majorant_n", full - xn)):
            if margin < best.margin:
                best = Witness("monotonicity", margin, {"s": s, "kind": name})
    return best


def _sweep_reid(inst):
    E, sector, sym = inst["E"], inst["sector"], inst["symbol"]
    em, en = inst["eps_m"], inst["eps_n"]
    if not 0 < em <= en:
        raise InvalidArgument("need 0 < eps_m <= eps_n")
    band = [k for k in _nonnull(E.alphas.tolist()) if em < abs(E.alphas[k]) <= en]
    bound = sym.v_sup**2 * (1.0 + sector.slope**2)
    coeff = {k: complex(E.alphas[k] * complex(sym.v(np.array([E.alphas[k]]))[0])) for k in band}
    n = len(E.grid)
    dX = [_x_diag(E, sector, band, s) for s in range(n)]
    best = Witness("reid", math.inf)
    for s in range(n):
        for t in range(n):
            re = math.fsum((coeff[k] * E.vectors[k, s] * E.vectors[k, t].conjugate()).real for k in band)
            im = math.fsum((coeff[k] * E.vectors[k, s] * E.vectors[k, t].conjugate()).imag for k in band)
            margin = bound * dX[s] * dX[t] - (re * re + im * im)
            if margin < best.margin:
                best = Witness("reid", margin, {"s": s, "t": t})
    return best


CHECKS = {
    "diag_lower_bound": _sweep_diag,
    "cauchy_tail": _sweep_cauchy,
    "bessel": _sweep_bessel,
    "monotonicity": _sweep_monotonicity,
    "reid": _sweep_reid,
}


def exhaustive_inequality_sweep(check: str, instance: dict) -> Witness:
    """Re-evaluate a named inequality at every grid point (pair).

    ``instance`` keys by check:

    * ``diag_lower_bound``, ``bessel``: ``K_herm``, ``E_herm``
    * ``cauchy_tail``: ``K_herm``, ``E_herm``, ``p``, ``q``
    * ``monotonicity``: ``E``, ``sector``, ``eps_m``, ``eps_n``
    * ``reid``: as ``monotonicity`` plus ``symbol``

    Returns the arg-min witness with its margin.
    """
    try:
        fn = CHECKS[check]
    except KeyError:
        raise UnknownCheck(check) from None
    return fn(instance)
