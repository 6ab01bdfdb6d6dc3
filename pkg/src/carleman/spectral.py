"""Diagonalization of normal kernels.

Hermitian kernels are diagonalized with a cyclic Jacobi method applied to
the symmetrized matrix ``W^1/2 K W^1/2``; eigenfunctions are mapped back
with ``W^-1/2`` so they are orthonormal in the weighted inner product.
Normal kernels are split into the commuting Hermitian pair
``X = (K + K*)/2``, ``Y = (K - K*)/2i``: ``X`` is diagonalized first and
``Y`` is diagonalized inside each (near-)degenerate eigenspace of ``X``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    InvalidArgument,
    InvalidFamily,
    NoConvergence,
    NotNormal,
    PreconditionViolation,
    SectorTooWide,
    ZeroOperator,
)
from .kernel import (
    KernelMatrix,
    adjoint,
    compose,
    hermitian_defect,
    rotated_hermitian_part,
    sup_entry,
)
from .quadrature import Grid, GridFn

__all__ = [
    "EigenSystem",
    "Sector",
    "jacobi_eigh",
    "check_normality",
    "eig_hermitian",
    "eig_normal",
    "reconstruct",
    "synthesize_from_diagonal",
    "sector_fit",
    "rotate",
    "null_mask",
    "orthonormality_defect",
    "hausdorff_distance",
]

#: relative size below which an eigenvalue is treated as the atom at zero
NULL_REL_TOL = 1e-12
SLOPE_FLOOR = 1e-12


@dataclass(frozen=True, eq=False)
class EigenSystem:
    """Eigenvalues ``alphas[n]`` with eigenfunction samples ``vectors[n]``.

    ``vectors`` has shape ``(count, len(grid))``; row ``n`` holds
    ``phi_n(s_i)``.
    """

    grid: Grid
    alphas: np.ndarray
    vectors: np.ndarray
    info: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        a = np.array(self.alphas, dtype=complex).reshape(-1)
        v = np.array(self.vectors, dtype=complex).reshape(a.size, len(self.grid))
        a.flags.writeable = False
        v.flags.writeable = False
        object.__setattr__(self, "alphas", a)
        object.__setattr__(self, "vectors", v)

    @property
    def count(self):
        return self.alphas.size

    def vector(self, n) -> GridFn:
        return GridFn(self.grid, self.vectors[n])

    def select(self, idx) -> "EigenSystem":
        return EigenSystem(self.grid, self.alphas[idx], self.vectors[idx], dict(self.info))

    def truncated(self, m) -> "EigenSystem":
        return self.select(slice(0, m))

    def nonnull(self, rel=NULL_REL_TOL) -> "EigenSystem":
        return self.select(~null_mask(self.alphas, rel))

    def to_dict(self):
        return {
            "grid": self.grid.to_dict(),
            "alphas": [[a.real, a.imag] for a in self.alphas.tolist()],
            "vectors": [[[z.real, z.imag] for z in row] for row in self.vectors.tolist()],
        }

    @classmethod
    def from_dict(cls, d, grid=None):
        grid = grid if grid is not None else Grid.from_dict(d["grid"])
        alphas = np.array([complex(re, im) for re, im in d["alphas"]], dtype=complex)
        vectors = np.array(
            [[complex(re, im) for re, im in row] for row in d["vectors"]], dtype=complex
        ).reshape(alphas.size, len(grid))
        return cls(grid, alphas, vectors)


@dataclass(frozen=True)
class Sector:
    """Closed sector ``|Im(e^{i rotation} z)| <= slope * Re(e^{i rotation} z)``."""

    rotation: float
    slope: float

    def __post_init__(self):
        if not self.slope > 0:
            raise InvalidArgument("sector slope must be positive")

    def rotate(self, z):
        return np.exp(1j * self.rotation) * np.asarray(z)

    def margin(self, z):
        """``slope * Re - |Im|`` in the rotated frame; nonnegative inside."""
        r = self.rotate(z)
        return self.slope * r.real - np.abs(r.imag)

    def contains(self, z, atol=1e-12):
        r = self.rotate(z)
        return (r.real > 0) & (np.abs(r.imag) <= self.slope * r.real + atol)

    @property
    def half_angle(self):
        return float(np.arctan(self.slope))


def null_mask(alphas, rel=NULL_REL_TOL):
    """True where ``|alpha| <= rel * max|alpha|`` (the atom at zero)."""
    mags = np.abs(np.asarray(alphas))
    if mags.size == 0:
        return np.zeros(0, dtype=bool)
    return mags <= rel * mags.max()


def _round_robin(m):
    """Pairings for ``m - 1`` rounds covering every pair of ``range(m)`` once."""
    arr = list(range(m))
    rounds = []
    for _ in range(m - 1):
        rounds.append(
            (np.array([arr[i] for i in range(m // 2)]), np.array([arr[m - 1 - i] for i in range(m // 2)]))
        )
        arr = [arr[0], arr[-1]] + arr[1:-1]
    return rounds


def _off(A):
    d = np.diag(np.diag(A))
    return float(np.linalg.norm(A - d))


def jacobi_eigh(S, tol=1e-12, max_sweeps=100):
    """Cyclic Jacobi eigensolver for a complex Hermitian matrix.

    Sweeps use round-robin ordering, so each round applies ``n // 2``
    disjoint plane rotations at once. Every rotation first removes the
    phase of the pivot ``S[p, q]`` and then applies the real symmetric
    Jacobi rotation.

    Parameters
    ----------
    S : (n, n) array_like
        Hermitian matrix. Only its Hermitian part is used.
    tol : float
        Stop once the off-diagonal Frobenius mass is at most
        ``tol * ||S||_F``.
    max_sweeps : int

    Returns
    -------
    w : (n,) ndarray of float
        Eigenvalues (unsorted, in diagonal order).
    V : (n, n) ndarray of complex
        Unitary matrix whose columns are the eigenvectors.
    history : list of float
        Off-diagonal mass before the first sweep and after each sweep.
    """
    A = np.array(S, dtype=complex)
    A = 0.5 * (A + A.conj().T)
    n = A.shape[0]
    V = np.eye(n, dtype=complex)
    scale = float(np.linalg.norm(A))
    history = [_off(A)]
    if n < 2 or history[0] <= tol * scale:
        return np.real(np.diag(A)).copy(), V, history
    m = n + (n % 2)
    rounds = _round_robin(m)
    tiny = np.finfo(float).tiny
    for _ in range(max_sweeps):
        for P, Q in rounds:
            keep = (P < n) & (Q < n)
            p, q = P[keep], Q[keep]
            apq = A[p, q]
            r = np.abs(apq)
            active = r > tiny
            if not active.any():
                continue
            p, q, apq, r = p[active], q[active], apq[active], r[active]
            e = apq / r
            app = A[p, p].real
            aqq = A[q, q].real
            theta = (aqq - app) / (2.0 * r)
            sgn = np.where(theta >= 0, 1.0, -1.0)
            t = sgn / (np.abs(theta) + np.hypot(theta, 1.0))
            c = 1.0 / np.sqrt(t * t + 1.0)
            s = t * c
            ec = np.conj(e)
            # columns: A <- A U with U = [[c, s], [-s e*, c e*]]
            Ap = A[:, p].copy()
            Aq = A[:, q].copy()
            A[:, p] = Ap * c - Aq * (s * ec)
            A[:, q] = Ap * s + Aq * (c * ec)
            Vp = V[:, p].copy()
            Vq = V[:, q].copy()
            V[:, p] = Vp * c - Vq * (s * ec)
            V[:, q] = Vp * s + Vq * (c * ec)
            # rows: A <- U^H A
            Rp = A[p, :].copy()
            Rq = A[q, :].copy()
            A[p, :] = Rp * c[:, None] - Rq * (s * e)[:, None]
            A[q, :] = Rp * s[:, None] + Rq * (c * e)[:, None]
            A[p, q] = 0.0
            A[q, p] = 0.0
            A[p, p] = A[p, p].real
            A[q, q] = A[q, q].real
        history.append(_off(A))
        if history[-1] <= tol * scale:
            return np.real(np.diag(A)).copy(), V, history
    raise NoConvergence(
        f"Jacobi did not converge in {max_sweeps} sweeps (off-diagonal mass {history[-1]:.3e})",
        iterations=max_sweeps,
    )


def _arg(z, rel):
    """Argument in (-pi, pi], reading a relatively negligible imaginary part as 0.

    Keeps roundoff from flipping eigenvalues on the negative real axis to -pi.
    """
    if abs(z.imag) <= rel * abs(z):
        z = complex(z.real, 0.0)
    return float(np.angle(z))


def _canonical_order(alphas, rel=1e-12):
    """Descending modulus; equal moduli ordered by ascending argument."""
    mags = np.abs(alphas)
    order = list(np.argsort(-mags, kind="stable"))
    if not order:
        return np.array(order, dtype=int)
    tie = rel * max(mags.max(), np.finfo(float).tiny)
    out = []
    i = 0
    while i < len(order):
        j = i + 1
        while j < len(order) and mags[order[i]] - mags[order[j]] <= tie:
            j += 1
        group = order[i:j]
        group.sort(key=lambda k: (_arg(alphas[k], rel), k))
        out.extend(group)
        i = j
    return np.array(out, dtype=int)


def _fix_phases(vectors):
    """Make the largest-modulus component of each row real and positive."""
    v = np.array(vectors, dtype=complex)
    if v.size == 0:
        return v
    k = np.argmax(np.abs(v), axis=1)
    lead = v[np.arange(v.shape[0]), k]
    mag = np.abs(lead)
    phase = np.where(mag > 0, np.conj(lead) / np.where(mag > 0, mag, 1.0), 1.0)
    return v * phase[:, None]


def _finish(grid, alphas, vectors, info):
    order = _canonical_order(alphas)
    return EigenSystem(grid, alphas[order], _fix_phases(vectors[order]), info)


def check_normality(K: KernelMatrix) -> float:
    """Sup-entry of the commutator kernel ``K K* - K* K``."""
    Ks = adjoint(K)
    return sup_entry(compose(K, Ks).values - compose(Ks, K).values)


def _hermitian_raw(K: KernelMatrix, tol=1e-12, max_sweeps=100):
    w = K.grid.weights
    r = np.sqrt(w)
    S = r[:, None] * K.values * r[None, :]
    vals, U, history = jacobi_eigh(S, tol=tol, max_sweeps=max_sweeps)
    vectors = (U / r[:, None]).T
    return vals, vectors, history


def eig_hermitian(K: KernelMatrix, tol=1e-12, max_sweeps=100) -> EigenSystem:
    """Eigen-decomposition of a Hermitian kernel.

    Eigenvalues are returned as complex numbers with zero imaginary part,
    ordered by decreasing modulus.
    """
    defect = hermitian_defect(K)
    if defect > 1e-10 * max(1.0, sup_entry(K)):
        raise PreconditionViolation(f"kernel is not Hermitian (defect {defect:.3e})")
    vals, vectors, history = _hermitian_raw(K, tol, max_sweeps)
    info = {"jacobi_history": history, "method": "jacobi"}
    return _finish(K.grid, vals.astype(complex), vectors, info)


def eig_normal(K: KernelMatrix, cluster_tol=1e-8, normal_tol=1e-8, max_sweeps=100) -> EigenSystem:
    """Eigen-decomposition of a normal kernel via its Hermitian pair.

    Eigenvalues of ``X`` closer than ``cluster_tol`` (relative to the
    Frobenius norm of the symmetrized kernel) are grouped, and ``Y`` is
    diagonalized on each group's eigenspace. Gaps lying just above the
    threshold are reported in ``info["ambiguous_gaps"]``.
    """
    residual = check_normality(K)
    if residual > normal_tol * max(sup_entry(K), np.finfo(float).tiny):
        raise NotNormal(f"kernel is not normal (commutator residual {residual:.3e})", residual)
    grid = K.grid
    w = grid.weights
    X = rotated_hermitian_part(K, 0.0)
    Y = (K.values - K.values.conj().T) / 2j
    xs, Phi, history = _hermitian_raw(X, max_sweeps=max_sweeps)
    order = np.argsort(xs, kind="stable")
    xs, Phi = xs[order], Phi[order]

    r = np.sqrt(w)
    scale = float(np.linalg.norm(r[:, None] * K.values * r[None, :]))
    thresh = cluster_tol * scale
    gaps = np.diff(xs)
    breaks = np.flatnonzero(gaps > thresh)
    bounds = np.concatenate([[0], breaks + 1, [xs.size]])
    ambiguous = [float(g) for g in gaps if thresh < g <= 100 * thresh]

    alphas = np.empty(xs.size, dtype=complex)
    vectors = np.empty_like(Phi)
    clusters = []
    for lo, hi in zip(bounds[:-1], bounds[1:]):
        block = Phi[lo:hi]
        Yc = (block.conj() * w) @ Y @ (block * w).T
        if hi - lo == 1:
            alphas[lo] = xs[lo] + 1j * Yc[0, 0].real
            vectors[lo] = block[0]
            continue
        clusters.append(int(hi - lo))
        yvals, U, _ = jacobi_eigh(Yc, max_sweeps=max_sweeps)
        rotated = U.T @ block
        Xc = np.einsum("ki,ij,kj->k", rotated.conj() * w, X.values, rotated * w).real
        alphas[lo:hi] = Xc + 1j * yvals
        vectors[lo:hi] = rotated
    info = {
        "method": "jacobi-pair",
        "normality_residual": residual,
        "clusters": clusters,
        "ambiguous_gaps": ambiguous,
        "jacobi_history": history,
    }
    return _finish(grid, alphas, vectors, info)


def _bilinear(alphas, vectors):
    """``sum_n alphas[n] v_n(s_i) conj(v_n(s_j))``."""
    return (vectors.T * alphas) @ vectors.conj()


def reconstruct(E: EigenSystem) -> KernelMatrix:
    return KernelMatrix(E.grid, _bilinear(E.alphas, E.vectors))


def orthonormality_defect(E_or_vectors, grid=None) -> float:
    if isinstance(E_or_vectors, EigenSystem):
        V, w = E_or_vectors.vectors, E_or_vectors.grid.weights
    else:
        V, w = np.asarray(E_or_vectors, complex), grid.weights
    if V.shape[0] == 0:
        return 0.0
    G = (V * w) @ V.conj().T
    return float(np.max(np.abs(G - np.eye(V.shape[0]))))


def synthesize_from_diagonal(alphas, family, grid: Grid | None = None, tol=1e-8) -> KernelMatrix:
    """Kernel of ``sum_n alphas[n] <., phi_n> phi_n``.

    ``family`` is a sequence of :class:`GridFn` or a ``(count, n)`` array
    (then ``grid`` is required).
    """
    alphas = np.asarray(alphas, dtype=complex).reshape(-1)
    if grid is None:
        if len(family) == 0:
            raise InvalidArgument("grid is required for an empty family")
        grid = family[0].grid
    if len(family) and isinstance(family[0], GridFn):
        for f in family:
            if not f.grid.same_as(grid):
                raise InvalidFamily("family members live on different grids")
        V = np.array([f.values for f in family])
    else:
        V = np.asarray(family, dtype=complex).reshape(-1, len(grid))
    if V.shape[0] != alphas.size:
        raise InvalidArgument(f"{alphas.size} eigenvalues for {V.shape[0]} functions")
    defect = orthonormality_defect(V, grid)
    if defect > tol:
        raise InvalidFamily(f"family is not orthonormal (defect {defect:.3e})")
    return reconstruct(EigenSystem(grid, alphas, V))


def sector_fit(alphas, atol=None) -> Sector:
    """Fit a sector with vertex 0 around the nonzero eigenvalues.

    The axis is the circular mean of the normalized eigenvalues; the slope
    is the worst ``|Im| / Re`` in the rotated frame. Eigenvalues with
    ``|alpha| <= atol`` (default ``1e-12 * max|alpha|``) are ignored.
    """
    a = np.asarray(alphas, dtype=complex).reshape(-1)
    mags = np.abs(a)
    if a.size == 0 or mags.max() == 0:
        raise ZeroOperator("no nonzero eigenvalues to fit a sector to")
    if atol is None:
        atol = NULL_REL_TOL * mags.max()
    keep = mags > atol
    if not keep.any():
        raise ZeroOperator("all eigenvalues are below the zero threshold")
    a, mags = a[keep], mags[keep]
    rotation = float(np.mod(-np.angle(np.sum(a / mags)), 2 * np.pi))
    if rotation >= 2 * np.pi:  # mod of a tiny negative angle rounds up to 2 pi
        rotation = 0.0
    r = np.exp(1j * rotation) * a
    if np.any(r.real <= 0):
        raise SectorTooWide("spectrum does not fit in a sector of opening angle below pi")
    slope = float(np.max(np.abs(r.imag) / r.real))
    return Sector(rotation, max(slope, SLOPE_FLOOR))


def rotate(E: EigenSystem, alpha: float) -> EigenSystem:
    return EigenSystem(E.grid, E.alphas * np.exp(1j * alpha), E.vectors, dict(E.info))


def hausdorff_distance(a, b) -> float:
    """Hausdorff distance between two finite subsets of the complex plane."""
    a = np.asarray(a, complex).reshape(-1)
    b = np.asarray(b, complex).reshape(-1)
    if a.size == 0 and b.size == 0:
        return 0.0
    if a.size == 0 or b.size == 0:
        return float("inf")
    D = np.abs(a[:, None] - b[None, :])
    return float(max(D.min(axis=1).max(), D.min(axis=0).max()))
