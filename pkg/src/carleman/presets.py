"""Synthetic normal kernels with a known diagonal form.

Eigenfunctions are dilated Laguerre functions
``sqrt(c) L_n(c s) exp(-c s / 2)``, orthonormal on the half line. The
dilation ``c`` pulls the oscillatory region inside ``[0, L]``; with the
default ``c = 4`` the first 16 functions are resolved by 64
Gauss-Legendre nodes on ``[0, 40]``.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, replace

import numpy as np

from .errors import GridTooCoarse, InvalidArgument
from .kernel import KernelMatrix
from .quadrature import Grid, make_grid
from .spectral import EigenSystem, orthonormality_defect, synthesize_from_diagonal

__all__ = [
    "Preset",
    "PRESETS",
    "get_preset",
    "laguerre_functions",
    "orthonormalize",
    "preset_alphas",
    "synthesize_preset",
]

LAWS = ("linear_growth", "inverse_square")
ANGLE_PATTERNS = ("random", "alternate")
FAMILY_TOL = 1e-6


def laguerre_functions(s, count, scale=1.0):
    """Rows ``n = 0..count-1`` of ``sqrt(scale) L_n(scale s) exp(-scale s / 2)``.

    Uses the upward recurrence
    ``(k+1) L_{k+1} = (2k+1-x) L_k - k L_{k-1}``.
    """
    x = scale * np.asarray(s, dtype=float)
    out = np.empty((count, x.size))
    if count == 0:
        return out
    damp = np.sqrt(scale) * np.exp(-x / 2)
    prev = np.ones_like(x)
    out[0] = prev * damp
    if count > 1:
        cur = 1.0 - x
        out[1] = cur * damp
        for k in range(1, count - 1):
            prev, cur = cur, ((2 * k + 1 - x) * cur - k * prev) / (k + 1)
            out[k + 1] = cur * damp
    return out


def orthonormalize(vectors, grid: Grid):
    """Symmetric (Loewdin) orthonormalization in the weighted inner product.

    Of all orthonormal families, ``G^{-1/2} F`` is the closest to ``F``.
    """
    F = np.asarray(vectors, dtype=complex)
    G = (F * grid.weights) @ F.conj().T
    G = 0.5 * (G + G.conj().T)
    vals, U = np.linalg.eigh(G)
    if vals.min() <= 0:
        raise GridTooCoarse("sampled family is linearly dependent on this grid")
    G_inv_half = (U / np.sqrt(vals)) @ U.conj().T
    return G_inv_half @ F


@dataclass(frozen=True)
class Preset:
    """Recipe for a synthetic kernel ``sum_n alpha_n phi_n(s) conj(phi_n(t))``.

    Moduli follow ``law``: ``base * (n+1)`` (``linear_growth``, growing
    like an unbounded operator's finite sections) or ``base / (n+1)^2``
    (``inverse_square``). Arguments are ``center + theta_n`` with
    ``|theta_n| <= theta_max < pi/2``; ``alternate`` puts them at
    ``+theta_max, -theta_max, ...`` and ``random`` draws them uniformly.
    """

    name: str = "custom"
    family: str = "laguerre"
    count: int = 16
    law: str = "linear_growth"
    base: float = 1.0
    theta_max: float = 0.4
    center: float = 0.0
    angles: str = "random"
    seed: int = 0
    cutoff: float = 40.0
    nodes: int = 64
    rule: str = "gauss_legendre"
    scale: float = 4.0

    def __post_init__(self):
        if self.family != "laguerre":
            raise InvalidArgument(f"unknown family {self.family!r}")
        if self.count < 1:
            raise InvalidArgument("count must be at least 1")
        if self.law not in LAWS:
            raise InvalidArgument(f"unknown eigenvalue law {self.law!r}")
        if self.angles not in ANGLE_PATTERNS:
            raise InvalidArgument(f"unknown angle pattern {self.angles!r}")
        if not 0 <= self.theta_max < np.pi / 2:
            raise InvalidArgument("theta_max must lie in [0, pi/2)")
        if not self.base > 0:
            raise InvalidArgument("base magnitude must be positive")
        if not self.scale > 0:
            raise InvalidArgument("scale must be positive")

    def grid(self) -> Grid:
        return make_grid(self.cutoff, self.nodes, self.rule)

    def with_(self, **changes) -> "Preset":
        return replace(self, **changes)

    def as_dict(self):
        return asdict(self)


PRESETS = {
    p.name: p
    for p in (
        Preset("classical", law="inverse_square", theta_max=0.0),
        Preset("sector", law="linear_growth", theta_max=0.4),
        Preset("rotated", law="linear_growth", theta_max=0.6, center=2.0, seed=7),
        Preset("wedge", law="inverse_square", theta_max=np.pi / 4, angles="alternate"),
        Preset("rank1", count=1, law="inverse_square", base=2.0, theta_max=0.0),
        Preset("small", count=8, nodes=40, scale=2.5, law="linear_growth", theta_max=0.3, seed=3),
    )
}


def get_preset(name: str) -> Preset:
    try:
        return PRESETS[name]
    except KeyError:
        raise InvalidArgument(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None


def preset_alphas(p: Preset) -> np.ndarray:
    n = np.arange(p.count)
    if p.law == "linear_growth":
        mags = p.base * (n + 1.0)
    else:
        mags = p.base / (n + 1.0) ** 2
    if p.angles == "alternate":
        theta = np.where(n % 2 == 0, p.theta_max, -p.theta_max)
    else:
        theta = np.random.default_rng(p.seed).uniform(-p.theta_max, p.theta_max, p.count)
    return mags * np.exp(1j * (p.center + theta))


def synthesize_preset(p: Preset):
    """Build the kernel and its ground-truth eigensystem.

    Raises :class:`GridTooCoarse` if the sampled Laguerre functions miss
    orthonormality on the grid by more than ``1e-6``; otherwise the family
    is re-orthonormalized so the synthesized kernel is exactly diagonal in
    it.

    Returns
    -------
    K : KernelMatrix
    truth : EigenSystem
        ``truth.info["raw_defect"]`` holds the defect before correction.
    """
    grid = p.grid()
    raw = laguerre_functions(grid.points, p.count, p.scale)
    defect = orthonormality_defect(raw, grid)
    if defect > FAMILY_TOL:
        raise GridTooCoarse(
            f"sampled Laguerre family has orthonormality defect {defect:.3e} "
            f"(> {FAMILY_TOL}); use more nodes or fewer terms",
            defect=defect,
        )
    family = orthonormalize(raw, grid)
    alphas = preset_alphas(p)
    K = synthesize_from_diagonal(alphas, family, grid)
    truth = EigenSystem(grid, alphas, family, {"raw_defect": defect, "preset": p.name})
    return K, truth


def zero_kernel(grid: Grid) -> KernelMatrix:
    return KernelMatrix.zeros(grid)
