"""Discrete model of L2 on the half line.

The half line is truncated to ``[0, L]`` and replaced by a quadrature rule.
A function is represented by its samples at the nodes; the weighted sum
``sum_i w_i f_i conj(g_i)`` plays the role of the L2 inner product.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import IncompatibleGrids, InvalidArgument, NoConvergence

__all__ = [
    "Grid",
    "GridFn",
    "make_grid",
    "gauss_legendre",
    "inner",
    "l2_norm",
    "sup_norm",
]

RULES = ("trapezoid", "gauss_legendre")


def _frozen(a, dtype):
    a = np.array(a, dtype=dtype)
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class Grid:
    """Quadrature nodes and weights on ``[0, cutoff]``."""

    points: np.ndarray
    weights: np.ndarray
    cutoff: float

    def __post_init__(self):
        pts = _frozen(self.points, float)
        wts = _frozen(self.weights, float)
        if pts.ndim != 1 or pts.shape != wts.shape or pts.size == 0:
            raise InvalidArgument("points and weights must be 1-d arrays of equal length")
        if not np.all(wts > 0):
            raise InvalidArgument("quadrature weights must be strictly positive")
        if np.any(np.diff(pts) <= 0):
            raise InvalidArgument("quadrature points must be strictly increasing")
        if not self.cutoff > 0:
            raise InvalidArgument("cutoff must be positive")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "weights", wts)
        object.__setattr__(self, "cutoff", float(self.cutoff))

    def __len__(self):
        return self.points.size

    def same_as(self, other: "Grid") -> bool:
        if self is other:
            return True
        return (
            self.cutoff == other.cutoff
            and self.points.shape == other.points.shape
            and np.array_equal(self.points, other.points)
            and np.array_equal(self.weights, other.weights)
        )

    def tail_mask(self, fraction=0.1):
        """Nodes lying in the last ``fraction`` of ``[0, L]``."""
        return self.points >= (1.0 - fraction) * self.cutoff

    def to_dict(self):
        return {
            "points": self.points.tolist(),
            "weights": self.weights.tolist(),
            "cutoff": self.cutoff,
        }

    @classmethod
    def from_dict(cls, d):
        return cls(np.asarray(d["points"], float), np.asarray(d["weights"], float), d["cutoff"])


@dataclass(frozen=True, eq=False)
class GridFn:
    """Samples ``f(s_i)`` of a complex function on a grid."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        vals = _frozen(self.values, complex)
        if vals.shape != (len(self.grid),):
            raise InvalidArgument(
                f"expected {len(self.grid)} samples, got shape {vals.shape}"
            )
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_callable(cls, grid, f):
        return cls(grid, np.asarray(f(grid.points), complex))

    def __add__(self, other):
        _check_same(self.grid, other.grid)
        return GridFn(self.grid, self.values + other.values)

    def __sub__(self, other):
        _check_same(self.grid, other.grid)
        return GridFn(self.grid, self.values - other.values)

    def __mul__(self, c):
        return GridFn(self.grid, self.values * c)

    __rmul__ = __mul__


def _check_same(a: Grid, b: Grid):
    if not a.same_as(b):
        raise IncompatibleGrids("functions live on different grids")


def gauss_legendre(count, tol=1e-14, max_iter=100):
    """Gauss-Legendre nodes and weights on ``[-1, 1]``.

    Roots of the Legendre polynomial ``P_count`` are found by Newton's
    method, starting from the Chebyshev-like guess
    ``cos(pi (i - 1/4) / (count + 1/2))``. The polynomial and its
    derivative come from the three-term recurrence.

    Returns
    -------
    nodes, weights : ndarray
        Nodes in increasing order.
    """
    n = int(count)
    i = np.arange(1, n + 1)
    x = np.cos(np.pi * (i - 0.25) / (n + 0.5))
    converged = np.zeros(n, dtype=bool)
    dp = np.ones(n)
    for _ in range(max_iter):
        p0 = np.ones(n)
        p1 = x.copy()
        for k in range(1, n):
            p0, p1 = p1, ((2 * k + 1) * x * p1 - k * p0) / (k + 1)
        # p1 = P_n(x), p0 = P_{n-1}(x)
        dp = n * (x * p1 - p0) / (x * x - 1.0)
        step = p1 / dp
        step[converged] = 0.0
        x = x - step
        converged |= np.abs(step) <= tol
        if converged.all():
            break
    else:
        raise NoConvergence(
            f"Gauss-Legendre Newton iteration did not converge for {n} nodes",
            iterations=max_iter,
        )
    # recompute the derivative at the final nodes
    p0 = np.ones(n)
    p1 = x.copy()
    for k in range(1, n):
        p0, p1 = p1, ((2 * k + 1) * x * p1 - k * p0) / (k + 1)
    dp = n * (x * p1 - p0) / (x * x - 1.0)
    w = 2.0 / ((1.0 - x * x) * dp * dp)
    order = np.argsort(x)
    return x[order], w[order]


def make_grid(cutoff=40.0, count=64, rule="gauss_legendre") -> Grid:
    """Build a quadrature grid on ``[0, cutoff]``.

    ``trapezoid`` uses ``count`` equispaced nodes including both end
    points (so ``count >= 2``); ``gauss_legendre`` maps the standard rule
    from ``[-1, 1]``.
    """
    if not (np.isfinite(cutoff) and cutoff > 0):
        raise InvalidArgument(f"cutoff must be positive, got {cutoff!r}")
    if int(count) != count or count < 1:
        raise InvalidArgument(f"count must be a positive integer, got {count!r}")
    count = int(count)
    if rule == "trapezoid":
        if count < 2:
            raise InvalidArgument("the trapezoid rule needs at least two nodes")
        points = np.linspace(0.0, cutoff, count)
        h = cutoff / (count - 1)
        weights = np.full(count, h)
        weights[0] = weights[-1] = h / 2
    elif rule == "gauss_legendre":
        x, w = gauss_legendre(count)
        points = cutoff * (x + 1.0) / 2.0
        weights = w * (cutoff / 2.0)
    else:
        raise InvalidArgument(f"unknown quadrature rule {rule!r}; expected one of {RULES}")
    return Grid(points, weights, cutoff)


def inner(f: GridFn, g: GridFn) -> complex:
    _check_same(f.grid, g.grid)
    return complex(np.sum(f.grid.weights * f.values * np.conj(g.values)))


def l2_norm(f: GridFn) -> float:
    """Weighted 2-norm, scaled by the sup so tiny or huge samples neither under- nor overflow."""
    scale = sup_norm(f)
    if scale == 0.0 or not np.isfinite(scale):
        return scale
    return float(scale * np.sqrt(np.sum(f.grid.weights * np.abs(f.values / scale) ** 2)))


def sup_norm(f: GridFn) -> float:
    return float(np.max(np.abs(f.values), initial=0.0))
