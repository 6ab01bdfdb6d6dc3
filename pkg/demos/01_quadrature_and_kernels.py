"""Sampling a kernel on a quadrature grid and looking at it as an operator."""

# %%
import numpy as np

from carleman import GridFn, adjoint, apply, carleman_row, check_k0, inner, l2_norm, make_grid, sample_kernel

grid = make_grid(cutoff=40.0, count=64)
print("nodes:", len(grid), " sum of weights:", grid.weights.sum())

# %% A separable kernel e^{-s-t}: applying it projects onto e^{-s}.
K = sample_kernel(lambda s, t: np.exp(-s - t), grid)
f = GridFn.from_callable(grid, lambda s: np.exp(-s / 3))
b = GridFn.from_callable(grid, lambda s: np.exp(-s))
print("apply(K, f)(s_0)     :", apply(K, f).values[0])
print("<f, e^-s> e^{-s_0}   :", inner(f, b) * b.values[0])

# %% The adjoint identity holds in the weighted inner product.
g = GridFn.from_callable(grid, lambda s: np.sin(s) * np.exp(-s / 4))
print("<Kf, g> - <f, K*g>   :", abs(inner(apply(K, f), g) - inner(f, apply(adjoint(K), g))))

# %% Carleman functions are the conjugated rows; their norms bound the output pointwise.
row = carleman_row(K, 0)
print("|Kf(s_0)| <= ||k(s_0)|| ||f||:", abs(apply(K, f).values[0]), "<=", l2_norm(row) * l2_norm(f))
print(check_k0(K))
