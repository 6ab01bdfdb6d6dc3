"""phi(N) = N v(N) as a limit of sums over eigenvalues outside shrinking disks."""

# %%
import numpy as np

from carleman import Region, compose, eig_normal, get_preset, phi_pv, projector_identity_check, reid_bound_check
from carleman import sector_fit, spectral_function, sup_entry, symbol_from_name, synthesize_preset

K, _ = synthesize_preset(get_preset("sector"))
E = eig_normal(K)
sector = sector_fit(E.nonnull().alphas)
mags = np.abs(E.nonnull().alphas)

# %% Principal-value kernels for the symbol v(z) = 1 / (1 + |z|).
sym = symbol_from_name("cayley")
eps = np.geomspace(2 * mags.max(), mags.min() / 4, 10)
_, table = phi_pv(E, sym, eps)
for e, d in zip(table.eps, table.sup_dist_to_direct):
    print(f"eps {e:8.4f}   sup |Phi_eps - phi(N)| {d:.3e}")

# %% The Cauchy estimate that makes the limit uniform.
print("worst slack between eps[2] and eps[6]:", reid_bound_check(E, sector, sym, eps[6], eps[2]))

# %% Spectral projections: Hermitian, idempotent, and equal to N v_omega(N).
omega = Region.annulus(3.0, 9.0)
P = spectral_function(E, omega)
print("idempotency residual:", sup_entry(compose(P, P).values - P.values))
print("E(omega) - N v_omega(N):", projector_identity_check(E, omega))
