"""Convergence of the bilinear series sum alpha_n phi_n(s) conj(phi_n(t))."""

# %%
from carleman import eig_hermitian, eig_normal, mercer_report, rotated_hermitian_part, sector_fit, synthesize_preset
from carleman import bessel_check, cauchy_tail_bound_check, diag_lower_bound_check, get_preset

K, _ = synthesize_preset(get_preset("wedge"))
E = eig_normal(K)
sector = sector_fit(E.nonnull().alphas)
table = mercer_report(K, E, sector)

# %% Uniform error, diagonal (Dini) error, and the absolute tail with its majorant.
print(f"{'m':>3} {'sup_err':>10} {'diag_err':>10} {'abs_tail':>10} {'bound':>10}")
for m, a, b, c, d in zip(table.orders, table.sup_err, table.diag_sup_err, table.abs_tail, table.tail_bound):
    print(f"{m:>3} {a:10.3e} {b:10.3e} {c:10.3e} {d:10.3e}")

# %% The inequalities behind the convergence, on the rotated positive part.
T = rotated_hermitian_part(K, sector.rotation)
ET = eig_hermitian(T)
print("diagonal majorant slack:", diag_lower_bound_check(T, ET))
print("Cauchy tail slack (terms 4..16):", cauchy_tail_bound_check(T, ET, 4, 16))
print("Bessel slack:", bessel_check(T, ET))
