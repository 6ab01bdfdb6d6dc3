"""Mercer expansions and functional calculus for sampled normal Carleman kernels."""

from .calculus import (
    BUILTIN_SYMBOLS,
    PVTable,
    Region,
    Symbol,
    monotonicity_check,
    phi_direct,
    phi_pv,
    projector_identity_check,
    reid_bound_check,
    spectral_function,
    symbol_from_name,
    x_epsilon,
)
from .errors import *  # noqa: F401,F403
from .kernel import (
    K0Report,
    KernelMatrix,
    adjoint,
    apply,
    carleman_col,
    carleman_row,
    check_k0,
    compose,
    hermitian_defect,
    modulus_proxy,
    rotated_hermitian_part,
    sample_kernel,
    sup_entry,
)
from .mercer import (
    ConvergenceTable,
    bessel_check,
    cauchy_tail_bound_check,
    diag_lower_bound_check,
    dini_table,
    mercer_report,
    partial_sum,
    positive_part,
)
from .presets import PRESETS, Preset, get_preset, synthesize_preset
from .quadrature import Grid, GridFn, gauss_legendre, inner, l2_norm, make_grid, sup_norm
from .spectral import (
    EigenSystem,
    Sector,
    check_normality,
    eig_hermitian,
    eig_normal,
    hausdorff_distance,
    jacobi_eigh,
    orthonormality_defect,
    reconstruct,
    rotate,
    sector_fit,
    synthesize_from_diagonal,
)

__version__ = "0.1.0"
