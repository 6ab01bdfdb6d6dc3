import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from carleman import (
    EigenSystem,
    GridFn,
    InvalidArgument,
    InvalidFamily,
    KernelMatrix,
    NoConvergence,
    NotNormal,
    PreconditionViolation,
    Sector,
    SectorTooWide,
    ZeroOperator,
    check_normality,
    eig_hermitian,
    eig_normal,
    hausdorff_distance,
    inner,
    jacobi_eigh,
    make_grid,
    orthonormality_defect,
    reconstruct,
    rotate,
    sector_fit,
    sup_entry,
    synthesize_from_diagonal,
)
from carleman.oracle import power_eig_hermitian
from carleman.presets import PRESETS, synthesize_preset
from carleman.spectral import null_mask
from factories import random_hermitian, random_normal, random_orthonormal


def gram_defect(E):
    G = np.array([[inner(E.vector(m), E.vector(n)) for n in range(E.count)] for m in range(E.count)])
    return np.abs(G - np.eye(E.count)).max()


# --- jacobi -----------------------------------------------------------------


@pytest.mark.parametrize("n", [1, 2, 3, 7, 16, 33])
def test_jacobi_against_numpy(n):
    rng = np.random.default_rng(n)
    A = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    A = A + A.conj().T
    w, V, history = jacobi_eigh(A)
    np.testing.assert_allclose(np.sort(w), np.linalg.eigvalsh(A), atol=1e-11 * np.abs(A).max() * n)
    np.testing.assert_allclose(V.conj().T @ V, np.eye(n), atol=1e-12)
    np.testing.assert_allclose(V @ np.diag(w) @ V.conj().T, A, atol=1e-11 * n)
    assert all(b <= a * (1 + 1e-12) for a, b in zip(history, history[1:]))


def test_jacobi_real_symmetric_and_diagonal_input():
    A = np.diag([3.0, -1.0, 2.0])
    w, V, history = jacobi_eigh(A)
    np.testing.assert_array_equal(w, [3.0, -1.0, 2.0])
    assert len(history) == 1


def test_jacobi_no_convergence():
    rng = np.random.default_rng(0)
    A = rng.normal(size=(12, 12))
    with pytest.raises(NoConvergence) as info:
        jacobi_eigh(A + A.T, max_sweeps=1)
    assert info.value.iterations == 1


# --- eig_hermitian ----------------------------------------------------------


def test_diagonal_kernel_on_trapezoid_grid():
    # the weighted operator (K f)_i = w_i K_ii f_i has eigenvalues K_ii w_i,
    # with eigenfunctions e_i / sqrt(w_i)
    g = make_grid(3.0, 4, "trapezoid")
    d = np.array([4.0, 3.0, 2.0, 1.0])
    E = eig_hermitian(KernelMatrix(g, np.diag(d)))
    want = d * g.weights
    order = np.argsort(-want, kind="stable")
    np.testing.assert_allclose(E.alphas, want[order], atol=1e-15)
    np.testing.assert_allclose(np.abs(E.vectors), np.eye(4)[order] / np.sqrt(g.weights[order])[:, None], atol=1e-15)


def test_rank_one_hermitian():
    rng = np.random.default_rng(3)
    g = make_grid(5.0, 12)
    phi = random_orthonormal(rng, g, 1)[0]
    E = eig_hermitian(KernelMatrix(g, 2 * np.outer(phi, phi.conj())))
    assert E.alphas[0] == pytest.approx(2.0, abs=1e-12)
    assert np.abs(E.alphas[1:]).max() <= 1e-10
    assert abs(abs(inner(E.vector(0), GridFn(g, phi))) - 1) <= 1e-12


def test_hermitian_postconditions():
    rng = np.random.default_rng(4)
    for _ in range(10):
        K, lam = random_hermitian(rng)
        E = eig_hermitian(K)
        assert np.abs(E.alphas.imag).max() <= 1e-12
        assert sup_entry(reconstruct(E).values - K.values) <= 1e-8
        assert orthonormality_defect(E) <= 1e-8
        assert gram_defect(E) <= 1e-8
        hist = E.info["jacobi_history"]
        assert all(b <= a * (1 + 1e-12) for a, b in zip(hist, hist[1:]))


def test_random_16_node_hermitian_matches_power_oracle():
    rng = np.random.default_rng(16)
    g = make_grid(8.0, 16)
    V = random_orthonormal(rng, g, 6)
    lam = np.array([2.0, -1.3, 0.9, -0.5, 0.3, 0.1])
    K = synthesize_from_diagonal(lam, V, g)
    E = eig_hermitian(K)
    P = power_eig_hermitian(K, 6)
    np.testing.assert_allclose(E.alphas[:6].real, P.alphas.real, atol=1e-7)


def test_non_hermitian_rejected():
    g = make_grid(1.0, 3)
    with pytest.raises(PreconditionViolation):
        eig_hermitian(KernelMatrix(g, np.triu(np.ones((3, 3)))))


def test_canonical_order_and_phase():
    rng = np.random.default_rng(5)
    g = make_grid(2.0, 6)
    V = random_orthonormal(rng, g, 4)
    alphas = np.array([1j, -1.0, 1.0, 0.5])
    E = eig_normal(synthesize_from_diagonal(alphas, V, g))
    nz = E.nonnull()
    # equal moduli ordered by ascending argument in (-pi, pi]
    np.testing.assert_allclose(nz.alphas, [1.0, 1j, -1.0, 0.5], atol=1e-12)
    lead = E.vectors[np.arange(E.count), np.argmax(np.abs(E.vectors), axis=1)]
    assert np.all(np.abs(lead.imag) <= 1e-15) and np.all(lead.real > 0)


# --- eig_normal -------------------------------------------------------------


def test_normal_of_hermitian_agrees_with_hermitian():
    rng = np.random.default_rng(6)
    K, _ = random_hermitian(rng)
    Eh, En = eig_hermitian(K), eig_normal(K)
    np.testing.assert_allclose(np.sort(En.alphas.real), np.sort(Eh.alphas.real), atol=1e-10)
    assert np.abs(En.alphas.imag).max() <= 1e-10
    for n in np.flatnonzero(~null_mask(Eh.alphas)):
        k = np.argmin(np.abs(En.alphas - Eh.alphas[n]))
        assert abs(abs(inner(En.vector(k), Eh.vector(n))) - 1) <= 1e-8


def test_skew_hermitian_gives_imaginary_spectrum():
    rng = np.random.default_rng(7)
    H, lam = random_hermitian(rng)
    E = eig_normal(KernelMatrix(H.grid, 1j * H.values))
    assert np.abs(E.alphas.real).max() <= 1e-10
    assert hausdorff_distance(E.nonnull().alphas, 1j * lam) <= 1e-10


def test_normal_recovers_laguerre_preset():
    K, truth = synthesize_preset(PRESETS["sector"])
    E = eig_normal(K)
    assert hausdorff_distance(E.nonnull().alphas, truth.alphas) <= 1e-7
    for n, a in enumerate(truth.alphas):
        k = int(np.argmin(np.abs(E.alphas - a)))
        assert abs(abs(inner(E.vector(k), truth.vector(n))) - 1) <= 1e-7


def test_normal_degenerate_real_parts():
    # conjugate pair shares its real part, so Y must split the cluster
    rng = np.random.default_rng(8)
    g = make_grid(4.0, 10)
    V = random_orthonormal(rng, g, 4)
    alphas = np.array([1 + 0.5j, 1 - 0.5j, 1 + 0.2j, 0.3])
    E = eig_normal(synthesize_from_diagonal(alphas, V, g))
    assert hausdorff_distance(E.nonnull().alphas, alphas) <= 1e-10
    assert orthonormality_defect(E) <= 1e-8
    assert E.info["clusters"]


@pytest.mark.parametrize("seed", range(10))
def test_normal_reconstruction(seed):
    rng = np.random.default_rng(seed)
    K, alphas, _ = random_normal(rng)
    E = eig_normal(K)
    assert sup_entry(reconstruct(E).values - K.values) <= 1e-7 * (1 + sup_entry(K))
    assert orthonormality_defect(E) <= 1e-8
    assert hausdorff_distance(E.nonnull().alphas, alphas) <= 1e-7


def test_not_normal_rejected():
    g = make_grid(2.0, 4)
    N = np.zeros((4, 4))
    N[0, 1] = 1.0
    with pytest.raises(NotNormal) as info:
        eig_normal(KernelMatrix(g, N))
    assert info.value.residual > 0


def test_normality_residuals():
    rng = np.random.default_rng(9)
    H, _ = random_hermitian(rng)
    assert check_normality(H) <= 1e-12 * max(1, sup_entry(H))
    K, _, _ = random_normal(rng)
    assert check_normality(K) <= 1e-10 * max(1, sup_entry(K) ** 2)
    # nilpotent perturbation of size 1e-2: compute the commutator by hand
    n = K.n
    Nil = np.diag(np.ones(n - 1), 1) * 1e-2
    P = KernelMatrix(K.grid, K.values + Nil)
    w = K.grid.weights
    M = P.values * w  # operator matrix
    Mh = np.diag(1 / w) @ M.conj().T @ np.diag(w)  # weighted adjoint
    comm = (M @ Mh - Mh @ M) / w[None, :]
    assert check_normality(P) == pytest.approx(np.abs(comm).max(), rel=1e-8)
    G = KernelMatrix(make_grid(1.0, 3, "trapezoid"), np.diag([1.0, 1.0], 1) * 1e-2 + np.eye(3))
    assert check_normality(G) >= 1e-4 * min(G.grid.weights)


def test_zero_kernel_decomposes_to_null_atoms():
    g = make_grid(3.0, 5)
    E = eig_normal(KernelMatrix.zeros(g))
    assert np.all(E.alphas == 0)
    assert E.nonnull().count == 0


# --- reconstruct / synthesize ----------------------------------------------


def test_reconstruct_examples():
    g = make_grid(2.0, 5)
    empty = EigenSystem(g, np.zeros(0), np.zeros((0, 5)))
    assert sup_entry(reconstruct(empty)) == 0.0
    phi = np.ones(5) / np.sqrt(2.0)
    P = reconstruct(EigenSystem(g, [1.0], [phi]))
    np.testing.assert_allclose(P.values, np.full((5, 5), 0.5))


def test_synthesize_examples():
    g = make_grid(4.0, 4, "trapezoid")
    g = type(g)(g.points, np.ones(4), g.cutoff)
    V = np.eye(4)[:2]
    np.testing.assert_allclose(synthesize_from_diagonal([1, 2], V, g).values, np.diag([1, 2, 0, 0]))
    assert sup_entry(synthesize_from_diagonal([0, 0], V, g)) == 0.0
    with pytest.raises(InvalidFamily):
        synthesize_from_diagonal([1, 2], 2 * V, g)
    with pytest.raises(InvalidArgument):
        synthesize_from_diagonal([1, 2, 3], V, g)


def test_eigensystem_round_trip_and_views():
    K, truth = synthesize_preset(PRESETS["small"])
    d = truth.to_dict()
    back = EigenSystem.from_dict(d)
    np.testing.assert_array_equal(back.alphas, truth.alphas)
    np.testing.assert_array_equal(back.vectors, truth.vectors)
    assert truth.truncated(3).count == 3
    assert truth.vector(2).values.shape == (len(truth.grid),)


# --- sector -----------------------------------------------------------------


def test_sector_fit_examples():
    s = sector_fit([1, 2, 3])
    assert s.rotation == pytest.approx(0.0, abs=1e-15) and s.slope == 1e-12
    s = sector_fit([1 + 1j, 1 - 1j])
    assert s.rotation == pytest.approx(0.0, abs=1e-15) and s.slope == pytest.approx(1.0)
    with pytest.raises(SectorTooWide):
        sector_fit([1, -1])
    with pytest.raises(ZeroOperator):
        sector_fit([0, 0])
    with pytest.raises(ZeroOperator):
        sector_fit([1e-3], atol=1e-2)


def test_sector_fit_ignores_null_atoms():
    s = sector_fit([2j, 1j, 1e-20])
    assert s.rotation == pytest.approx(3 * np.pi / 2)
    assert np.all(s.contains([2j, 1j]))


def test_sector_validation():
    with pytest.raises(InvalidArgument):
        Sector(0.0, 0.0)
    assert Sector(0.0, 1.0).half_angle == pytest.approx(np.pi / 4)


@settings(max_examples=300, deadline=None)
@given(
    st.lists(st.tuples(st.floats(1e-3, 1e3), st.floats(-1.5, 1.5)), min_size=1, max_size=12),
    st.floats(0, 2 * np.pi),
)
def test_sector_fit_contains_every_atom(polar, axis):
    z = np.array([r * np.exp(1j * (axis + a * 0.52)) for r, a in polar])
    s = sector_fit(z)
    r = s.rotate(z)
    assert np.all(np.abs(r.imag) <= s.slope * r.real + 1e-12 * np.abs(z).max())
    assert 0 <= s.rotation < 2 * np.pi


@settings(max_examples=200, deadline=None)
@given(st.floats(0, 2 * np.pi), st.lists(st.floats(0.1, 10), min_size=0, max_size=5))
def test_sector_fit_rejects_antipodal(axis, extra):
    z = np.concatenate([[np.exp(1j * axis), -2 * np.exp(1j * axis)], np.array(extra) * np.exp(1j * axis)])
    with pytest.raises(SectorTooWide):
        sector_fit(z)


def test_rotate():
    _, truth = synthesize_preset(PRESETS["small"])
    np.testing.assert_array_equal(rotate(truth, 0.0).alphas, truth.alphas)
    np.testing.assert_allclose(rotate(truth, 2 * np.pi).alphas, truth.alphas, atol=1e-15 * np.abs(truth.alphas).max())
    a, b = 0.3, -1.1
    np.testing.assert_allclose(rotate(rotate(truth, a), b).alphas, rotate(truth, a + b).alphas, rtol=1e-14)
    assert rotate(truth, 1.0).vectors is truth.vectors or np.array_equal(rotate(truth, 1.0).vectors, truth.vectors)


def test_hausdorff():
    assert hausdorff_distance([], []) == 0.0
    assert hausdorff_distance([1, 2], [2, 1]) == 0.0
    assert hausdorff_distance([0], [1, 3j]) == pytest.approx(3.0)
    assert hausdorff_distance([1], []) == np.inf
