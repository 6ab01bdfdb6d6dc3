import numpy as np
import pytest
from scipy.special import eval_laguerre

from carleman import (
    GridTooCoarse,
    InvalidArgument,
    Preset,
    check_k0,
    check_normality,
    get_preset,
    make_grid,
    orthonormality_defect,
    sup_entry,
)
from carleman.presets import PRESETS, laguerre_functions, orthonormalize, preset_alphas, synthesize_preset


@pytest.mark.parametrize("scale", [1.0, 2.5, 4.0])
def test_laguerre_recurrence_matches_scipy(scale):
    s = np.linspace(0, 40, 201)
    got = laguerre_functions(s, 20, scale)
    for n in range(20):
        want = np.sqrt(scale) * eval_laguerre(n, scale * s) * np.exp(-scale * s / 2)
        np.testing.assert_allclose(got[n], want, atol=1e-10)


def test_laguerre_zero_count():
    assert laguerre_functions(np.ones(3), 0).shape == (0, 3)


def test_unscaled_family_does_not_resolve_on_default_grid():
    g = make_grid(40.0, 64)
    assert orthonormality_defect(laguerre_functions(g.points, 16, 1.0), g) > 1e-6
    assert orthonormality_defect(laguerre_functions(g.points, 16, 4.0), g) <= 1e-6


def test_orthonormalize_is_close_and_exact():
    g = make_grid(40.0, 64)
    F = laguerre_functions(g.points, 16, 4.0)
    Q = orthonormalize(F, g)
    assert orthonormality_defect(Q, g) <= 1e-13
    assert np.abs(Q - F).max() <= 1e-7
    with pytest.raises(GridTooCoarse):
        orthonormalize(np.ones((2, 4)), make_grid(1.0, 4))


@pytest.mark.parametrize("name", sorted(PRESETS))
def test_presets_synthesize(name):
    K, truth = synthesize_preset(PRESETS[name])
    assert truth.info["raw_defect"] <= 1e-6
    assert orthonormality_defect(truth) <= 1e-12
    assert check_normality(K) <= 1e-10 * max(1.0, sup_entry(K)) ** 2
    assert check_k0(K).tail_sup <= 1e-6
    alphas = truth.alphas
    rot = np.exp(-1j * PRESETS[name].center)
    assert np.abs(np.angle(rot * alphas)).max() <= PRESETS[name].theta_max + 1e-12


def test_classical_and_rank_one_shapes():
    K, truth = synthesize_preset(get_preset("classical"))
    assert np.all(truth.alphas.imag == 0) and np.all(truth.alphas.real > 0)
    assert check_k0(K).hermitian_defect <= 1e-12
    K, truth = synthesize_preset(get_preset("rank1"))
    assert truth.count == 1 and np.linalg.matrix_rank(K.values, tol=1e-10) == 1


def test_laws_and_angles():
    p = Preset(count=4, law="linear_growth", base=2.0, theta_max=0.3, angles="alternate")
    np.testing.assert_allclose(preset_alphas(p), 2 * np.arange(1, 5) * np.exp(1j * np.array([0.3, -0.3, 0.3, -0.3])))
    p = p.with_(law="inverse_square", theta_max=0.0)
    np.testing.assert_allclose(preset_alphas(p), 2 / np.arange(1, 5) ** 2)
    a = preset_alphas(Preset(count=50, theta_max=0.4, seed=3))
    assert np.abs(np.angle(a)).max() <= 0.4
    np.testing.assert_array_equal(a, preset_alphas(Preset(count=50, theta_max=0.4, seed=3)))


def test_grid_too_coarse_reports_defect():
    with pytest.raises(GridTooCoarse) as info:
        synthesize_preset(Preset(count=16, nodes=24))
    assert info.value.defect > 1e-6


@pytest.mark.parametrize(
    "changes",
    [
        {"count": 0},
        {"law": "cubic"},
        {"angles": "spiral"},
        {"theta_max": np.pi / 2},
        {"base": 0.0},
        {"scale": -1.0},
        {"family": "hermite"},
    ],
)
def test_preset_validation(changes):
    with pytest.raises(InvalidArgument):
        Preset(**changes)


def test_unknown_preset():
    with pytest.raises(InvalidArgument):
        get_preset("nope")
