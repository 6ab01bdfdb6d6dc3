import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import eval_laguerre

from carleman import (
    Grid,
    GridFn,
    IncompatibleGrids,
    InvalidArgument,
    gauss_legendre,
    inner,
    l2_norm,
    make_grid,
    sup_norm,
)


def test_one_node_gauss_is_midpoint():
    g = make_grid(1.0, 1, "gauss_legendre")
    np.testing.assert_allclose(g.points, [0.5])
    np.testing.assert_allclose(g.weights, [1.0])


def test_two_node_trapezoid():
    g = make_grid(1.0, 2, "trapezoid")
    np.testing.assert_allclose(g.points, [0.0, 1.0])
    np.testing.assert_allclose(g.weights, [0.5, 0.5])


def test_default_grid_weight_sum():
    g = make_grid(40.0, 64)
    assert len(g) == 64
    assert np.all((g.points > 0) & (g.points < 40))
    assert abs(g.weights.sum() - 40.0) <= 1e-10


@pytest.mark.parametrize("count", [1, 2, 5, 16, 33, 64])
def test_gauss_legendre_matches_numpy(count):
    x, w = gauss_legendre(count)
    xr, wr = np.polynomial.legendre.leggauss(count)
    np.testing.assert_allclose(x, xr, atol=1e-14)
    np.testing.assert_allclose(w, wr, atol=1e-14)


@pytest.mark.parametrize("count", [3, 8, 20, 64])
def test_gauss_legendre_polynomial_exactness(count):
    g = make_grid(2.5, count)
    rng = np.random.default_rng(count)
    for degree in range(2 * count):
        c = rng.normal(size=degree + 1)
        exact = np.polynomial.polynomial.polyval(2.5, np.polynomial.polynomial.polyint(c))
        approx = np.sum(g.weights * np.polynomial.polynomial.polyval(g.points, c))
        assert abs(approx - exact) <= 1e-10 * max(1.0, abs(exact), np.abs(c).sum() * 2.5 ** (degree + 1))


@pytest.mark.parametrize("count", [2, 3, 10, 101])
def test_trapezoid_weight_sum(count):
    g = make_grid(7.0, count, "trapezoid")
    assert abs(g.weights.sum() - 7.0) <= 1e-12 * 7.0


@pytest.mark.parametrize(
    "cutoff, count, rule",
    [(0.0, 4, "gauss_legendre"), (-1.0, 4, "trapezoid"), (1.0, 0, "gauss_legendre"), (1.0, 1, "trapezoid"), (1.0, 4, "simpson")],
)
def test_make_grid_rejects(cutoff, count, rule):
    with pytest.raises(InvalidArgument):
        make_grid(cutoff, count, rule)


def test_grid_invariants():
    with pytest.raises(InvalidArgument):
        Grid([0.0, 1.0], [1.0, -1.0], 1.0)
    with pytest.raises(InvalidArgument):
        Grid([1.0, 0.0], [1.0, 1.0], 1.0)
    with pytest.raises(InvalidArgument):
        Grid([0.0, 1.0], [1.0], 1.0)


def test_grid_is_immutable_and_round_trips():
    g = make_grid(3.0, 5)
    with pytest.raises(ValueError):
        g.points[0] = 1.0
    h = Grid.from_dict(g.to_dict())
    assert g.same_as(h)
    assert not g.same_as(make_grid(3.0, 6))


def test_inner_examples():
    g = make_grid(1.0, 2, "trapezoid")
    one = GridFn(g, np.ones(2))
    assert inner(one, one) == pytest.approx(1.0)
    assert inner(one, GridFn(g, 1j * np.ones(2))) == pytest.approx(-1j)
    assert l2_norm(one) == pytest.approx(1.0)
    assert l2_norm(GridFn(g, np.zeros(2))) == 0.0


def test_inner_grid_mismatch():
    f = GridFn(make_grid(1.0, 3), np.ones(3))
    g = GridFn(make_grid(2.0, 3), np.ones(3))
    with pytest.raises(IncompatibleGrids):
        inner(f, g)


def test_laguerre_functions_orthonormal_on_default_grid():
    # oracle: scipy's Laguerre polynomials, independent of the package's recurrence
    g = make_grid(40.0, 64)
    phi = [GridFn(g, eval_laguerre(n, g.points) * np.exp(-g.points / 2)) for n in range(2)]
    assert abs(inner(phi[0], phi[1])) <= 1e-8
    assert abs(l2_norm(phi[0]) - 1.0) <= 1e-8
    assert abs(l2_norm(phi[1]) - 1.0) <= 1e-8


def test_sup_norm_examples():
    g = make_grid(1.0, 4)
    assert sup_norm(GridFn(g, np.zeros(4))) == 0.0
    assert sup_norm(GridFn(g, np.full(4, 3 - 4j))) == pytest.approx(5.0)
    v = np.random.default_rng(0).normal(size=4) + 1j
    assert sup_norm(GridFn(g, v)) == max(abs(z) for z in v)


def test_gridfn_arithmetic_and_from_callable():
    g = make_grid(1.0, 4)
    f = GridFn.from_callable(g, np.sin)
    np.testing.assert_allclose(f.values, np.sin(g.points))
    np.testing.assert_allclose((f + f - f * 2.0).values, 0.0)
    with pytest.raises(InvalidArgument):
        GridFn(g, np.ones(3))


complex_vec = st.lists(
    st.complex_numbers(max_magnitude=1e3, allow_nan=False, allow_infinity=False), min_size=6, max_size=6
)
scalar = st.complex_numbers(max_magnitude=1e2, allow_nan=False, allow_infinity=False)
GRID = make_grid(3.0, 6)


@settings(max_examples=200, deadline=None)
@given(complex_vec, complex_vec, complex_vec, scalar, scalar)
def test_inner_sesquilinear(f, g, h, a, b):
    f, g, h = (GridFn(GRID, np.array(v)) for v in (f, g, h))
    lhs = inner(f * a + g * b, h)
    rhs = a * inner(f, h) + b * inner(g, h)
    scale = (abs(a) + abs(b) + 1) * (l2_norm(f) + l2_norm(g) + 1) * (l2_norm(h) + 1)
    assert abs(lhs - rhs) <= 1e-12 * scale
    assert abs(inner(h, f * a) - np.conj(a) * inner(h, f)) <= 1e-12 * scale
    assert abs(inner(f, g) - np.conj(inner(g, f))) <= 1e-12 * scale


@settings(max_examples=200, deadline=None)
@given(complex_vec, complex_vec)
def test_cauchy_schwarz_and_positivity(f, g):
    f, g = GridFn(GRID, np.array(f)), GridFn(GRID, np.array(g))
    assert abs(inner(f, g)) <= l2_norm(f) * l2_norm(g) * (1 + 1e-12) + 1e-12
    assert inner(f, f).real >= 0
    assert (l2_norm(f) == 0) == bool(np.all(f.values == 0))
