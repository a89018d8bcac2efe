"""
Grids, conjugate-Fourier maps, sine projection and contour means
"""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from vpair.utils.spectral import make_grid, FourierMap, SineSeries, evaluate, evaluate_at,\
        project_sine, contour_mean
from vpair.utils.exceptions import ConfigError, AliasingError

def test_grid_nodes():
    assert_allclose(make_grid(4).nodes, [1, 1j, -1, -1j], atol=1e-15)
    offset = np.exp(1j*np.pi*np.array([1, 3, 5, 7])/4)
    assert_allclose(make_grid(4, 0.5).nodes, offset, atol=1e-15)


def test_grid_too_small():
    with pytest.raises(ConfigError):
        make_grid(3)


def test_staggered_grid():
    grid = make_grid(16)
    stag = grid.staggered()
    assert stag.sigma == 0.5
    assert stag.staggered().sigma == 0.
    assert np.min(np.abs(grid.nodes[:,np.newaxis] - stag.nodes[np.newaxis,:])) > 0.1


def test_power_table_fixed_at_construction():
    grid = make_grid(16, 0.5, nmax=9)
    assert grid.staggered().nmax == 9

    P = grid.conj_powers(9)
    assert P.shape == (16, 10)
    assert not P.flags.writeable
    assert_allclose(P[:,3], grid.nodes.conj()**3, atol=1e-14)
    with pytest.raises(ValueError):
        P[0, 0] = 2.

    # past the table: same values, table unchanged
    Q = grid.conj_powers(12)
    assert Q.shape == (16, 13)
    assert_allclose(Q[:,:10], P, atol=1e-15)
    assert grid.conj_powers(9).shape == (16, 10)
    assert grid._powers.shape == (16, 10)

    with pytest.raises(ConfigError):
        make_grid(16, nmax=-1)


def test_evaluate_single_mode():
    f = FourierMap([0.5])
    assert_allclose(evaluate_at(f, 1j, 0), -0.5j, atol=1e-15)
    assert_allclose(evaluate_at(f, 1., 1), -0.5, atol=1e-15)
    assert_allclose(evaluate_at(f, 1., 2), 1.0, atol=1e-15)


def test_evaluate_grid_matches_points():
    rng = np.random.RandomState(1)
    f = FourierMap(rng.randn(6)/np.arange(1, 7)**2)
    grid = make_grid(32, 0.5)
    for order in (0, 1, 2):
        assert_allclose(evaluate(f, grid, order), evaluate_at(f, grid.nodes, order), atol=1e-13)


def test_derivatives_by_differences():
    """
    df/dtheta = i w f'(w) along the circle
    """
    rng = np.random.RandomState(2)
    f = FourierMap(rng.randn(5)/np.arange(1, 6)**2)
    w = np.exp(1j*np.linspace(0.1, 6., 13))
    h = 1e-5
    wp, wm = w*np.exp(1j*h), w*np.exp(-1j*h)

    d1 = (evaluate_at(f, wp) - evaluate_at(f, wm))/(2*h*1j*w)
    assert_allclose(d1, evaluate_at(f, w, 1), atol=1e-8)

    d2 = (evaluate_at(f, wp, 1) - evaluate_at(f, wm, 1))/(2*h*1j*w)
    assert_allclose(d2, evaluate_at(f, w, 2), atol=1e-8)


def test_bad_order():
    with pytest.raises(ConfigError):
        evaluate(FourierMap([1.]), make_grid(8), 3)


def test_project_sine():
    grid = make_grid(16)
    C = project_sine(3*np.sin(2*grid.theta), 7, grid)
    assert_allclose(C.coeffs, [0, 3, 0, 0, 0, 0, 0], atol=1e-14)

    C = project_sine(np.sin(grid.theta) + 0.25*np.sin(3*grid.theta), 4)
    assert_allclose(C.coeffs, [1, 0, 0.25, 0], atol=1e-14)

    assert_allclose(project_sine(np.zeros(16), 7).coeffs, 0.)


def test_project_sine_values_inverse():
    rng = np.random.RandomState(3)
    S = SineSeries(rng.randn(10))
    grid = make_grid(64)
    assert_allclose(project_sine(S.values(grid), 10, grid).coeffs, S.coeffs, atol=1e-13)


def test_project_sine_aliasing():
    with pytest.raises(AliasingError):
        project_sine(np.zeros(16), 8)


def test_project_sine_needs_sigma0_grid():
    with pytest.raises(ConfigError):
        project_sine(np.zeros(16), 4, make_grid(16, 0.5))


def test_contour_mean_residues():
    grid = make_grid(64, 0.5)
    tau = grid.nodes
    assert_allclose(contour_mean(tau.conj(), grid), 1., atol=1e-14)
    assert_allclose(contour_mean(np.ones(64), grid), 0., atol=1e-14)
    assert_allclose(contour_mean(tau.conj()/(0.1*(tau + 1) - 2), grid), 1/(0.1 - 2), atol=1e-14)


def test_contour_mean_cross_kernel_identity():
    """
    mean of conj(tau)/(eps(b' tau + b w) - d) is 1/(eps b w - d)
    """
    rng = np.random.RandomState(4)
    grid = make_grid(256, 0.5)
    tau = grid.nodes
    b, bo, d = 1., 1.5, 5.
    for eps, th in zip(0.3*rng.rand(20), 2*np.pi*rng.rand(20)):
        w = np.exp(1j*th)
        val = contour_mean(tau.conj()/(eps*(bo*tau + b*w) - d), grid)
        assert abs(val - 1/(eps*b*w - d)) <= 1e-12


def test_contour_mean_along_last_axis():
    grid = make_grid(32)
    vals = np.vstack([grid.nodes.conj(), 2*grid.nodes.conj()])
    assert_allclose(contour_mean(vals, grid), [1., 2.], atol=1e-14)


def test_fourier_map_bounds():
    f = FourierMap([1., -2., 0.5])
    assert f.N == 3
    assert_allclose(f.derivative_bound(), 1 + 4 + 1.5)
    assert_allclose(f.second_derivative_bound(), 2 + 12 + 6)
    assert_allclose(f.sup_bound(), 3.5)
    assert f.max_abs() == 2.


def test_reflected_map():
    f = FourierMap([1., 2., 3., -4.])
    assert_allclose(f.reflected().coeffs, [-1., 2., -3., -4.], atol=1e-14)
    w = np.exp(1j*np.linspace(0, 6, 7))
    assert_allclose(f.reflected()(w), f(-w), atol=1e-13)


def test_coeffs_read_only():
    f = FourierMap([1., 2.])
    with pytest.raises(ValueError):
        f.coeffs[0] = 3.
