"""
Curvature, physical reconstruction, moments and the Biot-Savart oracle
"""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from vpair.utils.spectral import FourierMap, make_grid, evaluate_at
from vpair.utils.exceptions import DegenerateMapError
from vpair.vstates.pairproblem import PairConfig, StateVector, base_state
from vpair.vstates.solver import VState, newton_solve
from vpair.vstates.diagnostics import curvature, min_curvature, convexity_bound,\
        reconstruct_patches, patch_moments, velocity_at, point_vortex_velocity,\
        equilibrium_residual, set_threads

def co_config(**kwargs):
    attrs = dict(mode='co', gamma1=1., gamma2=2., b1=1., b2=1., d=5., N=16, M=128)
    attrs.update(kwargs)
    return PairConfig(**attrs)


def counter_config(**kwargs):
    attrs = dict(mode='counter', gamma1=1., b1=1., b2=1.5, d=5., N=16, M=128)
    attrs.update(kwargs)
    return PairConfig(**attrs)


def circles(cfg, eps):
    return VState(eps, base_state(cfg), 0.)


def random_state(cfg, scale, seed):
    rng = np.random.RandomState(seed)
    n = np.arange(1, cfg.N + 1)
    g0 = base_state(cfg)
    return StateVector(g0.s1, g0.s2, scale*rng.randn(cfg.N)/n**2, scale*rng.randn(cfg.N)/n**2)


@pytest.fixture(scope='module')
def co_state():
    cfg = co_config()
    return newton_solve(cfg, 0.1, base_state(cfg))


def test_curvature_examples():
    f = FourierMap([1.])
    assert_allclose(curvature(0.1, 1., FourierMap.zeros(3), np.exp(1j*np.arange(5))), 1.)
    assert_allclose(curvature(0.1, 1., f, 1.), 1.1/0.9**2, rtol=1e-13)
    assert_allclose(curvature(0.1, 1., f, 1j), 0.9/1.1**2, rtol=1e-13)


def test_curvature_degenerate():
    with pytest.raises(DegenerateMapError):
        curvature(1., 1., FourierMap([1.]), 1.)


def test_convexity_bound():
    f = FourierMap([1.])
    assert_allclose(convexity_bound(0.1, 1., f), 1 - 0.2/0.9)
    w = make_grid(256).nodes
    dphi = 1 + 0.1*evaluate_at(f, w, 1)
    re = np.real(1 + w*0.1*evaluate_at(f, w, 2)/dphi)
    assert np.min(re) >= convexity_bound(0.1, 1., f)


def test_min_curvature_circles():
    cfg = co_config()
    assert_allclose(min_curvature(circles(cfg, 0.), cfg), 1.)


def test_min_curvature_converged(co_state):
    cfg = co_config()
    kmin = min_curvature(co_state, cfg)
    assert kmin > 0
    assert abs(kmin - 1) <= 3*co_state.eps


@pytest.mark.parametrize('make', [co_config, counter_config])
def test_reconstruct_circles(make):
    cfg = make(b2=1.)
    pair = reconstruct_patches(circles(cfg, 0.1), cfg, 128)
    assert pair.boundary1.shape == (128,)
    assert_allclose(np.abs(pair.boundary1), 0.1, rtol=1e-14)
    assert_allclose(np.abs(pair.boundary2 - 5.), 0.1, rtol=1e-13)
    assert_allclose(pair.min_distance(), 4.8, rtol=1e-12)


def test_reconstruct_amplitudes():
    cfg = counter_config()
    v = circles(cfg, 0.1)
    pair = reconstruct_patches(v, cfg)
    assert_allclose(pair.amplitudes, (1./0.01, -1./(0.15**2)))


def test_reconstruct_disjoint(co_state):
    cfg = co_config()
    pair = reconstruct_patches(co_state, cfg)
    fnorm = max(co_state.state.f1.sup_bound(), co_state.state.f2.sup_bound())
    eps = co_state.eps
    assert pair.min_distance() >= cfg.d - 2*eps*(cfg.b1 + cfg.b2)*(1 + fnorm)


def test_moments_disc():
    cfg = co_config()
    area1, area2, circ1, circ2 = patch_moments(circles(cfg, 0.1), cfg)
    assert_allclose([area1, area2], [0.01*np.pi, 0.01*np.pi])
    assert_allclose([circ1, circ2], [np.pi, 2*np.pi])


def test_moments_single_mode():
    cfg = co_config(N=1, M=8)
    v = VState(0.2, StateVector(0., 0., [0.5], [0.]), 0.)
    for quad in (False, True):
        area1 = patch_moments(v, cfg, quadrature=quad)[0]
        assert_allclose(area1, 0.99*np.pi*0.04, rtol=1e-13)


@pytest.mark.parametrize('make', [co_config, counter_config])
def test_moments_closed_form_vs_quadrature(make):
    cfg = make()
    for seed in range(5):
        v = VState(0.2, random_state(cfg, 0.05, seed), 0.)
        closed = np.array(patch_moments(v, cfg))
        quad = np.array(patch_moments(v, cfg, quadrature=True))
        assert np.max(np.abs(closed - quad)) <= 1e-12


def test_counter_circulation_sign():
    cfg = counter_config()
    circ = patch_moments(circles(cfg, 0.1), cfg)[2:]
    assert_allclose(circ, (np.pi, -np.pi))


def test_velocity_of_discs():
    """
    Outside a disc the velocity is that of a point vortex
    """
    cfg = co_config()
    v = circles(cfg, 0.05)
    z = np.array([2., 2. + 1j, -1j, 7. - 0.5j])
    assert_allclose(velocity_at(cfg, v, z), point_vortex_velocity(cfg, z), atol=1e-10)


def test_point_vortex_velocity_single():
    cfg = co_config(gamma2=0.)
    assert_allclose(point_vortex_velocity(cfg, 2.), 0.25j, atol=1e-15)


def test_velocity_far_field():
    cfg = co_config()
    v = circles(cfg, 0.1)
    Z0 = base_state(cfg).s2
    z = Z0 + 1j*1e3*cfg.d
    Gamma = patch_moments(v, cfg)[2:]
    assert_allclose(abs((z - Z0)*velocity_at(cfg, v, z)), sum(Gamma)/(2*np.pi), rtol=1e-6)


@pytest.mark.parametrize('make', [co_config, counter_config])
def test_oracle_point_vortices(make):
    cfg = make()
    assert equilibrium_residual(circles(cfg, 0.), cfg) <= 1e-6


def test_oracle_converged(co_state):
    cfg = co_config()
    res = equilibrium_residual(co_state, cfg)
    assert res <= 1e-6

    unconverged = equilibrium_residual(circles(cfg, 0.2), cfg)
    assert unconverged >= 10*max(res, 1e-9)


def test_oracle_detects_perturbation(co_state):
    cfg = co_config()
    x = co_state.state.as_array()
    x[2] += 1e-3
    bad = VState(co_state.eps, StateVector.from_array(x), 0.)
    assert equilibrium_residual(bad, cfg) > 1e-4


def test_set_threads():
    assert set_threads(1) == 1
