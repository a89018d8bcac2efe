# -*- coding: utf-8 -*-
"""
Geometric and physical checks of V-state pairs

Curvature and convexity, reconstruction of the physical boundaries, patch
moments and an independent Biot-Savart oracle for the relative equilibrium.
The oracle integrates the Green-Stokes velocity over the physical boundaries
and only shares the spectral primitives with the functional.
"""

import os
import logging

import numpy as np
import numba
from numba import jit, prange
from scipy import spatial

from vpair.utils.spectral import make_grid, evaluate, evaluate_at, contour_mean
from vpair.utils.exceptions import ConfigError, DegenerateMapError, GeometryOverlapError
from .pairproblem import pairmeta, base_state

logger = logging.getLogger(__name__)

def set_threads(nthreads=None):
    """
    Cap the numba thread pool, 0 or None leaves it automatic.
    Read from VPAIR_THREADS when nthreads is not given.
    """
    if nthreads is None:
        nthreads = int(os.environ.get('VPAIR_THREADS', 0) or 0)
    if nthreads > 0:
        numba.set_num_threads(min(nthreads, numba.config.NUMBA_NUM_THREADS))
    return numba.get_num_threads()

set_threads()

###
# Curvature
###
def curvature(eps, b, f, w):
    """
    kappa = Re(1 + w phi''/phi')/|phi'| for phi = w + eps b f(w)
    """
    w = np.asarray(w, dtype=np.complex128)
    dphi = 1 + eps*b*evaluate_at(f, w, 1)
    ddphi = eps*b*evaluate_at(f, w, 2)

    if np.any(np.abs(dphi) < np.finfo(float).eps):
        raise DegenerateMapError("phi' vanishes at eps = %g"%eps)

    return np.real(1 + w*ddphi/dphi)/np.abs(dphi)


def min_curvature(v, cfg, M_scan=pairmeta['M_scan']['default']):
    """
    Minimum curvature over an M_scan grid on both patches
    """
    grid = make_grid(M_scan)
    kmin = [np.min(curvature(v.eps, cfg.b(j), v.state.f(j), grid.nodes)) for j in (1, 2)]
    return float(min(kmin))


def convexity_bound(eps, b, f):
    """
    Lower bound 1 - |eps| b sup|f''|/(1 - |eps| b sup|f'|) of Re(1 + w phi''/phi')
    """
    r1 = abs(eps)*b*f.derivative_bound()
    r2 = abs(eps)*b*f.second_derivative_bound()
    if r1 >= 1:
        return -np.inf
    return 1 - r2/(1 - r1)


def naive_self_interaction(eps, b, f, colloc, quad):
    """
    I(w) = 1/(eps b) contour mean of
        (conj(phi(tau)) - conj(phi(w)))/(phi(tau) - phi(w)) phi'(tau)

    before desingularization
    """
    if eps == 0:
        raise ConfigError('eps', 'the self-induced term is singular at eps = 0')

    w = colloc.nodes[:,np.newaxis]
    tau = quad.nodes[np.newaxis,:]
    phiw = w + eps*b*evaluate(f, colloc, 0)[:,np.newaxis]
    phit = tau + eps*b*evaluate(f, quad, 0)[np.newaxis,:]
    dphit = 1 + eps*b*evaluate(f, quad, 1)[np.newaxis,:]

    integrand = (phit.conj() - phiw.conj())/(phit - phiw)*dphit
    return contour_mean(integrand, quad)/(eps*b)

###
# Physical plane
###
class PhysicalPatchPair(object):
    """
    Boundaries of the two patches in the physical plane

    boundary1 = eps b1 phi1(w), boundary2 = -eps b2 phi2(w) + d, with
    vorticity amplitudes gamma_j/(eps b_j)^2 (second one negated for
    counter-rotating pairs).
    """
    def __init__(self, eps, theta, boundary1, boundary2, centers, amplitudes, mode):
        self.eps = eps
        self.theta = theta
        self.boundary1 = boundary1
        self.boundary2 = boundary2
        self.centers = centers
        self.amplitudes = amplitudes
        self.mode = mode

    def __repr__(self):
        return 'PhysicalPatchPair(eps=%g, M=%d, mode=%s)'%(self.eps, self.theta.shape[0], self.mode)

    def boundary(self, j):
        return self.boundary1 if j == 1 else self.boundary2

    def min_distance(self):
        P1 = np.column_stack([self.boundary1.real, self.boundary1.imag])
        P2 = np.column_stack([self.boundary2.real, self.boundary2.imag])
        kd = spatial.cKDTree(P1)
        dist, ind = kd.query(P2, k=1)
        return float(dist.min())


def _signs(cfg):
    # boundary orientation, centre and vorticity sign per patch
    return {1:(1., 0.), 2:(-1., cfg.d)}


def _amplitude_gammas(cfg, state):
    if cfg.corotating:
        return cfg.gamma1, cfg.gamma2
    else:
        return cfg.gamma1, -state.s2


def _patch_frame(cfg, eps, state, j, w, scale):
    """
    Boundary points xi and weights dxi = (d xi/d tau) tau of patch j at the
    unit-circle points w, so that the contour mean is (1/M) sum h(xi) dxi
    """
    sgn, c = _signs(cfg)[j]
    bj = cfg.b(j)
    f = state.f(j)
    phi = w + eps*bj*evaluate_at(f, w, 0)
    dphi = 1 + eps*bj*evaluate_at(f, w, 1)
    return c + sgn*scale*phi, sgn*scale*w*dphi


def _winding(dxi):
    # tangent i w phi'
    t = 1j*dxi
    dang = np.angle(np.roll(t, -1)/t)
    return np.sum(dang)/(2*np.pi)


def reconstruct_patches(v, cfg, M_out=pairmeta['M_out']['default']):
    """
    Physical boundaries of both patches on an M_out grid
    """
    grid = make_grid(M_out)
    w = grid.nodes
    eps, g = v.eps, v.state
    gam = _amplitude_gammas(cfg, g)

    bounds = []
    amps = []
    for j in (1, 2):
        scale = eps*cfg.b(j)
        xi, dxi = _patch_frame(cfg, eps, g, j, w, scale)
        if eps != 0:
            wind = _winding(dxi)
            if abs(wind - 1) > 1e-6:
                raise GeometryOverlapError('boundary %d is not a simple closed curve (winding %g)'%(j, wind))
            amps.append(gam[j-1]/scale**2)
        else:
            amps.append(np.copysign(np.inf, gam[j-1]))
        bounds.append(xi)

    pair = PhysicalPatchPair(eps, grid.theta.copy(), bounds[0], bounds[1], (0., cfg.d), tuple(amps), cfg.mode)

    dmin = pair.min_distance()
    if not dmin > 0:
        raise GeometryOverlapError('patches overlap at eps = %g (min distance %g)'%(eps, dmin))
    logger.debug('eps = %g: min boundary distance %g'%(eps, dmin))

    return pair


def patch_moments(v, cfg, quadrature=False):
    """
    (area1, area2, Gamma1, Gamma2) of the physical patches

    Closed form area_j = pi (eps b_j)^2 (1 - sum n (eps b_j a_n)^2), or with
    quadrature=True, Green's theorem (1/2) int Im{conj(z) dz} on the
    boundary grid. Gamma_j = pi gamma_j (area_j/(eps b_j)^2), negated for
    the second patch of a counter-rotating pair.
    """
    eps, g = v.eps, v.state
    gam = _amplitude_gammas(cfg, g)

    out_area = []
    out_circ = []
    for j in (1, 2):
        bj = cfg.b(j)
        f = g.f(j)
        if quadrature:
            grid = make_grid(max(4*f.N + 8, 64))
            w = grid.nodes
            phi = w + eps*bj*evaluate(f, grid, 0)
            dphi = 1 + eps*bj*evaluate(f, grid, 1)
            unit = np.pi*np.mean(np.real(phi.conj()*w*dphi))
        else:
            unit = np.pi*(1 - np.sum(f.n*(eps*bj*f.coeffs)**2))

        out_area.append((eps*bj)**2*unit)
        out_circ.append(gam[j-1]*unit)

    return out_area[0], out_area[1], out_circ[0], out_circ[1]

###
# Biot-Savart oracle
###
@jit(nopython=True, parallel=True)
def _boundary_sums(xi, dxi, z):
    """
    (1/M) sum_k (conj(xi_k) - conj(z_p))/(xi_k - z_p) dxi_k for every z_p
    """
    nz = z.shape[0]
    M = xi.shape[0]
    out = np.zeros(nz, dtype=np.complex128)
    for p in prange(nz):
        zp = z[p]
        acc = 0j
        for k in range(M):
            acc += (xi[k].conjugate() - zp.conjugate())/(xi[k] - zp)*dxi[k]
        out[p] = acc/M
    return out


def point_vortex_velocity(cfg, z, state=None):
    """
    Velocity of point vortices of circulation pi gamma1 at 0 and
    pi gamma2 (co) or -pi gamma2 (counter) at d
    """
    if state is None:
        state = base_state(cfg)
    z = np.asarray(z, dtype=np.complex128)
    g1, g2 = _amplitude_gammas(cfg, state)

    vbar = -1j*g1/(2*z) - 1j*g2/(2*(z - cfg.d))
    return vbar.conj()


def _sources(cfg, eps, state, M, scales):
    grid = make_grid(M)
    gam = _amplitude_gammas(cfg, state)
    out = []
    for j in (1, 2):
        xi, dxi = _patch_frame(cfg, eps, state, j, grid.nodes, scales[j-1])
        out.append((xi, dxi, gam[j-1]/scales[j-1]**2))
    return out


def _velocity(sources, z):
    z = np.atleast_1d(np.asarray(z, dtype=np.complex128))
    vbar = np.zeros(z.shape, dtype=np.complex128)
    for xi, dxi, omega in sources:
        vbar += 0.5j*omega*_boundary_sums(xi, dxi, z.ravel()).reshape(z.shape)
    return vbar.conj()


def velocity_at(cfg, v, z, M_fine=pairmeta['M_fine']['default']):
    """
    Velocity (not conjugated) at z by trapezoidal quadrature of

        conj(v(z)) = sum_j (i omega_j/2) contour mean over the boundary j of
                     (conj(xi) - conj(z))/(xi - z) dxi

    At eps = 0 the patches are point vortices.
    """
    scalar = np.ndim(z) == 0
    if v.eps == 0:
        out = np.atleast_1d(point_vortex_velocity(cfg, z, v.state))
    else:
        scales = (v.eps*cfg.b1, v.eps*cfg.b2)
        out = _velocity(_sources(cfg, v.eps, v.state, M_fine, scales), z)
    return out[0] if scalar else out


def equilibrium_residual(v, cfg, M_fine=pairmeta['M_fine']['default'],\
        probes=pairmeta['probes']['default'], point_radius=1e-7):
    """
    Normal relative velocity on both boundaries

        max |Re{W conj(n)}| / (max(|gamma1|, |gamma2|)/d)

    with W = v - i Omega (z - Z) (co) or W = v - i U (counter) and n the
    outward normal. Probes sit halfway between quadrature nodes. At eps = 0
    the point vortices are replaced by circles of radius point_radius*d.
    """
    eps, g = v.eps, v.state
    if eps == 0:
        scales = (point_radius*cfg.d, point_radius*cfg.d)
    else:
        scales = (eps*cfg.b1, eps*cfg.b2)

    sources = _sources(cfg, eps, g, M_fine, scales)

    theta = 2*np.pi*(np.arange(probes) + probes/(2.*M_fine))/probes
    wp = np.exp(1j*theta)

    gam = _amplitude_gammas(cfg, g)
    vscale = max(abs(gam[0]), abs(gam[1]))/cfg.d

    res = 0.
    for j in (1, 2):
        z, dz = _patch_frame(cfg, eps, g, j, wp, scales[j-1])
        normal = dz/np.abs(dz)
        vel = _velocity(sources, z)
        if cfg.corotating:
            W = vel - 1j*g.s1*(z - g.s2)
        else:
            W = vel - 1j*g.s1
        res = max(res, np.max(np.abs(np.real(W*normal.conj()))))

    res /= vscale
    logger.info('eps = %g: equilibrium residual %.3e'%(eps, res))
    return float(res)
