# -*- coding: utf-8 -*-
"""
Desingularized V-state functional F(eps, g)

Residuals are sampled at collocation points w on a sigma=0 grid and
projected onto Im{w^n}, n = 1..N+1 per patch. Contour integrals are taken on
the staggered sigma=1/2 grid of the same size so that tau != w everywhere;
the integrands have a removable singularity at tau = w.

The cross kernel carries b_(3-j) on f'_(3-j) in both modes. The translating
system as usually written drops that factor, which the change
of variables z -> eps b z restores.
"""

import logging

import numpy as np

from vpair.utils.spectral import make_grid, evaluate, project_sine, contour_mean,\
        SineSeries
from vpair.utils.exceptions import StateOutOfBallError, GeometryOverlapError,\
        AliasingError
from .pairproblem import StateVector

logger = logging.getLogger(__name__)

# sum n|a_n| |eps| b_j must stay below this
BALL = 0.45

class PairGrids(object):
    """
    Collocation (sigma=0) and quadrature (sigma=1/2) grids of equal size

    Both tabulate conj(w)^n up to the highest resolved mode plus two.
    """
    def __init__(self, M, colloc_sigma=0.):
        self.M = int(M)
        self.colloc = make_grid(self.M, colloc_sigma, nmax=(self.M - 1)//2 + 2)
        self.quad = self.colloc.staggered()


def make_pair_grids(M):
    return PairGrids(M)


def self_interaction(eps, b, f, colloc, quad):
    """
    S(w) = contour mean of (A conj(B) - conj(A) B)/(A (A + eps b B)) [f'(tau) - B/A]

    with A = tau - w and B = f(tau) - f(w)
    """
    if abs(eps)*b*f.derivative_bound() >= 0.5:
        raise StateOutOfBallError('|eps| b sum n|a_n| = %g >= 1/2'%(abs(eps)*b*f.derivative_bound()))

    w = colloc.nodes[:,np.newaxis]
    tau = quad.nodes[np.newaxis,:]
    fw = evaluate(f, colloc, 0)[:,np.newaxis]
    ft = evaluate(f, quad, 0)[np.newaxis,:]
    fpt = evaluate(f, quad, 1)[np.newaxis,:]

    A = tau - w
    B = ft - fw
    integrand = (A*B.conj() - A.conj()*B)/(A*(A + eps*b*B))*(fpt - B/A)

    return contour_mean(integrand, quad)


def cross_interaction(eps, cfg, j, f_j, f_other, colloc, quad):
    """
    K(w) = contour mean of
        (conj(tau) + eps b' conj(f'(tau))) (1 + eps b' f'_'(tau))
        / (eps (b' tau + b_j w) + eps^2 (b'^2 f_'(tau) + b_j^2 f_j(w)) - d)

    where ' marks the other patch
    """
    bj = cfg.b(j)
    bo = cfg.b(3-j)
    d = cfg.d
    fnorm = max(f_j.sup_bound(), f_other.sup_bound())
    if abs(eps)*(cfg.b1 + cfg.b2)*(1 + fnorm) >= d/2.:
        raise GeometryOverlapError('cross kernel margin violated: |eps|(b1+b2)(1+|f|) = %g >= d/2'\
            %(abs(eps)*(cfg.b1 + cfg.b2)*(1 + fnorm)))

    w = colloc.nodes[:,np.newaxis]
    tau = quad.nodes[np.newaxis,:]
    fjw = evaluate(f_j, colloc, 0)[:,np.newaxis]
    fot = evaluate(f_other, quad, 0)[np.newaxis,:]
    fpot = evaluate(f_other, quad, 1)[np.newaxis,:]

    num = (tau.conj() + eps*bo*fot.conj())*(1 + eps*bo*fpot)
    den = eps*(bo*tau + bj*w) + eps**2*(bo**2*fot + bj**2*fjw) - d

    return contour_mean(num/den, quad)


def check_ball(eps, g, cfg):
    for j in (1, 2):
        r = g.f(j).derivative_bound()*abs(eps)*cfg.b(j)
        if r > BALL:
            raise StateOutOfBallError('patch %d: sum n|a_n| |eps| b = %g > %g'%(j, r, BALL))


def _gammas(g, cfg):
    if cfg.corotating:
        return cfg.gamma1, cfg.gamma2
    else:
        return cfg.gamma1, g.s2


def residual_samples(eps, g, cfg, grids):
    """
    Real residual F_j(eps, g)(w_k) at the collocation points, j = 1, 2
    """
    check_ball(eps, g, cfg)
    colloc, quad = grids.colloc, grids.quad
    w = colloc.nodes
    gam = _gammas(g, cfg)

    out = []
    for j in (1, 2):
        fj, fo = g.f(j), g.f(3-j)
        bj = cfg.b(j)
        gj, go = gam[j-1], gam[2-j]

        fjw = evaluate(fj, colloc, 0)
        fpjw = evaluate(fj, colloc, 1)
        dphi = w*(1 + eps*bj*fpjw)

        val = -gj*fpjw
        if eps != 0:
            S = self_interaction(eps, bj, fj, colloc, quad)
            val = val + eps*bj*gj*dphi*S

        K = cross_interaction(eps, cfg, j, fj, fo, colloc, quad)

        if cfg.corotating:
            Omega, Z = g.s1, g.s2
            val = val + 2*Omega*(eps*bj*(w.conj() + eps*bj*fjw.conj()) + (-1)**j*Z - (j-1)*cfg.d)*dphi\
                - go*dphi*K
        else:
            U = g.s1
            val = val + 2*U*dphi + go*dphi*K

        out.append(val.imag)

    return out[0], out[1]


def residual(eps, g, cfg, grids=None):
    """
    F(eps, g) projected onto e_1..e_{N+1} for each patch
    """
    if grids is None:
        grids = make_pair_grids(cfg.M)

    F1, F2 = residual_samples(eps, g, cfg, grids)
    K = g.N + 1
    return project_sine(F1, K, grids.colloc), project_sine(F2, K, grids.colloc)


def residual_vector(eps, g, cfg, grids=None):
    """
    Residual in the solver ordering (patch 1 modes, patch 2 modes)
    """
    k1, k2 = residual(eps, g, cfg, grids)
    return np.concatenate([k1.coeffs, k2.coeffs])


def truncation_indicator(eps, g, cfg):
    """
    Sup of the residual modes above N+1, measured on a grid of size 2M
    """
    grids = make_pair_grids(2*cfg.M)
    F1, F2 = residual_samples(eps, g, cfg, grids)
    Kmax = (grids.M - 1)//2
    if Kmax <= g.N + 1:
        raise AliasingError('grid of size %d resolves no modes above %d'%(grids.M, g.N + 1))

    tail = [project_sine(F, Kmax, grids.colloc).coeffs[g.N+1:] for F in (F1, F2)]
    return float(max(np.max(np.abs(t)) for t in tail))


def zero_map_residual(cfg, eps, s1, s2):
    """
    Closed form of F(eps, s1, s2, 0, 0) from

        contour mean of conj(tau)/(eps(b' tau + b_j w) - d) = 1/(eps b_j w - d)
    """
    K = cfg.N + 1
    n = np.arange(1, K)
    gam = (cfg.gamma1, cfg.gamma2) if cfg.corotating else (cfg.gamma1, s2)

    out = []
    for j in (1, 2):
        bj = cfg.b(j)
        go = gam[2-j]
        C = np.zeros((K,))
        if cfg.corotating:
            C[0] = 2*s1*((-1)**j*s2 - (j-1)*cfg.d) + go/cfg.d
            C[1:] = go*(eps*bj)**n/cfg.d**(n+1)
        else:
            C[0] = 2*s1 - go/cfg.d
            C[1:] = -go*(eps*bj)**n/cfg.d**(n+1)
        out.append(SineSeries(C))

    return out[0], out[1]


def reflect_state(g):
    """
    g with f_j(w) replaced by f_j(-w)
    """
    return StateVector(g.s1, g.s2, g.f1.reflected(), g.f2.reflected())


def symmetry_defect(eps, g, cfg, M=None):
    """
    max_k |F_j(eps, g)(-w_k) + F_j(-eps, g~)(w_k)| over both patches

    F(eps, g) is re-evaluated on the grid of the points -w_k, not mapped
    through a coefficient formula.
    """
    M = cfg.M if M is None else int(M)
    grids = make_pair_grids(M)
    # -w_k = exp(2 pi i (k + M/2)/M)
    flipped = PairGrids(M, colloc_sigma=(M % 2)*0.5)
    shift = M//2

    Fm = residual_samples(eps, g, cfg, flipped)
    Fr = residual_samples(-eps, reflect_state(g), cfg, grids)

    defect = 0.
    for Fa, Fb in zip(Fm, Fr):
        Fa = np.roll(Fa, -shift)
        defect = max(defect, np.max(np.abs(Fa + Fb)))
    return defect
