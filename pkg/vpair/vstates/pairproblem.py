# -*- coding: utf-8 -*-
"""
Vortex-pair problem definition

Configuration, point-vortex equilibria and the linearized V-state operator
at epsilon = 0 together with its closed-form inverse.

Unknowns are ordered (s1, s2, a^1_1..a^1_N, a^2_1..a^2_N) and equations
(patch 1 modes 1..N+1, patch 2 modes 1..N+1). Scalars only feed mode 1 and
a_n only feeds mode n+1.
"""

import os
import logging

import numpy as np
import yaml
from math import factorial

import vpair
from vpair.utils.spectral import FourierMap, SineSeries
from vpair.utils.exceptions import ConfigError, DegenerateLinearizationError

logger = logging.getLogger(__name__)

CO = 'co'
COUNTER = 'counter'

_modenames = {
    'co':CO, 'corotating':CO, 'co-rotating':CO,
    'counter':COUNTER, 'counterrotating':COUNTER, 'counter-rotating':COUNTER,
}

# Load the key metadata and defaults
with open(os.path.join(vpair._dirpath, 'vstates', 'pairdefaults.yaml'), 'r') as f:
    pairmeta = yaml.safe_load(f)

# yaml key -> PairConfig attribute
configkeys = {
    'mode':'mode', 'gamma1':'gamma1', 'gamma2':'gamma2', 'b1':'b1', 'b2':'b2',
    'd':'d', 'modes':'N', 'grid':'M', 'tol':'tol', 'max_iter':'max_iter',
    'eps_targets':'eps_targets',
}

class PairConfig(object):
    """
    Parameters of a vortex-pair problem plus discretization controls
    """
    mode = CO
    gamma1 = 1.0
    gamma2 = None # defaults to gamma1
    b1 = 1.0
    b2 = 1.0
    d = 5.0

    N = pairmeta['modes']['default']
    M = pairmeta['grid']['default']
    tol = pairmeta['tol']['default']
    max_iter = pairmeta['max_iter']['default']
    eps_targets = ()

    def __init__(self, **kwargs):
        self.__dict__.update(kwargs)

        mode = str(self.mode).lower()
        if mode not in _modenames:
            raise ConfigError('mode', 'unknown mode "%s". Must be "co" or "counter".'%self.mode)
        self.mode = _modenames[mode]

        if self.gamma2 is None:
            self.gamma2 = self.gamma1

        self.eps_targets = tuple(float(e) for e in self.eps_targets)

    def __repr__(self):
        return 'PairConfig(mode=%s, gamma=(%g, %g), b=(%g, %g), d=%g, N=%d, M=%d)'%\
            (self.mode, self.gamma1, self.gamma2, self.b1, self.b2, self.d, self.N, self.M)

    def replace(self, **kwargs):
        """
        Copy with some attributes replaced
        """
        attrs = dict(self.__dict__)
        attrs.update(kwargs)
        return PairConfig(**attrs)

    def todict(self):
        """
        Configuration in the yaml key convention
        """
        out = {}
        for key, attr in configkeys.items():
            val = getattr(self, attr)
            out[key] = list(val) if key == 'eps_targets' else val
        return out

    @property
    def corotating(self):
        return self.mode == CO

    @property
    def K(self):
        return self.N + 1

    def b(self, j):
        return self.b1 if j == 1 else self.b2

    def gamma_scale(self):
        return max(1., abs(self.gamma1), abs(self.gamma2))


def validate_config(cfg):
    """
    Return cfg if all the PairConfig invariants hold, raise ConfigError
    naming the key otherwise
    """
    for key in ['b1', 'b2']:
        if not getattr(cfg, key) > 0:
            raise ConfigError(key, 'patch size ratio must be positive (got %s)'%getattr(cfg, key))

    if cfg.corotating:
        if not cfg.d > 2*(cfg.b1 + cfg.b2):
            raise ConfigError('d', 'co-rotating pairs need d > 2(b1+b2) = %g (got %g)'\
                %(2*(cfg.b1 + cfg.b2), cfg.d))
        if cfg.gamma1 + cfg.gamma2 == 0:
            raise DegenerateLinearizationError('gamma2', 'linearization degenerate: gamma1 + gamma2 = 0')
    else:
        if not cfg.d > cfg.b1 + cfg.b2:
            raise ConfigError('d', 'counter-rotating pairs need d > b1+b2 = %g (got %g)'\
                %(cfg.b1 + cfg.b2, cfg.d))
        if cfg.gamma1 == 0:
            raise DegenerateLinearizationError('gamma1', 'linearization degenerate: gamma1 = 0')

    if int(cfg.N) != cfg.N or cfg.N < 1:
        raise ConfigError('modes', 'need at least one Fourier mode (got %s)'%cfg.N)
    if int(cfg.M) != cfg.M or cfg.M < 2*cfg.N + 4:
        raise ConfigError('grid', 'grid size must be >= 2N+4 = %d (got %s)'%(2*cfg.N + 4, cfg.M))
    if not cfg.tol > 0:
        raise ConfigError('tol', 'tolerance must be positive (got %s)'%cfg.tol)
    if int(cfg.max_iter) != cfg.max_iter or cfg.max_iter < 0:
        raise ConfigError('max_iter', 'iteration cap must be a non-negative integer (got %s)'%cfg.max_iter)
    if np.any(np.diff(cfg.eps_targets) <= 0):
        raise ConfigError('eps_targets', 'targets must be strictly increasing')

    return cfg


class StateVector(object):
    """
    Unknown g = (s1, s2, f1, f2)

    s1, s2 are (Omega, Z) in co-rotating mode and (U, gamma2) in
    counter-rotating mode.
    """

    def __init__(self, s1, s2, f1, f2):
        if not isinstance(f1, FourierMap):
            f1 = FourierMap(f1)
        if not isinstance(f2, FourierMap):
            f2 = FourierMap(f2)
        if f1.N != f2.N:
            raise ConfigError('modes', 'both maps must have the same number of modes (%d, %d)'%(f1.N, f2.N))

        self.s1 = float(s1)
        self.s2 = float(s2)
        self.f1 = f1
        self.f2 = f2

    def __repr__(self):
        return '%s(s1=%.12g, s2=%.12g, f1=%s, f2=%s)'%\
            (self.__class__.__name__, self.s1, self.s2, self.f1, self.f2)

    @property
    def N(self):
        return self.f1.N

    def f(self, j):
        return self.f1 if j == 1 else self.f2

    def as_array(self):
        return np.concatenate([[self.s1, self.s2], self.f1.coeffs, self.f2.coeffs])

    @classmethod
    def from_array(cls, x):
        x = np.asarray(x, dtype=np.float64)
        N = (x.shape[0] - 2)//2
        return cls(x[0], x[1], x[2:2+N], x[2+N:])

    @classmethod
    def zeros(cls, N):
        return cls(0., 0., FourierMap.zeros(N), FourierMap.zeros(N))


class TangentVector(StateVector):
    """
    Direction h = (alpha1, alpha2, h1, h2)
    """

    @property
    def alpha1(self):
        return self.s1

    @property
    def alpha2(self):
        return self.s2

    @property
    def h1(self):
        return self.f1

    @property
    def h2(self):
        return self.f2


def point_vortex_equilibrium(cfg):
    """
    (Omega0, Z0) for co-rotating and (U0, gamma2) for counter-rotating pairs
    """
    g1, g2, d = cfg.gamma1, cfg.gamma2, cfg.d
    if cfg.corotating:
        return (g1 + g2)/(2*d**2), d*g2/(g1 + g2)
    else:
        return g1/(2*d), g1


def base_state(cfg):
    """
    g0: point-vortex scalars with undeformed (circular) patches
    """
    s1, s2 = point_vortex_equilibrium(cfg)
    return StateVector(s1, s2, FourierMap.zeros(cfg.N), FourierMap.zeros(cfg.N))


def _split(k):
    k1, k2 = k
    if isinstance(k1, SineSeries):
        k1 = k1.coeffs
    if isinstance(k2, SineSeries):
        k2 = k2.coeffs
    return np.asarray(k1, dtype=np.float64), np.asarray(k2, dtype=np.float64)


def linearized_apply(cfg, h):
    """
    D_g F(0, g0) h as a pair of SineSeries with N+1 modes each
    """
    g1, g2, d = cfg.gamma1, cfg.gamma2, cfg.d
    n = np.arange(1, h.N+1)

    C1 = np.zeros((h.N+1,))
    C2 = np.zeros((h.N+1,))

    if cfg.corotating:
        S = g1 + g2
        C1[0] = -2*h.alpha1*d*g2/S - h.alpha2*S/d**2
        C2[0] = -2*h.alpha1*d*g1/S + h.alpha2*S/d**2
        C1[1:] = -g1*n*h.h1.coeffs
        C2[1:] = -g2*n*h.h2.coeffs
    else:
        C1[0] = 2*h.alpha1 - h.alpha2/d
        C2[0] = 2*h.alpha1
        C1[1:] = -g1*n*h.h1.coeffs
        C2[1:] = -g1*n*h.h2.coeffs

    return SineSeries(C1), SineSeries(C2)


def linearized_solve(cfg, k):
    """
    D_g F(0, g0)^{-1} k for k = (patch 1 series, patch 2 series), N+1 modes each
    """
    k1, k2 = _split(k)
    if k1.shape != k2.shape:
        raise ConfigError('modes', 'both residual series must have the same length')

    g1, g2, d = cfg.gamma1, cfg.gamma2, cfg.d
    A0, B0 = k1[0], k2[0]
    n = np.arange(1, k1.shape[0])

    if cfg.corotating:
        S = g1 + g2
        if S == 0:
            raise DegenerateLinearizationError('gamma2', 'linearization degenerate: gamma1 + gamma2 = 0')
        alpha1 = -(A0 + B0)/(2*d)
        alpha2 = -d**2*(A0*g1 - B0*g2)/S**2
        a1 = -k1[1:]/(n*g1)
        a2 = -k2[1:]/(n*g2)
    else:
        if g1 == 0:
            raise DegenerateLinearizationError('gamma1', 'linearization degenerate: gamma1 = 0')
        alpha1 = B0/2.
        alpha2 = d*(B0 - A0)
        a1 = -k1[1:]/(n*g1)
        a2 = -k2[1:]/(n*g1)

    return TangentVector(alpha1, alpha2, a1, a2)


def linearized_matrix(cfg):
    """
    Dense (2N+2) matrix of D_g F(0, g0) in the solver ordering
    """
    nx = 2*cfg.N + 2
    L = np.zeros((nx, nx))
    for ii in range(nx):
        e = np.zeros((nx,))
        e[ii] = 1.
        k1, k2 = linearized_apply(cfg, TangentVector.from_array(e))
        L[:,ii] = np.concatenate([k1.coeffs, k2.coeffs])
    return L


def linearized_inverse_matrix(cfg):
    """
    Dense (2N+2) matrix of D_g F(0, g0)^{-1}
    """
    nx = 2*cfg.N + 2
    K = cfg.N + 1
    P = np.zeros((nx, nx))
    for ii in range(nx):
        e = np.zeros((nx,))
        e[ii] = 1.
        P[:,ii] = linearized_solve(cfg, (e[:K], e[K:])).as_array()
    return P


def epsilon_forcing(cfg, n):
    """
    n-th epsilon derivative of the residual at (0, g0)

        d^n F_j/d eps^n = +- n!/d^(n+1) gamma_(3-j) b_j^n Im{w^(n+1)}

    with + for co-rotating and - for counter-rotating pairs.
    """
    if n < 1 or n > cfg.N:
        raise ConfigError('modes', 'forcing order must be in 1..N (got %d)'%n)

    s1, s2 = point_vortex_equilibrium(cfg)
    g1 = cfg.gamma1
    g2 = cfg.gamma2 if cfg.corotating else s2
    sign = 1. if cfg.corotating else -1.

    C1 = np.zeros((cfg.N+1,))
    C2 = np.zeros((cfg.N+1,))
    C1[n] = sign*factorial(n)*g2*cfg.b1**n/cfg.d**(n+1)
    C2[n] = sign*factorial(n)*g1*cfg.b2**n/cfg.d**(n+1)
    return SineSeries(C1), SineSeries(C2)


def first_order_tangent(cfg):
    """
    dg/d eps at eps = 0 from the chain rule, -L^{-1} dF/d eps(0, g0)
    """
    k1, k2 = epsilon_forcing(cfg, 1)
    h = linearized_solve(cfg, (k1, k2))
    return TangentVector.from_array(-h.as_array())
