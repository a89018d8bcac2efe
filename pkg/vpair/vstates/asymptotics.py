# -*- coding: utf-8 -*-
"""
Small-epsilon expansions of the V-state branch and power-law fitting

Map coefficients are quoted in conformal-map form, i.e. the coefficient of
conj(w)^n in phi_j(w) = w + eps b_j f_j(w), which is eps b_j a^j_n.
"""

import logging

import numpy as np

from vpair.utils.spectral import FourierMap
from vpair.utils.exceptions import ConfigError, FitError, StateOutOfBallError
from .pairproblem import StateVector, point_vortex_equilibrium
from .functional import BALL

logger = logging.getLogger(__name__)

class ExpansionCoeffs(object):
    """
    Expansion coefficients of the branch for one configuration

    phimap[j][(n, p)] is the coefficient of conj(w)^n eps^p in phi_j,
    scalars[(name, p)] the eps^p coefficient of the scalar unknowns.
    """

    def __init__(self, cfg):
        self.cfg = cfg
        g1, g2, d = cfg.gamma1, cfg.gamma2, cfg.d
        b1, b2 = cfg.b1, cfg.b2

        if cfg.corotating:
            if g1 == 0 or g2 == 0:
                raise ConfigError('gamma1' if g1 == 0 else 'gamma2',\
                    'co-rotating expansions need nonzero gamma1 and gamma2')
            self.delta1 = g2/g1
            self.delta2 = g1/g2
        else:
            self.delta1 = -1.
            self.delta2 = -1.

        self.phimap = {1:self._mapcoeffs(self.delta1, b1/d), 2:self._mapcoeffs(self.delta2, b2/d)}

        s1, s2 = point_vortex_equilibrium(cfg)
        if cfg.corotating:
            self.scalar_names = ('Omega', 'Z')
            self.scalars = {
                ('Omega', 0):s1,
                ('Omega', 4):(g1*b2**4 + g2*b1**4)/(2*d**6),
                ('Z', 0):s2,
                ('Z', 4):(g2**3*b1**4/g1 - g1**3*b2**4/g2)/(d**3*(g1 + g2)**2),
            }
        else:
            self.scalar_names = ('U', 'gamma2')
            self.scalars = {
                ('U', 0):s1,
                ('U', 4):-g1/(2*d)*(2*b1**4 + b2**4)/d**4,
                ('gamma2', 0):s2,
                ('gamma2', 4):-g1*(b1**4 - b2**4)/d**4,
            }

    @staticmethod
    def _mapcoeffs(delta, beta):
        return {
            (1, 2):delta*beta**2,
            (2, 3):delta/2.*beta**3,
            (3, 4):delta/3.*beta**4,
            (1, 4):2*delta*(1 + delta)*beta**4,
            (4, 5):delta/4.*beta**5,
            (2, 5):3*delta*(1 + delta)/4.*beta**5,
        }

    @property
    def deltas(self):
        return (self.delta1, self.delta2)

    def phi_coefficient(self, j, n, eps):
        """
        Truncated expansion of the conj(w)^n coefficient of phi_j
        """
        return sum(c*eps**p for (m, p), c in self.phimap[j].items() if m == n)

    def scalar(self, name, eps):
        return sum(c*eps**p for (m, p), c in self.scalars.items() if m == name)


def expansion_state(cfg, eps):
    """
    StateVector carrying the truncated expansions of phi_j and of the scalars
    """
    ex = ExpansionCoeffs(cfg)
    N = cfg.N

    maps = []
    for j in (1, 2):
        bj = cfg.b(j)
        a = np.zeros((N,))
        # a_n = (phi coefficient)/(eps b_j); every term carries eps^p, p >= 2
        for (n, p), c in ex.phimap[j].items():
            if n <= N:
                a[n-1] += c*eps**(p-1)/bj
        maps.append(FourierMap(a))

        r = maps[-1].derivative_bound()*abs(eps)*bj
        if r > BALL:
            raise StateOutOfBallError('expansion at eps = %g leaves the ball (%g > %g)'%(eps, r, BALL))

    s1 = ex.scalar(ex.scalar_names[0], eps)
    s2 = ex.scalar(ex.scalar_names[1], eps)
    return StateVector(s1, s2, maps[0], maps[1])


class FitResult(object):
    """
    y = c eps^p + o(eps^p) fit: coefficient c, observed order, fit residual
    """
    def __init__(self, c, order, residual):
        self.c = float(c)
        self.order = float(order)
        self.residual = float(residual)

    def __repr__(self):
        return 'FitResult(c=%.10g, order=%.4g, residual=%.3e)'%(self.c, self.order, self.residual)


def _build_lsq_A(eps, powers):
    """
    Matrix with columns eps^q, q in powers
    """
    A = np.ones((eps.shape[0], len(powers)))
    for ii, q in enumerate(powers):
        A[:,ii] = eps**q
    return A


def fit_power_coefficient(samples, p, lower=None):
    """
    Estimate c in y = c eps^p + o(eps^p)

    The next order eps^(p+2) is eliminated in a least-squares fit
    (Richardson elimination). With lower set, y = c' eps^lower + c eps^p + ...
    and both coefficients are fitted jointly. The observed order is the log
    slope of the two smallest-|eps| samples, after removing the lower term.
    """
    samples = sorted([(float(e), float(y)) for e, y in samples], key=lambda s: abs(s[0]))
    if len(samples) < 3:
        raise FitError('need at least 3 samples to fit eps^%d (got %d)'%(p, len(samples)))

    eps = np.array([s[0] for s in samples])
    y = np.array([s[1] for s in samples])
    if np.any(eps == 0):
        raise FitError('samples at eps = 0 carry no information on eps^%d'%p)

    if lower is None:
        powers = [p, p + 2][:len(samples) - 1]
    else:
        powers = [lower, p, p + 2]
    A = _build_lsq_A(eps, powers)
    # columns scaled to unit max
    scale = np.max(np.abs(A), axis=0)
    b = np.linalg.lstsq(A/scale, y, rcond=None)[0]/scale
    res = np.sqrt(np.sum((A.dot(b) - y)**2))

    ip = powers.index(p)
    if lower is not None:
        y = y - b[0]*eps**lower

    e1, e2 = eps[0], eps[1]
    y1, y2 = y[0], y[1]
    if y1 != 0 and y2 != 0:
        order = np.log(abs(y2/y1))/np.log(abs(e2/e1))
    else:
        order = float(p)

    return FitResult(b[ip], order, res)


# (mode n, order p, lower order fitted jointly)
MAPROWS = [(1, 2, None), (2, 3, None), (3, 4, None), (1, 4, 2), (4, 5, None), (2, 5, 3)]


def expansion_report(branch, cfg):
    """
    Compare fitted expansion coefficients of a solved branch with the closed
    forms. Returns a list of dict rows {name, closed_form, fitted, rel_err, order}.
    """
    states = [v for v in branch if v.eps != 0]
    if len(states) < 3:
        raise FitError('expansion report needs at least 3 states with eps != 0 (got %d)'%len(states))

    ex = ExpansionCoeffs(cfg)
    eps = np.array([v.eps for v in states])
    rows = []

    for j in (1, 2):
        bj = cfg.b(j)
        for n, p, lower in [r for r in MAPROWS if r[0] <= cfg.N]:
            y = np.array([v.eps*bj*v.state.f(j).coeffs[n-1] for v in states])
            fit = fit_power_coefficient(zip(eps, y), p, lower=lower)
            closed = ex.phimap[j][(n, p)]
            rows.append(_row('phi%d_w%d_eps%d'%(j, n, p), closed, fit, (bj/cfg.d)**p))

    for name in ex.scalar_names:
        s0 = ex.scalars[(name, 0)]
        idx = ex.scalar_names.index(name)
        y = np.array([v.state.as_array()[idx] for v in states]) - s0
        fit = fit_power_coefficient(zip(eps, y), 4)
        closed = ex.scalars[(name, 4)]
        rows.append(_row('%s_eps4'%name, closed, fit, abs(s0)/cfg.d**4))

    return rows


def _row(name, closed, fit, scale):
    """
    Relative error against the closed form; a vanishing closed form is
    compared against the natural scale of the coefficient instead
    """
    if closed != 0:
        rel_err = abs(fit.c - closed)/abs(closed)
    else:
        rel_err = abs(fit.c)/scale

    return {'name':name, 'closed_form':closed, 'fitted':fit.c, 'rel_err':rel_err, 'order':fit.order}
