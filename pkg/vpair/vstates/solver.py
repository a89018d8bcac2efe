# -*- coding: utf-8 -*-
"""
Newton solver and natural-parameter continuation for V-state pairs

The square system has 2N+2 unknowns (s1, s2, a^1, a^2) and 2N+2 equations
(modes 1..N+1 of each patch residual). The Jacobian is built by central
differences and left-preconditioned by the closed-form inverse of the
epsilon = 0 linearization.
"""

import logging

import numpy as np
from scipy import linalg

from vpair.utils.exceptions import ConvergenceError, SingularJacobianError,\
        EmptyBranchError, StateOutOfBallError, GeometryOverlapError, VStateError
from .pairproblem import StateVector, validate_config, linearized_inverse_matrix
from .functional import make_pair_grids, residual_vector, truncation_indicator, check_ball
from . import asymptotics

logger = logging.getLogger(__name__)

class VState(object):
    """
    A converged point (eps, g(eps)) of the solution curve
    """
    def __init__(self, eps, state, residual_norm, newton_iters=0,\
            truncation_indicator=np.nan, history=()):
        self.eps = float(eps)
        self.state = state
        self.residual_norm = float(residual_norm)
        self.newton_iters = int(newton_iters)
        self.truncation_indicator = float(truncation_indicator)
        self.history = tuple(history)

    def __repr__(self):
        return 'VState(eps=%g, residual=%.3e, iters=%d)'%(self.eps, self.residual_norm, self.newton_iters)


class Branch(object):
    """
    Converged VStates with strictly increasing eps
    """
    def __init__(self, cfg, states=(), eps_max=None):
        self.cfg = cfg
        self.states = list(states)
        if eps_max is None:
            eps_max = self.states[-1].eps if self.states else np.nan
        self.eps_max = eps_max

    def __len__(self):
        return len(self.states)

    def __iter__(self):
        return iter(self.states)

    def __getitem__(self, ii):
        return self.states[ii]

    def __repr__(self):
        return 'Branch(%d states, eps_max=%g)'%(len(self), self.eps_max)

    @property
    def eps(self):
        return np.array([v.eps for v in self.states])

    def append(self, v):
        if self.states and not v.eps > self.states[-1].eps:
            raise VStateError('branch eps must increase (%g after %g)'%(v.eps, self.states[-1].eps))
        self.states.append(v)
        self.eps_max = v.eps


class NewtonSolver(object):
    """
    Newton iteration for F(eps, g) = 0 at fixed eps
    """
    fd_step = 1e-6
    precondition = True
    # Skip the 2M truncation measurement when False
    measure_truncation = True

    VERBOSE = False

    def __init__(self, cfg, **kwargs):
        self.__dict__.update(kwargs)
        self.cfg = validate_config(cfg)
        self.grids = make_pair_grids(cfg.M)
        self.tol = cfg.tol*cfg.gamma_scale()
        self._P = linearized_inverse_matrix(cfg) if self.precondition else None

    def residual(self, eps, x):
        return residual_vector(eps, StateVector.from_array(x), self.cfg, self.grids)

    def jacobian(self, eps, x):
        """
        Central differences, one column per unknown, step 1e-6 max(1,|u|)
        """
        x = np.asarray(x, dtype=np.float64)
        nx = x.shape[0]
        J = np.zeros((nx, nx))
        for ii in range(nx):
            h = self.fd_step*max(1., abs(x[ii]))
            xp = x.copy()
            xm = x.copy()
            xp[ii] += h
            xm[ii] -= h
            J[:,ii] = (self.residual(eps, xp) - self.residual(eps, xm))/(2*h)
        return J

    def solve(self, eps, init):
        cfg = self.cfg
        check_ball(eps, init, cfg)

        x = init.as_array()
        R = self.residual(eps, x)
        rnorm = np.max(np.abs(R))
        history = [rnorm]

        it = 0
        while rnorm > self.tol:
            if it >= cfg.max_iter:
                raise ConvergenceError('no convergence at eps = %g after %d iterations (residual %.3e)'\
                    %(eps, it, rnorm))

            J = self.jacobian(eps, x)
            rhs = -R
            if self._P is not None:
                J = self._P.dot(J)
                rhs = self._P.dot(rhs)

            lu, piv = linalg.lu_factor(J, check_finite=True)
            if np.any(np.abs(np.diag(lu)) <= np.finfo(float).eps*np.max(np.abs(np.diag(lu)))):
                raise SingularJacobianError('singular Jacobian at eps = %g'%eps)
            dx = linalg.lu_solve((lu, piv), rhs)

            x = x + dx
            it += 1
            R = self.residual(eps, x)
            rnorm = np.max(np.abs(R))
            history.append(rnorm)

            if self.VERBOSE:
                logger.info('eps = %g, iteration %d: residual %.3e, |dx| %.3e'%(eps, it, rnorm, np.max(np.abs(dx))))
            else:
                logger.debug('eps = %g, iteration %d: residual %.3e'%(eps, it, rnorm))

        state = StateVector.from_array(x)
        trunc = truncation_indicator(eps, state, cfg) if self.measure_truncation else np.nan

        logger.info('eps = %g converged in %d iterations (residual %.3e)'%(eps, it, rnorm))
        return VState(eps, state, rnorm, it, trunc, history)


def newton_solve(cfg, eps, init, **kwargs):
    return NewtonSolver(cfg, **kwargs).solve(eps, init)


def jacobian_fd(cfg, eps, g, **kwargs):
    """
    Unpreconditioned finite-difference Jacobian of the projected residual
    """
    check_ball(eps, g, cfg)
    solver = NewtonSolver(cfg, precondition=False, **kwargs)
    return solver.jacobian(eps, g.as_array())


def _extrapolate(states, eps):
    """
    Lagrange extrapolation through the last (up to three) states
    """
    pts = states[-3:]
    x = np.zeros_like(pts[0].state.as_array())
    for ii, vi in enumerate(pts):
        L = 1.
        for jj, vj in enumerate(pts):
            if jj != ii:
                L *= (eps - vj.eps)/(vi.eps - vj.eps)
        x += L*vi.state.as_array()
    return StateVector.from_array(x)


class Continuation(object):
    """
    Natural-parameter continuation in eps

    Predictor: the asymptotic expansion for the first two targets, then
    polynomial extrapolation of the previous states. Corrector: Newton.
    A failed step is bisected once before the branch is closed.
    """
    bisect = True

    VERBOSE = False

    def __init__(self, cfg, **kwargs):
        self.__dict__.update(kwargs)
        self.cfg = validate_config(cfg)
        # NewtonSolver attributes given here are passed on
        skw = dict((k, v) for k, v in kwargs.items() if hasattr(NewtonSolver, k))
        skw.setdefault('VERBOSE', self.VERBOSE)
        self.solver = NewtonSolver(cfg, **skw)

    def predict(self, branch, eps):
        if len(branch) < 2:
            return asymptotics.expansion_state(self.cfg, eps)
        return _extrapolate(branch.states, eps)

    def correct(self, branch, eps):
        return self.solver.solve(eps, self.predict(branch, eps))

    def __call__(self, eps_targets):
        eps_targets = [float(e) for e in eps_targets]
        if np.any(np.diff(eps_targets) <= 0):
            raise ConvergenceError('eps targets must be strictly increasing')

        branch = Branch(self.cfg)
        failures = (ConvergenceError, StateOutOfBallError, GeometryOverlapError)

        for eps in eps_targets:
            try:
                branch.append(self.correct(branch, eps))
                continue
            except failures as e:
                logger.warning('continuation step to eps = %g failed: %s'%(eps, e))
                if len(branch) == 0:
                    raise EmptyBranchError('no converged state at the first target eps = %g: %s'%(eps, e))
                if not self.bisect:
                    break

            eps_mid = 0.5*(branch[-1].eps + eps)
            logger.info('bisecting the step: eps = %g'%eps_mid)
            try:
                branch.append(self.correct(branch, eps_mid))
                branch.append(self.correct(branch, eps))
            except failures as e:
                logger.warning('bisected step failed: %s'%e)
                break

        logger.info('branch of %d states, eps_max = %g'%(len(branch), branch.eps_max))
        return branch


def continue_branch(cfg, eps_targets=None, **kwargs):
    if eps_targets is None:
        eps_targets = cfg.eps_targets
    return Continuation(cfg, **kwargs)(eps_targets)


def epsmax_survey(cfg, b_pairs, eps_targets, **kwargs):
    """
    eps_max reached along eps_targets for each (b1, b2) pair

    Returns a list of (b1, b2, eps_max); eps_max is nan when the first
    target already fails or the configuration is not admissible.
    """
    out = []
    for b1, b2 in b_pairs:
        try:
            cfgb = validate_config(cfg.replace(b1=b1, b2=b2))
            eps_max = continue_branch(cfgb, eps_targets, **kwargs).eps_max
        except (EmptyBranchError, VStateError) as e:
            logger.warning('b = (%g, %g): %s'%(b1, b2, e))
            eps_max = np.nan
        out.append((b1, b2, eps_max))
    return out
