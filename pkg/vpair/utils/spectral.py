"""
Spectral tools for boundary maps on the unit circle

Boundary perturbations are stored as real coefficients of

    f(w) = sum_{n=1}^{N} a_n conj(w)^n ,   |w| = 1

and residuals as real coefficients over the sine basis e_n(w) = Im{w^n}.
All sums are direct O(MN) sums; grids stay in the hundreds.
"""

import numpy as np

from .exceptions import ConfigError, AliasingError

def _readonly(x):
    x.setflags(write=False)
    return x

class CircleGrid(object):
    """
    Equispaced nodes w_k = exp(2 pi i (k + sigma)/M) on the unit circle

    Powers conj(w)^n, n = 0..nmax, are tabulated at construction.
    """

    def __init__(self, M, sigma=0., nmax=0):
        M = int(M)
        if M < 4:
            raise ConfigError('grid', 'need at least 4 nodes (got %d)'%M)
        if sigma not in (0, 0., 0.5):
            raise ConfigError('grid', 'offset must be 0 or 1/2 (got %s)'%sigma)
        if nmax < 0:
            raise ConfigError('modes', 'power table size must be >= 0 (got %s)'%nmax)

        self.M = M
        self.sigma = float(sigma)
        self.nmax = int(nmax)

        self.theta = _readonly(2*np.pi*(np.arange(M) + self.sigma)/M)
        self.nodes = _readonly(np.exp(1j*self.theta))
        self._powers = self._power_table(self.nmax)

    def __len__(self):
        return self.M

    def __repr__(self):
        return 'CircleGrid(M=%d, sigma=%g, nmax=%d)'%(self.M, self.sigma, self.nmax)

    def _power_table(self, nmax):
        n = np.arange(nmax+1)
        return _readonly(self.nodes.conj()[:,np.newaxis]**n[np.newaxis,:])

    def conj_powers(self, nmax):
        """
        Array [M, nmax+1] with conj(w_k)**n, n = 0..nmax

        Beyond the tabulated range a fresh table is built and not kept.
        """
        if nmax <= self.nmax:
            return self._powers[:,:nmax+1]
        return self._power_table(nmax)

    def staggered(self):
        """
        Grid of the same size shifted by half a node spacing
        """
        return CircleGrid(self.M, 0.5 - self.sigma, self.nmax)


def make_grid(M, sigma=0., nmax=0):
    return CircleGrid(M, sigma, nmax)


class FourierMap(object):
    """
    Boundary perturbation f(w) = sum a_n conj(w)^n with real a_n
    """

    def __init__(self, coeffs):
        coeffs = np.array(coeffs, dtype=np.float64).ravel()
        if coeffs.size < 1:
            raise ConfigError('modes', 'a FourierMap needs at least one coefficient')

        self.coeffs = _readonly(coeffs)

    @classmethod
    def zeros(cls, N):
        return cls(np.zeros((N,)))

    @property
    def N(self):
        return self.coeffs.shape[0]

    @property
    def n(self):
        return np.arange(1, self.N+1)

    def __repr__(self):
        return 'FourierMap(%s)'%np.array2string(self.coeffs, precision=4)

    def __eq__(self, other):
        return isinstance(other, FourierMap) and np.array_equal(self.coeffs, other.coeffs)

    def __call__(self, w, order=0):
        return evaluate_at(self, w, order=order)

    def derivative_bound(self):
        """
        sum n|a_n|, an upper bound of sup|f'| on the circle
        """
        return np.sum(self.n*np.abs(self.coeffs))

    def second_derivative_bound(self):
        return np.sum(self.n*(self.n+1)*np.abs(self.coeffs))

    def sup_bound(self):
        return np.sum(np.abs(self.coeffs))

    def max_abs(self):
        return np.max(np.abs(self.coeffs))

    def reflected(self):
        """
        The map w -> f(-w), recovered by sampling f at -w and taking the
        contour mean against tau^n
        """
        grid = make_grid(max(2*self.N+2, 8))
        tau = grid.nodes
        fm = evaluate_at(self, -tau)
        a = np.array([contour_mean(fm*tau**(n-1), grid) for n in self.n])
        return FourierMap(a.real)


def evaluate_at(f, w, order=0):
    """
    f, f' or f'' at arbitrary points w of the unit circle (conj(w) = 1/w)
    """
    w = np.asarray(w, dtype=np.complex128)
    wc = w.conj()
    n = f.n
    P = wc[...,np.newaxis]**n

    if order == 0:
        return P.dot(f.coeffs)
    elif order == 1:
        return -wc*P.dot(n*f.coeffs)
    elif order == 2:
        return wc*wc*P.dot(n*(n+1)*f.coeffs)
    else:
        raise ConfigError('order', 'derivative order must be 0, 1 or 2 (got %s)'%order)


def evaluate(f, grid, order=0):
    """
    Evaluate f (order 0), f' (order 1) or f'' (order 2) on a CircleGrid
    """
    n = f.n
    P = grid.conj_powers(f.N+2)

    if order == 0:
        return P[:,1:f.N+1].dot(f.coeffs)
    elif order == 1:
        return -P[:,2:f.N+2].dot(n*f.coeffs)
    elif order == 2:
        return P[:,3:f.N+3].dot(n*(n+1)*f.coeffs)
    else:
        raise ConfigError('order', 'derivative order must be 0, 1 or 2 (got %s)'%order)


class SineSeries(object):
    """
    Real coefficients C_1..C_K over e_n = Im{w^n}
    """

    def __init__(self, coeffs):
        coeffs = np.array(coeffs, dtype=np.float64).ravel()
        if coeffs.size < 1:
            raise ConfigError('modes', 'a SineSeries needs at least one coefficient')

        self.coeffs = _readonly(coeffs)

    @classmethod
    def zeros(cls, K):
        return cls(np.zeros((K,)))

    @property
    def K(self):
        return self.coeffs.shape[0]

    def __repr__(self):
        return 'SineSeries(%s)'%np.array2string(self.coeffs, precision=4)

    def sup(self):
        return np.max(np.abs(self.coeffs))

    def values(self, grid):
        """
        sum C_n sin(n theta) on a grid
        """
        n = np.arange(1, self.K+1)
        return np.sin(grid.theta[:,np.newaxis]*n).dot(self.coeffs)


def project_sine(values, K, grid=None):
    """
    Sine coefficients C_n = (2/M) sum_k values[k] sin(n theta_k), n=1..K

    values are sampled on the sigma=0 grid theta_k = 2 pi k/M
    """
    values = np.asarray(values, dtype=np.float64)
    M = values.shape[-1]
    if grid is None:
        grid = make_grid(M)
    elif grid.M != M or grid.sigma != 0.:
        raise ConfigError('grid', 'values must be sampled on the sigma=0 grid of size %d'%M)

    if K < 1 or K > (M-1)//2:
        raise AliasingError('cannot resolve %d sine modes from %d samples (max %d)'%(K, M, (M-1)//2))

    n = np.arange(1, K+1)
    S = np.sin(grid.theta[:,np.newaxis]*n)
    return SineSeries(2./M*values.dot(S))


def contour_mean(values, grid):
    """
    Trapezoidal contour mean (1/2 pi i) int_T h(tau) dtau over the grid nodes,
    i.e. (1/M) sum_k h(tau_k) tau_k. Operates along the last axis.
    """
    values = np.asarray(values)
    return values.dot(grid.nodes)/grid.M
