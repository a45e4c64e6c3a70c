'''
Gauss-Radau quadrature on [0, 1] with the right endpoint fixed at t = 1.

The rule drives the entropy bound: every node except the last one becomes a
small SDP, and the node weights scale the SDP values.
'''

from .exceptions import DomainError
from collections import namedtuple
import numpy as np
import scipy.linalg

class QuadratureRule(namedtuple('QuadratureRule', ['nodes', 'weights'])):
    '''
    QuadratureRule(nodes, weights)

    Nodes are strictly increasing in (0, 1], the last one equal to 1.0, and
    the weights are positive and sum to 1.
    '''
    __slots__ = ()

    @property
    def m(self):
        return len(self.nodes)

    def integrate(self, func):
        '''integrate(lambda t: t ** 2) -> approximately 1/3'''
        return float(sum(w * func(t) for t, w in zip(self.nodes, self.weights)))

def jacobi_matrix(m):
    '''jacobi_matrix(m) -> (diagonal, off_diagonal)

    Recurrence coefficients of the Legendre polynomials shifted to [0, 1].
    '''
    k = np.arange(1, m, dtype=float)
    diagonal = np.full(m, 0.5)
    off_diagonal = 0.5 * k / np.sqrt(4.0 * k ** 2 - 1.0)
    return diagonal, off_diagonal

def gauss_radau(m):
    '''gauss_radau(m) -> QuadratureRule

    The m-point Gauss-Radau rule for dt on [0, 1] with t_m = 1, exact for
    polynomials of degree up to 2m - 2.

    The nodes are the eigenvalues of the Jacobi matrix whose last diagonal
    entry is modified so that 1 becomes an eigenvalue; the weights are the
    squared first components of the normalized eigenvectors.
    '''
    if not isinstance(m, (int, np.integer)) or isinstance(m, bool):
        raise DomainError('m must be an integer: %r' % (m, ))
    if m < 1:
        raise DomainError('m must be at least 1: %s' % m)

    if m == 1:
        return QuadratureRule((1.0, ), (1.0, ))

    diagonal, off_diagonal = jacobi_matrix(m)

    # solve (J_{m-1} - I) delta = beta^2 e_{m-1} for the modified entry
    rhs = np.zeros(m - 1)
    rhs[-1] = off_diagonal[-1] ** 2
    banded = np.zeros((3, m - 1))
    banded[0, 1:] = off_diagonal[:-1]
    banded[1, :] = diagonal[:-1] - 1.0
    banded[2, :-1] = off_diagonal[:-1]
    delta = scipy.linalg.solve_banded((1, 1), banded, rhs)
    diagonal = diagonal.copy()
    diagonal[-1] = 1.0 + delta[-1]

    nodes, vectors = scipy.linalg.eigh_tridiagonal(diagonal, off_diagonal)
    weights = vectors[0, :] ** 2

    order = np.argsort(nodes)
    nodes = nodes[order]
    weights = weights[order]
    nodes[-1] = 1.0
    weights = weights / weights.sum()

    return QuadratureRule(
        tuple(float(t) for t in nodes),
        tuple(float(w) for w in weights),
    )

def alpha_bound(t):
    '''alpha_bound(t) -> 3/2 * min(1/t, 1/(1 - t))

    Upper bound on <Z*Z> and <ZZ*> at an optimal Eve operator for node t.
    '''
    if not (0.0 < t <= 1.0):
        raise DomainError('t must lie in (0, 1]: %r' % t)
    if t == 1.0:
        return 1.5
    return 1.5 * min(1.0 / t, 1.0 / (1.0 - t))

def entropy_constant(rule):
    '''entropy_constant(rule) -> c_m

    The constant term sum_{i<m} w_i / (t_i ln 2) of the entropy bound.
    '''
    return float(sum(
        w / (t * np.log(2))
        for t, w in zip(rule.nodes[:-1], rule.weights[:-1])
    ))
