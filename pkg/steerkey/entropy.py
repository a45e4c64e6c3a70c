'''
Closed-form entropies and the analytic key-rate bounds for the one-sided
device-independent protocol.

All entropies are in bits.
'''

from .exceptions import ContractError, DomainError
from .model import PAULI_I, PAULI_X, PAULI_Z
import math
import numpy as np

LN2 = math.log(2.0)

# inputs this far outside their domain are rounding noise
DOMAIN_TOLERANCE = 1e-9

def _xlog2x(p):
    return 0.0 if p <= 0.0 else p * math.log2(p)

def binary_entropy(p):
    '''binary_entropy(p) -> -p log2 p - (1 - p) log2(1 - p)'''
    if not (0.0 <= p <= 1.0):
        raise DomainError('p must lie in [0, 1]: %r' % p)
    if p == 0.0 or p == 1.0:
        return 0.0
    return -p * math.log2(p) - (1.0 - p) * math.log1p(-p) / LN2

def phi(x):
    '''phi(x) -> h((1 + x) / 2)

    Computed through (1 - |x|) / 2 so that values of |x| close to 1 keep
    their precision.
    '''
    if not (-1.0 - DOMAIN_TOLERANCE <= x <= 1.0 + DOMAIN_TOLERANCE):
        raise DomainError('x must lie in [-1, 1]: %r' % x)
    return binary_entropy(max(0.0, (1.0 - abs(x)) / 2.0))

def cond_entropy_key(table, q=0.0, x=1, y=1):
    '''cond_entropy_key(table, q) -> H(A'|B) for the key setting (x, y)

    A' is Alice's key bit after flipping it with probability q.
    '''
    if not (0.0 <= q <= 0.5):
        raise DomainError('q must lie in [0, 1/2]: %r' % q)
    joint = np.asarray(table.joint(x - 1, y - 1))
    if joint.shape[0] != 2:
        raise ContractError(
            'Key input must have 2 outcomes for Alice, saw %s' % joint.shape[0]
        )

    flipped = (1.0 - q) * joint + q * joint[::-1, :]
    entropy = 0.0
    for b in range(flipped.shape[1]):
        p_b = flipped[:, b].sum()
        if p_b <= 0.0:
            continue
        entropy -= sum(_xlog2x(p) for p in flipped[:, b]) - _xlog2x(p_b)
    return max(0.0, entropy)

def bound_simple(corr):
    '''bound_simple(<A2 B2>) -> 1 - phi(<A2 B2>)'''
    if abs(corr) > 1.0 + DOMAIN_TOLERANCE:
        raise DomainError('correlator must lie in [-1, 1]: %r' % corr)
    return 1.0 - phi(max(-1.0, min(1.0, corr)))

def bound_bias(z, x):
    '''bound_bias(<A1>, <A2 B2>) -> phi(z) - phi(sqrt(z^2 + x^2))'''
    radius_squared = z * z + x * x
    if radius_squared > 1.0 + DOMAIN_TOLERANCE:
        raise DomainError(
            'z^2 + x^2 must not exceed 1: z=%r, x=%r' % (z, x)
        )
    radius = min(1.0, math.sqrt(radius_squared))
    return max(0.0, phi(max(-1.0, min(1.0, z))) - phi(radius))

def closed_form_rate(eta, theta):
    '''closed_form_rate(eta, theta) -> asymptotic rate of the simple protocol

    1 - h((1 + eta sin 2theta)/2) - (1 - eta) h(cos^2 theta), for a pure
    state, ideal Alice and Bob losing photons with probability 1 - eta.
    '''
    if not (0.0 <= eta <= 1.0):
        raise DomainError('eta must lie in [0, 1]: %r' % eta)
    return 1.0 - phi(eta * math.sin(2 * theta)) \
        - (1.0 - eta) * binary_entropy(math.cos(theta) ** 2)

def dw_rate(h_ae, h_ab):
    '''dw_rate(H(A|E), H(A|B)) -> H(A|E) - H(A|B)'''
    return h_ae - h_ab

def hessian_f(z, x):
    '''hessian_f(z, x) -> (d2f/dz2, d2f/dx2, det)

    Second derivatives of f(z, x) = phi(z) - phi(sqrt(z^2 + x^2)) on the open
    unit disc with x != 0.
    '''
    radius_squared = z * z + x * x
    if radius_squared >= 1.0:
        raise DomainError('Hessian needs z^2 + x^2 < 1: z=%r, x=%r' % (z, x))
    if x == 0.0:
        raise DomainError('Hessian is singular at x = 0')

    radius = math.sqrt(radius_squared)
    artanh = math.atanh(radius)
    one_minus = 1.0 - radius_squared

    d2z = x * x / LN2 * (
        (x * x - 1.0 + 2.0 * z * z)
        / (radius_squared * one_minus * (1.0 - z * z))
        + artanh / radius ** 3
    )
    d2x = 1.0 / LN2 * (
        x * x / (radius_squared * one_minus)
        + z * z * artanh / radius ** 3
    )
    det = x * x / (LN2 ** 2 * radius_squared ** 2 * one_minus * (1.0 - z * z)) \
        * (radius * artanh - radius_squared)
    return d2z, d2x, det

def domain_check(state, observable):
    '''domain_check(rho, B) -> <Z x 1>^2 + <X x B>^2

    Never exceeds 1 for a two-qubit state and a Hermitian unitary B.
    '''
    z = np.real(np.trace(state @ np.kron(PAULI_Z, PAULI_I)))
    x = np.real(np.trace(state @ np.kron(PAULI_X, observable)))
    return float(z * z + x * x)
