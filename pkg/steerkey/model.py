'''
The reference experiment: a two-qubit source measured by Alice (trusted or
fair-sampled) and by Bob (untrusted, lossy, with dark counts).

Outcome labels are 1, 2 and the no-click outcome, which is stored as the
third outcome (label 3) wherever it is kept.
'''

from . import util
from .exceptions import (
    ContractError,
    DegenerateRetention,
    DimensionMismatch,
    DomainError,
)
from collections import namedtuple
import logging
import math
import numpy as np

log = logging.getLogger(__name__)

EMPTY = 3

PAULI_I = np.eye(2)
PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]])
PAULI_Z = np.array([[1.0, 0.0], [0.0, -1.0]])

class MeasurementSet(namedtuple('MeasurementSet', ['party', 'povms'])):
    '''
    MeasurementSet('B', ((N_1|1, N_2|1), (N_1|2, N_2|2)))

    povms[x][a] is the POVM element for outcome a + 1 of input x + 1.
    '''
    __slots__ = ()

    @property
    def inputs(self):
        return len(self.povms)

    @property
    def dimension(self):
        return self.povms[0][0].shape[0]

    def outcomes(self, x):
        return len(self.povms[x])

    def check(self, tol=1e-10):
        '''check() -> self

        Raise ContractError unless every element is positive semidefinite and
        each POVM sums to the identity.
        '''
        dim = self.dimension
        for x, povm in enumerate(self.povms):
            total = np.zeros((dim, dim))
            for a, element in enumerate(povm):
                if element.shape != (dim, dim):
                    raise DimensionMismatch(
                        'POVM element %s|%s has shape %s, expected %s'
                        % (a + 1, x + 1, element.shape, (dim, dim))
                    )
                if np.linalg.eigvalsh(element).min() < -tol:
                    raise ContractError(
                        'POVM element %s|%s is not positive semidefinite'
                        % (a + 1, x + 1)
                    )
                total = total + element
            if not np.allclose(total, np.eye(dim), atol=tol):
                raise ContractError(
                    'POVM for input %s does not sum to the identity' % (x + 1)
                )
        return self

    def is_projective(self, tol=1e-10):
        return all(
            np.allclose(element @ element, element, atol=tol)
            for povm in self.povms
            for element in povm
        )

class BehaviorTable(object):
    '''
    BehaviorTable(nX, nY, outA, outB, p)

    Conditional probabilities p(a, b | x, y) indexed p[x][y][a][b] (zero based).
    outA[x] / outB[y] are the numbers of outcomes of each input.  The table is
    immutable.
    '''
    def __init__(self, nX, nY, outA, outB, p, tol=1e-9):
        self.nX = nX
        self.nY = nY
        self.outA = tuple(outA)
        self.outB = tuple(outB)
        if len(self.outA) != nX or len(self.outB) != nY:
            raise DimensionMismatch(
                'Outcome counts do not match the number of inputs'
            )

        table = np.zeros((nX, nY, max(self.outA), max(self.outB)))
        for x in range(nX):
            for y in range(nY):
                joint = np.asarray(p[x][y], dtype=float)
                if joint.shape != (self.outA[x], self.outB[y]):
                    raise DimensionMismatch(
                        'p[%s][%s] has shape %s, expected %s'
                        % (x, y, joint.shape, (self.outA[x], self.outB[y]))
                    )
                table[x, y, :self.outA[x], :self.outB[y]] = \
                    util.clamp_probabilities(joint)

        self.p = util.frozen(table)
        self.check(tol)

    def __eq__(self, other):
        return isinstance(other, BehaviorTable) \
            and self.outA == other.outA \
            and self.outB == other.outB \
            and np.array_equal(self.p, other.p)

    def __repr__(self):
        return 'BehaviorTable(nX=%s, nY=%s, outA=%s, outB=%s)' % (
            self.nX, self.nY, self.outA, self.outB
        )

    def check(self, tol=1e-9):
        '''check() -> self

        Normalization per setting and no-signaling between the parties.
        '''
        for x in range(self.nX):
            for y in range(self.nY):
                total = self.joint(x, y).sum()
                if abs(total - 1.0) > tol:
                    raise ContractError(
                        'p(.,.|%s,%s) sums to %r' % (x + 1, y + 1, total)
                    )

        for x in range(self.nX):
            reference = self.joint(x, 0).sum(axis=1)
            for y in range(1, self.nY):
                if np.abs(self.joint(x, y).sum(axis=1) - reference).max() > tol:
                    raise ContractError(
                        'Alice marginal for input %s depends on y' % (x + 1)
                    )
        for y in range(self.nY):
            reference = self.joint(0, y).sum(axis=0)
            for x in range(1, self.nX):
                if np.abs(self.joint(x, y).sum(axis=0) - reference).max() > tol:
                    raise ContractError(
                        'Bob marginal for input %s depends on x' % (y + 1)
                    )
        return self

    def joint(self, x, y):
        '''joint(x, y) -> array p(a, b | x, y) (zero-based inputs)'''
        return self.p[x, y, :self.outA[x], :self.outB[y]]

    def marginal_a(self, x):
        return self.joint(x, 0).sum(axis=1)

    def marginal_b(self, y):
        return self.joint(0, y).sum(axis=0)

    def nested(self):
        '''nested() -> p as nested lists [x][y][a][b]'''
        return [
            [self.joint(x, y).tolist() for y in range(self.nY)]
            for x in range(self.nX)
        ]

    def merge_empty(self, target=1, inputs=None):
        '''merge_empty(target=1) -> BehaviorTable

        Fold Bob's no-click outcome into outcome `target` for the given
        (one-based) inputs, every 3-outcome input by default.
        '''
        if target not in (1, 2):
            raise DomainError('merge target must be 1 or 2: %r' % target)
        if inputs is None:
            inputs = [y + 1 for y in range(self.nY) if self.outB[y] == 3]

        outB = list(self.outB)
        for y in inputs:
            if self.outB[y - 1] != 3:
                raise ContractError(
                    'Bob input %s has %s outcomes, nothing to merge'
                    % (y, self.outB[y - 1])
                )
            outB[y - 1] = 2

        p = []
        for x in range(self.nX):
            row = []
            for y in range(self.nY):
                joint = self.joint(x, y)
                if y + 1 in inputs:
                    merged = joint[:, :2].copy()
                    merged[:, target - 1] += joint[:, 2]
                    joint = merged
                row.append(joint)
            p.append(row)

        return BehaviorTable(self.nX, self.nY, self.outA, outB, p)

def make_state(theta, visibility):
    '''make_state(theta, v) -> 4x4 density matrix

    v |psi><psi| + (1 - v) I/4 with |psi> = cos(theta)|00> + sin(theta)|11>.
    '''
    if not (0.0 <= theta <= math.pi / 2):
        raise DomainError('theta must lie in [0, pi/2]: %r' % theta)
    if not (0.0 <= visibility <= 1.0):
        raise DomainError('visibility must lie in [0, 1]: %r' % visibility)
    psi = np.array([math.cos(theta), 0.0, 0.0, math.sin(theta)])
    return visibility * np.outer(psi, psi) + (1.0 - visibility) * np.eye(4) / 4

def ideal_qubit_observable(angle):
    '''ideal_qubit_observable(angle) -> cos(angle) Z + sin(angle) X'''
    return math.cos(angle) * PAULI_Z + math.sin(angle) * PAULI_X

def projective_measurements(party, angles):
    '''projective_measurements('B', (0, pi/2)) -> MeasurementSet

    Outcome 1 is the +1 eigenprojector of the observable at each angle.
    '''
    povms = []
    for angle in angles:
        observable = ideal_qubit_observable(angle)
        povms.append((
            (PAULI_I + observable) / 2,
            (PAULI_I - observable) / 2,
        ))
    return MeasurementSet(party, tuple(povms))

def _require_two_outcome_projective(ideal):
    for x in range(ideal.inputs):
        if ideal.outcomes(x) != 2:
            raise ContractError(
                'Input %s has %s outcomes, expected 2'
                % (x + 1, ideal.outcomes(x))
            )
    if not ideal.is_projective():
        raise ContractError('Ideal measurements must be projective')

def lossy_bob_povm(ideal, eta, keep_empty=True, merge_target=1):
    '''lossy_bob_povm(ideal, eta) -> MeasurementSet

    Bob clicks with probability eta.  With keep_empty the no-click outcome is
    a third POVM element, otherwise it is folded into outcome merge_target.
    '''
    util.check_probability(eta, 'eta')
    _require_two_outcome_projective(ideal)
    if merge_target not in (1, 2):
        raise DomainError('merge target must be 1 or 2: %r' % merge_target)

    povms = []
    for first, second in ideal.povms:
        identity = np.eye(first.shape[0])
        clicks = [eta * first, eta * second]
        empty = (1.0 - eta) * identity
        if keep_empty:
            povms.append((clicks[0], clicks[1], empty))
        else:
            clicks[merge_target - 1] = clicks[merge_target - 1] + empty
            povms.append(tuple(clicks))
    return MeasurementSet(ideal.party, tuple(povms))

def darkcount_bob_povm(ideal, eta, p_dark):
    '''darkcount_bob_povm(ideal, eta, p_d) -> MeasurementSet

    Two detectors with efficiency eta and dark-count probability p_d; double
    clicks and no clicks are both reported as the empty outcome.
    '''
    util.check_probability(eta, 'eta')
    util.check_probability(p_dark, 'p_dark')
    _require_two_outcome_projective(ideal)

    single = (1.0 - eta) * p_dark * (1.0 - p_dark)
    empty = p_dark * eta + (1.0 - eta) * (p_dark ** 2 + (1.0 - p_dark) ** 2)

    povms = []
    for first, second in ideal.povms:
        identity = np.eye(first.shape[0])
        povms.append((
            eta * (1.0 - p_dark) * first + single * identity,
            eta * (1.0 - p_dark) * second + single * identity,
            empty * identity,
        ))
    return MeasurementSet(ideal.party, tuple(povms))

def retention_probability(eta, p_dark):
    '''retention_probability(eta_A, p_d) -> probability Alice keeps a round

    One minus the probability of a no-click or a double click.
    '''
    util.check_probability(eta, 'eta')
    util.check_probability(p_dark, 'p_dark')
    return 1.0 - p_dark * eta - (1.0 - eta) * (p_dark ** 2 + (1.0 - p_dark) ** 2)

def darkcount_alice_povm(ideal, eta, p_dark, floor=1e-15):
    '''darkcount_alice_povm(ideal, eta_A, p_d) -> MeasurementSet

    Alice keeps only single-click rounds (fair sampling), so her effective
    POVM is the single-click elements renormalized by the retention
    probability.
    '''
    util.check_probability(eta, 'eta')
    util.check_probability(p_dark, 'p_dark')
    _require_two_outcome_projective(ideal)

    retention = retention_probability(eta, p_dark)
    if retention <= floor:
        raise DegenerateRetention(
            'Retention probability %r for eta=%r, p_d=%r'
            % (retention, eta, p_dark)
        )

    single = (1.0 - eta) * p_dark * (1.0 - p_dark)
    povms = []
    for first, second in ideal.povms:
        identity = np.eye(first.shape[0])
        kept = (eta * (1.0 - p_dark) * first + single * identity) / retention
        povms.append((kept, identity - kept))
    return MeasurementSet(ideal.party, tuple(povms))

def fiber_efficiency(eta_fix, attenuation, distance):
    '''fiber_efficiency(eta_fix, alpha, l) -> eta_fix * 10^(-alpha l / 10)

    attenuation in dB/km, distance in km.
    '''
    util.check_probability(eta_fix, 'eta_fix')
    if attenuation < 0 or distance < 0:
        raise DomainError(
            'attenuation and distance must be nonnegative: %r, %r'
            % (attenuation, distance)
        )
    return eta_fix * 10.0 ** (-attenuation * distance / 10.0)

def behavior(state, alice, bob):
    '''behavior(rho, alice, bob) -> BehaviorTable

    p(a, b | x, y) = tr(rho (M_a|x tensor N_b|y)).
    '''
    dim = alice.dimension * bob.dimension
    if state.shape != (dim, dim):
        raise DimensionMismatch(
            'State of shape %s does not match measurements of dimension %s'
            % (state.shape, dim)
        )

    p = []
    for x in range(alice.inputs):
        row = []
        for y in range(bob.inputs):
            joint = np.array([
                [
                    np.real(np.trace(state @ np.kron(m, n)))
                    for n in bob.povms[y]
                ]
                for m in alice.povms[x]
            ])
            row.append(joint)
        p.append(row)

    return BehaviorTable(
        alice.inputs,
        bob.inputs,
        [alice.outcomes(x) for x in range(alice.inputs)],
        [bob.outcomes(y) for y in range(bob.inputs)],
        p,
    )

def correlator(table, x, y):
    '''correlator(table, x, y) -> sum_{a,b} (-1)^(a+b) p(a, b | x, y)

    Inputs are one-based; only defined for 2-outcome settings.
    '''
    if table.outA[x - 1] != 2 or table.outB[y - 1] != 2:
        raise ContractError(
            'Correlator needs 2-outcome settings, saw %s x %s outcomes for '
            '(%s, %s); merge the empty outcome first'
            % (table.outA[x - 1], table.outB[y - 1], x, y)
        )
    joint = table.joint(x - 1, y - 1)
    return float(joint[0, 0] + joint[1, 1] - joint[0, 1] - joint[1, 0])

def marginal_bias(table, x):
    '''marginal_bias(table, x) -> p(1|x) - p(2|x) for Alice'''
    if table.outA[x - 1] != 2:
        raise ContractError(
            'Bias needs a 2-outcome Alice input, saw %s' % table.outA[x - 1]
        )
    marginal = table.marginal_a(x - 1)
    return float(marginal[0] - marginal[1])
