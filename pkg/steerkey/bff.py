'''
Lower bounds on H(A|E) from a Gauss-Radau sequence of moment relaxations.

For every quadrature node t_i except the last, Eve gets two operators Z_a,i
(one per key outcome) and we minimize

    sum_a <M~_a (Z_a + Z_a* + (1 - t_i) Z_a* Z_a) + t_i Z_a Z_a*>

over all moment matrices compatible with the observed statistics, where M~_a
is Alice's key POVM after noisy preprocessing.  The certified minima O_i
combine into

    H(A|E) >= c_m + sum_{i<m} w_i / (t_i ln 2) * O_i.

Moment matrices are real: entries hold the real part of <u* v>, and words
whose adjoints are distinct share one variable.

Each node is solved through its moment variables.  The observed data fix
some of them, which are substituted away; the rest, z, parametrize the
moment matrix G(z) = F0 + sum_f z_f F_f.  With the inequalities
(<Z*Z> <= alpha, <ZZ*> <= alpha and the trace bound) written as
g(z) <= h, the node minimum is

    min c.z + c0  subject to  G(z) psd,  g(z) <= h

and the SDP handed to the solver is its dual

    max -<F0, X> - h.s + c0  subject to  <F_f, X> - (g^T s)_f = c_f,
                                         X psd, s >= 0

whose verified primal value is a lower bound on the node minimum.
'''

from . import quadrature, sdp
from .algebra import IDENTITY, Algebra, Polynomial, Word
from .exceptions import (
    AssemblyError,
    CertificationError,
    ContractError,
    DomainError,
    Infeasible,
)
from .model import correlator, marginal_bias
from collections import namedtuple
import itertools
import logging
import math
import numpy as np
import scipy.linalg

log = logging.getLogger(__name__)

LEVEL_TOKENS = ('AB', 'AZ', 'BZ', 'MZ', 'ABZ')

CorrelatorSummary = namedtuple('CorrelatorSummary', ['correlators', 'biases'])
CorrelatorSummary.__doc__ = '''
CorrelatorSummary({(x, y): <A_x B_y>}, {x: <A_x>})
'''

NodeResult = namedtuple('NodeResult',
    ['index', 't', 'weight', 'alpha', 'value', 'status', 'iterations'])

class BffResult(namedtuple('BffResult', ['value', 'raw', 'constant', 'nodes'])):
    '''
    BffResult(value, raw, constant, nodes)

    value is the bound clamped at 0; raw the unclamped sum.
    '''
    __slots__ = ()

class Scenario(object):
    '''
    Scenario(kind='1sdi', bob_inputs=2, bob_outcomes=2, mode='full')

    kind '1sdi' gives Alice anticommuting observables A_1, A_2; kind 'di'
    describes her by projectors with no assumption.  mode 'full' constrains
    every probability, mode 'correlators' only the listed correlators and
    Alice biases.
    '''
    defaults = {
        '1sdi': {'level': '2', 'key_bob_input': 1},
        'di': {'level': '2+ABZ', 'key_bob_input': 3},
    }

    def __init__(self,
        kind='1sdi',
        bob_inputs=None,
        bob_outcomes=2,
        mode='full',
        correlators=((2, 2), ),
        biases=(),
        level=None,
        key_input=1,
        key_bob_input=None,
    ):
        if kind not in self.defaults:
            raise ContractError('Unknown scenario kind: %r' % kind)
        if bob_outcomes not in (2, 3):
            raise ContractError('Bob has 2 or 3 outcomes: %r' % bob_outcomes)
        if mode not in ('full', 'correlators'):
            raise ContractError('Unknown constraint mode: %r' % mode)
        if bob_inputs is None:
            bob_inputs = 2 if kind == '1sdi' else 3
        if mode == 'correlators' and bob_outcomes != 2:
            raise ContractError('Correlators need 2-outcome Bob settings')

        self.kind = kind
        self.alice_inputs = 2
        self.bob_inputs = bob_inputs
        self.bob_outcomes = bob_outcomes
        self.mode = mode
        self.correlators = tuple(tuple(pair) for pair in correlators)
        self.biases = tuple(biases)
        self.level = level or self.defaults[kind]['level']
        self.key_input = key_input
        self.key_bob_input = key_bob_input or self.defaults[kind]['key_bob_input']
        parse_level(self.level)

    def __repr__(self):
        return 'Scenario(kind=%r, bob_inputs=%r, bob_outcomes=%r, mode=%r, ' \
            'level=%r)' % (self.kind, self.bob_inputs, self.bob_outcomes,
                self.mode, self.level)

    @property
    def outB(self):
        return (self.bob_outcomes, ) * self.bob_inputs

    def algebra(self):
        if self.kind == '1sdi':
            return Algebra(anticommuting=True, alice_kind='obs')
        return Algebra(anticommuting=False, alice_kind='proj')

    def data(self, table):
        '''data(table) -> what the constraints of this scenario consume'''
        if table is None or isinstance(table, CorrelatorSummary):
            return table
        if self.mode == 'full':
            return table
        return CorrelatorSummary(
            {pair: correlator(table, *pair) for pair in self.correlators},
            {x: marginal_bias(table, x) for x in self.biases},
        )

def parse_level(descriptor):
    '''parse_level('1+MZ') -> (1, ('MZ', ))'''
    parts = [part.strip() for part in str(descriptor).split('+')]
    try:
        level = int(parts[0])
    except ValueError:
        raise DomainError('Basis level must start with an integer: %r'
            % descriptor)
    if level < 1:
        raise DomainError('Basis level must be at least 1: %r' % descriptor)
    tokens = tuple(parts[1:])
    for token in tokens:
        if token not in LEVEL_TOKENS:
            raise DomainError('Unknown basis token %r in %r'
                % (token, descriptor))
    return level, tokens

class MomentBasis(object):
    '''
    MomentBasis(words, level)

    Ordered operator words indexing the moment matrix; the identity comes
    first.
    '''
    def __init__(self, words, level):
        words = sorted(set(words), key=lambda w: w.key)
        if IDENTITY in words:
            words.remove(IDENTITY)
        self.words = [IDENTITY] + words
        self.index = {word: i for i, word in enumerate(self.words)}
        self.level = level

    def __contains__(self, word):
        return word in self.index

    def __iter__(self):
        return iter(self.words)

    def __len__(self):
        return len(self.words)

    def __repr__(self):
        return 'MomentBasis(%r, %s words)' % (self.level, len(self.words))

def build_basis(scenario, node=1):
    '''build_basis(scenario, node) -> MomentBasis

    All canonical words of up to `level` generators, plus the products named
    by the level tokens: AB, AZ, BZ, ABZ (one generator of each named party)
    and MZ (the words of M_a|key Z_a).  Anticommuting Alice observables add
    their closure (A_1 A_2) at every level.
    '''
    level, tokens = parse_level(scenario.level)
    algebra = scenario.algebra()
    alice = algebra.alice_generators(scenario.alice_inputs)
    bob = algebra.bob_generators(scenario.outB)
    eve = algebra.eve_generators(node)
    generators = alice + bob + eve

    words = set()

    def add(symbols):
        sign, word = algebra.canonicalize(Word(symbols))
        if sign:
            words.add(word)

    for length in range(1, level + 1):
        for symbols in itertools.product(generators, repeat=length):
            add(symbols)

    if algebra.anticommuting:
        for length in range(2, len(alice) + 1):
            for symbols in itertools.permutations(alice, length):
                add(symbols)

    groups = {'A': alice, 'B': bob, 'Z': eve}
    for token in tokens:
        if token == 'MZ':
            for a in (1, 2):
                poly = algebra.multiply(
                    algebra.alice_povm(a, scenario.key_input),
                    algebra.eve(a, node),
                )
                words.update(poly.words())
            continue
        for symbols in itertools.product(*(groups[party] for party in token)):
            add(symbols)

    return MomentBasis(words, scenario.level)

def build_objective(scenario, t, q, node=1):
    '''build_objective(scenario, t, q) -> Polynomial

    sum_a M~_a (Z_a + Z_a* + (1 - t) Z_a* Z_a) + t Z_a Z_a*, with
    M~_1 = (1 - q) M_1 + q M_2 and M~_2 = (1 - q) M_2 + q M_1.
    '''
    if not (0.0 < t <= 1.0):
        raise DomainError('t must lie in (0, 1]: %r' % t)
    if not (0.0 <= q <= 0.5):
        raise DomainError('q must lie in [0, 1/2]: %r' % q)
    algebra = scenario.algebra()
    x = scenario.key_input

    objective = Polynomial()
    for a in (1, 2):
        povm = (1.0 - q) * algebra.alice_povm(a, x) \
            + q * algebra.alice_povm(3 - a, x)
        Z = algebra.eve(a, node)
        Zs = algebra.eve(a, node, starred=True)
        inner = Z + Zs + (1.0 - t) * algebra.multiply(Zs, Z)
        objective = objective + algebra.multiply(povm, inner) \
            + t * algebra.multiply(Z, Zs)
    return objective

class MomentMatrix(object):
    '''
    MomentMatrix(algebra, basis)

    Realified moment matrix layout: which real variable (a canonical word)
    each upper-triangle entry holds and with what sign, and which entries are
    identically zero.
    '''
    def __init__(self, algebra, basis):
        self.algebra = algebra
        self.basis = basis
        self.entries = {}
        self.zeros = []

        for i, u in enumerate(basis.words):
            sign_u, u_adj = algebra.adjoint_word(u)
            for j in range(i, len(basis)):
                v = basis.words[j]
                sign, word = algebra.canonicalize(Word(u_adj + v))
                sign *= sign_u
                if not sign:
                    self.zeros.append((i, j))
                    continue
                variable = self.variable(word)
                if variable is None:
                    self.zeros.append((i, j))
                    continue
                key, coefficient = variable
                self.entries.setdefault(key, []).append(
                    (i, j, sign * coefficient)
                )

    def variable(self, word):
        '''variable(word) -> (key word, coefficient) with Re<word> = c Re<key>

        None when the real part vanishes identically.
        '''
        sign, adjoint = self.algebra.adjoint_word(word)
        if adjoint == word:
            return None if sign < 0 else (word, 1.0)
        if word.key <= adjoint.key:
            return word, 1.0
        return adjoint, float(sign)

    def express(self, poly):
        '''express(poly) -> {key word: coefficient} of Re<poly>

        Raises AssemblyError for a word the moment matrix does not contain.
        '''
        result = {}
        for word, coefficient in poly.terms.items():
            variable = self.variable(word)
            if variable is None:
                continue
            key, c = variable
            if key not in self.entries:
                raise AssemblyError(
                    'Word %s is not expressible over the moment basis %r'
                    % (word, self.basis.level)
                )
            result[key] = result.get(key, 0.0) + c * coefficient
        return result

    def diagonal_bound(self, alpha):
        '''diagonal_bound(alpha) -> bound on the trace

        <w* w> <= ||w||^2 <= alpha^k for a word with k Eve operators, since
        the optimal Z_a satisfy Z_a* Z_a <= alpha.
        '''
        return float(sum(alpha ** word.eve_count() for word in self.basis))

def data_rows(scenario, algebra, moments, observed):
    '''data_rows(...) -> [(label, {key: c}, rhs)] for the observed data'''
    rows = []
    if observed is None:
        return rows

    if isinstance(observed, CorrelatorSummary):
        for (x, y), value in sorted(observed.correlators.items()):
            poly = algebra.multiply(
                algebra.alice_observable(x), algebra.bob_observable(y)
            )
            rows.append(('correlator:%s,%s' % (x, y), poly, value))
        for x, value in sorted(observed.biases.items()):
            rows.append(('bias:%s' % x, algebra.alice_observable(x), value))
    else:
        if observed.nX != scenario.alice_inputs \
                or observed.nY != scenario.bob_inputs \
                or observed.outB != scenario.outB:
            raise ContractError(
                '%r does not match %r' % (observed, scenario)
            )
        for x in range(1, observed.nX + 1):
            for y in range(1, observed.nY + 1):
                joint = observed.joint(x - 1, y - 1)
                for a in range(1, observed.outA[x - 1] + 1):
                    for b in range(1, observed.outB[y - 1] + 1):
                        poly = algebra.multiply(
                            algebra.alice_povm(a, x),
                            algebra.bob_povm(b, y, observed.outB[y - 1]),
                        )
                        rows.append((
                            'probability:%s,%s,%s,%s' % (x, y, a, b),
                            poly,
                            float(joint[a - 1, b - 1]),
                        ))

    expressed = []
    for label, poly, value in rows:
        coefficients = moments.express(poly)
        constant = coefficients.pop(IDENTITY, 0.0)
        expressed.append((label, coefficients, value - constant))
    return expressed

def independent_rows(rows, tol=1e-10, node=None):
    '''independent_rows(rows) -> rows with linearly dependent ones dropped

    Rank-revealing QR on the coefficient matrix.  Raises Infeasible when the
    dropped rows are inconsistent with the kept ones.
    '''
    for label, coefficients, rhs in rows:
        if not coefficients and abs(rhs) > 1e-8:
            raise Infeasible('Data row %s fixes a constant to %.3g'
                % (label, rhs), node=node)
    rows = [row for row in rows if row[1]]
    if not rows:
        return rows
    keys = sorted({key for _, coefficients, _ in rows for key in coefficients},
        key=lambda w: w.key)
    column = {key: n for n, key in enumerate(keys)}
    E = np.zeros((len(rows), len(keys)))
    r = np.zeros(len(rows))
    for n, (_, coefficients, rhs) in enumerate(rows):
        for key, c in coefficients.items():
            E[n, column[key]] = c
        r[n] = rhs

    _, R, pivots = scipy.linalg.qr(E.T, pivoting=True, mode='economic')
    diagonal = np.abs(np.diag(R))
    if not diagonal.size:
        return []
    rank = int(np.sum(diagonal > tol * max(1.0, diagonal[0])))
    kept = sorted(pivots[:rank])

    solution = np.linalg.lstsq(E[kept], r[kept], rcond=None)[0]
    residual = np.abs(E @ solution - r).max()
    if residual > 1e-8:
        raise Infeasible('Observed data are inconsistent (residual %.3g)'
            % residual, node=node)
    return [rows[n] for n in kept]

class Substitution(object):
    '''
    Substitution(keys, rows)

    Solves independent data rows for as many moment variables as there are
    rows (picked by column-pivoted QR), leaving every variable an affine
    function d + sum_f T_f z_f of the free ones.  The identity is 1.
    '''
    def __init__(self, keys, rows, tol=1e-13):
        column = {key: n for n, key in enumerate(keys)}
        pivots = []
        if rows:
            E = np.zeros((len(rows), len(keys)))
            e = np.array([rhs for _, _, rhs in rows], dtype=float)
            for n, (_, coefficients, _) in enumerate(rows):
                for key, c in coefficients.items():
                    E[n, column[key]] = c
            _, _, order = scipy.linalg.qr(E, pivoting=True, mode='economic')
            pivots = sorted(int(n) for n in order[:len(rows)])

        taken = set(pivots)
        self.free = [key for n, key in enumerate(keys) if n not in taken]
        self.dependent = [keys[n] for n in pivots]
        self.maps = {IDENTITY: (1.0, {})}
        for f, key in enumerate(self.free):
            self.maps[key] = (0.0, {f: 1.0})
        if not pivots:
            return

        factor = scipy.linalg.lu_factor(E[:, pivots])
        constants = scipy.linalg.lu_solve(factor, e)
        free_columns = [column[key] for key in self.free]
        if free_columns:
            D = scipy.linalg.lu_solve(factor, E[:, free_columns])
        else:
            D = np.zeros((len(pivots), 0))
        for p, n in enumerate(pivots):
            linear = {
                int(f): -float(D[p, f])
                for f in np.flatnonzero(np.abs(D[p]) > tol)
            }
            self.maps[keys[n]] = (float(constants[p]), linear)

    def __len__(self):
        return len(self.free)

    def affine(self, expressed):
        '''affine({key: c}) -> (constant, {free index: coefficient})'''
        constant = 0.0
        linear = {}
        for key, c in expressed.items():
            d, terms = self.maps[key]
            constant += c * d
            for f, t in terms.items():
                linear[f] = linear.get(f, 0.0) + c * t
        return constant, linear

    def values(self, z):
        '''values(z) -> {key: moment} for a point of the free variables'''
        z = np.asarray(z, dtype=float)
        return {
            key: d + sum(t * z[f] for f, t in terms.items())
            for key, (d, terms) in self.maps.items()
        }

class NodeInstance(object):
    '''
    NodeInstance(scenario, observed, t, q, node=1)

    The SDP of one quadrature node, with the provenance of its parts.
    '''
    def __init__(self, scenario, observed, t, q=0.0, node=1):
        self.scenario = scenario
        self.node = node
        self.t = t
        self.q = q
        self.alpha = quadrature.alpha_bound(t)
        self.algebra = scenario.algebra()
        self.basis = build_basis(scenario, node)
        self.moments = MomentMatrix(self.algebra, self.basis)
        self.objective = build_objective(scenario, t, q, node)
        self.problem = self.assemble(scenario.data(observed))

    def assemble(self, observed):
        moments = self.moments
        algebra = self.algebra
        n = len(self.basis)

        self.rows = independent_rows(
            data_rows(self.scenario, algebra, moments, observed),
            node=self.node,
        )
        keys = sorted((key for key in moments.entries if key != IDENTITY),
            key=lambda w: w.key)
        substitution = self.substitution = Substitution(keys, self.rows)

        # G(z) = F0 + sum_f z_f F_f by upper-triangle entries
        F0 = {}
        F = [dict() for _ in substitution.free]
        trace = {}
        for key, entries in moments.entries.items():
            d, linear = substitution.maps[key]
            for i, j, c in entries:
                if i == j:
                    trace[key] = trace.get(key, 0.0) + c
                if d:
                    F0[(0, i, j)] = F0.get((0, i, j), 0.0) + c * d
                for f, t in linear.items():
                    F[f][(0, i, j)] = F[f].get((0, i, j), 0.0) + c * t

        bounds = [('trace', trace, moments.diagonal_bound(self.alpha))]
        for a in (1, 2):
            Z = algebra.eve(a, self.node)
            Zs = algebra.eve(a, self.node, starred=True)
            for name, poly in (
                ('Z*Z', algebra.multiply(Zs, Z)),
                ('ZZ*', algebra.multiply(Z, Zs)),
            ):
                bounds.append(('alpha:%s a=%s' % (name, a),
                    moments.express(poly), self.alpha))

        inequalities = []
        for label, expressed, bound in bounds:
            constant, linear = substitution.affine(expressed)
            if linear:
                inequalities.append((label, linear, bound - constant))
            elif constant > bound + 1e-9:
                raise Infeasible('The data violate %s at node %s'
                    % (label, self.node), node=self.node)

        offset, costs = substitution.affine(moments.express(self.objective))
        blocks = [n]
        if inequalities:
            blocks.append(-len(inequalities))
        problem = sdp.SdpProblem(
            blocks,
            sense='maximize',
            name='node-%s' % self.node,
            offset=offset,
        )

        labels = []
        for f, key in enumerate(substitution.free):
            entries = dict(F[f])
            for r, (_, linear, _) in enumerate(inequalities):
                if f in linear:
                    entries[(1, r, r)] = -linear[f]
            label = 'moment:%s' % (key, )
            problem.add_constraint(entries, '=', costs.get(f, 0.0), label)
            labels.append(label)

        objective = {key: -value for key, value in F0.items()}
        for r, (_, _, rhs) in enumerate(inequalities):
            objective[(1, r, r)] = -rhs
        problem.set_objective(objective)

        self.labels = labels
        self.inequalities = [label for label, _, _ in inequalities]
        return problem

    def moment_values(self, solution):
        '''moment_values(solution) -> {word: moment} at the solution

        The moment point is the dual vector of the solved problem.
        '''
        return self.substitution.values(solution.y)

    def provenance(self):
        '''provenance() -> JSON-ready description of the instance'''
        return {
            'node': self.node,
            't': self.t,
            'q': self.q,
            'alpha': self.alpha,
            'level': self.basis.level,
            'basis': [str(word) for word in self.basis],
            'variables': {
                str(key): [[i, j, c] for i, j, c in entries]
                for key, entries in sorted(self.moments.entries.items(),
                    key=lambda item: item[0].key)
            },
            'zeros': [list(pair) for pair in self.moments.zeros],
            'data': [label for label, _, _ in self.rows],
            'substituted': [str(key) for key in self.substitution.dependent],
            'constraints': list(self.labels),
            'inequalities': list(self.inequalities),
            'offset': self.problem.offset,
            'objective': str(self.objective),
        }

def assemble_node_sdp(scenario, observed, t, q=0.0, node=1):
    '''assemble_node_sdp(scenario, observed, t, q) -> SdpProblem'''
    return NodeInstance(scenario, observed, t, q, node).problem

def solve_node(instance, solver=None, index=None):
    '''solve_node(instance) -> (certified value, SdpSolution)'''
    solver = solver or sdp.Solver()
    solution = solver.solve(instance.problem)
    if solution.status == sdp.INFEASIBLE:
        raise Infeasible(
            'Node %s (t=%.6g) is infeasible' % (index or instance.node,
                instance.t),
            node=index or instance.node,
            certificate=solution.certificate,
        )
    if solution.status != sdp.OPTIMAL:
        raise CertificationError(
            'Node %s (t=%.6g) ended with status %s'
            % (index or instance.node, instance.t, solution.status)
        )
    return sdp.certified_lower_bound(solution), solution

def entropy_bound(scenario, observed, rule=None, q=0.0, solver=None,
        executor=None):
    '''entropy_bound(scenario, observed, rule, q) -> BffResult

    Certified lower bound on H(A|E) in bits.  Nodes are independent and may
    be solved through an executor.
    '''
    rule = rule or quadrature.gauss_radau(8)
    solver = solver or sdp.Solver()
    constant = quadrature.entropy_constant(rule)

    def run(i):
        t = rule.nodes[i]
        instance = NodeInstance(scenario, observed, t, q, node=i + 1)
        value, solution = solve_node(instance, solver, index=i + 1)
        log.debug('node %s t=%.6f w=%.6f: %.10f (%s iterations)',
            i + 1, t, rule.weights[i], value, solution.iterations)
        return NodeResult(i + 1, t, rule.weights[i], instance.alpha, value,
            solution.status, solution.iterations)

    indices = range(rule.m - 1)
    if executor is None:
        nodes = [run(i) for i in indices]
    else:
        nodes = list(executor.map(run, indices))

    raw = constant + sum(
        node.weight / (node.t * math.log(2)) * node.value for node in nodes
    )
    return BffResult(max(0.0, raw), raw, constant, tuple(nodes))
