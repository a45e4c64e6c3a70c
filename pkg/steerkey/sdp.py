'''
Semidefinite programs and the embedded interior-point solver.

Problems are stated block-wise: every block of the variable X is either a
dense symmetric matrix or a diagonal (a nonnegative vector).  Constraints and
the objective are symmetric matrices stored by their upper-triangle entries,
so that <A, X> = sum_i A_ii X_ii + 2 sum_{i<j} A_ij X_ij.

The solver works on the standard form

    minimize <C, X>  subject to  <A_k, X> = b_k,  X psd

obtained by moving inequalities onto a diagonal slack block and negating the
objective of maximization problems.  It is an infeasible-start primal-dual
path-following method using Nesterov-Todd scaling and Mehrotra's
predictor-corrector steps.
'''

from . import util
from .exceptions import CertificationError, ContractError
from collections import namedtuple
import logging
import math
import numpy as np
import scipy.linalg
import scipy.sparse

log = logging.getLogger(__name__)

OPTIMAL = 'optimal'
INFEASIBLE = 'infeasible'
NUMERICAL_LIMIT = 'numerical-limit'

SENSES = ('=', '<=', '>=')

Block = namedtuple('Block', ['kind', 'size'])
Constraint = namedtuple('Constraint', ['entries', 'sense', 'rhs', 'label'])

class SdpProblem(object):
    '''
    SdpProblem(blocks, sense='minimize', name=None, trace_bound=None,
        offset=0.0)

    blocks is a list of sizes: positive sizes are dense blocks, negative sizes
    diagonal blocks (the SDPA convention).  Entries are keyed (block, i, j)
    with zero-based indices and i <= j.  offset is a constant added to the
    objective; it is carried through solutions and certified bounds.
    '''
    def __init__(self, blocks, sense='minimize', name=None, trace_bound=None,
            offset=0.0):
        if sense not in ('minimize', 'maximize'):
            raise ContractError('sense must be minimize or maximize: %r' % sense)
        self.blocks = []
        for size in blocks:
            if size == 0:
                raise ContractError('Block size cannot be 0')
            kind = 'dense' if size > 0 else 'diag'
            self.blocks.append(Block(kind, abs(size)))
        self.constraints = []
        self.name = name
        self.objective = {}
        self.sense = sense
        self.trace_bound = trace_bound
        self.offset = float(offset)

    def __repr__(self):
        return 'SdpProblem(%s, %s constraints, %s)' % (
            [b.size if b.kind == 'dense' else -b.size for b in self.blocks],
            len(self.constraints),
            self.sense,
        )

    def _entries(self, entries):
        clean = {}
        for (block, i, j), value in entries.items():
            if block >= len(self.blocks):
                raise ContractError('No block %s' % block)
            kind, size = self.blocks[block]
            if i > j:
                i, j = j, i
            if not (0 <= i < size and 0 <= j < size):
                raise ContractError(
                    'Entry (%s, %s) outside block %s of size %s'
                    % (i, j, block, size)
                )
            if kind == 'diag' and i != j:
                raise ContractError('Diagonal block %s has no (%s, %s)'
                    % (block, i, j))
            key = (block, i, j)
            clean[key] = clean.get(key, 0.0) + float(value)
        return {key: value for key, value in clean.items() if value != 0.0}

    def add_constraint(self, entries, sense, rhs, label=None):
        '''add_constraint({(0, 0, 1): 0.5, ...}, '=', 1.0)

        Entries are matrix entries of the symmetric constraint matrix.
        '''
        if sense not in SENSES:
            raise ContractError('sense must be one of %s: %r' % (SENSES, sense))
        self.constraints.append(
            Constraint(self._entries(entries), sense, float(rhs), label)
        )
        return len(self.constraints) - 1

    def add_entry_constraint(self, coefficients, sense, rhs, label=None):
        '''add_entry_constraint({(0, 0, 1): 1.0}, '=', 0.3)

        Linear constraint on entries of X: sum coefficient * X_ij, each
        unordered (i, j) counted once.
        '''
        return self.add_constraint(
            self.entry_functional(coefficients), sense, rhs, label
        )

    def entry_functional(self, coefficients):
        '''entry_functional({(b, i, j): c}) -> matrix entries with <A, X> =
        sum c X_ij'''
        entries = {}
        for (block, i, j), value in coefficients.items():
            if i != j:
                value = value / 2.0
            key = (block, min(i, j), max(i, j))
            entries[key] = entries.get(key, 0.0) + value
        return entries

    def set_objective(self, entries):
        self.objective = self._entries(entries)

    def standard_form(self):
        '''standard_form() -> StandardForm'''
        return StandardForm(self)

def _symmetric(entries, block, size, kind):
    if kind == 'diag':
        vector = np.zeros(size)
        for (b, i, j), value in entries.items():
            if b == block:
                vector[i] += value
        return vector
    matrix = np.zeros((size, size))
    for (b, i, j), value in entries.items():
        if b == block:
            matrix[i, j] += value
            if i != j:
                matrix[j, i] += value
    return matrix

class StandardForm(object):
    '''
    StandardForm(problem)

    Equality-form data used by the solver: dense matrices C per block, sparse
    constraint rows per block (the flattened symmetric matrices) and b.
    Inequalities get one diagonal slack block appended at the end.
    '''
    def __init__(self, problem):
        self.problem = problem
        self.negated = problem.sense == 'maximize'
        self.blocks = list(problem.blocks)

        inequalities = [
            k for k, con in enumerate(problem.constraints) if con.sense != '='
        ]
        self.slack_block = None
        if inequalities:
            self.slack_block = len(self.blocks)
            self.blocks.append(Block('diag', len(inequalities)))
        self.slack_of = {k: s for s, k in enumerate(inequalities)}

        sign = -1.0 if self.negated else 1.0
        self.C = [
            sign * _symmetric(problem.objective, b, size, kind)
            for b, (kind, size) in enumerate(problem.blocks)
        ]
        if self.slack_block is not None:
            self.C.append(np.zeros(len(inequalities)))

        self.b = np.array([con.rhs for con in problem.constraints])
        self.m = len(problem.constraints)

        rows = [[] for _ in self.blocks]
        cols = [[] for _ in self.blocks]
        vals = [[] for _ in self.blocks]
        for k, con in enumerate(problem.constraints):
            for (b, i, j), value in con.entries.items():
                kind, size = self.blocks[b]
                if kind == 'diag':
                    rows[b].append(k)
                    cols[b].append(i)
                    vals[b].append(value)
                else:
                    rows[b].append(k)
                    cols[b].append(i * size + j)
                    vals[b].append(value)
                    if i != j:
                        rows[b].append(k)
                        cols[b].append(j * size + i)
                        vals[b].append(value)
            if k in self.slack_of:
                rows[self.slack_block].append(k)
                cols[self.slack_block].append(self.slack_of[k])
                vals[self.slack_block].append(1.0 if con.sense == '<=' else -1.0)

        self.A = []
        for b, (kind, size) in enumerate(self.blocks):
            width = size if kind == 'diag' else size * size
            self.A.append(scipy.sparse.csr_matrix(
                (vals[b], (rows[b], cols[b])), shape=(self.m, width)
            ))

    @property
    def dimension(self):
        return sum(size for _, size in self.blocks)

    def apply(self, X):
        '''apply(X) -> A(X)'''
        total = np.zeros(self.m)
        for A, block in zip(self.A, X):
            total += A @ block.ravel()
        return total

    def adjoint(self, y):
        '''adjoint(y) -> A*(y) per block'''
        result = []
        for A, (kind, size) in zip(self.A, self.blocks):
            value = A.T @ y
            result.append(value if kind == 'diag' else value.reshape(size, size))
        return result

def inner(X, Y):
    return float(sum(np.sum(x * y) for x, y in zip(X, Y)))

def norm(X):
    return math.sqrt(inner(X, X))

def min_eigenvalue(block, kind):
    if kind == 'diag':
        return float(block.min()) if block.size else 0.0
    return float(scipy.linalg.eigvalsh((block + block.T) / 2).min())

class SdpSolution(namedtuple('SdpSolution', [
        'status',
        'primal_value',
        'dual_value',
        'X',
        'y',
        'S',
        'iterations',
        'gap',
        'primal_residual',
        'dual_residual',
        'tolerance',
        'certificate',
        'problem',
    ])):
    '''
    SdpSolution(status, primal_value, dual_value, X, y, ...)

    Values refer to the problem as stated (not the standard form).  X holds
    the blocks of the problem followed by the slack block, if any; y is the
    dual vector of the stated problem.
    '''
    __slots__ = ()

    @property
    def optimal(self):
        return self.status == OPTIMAL

def _max_step(X, dX, kind, chol=None):
    if kind == 'diag':
        negative = dX < 0
        if not negative.any():
            return math.inf
        return float(np.min(-X[negative] / dX[negative]))
    if chol is None:
        chol = scipy.linalg.cholesky(X, lower=True)
    inv = scipy.linalg.solve_triangular(chol, dX, lower=True)
    inv = scipy.linalg.solve_triangular(chol, inv.T, lower=True)
    smallest = scipy.linalg.eigvalsh((inv + inv.T) / 2).min()
    if smallest >= 0:
        return math.inf
    return float(-1.0 / smallest)

class Solver(object):
    '''
    Solver(tolerance=1e-8, max_iter=200)

    Embedded primal-dual interior-point method.  Statuses: optimal (relative
    duality gap and both residuals within tolerance), infeasible (with a
    Farkas certificate in solution.certificate) or numerical-limit.
    '''
    defaults = {
        'chunk': 256,
        'infeasibility_tolerance': 1e-8,
        'max_iter': 200,
        'tolerance': 1e-8,
    }

    def __init__(self, **opts):
        self.opts = self.options(opts)

    def options(self, opts):
        return util.valid(util.defaults(opts, self.defaults), self.defaults)

    def solve(self, problem):
        '''solve(problem) -> SdpSolution'''
        form = problem.standard_form()
        tol = self.opts['tolerance']
        blocks = form.blocks
        C = form.C
        b = form.b
        m = form.m
        nu = form.dimension

        X, S = self.initial_point(form)
        y = np.zeros(m)

        norm_b = np.linalg.norm(b)
        norm_C = norm(C)
        status = NUMERICAL_LIMIT
        certificate = None
        stalls = 0
        iteration = 0
        pinf = dinf = gap = math.inf

        for iteration in range(self.opts['max_iter'] + 1):
            rp = b - form.apply(X)
            ATy = form.adjoint(y)
            Rd = [c - s - a for c, s, a in zip(C, S, ATy)]
            pobj = inner(C, X)
            dobj = float(b @ y)
            xs = inner(X, S)
            mu = xs / nu

            pinf = np.linalg.norm(rp) / (1.0 + norm_b)
            dinf = norm(Rd) / (1.0 + norm_C)
            gap = abs(pobj - dobj) / (1.0 + abs(pobj) + abs(dobj))

            log.debug(
                'iter %3d pobj %+.10e dobj %+.10e gap %.2e pinf %.2e dinf %.2e',
                iteration, pobj, dobj, gap, pinf, dinf
            )

            if pinf <= tol and dinf <= tol and gap <= tol:
                status = OPTIMAL
                break

            certificate = self.farkas(form, X, y, S, pobj, dobj)
            if certificate is not None:
                status = INFEASIBLE
                break

            if iteration == self.opts['max_iter']:
                break

            try:
                scaling = [
                    self.scaling(x, s, kind)
                    for x, s, (kind, _) in zip(X, S, blocks)
                ]
                schur = self.schur(form, scaling)
                factor = self.factor(schur)

                # predictor
                rc = [-x for x in X]
                dX, dy, dS = self.direction(form, scaling, factor, rp, Rd, rc)
                ap = self.step(X, dX, blocks, scaling, 'X')
                ad = self.step(S, dS, blocks, scaling, 'S')

                ap1 = min(1.0, ap)
                ad1 = min(1.0, ad)
                affine = inner(
                    [x + ap1 * d for x, d in zip(X, dX)],
                    [s + ad1 * d for s, d in zip(S, dS)],
                )
                sigma = min(1.0, max(0.0, affine / xs)) ** 3
                gamma = 0.9 + 0.09 * min(ap1, ad1)

                # corrector
                rc = self.corrector(
                    X, S, dX, dS, blocks, scaling, sigma * mu
                )
                dX, dy, dS = self.direction(form, scaling, factor, rp, Rd, rc)
                ap = min(1.0, gamma * self.step(X, dX, blocks, scaling, 'X'))
                ad = min(1.0, gamma * self.step(S, dS, blocks, scaling, 'S'))

            except (np.linalg.LinAlgError, ValueError) as exc:
                log.debug('iteration %s: numerical failure: %s', iteration, exc)
                break

            if ap < 1e-12 and ad < 1e-12:
                stalls += 1
                if stalls > 2:
                    break
            else:
                stalls = 0

            X = [self._sym(x + ap * d, kind) for x, d, (kind, _) in zip(X, dX, blocks)]
            y = y + ad * dy
            S = [self._sym(s + ad * d, kind) for s, d, (kind, _) in zip(S, dS, blocks)]

        return self.solution(
            form, status, X, y, S, iteration, gap, pinf, dinf, certificate
        )

    def _sym(self, block, kind):
        return block if kind == 'diag' else (block + block.T) / 2

    def initial_point(self, form):
        X = []
        S = []
        for b, (kind, size) in enumerate(form.blocks):
            A = form.A[b]
            row_norms = np.sqrt(np.asarray(A.multiply(A).sum(axis=1)).ravel())
            if form.m:
                xi = max(
                    10.0,
                    math.sqrt(size),
                    size * float(np.max((1.0 + np.abs(form.b)) / (1.0 + row_norms))),
                )
                eta = max(10.0, math.sqrt(size), float(row_norms.max()),
                    float(np.linalg.norm(form.C[b])))
            else:
                xi = eta = max(10.0, math.sqrt(size))
            if kind == 'diag':
                X.append(np.full(size, xi))
                S.append(np.full(size, eta))
            else:
                X.append(xi * np.eye(size))
                S.append(eta * np.eye(size))
        return X, S

    def scaling(self, x, s, kind):
        '''scaling(X, S) -> Nesterov-Todd scaling data of one block'''
        if kind == 'diag':
            return {'w': x / s, 'x': x, 's': s}
        chol_x = scipy.linalg.cholesky(x, lower=True)
        chol_s = scipy.linalg.cholesky(s, lower=True)
        inner_matrix = chol_x.T @ s @ chol_x
        lam, Q = scipy.linalg.eigh((inner_matrix + inner_matrix.T) / 2)
        if lam.min() <= 0:
            raise np.linalg.LinAlgError('X S lost positivity')
        G = chol_x @ Q * lam ** -0.25
        G_inv = (Q.T * lam[:, None] ** 0.25) @ scipy.linalg.solve_triangular(
            chol_x, np.eye(len(x)), lower=True
        )
        return {
            'G': G,
            'G_inv': G_inv,
            'W': G @ G.T,
            'd': np.sqrt(lam),
            'chol_x': chol_x,
            'chol_s': chol_s,
        }

    def schur(self, form, scaling):
        '''schur(form, scaling) -> M with M_ij = <A_i, W A_j W>'''
        m = form.m
        M = np.zeros((m, m))
        for b, (kind, size) in enumerate(form.blocks):
            A = form.A[b]
            if A.nnz == 0:
                continue
            if kind == 'diag':
                M += (A @ scipy.sparse.diags(scaling[b]['w']) @ A.T).toarray()
                continue

            W = scaling[b]['W']
            if size <= 40:
                scaled = np.asarray(A @ np.kron(W, W))
                M += np.asarray(A @ scaled.T).T
                continue

            A_csr = A.tocsr()
            chunk = self.opts['chunk']
            for start in range(0, m, chunk):
                stop = min(m, start + chunk)
                columns = np.zeros((stop - start, size * size))
                for k in range(start, stop):
                    row = A_csr.getrow(k)
                    if row.nnz == 0:
                        continue
                    r, s = np.divmod(row.indices, size)
                    columns[k - start] = (
                        (W[:, r] * row.data) @ W[s, :]
                    ).ravel()
                M[:, start:stop] += np.asarray(A @ columns.T)
        return (M + M.T) / 2

    def factor(self, M):
        try:
            return ('cholesky', scipy.linalg.cho_factor(M, lower=True))
        except np.linalg.LinAlgError:
            log.debug('Schur complement is not positive definite, using lstsq')
            return ('lstsq', M)

    def solve_schur(self, factor, rhs):
        kind, data = factor
        if kind == 'cholesky':
            return scipy.linalg.cho_solve(data, rhs)
        return scipy.linalg.lstsq(data, rhs)[0]

    def direction(self, form, scaling, factor, rp, Rd, rc):
        '''direction(...) -> (dX, dy, dS)

        rc is the right-hand side of dX + W dS W = rc, per block.
        '''
        Rc = rc
        WRdW = []
        for b, (kind, size) in enumerate(form.blocks):
            if kind == 'diag':
                WRdW.append(scaling[b]['w'] * Rd[b])
            else:
                W = scaling[b]['W']
                WRdW.append(W @ Rd[b] @ W)

        rhs = rp - form.apply([rc_b - w for rc_b, w in zip(Rc, WRdW)])
        dy = self.solve_schur(factor, rhs)
        ATdy = form.adjoint(dy)
        dS = [rd - a for rd, a in zip(Rd, ATdy)]
        dX = []
        for b, (kind, size) in enumerate(form.blocks):
            if kind == 'diag':
                dX.append(Rc[b] - scaling[b]['w'] * dS[b])
            else:
                W = scaling[b]['W']
                delta = Rc[b] - W @ dS[b] @ W
                dX.append((delta + delta.T) / 2)
        return dX, dy, dS

    def corrector(self, X, S, dX, dS, blocks, scaling, target):
        '''corrector(...) -> Rc per block for sigma mu I - D^2 - H(dX~ dS~)'''
        rc = []
        for b, (kind, size) in enumerate(blocks):
            if kind == 'diag':
                rc.append((target - X[b] * S[b] - dX[b] * dS[b]) / S[b])
                continue
            data = scaling[b]
            G = data['G']
            G_inv = data['G_inv']
            d = data['d']
            dx_scaled = G_inv @ dX[b] @ G_inv.T
            ds_scaled = G.T @ dS[b] @ G
            product = dx_scaled @ ds_scaled
            R = target * np.eye(size) - np.diag(d ** 2) \
                - (product + product.T) / 2
            R_hat = R * 2.0 / (d[:, None] + d[None, :])
            rc.append(G @ R_hat @ G.T)
        return rc

    def step(self, V, dV, blocks, scaling, which):
        alpha = math.inf
        for b, (kind, _) in enumerate(blocks):
            chol = None
            if kind == 'dense':
                chol = scaling[b]['chol_x' if which == 'X' else 'chol_s']
            alpha = min(alpha, _max_step(V[b], dV[b], kind, chol))
        return alpha

    def farkas(self, form, X, y, S, pobj, dobj):
        '''farkas(...) -> certificate or None

        Primal infeasibility shows as a dual ray (b'y > 0 with A*(y) + S
        small relative to it), dual infeasibility as a primal ray.
        '''
        eps = self.opts['infeasibility_tolerance']
        if dobj > 0:
            ATy = form.adjoint(y)
            ray = norm([a + s for a, s in zip(ATy, S)]) / dobj
            if ray < eps:
                return {'kind': 'primal', 'y': y / dobj}
        if pobj < 0:
            ray = np.linalg.norm(form.apply(X)) / -pobj
            if ray < eps:
                return {'kind': 'dual', 'X': [x / -pobj for x in X]}
        return None

    def solution(self, form, status, X, y, S, iterations, gap, pinf, dinf,
            certificate):
        sign = -1.0 if form.negated else 1.0
        offset = form.problem.offset
        primal = sign * inner(form.C, X) + offset
        y_out = sign * y
        dual = float(form.b @ y_out) + offset
        log.debug('solved %r: %s after %s iterations, primal %.10g dual %.10g',
            form.problem, status, iterations, primal, dual)
        return SdpSolution(
            status=status,
            primal_value=primal,
            dual_value=dual,
            X=X,
            y=y_out,
            S=S,
            iterations=iterations,
            gap=gap,
            primal_residual=pinf,
            dual_residual=dinf,
            tolerance=self.opts['tolerance'],
            certificate=certificate,
            problem=form.problem,
        )

def solve(problem, **opts):
    '''solve(problem) -> SdpSolution with the embedded solver'''
    return Solver(**opts).solve(problem)

def dual_residual(problem, y):
    '''dual_residual(problem, y) -> largest psd violation of C - A*(y)

    Checked in the standard form, slack block included.
    '''
    form = problem.standard_form()
    y_std = -np.asarray(y) if form.negated else np.asarray(y)
    Z = [c - a for c, a in zip(form.C, form.adjoint(y_std))]
    worst = 0.0
    for block, (kind, _) in zip(Z, form.blocks):
        worst = max(worst, -min_eigenvalue(block, kind))
    return worst

def primal_residual(problem, X):
    '''primal_residual(problem, X) -> (psd violation, ||A(X) - b||)'''
    form = problem.standard_form()
    if len(X) != len(form.blocks):
        raise ContractError(
            'Solution has %s blocks, problem needs %s'
            % (len(X), len(form.blocks))
        )
    worst = 0.0
    for block, (kind, _) in zip(X, form.blocks):
        worst = max(worst, -min_eigenvalue(np.asarray(block), kind))
    return worst, float(np.linalg.norm(form.apply(X) - form.b))

def certified_lower_bound(solution):
    '''certified_lower_bound(solution) -> float

    For minimization the dual value, after checking that the dual vector is
    feasible up to 10 times the tolerance; when the problem carries a trace
    bound the remaining violation is subtracted through it.  For maximization
    the primal value, after checking X psd to the same tolerance and A(X) = b
    to it relative to 1 + ||b||.  Both include the problem offset.  Raises
    CertificationError otherwise.
    '''
    if solution.status != OPTIMAL:
        raise CertificationError(
            'Cannot certify a solution with status %s' % solution.status
        )
    problem = solution.problem
    limit = 10.0 * solution.tolerance
    form = problem.standard_form()

    if problem.sense == 'minimize':
        residual = dual_residual(problem, solution.y)
        if residual > limit:
            raise CertificationError(
                'Dual vector violates feasibility by %.3g (limit %.3g)'
                % (residual, limit)
            )
        value = float(form.b @ solution.y)
        if problem.trace_bound is not None:
            value -= residual * problem.trace_bound
        return value + problem.offset

    psd, equality = primal_residual(problem, solution.X)
    scale = 1.0 + float(np.linalg.norm(form.b))
    if psd > limit or equality > limit * scale:
        raise CertificationError(
            'Primal matrix violates feasibility: psd %.3g, equality %.3g '
            '(limit %.3g)' % (psd, equality, limit)
        )
    return -inner(form.C, solution.X[:len(form.C)]) + problem.offset
