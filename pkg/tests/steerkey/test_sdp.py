from scipy.optimize import minimize_scalar
from steerkey import sdp
from steerkey.exceptions import CertificationError, ContractError, \
    InvalidOptions
from tests.base import TestCaseBase
import numpy as np

def matrix_entries(matrix, block=0):
    n = matrix.shape[0]
    return {
        (block, i, j): float(matrix[i, j])
        for i in range(n)
        for j in range(i, n)
        if matrix[i, j] != 0.0
    }

def y_example():
    '''maximize <-I, X> subject to 2 X_01 = 1'''
    problem = sdp.SdpProblem([2], sense='maximize', name='y-example')
    problem.set_objective({(0, 0, 0): -1.0, (0, 1, 1): -1.0})
    problem.add_constraint({(0, 0, 1): 1.0}, '=', 1.0)
    return problem

def eigenvalue_problem(diagonal=(1.0, 2.0), sense='minimize'):
    problem = sdp.SdpProblem([len(diagonal)], sense=sense)
    problem.set_objective({(0, i, i): d for i, d in enumerate(diagonal)})
    problem.add_constraint(
        {(0, i, i): 1.0 for i in range(len(diagonal))}, '=', 1.0
    )
    return problem

def random_instance(rng, n):
    C = rng.normal(size=(n, n))
    C = (C + C.T) / 2
    A = rng.normal(size=(n, n))
    A = (A + A.T) / 2
    X0 = rng.normal(size=(n, n))
    X0 = X0 @ X0.T + 0.1 * np.eye(n)
    X0 /= np.trace(X0)
    beta = float(np.sum(A * X0))

    problem = sdp.SdpProblem([n])
    problem.set_objective(matrix_entries(C))
    problem.add_constraint(matrix_entries(np.eye(n)), '=', 1.0)
    problem.add_constraint(matrix_entries(A), '=', beta)
    return problem, C, A, beta

def oracle(C, A, beta):
    '''max over y2 of lambda_min(C - y2 A) + beta y2'''
    eig_a = np.linalg.eigvalsh(A)
    eig_c = np.linalg.eigvalsh(C)
    gap = min(beta - eig_a[0], eig_a[-1] - beta)
    radius = (eig_c[-1] - eig_c[0]) / gap + 1.0
    result = minimize_scalar(
        lambda y2: -(np.linalg.eigvalsh(C - y2 * A)[0] + beta * y2),
        bounds=(-radius, radius),
        method='bounded',
        options={'xatol': 1e-10},
    )
    return -result.fun

class SdpProblemTest(TestCaseBase):
    def test_invalid(self):
        self.assertRaises(ContractError, sdp.SdpProblem, [0])
        self.assertRaises(ContractError, sdp.SdpProblem, [2], 'optimize')
        problem = sdp.SdpProblem([2, -3])
        self.assertRaises(ContractError, problem.add_constraint,
            {(0, 0, 2): 1.0}, '=', 1.0)
        self.assertRaises(ContractError, problem.add_constraint,
            {(1, 0, 1): 1.0}, '=', 1.0)
        self.assertRaises(ContractError, problem.add_constraint,
            {(2, 0, 0): 1.0}, '=', 1.0)
        self.assertRaises(ContractError, problem.add_constraint,
            {(0, 0, 0): 1.0}, '==', 1.0)

    def test_lower_triangle_folded(self):
        problem = sdp.SdpProblem([3])
        problem.add_constraint({(0, 2, 1): 1.0, (0, 1, 2): 1.0}, '=', 0.0)
        assert problem.constraints[0].entries == {(0, 1, 2): 2.0}

    def test_entry_functional(self):
        problem = sdp.SdpProblem([2])
        problem.add_entry_constraint({(0, 0, 1): 1.0, (0, 1, 1): 2.0}, '=',
            0.3, 'data')
        con = problem.constraints[0]
        assert con.entries == {(0, 0, 1): 0.5, (0, 1, 1): 2.0}
        assert con.label == 'data'

class StandardFormTest(TestCaseBase):
    def test_slack_block(self):
        problem = sdp.SdpProblem([2])
        problem.add_constraint({(0, 0, 0): 1.0}, '=', 1.0)
        problem.add_constraint({(0, 1, 1): 1.0}, '<=', 2.0)
        problem.add_constraint({(0, 0, 1): 1.0}, '>=', -1.0)
        form = problem.standard_form()
        assert form.slack_block == 1
        assert form.blocks[1] == sdp.Block('diag', 2)
        assert form.slack_of == {1: 0, 2: 1}
        self.assertClose(form.A[1].toarray(), [[0, 0], [1, 0], [0, -1]])

    def test_maximize_negates(self):
        form = eigenvalue_problem(sense='maximize').standard_form()
        self.assertClose(form.C[0], np.diag([-1.0, -2.0]))

    def test_adjoint(self):
        rng = np.random.default_rng(1)
        problem, _, _, _ = random_instance(rng, 4)
        problem.add_constraint({(0, 0, 3): 1.0}, '<=', 0.5)
        form = problem.standard_form()
        X = rng.normal(size=(4, 4))
        X = [(X + X.T) / 2, rng.uniform(size=1)]
        y = rng.normal(size=form.m)
        self.assertClose(form.apply(X) @ y, sdp.inner(X, form.adjoint(y)),
            tol=1e-10)

class SolverTest(TestCaseBase):
    def test_smallest_eigenvalue(self):
        solution = sdp.solve(eigenvalue_problem())
        assert solution.status == sdp.OPTIMAL
        self.assertClose(solution.primal_value, 1.0, tol=1e-7)
        self.assertClose(solution.dual_value, 1.0, tol=1e-7)
        self.assertClose(solution.y, [1.0], tol=1e-6)

    def test_largest_eigenvalue(self):
        solution = sdp.solve(eigenvalue_problem(sense='maximize'))
        assert solution.optimal
        self.assertClose(solution.primal_value, 2.0, tol=1e-7)

    def test_y_example(self):
        solution = sdp.solve(y_example())
        assert solution.status == sdp.OPTIMAL
        self.assertClose(solution.primal_value, -1.0, tol=1e-7)
        self.assertClose(solution.y, [-1.0], tol=1e-6)
        self.assertClose(solution.X[0], [[0.5, 0.5], [0.5, 0.5]], tol=1e-5)

    def test_inequality(self):
        # min X_00 + 2 X_11 with tr X = 1 and X_00 <= 0.25
        problem = eigenvalue_problem()
        problem.add_constraint({(0, 0, 0): 1.0}, '<=', 0.25)
        solution = sdp.solve(problem)
        assert solution.optimal
        self.assertClose(solution.primal_value, 1.75, tol=1e-6)

    def test_random_instances_match_oracle(self):
        rng = np.random.default_rng(7)
        for _ in range(50):
            n = int(rng.integers(2, 7))
            problem, C, A, beta = random_instance(rng, n)
            solution = sdp.solve(problem)
            assert solution.status == sdp.OPTIMAL
            self.assertClose(solution.dual_value, oracle(C, A, beta), tol=1e-5)
            assert solution.dual_value <= solution.primal_value + 1e-7

    def test_random_instance_returned_matrix(self):
        rng = np.random.default_rng(11)
        problem, C, A, beta = random_instance(rng, 10)
        solution = sdp.solve(problem)
        assert solution.optimal
        X = solution.X[0]
        assert np.linalg.eigvalsh(X).min() > -1e-7
        self.assertClose(np.trace(X), 1.0, tol=1e-7)
        self.assertClose(np.sum(A * X), beta, tol=1e-7)
        assert solution.dual_value <= solution.primal_value + 1e-7

    def test_infeasible(self):
        # tr X = -1 has no psd solution
        problem = sdp.SdpProblem([2])
        problem.set_objective({(0, 0, 0): 1.0, (0, 1, 1): 1.0})
        problem.add_constraint({(0, 0, 0): 1.0, (0, 1, 1): 1.0}, '=', -1.0)
        solution = sdp.solve(problem)
        assert solution.status in (sdp.INFEASIBLE, sdp.NUMERICAL_LIMIT)
        self.assertRaises(CertificationError, sdp.certified_lower_bound,
            solution)

    def test_iteration_cap(self):
        solution = sdp.solve(y_example(), max_iter=1)
        assert solution.status == sdp.NUMERICAL_LIMIT
        assert solution.iterations == 1

    def test_invalid_option(self):
        self.assertRaises(InvalidOptions, sdp.Solver, tol=1e-3)

class CertifiedBoundTest(TestCaseBase):
    def test_minimization(self):
        solution = sdp.solve(eigenvalue_problem())
        bound = sdp.certified_lower_bound(solution)
        assert bound <= 1.0 + 1e-9
        self.assertClose(bound, 1.0, tol=1e-7)

    def test_y_example(self):
        bound = sdp.certified_lower_bound(sdp.solve(y_example()))
        self.assertClose(bound, -1.0, tol=1e-7)

    def test_perturbed_multipliers(self):
        solution = sdp.solve(eigenvalue_problem())
        sdp.certified_lower_bound(solution)
        self.assertRaises(CertificationError, sdp.certified_lower_bound,
            solution._replace(y=np.array([1.5])))

    def test_trace_bound(self):
        problem = eigenvalue_problem()
        problem.trace_bound = 1.0
        solution = sdp.solve(problem)
        residual = sdp.dual_residual(problem, solution.y)
        self.assertClose(sdp.certified_lower_bound(solution),
            solution.dual_value - residual, tol=1e-12)

    def test_dual_residual(self):
        problem = eigenvalue_problem()
        assert sdp.dual_residual(problem, [1.0]) == 0.0
        self.assertClose(sdp.dual_residual(problem, [1.5]), 0.5)

    def test_primal_residual(self):
        problem = eigenvalue_problem()
        psd, equality = sdp.primal_residual(problem, [np.diag([1.0, 0.0])])
        assert (psd, equality) == (0.0, 0.0)
        self.assertRaises(ContractError, sdp.primal_residual, problem, [])

    def test_offset(self):
        problem = eigenvalue_problem()
        problem.offset = 0.5
        solution = sdp.solve(problem)
        self.assertClose(solution.primal_value, 1.5, tol=1e-7)
        self.assertClose(solution.dual_value, 1.5, tol=1e-7)
        self.assertClose(sdp.certified_lower_bound(solution), 1.5, tol=1e-7)

    def test_offset_maximization(self):
        problem = y_example()
        problem.offset = -0.25
        solution = sdp.solve(problem)
        self.assertClose(sdp.certified_lower_bound(solution), -1.25, tol=1e-7)

    def test_infeasible_primal_matrix(self):
        solution = sdp.solve(y_example())
        X = [block.copy() for block in solution.X]
        X[0][0, 1] = X[0][1, 0] = 0.75
        self.assertRaises(CertificationError, sdp.certified_lower_bound,
            solution._replace(X=X))
