from steerkey import optimize
from steerkey.exceptions import ContractError, InvalidOptions
from tests.base import TestCaseBase
import math

class GoldenSectionTest(TestCaseBase):
    def test_interior(self):
        x, value = optimize.golden_section(lambda x: -(x - 0.3) ** 2, 0.0, 1.0,
            xtol=1e-10)
        self.assertClose(x, 0.3, tol=1e-6)
        self.assertClose(value, 0.0, tol=1e-12)

    def test_monotone(self):
        x, value = optimize.golden_section(lambda x: x, 0.0, 2.0)
        assert x == 2.0
        assert value == 2.0

        x, value = optimize.golden_section(lambda x: -x, -1.0, 1.0)
        assert x == -1.0

    def test_empty_interval(self):
        self.assertRaises(ContractError, optimize.golden_section,
            lambda x: x, 1.0, 0.0)

class OptimizerTest(TestCaseBase):
    def test_two_parameters(self):
        def func(params):
            return math.cos(params['x'] - 0.4) - (params['y'] + 0.2) ** 2

        result = optimize.Optimizer(restarts=2).maximize(
            func,
            {'x': 0.0, 'y': 0.0, 'fixed': 'kept'},
            {'x': (-math.pi, math.pi), 'y': (-1.0, 1.0)},
        )
        self.assertClose(result.params['x'], 0.4, tol=1e-5)
        self.assertClose(result.params['y'], -0.2, tol=1e-5)
        self.assertClose(result.value, 1.0, tol=1e-9)
        assert result.params['fixed'] == 'kept'
        assert len(result.seeds) == 1
        assert result.evaluations > 0

    def test_never_worse_than_start(self):
        def func(params):
            return -abs(params['x'])

        result = optimize.Optimizer(restarts=1, max_sweeps=1).maximize(
            func, {'x': 0.0}, {'x': (-1.0, 1.0)})
        assert result.value >= 0.0
        assert result.params['x'] == 0.0

    def test_reproducible(self):
        def func(params):
            return math.sin(5 * params['x']) + 0.1 * params['x']

        first = optimize.Optimizer(restarts=4, seed=3).maximize(
            func, {'x': 0.0}, {'x': (0.0, 3.0)})
        second = optimize.Optimizer(restarts=4, seed=3).maximize(
            func, {'x': 0.0}, {'x': (0.0, 3.0)})
        assert first == second

    def test_no_free_parameters(self):
        result = optimize.Optimizer().maximize(lambda params: 1.5,
            {'x': 0.2}, {})
        assert result.params == {'x': 0.2}
        assert result.value == 1.5

    def test_invalid_options(self):
        self.assertRaises(InvalidOptions, optimize.Optimizer, sweeps=3)
