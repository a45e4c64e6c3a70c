from steerkey import entropy, model
from steerkey.exceptions import ContractError, DomainError
from tests.base import TestCaseBase
import math
import numpy as np

def f(z, x):
    return entropy.phi(z) - entropy.phi(math.sqrt(z * z + x * x))

class BinaryEntropyTest(TestCaseBase):
    def test_values(self):
        assert entropy.binary_entropy(0.5) == 1.0
        assert entropy.binary_entropy(0.0) == 0.0
        assert entropy.binary_entropy(1.0) == 0.0
        self.assertClose(entropy.binary_entropy(0.1), 0.4689955935892812,
            tol=1e-12)

    def test_symmetric(self):
        for p in (0.01, 0.2, 0.37):
            self.assertClose(entropy.binary_entropy(p),
                entropy.binary_entropy(1 - p), tol=1e-12)

    def test_domain(self):
        self.assertRaises(DomainError, entropy.binary_entropy, -0.1)
        self.assertRaises(DomainError, entropy.binary_entropy, 1.1)

    def test_phi(self):
        assert entropy.phi(0.0) == 1.0
        assert entropy.phi(1.0) == 0.0
        assert entropy.phi(-1.0) == 0.0
        assert entropy.phi(1.0 + 1e-12) == 0.0
        self.assertClose(entropy.phi(0.8), entropy.binary_entropy(0.9),
            tol=1e-12)
        self.assertRaises(DomainError, entropy.phi, 1.1)

    def test_phi_precision_near_one(self):
        x = 1.0 - 1e-12
        expected = entropy.binary_entropy(0.5e-12)
        self.assertClose(entropy.phi(x) / expected, 1.0, tol=1e-3)

class KeyEntropyTest(TestCaseBase):
    def test_ideal(self):
        self.assertClose(entropy.cond_entropy_key(self.make_table()), 0.0)

    def test_no_click_kept(self):
        table = self.make_table(eta=0.8, keep_empty=True)
        self.assertClose(entropy.cond_entropy_key(table), 0.2)

    def test_noisy_preprocessing(self):
        table = self.make_table()
        self.assertClose(entropy.cond_entropy_key(table, 0.1),
            entropy.binary_entropy(0.1))
        self.assertClose(entropy.cond_entropy_key(table, 0.5), 1.0)

    def test_domain(self):
        self.assertRaises(DomainError, entropy.cond_entropy_key,
            self.make_table(), 0.6)

    def test_alice_two_outcomes(self):
        table = model.BehaviorTable(1, 1, (3, ), (2, ),
            [[[[0.5, 0.0], [0.0, 0.5], [0.0, 0.0]]]])
        self.assertRaises(ContractError, entropy.cond_entropy_key, table)

class AnalyticBoundTest(TestCaseBase):
    def test_bound_simple(self):
        assert entropy.bound_simple(1.0) == 1.0
        self.assertClose(entropy.bound_simple(0.8), 0.531004406410719,
            tol=1e-9)
        self.assertRaises(DomainError, entropy.bound_simple, 1.2)

    def test_bound_bias_without_bias(self):
        for x in (0.0, 0.3, 0.8, 1.0):
            self.assertClose(entropy.bound_bias(0.0, x),
                entropy.bound_simple(x), tol=1e-12)

    def test_bound_bias_dominates(self):
        for z, x in ((0.5, 0.8), (0.3, 0.9), (0.1, 0.5), (0.6, 0.8)):
            assert entropy.bound_bias(z, x) >= entropy.bound_simple(x)

    def test_bound_bias_domain(self):
        self.assertRaises(DomainError, entropy.bound_bias, 0.8, 0.8)
        assert entropy.bound_bias(0.6, 0.8 + 1e-12) >= 0.0

    def test_closed_form_rate(self):
        self.assertClose(entropy.closed_form_rate(0.8, math.pi / 4),
            0.331004406410719, tol=1e-9)
        self.assertClose(entropy.closed_form_rate(1.0, math.pi / 4), 1.0,
            tol=1e-12)

    def test_closed_form_best_at_maximal_entanglement(self):
        for eta in (0.7, 0.8, 0.9, 1.0):
            best = entropy.closed_form_rate(eta, math.pi / 4)
            for theta in np.linspace(0.05, math.pi / 4, 40):
                assert entropy.closed_form_rate(eta, theta) <= best + 1e-12

    def test_closed_form_matches_pipeline(self):
        eta = 0.8
        merged = self.make_table(eta=eta)
        kept = self.make_table(eta=eta, keep_empty=True)
        rate = entropy.dw_rate(
            entropy.bound_simple(model.correlator(merged, 2, 2)),
            entropy.cond_entropy_key(kept),
        )
        self.assertClose(rate, entropy.closed_form_rate(eta, math.pi / 4))

    def test_simple_threshold(self):
        assert entropy.closed_form_rate(0.658, math.pi / 4) < 0
        assert entropy.closed_form_rate(0.660, math.pi / 4) > 0

class HessianTest(TestCaseBase):
    step = 1e-4

    def numeric(self, z, x):
        h = self.step
        d2z = (f(z + h, x) - 2 * f(z, x) + f(z - h, x)) / h ** 2
        d2x = (f(z, x + h) - 2 * f(z, x) + f(z, x - h)) / h ** 2
        dzx = (f(z + h, x + h) - f(z + h, x - h) - f(z - h, x + h)
            + f(z - h, x - h)) / (4 * h ** 2)
        return d2z, d2x, d2z * d2x - dzx ** 2

    def test_matches_finite_differences(self):
        for z, x in ((0.3, 0.5), (-0.2, 0.7), (0.5, -0.4)):
            self.assertClose(entropy.hessian_f(z, x), self.numeric(z, x),
                tol=1e-4)

    def test_convex_in_x(self):
        for z, x in ((0.3, 0.5), (0.1, 0.9)):
            d2z, d2x, det = entropy.hessian_f(z, x)
            assert d2x > 0
            assert det > 0

    def test_domain(self):
        self.assertRaises(DomainError, entropy.hessian_f, 0.6, 0.8)
        self.assertRaises(DomainError, entropy.hessian_f, 0.3, 0.0)

class ConvexityTest(TestCaseBase):
    def test_hessian_on_grid(self):
        grid = np.linspace(-0.995, 0.995, 100)
        for z in grid:
            for x in grid:
                if z * z + x * x > 0.99:
                    continue
                d2z, d2x, det = entropy.hessian_f(z, x)
                assert d2z >= -1e-10, (z, x, d2z)
                assert d2x >= -1e-10, (z, x, d2x)
                assert det >= -1e-10, (z, x, det)

    def test_bias_bound_midpoint_convex(self):
        rng = np.random.default_rng(5)

        def point():
            while True:
                z, x = rng.uniform(-1.0, 1.0, size=2)
                if z * z + x * x <= 0.99:
                    return z, x

        for _ in range(2000):
            (z1, x1), (z2, x2) = point(), point()
            middle = entropy.bound_bias((z1 + z2) / 2, (x1 + x2) / 2)
            mean = (entropy.bound_bias(z1, x1) + entropy.bound_bias(z2, x2)) / 2
            assert middle <= mean + 1e-12, (z1, x1, z2, x2)

def random_state(rng):
    G = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    rho = G @ G.conj().T
    return rho / np.trace(rho).real

def random_hermitian_unitary(rng):
    G = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    U, _ = np.linalg.qr(G)
    signs = np.diag(rng.choice([-1.0, 1.0], size=2))
    return U @ signs @ U.conj().T

class DomainCheckTest(TestCaseBase):
    def test_never_exceeds_one(self):
        rng = np.random.default_rng(3)
        for _ in range(10000):
            value = entropy.domain_check(random_state(rng),
                random_hermitian_unitary(rng))
            assert value <= 1.0 + 1e-9, value

    def test_reference_states(self):
        rng = np.random.default_rng(4)
        for _ in range(200):
            theta = rng.uniform(0.0, math.pi / 2)
            state = model.make_state(theta, rng.uniform())
            value = entropy.domain_check(state,
                model.ideal_qubit_observable(rng.uniform(-math.pi, math.pi)))
            assert value <= 1.0 + 1e-12

    def test_pure_state_saturates(self):
        theta = 0.3
        state = model.make_state(theta, 1.0)
        self.assertClose(entropy.domain_check(state, model.PAULI_X), 1.0)
