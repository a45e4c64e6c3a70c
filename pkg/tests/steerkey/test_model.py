from steerkey import model
from steerkey.exceptions import (
    ContractError,
    DegenerateRetention,
    DimensionMismatch,
    DomainError,
)
from tests.base import TestCaseBase
import math
import numpy as np
import random
import sympy

class StateTest(TestCaseBase):
    def test_maximally_entangled(self):
        rho = model.make_state(math.pi / 4, 1.0)
        self.assertClose(np.trace(rho), 1.0)
        self.assertClose(rho[0, 3], 0.5)
        self.assertClose(np.linalg.eigvalsh(rho), [0, 0, 0, 1], tol=1e-12)

    def test_white_noise(self):
        self.assertClose(model.make_state(0.3, 0.0), np.eye(4) / 4)

    def test_visibility_domain(self):
        self.assertRaises(DomainError, model.make_state, 0.3, 1.2)

    def test_theta_domain(self):
        self.assertRaises(DomainError, model.make_state, 4.0, 1.0)
        self.assertRaises(DomainError, model.make_state, -0.1, 1.0)
        self.assertClose(model.make_state(math.pi / 2, 1.0)[3, 3], 1.0)

class MeasurementTest(TestCaseBase):
    def test_projective(self):
        ideal = model.projective_measurements('B', (0.0, math.pi / 2))
        assert ideal.inputs == 2
        assert ideal.dimension == 2
        assert ideal.is_projective()
        ideal.check()
        self.assertClose(ideal.povms[0][0], [[1, 0], [0, 0]])
        self.assertClose(ideal.povms[1][0], [[0.5, 0.5], [0.5, 0.5]])

    def test_lossy_keep_empty(self):
        ideal = model.projective_measurements('B', (0.0, math.pi / 2))
        lossy = model.lossy_bob_povm(ideal, 0.8).check()
        assert lossy.outcomes(0) == 3
        self.assertClose(lossy.povms[0][model.EMPTY - 1], 0.2 * np.eye(2))
        assert not lossy.is_projective()

    def test_lossy_merged(self):
        ideal = model.projective_measurements('B', (0.0, math.pi / 2))
        merged = model.lossy_bob_povm(ideal, 0.8, keep_empty=False,
            merge_target=2).check()
        assert merged.outcomes(1) == 2
        self.assertClose(merged.povms[0][1], [[0.2, 0], [0, 1.0]])

    def test_lossy_needs_projective(self):
        ideal = model.projective_measurements('B', (0.0, ))
        lossy = model.lossy_bob_povm(ideal, 0.8)
        self.assertRaises(ContractError, model.lossy_bob_povm, lossy, 0.8)

    def test_lossy_domain(self):
        ideal = model.projective_measurements('B', (0.0, ))
        self.assertRaises(DomainError, model.lossy_bob_povm, ideal, 1.5)
        self.assertRaises(DomainError, model.lossy_bob_povm, ideal, 0.5,
            merge_target=3)

    def test_darkcount_bob(self):
        ideal = model.projective_measurements('B', (0.0, math.pi / 2))
        noisy = model.darkcount_bob_povm(ideal, 0.9, 1e-6).check()
        empty = 0.9e-6 + 0.1 * (1e-12 + (1 - 1e-6) ** 2)
        self.assertClose(noisy.povms[0][2], empty * np.eye(2), tol=1e-15)
        self.assertClose(empty, 0.1000007, tol=1e-9)

    def test_darkcount_bob_reduces_to_lossy(self):
        ideal = model.projective_measurements('B', (0.0, math.pi / 2))
        noisy = model.darkcount_bob_povm(ideal, 0.7, 0.0)
        lossy = model.lossy_bob_povm(ideal, 0.7)
        for x in range(2):
            for a in range(3):
                self.assertClose(noisy.povms[x][a], lossy.povms[x][a])

    def test_darkcount_alice(self):
        ideal = model.projective_measurements('A', (0.0, math.pi / 2))
        kept = model.darkcount_alice_povm(ideal, 0.9, 1e-6).check()
        assert kept.outcomes(0) == 2

    def test_darkcount_alice_degenerate(self):
        ideal = model.projective_measurements('A', (0.0, ))
        self.assertRaises(DegenerateRetention, model.darkcount_alice_povm,
            ideal, 0.0, 0.0)

    def test_check_rejects_bad_povm(self):
        bad = model.MeasurementSet('B', ((np.eye(2), np.eye(2)), ))
        self.assertRaises(ContractError, bad.check)
        negative = model.MeasurementSet('B', (
            (np.diag([1.5, 1.0]), np.diag([-0.5, 0.0])),
        ))
        self.assertRaises(ContractError, negative.check)

class RetentionTest(TestCaseBase):
    def test_value(self):
        self.assertClose(model.retention_probability(0.9, 1e-6), 0.8999993,
            tol=1e-10)

    def test_no_dark_counts(self):
        self.assertClose(model.retention_probability(0.6, 0.0), 0.6)

    def test_matches_click_statistics(self):
        eta, p = sympy.symbols('eta p', nonnegative=True)
        no_click = (1 - eta) * (1 - p) ** 2
        double_click = eta * p + (1 - eta) * p ** 2
        single_click = eta * (1 - p) + 2 * (1 - eta) * p * (1 - p)
        assert sympy.simplify(1 - no_click - double_click - single_click) == 0

        retained = 1 - no_click - double_click
        rng = random.Random(5)
        for _ in range(100):
            values = {eta: rng.random(), p: rng.random() * 1e-2}
            self.assertClose(
                model.retention_probability(values[eta], values[p]),
                float(retained.subs(values)),
                tol=1e-12
            )

    def test_fiber_efficiency(self):
        self.assertClose(model.fiber_efficiency(0.9, 0.2, 50.0), 0.09)
        assert model.fiber_efficiency(0.9, 0.2, 0.0) == 0.9
        self.assertRaises(DomainError, model.fiber_efficiency, 0.9, 0.2, -1.0)

class BehaviorTableTest(TestCaseBase):
    def test_ideal_correlators(self):
        table = self.make_table()
        self.assertClose(model.correlator(table, 1, 1), 1.0)
        self.assertClose(model.correlator(table, 2, 2), 1.0)
        self.assertClose(model.correlator(table, 1, 2), 0.0)
        self.assertClose(model.marginal_bias(table, 1), 0.0)

    def test_partial_entanglement(self):
        theta = math.pi / 8
        table = self.make_table(theta=theta, visibility=0.9)
        self.assertClose(model.marginal_bias(table, 1),
            0.9 * math.cos(2 * theta))
        self.assertClose(model.correlator(table, 2, 2),
            0.9 * math.sin(2 * theta))

    def test_lossy_correlator(self):
        self.assertClose(model.correlator(self.make_table(eta=0.8), 2, 2), 0.8)

    def test_merge_empty_matches_merged_povm(self):
        kept = self.make_table(eta=0.7, theta=0.5, keep_empty=True)
        for target in (1, 2):
            merged = self.make_table(eta=0.7, theta=0.5, merge_target=target)
            assert np.allclose(kept.merge_empty(target).p, merged.p)

    def test_merge_empty_errors(self):
        kept = self.make_table(eta=0.7, keep_empty=True)
        self.assertRaises(DomainError, kept.merge_empty, 3)
        merged = kept.merge_empty(1)
        self.assertRaises(ContractError, merged.merge_empty, 1, [1])

    def test_correlator_needs_two_outcomes(self):
        kept = self.make_table(eta=0.7, keep_empty=True)
        self.assertRaises(ContractError, model.correlator, kept, 2, 2)

    def test_nested_equality(self):
        table = self.make_table(eta=0.7, keep_empty=True)
        again = model.BehaviorTable(table.nX, table.nY, table.outA,
            table.outB, table.nested())
        assert again == table
        assert again != self.make_table(eta=0.6, keep_empty=True)

    def test_immutable(self):
        table = self.make_table()
        with self.assertRaises(ValueError):
            table.p[0, 0, 0, 0] = 1.0

    def test_normalization(self):
        p = [[[[0.5, 0.0], [0.0, 0.4]]]]
        self.assertRaises(ContractError, model.BehaviorTable, 1, 1, (2, ),
            (2, ), p)

    def test_signaling(self):
        p = [[
            [[0.5, 0.0], [0.0, 0.5]],
            [[0.9, 0.0], [0.1, 0.0]],
        ]]
        self.assertRaises(ContractError, model.BehaviorTable, 1, 2, (2, ),
            (2, 2), p)

    def test_shape(self):
        self.assertRaises(DimensionMismatch, model.BehaviorTable, 1, 1, (2, ),
            (3, ), [[[[0.5, 0.5], [0.0, 0.0]]]])
        self.assertRaises(DimensionMismatch, model.BehaviorTable, 2, 1, (2, ),
            (2, ), [[[[0.5, 0.5], [0.0, 0.0]]]])

    def test_negative_probability(self):
        self.assertRaises(ContractError, model.BehaviorTable, 1, 1, (2, ),
            (2, ), [[[[1.1, -0.1], [0.0, 0.0]]]])

    def test_behavior_dimension(self):
        alice = model.projective_measurements('A', (0.0, ))
        self.assertRaises(DimensionMismatch, model.behavior, np.eye(2) / 2,
            alice, alice)

class RandomNoiseTest(TestCaseBase):
    def random_setup(self, rng):
        eta_a = rng.uniform(0.05, 1.0)
        eta_b = rng.uniform(0.0, 1.0)
        p_dark = rng.uniform(0.0, 0.1)
        alice = model.darkcount_alice_povm(
            model.projective_measurements('A', rng.uniform(-math.pi, math.pi,
                size=2)),
            eta_a, p_dark,
        )
        bob = model.darkcount_bob_povm(
            model.projective_measurements('B', rng.uniform(-math.pi, math.pi,
                size=2)),
            eta_b, p_dark,
        )
        state = model.make_state(rng.uniform(0.0, math.pi / 2),
            rng.uniform(0.0, 1.0))
        return state, alice, bob

    def test_povms_and_behaviors(self):
        rng = np.random.default_rng(11)
        for _ in range(1000):
            state, alice, bob = self.random_setup(rng)
            for measurements in (alice, bob):
                measurements.check(tol=1e-12)
                for povm in measurements.povms:
                    for element in povm:
                        assert np.linalg.eigvalsh(element).min() >= -1e-12
                    self.assertClose(sum(povm), np.eye(2), tol=1e-12)

            table = model.behavior(state, alice, bob)
            for x in range(2):
                for y in range(2):
                    self.assertClose(table.joint(x, y).sum(), 1.0, tol=1e-12)
            for x in range(2):
                self.assertClose(table.joint(x, 0).sum(axis=1),
                    table.joint(x, 1).sum(axis=1), tol=1e-12)
            for y in range(2):
                self.assertClose(table.joint(0, y).sum(axis=0),
                    table.joint(1, y).sum(axis=0), tol=1e-12)
