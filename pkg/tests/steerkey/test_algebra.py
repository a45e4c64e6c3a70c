from steerkey import algebra
from steerkey.algebra import (
    IDENTITY,
    Algebra,
    Polynomial,
    Word,
    alice_projector,
    bob_projector,
    eve_operator,
    observable,
)
from steerkey.exceptions import ContractError
from tests.base import TestCaseBase
import itertools
import random

A1 = observable(1)
A2 = observable(2)
N11 = bob_projector(1, 1)
N21 = bob_projector(2, 1)
N12 = bob_projector(1, 2)
Z = eve_operator(1, 3)
Zs = eve_operator(1, 3, starred=True)

class SymbolTest(TestCaseBase):
    def test_str(self):
        assert str(A1) == 'A1'
        assert str(alice_projector(1, 2)) == 'M1|2'
        assert str(N12) == 'N1|2'
        assert str(Z) == 'Z1,3'
        assert str(Zs) == 'Z*1,3'

    def test_adjoint(self):
        assert Z.adjoint() == Zs
        assert Zs.adjoint() == Z
        assert A1.adjoint() == A1
        assert N11.adjoint() == N11

    def test_word_str(self):
        assert str(IDENTITY) == '1'
        assert str(Word((A1, A2, N12, Zs))) == 'A1 A2 | N1|2 | Z*1,3'

class CanonicalizeTest(TestCaseBase):
    def setUp(self):
        self.algebra = Algebra()

    def canonical(self, *symbols):
        return self.algebra.canonicalize(Word(symbols))

    def test_involution(self):
        assert self.canonical(A1, A1) == (1, IDENTITY)

    def test_anticommute(self):
        assert self.canonical(A2, A1) == (-1, Word((A1, A2)))
        assert self.canonical(A2, A1, A2) == (-1, Word((A1, )))

    def test_clifford_closure(self):
        words = set()
        for degree in range(7):
            for symbols in itertools.product((A1, A2), repeat=degree):
                sign, word = self.canonical(*symbols)
                assert sign in (1, -1)
                words.add(word)
        assert words == {
            IDENTITY, Word((A1, )), Word((A2, )), Word((A1, A2)),
        }

    def test_parties_commute(self):
        sign, word = self.canonical(Z, N11, A1)
        assert (sign, word) == (1, Word((A1, N11, Z)))

    def test_projectors(self):
        assert self.canonical(N11, N11) == (1, Word((N11, )))
        assert self.canonical(N11, N21) == (0, None)
        assert self.canonical(N11, N12, N11) == (1, Word((N11, N12, N11)))

    def test_eve_is_free(self):
        assert self.canonical(Z, Zs) == (1, Word((Z, Zs)))
        assert self.canonical(Z, Z) == (1, Word((Z, Z)))

    def test_foreign_symbol(self):
        with self.assertRaises(ContractError):
            self.canonical(alice_projector(1, 1))

    def test_kind(self):
        self.assertRaises(ContractError, Algebra, alice_kind='unitary')
        self.assertRaises(ContractError, Algebra, anticommuting=True,
            alice_kind='proj')

    def test_commuting_observables(self):
        algebra = Algebra(anticommuting=False)
        assert algebra.canonicalize(Word((A2, A1))) == (1, Word((A2, A1)))
        assert algebra.canonicalize(Word((A2, A1, A1, A2))) == (1, IDENTITY)

    def test_projective_alice(self):
        algebra = Algebra(anticommuting=False, alice_kind='proj')
        M11 = alice_projector(1, 1)
        assert algebra.canonicalize(Word((M11, M11))) == (1, Word((M11, )))

    def test_module_canonicalize(self):
        assert algebra.canonicalize(Word((A2, A1))) == (-1, Word((A1, A2)))
        M11 = alice_projector(1, 1)
        assert algebra.canonicalize(Word((M11, M11, N11))) \
            == (1, Word((M11, N11)))

    def test_adjoint_word(self):
        assert self.algebra.adjoint_word(Word((A1, A2))) \
            == (-1, Word((A1, A2)))
        assert self.algebra.adjoint_word(Word((N11, N12, Z))) \
            == (1, Word((N12, N11, Zs)))

class PolynomialTest(TestCaseBase):
    def setUp(self):
        self.algebra = Algebra()

    def test_arithmetic(self):
        a = Polynomial.word(Word((A1, )))
        poly = 0.5 + 0.5 * a
        assert poly.coefficient(IDENTITY) == 0.5
        assert poly.coefficient(Word((A1, ))) == 0.5
        assert (poly - poly).terms == {}
        assert -poly == poly * -1.0
        assert str(poly) == '0.5 1 + 0.5 A1'
        assert str(Polynomial()) == '0'

    def test_words_sorted(self):
        poly = Polynomial({Word((A1, A2)): 1.0, Word((A2, )): 2.0,
            IDENTITY: 3.0})
        assert poly.words() == [IDENTITY, Word((A2, )), Word((A1, A2))]

    def test_alice_povm(self):
        total = self.algebra.alice_povm(1, 1) + self.algebra.alice_povm(2, 1)
        assert total == Polynomial.constant(1.0)
        assert self.algebra.alice_observable(2) == Polynomial.word(Word((A2, )))
        self.assertRaises(ContractError, self.algebra.alice_povm, 3, 1)

    def test_projective_alice_povm(self):
        algebra = Algebra(anticommuting=False, alice_kind='proj')
        M11 = Word((alice_projector(1, 1), ))
        assert algebra.alice_povm(2, 1) \
            == Polynomial.constant(1.0) - Polynomial.word(M11)

    def test_bob_povm(self):
        empty = self.algebra.bob_povm(3, 1, 3)
        assert empty == Polynomial({
            IDENTITY: 1.0, Word((N11, )): -1.0, Word((N21, )): -1.0,
        })
        assert self.algebra.bob_observable(1) \
            == Polynomial({IDENTITY: -1.0, Word((N11, )): 2.0})
        self.assertRaises(ContractError, self.algebra.bob_povm, 4, 1, 3)
        self.assertRaises(ContractError, self.algebra.bob_observable, 1, 3)

    def test_clifford_square(self):
        a = Polynomial.word(Word((A1, ))) + Polynomial.word(Word((A2, )))
        assert self.algebra.multiply(a, a) == Polynomial.constant(2.0)

    def test_product(self):
        assert self.algebra.product(A2, A1) \
            == Polynomial.word(Word((A1, A2)), -1.0)
        assert self.algebra.product(N11, N21) == Polynomial()

    def test_adjoint(self):
        poly = self.algebra.eve(1, 3) + self.algebra.product(A1, A2)
        adjoint = self.algebra.adjoint(poly)
        assert adjoint == Polynomial({Word((Zs, )): 1.0, Word((A1, A2)): -1.0})

    def test_generators(self):
        assert self.algebra.alice_generators(2) == [A1, A2]
        assert self.algebra.bob_generators((3, 2)) == [N11, N21, N12]
        assert self.algebra.eve_generators(3) == [
            Z, Zs, eve_operator(2, 3), eve_operator(2, 3, starred=True),
        ]

SYMBOLS = (
    A1, A2, N11, N21, N12, bob_projector(2, 2),
    Z, Zs, eve_operator(2, 3), eve_operator(2, 3, starred=True),
)

class RandomWordsTest(TestCaseBase):
    def setUp(self):
        self.algebra = Algebra()
        self.rng = random.Random(17)

    def word(self, longest=6):
        length = self.rng.randint(0, longest)
        return Word(tuple(self.rng.choice(SYMBOLS) for _ in range(length)))

    def polynomial(self):
        terms = {}
        for _ in range(self.rng.randint(1, 4)):
            terms[self.word(4)] = float(self.rng.choice((-3, -2, -1, 1, 2, 3)))
        return self.algebra.canonical(Polynomial(terms))

    def test_canonicalize_idempotent(self):
        for _ in range(500):
            word = self.word()
            sign, canonical = self.algebra.canonicalize(word)
            if not sign:
                continue
            assert self.algebra.canonicalize(canonical) == (1, canonical), word
            assert len(canonical) <= len(word)

    def test_adjoint_involution(self):
        for _ in range(100):
            poly = self.polynomial()
            assert self.algebra.adjoint(self.algebra.adjoint(poly)) == poly

    def test_associative(self):
        multiply = self.algebra.multiply
        for _ in range(100):
            p, q, r = self.polynomial(), self.polynomial(), self.polynomial()
            assert multiply(multiply(p, q), r) == multiply(p, multiply(q, r))
