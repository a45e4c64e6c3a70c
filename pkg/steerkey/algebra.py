'''
Noncommutative polynomials over the operators of Alice, Bob and Eve.

Words are kept in a canonical form: Alice's symbols first, then Bob's, then
Eve's (operators of different parties commute; Eve commutes with both
devices).  Within a party the algebra's rules apply:

- Alice observables square to the identity and, when the algebra is
  anticommuting, pairwise anticommute, so every Alice word reduces to a sign
  times a product sorted by input.
- Alice and Bob projectors are idempotent and orthogonal within an input.
- Eve's operators are free.

Canonicalizing a word yields a sign and a canonical word, or zero.
'''

from .exceptions import ContractError
from collections import namedtuple

PARTY_RANK = {'A': 0, 'B': 1, 'E': 2}

class Symbol(namedtuple('Symbol',
        ['party', 'kind', 'input', 'outcome', 'node', 'starred'])):
    '''
    Symbol(party, kind, input, outcome, node, starred)

    kind is 'obs' (an Alice observable A_x), 'proj' (a projector M_a|x or
    N_b|y) or 'free' (Eve's Z_a,i and its adjoint when starred).  Unused
    fields are 0 / False.
    '''
    __slots__ = ()

    def __str__(self):
        if self.kind == 'obs':
            return 'A%d' % self.input
        if self.kind == 'proj':
            letter = 'M' if self.party == 'A' else 'N'
            return '%s%d|%d' % (letter, self.outcome, self.input)
        return 'Z%s%d,%d' % ('*' if self.starred else '', self.outcome, self.node)

    @property
    def key(self):
        return (
            PARTY_RANK[self.party],
            self.input,
            self.outcome,
            self.node,
            self.starred,
        )

    def adjoint(self):
        if self.kind == 'free':
            return self._replace(starred=not self.starred)
        return self

def observable(x):
    return Symbol('A', 'obs', x, 0, 0, False)

def alice_projector(a, x):
    return Symbol('A', 'proj', x, a, 0, False)

def bob_projector(b, y):
    return Symbol('B', 'proj', y, b, 0, False)

def eve_operator(a, node, starred=False):
    return Symbol('E', 'free', 0, a, node, starred)

class Word(tuple):
    '''
    Word((symbol, ...))

    An operator product.  The empty word is the identity.
    '''
    def __str__(self):
        if not self:
            return '1'
        blocks = []
        for party in ('A', 'B', 'E'):
            block = [str(sym) for sym in self if sym.party == party]
            if block:
                blocks.append(' '.join(block))
        return ' | '.join(blocks)

    def __repr__(self):
        return 'Word(%s)' % str(self)

    @property
    def key(self):
        return (len(self), tuple(sym.key for sym in self))

    def party(self, party):
        return tuple(sym for sym in self if sym.party == party)

    def eve_count(self):
        return len(self.party('E'))

IDENTITY = Word()

class Polynomial(object):
    '''
    Polynomial({word: coefficient})

    Real linear combination of canonical words.  Multiplication by another
    polynomial needs the algebra's rules: use Algebra.multiply().
    '''
    def __init__(self, terms=None):
        self.terms = {}
        for word, coefficient in (terms or {}).items():
            if coefficient != 0.0:
                self.terms[Word(word)] = self.terms.get(Word(word), 0.0) \
                    + float(coefficient)
        self.terms = {
            word: coefficient
            for word, coefficient in self.terms.items()
            if coefficient != 0.0
        }

    @classmethod
    def constant(cls, value):
        return cls({IDENTITY: value})

    @classmethod
    def word(cls, word, coefficient=1.0):
        return cls({word: coefficient})

    def __add__(self, other):
        if not isinstance(other, Polynomial):
            other = Polynomial.constant(other)
        terms = dict(self.terms)
        for word, coefficient in other.terms.items():
            terms[word] = terms.get(word, 0.0) + coefficient
        return Polynomial(terms)

    __radd__ = __add__

    def __eq__(self, other):
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.terms == other.terms

    def __iter__(self):
        return iter(sorted(self.terms.items(), key=lambda item: item[0].key))

    def __len__(self):
        return len(self.terms)

    def __mul__(self, scalar):
        return Polynomial({
            word: scalar * coefficient
            for word, coefficient in self.terms.items()
        })

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0

    def __repr__(self):
        return 'Polynomial(%s)' % str(self)

    def __str__(self):
        if not self.terms:
            return '0'
        return ' + '.join('%g %s' % (c, word) for word, c in self)

    def __sub__(self, other):
        return self + (-other if isinstance(other, Polynomial) else -other)

    def coefficient(self, word):
        return self.terms.get(Word(word), 0.0)

    def words(self):
        return [word for word, _ in self]

class Algebra(object):
    '''
    Algebra(anticommuting=True)

    The rewriting rules of one scenario.  In the one-sided device-independent
    scenario Alice measures the anticommuting observables A_1, A_2; in the
    device-independent comparison Alice's devices are untrusted and she is
    described by projectors with no relation between inputs.
    '''
    def __init__(self, anticommuting=True, alice_kind='obs'):
        if alice_kind not in ('obs', 'proj'):
            raise ContractError('alice_kind must be obs or proj: %r' % alice_kind)
        if anticommuting and alice_kind != 'obs':
            raise ContractError('Only observables can anticommute')
        self.anticommuting = anticommuting
        self.alice_kind = alice_kind

    def __repr__(self):
        return 'Algebra(anticommuting=%r, alice_kind=%r)' % (
            self.anticommuting, self.alice_kind
        )

    def canonicalize(self, word):
        '''canonicalize(word) -> (sign, Word), or (0, None) for zero'''
        for sym in word:
            if sym.party == 'A' and sym.kind != self.alice_kind:
                raise ContractError(
                    'Symbol %s does not belong to %r' % (sym, self)
                )

        sign = 1
        alice = [sym for sym in word if sym.party == 'A']
        if self.alice_kind == 'obs':
            if self.anticommuting:
                sign, alice = self._reduce_anticommuting(alice)
            else:
                alice = self._reduce_involutions(alice)
        else:
            alice = self._reduce_projectors(alice)
            if alice is None:
                return 0, None

        bob = self._reduce_projectors(
            [sym for sym in word if sym.party == 'B']
        )
        if bob is None:
            return 0, None

        eve = [sym for sym in word if sym.party == 'E']
        return sign, Word(tuple(alice) + tuple(bob) + tuple(eve))

    def _reduce_anticommuting(self, symbols):
        inputs = [sym.input for sym in symbols]
        inversions = sum(
            1
            for i in range(len(inputs))
            for j in range(i + 1, len(inputs))
            if inputs[i] > inputs[j]
        )
        kept = sorted(x for x in set(inputs) if inputs.count(x) % 2)
        return (-1) ** inversions, [observable(x) for x in kept]

    def _reduce_involutions(self, symbols):
        stack = []
        for sym in symbols:
            if stack and stack[-1] == sym:
                stack.pop()
            else:
                stack.append(sym)
        return stack

    def _reduce_projectors(self, symbols):
        stack = []
        for sym in symbols:
            if stack and stack[-1].input == sym.input:
                if stack[-1].outcome != sym.outcome:
                    return None
                continue
            stack.append(sym)
        return stack

    def canonical(self, poly):
        '''canonical(poly) -> Polynomial with every word canonicalized'''
        terms = {}
        for word, coefficient in poly.terms.items():
            sign, canonical = self.canonicalize(word)
            if sign:
                terms[canonical] = terms.get(canonical, 0.0) + sign * coefficient
        return Polynomial(terms)

    def product(self, *symbols):
        '''product(A1, Z1) -> Polynomial of the canonical product'''
        sign, word = self.canonicalize(Word(symbols))
        if not sign:
            return Polynomial()
        return Polynomial.word(word, float(sign))

    def multiply(self, left, right):
        '''multiply(p, q) -> canonical Polynomial p q'''
        terms = {}
        for lword, lcoef in left.terms.items():
            for rword, rcoef in right.terms.items():
                sign, word = self.canonicalize(Word(lword + rword))
                if sign:
                    terms[word] = terms.get(word, 0.0) + sign * lcoef * rcoef
        return Polynomial(terms)

    def adjoint_word(self, word):
        '''adjoint_word(word) -> (sign, Word) of the canonical adjoint'''
        return self.canonicalize(
            Word(tuple(sym.adjoint() for sym in reversed(word)))
        )

    def adjoint(self, poly):
        '''adjoint(p) -> p* (coefficients are real)'''
        terms = {}
        for word, coefficient in poly.terms.items():
            sign, adjoint = self.adjoint_word(word)
            if sign:
                terms[adjoint] = terms.get(adjoint, 0.0) + sign * coefficient
        return Polynomial(terms)

    def alice_povm(self, a, x):
        '''alice_povm(a, x) -> M_a|x as a Polynomial

        Observables give (1 + (-1)^(a+1) A_x) / 2; projectors keep M_1|x
        and write M_2|x = 1 - M_1|x.
        '''
        if a not in (1, 2):
            raise ContractError('Alice outcome must be 1 or 2: %r' % a)
        if self.alice_kind == 'obs':
            sign = 1.0 if a == 1 else -1.0
            return Polynomial({IDENTITY: 0.5, Word((observable(x), )): sign / 2})
        first = Polynomial.word(Word((alice_projector(1, x), )))
        return first if a == 1 else Polynomial.constant(1.0) - first

    def alice_observable(self, x):
        '''alice_observable(x) -> M_1|x - M_2|x'''
        return self.alice_povm(1, x) - self.alice_povm(2, x)

    def bob_povm(self, b, y, outcomes):
        '''bob_povm(b, y, outcomes) -> N_b|y as a Polynomial

        The last outcome is eliminated through completeness.
        '''
        if not (1 <= b <= outcomes):
            raise ContractError(
                'Bob outcome %r out of range for %s outcomes' % (b, outcomes)
            )
        if b < outcomes:
            return Polynomial.word(Word((bob_projector(b, y), )))
        poly = Polynomial.constant(1.0)
        for other in range(1, outcomes):
            poly = poly - Polynomial.word(Word((bob_projector(other, y), )))
        return poly

    def bob_observable(self, y, outcomes=2):
        '''bob_observable(y) -> N_1|y - N_2|y'''
        if outcomes != 2:
            raise ContractError('Bob observables need 2 outcomes')
        return self.bob_povm(1, y, 2) - self.bob_povm(2, y, 2)

    def eve(self, a, node, starred=False):
        return Polynomial.word(Word((eve_operator(a, node, starred), )))

    def alice_generators(self, inputs):
        if self.alice_kind == 'obs':
            return [observable(x) for x in range(1, inputs + 1)]
        return [alice_projector(1, x) for x in range(1, inputs + 1)]

    def bob_generators(self, outcomes):
        '''bob_generators((2, 2)) -> [N_1|1, N_1|2]'''
        return [
            bob_projector(b, y + 1)
            for y, count in enumerate(outcomes)
            for b in range(1, count)
        ]

    def eve_generators(self, node, outcomes=2):
        return [
            eve_operator(a, node, starred)
            for a in range(1, outcomes + 1)
            for starred in (False, True)
        ]

def canonicalize(word, anticommuting=True):
    '''canonicalize(word) -> (sign, Word) under the default rules'''
    alice_kind = 'obs'
    if any(sym.party == 'A' and sym.kind == 'proj' for sym in word):
        alice_kind = 'proj'
    return Algebra(anticommuting and alice_kind == 'obs', alice_kind) \
        .canonicalize(word)
