"""The free one-generator algebra B<x> over an exact matrix (or scalar) base,
carrying a seeded random conditional expectation pair.

Elements are linear combinations of basis words  e_{i0 j0} x e_{i1 j1} x ... x
e_{im jm}  (for k = 1 simply powers of x).  Any assignment of multilinear
moment maps  Phi_m : B^(m-1) -> B  yields a valid bimodule expectation via
E(b0 x b1 ... x bm) = b0 Phi_m(b1, .., b_{m-1}) bm, which on basis words
collapses to a single matrix entry:

    E(e_{i0 j0} x ... x e_{im jm}) = Phi_m(mid)[j0, im] * e_{i0 jm}.

Values of Phi_m / Phi'_m on basis tuples are drawn lazily from a generator
keyed by (seed, tag, m, mid), so the space is reproducible no matter the
query order.
"""

from __future__ import annotations

import hashlib
import random
from fractions import Fraction

from ..errors import OviprobError, SizeLimitError
from .exact import QQi
from .matrices import SquareMatrix


def _derived_rng(seed, *key):
    digest = hashlib.sha256(repr((seed,) + key).encode()).digest()
    return random.Random(int.from_bytes(digest[:8], "big"))


def _small_fraction(rng):
    return Fraction(rng.randint(-4, 4), rng.randint(1, 4))


class WordSpace:
    def __init__(self, k=1, seed=0, degree_cap=12, gaussian=False):
        self.k = k
        self.seed = seed
        self.degree_cap = degree_cap
        self.gaussian = gaussian
        self._phi = {}

    # -- random moment data --------------------------------------------------

    def _scalar(self, rng):
        if self.gaussian:
            return QQi(_small_fraction(rng), _small_fraction(rng))
        return _small_fraction(rng)

    def _phi_entry(self, tag, m, mid, a, b):
        """Entry [a, b] of Phi_m (tag 'E') or Phi'_m (tag 'dE') at basis mid."""
        key = (tag, m, mid)
        mat = self._phi.get(key)
        if mat is None:
            rng = _derived_rng(self.seed, tag, m, mid)
            mat = [[self._scalar(rng) for _ in range(self.k)]
                   for _ in range(self.k)]
            self._phi[key] = mat
        return mat[a][b]

    # -- element constructors -------------------------------------------------

    def zero(self):
        return WordElement(self, ())

    def one(self):
        if self.k == 1:
            return WordElement(self, ((0, Fraction(1)),))
        return WordElement(self, tuple((((i, i),), Fraction(1))
                                       for i in range(self.k)))

    def x(self):
        if self.k == 1:
            return WordElement(self, ((1, Fraction(1)),))
        terms = []
        for i in range(self.k):
            for j in range(self.k):
                terms.append((((i, i), (j, j)), Fraction(1)))
        return WordElement(self, tuple(terms))

    def embed(self, mat):
        """A base element: scalar for k = 1, SquareMatrix for k >= 2."""
        if self.k == 1:
            return WordElement(self, ((0, mat),))
        terms = []
        for i in range(self.k):
            for j in range(self.k):
                c = mat[i, j]
                if c != 0:
                    terms.append((((i, j),), c))
        return WordElement(self, tuple(terms))

    def random_base(self, rng):
        if self.k == 1:
            return self._scalar(rng)
        return SquareMatrix([[self._scalar(rng) for _ in range(self.k)]
                             for _ in range(self.k)])

    def random_arg(self, rng):
        """b1 * x * b2 with random base factors; a generic 1-x element."""
        return self.embed(self.random_base(rng)) * self.x() \
            * self.embed(self.random_base(rng))

    # -- expectation pair -----------------------------------------------------

    def _e_word(self, word, tag):
        if self.k == 1:
            m = word
            if m == 0:
                return ((0, Fraction(1)),) if tag == "E" else ()
            v = self._phi_entry(tag, m, (), 0, 0)
            return ((0, v),) if v != 0 else ()
        m = len(word) - 1
        if m == 0:
            return ((word, Fraction(1)),) if tag == "E" else ()
        if m > self.degree_cap:
            raise SizeLimitError(
                f"word degree {m} over degree_cap {self.degree_cap}")
        (i0, j0), (im, jm) = word[0], word[-1]
        v = self._phi_entry(tag, m, word[1:-1], j0, im)
        return ((((i0, jm),), v),) if v != 0 else ()

    def E(self, elem):
        terms = []
        for w, c in elem.terms:
            for w2, c2 in self._e_word(w, "E"):
                terms.append((w2, c * c2))
        return WordElement(self, tuple(terms))

    def Eprime(self, elem):
        terms = []
        for w, c in elem.terms:
            for w2, c2 in self._e_word(w, "dE"):
                terms.append((w2, c * c2))
        return WordElement(self, tuple(terms))

    def expectation_pair(self):
        from .spaces import ExpectationPair
        return ExpectationPair(E=self.E, Eprime=self.Eprime,
                               base=f"M{self.k}" if self.k > 1 else "scalar")

    def as_matrix(self, elem):
        """Read a degree-zero element back as a SquareMatrix (or scalar)."""
        if self.k == 1:
            total = Fraction(0)
            for w, c in elem.terms:
                if w != 0:
                    raise OviprobError("element is not base-valued")
                total += c
            return total
        rows = [[Fraction(0)] * self.k for _ in range(self.k)]
        for w, c in elem.terms:
            if len(w) != 1:
                raise OviprobError("element is not base-valued")
            i, j = w[0]
            rows[i][j] = rows[i][j] + c
        return SquareMatrix(rows)


class WordElement:
    __slots__ = ("space", "terms")

    def __init__(self, space, terms):
        merged = {}
        for w, c in terms:
            merged[w] = merged.get(w, 0) + c
        object.__setattr__(self, "space", space)
        object.__setattr__(self, "terms",
                           tuple(sorted((w, c) for w, c in merged.items()
                                        if not (c == 0))))

    def __setattr__(self, name, value):
        raise AttributeError("WordElement is immutable")

    def _mul_words(self, w1, w2):
        if self.space.k == 1:
            return w1 + w2, Fraction(1)
        if w1[-1][1] != w2[0][0]:
            return None, None
        joined = w1[:-1] + ((w1[-1][0], w2[0][1]),) + w2[1:]
        return joined, Fraction(1)

    def __mul__(self, other):
        if isinstance(other, WordElement):
            terms = []
            for w1, c1 in self.terms:
                for w2, c2 in other.terms:
                    w, s = self._mul_words(w1, w2)
                    if w is not None:
                        terms.append((w, c1 * c2 * s))
            return WordElement(self.space, tuple(terms))
        return WordElement(self.space,
                           tuple((w, c * other) for w, c in self.terms))

    def __rmul__(self, other):
        return WordElement(self.space,
                           tuple((w, other * c) for w, c in self.terms))

    def __add__(self, other):
        if isinstance(other, WordElement):
            return WordElement(self.space, self.terms + other.terms)
        return self + other * self.space.one()

    __radd__ = __add__

    def __neg__(self):
        return WordElement(self.space, tuple((w, -c) for w, c in self.terms))

    def __sub__(self, other):
        if not isinstance(other, WordElement):
            other = other * self.space.one()
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __eq__(self, other):
        if isinstance(other, WordElement):
            return self.terms == other.terms
        if other == 0:
            return not self.terms
        return NotImplemented

    def __hash__(self):
        return hash(self.terms)

    def __repr__(self):
        return f"WordElement({self.terms!r})"
