"""Formal multi-letter spaces with declared independence between families.

A FormalSpace holds named letters grouped into families; within one family
the joint moments (phi, phi') are data supplied up to a word-length cap, and
across families the moments are *derived* from the declared independence
kind (free, boolean, or monotone with a total order on families).

The evaluators work on runs: a word is first coalesced into maximal
same-family factors, each an element of one family's span, and the
independence recursion is applied to the alternating factor sequence.

Sign/indexing conventions follow the scalar specializations:
  boolean   phi(a1...an) = phi(a1)...phi(an),
            phi'(...)    = sum_j phi(a1)..phi'(aj)..phi(an);
  monotone  a factor whose family order is a strict local maximum is
            replaced by its phi (resp. phi' with the Leibniz split);
  free      centering recursion: subtract phi(a)1 from every factor and use
            that alternating centered products vanish under phi, while
            phi' of an alternating centered product is
            sum_j phi'(aj) phi(a1..aj-1 aj+1..an).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

from ..errors import OviprobError, SizeLimitError, UnsupportedKindError
from .exact import scalar_from_str, scalar_to_str
from .triangular import Triangular

KINDS = ("free", "boolean", "monotone")


@dataclass(frozen=True)
class Family:
    name: str
    letters: tuple
    order: int = 0
    # word (tuple of letters) -> value; missing words are zero
    moments: dict = field(default_factory=dict)
    inf_moments: dict = field(default_factory=dict)

    def phi(self, word):
        if not word:
            return Fraction(1)
        return self.moments.get(tuple(word), Fraction(0))

    def phi_prime(self, word):
        if not word:
            return Fraction(0)
        return self.inf_moments.get(tuple(word), Fraction(0))


@dataclass(frozen=True)
class ExpectationPair:
    """A linear expectation E with infinitesimal companion E'."""
    E: object
    Eprime: object
    base: str = "scalar"


def tilde_expectation(ep):
    """Lift (E, E') to the plain expectation on triangular pairs:
    E~(a, a') = (E(a), E(a') + E'(a)); its own infinitesimal part is zero."""

    def e_tilde(t):
        val = ep.E(t.base)
        return Triangular(val, ep.E(t.deriv) + ep.Eprime(t.base))

    def e_prime_tilde(t):
        val = ep.E(t.base)
        zero = val - val
        return Triangular(zero, zero)

    return ExpectationPair(e_tilde, e_prime_tilde, base=f"~{ep.base}")


class FormalSpace:
    """Letters in independent families with supplied within-family moments."""

    def __init__(self, families, kind, cap=8, infinitesimal=True):
        if kind not in KINDS:
            raise OviprobError(f"unknown independence kind {kind!r}")
        self.kind = kind
        self.cap = cap
        self.infinitesimal = infinitesimal
        self.families = {}
        self.family_of = {}
        for fam in families:
            if fam.name in self.families:
                raise OviprobError(f"duplicate family {fam.name!r}")
            self.families[fam.name] = fam
            for let in fam.letters:
                if let in self.family_of:
                    raise OviprobError(f"letter {let!r} appears twice")
                self.family_of[let] = fam.name
        if kind == "monotone":
            orders = [f.order for f in self.families.values()]
            if len(set(orders)) != len(orders):
                raise UnsupportedKindError(
                    "monotone kind needs a total order on families")
        self._phi_cache = {}
        self._dphi_cache = {}

    # -- run factors --------------------------------------------------------
    # a factor is (family_name, items), items a sorted tuple of
    # (within-family word, coefficient); the empty word is the unit

    def _coalesce(self, word):
        factors = []
        for let in word:
            fam = self.family_of.get(let)
            if fam is None:
                raise OviprobError(f"unknown letter {let!r}")
            if factors and factors[-1][0] == fam:
                prev_items = factors[-1][1]
                factors[-1] = (fam, tuple((w + (let,), c) for w, c in prev_items))
            else:
                factors.append((fam, (((let,), Fraction(1)),)))
        return tuple(factors)

    def _run_phi(self, factor, prime=False):
        fam = self.families[factor[0]]
        get = fam.phi_prime if prime else fam.phi
        total = 0
        for w, c in factor[1]:
            total = total + c * get(w)
        return total

    @staticmethod
    def _run_mul(f1, f2):
        assert f1[0] == f2[0]
        acc = {}
        for w1, c1 in f1[1]:
            for w2, c2 in f2[1]:
                w = w1 + w2
                acc[w] = acc.get(w, 0) + c1 * c2
        return (f1[0], tuple(sorted(acc.items())))

    def _run_center(self, factor):
        c = self._run_phi(factor)
        acc = dict(factor[1])
        acc[()] = acc.get((), 0) - c
        return (factor[0], tuple(sorted(acc.items()))), c

    @staticmethod
    def _merge_adjacent(factors):
        out = []
        for f in factors:
            if out and out[-1][0] == f[0]:
                out[-1] = FormalSpace._run_mul(out[-1], f)
            else:
                out.append(f)
        return tuple(out)

    # -- evaluators ---------------------------------------------------------

    def _phi(self, factors):
        if not factors:
            return Fraction(1)
        if len(factors) == 1:
            return self._run_phi(factors[0])
        cached = self._phi_cache.get(factors)
        if cached is None:
            cached = getattr(self, f"_phi_{self.kind}")(factors)
            self._phi_cache[factors] = cached
        return cached

    def _dphi(self, factors):
        if not factors:
            return Fraction(0)
        if len(factors) == 1:
            return self._run_phi(factors[0], prime=True)
        cached = self._dphi_cache.get(factors)
        if cached is None:
            cached = getattr(self, f"_dphi_{self.kind}")(factors)
            self._dphi_cache[factors] = cached
        return cached

    def _phi_boolean(self, factors):
        total = Fraction(1)
        for f in factors:
            total = total * self._run_phi(f)
        return total

    def _dphi_boolean(self, factors):
        vals = [self._run_phi(f) for f in factors]
        total = 0
        for j, f in enumerate(factors):
            term = self._run_phi(f, prime=True)
            for i, v in enumerate(vals):
                if i != j:
                    term = term * v
            total = total + term
        return total

    def _monotone_peak(self, factors):
        orders = [self.families[f[0]].order for f in factors]
        for j, o in enumerate(orders):
            left_ok = j == 0 or orders[j - 1] < o
            right_ok = j == len(orders) - 1 or orders[j + 1] < o
            if left_ok and right_ok:
                return j
        raise AssertionError("no local maximum in an alternating sequence")

    def _phi_monotone(self, factors):
        j = self._monotone_peak(factors)
        rest = self._merge_adjacent(factors[:j] + factors[j + 1:])
        return self._run_phi(factors[j]) * self._phi(rest)

    def _dphi_monotone(self, factors):
        j = self._monotone_peak(factors)
        rest = self._merge_adjacent(factors[:j] + factors[j + 1:])
        return (self._run_phi(factors[j], prime=True) * self._phi(rest)
                + self._run_phi(factors[j]) * self._dphi(rest))

    def _phi_free(self, factors):
        # expand every factor as (centered + constant); the all-centered
        # alternating term vanishes, every other term has fewer factors
        centered, consts = zip(*[self._run_center(f) for f in factors])
        n = len(factors)
        total = 0
        for mask in range(1, 1 << n):
            coeff = Fraction(1)
            keep = []
            for i in range(n):
                if (mask >> i) & 1:
                    coeff = coeff * consts[i]
                else:
                    keep.append(centered[i])
            if coeff == 0:
                continue
            total = total + coeff * self._phi(self._merge_adjacent(tuple(keep)))
        return total

    def _dphi_free(self, factors):
        centered, consts = zip(*[self._run_center(f) for f in factors])
        n = len(factors)
        # mask 0: phi' of the fully centered alternating word
        total = 0
        for j in range(n):
            rest = self._merge_adjacent(centered[:j] + centered[j + 1:])
            total = total + self._run_phi(centered[j], prime=True) * self._phi(rest)
        for mask in range(1, 1 << n):
            coeff = Fraction(1)
            keep = []
            for i in range(n):
                if (mask >> i) & 1:
                    coeff = coeff * consts[i]
                else:
                    keep.append(centered[i])
            if coeff == 0:
                continue
            total = total + coeff * self._dphi(self._merge_adjacent(tuple(keep)))
        return total

    # -- public API ---------------------------------------------------------

    def phi_word(self, word):
        return self._phi(self._coalesce(word))

    def phi_prime_word(self, word):
        return self._dphi(self._coalesce(word))

    def mixed_moment(self, word):
        """(phi, phi') of a word of letters, derived from independence."""
        if len(word) > self.cap:
            raise SizeLimitError(
                f"word length {len(word)} over cap {self.cap}")
        factors = self._coalesce(word)
        v = self._phi(factors)
        dv = self._dphi(factors) if self.infinitesimal else Fraction(0)
        return v, dv

    def element(self, word=(), coeff=Fraction(1)):
        return FormalElement(self, ((tuple(word), coeff),) if coeff else ())

    def letter(self, name):
        if name not in self.family_of:
            raise OviprobError(f"unknown letter {name!r}")
        return self.element((name,))

    def expectation_pair(self):
        return ExpectationPair(E=lambda a: a.phi(),
                               Eprime=lambda a: a.phi_prime(),
                               base="scalar")

    # -- serialization ------------------------------------------------------

    def to_json(self):
        fams = []
        for f in self.families.values():
            fams.append({
                "name": f.name,
                "order": f.order,
                "letters": list(f.letters),
                "moments": {" ".join(w): scalar_to_str(v)
                            for w, v in sorted(f.moments.items())},
                "inf_moments": {" ".join(w): scalar_to_str(v)
                                for w, v in sorted(f.inf_moments.items())},
            })
        return {"kind": self.kind, "cap": self.cap,
                "infinitesimal": self.infinitesimal, "families": fams}

    @classmethod
    def from_json(cls, data):
        if isinstance(data, str):
            data = json.loads(data)
        fams = []
        for fd in data["families"]:
            fams.append(Family(
                name=fd["name"],
                letters=tuple(fd["letters"]),
                order=fd.get("order", 0),
                moments={tuple(k.split()): scalar_from_str(v)
                         for k, v in fd.get("moments", {}).items()},
                inf_moments={tuple(k.split()): scalar_from_str(v)
                             for k, v in fd.get("inf_moments", {}).items()},
            ))
        return cls(fams, kind=data["kind"], cap=data.get("cap", 8),
                   infinitesimal=data.get("infinitesimal", True))


class FormalElement:
    """A linear combination of words of letters (families may mix)."""

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
        raise AttributeError("FormalElement is immutable")

    def phi(self):
        total = 0
        for w, c in self.terms:
            total = total + c * self.space.phi_word(w)
        return total

    def phi_prime(self):
        total = 0
        for w, c in self.terms:
            total = total + c * self.space.phi_prime_word(w)
        return total

    def __add__(self, other):
        if isinstance(other, FormalElement):
            return FormalElement(self.space, self.terms + other.terms)
        # scalar: multiple of the empty word
        return FormalElement(self.space, self.terms + (((), other),))

    __radd__ = __add__

    def __neg__(self):
        return FormalElement(self.space, tuple((w, -c) for w, c in self.terms))

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, FormalElement):
            return FormalElement(self.space,
                                 tuple((w1 + w2, c1 * c2)
                                       for w1, c1 in self.terms
                                       for w2, c2 in other.terms))
        return FormalElement(self.space,
                             tuple((w, c * other) for w, c in self.terms))

    def __rmul__(self, other):
        return FormalElement(self.space,
                             tuple((w, other * c) for w, c in self.terms))

    def __eq__(self, other):
        if isinstance(other, FormalElement):
            return self.terms == other.terms
        if not self.terms:
            return other == 0
        return len(self.terms) == 1 and self.terms[0][0] == () \
            and self.terms[0][1] == other

    def __hash__(self):
        return hash(self.terms)

    def __repr__(self):
        if not self.terms:
            return "FormalElement(0)"
        bits = []
        for w, c in self.terms:
            word = "*".join(w) if w else "1"
            bits.append(f"{c}*{word}")
        return "FormalElement(" + " + ".join(bits) + ")"
