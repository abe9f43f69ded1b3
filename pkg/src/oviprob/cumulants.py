"""Moment <-> cumulant conversion: free, Boolean, monotone; scalar and
operator-valued; with infinitesimal companions throughout.

Scalar laws are plain coefficient sequences and the converters are generic
over the coefficient ring, so running them over Triangular (dual-number)
coefficients reproduces the infinitesimal parts through the upper-triangular
lift -- that second route is kept as a consistency check.

Operator-valued cumulants are extensional: they evaluate on demand on
elements of any algebra that supports products plus an expectation pair.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .algebra.exact import scalar_from_str, scalar_to_str
from .algebra.spaces import ExpectationPair, FormalElement
from .algebra.triangular import Triangular
from .errors import OviprobError, SizeLimitError, UnsupportedKindError
from .multiplicative import MultilinearFamily, apply_partial, apply_partition
from .partitions import full, intervals, moebius_to_full, noncrossing, \
    tree_factorial

KINDS = ("free", "boolean", "monotone")


@dataclass(frozen=True)
class InfinitesimalLaw:
    """A pair of moment sequences (m_n, m'_n), n = 1..L; m_0 = 1, m'_0 = 0."""

    moments: tuple
    inf_moments: tuple

    def __post_init__(self):
        if len(self.moments) != len(self.inf_moments):
            raise OviprobError("moment sequences must share a truncation order")

    @classmethod
    def from_moments(cls, moments, inf_moments=None):
        moments = tuple(moments)
        if inf_moments is None:
            inf_moments = (Fraction(0),) * len(moments)
        return cls(moments, tuple(inf_moments))

    @property
    def order(self):
        return len(self.moments)

    def m(self, n):
        if n == 0:
            return Fraction(1)
        return self.moments[n - 1]

    def dm(self, n):
        if n == 0:
            return Fraction(0)
        return self.inf_moments[n - 1]

    def truncate(self, L):
        return InfinitesimalLaw(self.moments[:L], self.inf_moments[:L])

    def to_json(self):
        return {"L": self.order,
                "moments": [scalar_to_str(v) for v in self.moments],
                "inf_moments": [scalar_to_str(v) for v in self.inf_moments]}

    @classmethod
    def from_json(cls, data):
        return cls(tuple(scalar_from_str(s) for s in data["moments"]),
                   tuple(scalar_from_str(s) for s in data["inf_moments"]))


@dataclass(frozen=True)
class CumulantFamily:
    """Scalar cumulants kappa_1..kappa_L of one kind, with companions."""

    kind: str
    values: tuple
    inf_values: tuple

    def __post_init__(self):
        if self.kind not in KINDS:
            raise OviprobError(f"unknown cumulant kind {self.kind!r}")
        if len(self.values) != len(self.inf_values):
            raise OviprobError("cumulant sequences must share a truncation order")

    @property
    def order(self):
        return len(self.values)

    def k(self, n):
        return self.values[n - 1]

    def dk(self, n):
        return self.inf_values[n - 1]

    def __add__(self, other):
        if self.kind != other.kind or self.order != other.order:
            raise OviprobError("can only add matching cumulant families")
        return CumulantFamily(
            self.kind,
            tuple(a + b for a, b in zip(self.values, other.values)),
            tuple(a + b for a, b in zip(self.inf_values, other.inf_values)))

    def to_json(self):
        return {"kind": self.kind, "L": self.order,
                "values": [scalar_to_str(v) for v in self.values],
                "inf_values": [scalar_to_str(v) for v in self.inf_values]}

    @classmethod
    def from_json(cls, data):
        return cls(data["kind"],
                   tuple(scalar_from_str(s) for s in data["values"]),
                   tuple(scalar_from_str(s) for s in data["inf_values"]))


# -- scalar partition sums ----------------------------------------------------


def _pi_product(vals, pi):
    """prod over blocks V of vals[|V|] (vals is 1-indexed via list offset)."""
    out = 1
    for b in pi.blocks:
        out = out * vals[len(b) - 1]
    return out


def _pi_partial(vals, dvals, pi):
    """Leibniz sum: sum_V dvals[|V|] * prod_{W != V} vals[|W|]."""
    total = 0
    sizes = [len(b) for b in pi.blocks]
    for j in range(len(sizes)):
        term = dvals[sizes[j] - 1]
        for i, s in enumerate(sizes):
            if i != j:
                term = term * vals[s - 1]
        total = total + term
    return total


def _weight(kind, pi):
    if kind == "free":
        return 1
    if kind == "boolean":
        return 1
    return Fraction(1, tree_factorial(pi))


def _lattice(kind, n):
    return intervals(n) if kind == "boolean" else noncrossing(n)


def cumulants_to_moments(fam):
    """Moments from cumulants: sum over NC(n) (free), I(n) (Boolean),
    NC(n) with 1/tau(pi)! (monotone); infinitesimal parts via the Leibniz
    partition sums."""
    k, dk = list(fam.values), list(fam.inf_values)
    m, dm = [], []
    for n in range(1, fam.order + 1):
        tot, dtot = 0, 0
        for pi in _lattice(fam.kind, n):
            w = _weight(fam.kind, pi)
            tot = tot + w * _pi_product(k, pi)
            dtot = dtot + w * _pi_partial(k, dk, pi)
        m.append(tot)
        dm.append(dtot)
    return InfinitesimalLaw(tuple(m), tuple(dm))


def moments_to_cumulants(law, kind, verify_tilde=False):
    """Cumulants from moments.  Free and Boolean use the signed partition
    sums; monotone isolates the full-block term and recurses.  With
    verify_tilde=True the result is re-derived through the dual-number lift
    and both routes must agree."""
    if kind not in KINDS:
        raise OviprobError(f"unknown cumulant kind {kind!r}")
    m, dm = list(law.moments), list(law.inf_moments)
    L = law.order
    if kind in ("free", "boolean"):
        k, dk = [], []
        for n in range(1, L + 1):
            tot, dtot = 0, 0
            for pi in _lattice(kind, n):
                w = moebius_to_full(pi) if kind == "free" \
                    else (-1) ** (len(pi.blocks) - 1)
                tot = tot + w * _pi_product(m, pi)
                dtot = dtot + w * _pi_partial(m, dm, pi)
            k.append(tot)
            dk.append(dtot)
    else:
        k, dk = [], []
        for n in range(1, L + 1):
            rest, drest = 0, 0
            for pi in noncrossing(n):
                if len(pi.blocks) == 1:
                    continue
                w = Fraction(1, tree_factorial(pi))
                rest = rest + w * _pi_product(k, pi)
                drest = drest + w * _pi_partial(k, dk, pi)
            k.append(m[n - 1] - rest)
            dk.append(dm[n - 1] - drest)
    fam = CumulantFamily(kind, tuple(k), tuple(dk))
    if verify_tilde:
        tk, tdk = cumulants_via_tilde(law, kind)
        if tuple(tk) != fam.values or tuple(tdk) != fam.inf_values:
            raise OviprobError(
                f"{kind} cumulants disagree with the triangular-lift route")
    return fam


def cumulants_via_tilde(law, kind):
    """Cumulants of the lifted law over dual numbers; the corner entries are
    the infinitesimal cumulants (Lemma on triangular families)."""
    lifted = InfinitesimalLaw(
        tuple(Triangular(a, b) for a, b in zip(law.moments, law.inf_moments)),
        (Fraction(0),) * law.order)
    fam = moments_to_cumulants(lifted, kind)
    k = [v.base for v in fam.values]
    dk = [v.deriv for v in fam.values]
    return k, dk


def law_of_letter(space, letter, L):
    """Truncated scalar law of a single letter of a FormalSpace."""
    m, dm = [], []
    for n in range(1, L + 1):
        v, dv = space.mixed_moment((letter,) * n)
        m.append(v)
        dm.append(dv)
    return InfinitesimalLaw(tuple(m), tuple(dm))


# -- operator-valued (extensional) cumulants ----------------------------------


class OperatorCumulants:
    """Free/Boolean/monotone cumulant families over an expectation pair,
    evaluated extensionally on algebra elements.

    The defining formulas are the same partition sums as in the scalar case,
    with E_pi / partial E_pi evaluated through the interval-block recursion;
    monotone cumulants are obtained by isolating the full-block term.
    """

    def __init__(self, ep: ExpectationPair):
        self.ep = ep
        self._cache = {}

        def prod(args):
            out = args[0]
            for a in args[1:]:
                out = out * a
            return out

        self.moment_family = MultilinearFamily(
            lambda args: ep.E(prod(args)),
            lambda args: ep.Eprime(prod(args)),
            name="E").cached()

    def family(self, kind):
        if kind not in KINDS:
            raise OviprobError(f"unknown cumulant kind {kind!r}")
        return MultilinearFamily(
            lambda args: self.kappa(kind, args),
            lambda args: self.kappa_partial(kind, args),
            name=kind)

    def kappa(self, kind, args):
        args = tuple(args)
        key = (kind, False, args)
        if key not in self._cache:
            self._cache[key] = self._kappa(kind, args)
        return self._cache[key]

    def kappa_partial(self, kind, args):
        args = tuple(args)
        key = (kind, True, args)
        if key not in self._cache:
            self._cache[key] = self._kappa_partial(kind, args)
        return self._cache[key]

    def _kappa(self, kind, args):
        n = len(args)
        if kind in ("free", "boolean"):
            total = None
            for pi in _lattice(kind, n):
                w = moebius_to_full(pi) if kind == "free" \
                    else (-1) ** (len(pi.blocks) - 1)
                term = w * apply_partition(self.moment_family, pi, args)
                total = term if total is None else total + term
            return total
        # monotone: E_n = sum over NC(n) of h_pi / tau(pi)!
        total = apply_partition(self.moment_family, full(n), args)
        fam = self.family("monotone")
        for pi in noncrossing(n):
            if len(pi.blocks) == 1:
                continue
            w = Fraction(1, tree_factorial(pi))
            total = total - w * apply_partition(fam, pi, args)
        return total

    def _kappa_partial(self, kind, args):
        n = len(args)
        if kind in ("free", "boolean"):
            total = None
            for pi in _lattice(kind, n):
                w = moebius_to_full(pi) if kind == "free" \
                    else (-1) ** (len(pi.blocks) - 1)
                term = w * apply_partial(self.moment_family, pi, args)
                total = term if total is None else total + term
            return total
        total = apply_partial(self.moment_family, full(n), args)
        fam = self.family("monotone")
        for pi in noncrossing(n):
            if len(pi.blocks) == 1:
                continue
            w = Fraction(1, tree_factorial(pi))
            total = total - w * apply_partial(fam, pi, args)
        return total


# -- independence tests --------------------------------------------------------


def mixed_cumulant_test(space, kind, max_len):
    """Mixed cumulants (and their infinitesimal companions) of a FormalSpace
    vanish exactly, for all words up to max_len whose letters do not all come
    from one family.  Boolean and free only: monotone independence is not
    characterized by vanishing cumulants."""
    from .multiplicative import CheckReport

    if kind == "monotone":
        raise UnsupportedKindError(
            "monotone independence has no vanishing-mixed-cumulant "
            "characterization")
    if kind not in ("free", "boolean"):
        raise OviprobError(f"unknown kind {kind!r}")
    engine = OperatorCumulants(space.expectation_pair())
    letters = sorted(space.family_of)
    report = CheckReport(name=f"mixed_{kind}_cumulants")

    def words(n):
        if n == 0:
            yield ()
            return
        for w in words(n - 1):
            for let in letters:
                yield w + (let,)

    for n in range(2, max_len + 1):
        for w in words(n):
            fams = {space.family_of[let] for let in w}
            if len(fams) < 2:
                continue
            args = tuple(space.letter(let) for let in w)
            v = engine.kappa(kind, args)
            dv = engine.kappa_partial(kind, args)
            report.record(v == 0, f"kappa{w} = {v}")
            report.record(dv == 0, f"dkappa{w} = {dv}")
    return report


def _matrix_expectation_pair(space, N):
    """E = phi (x) Id_N and E' = phi' (x) Id_N on matrices of FormalElements."""
    from .algebra.matrices import SquareMatrix

    def entry_phi(e):
        return e.phi() if isinstance(e, FormalElement) else e

    def entry_dphi(e):
        return e.phi_prime() if isinstance(e, FormalElement) else 0 * e

    def E(mat):
        return SquareMatrix([[entry_phi(mat[i, j]) for j in range(N)]
                             for i in range(N)])

    def Eprime(mat):
        return SquareMatrix([[entry_dphi(mat[i, j]) for j in range(N)]
                             for i in range(N)])

    return ExpectationPair(E, Eprime, base=f"M{N}(C)")


def matrix_cumulant_entrywise(space, variables, n, expect_mixed_vanish=False):
    """Check the entrywise Boolean-cumulant transfer between a scalar
    infinitesimal space and matrices over it:

      [beta_n(X1..Xn)]_{ij} = sum over inner indices of scalar beta_n of the
      entry letters, and the same with the infinitesimal companions.

    With expect_mixed_vanish=True the variables are grouped by entry families
    and mixed matrix cumulants over M_N(C) are asserted to vanish (the
    matrix-lift of scalar infinitesimal Boolean independence)."""
    from .algebra.matrices import SquareMatrix
    from .multiplicative import CheckReport

    N = len(variables[0])
    if N > 3 or n > 4:
        raise SizeLimitError("matrix_cumulant_entrywise caps at N <= 3, n <= 4")
    mats = [SquareMatrix([[space.letter(let) for let in row] for row in grid])
            for grid in variables]
    mat_engine = OperatorCumulants(_matrix_expectation_pair(space, N))
    sc_engine = OperatorCumulants(space.expectation_pair())
    report = CheckReport(name="matrix_cumulant_entrywise")

    def tuples(length, count):
        if length == 0:
            yield ()
            return
        for t in tuples(length - 1, count):
            for v in range(count):
                yield t + (v,)

    for choice in tuples(n, len(variables)):
        args = tuple(mats[v] for v in choice)
        beta = mat_engine.kappa("boolean", args)
        dbeta = mat_engine.kappa_partial("boolean", args)
        for i in range(N):
            for j in range(N):
                tot, dtot = Fraction(0), Fraction(0)
                for inner in tuples(n - 1, N):
                    path = (i,) + inner + (j,)
                    letters = tuple(
                        space.letter(variables[choice[r]][path[r]][path[r + 1]])
                        for r in range(n))
                    tot += sc_engine.kappa("boolean", letters)
                    dtot += sc_engine.kappa_partial("boolean", letters)
                report.record(beta[i, j] == tot,
                              f"beta entry ({i},{j}) of {choice} mismatch")
                report.record(dbeta[i, j] == dtot,
                              f"dbeta entry ({i},{j}) of {choice} mismatch")
        if expect_mixed_vanish and len(set(choice)) > 1:
            zero = SquareMatrix.zero(N)
            report.record(beta == zero, f"mixed beta {choice} nonzero")
            report.record(dbeta == zero, f"mixed dbeta {choice} nonzero")
    return report
