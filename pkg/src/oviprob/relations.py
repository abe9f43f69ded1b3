"""The twelve cumulant-relation formulas over irreducible non-crossing
partitions (six operator-valued, six infinitesimal), plus the combinatorial
identity their monotone-to-free proof needs, verified on seeded random exact
data: scalar, or M2-valued through the word algebra.

Each relation states  target_n = sum over NC_irr(n) of w(pi) * source_pi
(with partial families on both sides in the infinitesimal case), where the
weight is one of  1, (-1)^(|pi|-1), 1/tau(pi)!, (-1)^(|pi|-1)/tau(pi)!,
omega(pi), (-1)^(|pi|-1) omega(pi).
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .algebra.triangular import Triangular
from .algebra.wordspace import WordSpace
from .algebra.spaces import ExpectationPair, tilde_expectation
from .cumulants import OperatorCumulants
from .errors import OviprobError, SizeLimitError
from .multiplicative import CheckReport, apply_partial, apply_partition
from .partitions import irreducibles, murua_omega, noncrossing, tree_factorial


def _sign(pi):
    return (-1) ** (len(pi.blocks) - 1)


def _w_unit(pi):
    return Fraction(1)


def _w_sign(pi):
    return Fraction(_sign(pi))


def _w_tree(pi):
    return Fraction(1, tree_factorial(pi))


def _w_sign_tree(pi):
    return Fraction(_sign(pi), tree_factorial(pi))


def _w_omega(pi):
    return murua_omega(pi)


def _w_sign_omega(pi):
    return _sign(pi) * murua_omega(pi)


@dataclass(frozen=True)
class RelationSpec:
    name: str
    target: str
    source: str
    weight: object
    infinitesimal: bool

    def weight_of(self, pi):
        return self.weight(pi)


_BASE = {
    "boolean_from_free": ("boolean", "free", _w_unit),
    "free_from_boolean": ("free", "boolean", _w_sign),
    "boolean_from_monotone": ("boolean", "monotone", _w_tree),
    "free_from_monotone": ("free", "monotone", _w_sign_tree),
    "monotone_from_boolean": ("monotone", "boolean", _w_omega),
    "monotone_from_free": ("monotone", "free", _w_sign_omega),
}

RELATIONS = {}
for _name, (_t, _s, _w) in _BASE.items():
    RELATIONS[_name] = RelationSpec(_name, _t, _s, _w, False)
    RELATIONS["inf_" + _name] = RelationSpec("inf_" + _name, _t, _s, _w, True)


def relation_names(infinitesimal=None):
    names = sorted(RELATIONS)
    if infinitesimal is None:
        return names
    return [n for n in names if RELATIONS[n].infinitesimal == infinitesimal]


class RelationContext:
    """Shared seeded space, argument tuples and cumulant engines, so the
    twelve relations reuse one set of cached cumulant evaluations."""

    def __init__(self, mode="scalar", seed=0, n_max=5):
        if n_max > 6:
            raise SizeLimitError("relation checks cap at n_max <= 6")
        self.mode = mode
        self.seed = seed
        self.n_max = n_max
        k = 1 if mode == "scalar" else 2
        self.ws = WordSpace(k=k, seed=seed)
        self.engine = OperatorCumulants(self.ws.expectation_pair())
        self.lifted = OperatorCumulants(
            tilde_expectation(self.ws.expectation_pair()))
        rng = random.Random(repr((seed, mode)))
        self.args = {n: tuple(self.ws.random_arg(rng) for _ in range(n))
                     for n in range(1, n_max + 1)}
        self._families = {kind: self.engine.family(kind).cached()
                          for kind in ("free", "boolean", "monotone")}

    def family(self, kind):
        return self._families[kind]


def verify_relation(spec, n_max=5, mode="scalar", seed=0, via_tilde=False,
                    ctx=None):
    """Evaluate both sides of a cumulant relation on seeded random data.

    mode 'scalar' uses the one-variable algebra over Q; 'm2' uses the word
    algebra over M2 with random multilinear moment maps.  Arguments per
    arity are random elements b1*x*b2.  With via_tilde=True an infinitesimal
    relation is re-derived by running the plain relation in the lifted
    triangular space and reading the corner."""
    if isinstance(spec, str):
        spec = RELATIONS[spec]
    if ctx is None:
        ctx = RelationContext(mode=mode, seed=seed, n_max=n_max)
    engine = ctx.engine
    report = CheckReport(name=f"{spec.name}[{ctx.mode}]")
    for n in range(1, min(n_max, ctx.n_max) + 1):
        args = ctx.args[n]
        src = ctx.family(spec.source)
        if spec.infinitesimal:
            lhs = engine.kappa_partial(spec.target, args)
            rhs = None
            for pi in irreducibles(n):
                term = spec.weight_of(pi) * apply_partial(src, pi, args)
                rhs = term if rhs is None else rhs + term
        else:
            lhs = engine.kappa(spec.target, args)
            rhs = None
            for pi in irreducibles(n):
                term = spec.weight_of(pi) * apply_partition(src, pi, args)
                rhs = term if rhs is None else rhs + term
        report.record(lhs == rhs, f"n={n}: lhs != rhs for {spec.name}")
        if via_tilde and spec.infinitesimal:
            zero = ctx.ws.zero()
            targs = tuple(Triangular(a, zero) for a in args)
            corner = ctx.lifted.kappa(spec.target, targs).deriv
            report.record(corner == lhs,
                          f"n={n}: tilde corner disagrees for {spec.name}")
    return report


def verify_all_relations(n_max=5, mode="scalar", seed=0, via_tilde=False):
    ctx = RelationContext(mode=mode, seed=seed, n_max=n_max)
    return [verify_relation(name, n_max=n_max, via_tilde=via_tilde, ctx=ctx)
            for name in relation_names()]


def comb_identity_check(n):
    """For every irreducible sigma in NC(n):
    sum over irreducible pi with sigma << pi of
    (-1)^(|pi|-1) prod_V 1/tau(sigma|V)!  ==  (-1)^(|sigma|-1)/tau(sigma)!."""
    if n > 7:
        raise SizeLimitError("comb_identity_check caps at n <= 7")
    report = CheckReport(name=f"comb_identity[n={n}]")
    irr = irreducibles(n)
    for sigma in irr:
        total = Fraction(0)
        for pi in irr:
            if not sigma.minmax_leq(pi):
                continue
            prod = Fraction(_sign(pi))
            for v in pi.blocks:
                prod /= tree_factorial(sigma.restrict(v))
            total += prod
        expected = Fraction(_sign(sigma), tree_factorial(sigma))
        report.record(total == expected,
                      f"sigma={sigma!r}: {total} != {expected}")
    return report


def scalar_relation_values(values, relation, n_max):
    """Apply a relation to a single-variable scalar cumulant sequence:
    target_n = sum over NC_irr(n) of w(pi) prod_V source_|V|."""
    spec = RELATIONS[relation] if isinstance(relation, str) else relation
    out = []
    for n in range(1, n_max + 1):
        tot = Fraction(0)
        for pi in irreducibles(n):
            prod = spec.weight_of(pi)
            for b in pi.blocks:
                prod *= values[len(b) - 1]
            tot += prod
        out.append(tot)
    return out


def composition_consistency(n_max=6, seed=0):
    """Boolean-from-free composed with free-from-Boolean is the identity on
    scalar cumulant sequences (and the monotone pair likewise)."""
    rng = random.Random(seed)
    report = CheckReport(name="relation_composition")
    vals = [Fraction(rng.randint(-4, 4), rng.randint(1, 3))
            for _ in range(n_max)]
    beta = scalar_relation_values(vals, "boolean_from_free", n_max)
    back = scalar_relation_values(beta, "free_from_boolean", n_max)
    report.record(back == vals, f"free->boolean->free changed {vals} to {back}")
    h = scalar_relation_values(vals, "monotone_from_boolean", n_max)
    back2 = scalar_relation_values(h, "boolean_from_monotone", n_max)
    report.record(back2 == vals,
                  f"boolean->monotone->boolean changed {vals} to {back2}")
    return report


def tilde_lemma_suite(n_max=5, seed=0, kinds=("E", "boolean", "monotone"),
                      k=2, gaussian=True):
    """The triangular-family block identity for every pi in NC(n), n <= n_max,
    on random triangular inputs over the M_k word algebra (Gaussian-rational
    entries by default), for the moment family and the requested cumulant
    families."""
    from .multiplicative import check_tilde_lemma

    ws = WordSpace(k=k, seed=seed, gaussian=gaussian)
    engine = OperatorCumulants(ws.expectation_pair())
    rng = random.Random(repr(("tilde", seed)))
    fams = []
    for kind in kinds:
        if kind == "E":
            fams.append(engine.moment_family)
        else:
            fams.append(engine.family(kind).cached())
            fams[-1].name = kind
    reports = []
    for n in range(1, n_max + 1):
        args = tuple(Triangular(ws.random_arg(rng), ws.random_arg(rng))
                     for _ in range(n))
        for fam in fams:
            report = CheckReport(name=f"tilde[{fam.name}][n={n}]")
            for pi in noncrossing(n):
                sub = check_tilde_lemma(fam, pi, args)
                report.record(sub.ok, f"pi={pi!r}: {sub.failures}")
            reports.append(report)
    return reports


def murua_calibration_oracle(n_max=5):
    """Brute-force inversion of the Boolean-from-monotone relation: compute
    the multilinear monotone cumulants symbolically from multilinear Boolean
    cumulant symbols (through the moment chain) and extract the coefficient
    of each product of Boolean symbols.  Returns {partition: coefficient}
    per n; only irreducible partitions may appear and their coefficients are
    the Murua values.

    Symbols are indexed by subsets of positions; a monomial is a partition
    of [n], so polynomials are dicts {frozenset of blocks: Fraction}."""
    from .partitions import enumerate_partitions

    def pmul(p1, p2):
        out = {}
        for k1, c1 in p1.items():
            for k2, c2 in p2.items():
                k = k1 | k2
                out[k] = out.get(k, Fraction(0)) + c1 * c2
        return {k: c for k, c in out.items() if c != 0}

    def padd(p1, p2, scale=Fraction(1)):
        out = dict(p1)
        for k, c in p2.items():
            out[k] = out.get(k, Fraction(0)) + scale * c
        return {k: c for k, c in out.items() if c != 0}

    results = {}
    for n in range(1, n_max + 1):
        subsets = []
        for mask in range(1, 1 << n):
            subsets.append(tuple(i + 1 for i in range(n) if (mask >> i) & 1))
        # moments of each ordered subset from Boolean cumulant symbols
        mom = {}
        for s in subsets:
            acc = {}
            for pi in enumerate_partitions(len(s), "interval"):
                blocks = [frozenset(s[i - 1] for i in b) for b in pi.blocks]
                term = {frozenset(blocks): Fraction(1)}
                acc = padd(acc, term)
            mom[s] = acc
        # monotone cumulants recursively: m_S = sum over NC(|S|) h_pi/tau!
        hcum = {}
        for s in sorted(subsets, key=len):
            acc = dict(mom[s])
            for pi in noncrossing(len(s)):
                if len(pi.blocks) == 1:
                    continue
                w = Fraction(-1, tree_factorial(pi))
                prod = {frozenset(): Fraction(1)}
                for b in pi.blocks:
                    sub = tuple(s[i - 1] for i in b)
                    prod = pmul(prod, hcum[sub])
                acc = padd(acc, prod, w)
            hcum[s] = acc
        full = tuple(range(1, n + 1))
        results[n] = hcum[full]
    return results


def murua_against_oracle(n_max=5):
    """Compare murua_omega with the calibration oracle coefficients."""
    from .partitions import SetPartition

    report = CheckReport(name="murua_calibration")
    oracle = murua_calibration_oracle(n_max)
    for n in range(1, n_max + 1):
        seen = {}
        for blocks, coeff in oracle[n].items():
            pi = SetPartition(n, [sorted(b) for b in blocks])
            seen[pi] = coeff
            ok = pi.is_noncrossing() and pi.is_irreducible()
            report.record(ok, f"non-irreducible term {pi!r} in oracle")
            if ok:
                report.record(coeff == murua_omega(pi),
                              f"omega({pi!r}) = {murua_omega(pi)} "
                              f"but oracle says {coeff}")
        for pi in irreducibles(n):
            if pi not in seen:
                report.record(murua_omega(pi) == 0,
                              f"oracle omits {pi!r} but omega != 0")
    return report
