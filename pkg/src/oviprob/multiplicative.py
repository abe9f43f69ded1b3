"""The f_pi calculus: evaluating multiplicative families on non-crossing
partitions, their partial (infinitesimal) extensions, the merged triangular
family, and report-style checkers for the two structural lemmas the cumulant
relations rest on.

A family is a single callable on argument tuples (the arity is the tuple
length).  f_pi is evaluated by repeatedly eliminating the leftmost interval
block; the value of the eliminated block is multiplied into its left
neighbour, or into the right neighbour when the block starts at position 1.
Independence of the elimination order holds for bimodule families and is a
*test*, not an assumption.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import OviprobError, PartitionClassError
from .partitions import SetPartition, noncrossing
from .algebra.triangular import Triangular


class MultilinearFamily:
    """Arity-indexed multilinear maps f (and optional companion partial f)."""

    def __init__(self, f, partial=None, name=""):
        self.f = f
        self.partial = partial
        self.name = name

    def cached(self):
        """Same family with dict-backed memoization on argument tuples."""
        fcache, pcache = {}, {}

        def f(args, _f=self.f):
            v = fcache.get(args)
            if v is None:
                v = _f(args)
                fcache[args] = v
            return v

        partial = None
        if self.partial is not None:
            def partial(args, _p=self.partial):
                v = pcache.get(args)
                if v is None:
                    v = _p(args)
                    pcache[args] = v
                return v

        return MultilinearFamily(f, partial, name=self.name)


def _leftmost_interval_block(pi):
    for b in pi.blocks:
        if b[-1] - b[0] + 1 == len(b) and len(b) < pi.n:
            return b
    raise AssertionError("a non-crossing partition always has an interval block")


def _delete_block(pi, v):
    k = len(v)
    lo = v[0]
    blocks = [tuple(x if x < lo else x - k for x in b)
              for b in pi.blocks if b != v]
    return SetPartition(pi.n - k, blocks)


def _relabel(v, removed):
    k = len(removed)
    lo = removed[0]
    return tuple(x if x < lo else x - k for x in v)


def _merge(args, l, k, inner):
    """Splice the value of an eliminated block into its neighbour."""
    if l > 0:
        return args[:l - 1] + (args[l - 1] * inner,) + args[l + k:]
    return (inner * args[k],) + args[k + 1:]


def _apply(f, pi, args):
    if len(pi.blocks) == 1:
        return f(args)
    v = _leftmost_interval_block(pi)
    l, k = v[0] - 1, len(v)
    inner = f(args[l:l + k])
    return _apply(f, _delete_block(pi, v), _merge(args, l, k, inner))


def apply_partition(fam, pi, args):
    """f_pi(args) by recursive interval-block elimination."""
    if not pi.is_noncrossing():
        raise PartitionClassError("f_pi requires a non-crossing partition")
    args = tuple(args)
    if len(args) != pi.n:
        raise OviprobError(f"arity mismatch: {len(args)} args for n={pi.n}")
    return _apply(fam.f, pi, args)


def _apply_partial_v(f, df, pi, v, args):
    if len(pi.blocks) == 1:
        return df(args)
    w = _leftmost_interval_block(pi)
    l, k = w[0] - 1, len(w)
    if w == v:
        inner = df(args[l:l + k])
        return _apply(f, _delete_block(pi, w), _merge(args, l, k, inner))
    inner = f(args[l:l + k])
    return _apply_partial_v(f, df, _delete_block(pi, w), _relabel(v, w),
                            _merge(args, l, k, inner))


def apply_partial_block(fam, pi, v, args):
    """partial f_{pi,V}: f_pi with the companion used for block V only."""
    if fam.partial is None:
        raise OviprobError("family has no partial companion")
    if not pi.is_noncrossing():
        raise PartitionClassError("partial f_pi requires a non-crossing partition")
    return _apply_partial_v(fam.f, fam.partial, pi, tuple(v), tuple(args))


def apply_partial(fam, pi, args):
    """partial f_pi = sum over blocks V of partial f_{pi,V}."""
    if fam.partial is None:
        raise OviprobError("family has no partial companion")
    if not pi.is_noncrossing():
        raise PartitionClassError("partial f_pi requires a non-crossing partition")
    args = tuple(args)
    if len(args) != pi.n:
        raise OviprobError(f"arity mismatch: {len(args)} args for n={pi.n}")
    total = None
    for v in pi.blocks:
        term = _apply_partial_v(fam.f, fam.partial, pi, v, args)
        total = term if total is None else total + term
    return total


def tilde_family(fam):
    """Merge (f, partial f) into the triangular family f~ acting on pairs."""
    if fam.partial is None:
        raise OviprobError("tilde family needs a partial companion")

    def f_tilde(args):
        bases = tuple(a.base for a in args)
        corner = fam.partial(bases)
        for j in range(len(args)):
            corner = corner + fam.f(bases[:j] + (args[j].deriv,) + bases[j + 1:])
        return Triangular(fam.f(bases), corner)

    return MultilinearFamily(f_tilde, name=f"~{fam.name}")


@dataclass
class CheckReport:
    name: str
    ok: bool = True
    checks: int = 0
    failures: list = field(default_factory=list)

    def record(self, ok, detail):
        self.checks += 1
        if not ok:
            self.ok = False
            self.failures.append(detail)

    def to_json(self):
        return {"name": self.name, "ok": self.ok, "checks": self.checks,
                "failures": [str(f) for f in self.failures[:5]]}


def check_tilde_lemma(fam, pi, args):
    """Compare f~_pi on triangular inputs with its block formula:
    diagonal f_pi(a), corner  sum_j f_pi(..., a'_j, ...) + partial f_pi(a)."""
    args = tuple(args)
    lhs = apply_partition(tilde_family(fam), pi, args)
    bases = tuple(a.base for a in args)
    corner = apply_partial(fam, pi, bases)
    for j in range(len(args)):
        corner = corner + apply_partition(
            fam, pi, bases[:j] + (args[j].deriv,) + bases[j + 1:])
    rhs = Triangular(apply_partition(fam, pi, bases), corner)
    report = CheckReport(name=f"tilde_lemma[{fam.name}]")
    report.record(lhs.base == rhs.base, f"diagonal mismatch at {pi!r}")
    report.record(lhs.deriv == rhs.deriv, f"corner mismatch at {pi!r}")
    return report


def weighted_family(fam, c, n):
    """g_pi = sum_{sigma <= pi} prod_V c(sigma|V) f_sigma, as a map pi, args -> value."""
    ncn = noncrossing(n)

    def g(pi, args):
        total = None
        for sigma in ncn:
            if not sigma <= pi:
                continue
            coeff = 1
            for v in pi.blocks:
                coeff = coeff * c(sigma.restrict(v))
                if coeff == 0:
                    break
            if coeff == 0:
                continue
            term = coeff * apply_partition(fam, sigma, args)
            total = term if total is None else total + term
        if total is None:
            total = 0 * apply_partition(fam, ncn[0], args)
        return total

    return g


def check_weighted_multiplicativity(fam, c, n, args):
    """Verify the interval-block recursion for g_pi = sum C(sigma,pi) f_sigma
    (the Lemma that weighted convolutions of multiplicative families stay
    multiplicative), on every pi in NC(n) and every interval block choice."""
    from .partitions import noncrossing as _nc

    args = tuple(args)
    report = CheckReport(name="weighted_multiplicativity")
    g_at = {}

    def g_value(pi, a):
        key = (pi, a)
        if key not in g_at:
            g_at[key] = weighted_family(fam, c, pi.n)(pi, a)
        return g_at[key]

    def g_n(sub_args):
        from .partitions import full
        return g_value(full(len(sub_args)), tuple(sub_args))

    for pi in _nc(n):
        if len(pi.blocks) == 1:
            continue
        lhs = g_value(pi, args)
        for v in pi.blocks:
            if v[-1] - v[0] + 1 != len(v):
                continue
            l, k = v[0] - 1, len(v)
            inner = g_n(args[l:l + k])
            rhs = g_value(_delete_block(pi, v), _merge(args, l, k, inner))
            report.record(lhs == rhs,
                          f"recursion fails at pi={pi!r}, block={v}")
    return report
