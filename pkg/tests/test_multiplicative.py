import random
from fractions import Fraction
from math import prod

import pytest

from oviprob.algebra import Triangular, WordSpace
from oviprob.cumulants import OperatorCumulants
from oviprob.errors import OviprobError, PartitionClassError
from oviprob.multiplicative import MultilinearFamily, apply_partial, \
    apply_partial_block, apply_partition, check_tilde_lemma, \
    check_weighted_multiplicativity, tilde_family, _delete_block, _merge
from oviprob.partitions import SetPartition, full, noncrossing, tree_factorial


def sp(*blocks):
    n = max(max(b) for b in blocks)
    return SetPartition(n, blocks)


@pytest.fixture(scope="module")
def m2():
    ws = WordSpace(k=2, seed=11, gaussian=True)
    engine = OperatorCumulants(ws.expectation_pair())
    rng = random.Random(7)
    args = tuple(ws.random_arg(rng) for _ in range(6))
    return ws, engine, args


class TestApplyPartition:
    def test_full_block_is_base_case(self):
        fam = MultilinearFamily(lambda a: prod(a))
        assert apply_partition(fam, full(3), (2, 3, 5)) == 30

    def test_scalar_toy(self):
        fam = MultilinearFamily(lambda a: prod(a))
        pi = sp((1, 2), (3,))
        assert apply_partition(fam, pi, (Fraction(2), Fraction(3),
                                         Fraction(5))) == 30

    def test_nested_expectation(self, m2):
        ws, engine, args = m2
        mom = engine.moment_family
        lhs = apply_partition(mom, sp((1, 3), (2,)), args[:3])
        rhs = ws.E(args[0] * ws.E(args[1]) * args[2])
        assert lhs == rhs

    def test_crossing_rejected(self, m2):
        _, engine, args = m2
        with pytest.raises(PartitionClassError):
            apply_partition(engine.moment_family, sp((1, 3), (2, 4)), args[:4])

    def test_arity_mismatch(self, m2):
        _, engine, args = m2
        with pytest.raises(OviprobError):
            apply_partition(engine.moment_family, full(3), args[:2])

    def test_elimination_order_independence(self, m2):
        ws, engine, args = m2
        mom = engine.moment_family

        def apply_rightmost(f, pi, a):
            if len(pi.blocks) == 1:
                return f(a)
            vs = [b for b in pi.blocks
                  if b[-1] - b[0] + 1 == len(b) and len(b) < pi.n]
            v = vs[-1]
            l, k = v[0] - 1, len(v)
            return apply_rightmost(f, _delete_block(pi, v),
                                   _merge(a, l, k, f(a[l:l + k])))

        for n in (4, 5, 6):
            for pi in noncrossing(n):
                assert apply_partition(mom, pi, args[:n]) == \
                    apply_rightmost(mom.f, pi, args[:n])

    def test_multilinearity_spot(self, m2):
        ws, engine, args = m2
        mom = engine.moment_family
        rng = random.Random(3)
        extra = ws.random_arg(rng)
        c = Fraction(3, 2)
        for pi in (sp((1, 3), (2,)), sp((1,), (2, 3))):
            a, b, d = args[:3]
            lhs = apply_partition(mom, pi, (a, b * c + extra, d))
            rhs = c * apply_partition(mom, pi, (a, b, d)) \
                + apply_partition(mom, pi, (a, extra, d))
            assert lhs == rhs


class TestApplyPartial:
    def test_single_block(self, m2):
        _, engine, args = m2
        mom = engine.moment_family
        assert apply_partial(mom, full(2), args[:2]) == \
            mom.partial(args[:2])

    def test_one_block_one_summand(self, m2):
        ws, engine, args = m2
        mom = engine.moment_family
        assert apply_partial(mom, sp((1, 2)), args[:2]) == \
            ws.Eprime(args[0] * args[1])

    def test_two_singletons(self, m2):
        ws, engine, args = m2
        mom = engine.moment_family
        a, b = args[:2]
        expected = ws.Eprime(a) * ws.E(b) + ws.E(a) * ws.Eprime(b)
        assert apply_partial(mom, sp((1,), (2,)), (a, b)) == expected

    def test_block_sum_decomposition(self, m2):
        _, engine, args = m2
        mom = engine.moment_family
        for pi in noncrossing(4):
            total = None
            for v in pi.blocks:
                term = apply_partial_block(mom, pi, v, args[:4])
                total = term if total is None else total + term
            assert total == apply_partial(mom, pi, args[:4])

    def test_missing_companion(self):
        fam = MultilinearFamily(lambda a: prod(a))
        with pytest.raises(OviprobError):
            apply_partial(fam, full(2), (1, 2))


class TestTildeLemma:
    def test_zero_derivs_reduce_to_partial(self, m2):
        ws, engine, args = m2
        mom = engine.moment_family
        zero = ws.zero()
        targs = tuple(Triangular(a, zero) for a in args[:2])
        lifted = apply_partition(tilde_family(mom), full(2), targs)
        assert lifted.deriv == mom.partial(args[:2])

    def test_all_nc4_moment_family(self, m2):
        ws, engine, _ = m2
        mom = engine.moment_family
        rng = random.Random(5)
        targs = tuple(Triangular(ws.random_arg(rng), ws.random_arg(rng))
                      for _ in range(4))
        for pi in noncrossing(4):
            assert check_tilde_lemma(mom, pi, targs).ok

    def test_formal_space_family(self):
        from oviprob.algebra import Family, FormalSpace
        fx = Family("fx", ("x",), 0,
                    {("x",): Fraction(1, 2), ("x", "x"): Fraction(2)},
                    {("x",): Fraction(1), ("x", "x"): Fraction(3)})
        fy = Family("fy", ("y",), 1,
                    {("y",): Fraction(-1), ("y", "y"): Fraction(1)},
                    {("y",): Fraction(2), ("y", "y"): Fraction(1, 3)})
        space = FormalSpace([fx, fy], "boolean")
        engine = OperatorCumulants(space.expectation_pair())
        mom = engine.moment_family
        x, y = space.letter("x"), space.letter("y")
        targs = (Triangular(x, y), Triangular(y, x), Triangular(x * y, x))
        assert check_tilde_lemma(mom, sp((1, 3), (2,)), targs).ok


class TestWeightedMultiplicativity:
    def test_c_equal_one(self, m2):
        _, engine, args = m2
        rep = check_weighted_multiplicativity(
            engine.moment_family, lambda pi: Fraction(1), 4, args[:4])
        assert rep.ok, rep.failures

    def test_irreducible_tree_weight(self, m2):
        _, engine, args = m2

        def c(pi):
            if not pi.is_irreducible():
                return Fraction(0)
            return Fraction(1, tree_factorial(pi))

        for n in (3, 4, 5):
            rep = check_weighted_multiplicativity(
                engine.moment_family, c, n, args[:n])
            assert rep.ok, rep.failures

    def test_n1_trivial(self, m2):
        _, engine, args = m2
        rep = check_weighted_multiplicativity(
            engine.moment_family, lambda pi: Fraction(1), 1, args[:1])
        assert rep.ok and rep.checks == 0
