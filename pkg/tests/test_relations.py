import random
from fractions import Fraction

import pytest

from oviprob.algebra import WordSpace
from oviprob.cumulants import OperatorCumulants
from oviprob.errors import SizeLimitError
from oviprob.relations import RELATIONS, RelationContext, \
    comb_identity_check, composition_consistency, murua_against_oracle, \
    relation_names, scalar_relation_values, tilde_lemma_suite, \
    verify_all_relations, verify_relation


def F(*a):
    return Fraction(*a)


class TestRelationTable:
    def test_twelve_relations(self):
        assert len(RELATIONS) == 12
        assert len(relation_names(infinitesimal=True)) == 6
        assert len(relation_names(infinitesimal=False)) == 6


class TestSmallCases:
    def test_n2_all_infinitesimal_cumulants_agree(self):
        # only pi = 1_2 is irreducible at n = 2, so dbeta_2 = dr_2 = dh_2
        ws = WordSpace(k=2, seed=9)
        engine = OperatorCumulants(ws.expectation_pair())
        rng = random.Random(1)
        args = (ws.random_arg(rng), ws.random_arg(rng))
        vals = {kind: engine.kappa_partial(kind, args)
                for kind in ("free", "boolean", "monotone")}
        assert vals["free"] == vals["boolean"] == vals["monotone"]

    def test_n3_free_from_boolean_by_hand(self):
        # r_3 = beta_3 - beta_1 beta_2 via NC_irr(3) = {1_3, {{1,3},{2}}}
        vals = [F(2), F(5), F(7)]
        got = scalar_relation_values(vals, "free_from_boolean", 3)
        assert got[2] == vals[2] - vals[0] * vals[1]
        # and the Boolean-from-free direction: beta_3 = r_3 + r_1 r_2
        back = scalar_relation_values(vals, "boolean_from_free", 3)
        assert back[2] == vals[2] + vals[0] * vals[1]


class TestVerifyRelations:
    def test_scalar_all_n5(self):
        for rep in verify_all_relations(n_max=5, mode="scalar", seed=2,
                                        via_tilde=True):
            assert rep.ok, (rep.name, rep.failures)

    def test_m2_all_n4(self):
        for rep in verify_all_relations(n_max=4, mode="m2", seed=2,
                                        via_tilde=True):
            assert rep.ok, (rep.name, rep.failures)

    def test_single_relation_with_shared_context(self):
        ctx = RelationContext(mode="scalar", seed=5, n_max=4)
        rep = verify_relation("inf_monotone_from_free", ctx=ctx)
        assert rep.ok

    def test_cap(self):
        with pytest.raises(SizeLimitError):
            RelationContext(n_max=7)


class TestCombIdentity:
    def test_sigma_full_trivial(self):
        rep = comb_identity_check(2)
        assert rep.ok

    @pytest.mark.parametrize("n", [3, 4, 5, 6])
    def test_exact(self, n):
        rep = comb_identity_check(n)
        assert rep.ok, rep.failures

    def test_cap(self):
        with pytest.raises(SizeLimitError):
            comb_identity_check(8)


class TestConsistency:
    def test_composition_round_trips(self):
        rep = composition_consistency(6, seed=3)
        assert rep.ok, rep.failures

    def test_murua_oracle(self):
        rep = murua_against_oracle(5)
        assert rep.ok, rep.failures


class TestTildeLemmaSuite:
    def test_n3_all_families(self):
        reports = tilde_lemma_suite(n_max=3, seed=1)
        assert all(r.ok for r in reports), \
            [(r.name, r.failures) for r in reports if not r.ok]
