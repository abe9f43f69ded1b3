import random
from fractions import Fraction

import pytest

from oviprob.algebra import SquareMatrix
from oviprob.clt import VariancePair, finite_sum_convergence, iid_space, \
    limit_law_moments, limit_law_moments_tilde, scalar_inf_clt_identity, \
    svi_clt_law_check
from oviprob.errors import OviprobError, SizeLimitError


def F(*a):
    return Fraction(*a)


class TestLimitLawMoments:
    def test_odd_vanishes(self):
        vp = VariancePair.scalar(1, F(1))
        for kind in ("free", "boolean", "monotone"):
            assert limit_law_moments(kind, vp, 5) == (0, 0)

    def test_scalar_k4(self):
        a = F(2, 3)
        vp = VariancePair.scalar(1, a)
        assert limit_law_moments("free", vp, 4) == (2, 4 * a)
        assert limit_law_moments("monotone", vp, 4) == (F(3, 2), 3 * a)
        assert limit_law_moments("boolean", vp, 4) == (1, 2 * a)

    def test_variance_scales(self):
        vp = VariancePair.scalar(F(2), F(0))
        assert limit_law_moments("free", vp, 4)[0] == 8

    def test_prop_51_moment_identity(self):
        # infinitesimal limit moments equal (k/2) alpha (limit moments)
        a = F(3, 5)
        vp = VariancePair.scalar(1, a)
        for kind in ("free", "boolean", "monotone"):
            for k in range(1, 11):
                m, dm = limit_law_moments(kind, vp, k)
                assert dm == F(k, 2) * a * m, (kind, k)

    def test_bad_args(self):
        vp = VariancePair.scalar(1, F(1))
        with pytest.raises(OviprobError):
            limit_law_moments("free", vp, 4, b_args=(F(1),) * 3)
        with pytest.raises(OviprobError):
            limit_law_moments("tensor", vp, 4)


class TestOperatorMode:
    def rand_linear_map(self, rng):
        mats = [SquareMatrix([[F(rng.randint(-3, 3), rng.randint(1, 3))
                               for _ in range(2)] for _ in range(2)])
                for _ in range(2)]
        return lambda b: mats[0] * b * mats[1]

    @pytest.mark.parametrize("kind", ["free", "boolean", "monotone"])
    def test_tilde_route_m2(self, kind):
        rng = random.Random(41)
        vp = VariancePair(self.rand_linear_map(rng),
                          self.rand_linear_map(rng))
        bargs = tuple(SquareMatrix([[F(rng.randint(-2, 2), 2)
                                     for _ in range(2)] for _ in range(2)])
                      for _ in range(7))
        for k in (2, 4, 6):
            assert limit_law_moments(kind, vp, k, bargs[:k + 1]) == \
                limit_law_moments_tilde(kind, vp, k, bargs[:k + 1])


class TestScalarIdentity:
    def test_alpha_zero(self):
        rep, law = scalar_inf_clt_identity("free", F(0), 8)
        assert rep.ok and set(law.inf_moments) == {0}

    @pytest.mark.parametrize("kind", ["free", "boolean", "monotone"])
    def test_identity_L10(self, kind):
        rep, law = scalar_inf_clt_identity(kind, F(1), 10)
        assert rep.ok, rep.failures

    def test_boolean_inf_moments_are_k_over_2(self):
        _, law = scalar_inf_clt_identity("boolean", F(1), 10)
        assert law.inf_moments == (0, 1, 0, 2, 0, 3, 0, 4, 0, 5)

    def test_free_m4(self):
        _, law = scalar_inf_clt_identity("free", F(1), 6)
        assert law.moments[3] == 2 and law.inf_moments[3] == 4


class TestSviLaws:
    @pytest.mark.parametrize("kind", ["free", "boolean", "monotone"])
    def test_within_tolerance(self, kind):
        rep, rows = svi_clt_law_check(kind, F(1), k_max=8, tol=1e-8)
        assert rep.ok, rep.failures

    def test_monotone_k4_value(self):
        _, rows = svi_clt_law_check("monotone", F(1), k_max=4)
        row = next(r for r in rows if r["k"] == 4)
        assert abs(row["value"] - 3.0) < 1e-8

    def test_free_k2_value(self):
        _, rows = svi_clt_law_check("free", F(1), k_max=2)
        row = next(r for r in rows if r["k"] == 2)
        assert abs(row["value"] - 1.0) < 1e-8

    def test_boolean_rows_exact(self):
        _, rows = svi_clt_law_check("boolean", F(2), k_max=6)
        assert all(r["mode"] == "exact" for r in rows)
        row = next(r for r in rows if r["k"] == 4)
        assert row["value"] == 4  # (k/2) alpha m_k at alpha = 2


class TestFiniteSums:
    MOM = (F(0), F(1), F(0), F(3))
    INF = (F(0), F(1), F(0), F(0))

    def test_variance_is_n_invariant(self):
        rows = finite_sum_convergence("boolean", self.MOM, self.INF, 2,
                                      (1, 3, 6))
        assert all(r["value"] == 1 for r in rows)

    @pytest.mark.parametrize("kind", ["free", "boolean", "monotone"])
    def test_gap_shrinks(self, kind):
        rows = finite_sum_convergence(kind, self.MOM, self.INF, 4, (2, 6))
        assert rows[1]["gap"] < rows[0]["gap"]
        assert rows[1]["inf_gap"] < rows[0]["inf_gap"]

    def test_boolean_k4_between_start_and_limit(self):
        rows = finite_sum_convergence("boolean", self.MOM, self.INF, 4,
                                      (1, 4))
        start, at4 = rows[0]["value"], rows[1]["value"]
        assert start == 3
        assert 1 < at4 < 3  # limit is 1, trend toward it

    def test_free_k4_limit_2(self):
        rows = finite_sum_convergence("free", self.MOM, self.INF, 4, (6,))
        assert rows[0]["limit"] == 2
        assert abs(rows[0]["value"] - 2) <= F(1, 2)  # O(1/N)

    def test_centered_required(self):
        with pytest.raises(OviprobError):
            finite_sum_convergence("free", (F(1), F(1)), (F(0), F(0)), 2)

    def test_caps(self):
        with pytest.raises(SizeLimitError):
            finite_sum_convergence("free", self.MOM, self.INF, 7)

    def test_iid_space_orders(self):
        sp = iid_space("monotone", self.MOM, self.INF, 3, cap=4)
        assert len(sp.families) == 3
