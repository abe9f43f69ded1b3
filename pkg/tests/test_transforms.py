import random
from fractions import Fraction

import numpy as np
import pytest

from oviprob.algebra.exact import RatPoly
from oviprob.cumulants import CumulantFamily, InfinitesimalLaw, \
    cumulants_to_moments, moments_to_cumulants
from oviprob.errors import TruncationError
from oviprob.transforms import OVPoint, TruncatedSeries, \
    boolean_convolve_infinitesimal, boolean_matrix_model, \
    free_convolve_infinitesimal, law_to_series, monotone_convolve_infinitesimal, \
    ov_boolean_identity_check, ov_monotone_identity_check, ov_transform_eval, \
    path_derivative_check, r_series_coefficients, series_to_law


def F(*a):
    return Fraction(*a)


def rand_law(rng, L=8):
    return InfinitesimalLaw(
        tuple(F(rng.randint(-4, 4), rng.randint(1, 3)) for _ in range(L)),
        tuple(F(rng.randint(-4, 4), rng.randint(1, 3)) for _ in range(L)))


class TestSeriesArithmetic:
    def test_mul_and_reciprocal(self):
        s = TruncatedSeries({1: F(1), 2: F(3)}, 5)
        r = s.reciprocal()
        prod = s * r
        ok, where, order = prod.agrees(TruncatedSeries.one(order=prod.order))
        assert ok, where

    def test_reciprocal_order_gain_on_head(self):
        f = TruncatedSeries({-1: F(1), 0: F(2), 1: F(5)}, 1)
        g = f.reciprocal()
        assert g.order == 3 and g.val() == 1

    def test_zero_leading_reciprocal_raises(self):
        with pytest.raises(TruncationError):
            TruncatedSeries({}, 4).reciprocal()

    def test_beyond_order_read_raises(self):
        s = TruncatedSeries({1: F(1)}, 3)
        with pytest.raises(TruncationError):
            s.c(4)

    def test_differentiate(self):
        s = TruncatedSeries({-1: F(2), 0: F(7), 1: F(3), 2: F(5)}, 2)
        d = s.differentiate()
        # d/dz (2z + 7 + 3/z + 5/z^2) = 2 - 3/z^2 - 10/z^3
        assert d.coeffs == {0: F(2), 2: F(-3), 3: F(-10)}

    def test_compose_head_requirement(self):
        g = TruncatedSeries({1: F(1)}, 4)
        bad = TruncatedSeries({1: F(1)}, 4)
        with pytest.raises(TruncationError):
            g.compose(bad)

    def test_compose_identity(self):
        g = TruncatedSeries({1: F(1), 2: F(4), 3: F(-2)}, 6)
        z = TruncatedSeries.zvar(8)
        ok, where, _ = g.compose(z).agrees(g)
        assert ok

    def test_json_round_trip(self):
        s = TruncatedSeries({-1: F(1), 1: F(2, 3)}, 4)
        t = TruncatedSeries.from_json(s.to_json())
        assert t.coeffs == s.coeffs and t.order == s.order


class TestLawToSeries:
    def test_point_mass(self):
        law = InfinitesimalLaw.from_moments([F(0)] * 6)
        s = law_to_series(law)
        assert s.G.coeffs == {1: F(1)}
        assert s.F.coeffs == {-1: F(1)}
        assert s.B.coeffs == {}
        assert s.g.coeffs == {}

    def test_semicircle_matches_closed_form(self):
        # G = (z - sqrt(z^2-4))/2 expands with Catalan coefficients
        law = InfinitesimalLaw.from_moments(
            [F(0), F(1), F(0), F(2), F(0), F(5), F(0), F(14)])
        s = law_to_series(law)
        z = 7.0
        closed = (z - (z * z - 4) ** 0.5) / 2
        assert abs(s.G.evaluate(z) - closed) < 1e-7

    def test_bernoulli_geometric(self):
        law = InfinitesimalLaw.from_moments([F(0), F(1)] * 3)
        s = law_to_series(law)
        assert s.G.coeffs == {1: F(1), 3: F(1), 5: F(1), 7: F(1)}

    def test_gf_identity_and_b_head(self):
        rng = random.Random(0)
        law = rand_law(rng)
        s = law_to_series(law)
        prod = s.G * s.F
        ok, where, _ = prod.agrees(TruncatedSeries.one(prod.order))
        assert ok
        # B = z - F has no linear term exactly because F has head z
        assert s.B.coeffs.get(-1, 0) == 0
        assert s.F.coeffs[-1] == 1

    def test_round_trip(self):
        rng = random.Random(1)
        law = rand_law(rng)
        s = law_to_series(law)
        assert series_to_law(s.G, s.g, law.order) == law


class TestRSeries:
    def test_matches_partition_route(self):
        rng = random.Random(2)
        for _ in range(5):
            law = rand_law(rng)
            fam = moments_to_cumulants(law, "free")
            r = r_series_coefficients(law_to_series(law).G, law.order)
            assert tuple(r) == fam.values

    def test_needs_invertible_leading(self):
        with pytest.raises(TruncationError):
            r_series_coefficients(TruncatedSeries({2: F(1)}, 5), 3)


class TestConvolutions:
    def test_boolean_neutral(self):
        rng = random.Random(3)
        mu = rand_law(rng)
        pt = InfinitesimalLaw.from_moments([F(0)] * 8)
        law, rep = boolean_convolve_infinitesimal(mu, pt)
        assert rep.ok and law == mu

    def test_boolean_tA_pair(self):
        # the honest Boolean convolution of two T_A laws: cumulants add, so
        # m'_4 = 2 b'_4(T_A) - 8 = -6; the matrix model's -4 is precisely the
        # independence violation of the appendix
        ta = InfinitesimalLaw((F(0), F(1), F(0), F(1)),
                              (F(0), F(-1), F(0), F(-1)))
        law, rep = boolean_convolve_infinitesimal(ta, ta)
        assert rep.ok
        assert law.moments == (0, 2, 0, 4)
        assert law.inf_moments[:2] == (0, -2)
        assert law.inf_moments[3] == -6

    @pytest.mark.parametrize("op", [boolean_convolve_infinitesimal,
                                    monotone_convolve_infinitesimal,
                                    free_convolve_infinitesimal])
    def test_random_laws_agree(self, op):
        rng = random.Random(4)
        for _ in range(3):
            law, rep = op(rand_law(rng), rand_law(rng))
            assert rep.ok, rep.failures

    def test_monotone_neutral(self):
        rng = random.Random(5)
        mu = rand_law(rng)
        pt = InfinitesimalLaw.from_moments([F(0)] * 8)
        law, rep = monotone_convolve_infinitesimal(mu, pt)
        assert rep.ok and law == mu
        law, rep = monotone_convolve_infinitesimal(pt, mu)
        assert rep.ok and law == mu

    def test_monotone_arcsine_square(self):
        arc = cumulants_to_moments(CumulantFamily(
            "monotone", (F(0), F(1)) + (F(0),) * 6, (F(0),) * 8))
        law, rep = monotone_convolve_infinitesimal(arc, arc)
        assert rep.ok
        # arcsine of variance 2: m_2k = C(2k,k)/2^k * 2^k
        assert law.moments[1] == 2 and law.moments[3] == 6

    def test_free_semicircle(self):
        semi = InfinitesimalLaw.from_moments([F(0), F(1), F(0), F(2),
                                              F(0), F(5)])
        law, rep = free_convolve_infinitesimal(semi, semi)
        assert rep.ok
        assert law.moments[1] == 2 and law.moments[3] == 8

    def test_free_neutral(self):
        rng = random.Random(6)
        mu = rand_law(rng)
        pt = InfinitesimalLaw.from_moments([F(0)] * 8)
        law, rep = free_convolve_infinitesimal(mu, pt)
        assert rep.ok and law == mu


class TestPaths:
    def test_constant_path(self):
        rep = path_derivative_check([F(1)] * 6, [F(0), F(2)] + [F(0)] * 4,
                                    "boolean", 6)
        assert rep.ok

    def test_linear_paths(self):
        t = RatPoly.t()
        mu = [RatPoly(0), t, RatPoly(0), 2 * t * t, RatPoly(0), RatPoly(0)]
        nu = [RatPoly(0), 1 + t, RatPoly(0), t, RatPoly(0), RatPoly(0)]
        for kind in ("boolean", "monotone"):
            rep = path_derivative_check(mu, nu, kind, 6)
            assert rep.ok, (kind, rep.failures)

    def test_quadratic_paths(self):
        t = RatPoly.t()
        mu = [t, 1 + t * t, RatPoly(0), t, RatPoly(0), RatPoly(0)]
        nu = [RatPoly(0), RatPoly(2), t, t * t, RatPoly(0), RatPoly(0)]
        for kind in ("boolean", "monotone"):
            rep = path_derivative_check(mu, nu, kind, 6)
            assert rep.ok, (kind, rep.failures)


class TestOVEval:
    def test_x_zero_gives_binv(self):
        space, X, Y = boolean_matrix_model(2, seed=0)
        zero = X - X
        b = OVPoint(np.array([[2j, 0.1], [0.1, 3j]]))
        t = ov_transform_eval(zero, space, b, L=4, rho=1.0)
        assert np.allclose(t.G, np.linalg.inv(b.matrix))
        assert np.allclose(t.g, 0)

    def test_k1_matches_scalar_series(self):
        from oviprob.algebra import Family, FormalSpace
        fx = Family("fx", ("x",), 0,
                    {("x",): F(1, 2), ("x", "x"): F(1, 3)},
                    {("x",): F(1, 4), ("x", "x"): F(1, 5)})
        space = FormalSpace([fx], "boolean", cap=12)
        from oviprob.algebra import SquareMatrix
        X = SquareMatrix([[space.letter("x")]])
        z = 4j
        b = OVPoint(np.array([[z]]))
        t = ov_transform_eval(X, space, b, L=10, rho=1.0)
        law = InfinitesimalLaw(
            tuple(space.phi_word(("x",) * n) for n in range(1, 11)),
            tuple(space.phi_prime_word(("x",) * n) for n in range(1, 11)))
        s = law_to_series(law)
        assert abs(t.G[0, 0] - s.G.evaluate(z)) <= t.tail_bound * 2
        assert abs(t.g[0, 0] - s.g.evaluate(z)) <= t.tail_bound * 2

    def test_imaginary_part_validated(self):
        with pytest.raises(Exception):
            OVPoint(np.array([[1.0, 0], [0, 1.0]]))

    def test_divergent_tail(self):
        from oviprob.errors import DivergentTailError
        space, X, Y = boolean_matrix_model(2, seed=1)
        b = OVPoint(np.eye(2) * 0.05j)
        with pytest.raises(DivergentTailError):
            ov_transform_eval(X, space, b, L=4)

    def test_thm_boolean_ov(self):
        rep = ov_boolean_identity_check(k=2, seed=0, L=5)
        assert rep.ok, rep.failures

    def test_thm_monotone_ov(self):
        rep = ov_monotone_identity_check(k=2, seed=0, L=8)
        assert rep.ok, rep.failures
