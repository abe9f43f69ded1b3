"""Central-limit machinery: the three limit laws with infinitesimal
companions (scalar and operator-valued), finite-sum convergence tables, the
scalar derivative identity g = (-a/2) (zG)', and numeric checks of the
explicit scalar infinitesimal limit laws.

Normalization note: the Bernoulli limit law used here is (delta_1 +
delta_-1)/2, so the atomic pair f'' representing the Boolean infinitesimal
limit carries weight a/4 per atom.  The unnormalized weight a/2 would double
every infinitesimal moment; the identity m'_k = (k/2) a m_k pins the
normalized value.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb, cos, sin

from .algebra.spaces import Family, FormalSpace
from .algebra.triangular import Triangular
from .cumulants import InfinitesimalLaw
from .errors import OviprobError, SizeLimitError
from .multiplicative import CheckReport
from .partitions import noncrossing_pairings, tree_factorial
from .transforms import TruncatedSeries, law_to_series


@dataclass(frozen=True)
class VariancePair:
    """Variance and infinitesimal variance maps eta, eta' : B -> B."""

    eta: object
    eta_prime: object

    @classmethod
    def scalar(cls, v=Fraction(1), alpha=Fraction(0)):
        v, alpha = Fraction(v), Fraction(alpha)
        return cls(eta=lambda b: v * b, eta_prime=lambda b: alpha * b)

    def lifted(self):
        """eta~ on triangular pairs: (b, b') -> (eta b, eta b' + eta' b)."""
        def eta_t(t):
            return Triangular(self.eta(t.base),
                              self.eta(t.deriv) + self.eta_prime(t.base))

        def eta_prime_t(t):
            z = self.eta(t.base) - self.eta(t.base)
            return Triangular(z, z)

        return VariancePair(eta_t, eta_prime_t)


def pairing_eval(pairing, items, eta, eta_prime=None, prime_pair=None):
    """Evaluate eta_pi: items = (b_0 .. b_k) interleaving k paired slots;
    an innermost pair (s, s+1) collapses b_{s-1}, b_s, b_{s+1} into
    b_{s-1} * eta(b_s) * b_{s+1}.  With prime_pair set, that one pair uses
    eta' instead (one Leibniz term of the infinitesimal companion)."""
    pairs = sorted(tuple(sorted(p)) for p in pairing)
    items = list(items)
    while pairs:
        s, t = next(p for p in pairs if p[1] == p[0] + 1)
        if (s, t) == prime_pair:
            val = eta_prime(items[s])
            prime_pair = None
        else:
            val = eta(items[s])
        items[s - 1:s + 2] = [items[s - 1] * val * items[s + 1]]
        pairs.remove((s, t))
        relabel = lambda a: a - 2 if a > t else a  # noqa: E731
        pairs = [(relabel(a), relabel(b)) for a, b in pairs]
        if prime_pair is not None:
            prime_pair = (relabel(prime_pair[0]), relabel(prime_pair[1]))
    return items[0]


def _pairing_blocks(pi):
    return [tuple(b) for b in pi.blocks]


def limit_law_moments(kind, vp, k, b_args=None):
    """(moment, infinitesimal moment) of order k of the central limit law:
    semicircle / Bernoulli / arcsine sums over non-crossing pairings with
    weights 1, [interval pairing], 1/tau(pi)!, and their Leibniz companions."""
    if kind not in ("free", "boolean", "monotone"):
        raise OviprobError(f"unknown kind {kind!r}")
    if b_args is None:
        b_args = (Fraction(1),) * (k + 1)
    b_args = tuple(b_args)
    if len(b_args) != k + 1:
        raise OviprobError(f"need k+1 = {k + 1} base arguments")
    zero = b_args[0] * 0
    if k % 2:
        return zero, zero
    if kind == "boolean":
        pairings = [tuple((2 * i + 1, 2 * i + 2) for i in range(k // 2))]
        weights = [Fraction(1)]
    else:
        ps = noncrossing_pairings(k)
        pairings = [_pairing_blocks(p) for p in ps]
        weights = [Fraction(1) if kind == "free"
                   else Fraction(1, tree_factorial(p)) for p in ps]
    mom, dmom = zero, zero
    for pairing, w in zip(pairings, weights):
        mom = mom + w * pairing_eval(pairing, b_args, vp.eta)
        for pair in pairing:
            dmom = dmom + w * pairing_eval(pairing, b_args, vp.eta,
                                           vp.eta_prime, prime_pair=pair)
    return mom, dmom


def limit_law_moments_tilde(kind, vp, k, b_args=None):
    """The same moments through the triangular lift: compute with eta~ on
    lifted base arguments and read (diagonal, corner)."""
    if b_args is None:
        b_args = (Fraction(1),) * (k + 1)
    lifted_args = tuple(Triangular(b, b * 0) for b in b_args)
    val, _ = limit_law_moments(kind, vp.lifted(), k, lifted_args)
    return val.base, val.deriv


def iid_space(kind, moments, inf_moments, N, cap):
    """N identically distributed families (letters a1..aN), for finite-sum
    convergence experiments; family i gets monotone order i."""
    fams = []
    for i in range(1, N + 1):
        let = f"a{i}"
        fams.append(Family(
            f"f{i}", (let,), order=i,
            moments={(let,) * n: v for n, v in enumerate(moments, start=1)},
            inf_moments={(let,) * n: v
                         for n, v in enumerate(inf_moments, start=1)}))
    return FormalSpace(fams, kind, cap=cap)


def finite_sum_convergence(kind, moments, inf_moments, k, n_values=(1, 2, 4, 6)):
    """Exact moments of S_N = (a_1 + .. + a_N)/sqrt(N) for centered
    identically distributed families, with the distance to the limit law.

    Odd k with a nonzero raw moment would need sqrt(N); those entries are
    reported as floats, everything else is exact."""
    if moments[0] != 0:
        raise OviprobError("finite_sum_convergence expects centered families")
    if k > 6 or max(n_values) > 6:
        raise SizeLimitError("finite_sum_convergence caps at N <= 6, k <= 6")
    vp = VariancePair.scalar(moments[1], inf_moments[1])
    lim, dlim = limit_law_moments(kind, vp, k)
    rows = []
    for N in n_values:
        space = iid_space(kind, moments, inf_moments, N, cap=k)
        letters = [f"a{i}" for i in range(1, N + 1)]
        raw, draw = Fraction(0), Fraction(0)
        for idx in range(N ** k):
            word = []
            t = idx
            for _ in range(k):
                word.append(letters[t % N])
                t //= N
            v, dv = space.mixed_moment(tuple(word))
            raw, draw = raw + v, draw + dv
        if k % 2 == 0:
            scale = Fraction(1, N ** (k // 2))
            val, dval = raw * scale, draw * scale
        elif raw == 0 and draw == 0:
            val, dval = Fraction(0), Fraction(0)
        else:
            val, dval = float(raw) / N ** (k / 2), float(draw) / N ** (k / 2)
        rows.append({"N": N, "k": k, "value": val, "inf_value": dval,
                     "limit": lim, "inf_limit": dlim,
                     "gap": abs(val - lim), "inf_gap": abs(dval - dlim)})
    return rows


def scalar_inf_clt_identity(kind, alpha, L):
    """Exact series identity g(z) = (-alpha/2) d/dz (z G(z)) for the limit
    law of the given kind, built from the pairing sums (not from the
    identity itself)."""
    vp = VariancePair.scalar(Fraction(1), Fraction(alpha))
    m, dm = [], []
    for n in range(1, L + 1):
        v, dv = limit_law_moments(kind, vp, n)
        m.append(v)
        dm.append(dv)
    law = InfinitesimalLaw(tuple(m), tuple(dm))
    s = law_to_series(law)
    rhs = Fraction(-alpha, 2) * s.G.shift(-1).differentiate()
    ok, where, through = s.g.agrees(rhs, through=L + 1)
    report = CheckReport(name=f"scalar_inf_clt[{kind}]")
    report.record(ok, f"derivative identity fails at z^-{where}")
    return report, law


def _quad(f, a, b):
    from scipy.integrate import quad
    val, err = quad(f, a, b, limit=200, epsabs=1e-12, epsrel=1e-12)
    return val, err


def svi_clt_law_check(kind, alpha, k_max=8, tol=1e-8):
    """Check the explicit scalar infinitesimal limit laws against the moment
    values m'_k = (k/2) alpha m_k.

    free      m' = integral against alpha (mu_1 - mu_2), by quadrature;
    boolean   m' = <f'', t^k> with df = (alpha/4)(delta_-1 - delta_1),
              integrated by parts exactly (normalized weight; the factor-2
              deviation from the unnormalized Bernoulli transform is
              documented, not reproduced);
    monotone  m' = <f'', t^k> with f = (alpha/2 pi) sqrt(2 - t^2), by
              quadrature after t = sqrt(2) sin(theta)."""
    report = CheckReport(name=f"svi_clt[{kind}]")
    rows = []
    vp = VariancePair.scalar(Fraction(1), Fraction(alpha))
    for k in range(1, k_max + 1):
        _, expected = limit_law_moments(kind, vp, k)
        if k % 2:
            got, err, exact = 0.0, 0.0, True
        elif kind == "free":
            def f(th, k=k):
                t = 2 * sin(th)
                return float(alpha) / 3.141592653589793 \
                    * t ** k * (t * t / 2 - 1)
            got, err = _quad(f, -3.141592653589793 / 2,
                             3.141592653589793 / 2)
            exact = False
        elif kind == "monotone":
            def f(th, k=k):
                t = 2 ** 0.5 * sin(th)
                c = 2 ** 0.5 * cos(th)
                return (float(alpha) / (2 * 3.141592653589793)) * k * (k - 1) \
                    * t ** (k - 2) * c * c
            got, err = _quad(f, -3.141592653589793 / 2,
                             3.141592653589793 / 2)
            exact = False
        else:
            # <f'', t^k> = (alpha/4) k(k-1) int_{-1}^{1} t^(k-2) dt, exactly
            c = Fraction(alpha) / 4
            got = c * k * (k - 1) * (Fraction(1) - Fraction(-1) ** (k - 1)) \
                / (k - 1) if k >= 2 else Fraction(0)
            err, exact = 0.0, True
        if exact:
            ok = got == expected
            gap = abs(Fraction(got) - expected)
        else:
            gap = abs(got - float(expected))
            ok = gap <= tol
        report.record(ok, f"k={k}: law pairing {got} vs moment {expected}")
        rows.append({"k": k, "value": got, "expected": expected,
                     "gap": float(gap), "mode": "exact" if exact else
                     f"quad(err<{err:.1e})"})
    return report, rows


def clt_moment_table(kind, alpha, k_max):
    """Limit moments and infinitesimal moments with the (k/2) alpha m_k law."""
    vp = VariancePair.scalar(Fraction(1), Fraction(alpha))
    rows = []
    for k in range(1, k_max + 1):
        v, dv = limit_law_moments(kind, vp, k)
        rows.append({"k": k, "moment": v, "inf_moment": dv,
                     "half_k_alpha_m": Fraction(k, 2) * Fraction(alpha) * v})
    return rows


def catalan_number(n):
    return comb(2 * n, n) // (n + 1)
