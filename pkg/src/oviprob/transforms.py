"""Truncated-series transforms G, g, F, B, R and the additive convolutions.

A TruncatedSeries is a finite window of a Laurent series in 1/z (with an
optional z head, used by F-transforms): coeffs[k] is the coefficient of
z^(-k), and coefficients are *reliable* only for k <= order.  Every
operation recomputes the output's reliable order pessimistically, and
reading past it raises, so truncation drift cannot silently corrupt an
identity check.

Coefficients are an arbitrary exact ring (Fraction, QQi, Triangular pairs,
RatPoly for differentiable paths); only leading coefficients are ever
divided by.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .algebra.matrices import SquareMatrix
from .algebra.spaces import Family, FormalSpace
from .algebra.triangular import Triangular
from .cumulants import CumulantFamily, InfinitesimalLaw, cumulants_to_moments, \
    moments_to_cumulants
from .errors import DivergentTailError, OviprobError, TruncationError
from .multiplicative import CheckReport

_INF = 10 ** 9


def _inv(c):
    if isinstance(c, int):
        return Fraction(1, c)
    return 1 / c


class TruncatedSeries:
    __slots__ = ("coeffs", "order")

    def __init__(self, coeffs, order):
        self.coeffs = {k: v for k, v in coeffs.items()
                       if k <= order and not (v == 0)}
        self.order = order
        if any(k < -1 for k in self.coeffs):
            raise OviprobError("series may carry at most a linear head z")

    @classmethod
    def zero(cls, order):
        return cls({}, order)

    @classmethod
    def one(cls, order):
        return cls({0: Fraction(1)}, order)

    @classmethod
    def zvar(cls, order):
        return cls({-1: Fraction(1)}, order)

    def val(self):
        """Structural valuation: smallest exponent that may be nonzero."""
        keys = [k for k in self.coeffs]
        return min(keys) if keys else self.order + 1

    def c(self, k):
        if k > self.order:
            raise TruncationError(
                f"coefficient of z^-{k} beyond reliable order {self.order}")
        return self.coeffs.get(k, 0)

    def truncate(self, order):
        return TruncatedSeries(self.coeffs, min(self.order, order))

    def __add__(self, other):
        if not isinstance(other, TruncatedSeries):
            other = TruncatedSeries({0: other}, self.order)
        order = min(self.order, other.order)
        coeffs = dict(self.coeffs)
        for k, v in other.coeffs.items():
            coeffs[k] = coeffs.get(k, 0) + v
        return TruncatedSeries(coeffs, order)

    __radd__ = __add__

    def __neg__(self):
        return TruncatedSeries({k: -v for k, v in self.coeffs.items()},
                               self.order)

    def __sub__(self, other):
        if not isinstance(other, TruncatedSeries):
            other = TruncatedSeries({0: other}, self.order)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, TruncatedSeries):
            return TruncatedSeries({k: v * other
                                    for k, v in self.coeffs.items()},
                                   self.order)
        order = min(self.order + other.val(), other.order + self.val())
        coeffs = {}
        for i, a in self.coeffs.items():
            for j, b in other.coeffs.items():
                k = i + j
                if k <= order:
                    coeffs[k] = coeffs.get(k, 0) + a * b
        return TruncatedSeries(coeffs, order)

    def __rmul__(self, other):
        return TruncatedSeries({k: other * v for k, v in self.coeffs.items()},
                               self.order)

    def shift(self, d):
        """Multiply by z^-d (exact, shifts the reliable window)."""
        return TruncatedSeries({k + d: v for k, v in self.coeffs.items()},
                               self.order + d)

    def reciprocal(self):
        m = self.val()
        if m > self.order:
            raise TruncationError("reciprocal of a series with no reliable "
                                  "nonzero leading coefficient")
        c = self.coeffs.get(m)
        if c is None or c == 0:
            raise TruncationError("reciprocal needs a nonzero leading "
                                  "coefficient")
        cinv = _inv(c)
        depth = self.order - m
        t = [self.coeffs.get(m + j, 0) * cinv for j in range(depth + 1)]
        b = [Fraction(1) if isinstance(c, (int, Fraction)) else c * cinv]
        for j in range(1, depth + 1):
            acc = 0
            for i in range(1, j + 1):
                term = t[i] * b[j - i]
                acc = acc + term
            b.append(-acc)
        coeffs = {}
        for j, v in enumerate(b):
            coeffs[j - m] = cinv * v
        return TruncatedSeries(coeffs, self.order - 2 * m)

    def differentiate(self):
        """d/dz: c z^-k -> -k c z^-(k+1)."""
        coeffs = {}
        for k, v in self.coeffs.items():
            if k != 0:
                coeffs[k + 1] = (-k) * v
        return TruncatedSeries(coeffs, self.order + 1)

    def compose(self, inner):
        """self(inner(z)); inner must have head z with invertible coefficient."""
        if inner.val() != -1:
            raise TruncationError("composition requires the inner series to "
                                  "have a linear head")
        p = inner.reciprocal()
        order = min(self.order, p.order)
        if self.coeffs.get(-1, 0) != 0:
            order = min(order, inner.order)
        out = TruncatedSeries({}, order)
        if -1 in self.coeffs:
            out = out + self.coeffs[-1] * inner.truncate(order)
        if 0 in self.coeffs:
            out = out + TruncatedSeries({0: self.coeffs[0]}, order)
        power = TruncatedSeries({0: Fraction(1)}, order + 1)
        for k in range(1, order + 1):
            power = (power * p).truncate(order)
            if k in self.coeffs:
                out = out + self.coeffs[k] * power
        return out.truncate(order)

    def agrees(self, other, through=None):
        """Coefficientwise comparison up to the common reliable order
        (optionally capped); returns (ok, first mismatch key, order used)."""
        order = min(self.order, other.order)
        if through is not None:
            if through > order:
                raise TruncationError(
                    f"comparison through z^-{through} exceeds common "
                    f"reliable order {order}")
            order = through
        for k in range(-1, order + 1):
            if not (self.coeffs.get(k, 0) == other.coeffs.get(k, 0)):
                return False, k, order
        return True, None, order

    def evaluate(self, z):
        total = 0j
        for k, v in self.coeffs.items():
            total += complex(v) * z ** (-k)
        return total

    def to_json(self):
        from .algebra.exact import scalar_to_str
        return {"order": self.order,
                "coeffs": {str(k): scalar_to_str(v)
                           for k, v in sorted(self.coeffs.items())}}

    @classmethod
    def from_json(cls, data):
        from .algebra.exact import scalar_from_str
        return cls({int(k): scalar_from_str(v)
                    for k, v in data["coeffs"].items()}, data["order"])

    def __repr__(self):
        inner = ", ".join(f"z^-{k}: {v}" for k, v in sorted(self.coeffs.items()))
        return f"TruncatedSeries({{{inner}}}, order={self.order})"


@dataclass
class LawSeries:
    G: TruncatedSeries
    g: TruncatedSeries
    F: TruncatedSeries
    B: TruncatedSeries


def law_to_series(law):
    """G = sum m_n z^-(n+1) with m_0 = 1, g likewise from the infinitesimal
    moments, F = 1/G (linear head), B = z - F."""
    L = law.order
    gc = {1: Fraction(1)}
    dgc = {}
    for n in range(1, L + 1):
        if not (law.m(n) == 0):
            gc[n + 1] = law.m(n)
        if not (law.dm(n) == 0):
            dgc[n + 1] = law.dm(n)
    G = TruncatedSeries(gc, L + 1)
    g = TruncatedSeries(dgc, L + 1)
    F = G.reciprocal()
    B = TruncatedSeries.zvar(F.order) - F
    return LawSeries(G=G, g=g, F=F, B=B)


def series_to_law(G, g, L):
    """Read (m_n, m'_n) back off a (G, g) pair."""
    m = tuple(G.c(n + 1) for n in range(1, L + 1))
    dm = tuple(g.c(n + 1) for n in range(1, L + 1))
    return InfinitesimalLaw(m, dm)


def r_series_coefficients(G, L):
    """Free R-transform coefficients r_1..r_L from G alone, through the
    compositional-inverse relation: with K = G^<-1>, R = K - 1/b satisfies
    R(G(z)) = z - F(z), which solves triangularly for the r_n."""
    if G.val() != 1 or G.c(1) == 0:
        raise TruncationError("R-transform needs G with invertible leading "
                              "coefficient at z^-1")
    F = G.reciprocal()
    B = TruncatedSeries.zvar(F.order) - F
    if L - 1 > B.order:
        raise TruncationError(f"need B through z^-{L - 1}, have {B.order}")
    powers = [TruncatedSeries.one(G.order)]
    for _ in range(L - 1):
        powers.append(powers[-1] * G)
    r = []
    for k in range(L):
        acc = B.c(k)
        for n in range(1, k + 1):
            acc = acc - r[n - 1] * powers[n - 1].c(k)
        r.append(acc)
    return r


# -- additive convolutions ----------------------------------------------------


def _pair_space(mu, nu, kind, L):
    """Two-letter FormalSpace carrying laws mu (letter x) and nu (letter y);
    for the monotone kind y is the extraction target, which pairs with
    F_{x+y} = F_x o F_y."""
    fx = Family("fx", ("x",), order=0,
                moments={("x",) * n: mu.m(n) for n in range(1, L + 1)},
                inf_moments={("x",) * n: mu.dm(n) for n in range(1, L + 1)})
    fy = Family("fy", ("y",), order=1,
                moments={("y",) * n: nu.m(n) for n in range(1, L + 1)},
                inf_moments={("y",) * n: nu.dm(n) for n in range(1, L + 1)})
    return FormalSpace([fx, fy], kind, cap=L)


def sum_law_from_space(space, L):
    """Law of x + y in a two-letter space, by expanding the n-th power into
    the 2^n words and summing the derived mixed moments."""
    m, dm = [], []
    for n in range(1, L + 1):
        tot, dtot = Fraction(0), Fraction(0)
        for mask in range(1 << n):
            word = tuple("x" if (mask >> i) & 1 else "y" for i in range(n))
            v, dv = space.mixed_moment(word)
            tot, dtot = tot + v, dtot + dv
        m.append(tot)
        dm.append(dtot)
    return InfinitesimalLaw(tuple(m), tuple(dm))


def boolean_convolve_infinitesimal(mu, nu, L=None):
    """Infinitesimal Boolean convolution.  Primary route: Boolean cumulants
    (and companions) add.  Verification: the transform formula
    g = (g_x F_x^2 + g_y F_y^2) / (F_x + F_y - z)^2 and B-additivity, as
    exact series identities."""
    L = min(mu.order, nu.order) if L is None else L
    mu, nu = mu.truncate(L), nu.truncate(L)
    fam = moments_to_cumulants(mu, "boolean") + moments_to_cumulants(nu, "boolean")
    law = cumulants_to_moments(fam)

    report = CheckReport(name="boolean_convolution")
    sx, sy, sc = law_to_series(mu), law_to_series(nu), law_to_series(law)
    denom_inv = (sx.F + sy.F - TruncatedSeries.zvar(min(sx.F.order, sy.F.order))
                 ).reciprocal()
    rhs = denom_inv * (sx.F * sx.g * sx.F + sy.F * sy.g * sy.F) * denom_inv
    ok, where, through = sc.g.agrees(rhs, through=L + 1)
    report.record(ok, f"g formula mismatch at z^-{where}")
    ok, where, through = sc.B.agrees(sx.B + sy.B)
    report.record(ok, f"B additivity mismatch at z^-{where}")
    return law, report


def monotone_convolve_infinitesimal(mu, nu, L=None):
    """Infinitesimal monotone convolution.  Primary route: mixed moments of
    x + y from the monotone evaluator.  Verification: F_{x+y} = F_x o F_y and
    g_{x+y} = -g_y F_y^2 G_x'(F_y) + g_x(F_y), as exact series identities."""
    L = min(mu.order, nu.order) if L is None else L
    mu, nu = mu.truncate(L), nu.truncate(L)
    space = _pair_space(mu, nu, "monotone", L)
    law = sum_law_from_space(space, L)

    report = CheckReport(name="monotone_convolution")
    sx, sy, sc = law_to_series(mu), law_to_series(nu), law_to_series(law)
    ok, where, _ = sc.F.agrees(sx.F.compose(sy.F))
    report.record(ok, f"F composition mismatch at z^-{where}")
    gprime = sx.G.differentiate()
    rhs = (-(sy.g * sy.F * sy.F)) * gprime.compose(sy.F) + sx.g.compose(sy.F)
    ok, where, through = sc.g.agrees(rhs, through=L + 1)
    report.record(ok, f"g formula mismatch at z^-{where}")
    return law, report


def free_convolve_infinitesimal(mu, nu, L=None):
    """Infinitesimal free convolution.  Primary route: free cumulants (and
    companions) add.  Verification: R-series additivity computed from the
    dual-number Cauchy transforms via the compositional inverse."""
    L = min(mu.order, nu.order) if L is None else L
    mu, nu = mu.truncate(L), nu.truncate(L)
    fam = moments_to_cumulants(mu, "free") + moments_to_cumulants(nu, "free")
    law = cumulants_to_moments(fam)

    report = CheckReport(name="free_convolution")

    def dual_G(l):
        coeffs = {1: Triangular(Fraction(1), Fraction(0))}
        for n in range(1, L + 1):
            coeffs[n + 1] = Triangular(l.m(n), l.dm(n))
        return TruncatedSeries(coeffs, L + 1)

    def tri(v):
        if isinstance(v, Triangular):
            return v
        return Triangular(Fraction(v), Fraction(0))

    rx = r_series_coefficients(dual_G(mu), L)
    ry = r_series_coefficients(dual_G(nu), L)
    rc = r_series_coefficients(dual_G(law), L)
    for n in range(L):
        s = tri(rx[n]) + tri(ry[n])
        here = tri(rc[n])
        report.record(here == s,
                      f"R additivity fails at order {n + 1}: {here} != {s}")
        report.record(here.base == fam.k(n + 1) and here.deriv == fam.dk(n + 1),
                      f"series r_{n + 1} disagrees with partition route")
    return law, report


def path_derivative_check(mu_moments, nu_moments, kind, L):
    """Differentiable-path identities: with laws whose moments are
    polynomials in t, the t-derivative of G of the Boolean (resp. monotone)
    convolution satisfies the displayed transform formulas, coefficientwise
    in 1/z with polynomial-in-t entries."""
    from .algebra.exact import RatPoly

    if kind not in ("boolean", "monotone"):
        raise OviprobError("paths are checked for boolean and monotone kinds")
    mu = InfinitesimalLaw.from_moments(
        tuple(RatPoly(m) if not isinstance(m, RatPoly) else m
              for m in mu_moments))
    nu = InfinitesimalLaw.from_moments(
        tuple(RatPoly(m) if not isinstance(m, RatPoly) else m
              for m in nu_moments))
    if kind == "boolean":
        fam = moments_to_cumulants(mu, "boolean") + moments_to_cumulants(nu, "boolean")
        conv = cumulants_to_moments(fam)
    else:
        conv = sum_law_from_space(_pair_space(mu, nu, "monotone", L), L)

    def dpoly(s):
        return TruncatedSeries(
            {k: v.deriv() for k, v in s.coeffs.items()
             if isinstance(v, RatPoly)}, s.order)

    sx, sy, sc = law_to_series(mu), law_to_series(nu), law_to_series(conv)
    dGx, dGy, dGc = dpoly(sx.G), dpoly(sy.G), dpoly(sc.G)
    report = CheckReport(name=f"path_derivative[{kind}]")
    if kind == "boolean":
        denom_inv = (sx.F + sy.F
                     - TruncatedSeries.zvar(min(sx.F.order, sy.F.order))
                     ).reciprocal()
        rhs = denom_inv * (sx.F * dGx * sx.F + sy.F * dGy * sy.F) * denom_inv
    else:
        rhs = (sx.G.differentiate().compose(sy.F) * (-(sy.F * dGy * sy.F))
               + dGx.compose(sy.F))
    ok, where, through = dGc.agrees(rhs, through=L + 1)
    report.record(ok, f"path derivative mismatch at z^-{where}")
    return report


# -- operator-valued numeric evaluation ----------------------------------------


@dataclass
class OVPoint:
    """A point of the operator upper half-plane H+(M_k), float mode."""

    matrix: object  # numpy complex array or SquareMatrix

    def __post_init__(self):
        b = self.matrix
        if isinstance(b, SquareMatrix):
            b = b.to_complex()
        b = np.asarray(b, dtype=complex)
        imag = (b - b.conj().T) / 2j
        eig = np.linalg.eigvalsh(imag)
        if eig.min() <= 0:
            raise OviprobError("OVPoint needs positive-definite imaginary part")
        self.matrix = b

    @property
    def k(self):
        return self.matrix.shape[0]


@dataclass
class OVTransforms:
    G: np.ndarray
    g: np.ndarray
    F: np.ndarray
    tail_bound: float
    terms: int


def moment_growth_bound(space, xmat):
    """Heuristic norm-growth bound rho for a matrix of letters: matrix paths
    times the largest per-step within-family moment growth."""
    k = xmat.k
    worst = 1.0
    for fam in space.families.values():
        for w, v in list(fam.moments.items()) + list(fam.inf_moments.items()):
            a = abs(complex(v))
            if a > 0:
                worst = max(worst, a ** (1.0 / len(w)))
    return k * worst


def ov_transform_eval(xmat, space, point, L=6, rho=None):
    """Truncated evaluation of (G_x, g_x, F_x) at an OVPoint via the resolvent
    expansion (b - x)^-1 = sum b^-1 (x b^-1)^n, with an explicit geometric
    tail bound; requires ||b^-1|| * rho < 1."""
    b = point.matrix
    k = point.k
    if xmat.k != k:
        raise OviprobError("dimension mismatch between x and b")
    binv = np.linalg.inv(b)
    binv_norm = float(np.linalg.norm(binv, 2))
    if rho is None:
        rho = moment_growth_bound(space, xmat)
    q = binv_norm * rho
    if q >= 1:
        raise DivergentTailError(
            f"tail bound diverges: ||b^-1|| * rho = {q:.3g} >= 1")
    tail = binv_norm * q ** (L + 1) / (1 - q)

    def entry_phi(e, prime):
        if hasattr(e, "phi"):
            return complex(e.phi_prime() if prime else e.phi())
        return 0j if prime else complex(e)

    def emat(m, prime=False):
        return np.array([[entry_phi(m[i, j], prime) for j in range(k)]
                         for i in range(k)])

    binv_sq = SquareMatrix([[complex(binv[i, j]) for j in range(k)]
                            for i in range(k)])
    G = np.array(binv, dtype=complex)  # n = 0 term: E[b^-1] = b^-1
    g = np.zeros((k, k), dtype=complex)
    power = xmat * binv_sq
    current = power
    for _ in range(1, L + 1):
        G = G + binv @ emat(current)
        g = g + binv @ emat(current, prime=True)
        current = current * power
    F = np.linalg.inv(G)
    return OVTransforms(G=G, g=g, F=F, tail_bound=tail, terms=L + 1)


def boolean_matrix_model(k, seed, cap=8):
    """Two scalar-infinitesimally-Boolean families of k^2 letters each; the
    letter matrices X, Y are then infinitesimally Boolean over M_k(C) by the
    scalar-to-matrix transfer."""
    import random as _random

    rng = _random.Random(seed)

    def table(letters):
        moments, inf_moments = {}, {}
        for a in letters:
            moments[(a,)] = Fraction(rng.randint(-2, 2), 4)
            inf_moments[(a,)] = Fraction(rng.randint(-2, 2), 4)
            for b2 in letters:
                moments[(a, b2)] = Fraction(rng.randint(-2, 2), 3)
                inf_moments[(a, b2)] = Fraction(rng.randint(-2, 2), 3)
        return moments, inf_moments

    xs = tuple(f"x{i}{j}" for i in range(k) for j in range(k))
    ys = tuple(f"y{i}{j}" for i in range(k) for j in range(k))
    mx, dx = table(xs)
    my, dy = table(ys)
    space = FormalSpace([Family("fx", xs, 0, mx, dx),
                         Family("fy", ys, 1, my, dy)], "boolean", cap=cap)
    X = SquareMatrix([[space.letter(f"x{i}{j}") for j in range(k)]
                      for i in range(k)])
    Y = SquareMatrix([[space.letter(f"y{i}{j}") for j in range(k)]
                      for i in range(k)])
    return space, X, Y


def monotone_matrix_model(k, seed, cap=10):
    """X = x (x) C1, Y = y (x) C2 with (x, y) scalar infinitesimally monotone
    and C1, C2 fixed exact matrices: a valid operator-valued infinitesimally
    monotone pair over M_k(C) (the entrywise lift is open for monotone, so
    the tensor model is used instead)."""
    import random as _random

    rng = _random.Random(seed)
    fx = Family("fx", ("x",), 0,
                {("x",) * n: Fraction(rng.randint(-2, 2), 2)
                 for n in range(1, cap + 1)},
                {("x",) * n: Fraction(rng.randint(-2, 2), 2)
                 for n in range(1, cap + 1)})
    fy = Family("fy", ("y",), 1,
                {("y",) * n: Fraction(rng.randint(-2, 2), 2)
                 for n in range(1, cap + 1)},
                {("y",) * n: Fraction(rng.randint(-2, 2), 2)
                 for n in range(1, cap + 1)})
    space = FormalSpace([fx, fy], "monotone", cap=cap)
    c1 = SquareMatrix([[Fraction(rng.randint(-2, 2), 2) for _ in range(k)]
                       for _ in range(k)])
    c2 = SquareMatrix([[Fraction(rng.randint(-2, 2), 2) for _ in range(k)]
                       for _ in range(k)])
    x, y = space.letter("x"), space.letter("y")
    X = SquareMatrix([[x * c1[i, j] for j in range(k)] for i in range(k)])
    Y = SquareMatrix([[y * c2[i, j] for j in range(k)] for i in range(k)])
    return space, X, Y


def ov_boolean_identity_check(k=2, seed=0, scale=10.0, L=6, margin=200.0):
    """Numeric check of the operator-valued infinitesimal Boolean convolution
    formula at b = scale*i*I."""
    space, X, Y = boolean_matrix_model(k, seed)
    b = OVPoint(np.eye(k) * 1j * scale)
    S = X + Y
    tx = ov_transform_eval(X, space, b, L=L)
    ty = ov_transform_eval(Y, space, b, L=L)
    ts = ov_transform_eval(S, space, b, L=L)
    denom = np.linalg.inv(tx.F + ty.F - b.matrix)
    rhs = denom @ (tx.F @ tx.g @ tx.F + ty.F @ ty.g @ ty.F) @ denom
    dev = float(np.max(np.abs(ts.g - rhs)))
    bdev = float(np.max(np.abs((b.matrix - ts.F) - (b.matrix - tx.F)
                               - (b.matrix - ty.F))))
    tol = margin * (tx.tail_bound + ty.tail_bound + ts.tail_bound) + 1e-12
    report = CheckReport(name="ov_boolean_identity")
    report.record(dev <= tol, f"g formula off by {dev:.3g} > {tol:.3g}")
    report.record(bdev <= tol, f"B additivity off by {bdev:.3g} > {tol:.3g}")
    return report


def ov_resolvent_derivative(xmat, space, point, w, L=6, rho=None):
    """Exact-truncation directional derivative G_x'(b)(w) =
    -E[(b-x)^-1 w (b-x)^-1], expanded to total resolvent order L."""
    b = point.matrix
    k = point.k
    binv = np.linalg.inv(b)
    binv_norm = float(np.linalg.norm(binv, 2))
    if rho is None:
        rho = moment_growth_bound(space, xmat)
    q = binv_norm * rho
    if q >= 1:
        raise DivergentTailError(
            f"tail bound diverges: ||b^-1|| * rho = {q:.3g} >= 1")
    w_norm = float(np.linalg.norm(np.asarray(w, dtype=complex), 2))
    tail = (w_norm * binv_norm ** 2 * (L + 2) * q ** (L + 1)
            / (1 - q) ** 2)

    def entry_phi(e):
        return complex(e.phi()) if hasattr(e, "phi") else complex(e)

    def emat(m):
        return np.array([[entry_phi(m[i, j]) for j in range(k)]
                         for i in range(k)])

    def to_sq(a):
        return SquareMatrix([[complex(a[i, j]) for j in range(k)]
                             for i in range(k)])

    binv_sq = to_sq(binv)
    wmid = to_sq(np.asarray(w, dtype=complex) @ binv)
    step = xmat * binv_sq
    powers = [SquareMatrix.identity(k, one=1 + 0j, zero=0j)]
    for _ in range(L):
        powers.append(powers[-1] * step)
    deriv = np.zeros((k, k), dtype=complex)
    for i in range(L + 1):
        for j in range(L + 1 - i):
            deriv += binv @ emat(powers[i] * wmid * powers[j])
    return -deriv, tail


def ov_monotone_identity_check(k=2, seed=0, scale=10.0, L=8, margin=200.0):
    """Numeric check of the operator-valued infinitesimal monotone convolution
    formula at b = scale*i*I, using the tensor-model monotone pair."""
    space, X, Y = monotone_matrix_model(k, seed)
    b = OVPoint(np.eye(k) * 1j * scale)
    ty = ov_transform_eval(Y, space, b, L=L)
    ts = ov_transform_eval(X + Y, space, b, L=L)
    fy_point = OVPoint(ty.F)
    tx_at_fy = ov_transform_eval(X, space, fy_point, L=L)
    w = -(ty.F @ ty.g @ ty.F)
    gxp, dtail = ov_resolvent_derivative(X, space, fy_point, w, L=L)
    rhs = gxp + tx_at_fy.g
    dev = float(np.max(np.abs(ts.g - rhs)))
    fdev = float(np.max(np.abs(ts.F - tx_at_fy.F)))
    tol = margin * (ty.tail_bound + ts.tail_bound + tx_at_fy.tail_bound
                    + dtail) + 1e-12
    report = CheckReport(name="ov_monotone_identity")
    report.record(dev <= tol, f"g formula off by {dev:.3g} > {tol:.3g}")
    report.record(fdev <= tol, f"F composition off by {fdev:.3g} > {tol:.3g}")
    return report
