"""Exact Wick calculus for the two random-matrix models, as Laurent
polynomials in the dimension, plus a seeded Monte Carlo cross-checker.

Anti-trace model: Psi_N(M) = E Tr(M C_N) with C_N the all-1/N matrix and
A_N = ((X_i + conj(X_j))/N) built from i.i.d. standard complex Gaussians;
words over {A, At, C}.  Moments are computed as kernel-partition sums

    Psi_N(word) = N^-(k+1) * sum over partitions pi of [k+1] of
                  (N)_|pi| * E_pi,

where E_pi sums the 2^(#non-C letters) sign patterns of each entry
(X_left or conj X_right) and evaluates the Gaussian expectation by counting
per-index pairings (E X^p conj(X)^q = p! if p = q else 0).  The limit
moment is the coefficient of N^(k+1), the infinitesimal moment that of N^k.

Partial-trace model: tau_n(M) = E M_nn for words over {TA, TB}, where T_A
keeps only the last row/column of an n x n GUE matrix.  Only the last-column
Gaussians enter, and paths alternate through index n, so the same kernel sum
runs over partitions of [k/2] with falling factorials (n-1)_|pi|.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial

import numpy as np

from .errors import OviprobError, SizeLimitError
from .multiplicative import CheckReport

ANTITRACE_LETTERS = ("A", "At", "C")
PARTIAL_LETTERS = ("TA", "TB")

WORD_CAP = 8


class NPolynomial:
    """Laurent polynomial in the matrix dimension, exact coefficients."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=()):
        if isinstance(coeffs, dict):
            items = coeffs.items()
        else:
            items = coeffs
        cs = {}
        for deg, c in items:
            c = Fraction(c) if isinstance(c, int) else c
            if c != 0:
                cs[deg] = cs.get(deg, Fraction(0)) + c
        self.coeffs = {d: c for d, c in cs.items() if c != 0}

    @classmethod
    def monomial(cls, deg, c=1):
        return cls({deg: Fraction(c)})

    def coeff(self, deg):
        return self.coeffs.get(deg, Fraction(0))

    def degree(self):
        return max(self.coeffs) if self.coeffs else None

    def __add__(self, other):
        out = dict(self.coeffs)
        for d, c in other.coeffs.items():
            out[d] = out.get(d, Fraction(0)) + c
        return NPolynomial(out)

    def __mul__(self, other):
        if isinstance(other, NPolynomial):
            out = {}
            for d1, c1 in self.coeffs.items():
                for d2, c2 in other.coeffs.items():
                    d = d1 + d2
                    out[d] = out.get(d, Fraction(0)) + c1 * c2
            return NPolynomial(out)
        return NPolynomial({d: c * other for d, c in self.coeffs.items()})

    __rmul__ = __mul__

    def __sub__(self, other):
        return self + (-1) * other

    def __eq__(self, other):
        return isinstance(other, NPolynomial) and self.coeffs == other.coeffs

    def __call__(self, n):
        return sum(c * Fraction(n) ** d for d, c in self.coeffs.items())

    def shifted(self, d):
        return NPolynomial({deg + d: c for deg, c in self.coeffs.items()})

    def __str__(self):
        if not self.coeffs:
            return "0"
        bits = []
        for d in sorted(self.coeffs, reverse=True):
            c = self.coeffs[d]
            if d == 0:
                bits.append(f"{c}")
            elif d == 1:
                bits.append(f"{c}*N")
            else:
                bits.append(f"{c}*N^{d}")
        return " + ".join(bits)

    def __repr__(self):
        return f"NPolynomial({self.coeffs!r})"


def falling_factorial_poly(m, shift=0):
    """(N - shift)(N - shift - 1) ... , m factors, as an NPolynomial."""
    p = NPolynomial({0: Fraction(1)})
    for i in range(m):
        p = p * NPolynomial({1: Fraction(1), 0: Fraction(-shift - i)})
    return p


def wick_expectation(factors):
    """E of a product of i.i.d. standard complex Gaussians given as
    (index symbol, conjugated?) pairs: product over symbols of p! when each
    symbol carries equally many plain and conjugated factors, else 0."""
    counts = {}
    for sym, conj in factors:
        pq = counts.get(sym)
        if pq is None:
            counts[sym] = pq = [0, 0]
        pq[1 if conj else 0] += 1
    val = 1
    for p, q in counts.values():
        if p != q:
            return 0
        val *= factorial(p)
    return val


def _rgs(m):
    """Restricted growth strings of length m: each partition of [m] once,
    encoded as the block index of every position."""
    a = [0] * m
    mx = [0] * m

    def rec(i, top):
        if i == m:
            yield tuple(a), top + 1
            return
        for v in range(top + 2):
            a[i] = v
            yield from rec(i + 1, max(top, v))

    yield from rec(1, 0) if m > 1 else iter([(tuple(a), 1)])


def parse_word(text, model):
    """'A4', 'A2CA2', 'TA2TB2', 'S2'...: letters with optional repeat counts.
    S stands for the sum variable (A + At, resp. TA + TB) and is expanded by
    the callers that accept it."""
    letters = ("S",) + (ANTITRACE_LETTERS if model == "antitrace"
                        else PARTIAL_LETTERS)
    out = []
    i = 0
    text = text.strip()
    while i < len(text):
        match = None
        for let in sorted(letters, key=len, reverse=True):
            if text[i:i + len(let)] == let:
                match = let
                break
        if match is None:
            raise OviprobError(f"cannot parse model word {text!r} at {i}")
        i += len(match)
        count = 0
        while i < len(text) and text[i].isdigit():
            count = 10 * count + int(text[i])
            i += 1
        out.extend([match] * max(count, 1))
    return tuple(out)


def expand_sum_letters(word, model):
    """Expand 'S' letters into all concrete words, for linear functionals."""
    parts = (("A", "At") if model == "antitrace" else ("TA", "TB"))
    words = [()]
    for let in word:
        if let == "S":
            words = [w + (p,) for w in words for p in parts]
        else:
            words = [w + (let,) for w in words]
    return words


@dataclass
class ModelMoment:
    model: str
    word: tuple
    poly: NPolynomial  # numerator of the normalized functional
    denom_power: int   # functional = poly(N) / N^denom_power
    limit: Fraction
    infinitesimal: Fraction

    def value_at(self, n):
        return self.poly(n) / Fraction(n) ** self.denom_power

    def to_json(self):
        return {"model": self.model, "word": "".join(self.word),
                "poly": str(self.poly), "denom_power": self.denom_power,
                "limit": str(self.limit),
                "infinitesimal": str(self.infinitesimal)}


def antitrace_moment(word):
    """Psi_N of a word over {A, At, C} (S allowed; expanded linearly), as an
    exact rational function of N with its limit and infinitesimal moment."""
    word = parse_word(word, "antitrace") if isinstance(word, str) else tuple(word)
    concrete = expand_sum_letters(word, "antitrace")
    k = len(word)
    if k > WORD_CAP:
        raise SizeLimitError(f"word length {k} over cap {WORD_CAP}")
    total = NPolynomial()
    for w in concrete:
        total = total + _antitrace_poly(w)
    return ModelMoment(model="antitrace", word=word, poly=total,
                       denom_power=k + 1,
                       limit=total.coeff(k + 1),
                       infinitesimal=total.coeff(k))


def _antitrace_poly(word):
    """Kernel-partition sum for one concrete word: sum over partitions of
    [k+1] of (N)_|pi| E_pi."""
    k = len(word)
    active = [r for r, let in enumerate(word) if let != "C"]
    # for letter r (0-based), entry (j_{r+1}, j_{r+2}) in 1-based tuple
    # positions; A contributes X_{j_{r+1}} or conj X_{j_{r+2}}, At swaps
    plains, conjs = [], []
    for r in active:
        if word[r] == "A":
            plains.append(r)      # X index position r+1 -> tuple slot r
            conjs.append(r + 1)   # conj X index position r+2 -> slot r+1
        else:
            plains.append(r + 1)
            conjs.append(r)
    ffs = [falling_factorial_poly(m) for m in range(k + 2)]
    total = NPolynomial()
    e = len(active)
    for blockof, nblocks in _rgs(k + 1):
        acc = 0
        for mask in range(1 << e):
            factors = []
            for t in range(e):
                if (mask >> t) & 1:
                    factors.append((blockof[conjs[t]], True))
                else:
                    factors.append((blockof[plains[t]], False))
            acc += wick_expectation(factors)
        if acc:
            total = total + acc * ffs[nblocks]
    return total


def partialtrace_moment(word):
    """tau_n of a word over {TA, TB} (S allowed), as an exact rational
    function of n with limit and infinitesimal moment."""
    word = parse_word(word, "partialtrace") if isinstance(word, str) \
        else tuple(word)
    concrete = expand_sum_letters(word, "partialtrace")
    k = len(word)
    if k > WORD_CAP:
        raise SizeLimitError(f"word length {k} over cap {WORD_CAP}")
    if k == 0:
        one = NPolynomial({0: Fraction(1)})
        return ModelMoment("partialtrace", word, one, 0, Fraction(1),
                           Fraction(0))
    total = NPolynomial()
    if k % 2 == 0:
        for w in concrete:
            total = total + _partialtrace_poly(w)
    m = k // 2
    return ModelMoment(model="partialtrace", word=word, poly=total,
                       denom_power=m,
                       limit=total.coeff(m),
                       infinitesimal=total.coeff(m - 1))


def _partialtrace_poly(word):
    """Kernel sum over partitions of the m = k/2 free indices: paths from n
    to n alternate, step 2i-1 contributes conj(letter) at j_i and step 2i the
    plain letter at j_i; blocks range over [n-1], hence (n-1)_|pi|."""
    m = len(word) // 2
    steps = [(word[2 * i], word[2 * i + 1]) for i in range(m)]
    total = NPolynomial()
    for blockof, nblocks in _rgs(m):
        factors = []
        for i, (left, right) in enumerate(steps):
            factors.append(((left, blockof[i]), True))
            factors.append(((right, blockof[i]), False))
        acc = wick_expectation(factors)
        if acc:
            total = total + acc * falling_factorial_poly(nblocks, shift=1)
    return total


def model_moment(model, word):
    if model == "antitrace":
        return antitrace_moment(word)
    if model == "partialtrace":
        return partialtrace_moment(word)
    raise OviprobError(f"unknown model {model!r}")


# -- violation reports ---------------------------------------------------------


def _boolean_prediction_for_word(blocks):
    """Boolean-independence prediction for phi'(a^{h1} c^{l1} a^{h2} ...):
    the Leibniz sum of phi' over the alternating factors, with every phi
    factor evaluated from the model's own limit values."""
    total = Fraction(0)
    phis, dphis = [], []
    for letter, power in blocks:
        mm = antitrace_moment((letter,) * power)
        phis.append(mm.limit)
        dphis.append(mm.infinitesimal)
    for j in range(len(blocks)):
        term = dphis[j]
        for i, v in enumerate(phis):
            if i != j:
                term *= v
        total += term
    return total


def violation_report(max_degree=8, general_words=True):
    """Predicted-vs-actual failures of infinitesimal Boolean independence:

    - anti-trace a vs conj(a): phi'(b^2) for b = a + conj(a);
    - anti-trace a vs c: phi'(a^2 c a^2);
    - partial trace: b'_4(T_A + T_B) vs b'_4(T_A) + b'_4(T_B);
    - the general-word formulas phi' = C(kk,2) + sum k_i^2 and
      S = (3/2) sum k_i^2 - kk/2, verified computationally.
    """
    from .cumulants import InfinitesimalLaw, moments_to_cumulants

    report = CheckReport(name="boolean_violations")
    rows = []

    b2 = antitrace_moment("S2")
    a2 = antitrace_moment("A2")
    predicted = 2 * a2.infinitesimal
    rows.append({"check": "antitrace phi'(b^2)", "predicted": predicted,
                 "actual": b2.infinitesimal})
    report.record(b2.infinitesimal != predicted,
                  "phi'(b^2) accidentally matches the Boolean prediction")

    a2ca2 = antitrace_moment("A2CA2")
    pred = _boolean_prediction_for_word((("A", 2), ("C", 1), ("A", 2)))
    rows.append({"check": "antitrace phi'(a^2 c a^2)", "predicted": pred,
                 "actual": a2ca2.infinitesimal})
    report.record(a2ca2.infinitesimal != pred,
                  "phi'(a^2 c a^2) accidentally matches")

    # partial trace: fourth Boolean cumulants of T_A and of T_A + T_B
    def pt_law(word_letter):
        m, dm = [], []
        for n in range(1, 5):
            mm = partialtrace_moment((word_letter,) * n)
            m.append(mm.limit)
            dm.append(mm.infinitesimal)
        return InfinitesimalLaw(tuple(m), tuple(dm))

    fam_a = moments_to_cumulants(pt_law("TA"), "boolean")
    fam_s = moments_to_cumulants(pt_law("S"), "boolean")
    rows.append({"check": "partial trace b'_4(T_A+T_B)",
                 "predicted": 2 * fam_a.dk(4), "actual": fam_s.dk(4)})
    report.record(fam_s.dk(4) != 2 * fam_a.dk(4),
                  "b'_4 accidentally additive")

    if general_words:
        for blocks in _general_word_shapes(max_degree):
            word = []
            for letter, power in blocks:
                word.extend([letter] * power)
            mm = antitrace_moment(tuple(word))
            ks = [p // 2 for letter, p in blocks if letter == "A"]
            odd = any(p % 2 for letter, p in blocks if letter == "A")
            if odd:
                formula = Fraction(0)
            else:
                kk = sum(ks)
                formula = Fraction(kk * (kk - 1), 2) \
                    + sum(Fraction(x * x) for x in ks)
            report.record(mm.infinitesimal == formula,
                          f"general word {word}: phi' = {mm.infinitesimal} "
                          f"!= formula {formula}")
            s_pred = _boolean_prediction_for_word(blocks)
            if odd:
                s_formula = Fraction(0)
            else:
                kk = sum(ks)
                s_formula = Fraction(3, 2) * sum(Fraction(x * x) for x in ks) \
                    - Fraction(kk, 2)
            report.record(s_pred == s_formula,
                          f"general word {word}: S = {s_pred} != {s_formula}")
            if not odd:
                kk = sum(ks)
                gap = (sum(Fraction(x * x) for x in ks) - Fraction(kk * kk)) / 2
                report.record(s_pred - mm.infinitesimal == gap,
                              f"general word {word}: S - phi' != "
                              f"(sum k_i^2 - k^2)/2")
                rows.append({"check": f"word {''.join(word)}",
                             "predicted": s_pred,
                             "actual": mm.infinitesimal})
    return report, rows


def _general_word_shapes(max_degree):
    """Alternating a^h1 c^l1 ... a^hs shapes (a-blocks first and last, up to
    three of them) with total length <= max_degree; even-h instances carry
    the closed formulas, odd-h instances must vanish."""
    shapes = [(("A", h),) for h in (1, 2, 3, 4, 6)]
    for h1 in (1, 2, 4):
        for h2 in (2, 4):
            for l1 in (1, 2):
                shapes.append((("A", h1), ("C", l1), ("A", h2)))
    shapes.append((("A", 2), ("C", 1), ("A", 2), ("C", 1), ("A", 2)))
    return [s for s in shapes
            if sum(p for _, p in s) <= max_degree]


# -- Monte Carlo ----------------------------------------------------------------


@dataclass
class MCResult:
    model: str
    word: tuple
    N: int
    samples: int
    seed: int
    mean: float
    stderr: float
    exact: Fraction = None
    sigmas: float = None

    def to_json(self):
        return {"model": self.model, "word": "".join(self.word), "N": self.N,
                "samples": self.samples, "seed": self.seed, "mean": self.mean,
                "stderr": self.stderr,
                "exact": None if self.exact is None else str(self.exact),
                "sigmas": self.sigmas}


def _philox(seed):
    return np.random.Generator(np.random.Philox(key=seed & ((1 << 128) - 1)))


_ANTI_FACTORS = {
    # letter -> (left column names, right column names); letter = L R^T / N
    "A": (("x", "one"), ("one", "xb")),
    "At": (("one", "xb"), ("x", "one")),
    "C": (("one",), ("one",)),
}

_PARTIAL_FACTORS = {
    "TA": (("ux", "e"), ("e", "uxb")),
    "TB": (("uy", "e"), ("e", "uyb")),
}


def _anti_dots(X):
    s = X.sum(axis=1)
    dots = {
        ("one", "one"): np.full(X.shape[0], float(X.shape[1]), dtype=complex),
        ("one", "x"): s, ("x", "one"): s,
        ("one", "xb"): s.conj(), ("xb", "one"): s.conj(),
        ("x", "x"): (X * X).sum(axis=1),
        ("x", "xb"): (X * X.conj()).sum(axis=1),
        ("xb", "x"): (X * X.conj()).sum(axis=1),
        ("xb", "xb"): (X.conj() * X.conj()).sum(axis=1),
    }
    return dots


def _partial_dots(U, V):
    def dot(a, b):
        return (a * b).sum(axis=1)
    S = U.shape[0]
    vecs = {"ux": U, "uxb": U.conj(), "uy": V, "uyb": V.conj()}
    dots = {}
    for n1, v1 in vecs.items():
        for n2, v2 in vecs.items():
            dots[(n1, n2)] = dot(v1, v2)
        dots[(n1, "e")] = np.zeros(S, dtype=complex)
        dots[("e", n1)] = np.zeros(S, dtype=complex)
    dots[("e", "e")] = np.ones(S, dtype=complex)
    return dots


def _lowrank_chain(word, factors, dots, start, end, S):
    """start^T (prod_r L_r R_r^T) end via the 2x2 Gram chain, vectorized over
    samples; returns an (S,) complex array (without the 1/N powers)."""
    if not word:
        return dots[(start, end)]
    lcols, rcols = factors[word[0]]
    v = np.stack([dots[(start, c)] for c in lcols], axis=1)
    for r in range(len(word) - 1):
        rc = factors[word[r]][1]
        lc = factors[word[r + 1]][0]
        gram = np.empty((S, len(rc), len(lc)), dtype=complex)
        for i, a in enumerate(rc):
            for j, b in enumerate(lc):
                gram[:, i, j] = dots[(a, b)]
        v = np.einsum("si,sij->sj", v, gram)
    rc = factors[word[-1]][1]
    w = np.stack([dots[(c, end)] for c in rc], axis=1)
    return np.einsum("si,si->s", v, w)


def monte_carlo(model, word, N, samples, seed, chunk=20000):
    """Seeded Monte Carlo estimate of the model functional; the per-sample
    statistic uses the rank-2 structure of the letters, so the cost is
    O(samples * N * word length).  Philox keyed by the seed makes runs (and
    counter-advanced shards) reproducible."""
    if N > 2000:
        raise SizeLimitError("monte_carlo caps at N <= 2000")
    if samples > 10 ** 6:
        raise SizeLimitError("monte_carlo caps at 10^6 samples")
    word = parse_word(word, model) if isinstance(word, str) else tuple(word)
    concrete = expand_sum_letters(word, model)
    rng = _philox(seed)
    k = len(word)
    total, total2, count = 0.0, 0.0, 0
    while count < samples:
        m = min(chunk, samples - count)
        if model == "antitrace":
            X = (rng.standard_normal((m, N)) +
                 1j * rng.standard_normal((m, N))) / np.sqrt(2)
            dots = _anti_dots(X)
            vals = np.zeros(m, dtype=complex)
            for w in concrete:
                vals += _lowrank_chain(w, _ANTI_FACTORS, dots, "one", "one", m)
            est = vals.real / float(N) ** (k + 1) if k else np.ones(m)
        elif model == "partialtrace":
            U = (rng.standard_normal((m, N - 1)) +
                 1j * rng.standard_normal((m, N - 1))) / np.sqrt(2)
            V = (rng.standard_normal((m, N - 1)) +
                 1j * rng.standard_normal((m, N - 1))) / np.sqrt(2)
            dots = _partial_dots(U, V)
            vals = np.zeros(m, dtype=complex)
            for w in concrete:
                if len(w) % 2 == 0 and len(w) > 0:
                    vals += _lowrank_chain(w, _PARTIAL_FACTORS, dots, "e",
                                           "e", m)
            est = vals.real / float(N) ** (k // 2) if k else np.ones(m)
        else:
            raise OviprobError(f"unknown model {model!r}")
        total += float(est.sum())
        total2 += float((est * est).sum())
        count += m
    mean = total / count
    var = max(total2 / count - mean * mean, 0.0) * count / max(count - 1, 1)
    stderr = (var / count) ** 0.5
    exact = model_moment(model, word).value_at(N)
    sig = abs(mean - float(exact)) / stderr if stderr > 0 else 0.0
    return MCResult(model=model, word=word, N=N, samples=samples, seed=seed,
                    mean=mean, stderr=stderr, exact=exact, sigmas=sig)
