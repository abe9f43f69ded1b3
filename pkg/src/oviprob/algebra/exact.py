"""Exact scalar types: Gaussian rationals and rational-coefficient polynomials.

Plain rationals are `fractions.Fraction`; this module adds the two ring
extensions the rest of the package computes over.  All classes interoperate
with int and Fraction operands so partition-weighted sums stay exact.
"""

from __future__ import annotations

from fractions import Fraction

_RATS = (int, Fraction)


class QQi:
    """Gaussian rational a + b*i with Fraction components."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", Fraction(re))
        object.__setattr__(self, "im", Fraction(im))

    def __setattr__(self, name, value):
        raise AttributeError("QQi is immutable")

    def conjugate(self):
        return QQi(self.re, -self.im)

    def abs2(self):
        return self.re * self.re + self.im * self.im

    def __add__(self, other):
        if isinstance(other, QQi):
            return QQi(self.re + other.re, self.im + other.im)
        if isinstance(other, _RATS):
            return QQi(self.re + other, self.im)
        return NotImplemented

    __radd__ = __add__

    def __neg__(self):
        return QQi(-self.re, -self.im)

    def __sub__(self, other):
        return self + (-other if isinstance(other, QQi) else -Fraction(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, QQi):
            return QQi(self.re * other.re - self.im * other.im,
                       self.re * other.im + self.im * other.re)
        if isinstance(other, _RATS):
            return QQi(self.re * other, self.im * other)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, _RATS):
            return QQi(self.re / other, self.im / other)
        if isinstance(other, QQi):
            d = other.abs2()
            if d == 0:
                raise ZeroDivisionError("division by zero Gaussian rational")
            return self * QQi(other.re / d, -other.im / d)
        return NotImplemented

    def __rtruediv__(self, other):
        d = self.abs2()
        if d == 0:
            raise ZeroDivisionError("division by zero Gaussian rational")
        return QQi(other, 0) * QQi(self.re / d, -self.im / d)

    def __eq__(self, other):
        if isinstance(other, QQi):
            return self.re == other.re and self.im == other.im
        if isinstance(other, _RATS):
            return self.im == 0 and self.re == other
        if isinstance(other, (float, complex)):
            return complex(self) == complex(other)
        return NotImplemented

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __bool__(self):
        return self.re != 0 or self.im != 0

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        if self.im == 0:
            return f"QQi({self.re})"
        return f"QQi({self.re}, {self.im})"


I = QQi(0, 1)


class RatPoly:
    """Polynomial in one formal variable with Fraction coefficients.

    Used for differentiable-path laws whose moments are polynomials in the
    path parameter; only ring operations plus d/dt and division by nonzero
    constants are needed.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=()):
        if isinstance(coeffs, _RATS):
            coeffs = (Fraction(coeffs),)
        cs = [Fraction(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    def __setattr__(self, name, value):
        raise AttributeError("RatPoly is immutable")

    @classmethod
    def t(cls):
        return cls((0, 1))

    def degree(self):
        return len(self.coeffs) - 1

    def __call__(self, value):
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * value + c
        return acc

    def deriv(self):
        return RatPoly(tuple(c * k for k, c in enumerate(self.coeffs) if k))

    def __add__(self, other):
        if isinstance(other, _RATS):
            other = RatPoly((other,))
        if not isinstance(other, RatPoly):
            return NotImplemented
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        return RatPoly(tuple(c + (b[i] if i < len(b) else 0)
                             for i, c in enumerate(a)))

    __radd__ = __add__

    def __neg__(self):
        return RatPoly(tuple(-c for c in self.coeffs))

    def __sub__(self, other):
        if isinstance(other, _RATS):
            other = RatPoly((other,))
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, _RATS):
            return RatPoly(tuple(c * other for c in self.coeffs))
        if not isinstance(other, RatPoly):
            return NotImplemented
        if not self.coeffs or not other.coeffs:
            return RatPoly()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return RatPoly(tuple(out))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, RatPoly):
            if other.degree() > 0:
                raise ZeroDivisionError("RatPoly division only by constants")
            other = other.coeffs[0] if other.coeffs else Fraction(0)
        return RatPoly(tuple(c / other for c in self.coeffs))

    def __rtruediv__(self, other):
        if self.degree() > 0:
            raise ZeroDivisionError("RatPoly division only by constants")
        c = self.coeffs[0] if self.coeffs else Fraction(0)
        return RatPoly((Fraction(other) / c,))

    def __eq__(self, other):
        if isinstance(other, RatPoly):
            return self.coeffs == other.coeffs
        if isinstance(other, _RATS):
            return self.coeffs == ((Fraction(other),) if other else ())
        return NotImplemented

    def __hash__(self):
        if len(self.coeffs) <= 1:
            return hash(self.coeffs[0] if self.coeffs else Fraction(0))
        return hash(self.coeffs)

    def __bool__(self):
        return bool(self.coeffs)

    def __repr__(self):
        if not self.coeffs:
            return "RatPoly(0)"
        terms = [f"{c}*t^{k}" if k else f"{c}"
                 for k, c in enumerate(self.coeffs) if c]
        return "RatPoly(" + " + ".join(terms) + ")"


def scalar_to_str(x):
    """Serialize an exact scalar as a 'p/q' style string (QQi as 'p/q+p/qi')."""
    if isinstance(x, QQi):
        if x.im == 0:
            return str(x.re)
        return f"{x.re}{'+' if x.im >= 0 else ''}{x.im}i"
    return str(Fraction(x))


def scalar_from_str(s):
    s = s.strip()
    if s.endswith("i"):
        body = s[:-1]
        for cut in range(len(body) - 1, 0, -1):
            if body[cut] in "+-" and body[cut - 1] not in "+-/":
                re = Fraction(body[:cut])
                im = Fraction(body[cut:] or "1")
                return QQi(re, im)
        return QQi(0, Fraction(body or "1"))
    return Fraction(s)
