"""The upper-triangular lift: pairs (a, a') with the 2x2 multiplication law.

Triangular(a, da) stands for the matrix [[a, da], [0, a]].  Over a
commutative base these are the dual numbers, which is what turns every
ring-generic computation on moments into the same computation on
(moment, infinitesimal moment) pairs.
"""

from __future__ import annotations

from fractions import Fraction


class Triangular:
    __slots__ = ("base", "deriv")

    def __init__(self, base, deriv):
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "deriv", deriv)

    def __setattr__(self, name, value):
        raise AttributeError("Triangular is immutable")

    def __add__(self, other):
        if isinstance(other, Triangular):
            return Triangular(self.base + other.base, self.deriv + other.deriv)
        return Triangular(self.base + other, self.deriv)

    __radd__ = __add__

    def __neg__(self):
        return Triangular(-self.base, -self.deriv)

    def __sub__(self, other):
        if isinstance(other, Triangular):
            return Triangular(self.base - other.base, self.deriv - other.deriv)
        return Triangular(self.base - other, self.deriv)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Triangular):
            return Triangular(self.base * other.base,
                              self.base * other.deriv + self.deriv * other.base)
        # scalar acting on both components
        return Triangular(self.base * other, self.deriv * other)

    def __rmul__(self, other):
        return Triangular(other * self.base, other * self.deriv)

    def inv(self):
        """(a, da)^-1 = (a^-1, -a^-1 da a^-1); the base must be invertible."""
        if hasattr(self.base, "inv"):
            b = self.base.inv()
        else:
            b = 1 / self.base
        return Triangular(b, -(b * self.deriv * b))

    def __truediv__(self, other):
        if isinstance(other, Triangular):
            return self * other.inv()
        return Triangular(self.base / other, self.deriv / other)

    def __rtruediv__(self, other):
        return self.inv() * other

    def __eq__(self, other):
        if isinstance(other, Triangular):
            return self.base == other.base and self.deriv == other.deriv
        # equal to a plain element iff the corner vanishes
        zero = self.deriv == 0 or self.deriv == self.deriv * 0
        return zero and self.base == other

    def __hash__(self):
        return hash((self.base, self.deriv))

    def __bool__(self):
        return bool(self.base) or bool(self.deriv)

    def __repr__(self):
        return f"Triangular({self.base!r}, {self.deriv!r})"


def lift(value, deriv=None):
    """Lift a plain value (deriv defaults to a matching zero)."""
    if deriv is None:
        deriv = value * 0 if not isinstance(value, (int, Fraction)) else Fraction(0)
    return Triangular(value, deriv)
