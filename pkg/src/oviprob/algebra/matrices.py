"""Small exact square matrices over an arbitrary ring of entries."""

from __future__ import annotations

from fractions import Fraction

from .exact import QQi


class SquareMatrix:
    """Immutable k x k matrix; entries may be Fraction, QQi, or any ring
    element supporting +, * and scalar multiples."""

    __slots__ = ("k", "rows")

    def __init__(self, rows):
        rows = tuple(tuple(r) for r in rows)
        k = len(rows)
        if any(len(r) != k for r in rows):
            raise ValueError("matrix must be square")
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "rows", rows)

    def __setattr__(self, name, value):
        raise AttributeError("SquareMatrix is immutable")

    @classmethod
    def identity(cls, k, one=Fraction(1), zero=Fraction(0)):
        return cls(tuple(tuple(one if i == j else zero for j in range(k))
                         for i in range(k)))

    @classmethod
    def zero(cls, k, zero=Fraction(0)):
        return cls(tuple((zero,) * k for _ in range(k)))

    @classmethod
    def unit(cls, k, i, j, one=Fraction(1), zero=Fraction(0)):
        """Matrix unit e_{ij} (0-based indices)."""
        return cls(tuple(tuple(one if (r, c) == (i, j) else zero
                               for c in range(k)) for r in range(k)))

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __add__(self, other):
        if not isinstance(other, SquareMatrix):
            return NotImplemented
        return SquareMatrix(tuple(tuple(a + b for a, b in zip(ra, rb))
                                  for ra, rb in zip(self.rows, other.rows)))

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return SquareMatrix(tuple(tuple(-a for a in r) for r in self.rows))

    def __mul__(self, other):
        if isinstance(other, SquareMatrix):
            k = self.k
            return SquareMatrix(tuple(
                tuple(sum(self.rows[i][m] * other.rows[m][j]
                          for m in range(k)) for j in range(k))
                for i in range(k)))
        return SquareMatrix(tuple(tuple(a * other for a in r)
                                  for r in self.rows))

    def __rmul__(self, other):
        # scalar * matrix
        return SquareMatrix(tuple(tuple(other * a for a in r)
                                  for r in self.rows))

    def scale(self, c):
        return SquareMatrix(tuple(tuple(c * a for a in r) for r in self.rows))

    def conj_transpose(self):
        def conj(x):
            return x.conjugate() if hasattr(x, "conjugate") else x
        return SquareMatrix(tuple(tuple(conj(self.rows[j][i])
                                        for j in range(self.k))
                                  for i in range(self.k)))

    def transpose(self):
        return SquareMatrix(tuple(tuple(self.rows[j][i]
                                        for j in range(self.k))
                                  for i in range(self.k)))

    def trace(self):
        t = self.rows[0][0]
        for i in range(1, self.k):
            t = t + self.rows[i][i]
        return t

    def inv(self):
        """Gauss-Jordan inverse; entries must form a field (Fraction/QQi)."""
        k = self.k
        a = [list(r) for r in self.rows]
        b = [[Fraction(1) if i == j else Fraction(0) for j in range(k)]
             for i in range(k)]
        for col in range(k):
            piv = next((r for r in range(col, k) if a[r][col] != 0), None)
            if piv is None:
                raise ZeroDivisionError("singular matrix")
            a[col], a[piv] = a[piv], a[col]
            b[col], b[piv] = b[piv], b[col]
            d = a[col][col]
            a[col] = [x / d for x in a[col]]
            b[col] = [x / d for x in b[col]]
            for r in range(k):
                if r != col and a[r][col] != 0:
                    f = a[r][col]
                    a[r] = [x - f * y for x, y in zip(a[r], a[col])]
                    b[r] = [x - f * y for x, y in zip(b[r], b[col])]
        return SquareMatrix(tuple(tuple(r) for r in b))

    def to_complex(self):
        import numpy as np

        def c(x):
            if isinstance(x, QQi):
                return complex(x)
            return complex(float(x), 0.0)
        return np.array([[c(x) for x in r] for r in self.rows], dtype=complex)

    def __eq__(self, other):
        return isinstance(other, SquareMatrix) and self.rows == other.rows

    def __hash__(self):
        return hash(self.rows)

    def __repr__(self):
        return f"SquareMatrix({self.rows!r})"
