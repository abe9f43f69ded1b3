"""Algebra carriers: exact scalars, matrices, the triangular lift, formal
independence spaces and the seeded random word algebra."""

from .exact import QQi, RatPoly, scalar_from_str, scalar_to_str
from .matrices import SquareMatrix
from .spaces import ExpectationPair, Family, FormalElement, FormalSpace, \
    tilde_expectation
from .triangular import Triangular, lift
from .wordspace import WordElement, WordSpace

__all__ = [
    "QQi", "RatPoly", "scalar_from_str", "scalar_to_str",
    "SquareMatrix", "Triangular", "lift",
    "ExpectationPair", "Family", "FormalElement", "FormalSpace",
    "tilde_expectation", "WordElement", "WordSpace",
]
