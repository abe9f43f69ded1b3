"""oviprob: exact combinatorics and transforms for infinitesimal free,
Boolean and monotone probability, scalar and matrix-valued, with brute-force
oracles and random-matrix model verification at desk scale."""

__version__ = "0.1.0"
