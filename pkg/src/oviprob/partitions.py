"""Set partitions of {1..n} and the lattice combinatorics built on them.

Provides enumeration of the partition classes (all, noncrossing, interval,
irreducible, pairing), the reverse-refinement order and the min-max order,
the Moebius function of the non-crossing lattice, the tree factorial, the
Murua coefficient of an irreducible partition, kernels of index tuples and
restriction to subsets.  Everything is exact (int / Fraction).
"""

from __future__ import annotations

import os
from fractions import Fraction
from functools import lru_cache
from math import comb

from .errors import OrderError, PartitionClassError, SizeLimitError

#: Hard cap on the ground-set size for enumeration.  Bell numbers explode;
#: override with the OVIPROB_ENUM_CAP environment variable if you must.
ENUM_CAP = int(os.environ.get("OVIPROB_ENUM_CAP", "12"))

CLASSES = ("all", "noncrossing", "interval", "irreducible", "pairing")


class SetPartition:
    """A partition of {1..n} in canonical form.

    Blocks are stored sorted by their minimum, elements ascending, so two
    partitions are equal iff their canonical forms coincide.  Instances are
    immutable and hashable.
    """

    __slots__ = ("n", "blocks", "_hash")

    def __init__(self, n, blocks):
        blocks = tuple(tuple(sorted(b)) for b in blocks)
        blocks = tuple(sorted(blocks, key=lambda b: b[0]))
        seen = set()
        for b in blocks:
            if not b:
                raise PartitionClassError("empty block")
            seen.update(b)
        total = sum(len(b) for b in blocks)
        if total != len(seen) or seen != set(range(1, n + 1)):
            raise PartitionClassError(
                f"blocks {blocks!r} do not partition 1..{n}")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "blocks", blocks)
        object.__setattr__(self, "_hash", hash((n, blocks)))

    def __setattr__(self, name, value):
        raise AttributeError("SetPartition is immutable")

    def __eq__(self, other):
        return (isinstance(other, SetPartition)
                and self.n == other.n and self.blocks == other.blocks)

    def __hash__(self):
        return self._hash

    def __repr__(self):
        inner = "|".join(",".join(map(str, b)) for b in self.blocks)
        return f"SetPartition({self.n}: {inner})"

    def __len__(self):
        """Number of blocks |pi|."""
        return len(self.blocks)

    # -- predicates -------------------------------------------------------

    def is_noncrossing(self):
        """No a < b < c < d with a,c in one block and b,d in another."""
        owner = self.block_index_of()
        # scan with a stack of open blocks; every element must belong to the
        # innermost open block, else two blocks cross
        stack = []
        for i in range(1, self.n + 1):
            b = self.blocks[owner[i]]
            if i == b[0]:
                stack.append(b)
            if stack[-1] != b:
                return False
            if i == b[-1]:
                stack.pop()
        return True

    def is_interval(self):
        """Every block a contiguous run of integers."""
        return all(b[-1] - b[0] + 1 == len(b) for b in self.blocks)

    def is_irreducible(self):
        """1 and n lie in the same block (the min-max condition below 1_n)."""
        return self.n in self.blocks[0]

    def is_pairing(self):
        return all(len(b) == 2 for b in self.blocks)

    # -- orders and restriction -------------------------------------------

    def block_index_of(self):
        """Map element -> index of its block in self.blocks."""
        owner = {}
        for i, b in enumerate(self.blocks):
            for x in b:
                owner[x] = i
        return owner

    def __le__(self, other):
        """Reverse refinement: every block of self inside a block of other."""
        if self.n != other.n:
            raise OrderError("partitions of different ground sets")
        owner = other.block_index_of()
        return all(len({owner[x] for x in b}) == 1 for b in self.blocks)

    def minmax_leq(self, other):
        """The min-max order: self <= other and, for every block V of other,
        min(V) and max(V) share a block of self."""
        if not self <= other:
            return False
        owner = self.block_index_of()
        return all(owner[b[0]] == owner[b[-1]] for b in other.blocks)

    def restrict(self, subset):
        """Partition induced on `subset`, relabeled to 1..len(subset) in order."""
        subset = sorted(subset)
        pos = {x: i + 1 for i, x in enumerate(subset)}
        keep = set(subset)
        blocks = [tuple(pos[x] for x in b if x in keep) for b in self.blocks]
        return SetPartition(len(subset), [b for b in blocks if b])

    def to_json(self):
        """JSON form: array of arrays of 1-based integers, canonical order."""
        return [list(b) for b in self.blocks]

    @classmethod
    def from_json(cls, data):
        n = sum(len(b) for b in data)
        return cls(n, data)


def full(n):
    """The one-block partition 1_n."""
    return SetPartition(n, [range(1, n + 1)])


def discrete(n):
    """The all-singletons partition 0_n."""
    return SetPartition(n, [[i] for i in range(1, n + 1)])


def kernel(tup):
    """ker(j): positions i, k share a block iff tup[i] == tup[k]."""
    if not tup:
        raise PartitionClassError("kernel of an empty tuple")
    groups = {}
    for i, v in enumerate(tup, start=1):
        groups.setdefault(v, []).append(i)
    return SetPartition(len(tup), list(groups.values()))


# -- enumeration ------------------------------------------------------------


def _check_cap(n):
    if not 1 <= n <= ENUM_CAP:
        raise SizeLimitError(
            f"ground-set size {n} outside 1..{ENUM_CAP} "
            f"(cap ENUM_CAP={ENUM_CAP}, env OVIPROB_ENUM_CAP)")


def _all_blockslists(n):
    """All set partitions of [n] as lists of lists (insertion order)."""
    parts = [[[1]]]
    for x in range(2, n + 1):
        nxt = []
        for p in parts:
            for i in range(len(p)):
                nxt.append([b + [x] if j == i else list(b)
                            for j, b in enumerate(p)])
            nxt.append([list(b) for b in p] + [[x]])
        parts = nxt
    return parts


def _nc_blockslists(n, offset=0):
    """Non-crossing partitions of {offset+1 .. offset+n} by gap recursion."""
    if n == 0:
        return [[]]
    out = []
    # choose the block of the first element; the contiguous gaps between the
    # chosen elements are then partitioned independently (non-crossing forces
    # gap blocks to stay inside their gap)
    rest = list(range(offset + 2, offset + n + 1))
    for mask in range(1 << (n - 1)):
        block = [offset + 1] + [rest[i] for i in range(n - 1)
                                if (mask >> i) & 1]
        bset = set(block)
        gaps, run = [], []
        for x in range(offset + 1, offset + n + 1):
            if x in bset:
                if run:
                    gaps.append(run)
                    run = []
            else:
                run.append(x)
        if run:
            gaps.append(run)
        choices = [[]]
        for gap in gaps:
            sub = _nc_blockslists(len(gap), offset=gap[0] - 1)
            choices = [c + s for c in choices for s in sub]
        for c in choices:
            out.append([block] + c)
    return out


def _interval_blockslists(n):
    out = []

    def rec(start, acc):
        if start > n:
            out.append([list(b) for b in acc])
            return
        for size in range(1, n - start + 2):
            acc.append(list(range(start, start + size)))
            rec(start + size, acc)
            acc.pop()

    rec(1, [])
    return out


def _pairing_blockslists(n):
    if n % 2:
        return []
    out = []

    def rec(remaining, acc):
        if not remaining:
            out.append([list(b) for b in acc])
            return
        a = remaining[0]
        for i in range(1, len(remaining)):
            b = remaining[i]
            acc.append((a, b))
            rec(remaining[1:i] + remaining[i + 1:], acc)
            acc.pop()

    rec(tuple(range(1, n + 1)), [])
    return out


def enumerate_partitions(n, cls="all"):
    """All partitions of [n] in the given class, lexicographic canonical order.

    cls is one of 'all', 'noncrossing', 'interval', 'irreducible', 'pairing';
    'irreducible' means non-crossing with 1 and n in one block.
    """
    _check_cap(n)
    if cls == "all":
        raw = _all_blockslists(n)
    elif cls == "noncrossing":
        raw = _nc_blockslists(n)
    elif cls == "irreducible":
        raw = [p for p in _nc_blockslists(n)
               if n in next(b for b in p if 1 in b)]
    elif cls == "interval":
        raw = _interval_blockslists(n)
    elif cls == "pairing":
        raw = _pairing_blockslists(n)
    else:
        raise PartitionClassError(f"unknown partition class {cls!r}")
    parts = [SetPartition(n, p) for p in raw]
    parts.sort(key=lambda p: p.blocks)
    return parts


@lru_cache(maxsize=64)
def noncrossing(n):
    return tuple(enumerate_partitions(n, "noncrossing"))


@lru_cache(maxsize=64)
def intervals(n):
    return tuple(enumerate_partitions(n, "interval"))


@lru_cache(maxsize=64)
def irreducibles(n):
    return tuple(enumerate_partitions(n, "irreducible"))


@lru_cache(maxsize=64)
def noncrossing_pairings(n):
    return tuple(p for p in enumerate_partitions(n, "pairing")
                 if p.is_noncrossing())


# -- Moebius function of NC(n) ------------------------------------------------

_moebius_memo = {}


def moebius(sigma, pi):
    """Moebius function of the interval [sigma, pi] in the lattice NC(n).

    Computed by the defining recursion
        sum_{sigma <= tau <= pi} moebius(tau, pi) = [sigma == pi],
    memoized, so it is valid on arbitrary intervals.
    """
    if not sigma.is_noncrossing() or not pi.is_noncrossing():
        raise PartitionClassError("moebius is defined on NC(n) only")
    if not sigma <= pi:
        raise OrderError(f"{sigma!r} is not below {pi!r}")
    return _moebius_rec(sigma, pi)


def _moebius_rec(sigma, pi):
    if sigma == pi:
        return 1
    key = (sigma, pi)
    val = _moebius_memo.get(key)
    if val is None:
        val = -sum(_moebius_rec(tau, pi)
                   for tau in noncrossing(sigma.n)
                   if tau != sigma and sigma <= tau and tau <= pi)
        _moebius_memo[key] = val
    return val


def moebius_to_full(pi):
    """Mob(pi, 1_n), the coefficient in the free moment-cumulant inversion."""
    return moebius(pi, full(pi.n))


# -- tree factorial and the Murua coefficient ---------------------------------


def tree_factorial(pi):
    """tau(pi)!: product over blocks V of the number of blocks inside the
    span [min V, max V] (V itself included).  Requires pi non-crossing."""
    if not pi.is_noncrossing():
        raise PartitionClassError("tree factorial requires a non-crossing partition")
    t = 1
    for v in pi.blocks:
        lo, hi = v[0], v[-1]
        t *= sum(1 for w in pi.blocks if lo <= w[0] and w[-1] <= hi)
    return t


def nesting_forest(pi):
    """children[i] = indices of blocks immediately nested in block i;
    roots = blocks with no enclosing block.  Assumes pi non-crossing."""
    idx = range(len(pi.blocks))
    span = [(b[0], b[-1]) for b in pi.blocks]

    def encloses(i, j):
        return i != j and span[i][0] < span[j][0] and span[j][1] < span[i][1]

    parent = {}
    for j in idx:
        best = None
        for i in idx:
            if encloses(i, j):
                if best is None or encloses(best, i):
                    best = i
        parent[j] = best
    children = {i: [] for i in idx}
    roots = []
    for j in idx:
        if parent[j] is None:
            roots.append(j)
        else:
            children[parent[j]].append(j)
    return roots, children


def _strict_maps_upto(pi, k):
    """Number of colorings of blocks by {1..k} strictly increasing from a
    nested block to the one enclosing it (not necessarily surjective)."""
    roots, children = nesting_forest(pi)

    def g(node):
        # g(node)[j] = #colorings of the subtree with color(node) == j+1
        kid_cum = []
        for c in children[node]:
            gc = g(c)
            cum = [0] * (k + 1)
            for j in range(1, k + 1):
                cum[j] = cum[j - 1] + gc[j - 1]
            kid_cum.append(cum)
        out = []
        for j in range(1, k + 1):
            prod = 1
            for cum in kid_cum:
                prod *= cum[j - 1]
            out.append(prod)
        return out

    total = 1
    for r in roots:
        total *= sum(g(r))
    return total


def murua_omega_k(pi, k):
    """omega_k(pi): colorings by {1..k} using every color, strictly increasing
    along nesting (inner block < outer block)."""
    return sum((-1) ** (k - i) * comb(k, i) * _strict_maps_upto(pi, i)
               for i in range(1, k + 1))


def murua_omega(pi):
    """The alternating-harmonic coefficient omega(pi) of an irreducible
    non-crossing partition: sum_k ((-1)^(k+1)/k) * omega_k(pi)."""
    if not pi.is_noncrossing() or not pi.is_irreducible():
        raise PartitionClassError(
            "murua_omega requires an irreducible non-crossing partition")
    m = len(pi.blocks)
    return sum(Fraction((-1) ** (k + 1), k) * murua_omega_k(pi, k)
               for k in range(1, m + 1))


def catalan(n):
    return comb(2 * n, n) // (n + 1)
