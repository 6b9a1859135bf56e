"""Finite lattices with zero: construction, validation, arithmetic, congruences.

Elements of a FiniteLattice are the integers 0..n-1 (positional identity);
names are cosmetic labels carried along through products and quotients.  The
order is stored as one bitmask row per element (a dense boolean matrix), and
the join/meet tables are precomputed, so everything downstream is table
lookups and integer bit tricks.

The EffectiveLattice contract at the bottom is what `tensor` and `adjust`
compute against: it is satisfied both by FiniteLattice (handles are ints) and
by the free lattice with an adjoined bottom (handles are terms).
"""

from __future__ import annotations

import abc
import os
from dataclasses import dataclass

from .errors import (
    CyclicCovers,
    IndexOutOfRange,
    NoBottom,
    NotALattice,
    SizeOverflow,
    TooSmall,
)

DEFAULT_ELEMENT_CAP = 64


def element_cap() -> int:
    """Maximum number of elements a constructed lattice may have.

    Overridable through the LATTICETENSOR_ELEMENT_CAP environment variable.
    """
    value = os.environ.get("LATTICETENSOR_ELEMENT_CAP")
    return int(value) if value else DEFAULT_ELEMENT_CAP


class EffectiveLattice(abc.ABC):
    """Order, join and meet over an opaque element handle.

    `has_all_meets` states whether meets of arbitrary pairs exist; it is True
    for every implementation in this library.
    """

    has_all_meets = True

    @property
    @abc.abstractmethod
    def bottom(self):
        """The least element handle."""

    @abc.abstractmethod
    def leq(self, x, y) -> bool:
        ...

    @abc.abstractmethod
    def join(self, x, y):
        ...

    @abc.abstractmethod
    def meet(self, x, y):
        ...

    def is_bottom(self, x) -> bool:
        return self.eq(x, self.bottom)

    def eq(self, x, y) -> bool:
        return self.leq(x, y) and self.leq(y, x)

    def join_many(self, xs):
        """Join of an iterable of handles; the empty join is the bottom."""
        out = self.bottom
        for x in xs:
            out = self.join(out, x)
        return out

    def meet_many(self, xs):
        """Meet of a nonempty iterable of handles."""
        it = iter(xs)
        try:
            out = next(it)
        except StopIteration:
            raise ValueError("meet_many needs at least one element") from None
        for x in it:
            out = self.meet(out, x)
        return out

    def format_element(self, x) -> str:
        return str(x)


class FiniteLattice(EffectiveLattice):
    """A finite lattice with zero on elements 0..n-1.

    Instances are immutable after construction and validated eagerly: the
    constructor refuses anything whose tables are not the unique lub/glb of a
    partial order with a bottom.
    """

    __slots__ = ("n", "up", "down", "join_table", "meet_table", "names",
                 "bottom_index", "top_index", "_subset_join", "_antichain_flags")

    def __init__(self, n, up, join_table, meet_table, names=None, _validate=True):
        self.n = n
        self.up = tuple(up)  # up[x] = bitmask of y with x <= y
        self.down = tuple(
            sum(1 << x for x in range(n) if (up[x] >> y) & 1) for y in range(n)
        )
        self.join_table = tuple(tuple(row) for row in join_table)
        self.meet_table = tuple(tuple(row) for row in meet_table)
        if names is None:
            names = tuple(f"e{i}" for i in range(n))
        self.names = tuple(names)
        full = (1 << n) - 1
        bottoms = [x for x in range(n) if self.up[x] == full]
        tops = [x for x in range(n) if self.down[x] == full]
        if not bottoms:
            raise NoBottom("no element lies below every other element")
        self.bottom_index = bottoms[0]
        self.top_index = tops[0] if tops else None
        self._subset_join = None
        self._antichain_flags = None
        if _validate:
            self._validate()

    # -- construction ------------------------------------------------------

    @classmethod
    def from_covers(cls, count, covers, names=None):
        """Build a lattice from its cover (Hasse) relation.

        `covers` lists (lower, upper) pairs; leq is the reflexive-transitive
        closure.  Raises CyclicCovers, NoBottom, or NotALattice when the data
        does not describe a lattice.
        """
        if count < 1:
            raise NotALattice((0, 0), "count must be >= 1")
        if count > element_cap():
            raise SizeOverflow(f"{count} elements exceeds cap {element_cap()}")
        succ = [0] * count
        indeg = [0] * count
        for lo, hi in covers:
            if not (0 <= lo < count and 0 <= hi < count):
                raise IndexOutOfRange(f"cover ({lo},{hi}) out of range")
            if not (succ[lo] >> hi) & 1:
                succ[lo] |= 1 << hi
                indeg[hi] += 1
        # Kahn toposort; leftover nodes mean a cycle.
        order = [x for x in range(count) if indeg[x] == 0]
        seen = 0
        queue = list(order)
        while queue:
            x = queue.pop()
            seen += 1
            m = succ[x]
            while m:
                y = (m & -m).bit_length() - 1
                m &= m - 1
                indeg[y] -= 1
                if indeg[y] == 0:
                    queue.append(y)
                    order.append(y)
        if seen != count:
            raise CyclicCovers("cover relation contains a cycle")
        up = [1 << x for x in range(count)]
        for x in reversed(order):
            m = succ[x]
            while m:
                y = (m & -m).bit_length() - 1
                m &= m - 1
                up[x] |= up[y]
        full = (1 << count) - 1
        if not any(up[x] == full for x in range(count)):
            raise NoBottom("no element lies below every other element")
        down = [sum(1 << x for x in range(count) if (up[x] >> y) & 1)
                for y in range(count)]
        join_table = [[0] * count for _ in range(count)]
        meet_table = [[0] * count for _ in range(count)]
        for x in range(count):
            for y in range(x, count):
                j = cls._unique_bound(up, up[x] & up[y], (x, y), least=True)
                m = cls._unique_bound(down, down[x] & down[y], (x, y), least=False)
                join_table[x][y] = join_table[y][x] = j
                meet_table[x][y] = meet_table[y][x] = m
        return cls(count, up, join_table, meet_table, names)

    @staticmethod
    def _unique_bound(rows, candidates, pair, least):
        """Least (or greatest) element of the candidate mask, or NotALattice.

        An element x is the extreme bound iff every candidate is on the right
        side of it, i.e. candidates ⊆ rows[x] (rows = up for lub, down for glb).
        """
        kind = "upper" if least else "lower"
        if candidates == 0:
            raise NotALattice(pair, f"no common {kind} bound")
        m = candidates
        while m:
            x = (m & -m).bit_length() - 1
            m &= m - 1
            if (candidates & ~rows[x]) == 0:
                return x
        raise NotALattice(pair, f"no {'least' if least else 'greatest'} {kind} bound")

    def _validate(self):
        n = self.n
        for x in range(n):
            if not (self.up[x] >> x) & 1:
                raise NotALattice((x, x), "order not reflexive")
        for x in range(n):
            ux = self.up[x]
            m = ux
            while m:
                y = (m & -m).bit_length() - 1
                m &= m - 1
                if x != y and (self.up[y] >> x) & 1:
                    raise NotALattice((x, y), "order not antisymmetric")
                if self.up[y] & ~ux:
                    raise NotALattice((x, y), "order not transitive")
        for x in range(n):
            for y in range(n):
                j = self.join_table[x][y]
                cand = self.up[x] & self.up[y]
                if not (cand >> j) & 1 or cand & ~self.up[j]:
                    raise NotALattice((x, y), "join table entry is not the lub")
                w = self.meet_table[x][y]
                cand = self.down[x] & self.down[y]
                if not (cand >> w) & 1 or cand & ~self.down[w]:
                    raise NotALattice((x, y), "meet table entry is not the glb")

    # -- EffectiveLattice --------------------------------------------------

    @property
    def bottom(self):
        return self.bottom_index

    def leq(self, x, y):
        self._check(x)
        self._check(y)
        return bool((self.up[x] >> y) & 1)

    def join(self, x, y):
        self._check(x)
        self._check(y)
        return self.join_table[x][y]

    def meet(self, x, y):
        self._check(x)
        self._check(y)
        return self.meet_table[x][y]

    def is_bottom(self, x):
        return x == self.bottom_index

    def eq(self, x, y):
        return x == y

    def format_element(self, x):
        return self.names[x]

    def _check(self, x):
        if not isinstance(x, int) or not 0 <= x < self.n:
            raise IndexOutOfRange(f"element {x!r} not in 0..{self.n - 1}")

    # -- structure ---------------------------------------------------------

    def elements(self):
        return range(self.n)

    def nonbottom(self):
        """The elements of A⁻, ascending."""
        return tuple(x for x in range(self.n) if x != self.bottom_index)

    def covers(self):
        """The Hasse diagram as sorted (lower, upper) pairs."""
        out = []
        for x in range(self.n):
            strict = self.up[x] & ~(1 << x)
            m = strict
            while m:
                y = (m & -m).bit_length() - 1
                m &= m - 1
                between = strict & self.down[y] & ~(1 << y)
                if between == 0:
                    out.append((x, y))
        return sorted(out)

    def lower_covers(self, x):
        strict = self.down[x] & ~(1 << x)
        out = []
        m = strict
        while m:
            y = (m & -m).bit_length() - 1
            m &= m - 1
            if (strict & self.up[y] & ~(1 << y)) == 0:
                out.append(y)
        return out

    def join_irreducibles(self):
        """All (p, p_star) with p join-irreducible and p_star its unique lower cover."""
        out = []
        for p in range(self.n):
            if p == self.bottom_index:
                continue
            lows = self.lower_covers(p)
            if len(lows) == 1:
                out.append((p, lows[0]))
        return out

    def join_mask(self, mask):
        """Join of the element set given as a bitmask (empty mask -> bottom)."""
        out = self.bottom_index
        m = mask
        while m:
            x = (m & -m).bit_length() - 1
            m &= m - 1
            out = self.join_table[out][x]
        return out

    def meet_mask(self, mask):
        if mask == 0:
            raise ValueError("empty meet over a finite lattice subset")
        out = None
        m = mask
        while m:
            x = (m & -m).bit_length() - 1
            m &= m - 1
            out = x if out is None else self.meet_table[out][x]
        return out

    def subset_join_table(self):
        """join_mask for every subset of elements, precomputed (n <= 20)."""
        if self._subset_join is None:
            if self.n > 20:
                raise SizeOverflow(f"subset tables need n <= 20, got {self.n}")
            table = [self.bottom_index] * (1 << self.n)
            for mask in range(1, 1 << self.n):
                lb = mask & -mask
                x = lb.bit_length() - 1
                table[mask] = self.join_table[table[mask ^ lb]][x] if mask ^ lb else x
            self._subset_join = table
        return self._subset_join

    def __repr__(self):
        return f"FiniteLattice(n={self.n}, covers={self.covers()!r})"


# -- derived constructions -------------------------------------------------


def direct_product(l1: FiniteLattice, l2: FiniteLattice) -> FiniteLattice:
    """Componentwise product; element (x, y) gets index x*|L2| + y."""
    n = l1.n * l2.n
    if n > element_cap():
        raise SizeOverflow(f"product with {n} elements exceeds cap {element_cap()}")
    n2 = l2.n
    up = [0] * n
    for x1 in range(l1.n):
        for x2 in range(l2.n):
            mask = 0
            for y1 in range(l1.n):
                if not (l1.up[x1] >> y1) & 1:
                    continue
                base = y1 * n2
                m2 = l2.up[x2]
                while m2:
                    y2 = (m2 & -m2).bit_length() - 1
                    m2 &= m2 - 1
                    mask |= 1 << (base + y2)
            up[x1 * n2 + x2] = mask
    join_table = [[0] * n for _ in range(n)]
    meet_table = [[0] * n for _ in range(n)]
    for x1 in range(l1.n):
        for x2 in range(l2.n):
            i = x1 * n2 + x2
            for y1 in range(l1.n):
                for y2 in range(l2.n):
                    j = y1 * n2 + y2
                    join_table[i][j] = l1.join_table[x1][y1] * n2 + l2.join_table[x2][y2]
                    meet_table[i][j] = l1.meet_table[x1][y1] * n2 + l2.meet_table[x2][y2]
    names = tuple(
        f"({l1.names[x1]},{l2.names[x2]})"
        for x1 in range(l1.n) for x2 in range(l2.n)
    )
    return FiniteLattice(n, up, join_table, meet_table, names)


@dataclass(frozen=True)
class Congruence:
    """A lattice congruence as an element -> block-id map (blocks 0..k-1)."""

    block_of: tuple

    @property
    def num_blocks(self):
        return max(self.block_of) + 1

    def together(self, x, y):
        return self.block_of[x] == self.block_of[y]


def _normalize_blocks(parent, n):
    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    reps = {}
    block_of = [0] * n
    for x in range(n):
        r = find(x)
        if r not in reps:
            reps[r] = len(reps)
        block_of[x] = reps[r]
    return tuple(block_of)


def congruence_generated(lattice: FiniteLattice, pairs) -> Congruence:
    """Smallest congruence collapsing the given pairs.

    Standard fixpoint: close the partition under transitivity and under
    compatibility with join and meet.
    """
    n = lattice.n
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(x, y):
        rx, ry = find(x), find(y)
        if rx == ry:
            return False
        parent[max(rx, ry)] = min(rx, ry)
        return True

    for x, y in pairs:
        lattice._check(x)
        lattice._check(y)
        union(x, y)
    changed = True
    while changed:
        changed = False
        groups = {}
        for x in range(n):
            groups.setdefault(find(x), []).append(x)
        for block in groups.values():
            for i in range(len(block) - 1):
                x, y = block[i], block[i + 1]
                for z in range(n):
                    if union(lattice.join_table[x][z], lattice.join_table[y][z]):
                        changed = True
                    if union(lattice.meet_table[x][z], lattice.meet_table[y][z]):
                        changed = True
    return Congruence(_normalize_blocks(parent, n))


def is_congruence(lattice: FiniteLattice, cong: Congruence) -> bool:
    b = cong.block_of
    n = lattice.n
    for x in range(n):
        for y in range(n):
            if b[x] != b[y]:
                continue
            for z in range(n):
                if b[lattice.join_table[x][z]] != b[lattice.join_table[y][z]]:
                    return False
                if b[lattice.meet_table[x][z]] != b[lattice.meet_table[y][z]]:
                    return False
    return True


def quotient(lattice: FiniteLattice, cong: Congruence):
    """Quotient lattice on blocks plus the projection map.

    Blocks are renumbered by their least member so output is deterministic.
    """
    n = lattice.n
    members = {}
    for x in range(n):
        members.setdefault(cong.block_of[x], []).append(x)
    order = sorted(members, key=lambda b: members[b][0])
    renumber = {b: i for i, b in enumerate(order)}
    proj = tuple(renumber[cong.block_of[x]] for x in range(n))
    k = len(order)
    reps = [members[b][0] for b in order]
    up = [0] * k
    join_table = [[0] * k for _ in range(k)]
    meet_table = [[0] * k for _ in range(k)]
    for i, x in enumerate(reps):
        for j, y in enumerate(reps):
            join_table[i][j] = proj[lattice.join_table[x][y]]
            meet_table[i][j] = proj[lattice.meet_table[x][y]]
    for i in range(k):
        for j in range(k):
            if join_table[i][j] == j:
                up[i] |= 1 << j
    names = tuple(
        "{" + ",".join(lattice.names[x] for x in members[b]) + "}" for b in order
    )
    return FiniteLattice(k, up, join_table, meet_table, names), proj


def is_simple(lattice: FiniteLattice) -> bool:
    """True iff every principal congruence collapses everything."""
    if lattice.n < 2:
        raise TooSmall("simplicity needs at least 2 elements")
    for x in range(lattice.n):
        for y in range(x + 1, lattice.n):
            if congruence_generated(lattice, [(x, y)]).num_blocks != 1:
                return False
    return True


def is_sd_join(lattice: FiniteLattice) -> bool:
    """Exhaustive join-semidistributivity check: x∨z = y∨z ⇒ x∨z = (x∧y)∨z."""
    jt, mt = lattice.join_table, lattice.meet_table
    n = lattice.n
    for x in range(n):
        for y in range(n):
            w = mt[x][y]
            for z in range(n):
                if jt[x][z] == jt[y][z] and jt[x][z] != jt[w][z]:
                    return False
    return True


def is_distributive(lattice: FiniteLattice) -> bool:
    jt, mt = lattice.join_table, lattice.meet_table
    n = lattice.n
    for x in range(n):
        for y in range(n):
            for z in range(n):
                if mt[x][jt[y][z]] != jt[mt[x][y]][mt[x][z]]:
                    return False
    return True


def sublattice_generated(lattice: FiniteLattice, seed):
    """Least subset containing `seed` and closed under join and meet."""
    current = set(seed)
    if not current:
        raise ValueError("seed must be nonempty")
    for x in current:
        lattice._check(x)
    frontier = list(current)
    while frontier:
        x = frontier.pop()
        for y in list(current):
            for z in (lattice.join_table[x][y], lattice.meet_table[x][y]):
                if z not in current:
                    current.add(z)
                    frontier.append(z)
    return frozenset(current)


def induced_lattice(lattice: FiniteLattice, elements):
    """A join/meet-closed subset re-based as its own lattice.

    Returns (sublattice, mapping) where mapping[i] is the ambient element of
    sublattice element i.  The subset's least member becomes the new bottom;
    it need not be the ambient zero.
    """
    elems = sorted(elements)
    pos = {x: i for i, x in enumerate(elems)}
    k = len(elems)
    for x in elems:
        for y in elems:
            if lattice.join_table[x][y] not in pos or lattice.meet_table[x][y] not in pos:
                raise NotALattice((x, y), "subset not closed under join/meet")
    up = [0] * k
    for i, x in enumerate(elems):
        for j, y in enumerate(elems):
            if (lattice.up[x] >> y) & 1:
                up[i] |= 1 << j
    join_table = [[pos[lattice.join_table[x][y]] for y in elems] for x in elems]
    meet_table = [[pos[lattice.meet_table[x][y]] for y in elems] for x in elems]
    names = tuple(lattice.names[x] for x in elems)
    return FiniteLattice(k, up, join_table, meet_table, names), tuple(elems)
