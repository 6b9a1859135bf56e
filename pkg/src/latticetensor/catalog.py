"""Built-in lattices: chain<n>, boolean<n>, M3, M4, N5."""

from __future__ import annotations

import string

from .core import FiniteLattice
from .errors import LatticeError, SizeOverflow


def chain(n: int) -> FiniteLattice:
    if n < 1:
        raise LatticeError("chain needs at least one element")
    covers = [(i, i + 1) for i in range(n - 1)]
    names = [str(i) for i in range(n)]
    return FiniteLattice.from_covers(n, covers, names)


def boolean(k: int) -> FiniteLattice:
    """The Boolean lattice 2^k; element i is the subset with bitmask i."""
    n = 1 << k
    if k < 0 or n > 4096:
        raise SizeOverflow(f"boolean({k}) is out of range")
    up = [0] * n
    for x in range(n):
        for y in range(n):
            if x & ~y == 0:
                up[x] |= 1 << y
    join_table = [[x | y for y in range(n)] for x in range(n)]
    meet_table = [[x & y for y in range(n)] for x in range(n)]
    letters = string.ascii_lowercase
    names = []
    for x in range(n):
        if x == 0:
            names.append("0")
        elif x == n - 1 and k > 0:
            names.append("1")
        else:
            names.append("".join(letters[i] for i in range(k) if (x >> i) & 1))
    return FiniteLattice(n, up, join_table, meet_table, names)


def _atoms_lattice(k: int) -> FiniteLattice:
    # 0 below k pairwise-incomparable atoms below 1
    n = k + 2
    covers = [(0, i) for i in range(1, k + 1)] + [(i, n - 1) for i in range(1, k + 1)]
    names = ["0"] + list(string.ascii_lowercase[:k]) + ["1"]
    return FiniteLattice.from_covers(n, covers, names)


def m3() -> FiniteLattice:
    return _atoms_lattice(3)


def m4() -> FiniteLattice:
    return _atoms_lattice(4)


def n5() -> FiniteLattice:
    # 0 < a < c < 1 and 0 < b < 1, with b incomparable to a and c
    covers = [(0, 1), (1, 3), (0, 2), (3, 4), (2, 4)]
    return FiniteLattice.from_covers(5, covers, ["0", "a", "b", "c", "1"])


def catalog_names():
    return ["chain<n>", "boolean<n>", "M3", "M4", "N5"]


def from_name(name: str) -> FiniteLattice:
    """Resolve a catalog name like 'chain4', 'boolean2', 'M3'."""
    low = name.lower()
    if low == "m3":
        return m3()
    if low == "m4":
        return m4()
    if low == "n5":
        return n5()
    if low.startswith("chain") and low[5:].isdigit():
        return chain(int(low[5:]))
    if low.startswith("boolean") and low[7:].isdigit():
        return boolean(int(low[7:]))
    raise KeyError(f"unknown catalog lattice {name!r}; known: {', '.join(catalog_names())}")
