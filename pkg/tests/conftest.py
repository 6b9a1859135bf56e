"""Shared corpus builders: catalog instances plus seeded random lattices.

Random lattices come from intersection-closed set families (every finite
lattice arises as one), which gives a good spread of distributive and
non-distributive, acyclic and cyclic instances without any rejection logic
beyond a size filter.
"""

import random

from latticetensor import catalog
from latticetensor.core import FiniteLattice


def family_lattice(family):
    elems = sorted(family, key=lambda s: (len(s), sorted(s)))
    n = len(elems)
    covers = []
    for i, s in enumerate(elems):
        for j, t in enumerate(elems):
            if s < t and not any(s < u < t for u in elems):
                covers.append((i, j))
    names = ["".join(str(x) for x in sorted(s)) or "o" for s in elems]
    return FiniteLattice.from_covers(n, covers, names)


def random_lattice(rng, max_size=10, min_size=2, universe=5):
    while True:
        m = rng.randint(2, universe)
        family = {frozenset(range(m))}
        for _ in range(rng.randint(2, 6)):
            family.add(frozenset(i for i in range(m) if rng.random() < 0.5))
        frontier = list(family)
        while frontier:
            s = frontier.pop()
            for t in list(family):
                u = s & t
                if u not in family:
                    family.add(u)
                    frontier.append(u)
        if min_size <= len(family) <= max_size:
            return family_lattice(family)


def random_lattices(seed, count, max_size=10, min_size=2, universe=5):
    rng = random.Random(seed)
    return [random_lattice(rng, max_size, min_size, universe) for _ in range(count)]


def catalog_lattices(max_size=8):
    out = [
        ("chain2", catalog.chain(2)),
        ("chain3", catalog.chain(3)),
        ("chain4", catalog.chain(4)),
        ("boolean2", catalog.boolean(2)),
        ("boolean3", catalog.boolean(3)),
        ("M3", catalog.m3()),
        ("M4", catalog.m4()),
        ("N5", catalog.n5()),
    ]
    return [(name, lat) for name, lat in out if lat.n <= max_size]
