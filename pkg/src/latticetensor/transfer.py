"""Minimal pairs, the dependency relation D, and the finite amenability verdict.

A minimal pair of a finite lattice is a join-irreducible p together with an
antichain I of join-irreducibles whose join covers p from above in the
irredundant sense: whenever a set J of join-irreducibles refines I (every
member below some member of I) and still joins above p, then J must contain I
(equivalently, dominate it -- both readings are implemented and agree).

p D q holds when some x has p ≤ q∨x but p ≰ q⁎∨x (q⁎ the lower cover of q);
that is equivalent to q appearing in some minimal pair of p, and the verdict
machinery rests on: the join-semilattice transferability condition holds iff
the D-graph on the join-irreducibles is acyclic.
"""

from __future__ import annotations

from dataclasses import dataclass

from .core import FiniteLattice
from .errors import InternalInconsistency


@dataclass(frozen=True)
class MinimalPair:
    p: int
    members: frozenset

    def sorted_members(self):
        return tuple(sorted(self.members))


@dataclass(frozen=True)
class DGraph:
    vertices: tuple
    edges: frozenset  # ordered pairs (p, q) with p D q

    def successors(self, p):
        return sorted(q for (x, q) in self.edges if x == p)


@dataclass(frozen=True)
class TjVerdict:
    """Either a witnessing linear order on J(L) or an explicit D-cycle."""

    order: tuple | None
    cycle: tuple | None

    @property
    def is_order(self):
        return self.order is not None


def _irr_context(lattice: FiniteLattice):
    irr = [p for p, _ in lattice.join_irreducibles()]
    k = len(irr)
    # join of every subset of J(L), as a table over J-index masks
    join_of = [lattice.bottom_index] * (1 << k)
    for mask in range(1, 1 << k):
        low = mask & -mask
        i = low.bit_length() - 1
        rest = mask ^ low
        join_of[mask] = (
            irr[i] if rest == 0 else lattice.join_table[join_of[rest]][irr[i]]
        )
    # per J-index: mask of J-elements below-or-equal it, and comparable ones
    below = [0] * k
    comparable = [0] * k
    for i in range(k):
        for j in range(k):
            if lattice.leq(irr[j], irr[i]):
                below[i] |= 1 << j
            if lattice.leq(irr[j], irr[i]) or lattice.leq(irr[i], irr[j]):
                comparable[i] |= 1 << j
    return irr, join_of, below, comparable


def _antichain_masks(k, comparable):
    flags = [True] * (1 << k)
    for mask in range(1, 1 << k):
        low = mask & -mask
        i = low.bit_length() - 1
        rest = mask ^ low
        flags[mask] = flags[rest] and not (comparable[i] & rest)
    return flags


def minimal_pairs(lattice: FiniteLattice, condition: str = "contains"):
    """All minimal pairs of the lattice.

    `condition` selects the minimality clause: "contains" requires I ⊆ J for
    every refining join cover J of p, "dominates" requires I ≪ J.  The two are
    equivalent for antichains and both are kept so tests can cross-check.
    """
    if condition not in ("contains", "dominates"):
        raise ValueError(f"unknown condition {condition!r}")
    irr, join_of, below, comparable = _irr_context(lattice)
    k = len(irr)
    antichain = _antichain_masks(k, comparable)
    pairs = []
    up = lattice.up
    for pi in range(k):
        p = irr[pi]
        pbit = 1 << pi
        for mask in range(1, 1 << k):
            if mask & pbit or not antichain[mask]:
                continue
            if not (up[p] >> join_of[mask]) & 1:
                continue  # p ≤ ⋁I fails
            # down-closure of I inside J(L): candidates for refinements J
            dom = 0
            m = mask
            while m:
                i = (m & -m).bit_length() - 1
                m &= m - 1
                dom |= below[i]
            ok = True
            sub = dom
            while True:
                if sub and (up[p] >> join_of[sub]) & 1:
                    if condition == "contains":
                        if mask & ~sub:
                            ok = False
                    else:
                        # I ≪ J: every member of I below some member of J
                        jdom = 0
                        mm = sub
                        while mm:
                            i = (mm & -mm).bit_length() - 1
                            mm &= mm - 1
                            jdom |= below[i]
                        if mask & ~jdom:
                            ok = False
                if not ok or sub == 0:
                    break
                sub = (sub - 1) & dom
            if ok:
                pairs.append(
                    MinimalPair(p, frozenset(_mask_members(mask, irr)))
                )
    pairs.sort(key=lambda mp: (mp.p, mp.sorted_members()))
    return pairs


def _mask_members(mask, irr):
    out = []
    m = mask
    while m:
        i = (m & -m).bit_length() - 1
        m &= m - 1
        out.append(irr[i])
    return out


def d_relation(lattice: FiniteLattice) -> DGraph:
    """The D-graph on J(L), computed two ways and cross-checked.

    The direct definition quantifies over x in L; the indirect one reads the
    edges off the minimal pairs.  They provably agree, so disagreement is an
    implementation bug and raises InternalInconsistency.
    """
    irr_pairs = lattice.join_irreducibles()
    irr = [p for p, _ in irr_pairs]
    star = dict(irr_pairs)
    edges = set()
    for p in irr:
        for q in irr:
            if p == q:
                continue
            qs = star[q]
            for x in range(lattice.n):
                if lattice.leq(p, lattice.join_table[q][x]) and not lattice.leq(
                    p, lattice.join_table[qs][x]
                ):
                    edges.add((p, q))
                    break
    from_pairs = set()
    for mp in minimal_pairs(lattice):
        for q in mp.members:
            from_pairs.add((mp.p, q))
    if edges != from_pairs:
        raise InternalInconsistency(
            f"D-edge computations disagree: direct {sorted(edges)} "
            f"vs minimal pairs {sorted(from_pairs)}"
        )
    return DGraph(tuple(irr), frozenset(edges))


def tj_witness(lattice: FiniteLattice) -> TjVerdict:
    """Topologically order J(L) along the D-edges, or exhibit a D-cycle.

    The order places p before q whenever p D q, so every minimal pair ⟨p, I⟩
    has p preceding all of I.  Ties break by smallest element index.
    """
    graph = d_relation(lattice)
    succ = {p: set() for p in graph.vertices}
    indeg = {p: 0 for p in graph.vertices}
    for p, q in graph.edges:
        if q not in succ[p]:
            succ[p].add(q)
            indeg[q] += 1
    remaining = set(graph.vertices)
    order = []
    while remaining:
        ready = sorted(p for p in remaining if indeg[p] == 0)
        if not ready:
            return TjVerdict(None, _find_cycle(graph, remaining))
        p = ready[0]
        remaining.discard(p)
        order.append(p)
        for q in succ[p]:
            indeg[q] -= 1
    return TjVerdict(tuple(order), None)


def _find_cycle(graph: DGraph, remaining):
    # shortest cycle through the smallest possible start vertex
    succ = {p: sorted(q for (x, q) in graph.edges if x == p and q in remaining)
            for p in remaining}
    for start in sorted(remaining):
        parent = {start: None}
        queue = [start]
        while queue:
            nxt = []
            for v in queue:
                for w in succ[v]:
                    if w == start:
                        path = [v]
                        while parent[path[-1]] is not None:
                            path.append(parent[path[-1]])
                        return tuple(reversed(path))
                    if w not in parent:
                        parent[w] = v
                        nxt.append(w)
            queue = nxt
    raise InternalInconsistency("no cycle found in a non-sortable D-graph")


@dataclass(frozen=True)
class AmenabilityVerdict:
    amenable: bool
    witness: TjVerdict

    def describe(self, lattice):
        if self.amenable:
            names = " <= ".join(lattice.names[p] for p in self.witness.order)
            return f"amenable (order {names})"
        cyc = self.witness.cycle
        arrows = " -> ".join(lattice.names[p] for p in cyc + (cyc[0],))
        return f"not amenable (D-cycle {arrows})"


def is_amenable_finite(lattice: FiniteLattice) -> AmenabilityVerdict:
    """Amenability of a finite lattice: D-acyclicity of J(L), with evidence."""
    verdict = tj_witness(lattice)
    return AmenabilityVerdict(verdict.is_order, verdict)
