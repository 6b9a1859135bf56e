"""Tensor products of lattices with zero, represented by bi-ideals of A×B.

A bi-ideal is a hereditary subset of A×B containing the "frame"
(A×{0}) ∪ ({0}×B) and closed under lateral joins (joins of pairs sharing a
coordinate).  Two storage layouts sit behind one interface:

* BiIdeal      -- both carriers finite; one bitmask over B per element of A.
* FreeBiIdeal  -- A finite, B the free lattice with adjoined bottom; each
                  fiber is an antichain of maximal term generators.

Every fiber of a (closed) bi-ideal is a principal down-set, because fibers
are hereditary and closed under joins; the generator layout keeps a list so
unions of pure tensors (which need not be closed) can be represented too.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from . import freelat
from .core import EffectiveLattice, FiniteLattice, direct_product
from .errors import CapExceeded, CarrierMismatch, Divergence, NotAHomomorphism, TermSizeExceeded

_CLOSURE_ROUND_LIMIT = 10_000


class BiIdeal:
    """A bi-ideal of A×B for finite carriers, stored as per-A bitmask fibers."""

    __slots__ = ("lattice_a", "lattice_b", "fibers")

    def __init__(self, lattice_a, lattice_b, fibers):
        self.lattice_a = lattice_a
        self.lattice_b = lattice_b
        self.fibers = tuple(fibers)

    def contains(self, a, b):
        return bool((self.fibers[a] >> b) & 1)

    def pairs(self):
        """All member pairs, sorted; mostly for reports and tests."""
        out = []
        for a in range(self.lattice_a.n):
            m = self.fibers[a]
            while m:
                b = (m & -m).bit_length() - 1
                m &= m - 1
                out.append((a, b))
        return out

    def is_bi_ideal(self):
        A, B = self.lattice_a, self.lattice_b
        if self.fibers != _close_fibers(A, B, list(self.fibers)):
            return False
        for a in range(A.n):
            if not (self.fibers[a] >> B.bottom_index) & 1:
                return False
        return True

    def __eq__(self, other):
        return (
            isinstance(other, BiIdeal)
            and self.lattice_a is other.lattice_a
            and self.lattice_b is other.lattice_b
            and self.fibers == other.fibers
        )

    def __hash__(self):
        return hash(self.fibers)

    def __repr__(self):
        return f"BiIdeal({self.pairs()!r})"


class FreeBiIdeal:
    """A bi-ideal (or a plain union of pure tensors) of A × F(m)⊥.

    fibers[a] is a tuple of canonical terms: the maximal generators of the
    fiber over a.  The empty tuple means the fiber is just the bottom.  The
    fiber over the zero of A is all of B and is stored as ().
    """

    __slots__ = ("lattice_a", "lattice_b", "fibers")

    def __init__(self, lattice_a, lattice_b, fibers):
        self.lattice_a = lattice_a
        self.lattice_b = lattice_b
        self.fibers = tuple(tuple(f) for f in fibers)

    def contains(self, a, b):
        if a == self.lattice_a.bottom_index or b is freelat.BOTTOM:
            return True
        return any(freelat.whitman_leq(b, g) for g in self.fibers[a])

    def generators_at(self, a):
        return self.fibers[a]

    def __eq__(self, other):
        return (
            isinstance(other, FreeBiIdeal)
            and self.lattice_a is other.lattice_a
            and self.fibers == other.fibers
        )

    def __hash__(self):
        return hash(tuple(tuple(t.uid for t in f) for f in self.fibers))

    def __repr__(self):
        parts = []
        for a in range(self.lattice_a.n):
            for g in self.fibers[a]:
                parts.append((self.lattice_a.names[a], freelat.term_to_str(g)))
        return f"FreeBiIdeal({parts!r})"


def _is_free(carrier):
    return isinstance(carrier, freelat.FreeLatticeWithBottom)


def _bottom_fibers(A, B):
    full = (1 << B.n) - 1
    bot_bit = 1 << B.bottom_index
    return [full if a == A.bottom_index else bot_bit for a in range(A.n)]


def pure_tensor(A: FiniteLattice, B: EffectiveLattice, a, b):
    """The principal bi-ideal of (a, b): the frame plus the down-set of (a, b)."""
    A._check(a)
    if _is_free(B):
        fibers = [() for _ in range(A.n)]
        if b is not freelat.BOTTOM and a != A.bottom_index:
            g = freelat.canonical_form(b)
            for x in range(A.n):
                if x != A.bottom_index and A.leq(x, a):
                    fibers[x] = (g,)
        return FreeBiIdeal(A, B, fibers)
    B._check(b)
    fibers = _bottom_fibers(A, B)
    down_b = B.down[b]
    for x in range(A.n):
        if A.leq(x, a):
            fibers[x] |= down_b
    return BiIdeal(A, B, fibers)


def _close_fibers(A: FiniteLattice, B: FiniteLattice, fibers):
    """Least list of principal-down-set fibers containing `fibers` that is
    hereditary in both coordinates and closed under lateral joins."""
    fibers = list(fibers)
    bot_bit = 1 << B.bottom_index
    full = (1 << B.n) - 1
    fibers[A.bottom_index] = full
    for a in range(A.n):
        fibers[a] |= bot_bit
    nonbottom = A.nonbottom()
    order_pairs = [(x, y) for x in nonbottom for y in nonbottom
                   if x != y and A.leq(x, y)]
    join_pairs = [(x, y, A.join_table[x][y]) for x in nonbottom for y in nonbottom
                  if x < y]
    changed = True
    while changed:
        changed = False
        for a in nonbottom:
            f = fibers[a]
            top = B.join_mask(f)
            closed = B.down[top]
            if closed != f:
                fibers[a] = closed
                changed = True
        for lo, hi in order_pairs:
            add = fibers[hi] & ~fibers[lo]
            if add:
                fibers[lo] |= add
                changed = True
        for x, y, j in join_pairs:
            common = fibers[x] & fibers[y]
            add = common & ~fibers[j]
            if add:
                fibers[j] |= add
                changed = True
    return tuple(fibers)


def _close_free_fibers(A: FiniteLattice, B, gens):
    """Free-side closure; fibers become single join generators.

    Term growth is unbounded when the closure genuinely is not finitely
    generated; that surfaces as Divergence.
    """
    nonbottom = A.nonbottom()
    g = [None] * A.n
    for a in nonbottom:
        g[a] = B.join_many(gens[a])
    order_pairs = [(x, y) for x in nonbottom for y in nonbottom
                   if x != y and A.leq(x, y)]
    join_pairs = [(x, y, A.join_table[x][y]) for x in nonbottom for y in nonbottom
                  if x < y and A.join_table[x][y] != x and A.join_table[x][y] != y]
    rounds = 0
    try:
        changed = True
        while changed:
            rounds += 1
            if rounds > _CLOSURE_ROUND_LIMIT:
                raise Divergence("free-side bi-ideal closure did not stabilize")
            changed = False
            for lo, hi in order_pairs:
                u = B.join(g[lo], g[hi])
                if not B.eq(u, g[lo]):
                    g[lo] = u
                    changed = True
            for x, y, j in join_pairs:
                m = B.meet(g[x], g[y])
                if m is freelat.BOTTOM:
                    continue
                u = B.join(g[j], m)
                if not B.eq(u, g[j]):
                    g[j] = u
                    changed = True
    except TermSizeExceeded as exc:
        raise Divergence(f"free-side bi-ideal closure diverged: {exc}") from exc
    fibers = [() for _ in range(A.n)]
    for a in nonbottom:
        if g[a] is not freelat.BOTTOM:
            fibers[a] = (g[a],)
    return FreeBiIdeal(A, B, fibers)


def bi_ideal_closure(A: FiniteLattice, B: EffectiveLattice, seed):
    """Least bi-ideal containing the seed pairs; idempotent."""
    if _is_free(B):
        gens = [[] for _ in range(A.n)]
        for a, b in seed:
            A._check(a)
            if b is not freelat.BOTTOM and a != A.bottom_index:
                gens[a].append(freelat.canonical_form(b))
        return _close_free_fibers(A, B, gens)
    fibers = [0] * A.n
    for a, b in seed:
        A._check(a)
        B._check(b)
        fibers[a] |= 1 << b
    return BiIdeal(A, B, _close_fibers(A, B, fibers))


def _check_carriers(left, right):
    if left.lattice_a is not right.lattice_a or left.lattice_b is not right.lattice_b:
        raise CarrierMismatch("bi-ideals live over different carriers")


def bi_join(left, right):
    """Join in the lattice of bi-ideals: closure of the union."""
    _check_carriers(left, right)
    A, B = left.lattice_a, left.lattice_b
    if isinstance(left, FreeBiIdeal):
        gens = [list(left.fibers[a]) + list(right.fibers[a]) for a in range(A.n)]
        return _close_free_fibers(A, B, gens)
    fibers = [left.fibers[a] | right.fibers[a] for a in range(A.n)]
    return BiIdeal(A, B, _close_fibers(A, B, fibers))


def bi_meet(left, right):
    """Meet in the lattice of bi-ideals: plain intersection."""
    _check_carriers(left, right)
    A, B = left.lattice_a, left.lattice_b
    if isinstance(left, FreeBiIdeal):
        fibers = []
        for a in range(A.n):
            gens = []
            for g1 in left.fibers[a]:
                for g2 in right.fibers[a]:
                    gens.append(freelat.canonical_meet(g1, g2))
            fibers.append(_term_antichain(gens))
        return FreeBiIdeal(A, B, fibers)
    fibers = [left.fibers[a] & right.fibers[a] for a in range(A.n)]
    return BiIdeal(A, B, fibers)


def _term_antichain(gens):
    """Maximal elements of a list of canonical terms, sorted."""
    uniq = []
    seen = set()
    for g in gens:
        if g.uid not in seen:
            seen.add(g.uid)
            uniq.append(g)
    # distinct canonical terms are never mutually comparable
    out = [g for g in uniq
           if not any(h is not g and freelat.whitman_leq(g, h) for h in uniq)]
    return tuple(sorted(out, key=freelat._sort_key))


@dataclass(frozen=True)
class UnionVerdict:
    """Outcome of the union-of-pure-tensors membership test."""

    is_bi_ideal: bool
    witness: tuple | None  # (i, j, "a-meet" | "b-meet") when not a bi-ideal

    def __bool__(self):
        return self.is_bi_ideal


def _meet_leq(B, x, y, z) -> bool:
    # x∧y ≤ z without materializing the meet (terms stay small that way)
    if _is_free(B):
        if x is freelat.BOTTOM or y is freelat.BOTTOM:
            return True
        if z is freelat.BOTTOM:
            return False
        return freelat._above_meet_of((x, y), z)
    return B.leq(B.meet(x, y), z)


def is_union_bi_ideal(A: EffectiveLattice, B: EffectiveLattice, pairs) -> UnionVerdict:
    """Decide whether ⋃ a_i⊗b_i is itself a bi-ideal.

    The union is hereditary and contains the frame automatically; what can
    fail is lateral-join closure, and that reduces to the arithmetic test: for
    every i ≠ j, a_i∧a_j = 0 or some k dominates (a_i∧a_j, b_i∨b_j), and
    symmetrically with the roles of the coordinates swapped.

    Implementation note: b_i∨b_j ≤ b_k splits into two comparisons, so the
    whole first condition reduces to bitmask intersections over the
    precomputed domination masks; only the residual second-condition cases
    need a meet comparison, and never a constructed meet.
    """
    pairs = list(pairs)
    n = len(pairs)
    a_vals = [a for a, _ in pairs]
    b_vals = [b for _, b in pairs]
    # above_b[i] = bitmask of k with b_i <= b_k
    above_b = []
    for i in range(n):
        mask = 0
        b_i = b_vals[i]
        for k in range(n):
            if B.leq(b_i, b_vals[k]):
                mask |= 1 << k
        above_b.append(mask)
    above_a_cache = {}

    def above_a(v):
        got = above_a_cache.get(v)
        if got is None:
            got = 0
            for k in range(n):
                if A.leq(v, a_vals[k]):
                    got |= 1 << k
            above_a_cache[v] = got
        return got

    for i in range(n):
        a_i, b_i = pairs[i]
        for j in range(i + 1, n):
            a_j, b_j = pairs[j]
            ma = A.meet(a_i, a_j)
            if not A.is_bottom(ma):
                if above_b[i] & above_b[j] & above_a(ma) == 0:
                    return UnionVerdict(False, (i, j, "a-meet"))
            if _is_free(B):
                # the free lattice has no zero divisors
                mb_zero = b_i is freelat.BOTTOM or b_j is freelat.BOTTOM
            else:
                mb_zero = B.is_bottom(B.meet(b_i, b_j))
            if not mb_zero:
                cand = above_a(A.join(a_i, a_j))
                if cand & (above_b[i] | above_b[j]):
                    continue  # some b_k already above one operand, hence the meet
                found = False
                rest = cand
                while rest:
                    k = (rest & -rest).bit_length() - 1
                    rest &= rest - 1
                    if _meet_leq(B, b_i, b_j, b_vals[k]):
                        found = True
                        break
                if not found:
                    return UnionVerdict(False, (i, j, "b-meet"))
    return UnionVerdict(True, None)


def union_of_pure_tensors(A: FiniteLattice, B, pairs):
    """The plain union (not the join) of the given pure tensors."""
    if _is_free(B):
        fibers = [[] for _ in range(A.n)]
        for a, b in pairs:
            if b is freelat.BOTTOM or a == A.bottom_index:
                continue
            g = freelat.canonical_form(b)
            for x in A.nonbottom():
                if A.leq(x, a):
                    fibers[x].append(g)
        return FreeBiIdeal(A, B, [_term_antichain(f) for f in fibers])
    fibers = _bottom_fibers(A, B)
    for a, b in pairs:
        down_b = B.down[b]
        for x in range(A.n):
            if A.leq(x, a):
                fibers[x] |= down_b
    return BiIdeal(A, B, fibers)


def tensor_enumerate(A: FiniteLattice, B: FiniteLattice, cap: int = 100_000):
    """All bi-ideals of A×B, as the join-closure of the pure tensors.

    For finite carriers every bi-ideal is a join of pure tensors, so the
    breadth-first closure enumerates the whole tensor product.
    """
    generators = []
    seen = set()
    for a in range(A.n):
        for b in range(B.n):
            t = pure_tensor(A, B, a, b)
            if t.fibers not in seen:
                seen.add(t.fibers)
                generators.append(t)
    out = dict((g.fibers, g) for g in generators)
    worklist = list(generators)
    while worklist:
        h = worklist.pop()
        for g in generators:
            u = bi_join(h, g)
            if u.fibers not in out:
                out[u.fibers] = u
                worklist.append(u)
                if len(out) > cap:
                    raise CapExceeded(f"tensor enumeration exceeded {cap} bi-ideals")
    return [out[k] for k in sorted(out)]


# -- the correspondence with antitone ideal maps ------------------------------


@dataclass(frozen=True)
class AntitoneIdealMap:
    """A map A⁻ → Id B written by principal-ideal generators.

    values[a] is the generator of the image ideal at a (None at the zero of
    A).  Being a ∨→∩ semilattice homomorphism forces antitonicity.
    """

    lattice_a: FiniteLattice
    lattice_b: FiniteLattice
    values: tuple

    def generator_at(self, a):
        return self.values[a]


def to_map(h: BiIdeal) -> AntitoneIdealMap:
    """Read off the fiber generators of a bi-ideal (the inverse of from_map)."""
    A, B = h.lattice_a, h.lattice_b
    values = [None] * A.n
    for a in A.nonbottom():
        values[a] = B.join_mask(h.fibers[a])
    return AntitoneIdealMap(A, B, tuple(values))


def from_map(phi: AntitoneIdealMap) -> BiIdeal:
    """Build the bi-ideal {(a, y) : y ≤ phi(a)} ∪ frame; checks the hom law."""
    A, B = phi.lattice_a, phi.lattice_b
    nonbottom = A.nonbottom()
    for x in nonbottom:
        for y in nonbottom:
            j = A.join_table[x][y]
            if phi.values[j] != B.meet_table[phi.values[x]][phi.values[y]]:
                raise NotAHomomorphism(
                    f"phi({A.names[x]} v {A.names[y]}) != phi({A.names[x]}) ^ phi({A.names[y]})"
                )
    fibers = _bottom_fibers(A, B)
    for a in nonbottom:
        fibers[a] |= B.down[phi.values[a]]
    return BiIdeal(A, B, fibers)


def enumerate_antitone_maps(A: FiniteLattice, B: FiniteLattice):
    """All ∨→∩ homomorphisms A⁻ → Id B, independently of the bi-ideal walk.

    A homomorphism is determined by its values on the join-irreducibles, so
    enumerate those assignments, extend by meets, and keep the extensions that
    satisfy the homomorphism law.
    """
    irr = [p for p, _ in A.join_irreducibles()]
    nonbottom = A.nonbottom()
    below = {
        a: [p for p in irr if A.leq(p, a)] for a in nonbottom
    }
    results = {}
    for assign in itertools.product(range(B.n), repeat=len(irr)):
        at = dict(zip(irr, assign))
        values = [None] * A.n
        ok = True
        for a in nonbottom:
            mask = 0
            for p in below[a]:
                mask |= 1 << at[p]
            values[a] = B.meet_mask(mask)
        for x in nonbottom:
            for y in nonbottom:
                j = A.join_table[x][y]
                if values[j] != B.meet_table[values[x]][values[y]]:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            results[tuple(values)] = AntitoneIdealMap(A, B, tuple(values))
    return [results[k] for k in sorted(results, key=lambda v: tuple(-1 if x is None else x for x in v))]


# -- cappedness witness against the free lattice ------------------------------


@dataclass(frozen=True)
class CappedVerdict:
    capped: bool
    n: int | None
    n_max: int
    union_sizes: tuple
    level_witnesses: tuple  # per failed level: ((a_i, b_i), (a_j, b_j), clause)

    def describe(self):
        if self.capped:
            return f"CAPPED-AT n={self.n}"
        return f"NOT-CAPPED-UP-TO n_max={self.n_max}"


def capped_join_witness(A: FiniteLattice, assignment, n_max: int,
                        sn_cap: int = 20_000) -> CappedVerdict:
    """Search for a level n at which the standard union becomes a bi-ideal.

    `assignment` is a list of (a_i, t_i) with a_i in A and t_i a term (or the
    free bottom).  For each n up to n_max, evaluate every element p of the
    n-th join-subsemilattice level of F(len(assignment)) at the a_i, its dual
    at the t_i, and test whether the union of those pure tensors is a
    bi-ideal.  This semi-decides cappedness of the join from below: a hit
    means the join of the a_i⊗t_i is a finite union of pure tensors.
    """
    pairs = list(assignment)
    m = len(pairs)
    a_vals = [a for a, _ in pairs]
    t_vals = [t for _, t in pairs]
    arity = 1
    for t in t_vals:
        if t is not freelat.BOTTOM:
            arity = max(arity, _max_var(t) + 1)
    B = freelat.FreeLatticeWithBottom(arity)
    sizes = []
    witnesses = []
    for n in range(n_max + 1):
        level = freelat.generate_sn(m, n, element_cap=sn_cap)
        union_pairs = {}
        for p in level.elements:
            a = freelat.evaluate(p, A, a_vals)
            b = freelat.evaluate(freelat.dual(p), B, t_vals)
            key = (a, b.uid if isinstance(b, freelat.Term) else -1)
            union_pairs[key] = (a, b)
        dedup = list(union_pairs.values())
        sizes.append(len(dedup))
        verdict = is_union_bi_ideal(A, B, dedup)
        if verdict:
            return CappedVerdict(True, n, n_max, tuple(sizes), tuple(witnesses))
        i, j, clause = verdict.witness
        witnesses.append((dedup[i], dedup[j], clause))
    return CappedVerdict(False, None, n_max, tuple(sizes), tuple(witnesses))


def _max_var(t):
    if t.kind == freelat.VAR:
        return t.index
    return max(_max_var(c) for c in t.args)


# -- distributivity of ⊗ over × ----------------------------------------------


def distributivity_check(A: FiniteLattice, B: FiniteLattice, C: FiniteLattice,
                         cap: int = 100_000) -> bool:
    """Oracle: (A×B)⊗C splits as (A⊗C)×(B⊗C) through coordinate sections.

    Forward, a bi-ideal H over (A×B)×C maps to its sections at the zeros of B
    and A; backward, a pair (U, V) glues to {((a,b),c) : (a,c)∈U, (b,c)∈V}.
    Checks that these are mutually inverse bijections between the enumerated
    products and that pure tensors map per ⟨a,b⟩⊗c ↦ ⟨a⊗c, b⊗c⟩.
    """
    P = direct_product(A, B)
    nB = B.n
    t_p = tensor_enumerate(P, C, cap=cap)
    t_a = {h.fibers: h for h in tensor_enumerate(A, C, cap=cap)}
    t_b = {h.fibers: h for h in tensor_enumerate(B, C, cap=cap)}
    if len(t_p) != len(t_a) * len(t_b):
        return False

    def forward(h):
        ua = tuple(h.fibers[a * nB + B.bottom_index] for a in range(A.n))
        vb = tuple(h.fibers[A.bottom_index * nB + b] for b in range(B.n))
        return ua, vb

    seen = set()
    for h in t_p:
        ua, vb = forward(h)
        if ua not in t_a or vb not in t_b:
            return False
        if (ua, vb) in seen:
            return False
        seen.add((ua, vb))
        glued = tuple(ua[a] & vb[b] for a in range(A.n) for b in range(B.n))
        if glued != h.fibers:
            return False
    if len(seen) != len(t_a) * len(t_b):
        return False
    for a in range(A.n):
        for b in range(B.n):
            for c in range(C.n):
                h = pure_tensor(P, C, a * nB + b, c)
                ua, vb = forward(h)
                if ua != pure_tensor(A, C, a, c).fibers:
                    return False
                if vb != pure_tensor(B, C, b, c).fibers:
                    return False
    return True
