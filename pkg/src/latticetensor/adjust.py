"""Step functions on A⁻ and their adjustment sequences.

On a finite lattice every map A⁻ → B is a step function.  The one-step
adjustment replaces ξ(x) by the join, over all finite subsets S of A⁻ whose
join dominates x, of the meet of ξ over S.  Iterating yields an increasing
sequence of antitone maps; whether it becomes constant is exactly the
question whether the tensor product with the codomain is capped, which is why
runs into the free lattice are allowed to fail with TermSizeExceeded.
"""

from __future__ import annotations

from dataclasses import dataclass

from .core import EffectiveLattice, FiniteLattice
from .errors import SizeOverflow


@dataclass(frozen=True)
class StepFunction:
    """A map A⁻ → B; values are aligned with domain.nonbottom()."""

    domain: FiniteLattice
    codomain: EffectiveLattice
    values: tuple

    def value_at(self, x):
        return self.values[self.domain.nonbottom().index(x)]

    def items(self):
        return tuple(zip(self.domain.nonbottom(), self.values))

    def is_antitone(self):
        nb = self.domain.nonbottom()
        for i, x in enumerate(nb):
            for j, y in enumerate(nb):
                if self.domain.leq(x, y) and not self.codomain.leq(
                    self.values[j], self.values[i]
                ):
                    return False
        return True

    def is_join_to_meet_hom(self):
        """Whether ξ(x∨y) = ξ(x)∧ξ(y) on A⁻ (the adjustment fixpoints)."""
        nb = self.domain.nonbottom()
        idx = {x: i for i, x in enumerate(nb)}
        for i, x in enumerate(nb):
            for j, y in enumerate(nb):
                target = self.values[idx[self.domain.join(x, y)]]
                if not self.codomain.eq(
                    target, self.codomain.meet(self.values[i], self.values[j])
                ):
                    return False
        return True

    def equals(self, other) -> bool:
        if self.domain is not other.domain:
            return False
        return all(
            self.codomain.eq(a, b) for a, b in zip(self.values, other.values)
        )


def step_from_pairs(domain: FiniteLattice, codomain: EffectiveLattice, pairs) -> StepFunction:
    """ξ(x) = join of the b_i over those pairs (a_i, b_i) with x ≤ a_i.

    Functions of this shape are antitone, and every element pair list defines
    one; they are the seeds the cappedness machinery adjusts.
    """
    pairs = list(pairs)
    values = []
    for x in domain.nonbottom():
        values.append(codomain.join_many(b for a, b in pairs if domain.leq(x, a)))
    return StepFunction(domain, codomain, tuple(values))


def _antichain_flags(lattice: FiniteLattice):
    flags = lattice._antichain_flags
    if flags is None:
        n = lattice.n
        comp = [lattice.up[x] | lattice.down[x] for x in range(n)]
        flags = [True] * (1 << n)
        for mask in range(1, 1 << n):
            low = mask & -mask
            i = low.bit_length() - 1
            rest = mask ^ low
            flags[mask] = flags[rest] and not (comp[i] & rest)
        lattice._antichain_flags = flags
    return flags


def _cover_sets(lattice: FiniteLattice, restrict_to_antichains: bool):
    """For each element j: the distinct index sets S ⊆ A⁻ with join exactly j.

    Yields (mask, join) pairs; C(x) is then every S whose join dominates x.
    """
    n = lattice.n
    if n > 20:
        raise SizeOverflow("subset enumeration needs at most 20 elements")
    jt = lattice.subset_join_table()
    nb_mask = ((1 << n) - 1) & ~(1 << lattice.bottom_index)
    flags = _antichain_flags(lattice) if restrict_to_antichains else None
    sub = nb_mask
    out = []
    while sub:
        if flags is None or flags[sub]:
            out.append((sub, jt[sub]))
        sub = (sub - 1) & nb_mask
    return out


def one_step_adjustment(sf: StepFunction, method: str = "auto") -> StepFunction:
    """One adjustment pass: ξ'(x) = ⋁(⋀ξ[S] | S ⊆ A⁻ nonempty, x ≤ ⋁S).

    `method` picks the S-enumeration: "literal" walks every subset; for
    antitone ξ dominated members of S change nothing, so "antichain" walks
    antichains only.  "auto" uses the antichain walk exactly when ξ is
    antitone.  Both walks agree there (cross-checked in the test suite).
    """
    A, B = sf.domain, sf.codomain
    if method == "auto":
        method = "antichain" if sf.is_antitone() else "literal"
    if method not in ("literal", "antichain"):
        raise ValueError(f"unknown method {method!r}")
    nb = A.nonbottom()
    value_of = dict(zip(nb, sf.values))
    bottom_key = object()

    def key_of(v):
        if B.is_bottom(v):
            return bottom_key
        return getattr(v, "uid", v)

    # group the covering sets by their join, dedup to distinct value sets
    keysets_by_join = {}
    keymap = {}
    for mask, j in _cover_sets(A, method == "antichain"):
        keys = []
        m = mask
        while m:
            x = (m & -m).bit_length() - 1
            m &= m - 1
            v = value_of[x]
            k = key_of(v)
            keys.append(k)
            keymap[k] = v
        ks = frozenset(keys)
        keysets_by_join.setdefault(j, set()).add(ks)
    meet_cache = {}

    def meet_of(ks):
        got = meet_cache.get(ks)
        if got is None:
            if bottom_key in ks:
                got = B.bottom
            else:
                got = B.meet_many(keymap[k] for k in ks)
            meet_cache[ks] = got
        return got

    values = []
    for x in nb:
        seen = set()
        pieces = []
        for j, sets in keysets_by_join.items():
            if A.leq(x, j):
                for ks in sets:
                    if ks not in seen:
                        seen.add(ks)
                        pieces.append(meet_of(ks))
        values.append(B.join_many(pieces))
    return StepFunction(A, B, tuple(values))


def irreducible_step_value(sf: StepFunction, p: int):
    """ξ(p) ∨ ⋁(⋀ξ[I] | I a minimal-pair cover of p), for p join-irreducible.

    For antitone ξ this matches the full adjustment value at p; the test suite
    asserts the agreement against one_step_adjustment.
    """
    from .transfer import minimal_pairs

    A, B = sf.domain, sf.codomain
    value_of = dict(zip(A.nonbottom(), sf.values))
    pieces = [value_of[p]]
    for mp in minimal_pairs(A):
        if mp.p == p:
            pieces.append(B.meet_many(value_of[q] for q in sorted(mp.members)))
    return B.join_many(pieces)


@dataclass
class AdjustmentTrace:
    """The computed prefix ξ⁽⁰⁾, ξ⁽¹⁾, … of an adjustment sequence.

    stabilized_at is the least n with ξ⁽ⁿ⁾ = ξ⁽ⁿ⁺¹⁾ (then steps[-1] is the
    fixpoint), or None if the sequence was still moving at n_max.
    """

    steps: list
    stabilized_at: int | None
    n_max: int
    changed_log: list

    @property
    def stabilized(self):
        return self.stabilized_at is not None

    def describe(self):
        if self.stabilized:
            return f"STABILIZED n={self.stabilized_at}"
        return f"NOT-STABILIZED n_max={self.n_max}"


def adjustment_sequence(sf: StepFunction, n_max: int, method: str = "auto") -> AdjustmentTrace:
    """Iterate one_step_adjustment until pointwise-equal steps or n_max."""
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    steps = [sf]
    changed_log = []
    for _ in range(n_max):
        nxt = one_step_adjustment(steps[-1], method=method)
        changed = [
            x
            for x, old, new in zip(sf.domain.nonbottom(), steps[-1].values, nxt.values)
            if not sf.codomain.eq(old, new)
        ]
        if not changed:
            return AdjustmentTrace(steps, len(steps) - 1, n_max, changed_log)
        changed_log.append(tuple(changed))
        steps.append(nxt)
    return AdjustmentTrace(steps, None, n_max, changed_log)


def support_of(sf: StepFunction):
    """The least support: the join of all x with ξ(x) above bottom."""
    A, B = sf.domain, sf.codomain
    return A.join_many(
        x for x, v in zip(A.nonbottom(), sf.values) if not B.is_bottom(v)
    )
