"""Lower limit tables for the canonical surjection of a free lattice onto L.

Given generators g_0..g_{m-1} of a finite lattice L (as a lattice with zero),
the table rows approximate, from above, the least free-lattice preimage of
each element: row zero meets the variables whose image dominates the element,
and each later row meets in, for every covering set S of the element, the
join of the previous row over S.  Rows decrease pointwise; the table
stabilizes exactly when the surjection is lower bounded.

The free lattice has no top, so the empty meet is represented by a formal
TOP sentinel (neutral for meet, absorbing for join).  It is the exact dual of
the adjoined free-lattice bottom, which is what the beta/xi duality check
exercises.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import freelat
from .adjust import _antichain_flags, adjustment_sequence, step_from_pairs
from .core import FiniteLattice, sublattice_generated
from .errors import NotGenerating, SizeOverflow


class _TopType:
    __slots__ = ()

    def __repr__(self):
        return "TOP"


TOP = _TopType()


def meet_with_top(values):
    """Meet of a list of Term-or-TOP values; TOP entries drop out."""
    terms = [v for v in values if v is not TOP]
    if not terms:
        return TOP
    out = terms[0]
    for t in terms[1:]:
        out = freelat.canonical_meet(out, t)
    return out


def join_with_top(values):
    """Join of a nonempty list of Term-or-TOP values; any TOP absorbs."""
    terms = []
    for v in values:
        if v is TOP:
            return TOP
        terms.append(v)
    out = terms[0]
    for t in terms[1:]:
        out = freelat.canonical_join(out, t)
    return out


def leq_with_top(u, v) -> bool:
    if v is TOP:
        return True
    if u is TOP:
        return False
    return freelat.whitman_leq(u, v)


def row_equal(row1, row2) -> bool:
    return all(
        (a is TOP and b is TOP) or (a is not TOP and b is not TOP and a is b)
        for a, b in zip(row1, row2)
    )


def _check_generating(lattice: FiniteLattice, gens):
    for g in gens:
        lattice._check(g)
    closed = sublattice_generated(lattice, set(gens) | {lattice.bottom_index})
    if len(closed) != lattice.n:
        missing = sorted(set(range(lattice.n)) - closed)
        names = ", ".join(lattice.names[x] for x in missing)
        raise NotGenerating(f"generators do not reach: {names}")


def beta_zero(lattice: FiniteLattice, gens):
    """Row zero: the meet of the variables whose image dominates each element."""
    _check_generating(lattice, gens)
    row = []
    for a in range(lattice.n):
        meetands = [freelat.var(i) for i, g in enumerate(gens) if lattice.leq(a, g)]
        row.append(meet_with_top(meetands))
    return tuple(row)


def beta_step(lattice: FiniteLattice, gens, prev, method: str = "antichain"):
    """One refinement: meet in the joins of the previous row over covering sets.

    The covering sets of a are the nonempty S ⊆ L⁻ with a ≤ ⋁S and no member
    of S above a.  Rows are monotone, so restricting S to antichains changes
    nothing ("antichain", the default); "literal" walks every subset and is
    kept for cross-checks.
    """
    if method not in ("literal", "antichain"):
        raise ValueError(f"unknown method {method!r}")
    n = lattice.n
    if n > 20:
        raise SizeOverflow("subset enumeration needs at most 20 elements")
    jt = lattice.subset_join_table()
    nb_mask = ((1 << n) - 1) & ~(1 << lattice.bottom_index)
    flags = _antichain_flags(lattice) if method == "antichain" else None
    join_cache = {}

    def join_of_keys(ks, values):
        got = join_cache.get(ks)
        if got is None:
            got = join_with_top(values)
            join_cache[ks] = got
        return got

    row = []
    for a in range(lattice.n):
        allowed = nb_mask & ~lattice.up[a]
        meetands = [prev[a]]
        seen = set()
        sub = allowed
        while sub:
            if (flags is None or flags[sub]) and lattice.leq(a, jt[sub]):
                keys = []
                values = []
                m = sub
                while m:
                    x = (m & -m).bit_length() - 1
                    m &= m - 1
                    v = prev[x]
                    keys.append(-1 if v is TOP else v.uid)
                    values.append(v)
                ks = frozenset(keys)
                if ks not in seen:
                    seen.add(ks)
                    meetands.append(join_of_keys(ks, values))
            sub = (sub - 1) & allowed
        row.append(meet_with_top(meetands))
    return tuple(row)


@dataclass
class LowerLimitTable:
    """Computed rows of the lower limit table, with the stabilization verdict.

    stabilized_at is the least n with row n equal to row n+1 (rows[-1] is then
    the fixpoint), or None when n_max rows were computed without repeating.
    """

    lattice: FiniteLattice
    generators: tuple
    rows: list
    stabilized_at: int | None
    n_max: int

    @property
    def stabilized(self):
        return self.stabilized_at is not None

    def describe(self):
        if self.stabilized:
            return f"STABILIZED n={self.stabilized_at}"
        return f"NOT-STABILIZED n_max={self.n_max}"


def default_n_max(lattice: FiniteLattice) -> int:
    # the stabilization bound |J(L)| plus slack, so acyclic instances always
    # finish within budget and cyclic ones always exhaust it
    return len(lattice.join_irreducibles()) + 2


def lower_limit_table(lattice: FiniteLattice, gens, n_max: int | None = None,
                      method: str = "antichain") -> LowerLimitTable:
    """Iterate beta_step until two consecutive rows agree, or n_max rows."""
    if n_max is None:
        n_max = default_n_max(lattice)
    rows = [beta_zero(lattice, gens)]
    for _ in range(n_max):
        nxt = beta_step(lattice, gens, rows[-1], method=method)
        if row_equal(rows[-1], nxt):
            return LowerLimitTable(lattice, tuple(gens), rows, len(rows) - 1, n_max)
        rows.append(nxt)
    return LowerLimitTable(lattice, tuple(gens), rows, None, n_max)


def beta_xi_duality_check(lattice: FiniteLattice, gens, n_max: int | None = None) -> bool:
    """Row-by-row duality between the table and the adjustment sequence.

    The step function seeded by (g_i, x_i) starts at the dual of row zero and
    stays the exact dual of every row (TOP pairing with the free bottom).
    Returns True when every computed level matches and both sides agree on
    stabilization.
    """
    if n_max is None:
        n_max = default_n_max(lattice)
    table = lower_limit_table(lattice, gens, n_max)
    codomain = freelat.FreeLatticeWithBottom(len(gens))
    seed = step_from_pairs(
        lattice, codomain, [(g, freelat.var(i)) for i, g in enumerate(gens)]
    )
    trace = adjustment_sequence(seed, n_max)
    if table.stabilized_at != trace.stabilized_at:
        return False
    if len(table.rows) != len(trace.steps):
        return False
    nb = lattice.nonbottom()
    for row, step in zip(table.rows, trace.steps):
        values = dict(zip(nb, step.values))
        for a in nb:
            beta_val = row[a]
            xi_val = values[a]
            if beta_val is TOP:
                if xi_val is not freelat.BOTTOM:
                    return False
            else:
                if xi_val is freelat.BOTTOM:
                    return False
                if freelat.canonical_form(freelat.dual(beta_val)) is not freelat.canonical_form(xi_val):
                    return False
    return True
