"""The free lattice F(m): terms, Whitman's decision procedure, canonical forms.

Terms are hash-consed: every distinct tree is interned once, so syntactic
equality is `is` and all the heavy relations (order, canonical form, dual)
memoize on term identity.  Canonical forms are the term identity used for
deduplication everywhere: two terms denote the same free-lattice element
exactly when their canonical forms are the same object.

The canonical form is the classical one: children recursively canonical and
flattened, joinands irredundant (no joinand below the join of its siblings),
and no joinand that is a meet keeps a meetand lying below the whole join --
such a joinand collapses to that meetand.  Meets are handled dually.  The
children of a canonical node are sorted length-lexicographically on their
serialization, which makes canonicalization deterministic.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

from .core import EffectiveLattice
from .errors import (
    CapExceeded,
    IndexOutOfRange,
    TermSizeExceeded,
    TermSyntaxError,
    VariableOutOfRange,
)

VAR = "x"
JOIN = "+"
MEET = "*"

DEFAULT_TERM_NODE_CAP = 10_000
_node_cap_override = None


def term_node_cap() -> int:
    """Hard ceiling on the node count of any constructed term.

    Adjustment sequences over non-lower-bounded lattices grow without bound by
    design; this cap turns runaway growth into TermSizeExceeded.  Configurable
    via set_term_node_cap or the LATTICETENSOR_TERM_NODE_CAP env variable.
    """
    if _node_cap_override is not None:
        return _node_cap_override
    value = os.environ.get("LATTICETENSOR_TERM_NODE_CAP")
    return int(value) if value else DEFAULT_TERM_NODE_CAP


def set_term_node_cap(cap):
    global _node_cap_override
    _node_cap_override = cap


class Term:
    """An interned free-lattice term: variable, join, or meet."""

    __slots__ = ("kind", "index", "args", "size", "uid", "_text", "_canon", "_dual")

    def __init__(self, kind, index, args, size, uid):
        self.kind = kind
        self.index = index
        self.args = args
        self.size = size
        self.uid = uid
        self._text = None
        self._canon = None
        self._dual = None

    def __repr__(self):
        return term_to_str(self)

    # Identity semantics: interning makes the default __eq__/__hash__ correct.


_POOL: dict = {}
_LEQ_MEMO: dict = {}
_uid_counter = 0


def _intern(kind, index, args):
    global _uid_counter
    key = (kind, index) if kind == VAR else (kind, tuple(t.uid for t in args))
    hit = _POOL.get(key)
    if hit is not None:
        return hit
    size = 1 if kind == VAR else 1 + sum(t.size for t in args)
    if size > term_node_cap():
        raise TermSizeExceeded(
            f"term with {size} nodes exceeds cap {term_node_cap()}"
        )
    _uid_counter += 1
    term = Term(kind, index, args, size, _uid_counter)
    _POOL[key] = term
    return term


def var(i: int) -> Term:
    if i < 0:
        raise VariableOutOfRange(f"variable index {i} is negative")
    return _intern(VAR, i, None)


def _nary(kind, parts):
    flat = []
    for p in parts:
        if p.kind == kind:
            flat.extend(p.args)
        else:
            flat.append(p)
    if len(flat) == 1:
        return flat[0]
    if not flat:
        raise ValueError("join/meet needs at least one child")
    return _intern(kind, None, tuple(flat))


def join_node(parts) -> Term:
    """Raw n-ary join; same-kind children are spliced, nothing else happens."""
    return _nary(JOIN, list(parts))


def meet_node(parts) -> Term:
    return _nary(MEET, list(parts))


# -- serialization -----------------------------------------------------------


def term_to_str(t: Term) -> str:
    if t._text is None:
        if t.kind == VAR:
            t._text = f"x{t.index}"
        else:
            sep = " + " if t.kind == JOIN else " * "
            t._text = "(" + sep.join(term_to_str(c) for c in t.args) + ")"
    return t._text


def _sort_key(t: Term):
    s = term_to_str(t)
    return (len(s), s)


def parse_term(text: str, m: int) -> Term:
    """Parse `term := var | '(' term (op term)+ ')'`, one op per level.

    '+' is join and '*' is meet; variables are x0..x{m-1}; whitespace is
    ignored.  The AST is returned as written (not canonicalized).
    """
    pos = 0
    n = len(text)

    def skip_ws():
        nonlocal pos
        while pos < n and text[pos].isspace():
            pos += 1

    def parse():
        nonlocal pos
        skip_ws()
        if pos >= n:
            raise TermSyntaxError("unexpected end of input", pos)
        ch = text[pos]
        if ch == "x":
            start = pos
            pos += 1
            digits = ""
            while pos < n and text[pos].isdigit():
                digits += text[pos]
                pos += 1
            if not digits:
                raise TermSyntaxError("expected digits after 'x'", start + 1)
            idx = int(digits)
            if idx >= m:
                raise VariableOutOfRange(f"x{idx} out of range for m={m}")
            return var(idx)
        if ch == "(":
            pos += 1
            parts = [parse()]
            skip_ws()
            if pos >= n or text[pos] not in "+*":
                raise TermSyntaxError("expected '+' or '*'", pos)
            op = text[pos]
            while True:
                skip_ws()
                if pos < n and text[pos] == ")":
                    pos += 1
                    break
                if pos >= n:
                    raise TermSyntaxError("unclosed '('", pos)
                if text[pos] != op:
                    raise TermSyntaxError(f"expected {op!r} or ')'", pos)
                pos += 1
                parts.append(parse())
            if len(parts) < 2:
                raise TermSyntaxError("need at least two operands", pos)
            return join_node(parts) if op == "+" else meet_node(parts)
        raise TermSyntaxError(f"unexpected character {ch!r}", pos)

    result = parse()
    skip_ws()
    if pos != n:
        raise TermSyntaxError("trailing input", pos)
    return result


# -- Whitman's decision procedure --------------------------------------------


def whitman_leq(s: Term, t: Term) -> bool:
    """Decide s <= t in the free lattice.

    The recursion: a join is below t iff all its joinands are; anything is
    below a meet iff it is below all meetands; a variable is below a join iff
    below some joinand; a meet is below a variable iff some meetand is; and a
    meet is below a join iff some meetand is below the join or the meet is
    below some joinand (Whitman's condition).
    """
    if s is t:
        return True
    key = (s.uid, t.uid)
    hit = _LEQ_MEMO.get(key)
    if hit is not None:
        return hit
    if s.kind == JOIN:
        out = all(whitman_leq(c, t) for c in s.args)
    elif t.kind == MEET:
        out = all(whitman_leq(s, c) for c in t.args)
    elif s.kind == VAR:
        if t.kind == VAR:
            out = s.index == t.index
        else:  # t is a join
            out = any(whitman_leq(s, c) for c in t.args)
    else:  # s is a meet, t is a variable or a join
        out = any(whitman_leq(c, t) for c in s.args)
        if not out and t.kind == JOIN:
            out = any(whitman_leq(s, c) for c in t.args)
    _LEQ_MEMO[key] = out
    return out


def whitman_eq(s: Term, t: Term) -> bool:
    return canonical_form(s) is canonical_form(t)


def _below_join_of(s: Term, parts) -> bool:
    # s <= (join of parts) without materializing the join node
    if s.kind == JOIN:
        return all(_below_join_of(c, parts) for c in s.args)
    if any(whitman_leq(s, p) for p in parts):
        return True
    if s.kind == MEET:
        return any(_below_join_of(c, parts) for c in s.args)
    return False


def _above_meet_of(parts, t: Term) -> bool:
    # (meet of parts) <= t without materializing the meet node
    if t.kind == MEET:
        return all(_above_meet_of(parts, c) for c in t.args)
    if any(whitman_leq(p, t) for p in parts):
        return True
    if t.kind == JOIN:
        return any(_above_meet_of(parts, c) for c in t.args)
    return False


# -- canonical form ----------------------------------------------------------


def canonical_form(t: Term) -> Term:
    """The unique minimal term Whitman-equal to t (see module docstring)."""
    if t._canon is not None:
        return t._canon
    if t.kind == VAR:
        t._canon = t
        return t
    items = []
    for c in t.args:
        cc = canonical_form(c)
        if cc.kind == t.kind:
            items.extend(cc.args)
        else:
            items.append(cc)
    result = _canonical_children(t.kind, items)
    t._canon = result
    result._canon = result
    return result


def _canonical_children(kind, items):
    is_join = kind == JOIN
    other = MEET if is_join else JOIN
    # identity dedup, preserving first occurrence
    seen = set()
    items = [c for c in items if not (c.uid in seen or seen.add(c.uid))]
    changed = True
    while changed:
        changed = False
        if len(items) > 1:
            for i, c in enumerate(items):
                rest = items[:i] + items[i + 1:]
                redundant = (
                    _below_join_of(c, rest) if is_join else _above_meet_of(rest, c)
                )
                if redundant:
                    items = rest
                    changed = True
                    break
            if changed:
                continue
        for i, c in enumerate(items):
            if c.kind != other:
                continue
            for sub in c.args:
                collapses = (
                    _below_join_of(sub, items) if is_join else _above_meet_of(items, sub)
                )
                if collapses:
                    # the joinand c is equivalent to its meetand sub here
                    pieces = sub.args if sub.kind == kind else (sub,)
                    items = items[:i] + list(pieces) + items[i + 1:]
                    seen = set()
                    items = [x for x in items if not (x.uid in seen or seen.add(x.uid))]
                    changed = True
                    break
            if changed:
                break
    if len(items) == 1:
        return items[0]
    items.sort(key=_sort_key)
    return _intern(kind, None, tuple(items))


def canonical_join(s: Term, t: Term) -> Term:
    return canonical_form(join_node([s, t]))


def canonical_meet(s: Term, t: Term) -> Term:
    return canonical_form(meet_node([s, t]))


def dual(t: Term) -> Term:
    """Swap joins and meets throughout; an involution on canonical forms."""
    if t._dual is None:
        if t.kind == VAR:
            t._dual = t
        else:
            kind = MEET if t.kind == JOIN else JOIN
            t._dual = _intern(kind, None, tuple(dual(c) for c in t.args))
    return t._dual


def evaluate(t: Term, lattice, assignment):
    """Evaluate t in a lattice at the given tuple of elements."""
    if t.kind == VAR:
        if t.index >= len(assignment):
            raise IndexOutOfRange(
                f"x{t.index} has no value in an assignment of length {len(assignment)}"
            )
        return assignment[t.index]
    values = [evaluate(c, lattice, assignment) for c in t.args]
    op = lattice.join if t.kind == JOIN else lattice.meet
    out = values[0]
    for v in values[1:]:
        out = op(out, v)
    return out


def substitute(t: Term, replacements) -> Term:
    """Replace x_i by replacements[i], canonically."""
    if t.kind == VAR:
        if t.index >= len(replacements):
            raise IndexOutOfRange(f"x{t.index} has no replacement")
        return canonical_form(replacements[t.index])
    parts = [substitute(c, replacements) for c in t.args]
    out = parts[0]
    combine = canonical_join if t.kind == JOIN else canonical_meet
    for p in parts[1:]:
        out = combine(out, p)
    return out


# -- the S_n hierarchy -------------------------------------------------------


@dataclass(frozen=True)
class SnLevel:
    """A finite join-subsemilattice of F(m): level n of the meet/join hierarchy."""

    m: int
    n: int
    elements: tuple


def _closure(generators, combine, cap, level):
    out = {}
    for g in generators:
        out.setdefault(g.uid, g)
    worklist = list(out.values())
    gens = list(out.values())
    while worklist:
        t = worklist.pop()
        for g in gens:
            u = combine(t, g)
            if u.uid not in out:
                out[u.uid] = u
                worklist.append(u)
                if len(out) > cap:
                    raise CapExceeded(
                        f"S_n closure exceeded {cap} elements", level_reached=level
                    )
    return sorted(out.values(), key=_sort_key)


def generate_sn(m: int, n: int, element_cap: int = 20_000) -> SnLevel:
    """Level n: meets of variables join-closed, then meet/join closure n times.

    Raises CapExceeded (with the level reached) once a closure pass grows past
    `element_cap` -- the levels exhaust the whole free lattice, so growth is
    expected.
    """
    if m < 1:
        raise VariableOutOfRange("need at least one generator")
    level = [var(i) for i in range(m)]
    for k in range(n + 1):
        level = _closure(level, canonical_meet, element_cap, k)
        level = _closure(level, canonical_join, element_cap, k)
    return SnLevel(m, n, tuple(level))


# -- the free lattice with an adjoined bottom --------------------------------


class _BottomType:
    __slots__ = ()

    def __repr__(self):
        return "0"


BOTTOM = _BottomType()


class FreeLatticeWithBottom(EffectiveLattice):
    """F(m) with a formal least element adjoined.

    Element handles are canonical Terms or the BOTTOM sentinel; the bottom is
    absorbing for meet and neutral for join.  Free lattices have no zero
    divisors, so meets of terms are never the bottom.
    """

    def __init__(self, m: int):
        if m < 1:
            raise VariableOutOfRange("need at least one generator")
        self.m = m

    @property
    def bottom(self):
        return BOTTOM

    def generators(self):
        return tuple(var(i) for i in range(self.m))

    def leq(self, x, y):
        if x is BOTTOM:
            return True
        if y is BOTTOM:
            return False
        return whitman_leq(x, y)

    def join(self, x, y):
        if x is BOTTOM:
            return y if y is BOTTOM else canonical_form(y)
        if y is BOTTOM:
            return canonical_form(x)
        return canonical_join(x, y)

    def meet(self, x, y):
        if x is BOTTOM or y is BOTTOM:
            return BOTTOM
        return canonical_meet(x, y)

    def is_bottom(self, x):
        return x is BOTTOM

    def eq(self, x, y):
        if x is BOTTOM or y is BOTTOM:
            return x is y
        return canonical_form(x) is canonical_form(y)

    def format_element(self, x):
        return "0" if x is BOTTOM else term_to_str(x)


def free_with_bottom(m: int) -> FreeLatticeWithBottom:
    return FreeLatticeWithBottom(m)
