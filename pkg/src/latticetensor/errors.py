"""Exception types shared across the library.

Every error raised on purpose derives from LatticeError so callers (and the
CLI) can tell domain failures from plain bugs.
"""


class LatticeError(Exception):
    pass


class NotALattice(LatticeError):
    """A poset pair has no unique least upper bound / greatest lower bound."""

    def __init__(self, pair, reason):
        self.pair = pair
        self.reason = reason
        super().__init__(f"not a lattice at pair {pair}: {reason}")


class CyclicCovers(LatticeError):
    pass


class NoBottom(LatticeError):
    pass


class IndexOutOfRange(LatticeError):
    pass


class SizeOverflow(LatticeError):
    pass


class TooSmall(LatticeError):
    pass


class CarrierMismatch(LatticeError):
    pass


class CapExceeded(LatticeError):
    def __init__(self, message, level_reached=None):
        self.level_reached = level_reached
        super().__init__(message)


class Divergence(LatticeError):
    pass


class NotAHomomorphism(LatticeError):
    pass


class TermSizeExceeded(LatticeError):
    pass


class NotGenerating(LatticeError):
    pass


class VariableOutOfRange(LatticeError):
    pass


class TermSyntaxError(LatticeError):
    """Bad term text; `position` is the offset of the offending character."""

    def __init__(self, message, position):
        self.position = position
        super().__init__(f"{message} (at position {position})")


class InternalInconsistency(LatticeError):
    """Two computations that a theorem forces to agree disagreed (a bug)."""
