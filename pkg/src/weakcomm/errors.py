"""Exception hierarchy shared across the package."""

from __future__ import annotations


class WeakcommError(Exception):
    """Base class for all errors raised by this package."""


class DegreeMismatch(WeakcommError):
    """Operands act on different point sets."""


class CapExceeded(WeakcommError):
    """An element enumeration grew past its configured cap."""

    def __init__(self, cap: int, message: str | None = None):
        self.cap = cap
        super().__init__(message or f"element enumeration exceeded cap of {cap}")


class CosetCapExceeded(WeakcommError):
    """Coset enumeration ran out of room.

    Signals resource exhaustion at the configured cap, not that the group
    is infinite.  ``high_water`` is the largest number of live cosets seen
    before giving up; ``defined`` counts every coset ever defined.
    """

    def __init__(self, cap: int, high_water: int, defined: int):
        self.cap = cap
        self.high_water = high_water
        self.defined = defined
        super().__init__(
            f"coset enumeration exceeded cap of {cap} "
            f"(high water {high_water} live cosets, {defined} defined)"
        )


class NotNormal(WeakcommError):
    """A subgroup required to be normal is not."""


class NotAbelian(WeakcommError):
    """A subgroup required to be abelian is not."""


class NotPGroup(WeakcommError):
    """A group required to have prime-power order does not."""


class NotNilpotent(WeakcommError):
    """Lower central series stabilized above the trivial group."""


class NotSolvable(WeakcommError):
    """Derived series stabilized above the trivial group."""


class PresentationSyntaxError(WeakcommError):
    """Presentation text does not match the grammar.

    Carries 1-based ``line`` and ``column`` of the offending token.
    """

    def __init__(self, message: str, line: int, column: int):
        self.line = line
        self.column = column
        super().__init__(f"{message} (line {line}, column {column})")


class UnknownGenerator(PresentationSyntaxError):
    """A word references a generator that was never declared."""


class UnknownFamily(WeakcommError):
    """Catalogue lookup with an unrecognized family name."""


class BadParams(WeakcommError):
    """Catalogue family given invalid parameters."""


class IncompleteTable(WeakcommError):
    """A coset table operation requires a complete table."""


class PresentationMismatch(WeakcommError):
    """Supplied presentation does not present the given concrete group."""


class InvariantViolation(WeakcommError):
    """A structural identity that must hold by construction failed.

    This always indicates a bug in the build pipeline, never a property
    of the input group.
    """
