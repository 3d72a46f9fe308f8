"""Exception types shared across the package.

Every error raised on a violated operation contract derives from
:class:`PolymatError`, so callers (notably the CLI) can map any contract
failure to a single diagnostic path.
"""

from __future__ import annotations


class PolymatError(Exception):
    """Base class for all contract violations raised by this package."""


# --- construction of set functions -----------------------------------------

class MissingSubset(PolymatError):
    """A non-empty subset has no rank entry."""


class DuplicateSubset(PolymatError):
    """A subset received more than one rank entry (or an explicit empty set)."""


class NegativeValue(PolymatError):
    """A rank or weight that must be non-negative is negative."""


class NotValidated(PolymatError):
    """Operation requires a set function whose polymatroid flag is set."""


class NotAPolymatroid(PolymatError):
    """Validation ran and the axioms do not hold."""


# --- structural preconditions ----------------------------------------------

class NotAFlat(PolymatError):
    """Argument must be a flat of the polymatroid."""


class FullGroundSet(PolymatError):
    """Contraction set must be a proper subset of the ground set."""


class EmptyRestriction(PolymatError):
    """Restriction target must be non-empty."""


class GroundMismatch(PolymatError):
    """Two objects live on incompatible ground sets."""


# --- ranked lattices ---------------------------------------------------------

class EmptyFamily(PolymatError):
    """A ranked lattice needs at least one member."""


class NegativeRank(PolymatError):
    """Lattice ranks must be non-negative."""


class NoUpperBound(PolymatError):
    """A member pair has no common upper bound in the family."""

    def __init__(self, pair, msg=None):
        super().__init__(msg or f"no common upper bound for pair {pair}")
        self.pair = pair


class NoLowerBound(PolymatError):
    """A member pair has no common lower bound in the family."""

    def __init__(self, pair, msg=None):
        super().__init__(msg or f"no common lower bound for pair {pair}")
        self.pair = pair


class AmbiguousBound(PolymatError):
    """A member pair has no unique extreme bound in the family."""

    def __init__(self, pair, msg=None):
        super().__init__(msg or f"no unique extreme bound for pair {pair}")
        self.pair = pair


# --- extensions ---------------------------------------------------------------

class NotAnExtension(PolymatError):
    """Supplied set function does not extend the required base."""


class PrincipalCut(PolymatError):
    """Witness constructions need a non-principal modular cut."""


class RankMismatch(PolymatError):
    """Expansion block has the wrong rank for its element."""


class NotAMatroid(PolymatError):
    """Operation requires a (validated) matroid."""


# --- amalgam search ------------------------------------------------------------

class GroundOverlapMismatch(PolymatError):
    """The two inputs disagree on their common ground part."""


class TooLarge(PolymatError):
    """Instance exceeds the supported search size."""


# --- text formats ----------------------------------------------------------------

class ParseError(PolymatError):
    """Malformed model file; carries the 1-based offending line number."""

    def __init__(self, line: int, msg: str):
        super().__init__(f"line {line}: {msg}")
        self.line = line


class UnknownElement(PolymatError):
    """A subset mentions an element missing from the ground line."""

    def __init__(self, label: str, line: int | None = None):
        loc = f"line {line}: " if line is not None else ""
        super().__init__(f"{loc}unknown element {label!r}")
        self.label = label
        self.line = line
