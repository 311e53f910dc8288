"""Exception hierarchy shared by all modules."""


class RDSError(Exception):
    """Base class for errors raised by rdsmeta."""


class OutOfWindowError(RDSError, IndexError):
    """A symbol was requested outside the resolvable part of a sequence."""

    def __init__(self, index, message=None):
        self.index = index
        super().__init__(message or f"symbol index {index} is not resolvable")


class LiftError(RDSError):
    """No (or no unique) admissible preimage exists for a symbolic lift."""

    def __init__(self, index, message):
        self.index = index
        super().__init__(f"lift failed at index {index}: {message}")


class MarkovViolationError(RDSError, ValueError):
    """A branch does not map a partition cell onto a union of cells."""

    def __init__(self, cell, branch, message=None):
        self.cell = cell
        self.branch = branch
        super().__init__(message or f"branch {branch} does not map cell {cell} onto a union of cells")


class DegenerateSplittingError(RDSError, ArithmeticError):
    """Singular values are too close for the requested Oseledets direction."""


class HorizonTooLargeError(RDSError):
    """The exact branch/cylinder tree exceeds the configured size limit."""


class InvalidGError(RDSError, ValueError):
    """The zero-pushforward (or invariant density) premise fails."""


class DegenerateFunctionError(RDSError, ValueError):
    """An element of a function path vanishes identically."""

    def __init__(self, index):
        self.index = index
        super().__init__(f"path element {index} is identically zero")


class InsufficientSurvivalError(RDSError):
    """Too few Monte Carlo samples survive to fit an escape rate."""


class ConfigError(RDSError, ValueError):
    """A configuration file is missing, malformed or out of range."""
