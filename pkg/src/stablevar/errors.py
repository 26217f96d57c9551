"""Exception hierarchy for stablevar."""


class StableVarError(Exception):
    """Base class for all errors raised by this package."""


class InvalidInput(StableVarError, ValueError):
    """Malformed argument: wrong shape, non-finite entries, bad sizes."""


class NotPositiveDefinite(StableVarError, ValueError):
    """A matrix required to be SPD has an eigenvalue below the floor.

    Attributes
    ----------
    eigenvalue : float
        The offending (smallest) eigenvalue.
    """

    def __init__(self, message, eigenvalue=float("nan")):
        super().__init__(message)
        self.eigenvalue = float(eigenvalue)


class UnstableMatrix(StableVarError, ValueError):
    """Transition matrix has spectral radius >= 1 where stability is required."""

    def __init__(self, message, spectral_radius=float("nan")):
        super().__init__(message)
        self.spectral_radius = float(spectral_radius)


class SingularSystem(StableVarError, ArithmeticError):
    """A linear matrix equation has no unique solution."""


class InvalidRank(StableVarError, ValueError):
    """Requested rank outside ``1 <= m <= n``."""


class ZeroReference(StableVarError, ZeroDivisionError):
    """Relative error requested against a zero reference matrix."""


class ParseError(StableVarError, ValueError):
    """Malformed trajectory file.

    Attributes
    ----------
    line : int
        1-based line number of the offending row.
    """

    def __init__(self, message, line):
        super().__init__(f"line {line}: {message}")
        self.line = line
