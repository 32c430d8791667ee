"""Exception types shared across the package."""


class ExplicitPrimesError(Exception):
    """Base class for every error raised by this package."""


class DomainError(ExplicitPrimesError, ValueError):
    """An argument lies outside the range where a formula or bound is valid."""


class CapacityError(ExplicitPrimesError, ValueError):
    """A requested range exceeds what the sieve supports."""


class HorizonError(ExplicitPrimesError, ValueError):
    """A height lies beyond the largest loaded zero."""


class ParseError(ExplicitPrimesError, ValueError):
    """A data file is malformed; ``line`` is the 1-based offending line."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ValidationError(ExplicitPrimesError, ValueError):
    """Data parsed correctly but violates a structural invariant."""


class CoverageError(ExplicitPrimesError, ValueError):
    """A checkpoint table does not cover the requested argument."""


class ExhaustionError(ExplicitPrimesError):
    """A decomposition search ran out of candidates."""

    def __init__(self, n, tried):
        self.n = n
        self.tried = tried
        super().__init__(f"no decomposition found for n={n} after {tried} candidates")


class SolverRangeError(ExplicitPrimesError):
    """A threshold solver found no solution inside its search range."""
