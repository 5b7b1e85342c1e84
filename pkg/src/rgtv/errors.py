"""Exception hierarchy shared across the package.

Every error carries a stable kebab-case category string (used by the CLI
for machine-readable reporting) and a distinct process exit code.
Exit codes 0-3 are reserved: 0 success, 2 bad command line, 3 unreadable
file.
"""


class RgtvError(Exception):
    """Base class for all errors raised by this package."""

    category = "error"
    exit_code = 1


class InvalidParameter(RgtvError, ValueError):
    category = "invalid-parameter"
    exit_code = 4


class InvalidInput(RgtvError, ValueError):
    category = "invalid-input"
    exit_code = 5


class DimensionMismatch(RgtvError, ValueError):
    category = "dimension-mismatch"
    exit_code = 6


class TooLarge(RgtvError, ValueError):
    category = "too-large"
    exit_code = 7


class DegenerateInput(RgtvError, ValueError):
    category = "degenerate-input"
    exit_code = 8


class DegenerateKernel(RgtvError, ValueError):
    category = "degenerate-kernel"
    exit_code = 9


class DegenerateSpectrum(RgtvError, ValueError):
    category = "degenerate-spectrum"
    exit_code = 10


class SolverFailure(RgtvError, RuntimeError):
    category = "solver-failure"
    exit_code = 11


class SingularSystem(RgtvError, RuntimeError):
    category = "singular-system"
    exit_code = 12


class UndefinedSimilarity(RgtvError, ValueError):
    category = "undefined-similarity"
    exit_code = 13
