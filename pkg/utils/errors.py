"""Exception hierarchy shared by every package in the repo."""

from typing import Optional


class WindFitError(Exception):
    """Base class for all errors raised by this project."""

    kind = "error"


class DomainError(WindFitError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""

    kind = "domain"


class ConvergenceError(WindFitError, ArithmeticError):
    """An iterative method hit its iteration cap or lost its bracket."""

    kind = "convergence"


class DivergenceError(ConvergenceError):
    """A numerical integral failed its convergence check."""

    kind = "divergence"


class NumericalOverflowError(WindFitError, OverflowError):
    """An intermediate quantity became non-finite."""

    kind = "overflow"


class MappingError(WindFitError, ValueError):
    """A configured column is missing from the input header."""

    kind = "mapping"


class EmptyResultError(WindFitError):
    """No rows survived ingestion or cleaning."""

    kind = "empty-result"


class DegenerateSampleError(WindFitError):
    """The sample has zero variance, so shape statistics are undefined."""

    kind = "degenerate-sample"


class IngestError(WindFitError):
    """Input file problem, reported with file and line context."""

    kind = "ingest"

    def __init__(self, message: str, path: Optional[str] = None, line_number: Optional[int] = None):
        self.path = path
        self.line_number = line_number
        where = ""
        if path is not None:
            where = f"{path}:{line_number}: " if line_number is not None else f"{path}: "
        super().__init__(f"{where}{message}")
