"""Exception hierarchy.

The CLI maps these onto exit codes: :class:`DataError` -> 2,
:class:`NumericalError` -> 3. Everything else derived from
:class:`WindcopError` is treated as a usage problem (exit 1).
"""


class WindcopError(Exception):
    """Base class for all errors raised by the package."""


class DataError(WindcopError, ValueError):
    """Input data violates a precondition (bad values, wrong shapes, too few rows)."""


class InsufficientDataError(DataError):
    pass


class DegenerateError(DataError):
    """Zero variance, all ties, constant columns and similar degeneracies."""


class DomainError(WindcopError, ValueError):
    """A parameter or argument lies outside its admissible domain."""


class NumericalError(WindcopError, ArithmeticError):
    """An iterative or linear-algebra routine failed."""


class SingularDesignError(NumericalError):
    pass
