"""Exception hierarchy.

Input problems (bad distributions, bad channel parameters, malformed files)
derive from :class:`InputError`; failures of the numerical machinery
(vacuous bounds, failed brackets) derive from :class:`NumericalError`.
The CLI maps the two families to different exit codes.
"""


class LdpcBoundError(Exception):
    """Base class for every error raised by this package."""


class InputError(LdpcBoundError, ValueError):
    pass


class DomainError(InputError):
    """An argument lies outside the domain of the operation."""


class InvalidDistributionError(InputError):
    pass


class InvalidEnsembleError(InputError):
    pass


class InvalidChannelError(InputError):
    pass


class PatternMismatchError(InputError):
    """A puncturing rate refers to a degree the ensemble does not have."""


class SchemaError(InputError):
    """A JSON document does not match the expected layout."""


class NumericalError(LdpcBoundError, ArithmeticError):
    pass


class DegenerateBoundError(NumericalError):
    """The bound is vacuous or undefined for the given input."""


class BracketError(NumericalError):
    """A root-finding bracket could not be established."""


class NonMonotoneError(NumericalError):
    """A quantity assumed monotone in the channel parameter is not."""
