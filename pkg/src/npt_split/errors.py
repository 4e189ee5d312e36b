"""Exception hierarchy.

Everything raised for bad input derives from ``InputError`` (itself a
``ValueError``), which the CLI maps to exit status 3.
"""


class InputError(ValueError):
    pass


class EmptyInput(InputError):
    pass


class NegativeProbability(InputError):
    pass


class NormalizationError(InputError):
    pass


class BadParameter(InputError):
    pass


class TailNotReachable(InputError):
    pass


class WeightMismatch(InputError):
    pass


class OrderTooLarge(InputError):
    pass


class NonHermitian(InputError):
    pass


# partial_transpose reports the same condition under its own name
NonHermitianInput = NonHermitian


class NegativeDiagonal(InputError):
    pass


class ParseError(InputError):
    pass


class EmptyGrid(InputError):
    pass


class BadFlag(InputError):
    pass


class HeisenbergCheckFailed(RuntimeError):
    """The numerically built beam-splitter unitary does not rotate the modes as required."""
