"""Exception hierarchy. Everything raised on purpose derives from PdetError."""


class PdetError(Exception):
    pass


class InvalidInputError(PdetError, ValueError):
    pass


class NotAUnitError(InvalidInputError):
    pass


class NoSquareRootError(InvalidInputError):
    pass


class OperatorFileError(InvalidInputError):
    pass


class SmallnessViolationError(OperatorFileError):
    pass


class NonInvertibleDenominatorError(OperatorFileError):
    pass


class ArityError(OperatorFileError):
    pass


class BadPrimeError(InvalidInputError):
    pass


class NotPolynomialError(PdetError):
    """Det_p is a genuine rational function of t (no clearing prefactor)."""


class NotWeierstrassReadyError(InvalidInputError):
    pass


class UnsupportedPoleError(InvalidInputError):
    pass


class NonConvergenceError(PdetError):
    pass


class InternalBoundError(PdetError):
    pass


class SolverFailureError(PdetError):
    pass


class BadContourError(InvalidInputError):
    pass


class AccuracyFailureError(PdetError):
    pass
