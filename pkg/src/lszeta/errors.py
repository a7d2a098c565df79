"""Exception hierarchy shared by all modules."""


class LszetaError(Exception):
    """Base class for all library errors."""


class InputError(LszetaError):
    """Invalid user input (bad descriptors, malformed files, bad data)."""


class NumericalError(LszetaError):
    """A numerical procedure failed to reach its target accuracy."""


class UnsupportedFamily(InputError):
    pass


class NotInAlgebra(InputError):
    pass


class NotMaximalTorus(InputError):
    pass


class SingularPoint(NumericalError):
    pass


class TorusMismatch(InputError):
    pass


class DeltaNotOne(InputError):
    pass


class UnsupportedDeltaOneFactor(InputError):
    pass


class NotInH(InputError):
    pass


class NotRegular(InputError):
    pass


class SingularEigenvalue(NumericalError):
    pass


class QuadratureNotConverged(NumericalError):
    pass


class DimensionBudget(InputError):
    pass


class DualityViolation(InputError):
    pass


class MissingCountingConstants(InputError):
    pass


class InsufficientSamples(InputError):
    pass


class NotInvariant(InputError):
    pass
