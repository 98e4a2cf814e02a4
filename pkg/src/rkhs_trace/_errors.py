class DomainError(ValueError):
    """An index or point lies outside the domain of an operation."""


class MembershipError(ValueError):
    """A polynomial has nonzero coefficients below the space's start index."""


class WindowError(ValueError):
    """A numeric test window is too small."""


class ParameterError(ValueError):
    """Family parameters out of range (gamma <= -2, beta <= -1, k < 0, ...)."""


class UnknownFamilyError(ValueError):
    pass
