"""Exception types shared across the package."""


class ParameterError(ValueError):
    """An input violates a precondition (range, dimension, shape)."""


class CapacityError(ParameterError):
    """A requested codebook exceeds the explicit-enumeration bound."""


class FeasibilityError(RuntimeError):
    """A positive secret rate is impossible for the given parameters.

    Carries the ``FeasibilityReport`` that explains which condition failed
    (too few CDI feedback bits, or channel gain below the transmit threshold).
    """

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report
