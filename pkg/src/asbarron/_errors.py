"""Exception hierarchy shared by all modules."""


class AsBarronError(Exception):
    """Base class for library errors."""


class InputError(AsBarronError, ValueError):
    """Malformed or inconsistent input (shapes, ranges, flags)."""


class CapabilityError(AsBarronError):
    """Input is valid but exceeds what the implementation enumerates."""


class NumericalError(AsBarronError, ArithmeticError):
    """A computation produced a non-finite or otherwise unusable value."""

    def __init__(self, message, point=None):
        super().__init__(message)
        self.point = point


class DegenerateAtomError(InputError):
    """Atoms with vanishing inner weight cannot be rescaled."""

    def __init__(self, indices):
        self.indices = list(indices)
        super().__init__(f"atoms with zero inner weight: {self.indices}")


class DegenerateMeasureError(InputError):
    """A measure with zero total mass cannot be sampled."""


class TrainingError(AsBarronError, ArithmeticError):
    """Optimisation diverged; carries the recent loss trace."""

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = list(trace or [])
