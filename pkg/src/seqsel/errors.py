"""Exception types shared across the toolkit."""


class SeqselError(Exception):
    """Base class for all toolkit errors."""


class ConfigurationError(SeqselError):
    """A configuration violates a structural constraint (bandwidth, grid, ...)."""


class NumericalOverflowError(SeqselError):
    """Non-finite samples appeared during split-step integration."""

    def __init__(self, step_index: int, message: str | None = None):
        self.step_index = step_index
        super().__init__(message or f"non-finite samples at split step {step_index}")


class EmptySelectionError(SeqselError):
    """A screening threshold rejected every test sequence."""


class DegenerateChannelError(SeqselError):
    """An auxiliary-channel fit produced zero noise variance or undefined gain."""


class InfeasibleShapingError(SeqselError):
    """A shaping target (entropy or energy bound) cannot be met."""


class InvalidCodewordError(SeqselError):
    """A sequence is outside the sphere or not reachable by the enumerative index."""
