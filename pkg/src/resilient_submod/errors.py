"""Exception hierarchy shared by every module."""


class ResilientSubmodError(Exception):
    """Base class for all domain errors raised by this package."""


class InvalidInputError(ResilientSubmodError, ValueError):
    pass


class NotPositiveDefiniteError(ResilientSubmodError, ValueError):
    pass


class DegenerateElementError(InvalidInputError):
    """An element has (numerically) zero singleton value."""

    def __init__(self, element, value):
        self.element = element
        self.value = value
        super().__init__(
            f"element {element} has singleton value {value!r} <= 1e-12; "
            "curvature is undefined for zero-valued elements"
        )


class NotSubmodularError(InvalidInputError):
    """A computed quantity is only possible for a non-submodular oracle."""


class CapacityError(ResilientSubmodError):
    """An enumeration would exceed the configured cap."""


class InstanceParseError(ResilientSubmodError, ValueError):
    pass
