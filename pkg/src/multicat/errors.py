"""Exception types raised by the simulator."""


class CapExceededError(ValueError):
    """A configured size cap (spins, cycles, branches) would be exceeded."""


class RepresentationError(ValueError):
    """State or operator used in an incompatible representation."""


class NotSymmetricError(ValueError):
    """A state expected to be permutation symmetric is not."""


class PositivityError(ArithmeticError):
    """Density operator lost positivity during integration."""
