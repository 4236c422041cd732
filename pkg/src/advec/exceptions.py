class AdvecError(Exception):
    """Base class for errors raised by this package."""


class DomainError(AdvecError, ValueError):
    """Input data outside the domain of a kernel (non-finite, zero width)."""


class CFLError(AdvecError, ValueError):
    """A departure point lies more than one cell away."""

    def __init__(self, index, courant):
        self.index = int(index)
        self.courant = float(courant)
        super().__init__(f"CFL violation at index {self.index}: |u dt|/h = {self.courant:.6g} > 1")


class ConfigurationError(AdvecError, ValueError):
    """Invalid scheme/problem combination or run configuration."""
