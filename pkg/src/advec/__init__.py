"""Semi-Lagrangian advection with cubic, rational and hybrid cubic-rational interpolants."""

from advec.exceptions import AdvecError, CFLError, ConfigurationError, DomainError
from advec.schemes import (
    ConservedState,
    Grid1D,
    NodalState,
    SchemeSpec,
    VelocityField,
    departure_offset,
    init_primitive,
    step,
    step_conservative,
    step_csl2_direct,
    step_double_replacement,
    step_nonconservative,
)

__version__ = "0.1.0"
