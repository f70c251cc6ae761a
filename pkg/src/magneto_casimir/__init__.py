"""Casimir force between magnetoplasma slabs in the Voigt configuration."""

from .errors import ConditioningError, ConvergenceError, DomainError
from .lifshitz import (
    ForceResult,
    SweepSpec,
    ThermalState,
    force_sweep,
    ideal_pressure,
    matsubara_frequency,
    polarization_kernel,
    pressure,
    pressure_finite_t,
    pressure_zero_t,
)
from .material import (
    Material,
    VoigtPermittivity,
    conductivity_tensor,
    dielectric_tensor,
    real_axis_components,
    voigt_components,
)
from .reflection import (
    HALF_SPACE,
    Kinematics,
    ReflectionPair,
    SlabGeometry,
    kinematics,
    reflection_numeric_oracle,
    reflection_te,
    reflection_tm_halfspace,
    reflection_tm_slab,
    voigt_effective_permittivity,
)

__version__ = "0.1.0"
