"""Area-preserving curve flow on warped-product surfaces dr^2 + phi(r)^2 dtheta^2."""
from .curve import (
    GeometrySample,
    RadialCurve,
    differentiate,
    functionals,
    geometry,
    iso_difference,
    perturbation_coefficient,
)
from .flow import FlowConfig, FlowTrace, dLdt_formula, evolve, gradient_barrier, stable_dt, step
from .spaceform import (
    euclidean_circle,
    integrate_characteristic,
    rs_profile_residual,
    spherical_circle,
)
from .symmetry import cut_and_reflect, equalizing_axis, mollify, reflect, symmetrize, symmetry_defect
from .warp import WarpPotential, classify_spaceform

__version__ = "0.1.0"
