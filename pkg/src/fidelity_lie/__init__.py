"""Fidelity susceptibility and geometric phase for SU(2) and SU(1,1) models."""

from .algebra import (
    AlgebraKind,
    AngleVelocity,
    ConnectionMoments,
    CosetAngles,
    Reference,
    berry_phase_su2,
    bogoliubov_angle,
    chi_angles,
    chi_from_moments,
    geometric_phase_su11,
)
from .numerics import DiffSpec, QuadratureSpec, bz_integrate_2d, central_diff
from .spectral import (
    HermitianMatrix,
    Spectrum,
    chi_finite_difference,
    chi_perturbative,
    eigensolve,
    fidelity,
    pancharatnam_phase,
)

__version__ = "0.1.0"
