"""Closed-form fidelity susceptibility and geometric phase on SU(2) and SU(1,1) cosets.

The diagonalizing unitary of a rank-one Hamiltonian ``eps * Z + c * E+ + c^* * E-``
is fixed by two coset angles: ``theta`` (polar angle for SU(2), rapidity for
SU(1,1)) and ``phi`` (the phase of the coupling). Everything here is a pure
function of those angles and their derivatives along the driving parameter.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass

IMAG_TOL = 1e-9
NEG_TOL = 1e-12


class AlgebraKind(enum.Enum):
    SU2 = "su2"
    SU11 = "su11"


class Reference(enum.Enum):
    """Reference state the coset unitary acts on (SU(2) only)."""

    UP = "up"
    DOWN = "down"


@dataclass(frozen=True)
class CosetAngles:
    theta: float
    phi: float = 0.0

    def validate(self, kind: AlgebraKind) -> "CosetAngles":
        if not (math.isfinite(self.theta) and math.isfinite(self.phi)):
            raise ValueError(f"non-finite coset angles {self}")
        if kind is AlgebraKind.SU2 and not 0.0 <= self.theta <= math.pi:
            raise ValueError(f"SU(2) polar angle must lie in [0, pi], got {self.theta}")
        if kind is AlgebraKind.SU11 and self.theta < 0.0:
            raise ValueError(f"SU(1,1) rapidity must be >= 0, got {self.theta}")
        return self


@dataclass(frozen=True)
class AngleVelocity:
    """Derivatives of the coset angles with respect to the driving parameter."""

    dtheta: float
    dphi: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.dtheta) and math.isfinite(self.dphi)):
            raise ValueError(f"non-finite angle velocity {self}")


@dataclass(frozen=True)
class ConnectionMoments:
    """First and second moments of the connection ``U^dag dU`` in the reference state."""

    m1: complex
    m2: float


def chi_from_moments(m: ConnectionMoments) -> float:
    """Susceptibility ``-<A^2> - |<A>|^2`` of an anti-Hermitian connection ``A``."""
    m1 = complex(m.m1)
    m2 = float(m.m2)
    if not (cmath.isfinite(m1) and math.isfinite(m2)):
        raise ValueError(f"non-finite connection moments {m}")
    if abs(m1.real) > IMAG_TOL * abs(m1):
        raise ValueError(
            f"first moment {m1} has a real part: connection is not anti-Hermitian"
        )
    scale = max(1.0, abs(m2))
    if m2 > NEG_TOL * scale:
        raise ValueError(f"second moment must be <= 0 for an anti-Hermitian connection, got {m2}")
    chi = -m2 - abs(m1) ** 2
    if chi < -NEG_TOL * scale:
        raise ValueError(f"negative susceptibility {chi}: moments are inconsistent")
    return max(chi, 0.0)


def su2_phi_connection_moments(theta: float, dphi: float = 1.0) -> ConnectionMoments:
    """Moments of ``U^dag d_phi U`` in the up reference state at fixed polar angle.

    With ``A = (i/2) sin(theta) (e^{-i phi} J+ + e^{i phi} J-) + 2i sin^2(theta/2) Jz``
    one gets ``<A> = i sin^2(theta/2)`` and ``<A^2> = -(sin^2(theta)/4 + sin^4(theta/2))``.
    """
    s2 = math.sin(theta / 2.0) ** 2
    return ConnectionMoments(
        m1=1j * dphi * s2,
        m2=-(dphi**2) * (math.sin(theta) ** 2 / 4.0 + s2**2),
    )


def chi_angles(kind: AlgebraKind, angles: CosetAngles, vel: AngleVelocity) -> float:
    """Fidelity susceptibility from the coset angles and their velocities.

    SU(1,1): ``(1/8) [dtheta^2 + sinh^2(theta) dphi^2]``.
    SU(2):   ``(1/4) [dtheta^2 + sin^2(theta) dphi^2]``.
    """
    angles.validate(kind)
    if kind is AlgebraKind.SU11:
        return (vel.dtheta**2 + math.sinh(angles.theta) ** 2 * vel.dphi**2) / 8.0
    return (vel.dtheta**2 + math.sin(angles.theta) ** 2 * vel.dphi**2) / 4.0


def berry_phase_su2(theta: float, reference: Reference | str = Reference.UP) -> float:
    """Berry phase of a spin-1/2 ground state as the field circles a cone of half-angle ``theta``.

    The up reference picks up ``-pi (1 - cos theta)``, the down reference the opposite sign.
    """
    reference = Reference(reference)
    if not (math.isfinite(theta) and 0.0 <= theta <= math.pi):
        raise ValueError(f"theta must lie in [0, pi], got {theta}")
    phase = math.pi * (1.0 - math.cos(theta))
    return -phase if reference is Reference.UP else phase


def geometric_phase_su11(theta: float) -> float:
    """``pi (1 - cosh theta)``: the SU(1,1) phase accumulated over half a rotation."""
    if not math.isfinite(theta) or theta < 0.0:
        raise ValueError(f"rapidity must be finite and >= 0, got {theta}")
    # 1 - cosh(t) = -2 sinh^2(t/2), exact near t = 0
    return -2.0 * math.pi * math.sinh(theta / 2.0) ** 2


def bogoliubov_angle(epsilon: float, coupling: complex) -> CosetAngles:
    """Coset angles diagonalizing ``2 eps Kz + c K+ + c^* K-``.

    ``tanh(theta) = |c| / eps`` and ``phi = arg(c)``.
    """
    coupling = complex(coupling)
    if not (math.isfinite(epsilon) and cmath.isfinite(coupling)):
        raise ValueError("non-finite Bogoliubov coefficients")
    if epsilon <= 0.0:
        raise ValueError(f"diagonal coefficient must be positive, got {epsilon}")
    ratio = abs(coupling) / epsilon
    if ratio >= 1.0:
        raise ValueError(
            f"|coupling|/epsilon = {ratio} >= 1: mode is gapless or unstable"
        )
    phi = cmath.phase(coupling) if coupling != 0 else 0.0
    return CosetAngles(theta=math.atanh(ratio), phi=phi)
