"""Hamiltonians and coset parametrizations for the four model systems.

* two-level spin in a field ``-B n . sigma``; driving parameter: azimuth ``phi``
* Lipkin-Meshkov-Glick model in the maximal-spin sector; driving parameter: ``h``
* 2D square-lattice XXZ antiferromagnet in linear spin-wave theory; driving: ``eta``
* single Bogoliubov modes of a condensate, ``2 sigma Kz + u K+ + u^* K-``; driving
  parameter chosen by the caller through ``sigma(lam)`` and ``u(lam)``
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .algebra import AlgebraKind, AngleVelocity, CosetAngles, chi_angles, geometric_phase_su11
from .numerics import DiffSpec, QuadratureSpec, bz_integrate_2d, central_diff
from .spectral import HermitianMatrix, eigensolve

CRITICAL_TOL = 1e-12

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)


# --------------------------------------------------------------------------
# two-level system


@dataclass(frozen=True)
class TwoLevelParams:
    B: float = 1.0
    theta: float = math.pi / 2
    phi: float = 0.0

    driving = "phi"

    def __post_init__(self):
        if not (self.B > 0 and math.isfinite(self.B)):
            raise ValueError(f"field magnitude must be positive, got {self.B}")
        if not 0.0 <= self.theta <= math.pi:
            raise ValueError(f"theta must lie in [0, pi], got {self.theta}")
        if not math.isfinite(self.phi):
            raise ValueError("phi must be finite")


def two_level_hamiltonian(p: TwoLevelParams) -> HermitianMatrix:
    st = math.sin(p.theta)
    n_dot_sigma = (
        math.cos(p.theta) * SIGMA_Z
        + st * math.cos(p.phi) * SIGMA_X
        + st * math.sin(p.phi) * SIGMA_Y
    )
    return HermitianMatrix(-p.B * n_dot_sigma)


def two_level_driving(p: TwoLevelParams) -> HermitianMatrix:
    """``dH/dphi`` at fixed ``B`` and ``theta``."""
    st = math.sin(p.theta)
    return HermitianMatrix(-p.B * st * (-math.sin(p.phi) * SIGMA_X + math.cos(p.phi) * SIGMA_Y))


def two_level_ground_state(p: TwoLevelParams) -> np.ndarray:
    """Ground state in the gauge continuous from the up reference, ``(cos t/2, e^{i phi} sin t/2)``."""
    return np.array(
        [math.cos(p.theta / 2), cmath.exp(1j * p.phi) * math.sin(p.theta / 2)], dtype=complex
    )


def two_level_angles(p: TwoLevelParams) -> CosetAngles:
    return CosetAngles(p.theta, p.phi).validate(AlgebraKind.SU2)


def two_level_chi_closed(p: TwoLevelParams) -> float:
    return chi_angles(AlgebraKind.SU2, two_level_angles(p), AngleVelocity(0.0, 1.0))


# --------------------------------------------------------------------------
# Lipkin-Meshkov-Glick model


@dataclass(frozen=True)
class LmgParams:
    h: float
    gamma: float
    lambda_coupling: float = 1.0
    N: int | None = None

    driving = "h"

    def __post_init__(self):
        if not (self.h > 0 and math.isfinite(self.h)):
            raise ValueError(f"field h must be positive, got {self.h}")
        if not 0.0 <= self.gamma <= 1.0:
            raise ValueError(f"anisotropy gamma must lie in [0, 1], got {self.gamma}")
        if not self.lambda_coupling > 0:
            raise ValueError(f"lambda_coupling must be positive, got {self.lambda_coupling}")
        if self.N is not None and int(self.N) < 2:
            raise ValueError(f"N must be >= 2, got {self.N}")


def _lmg_m(N: int) -> np.ndarray:
    return np.arange(N + 1, dtype=float) - N / 2.0


def lmg_hamiltonian(p: LmgParams, banded: bool = True) -> HermitianMatrix:
    """LMG Hamiltonian on ``|S=N/2, m>``, ``m = -S..S``.

    Real symmetric and pentadiagonal with a vanishing first off-diagonal.
    The banded form uses lower band storage with bandwidth 2.
    """
    if p.N is None or int(p.N) < 2:
        raise ValueError("finite-N Hamiltonian needs N >= 2")
    N = int(p.N)
    S = N / 2.0
    m = _lmg_m(N)
    lam = p.lambda_coupling
    diag = -(lam / N) * (1.0 + p.gamma) * (S * (S + 1.0) - m**2 - N / 2.0) - 2.0 * p.h * m
    mm = m[:-2]
    pair = -(lam / (2.0 * N)) * (1.0 - p.gamma) * np.sqrt(
        (S - mm) * (S + mm + 1.0) * (S - mm - 1.0) * (S + mm + 2.0)
    )
    band = np.zeros((3, N + 1))
    band[0] = diag
    band[2, : N - 1] = pair
    H = HermitianMatrix(band, bandwidth=2)
    return H if banded else HermitianMatrix(H.to_dense())


def lmg_driving(N: int) -> HermitianMatrix:
    """``dH/dh = -2 Sz`` in the maximal-spin sector."""
    return HermitianMatrix(-2.0 * _lmg_m(int(N))[None, :], bandwidth=0)


def lmg_parity(N: int) -> np.ndarray:
    """Diagonal of ``prod_i sigma_z^i`` restricted to ``S = N/2``: ``(-1)^(S - m)``."""
    return (-1.0) ** np.arange(int(N), -1, -1)


def lmg_ground_state(p: LmgParams, banded: bool = True) -> np.ndarray:
    return eigensolve(lmg_hamiltonian(p, banded=banded), check=False).ground_state


def _check_lmg_closed_domain(h: float, gamma: float) -> None:
    LmgParams(h, gamma)
    if abs(h - 1.0) <= CRITICAL_TOL:
        raise ValueError("h = 1 is the critical point: the rapidity diverges")
    if h < 1.0 and gamma >= 1.0:
        raise ValueError("gamma = 1 below h = 1 is gapless (Goldstone mode)")


def lmg_tanh_argument(h: float, gamma: float) -> float:
    """Signed ``tanh(theta)`` of the large-N Bogoliubov rotation in either phase."""
    _check_lmg_closed_domain(h, gamma)
    if h > 1.0:
        return (1.0 - gamma) / (2.0 * h - 1.0 - gamma)
    return (h * h - gamma) / (2.0 - h * h - gamma)


def lmg_rapidity(h: float, gamma: float) -> CosetAngles:
    """Large-N coset angles; a negative tanh argument is carried as ``phi = pi``."""
    x = lmg_tanh_argument(h, gamma)
    return CosetAngles(theta=math.atanh(abs(x)), phi=math.pi if x < 0 else 0.0)


def lmg_chi_closed(h: float, gamma: float) -> float:
    _check_lmg_closed_domain(h, gamma)
    if h > 1.0:
        return (1.0 - gamma) ** 2 / (32.0 * (1.0 - h) ** 2 * (h - gamma) ** 2)
    return h * h / (8.0 * (1.0 - h * h) ** 2)


def lmg_chi_from_angles(h: float, gamma: float, spec: DiffSpec = DiffSpec()) -> float:
    """Large-N susceptibility through the coset route with a numerical ``dtheta/dh``."""
    angles = lmg_rapidity(h, gamma)
    signed = lambda x: math.atanh(lmg_tanh_argument(x, gamma))
    dtheta = central_diff(signed, h, spec)
    return chi_angles(AlgebraKind.SU11, angles, AngleVelocity(dtheta, 0.0))


def lmg_geometric_phase(h: float, gamma: float) -> float:
    return geometric_phase_su11(lmg_rapidity(h, gamma).theta)


# --------------------------------------------------------------------------
# 2D XXZ antiferromagnet, linear spin waves


@dataclass(frozen=True)
class XxzParams:
    eta: float
    coordination: int = 4

    driving = "eta"

    def __post_init__(self):
        if self.coordination != 4:
            raise ValueError("only the square lattice (z = 4) is supported")
        if not (math.isfinite(self.eta) and abs(self.eta) > 1.0):
            raise ValueError(f"|eta| must exceed 1 for a finite integrand, got {self.eta}")


def xxz_gamma_k(kx, ky):
    """Square-lattice structure factor ``(cos kx + cos ky) / 2``."""
    return (np.cos(kx) + np.cos(ky)) / 2.0


def xxz_integrand(eta: float, kx, ky):
    """Per-mode susceptibility for driving by ``eta``: ``gamma_k^2 / (32 (eta^2 - gamma_k^2)^2)``."""
    g = xxz_gamma_k(kx, ky)
    return g**2 / (32.0 * (eta**2 - g**2) ** 2)


def xxz_chi(p: XxzParams, q: QuadratureSpec = QuadratureSpec()) -> float:
    return bz_integrate_2d(lambda kx, ky: xxz_integrand(p.eta, kx, ky), q)


# --------------------------------------------------------------------------
# Bogoliubov modes of a condensate


@dataclass(frozen=True)
class BecModeParams:
    """A mode ``2 sigma Kz + u K+ + u^* K-`` depending on a driving parameter ``lam``."""

    sigma: Callable[[float], float]
    u: Callable[[float], complex]
    lambda0: float
    step: float = 1e-4

    def __post_init__(self):
        if not self.step > 0:
            raise ValueError(f"step must be positive, got {self.step}")


def _bec_rapidity(p: BecModeParams, lam: float) -> float:
    sigma = float(p.sigma(lam))
    amp = abs(complex(p.u(lam)))
    if not sigma > amp:
        raise ValueError(
            f"unstable mode at lambda={lam}: sigma={sigma} <= |u|={amp}"
        )
    return math.atanh(amp / sigma)


def bec_mode_chi(p: BecModeParams) -> float:
    """Mode susceptibility via the coset angles, differentiated numerically.

    ``dphi`` is taken as ``Im(u^* du) / |u|^2`` so no branch of ``arg u`` is
    ever chosen; the result is invariant under ``u -> e^{ic} u``.
    """
    spec = DiffSpec(step=p.step, richardson_levels=1)
    theta = _bec_rapidity(p, p.lambda0)
    dtheta = central_diff(lambda lam: _bec_rapidity(p, lam), p.lambda0, spec)
    u0 = complex(p.u(p.lambda0))
    if abs(u0) > 0:
        du = complex(
            central_diff(lambda lam: complex(p.u(lam)).real, p.lambda0, spec),
            central_diff(lambda lam: complex(p.u(lam)).imag, p.lambda0, spec),
        )
        dphi = (u0.conjugate() * du).imag / abs(u0) ** 2
    else:
        dphi = 0.0
    return chi_angles(
        AlgebraKind.SU11, CosetAngles(theta, cmath.phase(u0)), AngleVelocity(dtheta, dphi)
    )


def bec_mode_chi_closed(sigma: float, u: complex, dsigma: float, du: complex) -> float:
    """Closed form of the mode susceptibility in terms of ``sigma``, ``u`` and their derivatives.

    ``{[sigma (u du^* + u^* du) - 2|u|^2 dsigma]^2
       - (sigma^2 - |u|^2) (u^* du - u du^*)^2} / (32 |u|^2 (sigma^2 - |u|^2)^2)``
    """
    u = complex(u)
    du = complex(du)
    a2 = abs(u) ** 2
    if a2 == 0.0:
        raise ValueError("closed form needs u != 0")
    gap2 = sigma**2 - a2
    if gap2 <= 0:
        raise ValueError("unstable mode: sigma <= |u|")
    first = (sigma * (u * du.conjugate() + u.conjugate() * du) - 2.0 * a2 * dsigma) ** 2
    second = gap2 * (u.conjugate() * du - u * du.conjugate()) ** 2
    value = (first - second) / (32.0 * a2 * gap2**2)
    return float(value.real)


def single_mode_hamiltonian(sigma: float, u: complex, cutoff: int) -> HermitianMatrix:
    """``2 sigma Kz + u K+ + u^* K-`` in the Fock basis ``n = 0..cutoff``.

    ``Kz = (n + 1/2)/2`` and ``K+ = a^dag^2 / 2``, truncated; banded, bandwidth 2.
    """
    n = np.arange(cutoff + 1, dtype=float)
    band = np.zeros((3, cutoff + 1), dtype=complex)
    band[0] = sigma * (n + 0.5)
    # <n+2| K+ |n> = sqrt((n+1)(n+2)) / 2
    band[2, : cutoff - 1] = complex(u) * np.sqrt((n[:-2] + 1.0) * (n[:-2] + 2.0)) / 2.0
    return HermitianMatrix(band, bandwidth=2)
