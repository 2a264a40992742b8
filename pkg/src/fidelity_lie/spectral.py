"""Model-independent numerical oracles.

Exact diagonalization, ground-state fidelity, the perturbative (sum over
states) susceptibility, the finite-difference susceptibility read off from the
fidelity drop, and the discretized Pancharatnam phase of a loop of states.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
import scipy.linalg

HERMITIAN_RTOL = 1e-12
ORTHO_TOL = 1e-10
RESIDUAL_RTOL = 1e-9
DROP_ELEMENT_RTOL = 1e-12
DROP_GAP_RTOL = 1e-10
OVERLAP_FLOOR = 1e-12


class SpectralError(RuntimeError):
    """Numerical failure: solver non-convergence or an ill-defined susceptibility."""


class DegenerateGroundStateError(SpectralError):
    pass


@dataclass(frozen=True, eq=False)
class HermitianMatrix:
    """Hermitian operator stored densely or as a lower band.

    Banded storage follows ``scipy.linalg.eig_banded(lower=True)``:
    ``data[k, j] = H[j + k, j]`` for ``k = 0..bandwidth``.
    """

    data: np.ndarray
    bandwidth: int | None = None

    def __post_init__(self):
        data = np.asarray(self.data)
        if not np.issubdtype(data.dtype, np.complexfloating):
            data = data.astype(float)
        data.setflags(write=False)
        object.__setattr__(self, "data", data)
        if not np.all(np.isfinite(data)):
            raise ValueError("matrix has non-finite entries")
        if self.bandwidth is None:
            if data.ndim != 2 or data.shape[0] != data.shape[1]:
                raise ValueError(f"dense matrix must be square, got shape {data.shape}")
            scale = max(float(np.max(np.abs(data), initial=0.0)), 1e-300)
            if np.max(np.abs(data - data.conj().T), initial=0.0) > HERMITIAN_RTOL * scale:
                raise ValueError("matrix is not Hermitian")
        else:
            if data.ndim != 2 or data.shape[0] != self.bandwidth + 1:
                raise ValueError(
                    f"banded storage must have {self.bandwidth + 1} rows, got {data.shape}"
                )
            if np.iscomplexobj(data) and np.any(data[0].imag != 0):
                raise ValueError("Hermitian band has a complex diagonal")

    @classmethod
    def from_dense(cls, matrix) -> "HermitianMatrix":
        return cls(np.asarray(matrix))

    @property
    def dimension(self) -> int:
        return self.data.shape[1]

    @property
    def is_banded(self) -> bool:
        return self.bandwidth is not None

    def to_dense(self) -> np.ndarray:
        if not self.is_banded:
            return np.array(self.data)
        n = self.dimension
        out = np.zeros((n, n), dtype=self.data.dtype)
        for k in range(self.bandwidth + 1):
            idx = np.arange(n - k)
            out[idx + k, idx] = self.data[k, : n - k]
            if k:
                out[idx, idx + k] = np.conj(self.data[k, : n - k])
        return out

    def matvec(self, v: np.ndarray) -> np.ndarray:
        v = np.asarray(v)
        if not self.is_banded:
            return self.data @ v
        n = self.dimension
        out = self.data[0] * v
        out = out.astype(np.result_type(self.data, v), copy=False)
        for k in range(1, self.bandwidth + 1):
            band = self.data[k, : n - k]
            out[k:] = out[k:] + band * v[: n - k]
            out[: n - k] = out[: n - k] + np.conj(band) * v[k:]
        return out

    def norm(self) -> float:
        """Max absolute row sum; an upper bound on the spectral norm."""
        return float(np.max(np.sum(np.abs(self.to_dense()), axis=1)))


@dataclass(frozen=True, eq=False)
class Spectrum:
    energies: np.ndarray
    states: np.ndarray = field(repr=False)

    @property
    def ground_energy(self) -> float:
        return float(self.energies[0])

    @property
    def ground_state(self) -> np.ndarray:
        return self.states[:, 0]

    @property
    def gap(self) -> float:
        return float(self.energies[1] - self.energies[0]) if len(self.energies) > 1 else math.inf


def as_hermitian(H) -> HermitianMatrix:
    return H if isinstance(H, HermitianMatrix) else HermitianMatrix.from_dense(H)


def fix_phase(state: np.ndarray, reference_index: int | None = None) -> np.ndarray:
    """Rotate the global phase so one component is real and positive.

    By default the largest-magnitude component is used. A fixed
    ``reference_index`` gives a gauge that is smooth along a parameter path as
    long as that component does not vanish.
    """
    state = np.asarray(state, dtype=complex)
    idx = int(np.argmax(np.abs(state))) if reference_index is None else reference_index
    amp = state[idx]
    if abs(amp) == 0.0:
        raise ValueError(f"component {idx} vanishes; cannot fix the phase on it")
    return state * (abs(amp) / amp)


def normalize(state) -> np.ndarray:
    state = np.asarray(state, dtype=complex)
    norm = np.linalg.norm(state)
    if norm == 0.0 or not math.isfinite(norm):
        raise ValueError("cannot normalize a zero or non-finite vector")
    return state / norm


def eigensolve(H, check: bool = True) -> Spectrum:
    """Full spectrum of a Hermitian matrix, ascending, with phase-fixed eigenvectors."""
    H = as_hermitian(H)
    try:
        if H.is_banded:
            energies, states = scipy.linalg.eig_banded(H.data, lower=True)
        else:
            energies, states = scipy.linalg.eigh(H.data)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise SpectralError(f"eigensolver failed: {exc}") from exc
    states = np.asarray(states, dtype=complex)
    magnitudes = np.abs(states)
    idx = np.argmax(magnitudes, axis=0)
    pivots = states[idx, np.arange(states.shape[1])]
    states = states * (np.abs(pivots) / pivots)[None, :]
    if check:
        _check_spectrum(H, energies, states)
    return Spectrum(energies=np.asarray(energies, dtype=float), states=states)


def _check_spectrum(H: HermitianMatrix, energies, states) -> None:
    if np.any(np.diff(energies) < 0):
        raise SpectralError("eigenvalues are not sorted")
    gram = states.conj().T @ states
    ortho = np.max(np.abs(gram - np.eye(len(energies))), initial=0.0)
    if ortho > ORTHO_TOL:
        raise SpectralError(f"eigenvectors not orthonormal (deviation {ortho:.3e})")
    dense = H.to_dense()
    residual = np.linalg.norm(dense @ states - states * energies[None, :], axis=0)
    bound = RESIDUAL_RTOL * max(H.norm(), 1e-300)
    if np.max(residual, initial=0.0) > bound:
        raise SpectralError(f"eigenpair residual {np.max(residual):.3e} exceeds {bound:.3e}")


def fidelity(a, b) -> float:
    """``|<a|b>|`` of two normalized states."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return min(1.0, float(abs(np.vdot(a, b))))


def infidelity(a, b) -> float:
    """``1 - |<a|b>|`` without cancellation.

    Uses ``1 - |<a|b>| = ||a - e^{i arg<a|b>} b||^2 / 2``, which keeps full
    relative precision when the states are nearly identical.
    """
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    overlap = np.vdot(a, b)
    phase = overlap / abs(overlap) if overlap != 0 else 1.0
    diff = a - b * np.conj(phase)
    return float(np.vdot(diff, diff).real) / 2.0


def chi_perturbative(s: Spectrum, H_I, h_norm: float | None = None) -> float:
    """Sum-over-states susceptibility ``sum_n |<n|H_I|0>|^2 / (E_n - E_0)^2``.

    Quasi-degenerate levels whose coupling to the ground state is negligible
    are dropped (parity partners, for instance); a quasi-degenerate level with
    a finite matrix element raises :class:`DegenerateGroundStateError`.
    """
    H_I = as_hermitian(H_I)
    if H_I.dimension != s.states.shape[0]:
        raise ValueError("driving operator and spectrum have different dimensions")
    if h_norm is None:
        h_norm = float(np.max(np.abs(s.energies)))
    hi_norm = H_I.norm()
    elements = s.states[:, 1:].conj().T @ H_I.matvec(s.ground_state)
    gaps = s.energies[1:] - s.energies[0]
    small_gap = gaps < DROP_GAP_RTOL * max(h_norm, 1e-300)
    small_elem = np.abs(elements) < DROP_ELEMENT_RTOL * max(hi_norm, 1e-300)
    if np.any(small_gap & ~small_elem):
        raise DegenerateGroundStateError(
            "ground state is degenerate with a level it couples to; susceptibility is ill-defined"
        )
    keep = ~small_gap
    terms = np.abs(elements[keep]) ** 2 / gaps[keep] ** 2
    return math.fsum(np.sort(terms))


def chi_finite_difference(
    ground: Callable[[float], np.ndarray],
    lambda0: float,
    delta: float = 1e-3,
    richardson_levels: int = 1,
    min_fidelity: float = 0.5,
) -> float:
    """Susceptibility from the fidelity drop ``F = 1 - (delta^2/2) chi + ...``.

    Symmetric stencil ``[(1 - F(+delta)) + (1 - F(-delta))] / delta^2``, with
    ``richardson_levels`` step halvings to cancel the ``O(delta^2)`` error.
    """
    if not delta > 0:
        raise ValueError(f"delta must be positive, got {delta}")
    psi0 = ground(lambda0)

    def estimate(d: float) -> float:
        plus, minus = ground(lambda0 + d), ground(lambda0 - d)
        for other in (plus, minus):
            if fidelity(psi0, other) < min_fidelity:
                raise SpectralError(
                    f"fidelity below {min_fidelity} across stencil (delta={d}); "
                    "step too large or a level crossing"
                )
        return (infidelity(psi0, plus) + infidelity(psi0, minus)) / d**2

    prev = [estimate(delta)]
    for i in range(1, richardson_levels + 1):
        row = [estimate(delta / 2**i)]
        for j in range(1, i + 1):
            factor = 4.0**j
            row.append((factor * row[j - 1] - prev[j - 1]) / (factor - 1.0))
        prev = row
    return prev[-1]


def pancharatnam_phase(loop: Sequence[np.ndarray], closed: bool = True) -> float:
    """Discrete Berry phase ``-sum_k arg <psi_k|psi_{k+1}>``.

    Summing the principal argument of each link (rather than taking the
    argument of the full product) tracks the winding, so phases outside
    (-pi, pi] are resolved for finely sampled loops. With ``closed=True`` the
    link from the last state back to the first is included; repeating the
    first state at the end is harmless.
    """
    states = [np.asarray(s) for s in loop]
    if len(states) < 3:
        raise ValueError("need at least three states")
    if closed:
        states = states + [states[0]]
    total = []
    for a, b in zip(states[:-1], states[1:]):
        link = np.vdot(a, b)
        if abs(link) < OVERLAP_FLOOR:
            raise ValueError("consecutive states are orthogonal; the phase is undefined")
        total.append(np.angle(link))
    return -math.fsum(total)
