"""Pulse evolution and state-preparation error metrics."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .eigensolve import EigenDecomposition, eigh
from .errors import DimensionError, NormalizationError, StepSizeError, ValidationError
from .model import (
    ChainConfig,
    HermitianOperator,
    build_basis,
    build_hamiltonian,
    ground_state_z,
)

RK4_MIN_STEPS = 100
RK4_DRIFT_TOL = 1e-6


@dataclass(frozen=True)
class ErrorMetrics:
    eta_max: float
    eta_ave: float
    phi_max: float
    phi_ave: float
    n_states: int
    zero_amplitudes: int = 0

    def as_row(self) -> dict:
        return {
            "eta_max": self.eta_max,
            "eta_ave": self.eta_ave,
            "phi_max": self.phi_max,
            "phi_ave": self.phi_ave,
        }


@dataclass(frozen=True)
class AmplitudeCloud:
    points: np.ndarray  # shape (D, 2): Re, Im

    @property
    def phases(self) -> np.ndarray:
        return np.arctan2(self.points[:, 1], self.points[:, 0])

    @property
    def radii(self) -> np.ndarray:
        return np.hypot(self.points[:, 0], self.points[:, 1])

    def angular_extent(self) -> float:
        """Spread of the arc, ``max Phi_n - min Phi_n``."""
        ph = self.phases
        return float(ph.max() - ph.min())


@dataclass(frozen=True)
class RK4Result:
    state: np.ndarray
    norm_drift: float
    steps: int


def _as_state(psi0, D: int) -> np.ndarray:
    psi0 = np.asarray(psi0, dtype=complex)
    if psi0.shape != (D,):
        raise DimensionError(f"state has shape {psi0.shape}, expected ({D},)")
    if abs(np.linalg.norm(psi0) - 1.0) > 1e-8:
        raise NormalizationError("initial state is not normalized")
    return psi0


def evolve_spectral(eig: EigenDecomposition, psi0, t: float) -> np.ndarray:
    """``psi(t) = V exp(-i Lambda t) V^dagger psi0``."""
    psi0 = _as_state(psi0, eig.D)
    V = eig.eigenvectors
    coeffs = V.conj().T @ psi0
    return V @ (np.exp(-1j * eig.eigenvalues * t) * coeffs)


def default_rk4_steps(H: HermitianOperator | np.ndarray, t: float) -> int:
    M = H.entries if isinstance(H, HermitianOperator) else np.asarray(H)
    norm = float(np.max(np.sum(np.abs(M), axis=1))) if M.size else 0.0  # bounds ||H||_2
    return max(1000, math.ceil(40 * norm * abs(t)))


def evolve_rk4(H, psi0, t: float, steps: int | None = None) -> RK4Result:
    """Classical RK4 on ``dpsi/dt = -i H psi``; renormalized once at the end."""
    M = H.entries if isinstance(H, HermitianOperator) else np.asarray(H)
    psi = _as_state(psi0, M.shape[0]).copy()
    if steps is None:
        steps = default_rk4_steps(M, t)
    if steps < RK4_MIN_STEPS:
        raise ValidationError(f"steps must be >= {RK4_MIN_STEPS}, got {steps}")
    h = t / steps
    A = -1j * M
    for _ in range(steps):
        k1 = A @ psi
        k2 = A @ (psi + 0.5 * h * k1)
        k3 = A @ (psi + 0.5 * h * k2)
        k4 = A @ (psi + h * k3)
        psi += (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4)
    norm = np.linalg.norm(psi)
    drift = abs(norm - 1.0)
    if drift > RK4_DRIFT_TOL:
        raise StepSizeError(f"RK4 norm drift {drift:.3e} with {steps} steps; increase steps")
    return RK4Result(psi / norm, drift, steps)


def pulse_from_eig(cfg: ChainConfig, eig: EigenDecomposition) -> np.ndarray:
    return evolve_spectral(eig, ground_state_z(build_basis(cfg.L)), cfg.pulse_duration)


def apply_pulse(cfg: ChainConfig) -> np.ndarray:
    """z-basis amplitudes ``A_n`` after a pulse of angle ``cfg.pulse_angle`` on ``|0...0>``."""
    return pulse_from_eig(cfg, eigh(build_hamiltonian(cfg)))


def remove_global_phase(state: np.ndarray) -> np.ndarray:
    """Rotate so that ``sum_n A_n`` is real and positive."""
    total = np.sum(state)
    if total == 0:
        return np.asarray(state)
    return state * np.exp(-1j * np.angle(total))


def principal_phases(state: np.ndarray) -> np.ndarray:
    """Arguments in ``(-pi, pi]``; zero amplitudes get phase 0."""
    ph = np.angle(state)
    ph[ph <= -math.pi] = math.pi
    ph[state == 0] = 0.0
    return ph


def amplitude_errors(state, L: int, *, global_phase: bool = False) -> ErrorMetrics:
    """Amplitude-modulus error ``|2^{-L/2} - |A_n||`` and phase error ``|Phi_n|``."""
    state = np.asarray(state, dtype=complex)
    D = 1 << L
    if state.shape != (D,):
        raise DimensionError(f"state has shape {state.shape}, expected ({D},) for L={L}")
    if global_phase:
        state = remove_global_phase(state)
    eta = np.abs(2.0 ** (-L / 2) - np.abs(state))
    phi = np.abs(principal_phases(state))
    return ErrorMetrics(
        eta_max=float(eta.max()),
        eta_ave=float(eta.mean()),
        phi_max=float(phi.max()),
        phi_ave=float(phi.mean()),
        n_states=D,
        zero_amplitudes=int(np.count_nonzero(state == 0)),
    )


def amplitude_cloud(state) -> AmplitudeCloud:
    state = np.asarray(state, dtype=complex)
    if abs(np.linalg.norm(state) - 1.0) > 1e-8:
        raise NormalizationError("state is not normalized")
    return AmplitudeCloud(np.column_stack([state.real, state.imag]))
