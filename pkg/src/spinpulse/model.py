"""Spin-chain parameterization and the rotating-frame Hamiltonian.

Units: hbar = 1, all frequencies in angular units of the Larmor spacing.

Basis convention: index ``n`` in ``[0, 2**L)`` with bit ``k`` of ``n`` the
state of spin ``k`` (spin 0 is the least significant bit). Bit value 0 is
the ``I^z = +1/2`` state.

The Hamiltonian is

    H = sum_k [-delta_k I^z_k + Omega I^y_k] - 2 J sum_{k<L-1} I^z_k I^z_{k+1}

with ``<1|I^y|0> = +i/2``, so an ideal pi/2 pulse sends ``|0>`` to
``(|0> + |1>)/sqrt(2)`` with real positive amplitudes.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import ConfigError, DimensionError, NormalizationError

MAX_QUBITS = 14
REGIME_THRESHOLD = 0.5
NORM_TOL = 1e-8


@dataclass(frozen=True)
class ChainConfig:
    L: int
    J: float
    Omega: float
    detunings: tuple[float, ...]
    pulse_angle: float = math.pi / 2

    def __post_init__(self):
        if int(self.L) != self.L or self.L < 1:
            raise ConfigError(f"L must be an integer >= 1, got {self.L!r}")
        object.__setattr__(self, "L", int(self.L))
        object.__setattr__(self, "detunings", tuple(float(d) for d in self.detunings))
        if len(self.detunings) != self.L:
            raise ConfigError(
                f"detunings has {len(self.detunings)} entries, expected L={self.L}"
            )
        if not self.Omega > 0:
            raise ConfigError(f"Omega must be > 0, got {self.Omega!r}")
        for name in ("J", "Omega", "pulse_angle"):
            if not math.isfinite(getattr(self, name)):
                raise ConfigError(f"{name} must be finite")

    @classmethod
    def centered(cls, L: int, J: float, Omega: float, **kw) -> "ChainConfig":
        """Pulse at the mean Larmor frequency: ``delta_k = k - (L-1)/2``."""
        return cls(L, J, Omega, centered_detunings(L), **kw)

    @classmethod
    def anchored(cls, L: int, J: float, Omega: float, **kw) -> "ChainConfig":
        """Pulse resonant with spin 0: ``delta_k = k``."""
        return cls(L, J, Omega, anchored_detunings(L), **kw)

    def with_omega(self, Omega: float) -> "ChainConfig":
        return ChainConfig(self.L, self.J, Omega, self.detunings, self.pulse_angle)

    @property
    def pulse_duration(self) -> float:
        return self.pulse_angle / self.Omega


def centered_detunings(L: int) -> tuple[float, ...]:
    return tuple(k - (L - 1) / 2 for k in range(L))


def anchored_detunings(L: int) -> tuple[float, ...]:
    return tuple(float(k) for k in range(L))


@dataclass(frozen=True)
class BasisDescriptor:
    """Computational basis of ``L`` spins; bit k of an index is spin k."""

    L: int

    @property
    def D(self) -> int:
        return 1 << self.L

    def bits(self, n: int) -> tuple[int, ...]:
        """Spin states ``(n_0, ..., n_{L-1})`` of basis index ``n``."""
        if not 0 <= n < self.D:
            raise DimensionError(f"index {n} outside [0, {self.D})")
        return tuple((n >> k) & 1 for k in range(self.L))

    def index(self, bits: Sequence[int]) -> int:
        if len(bits) != self.L or any(b not in (0, 1) for b in bits):
            raise DimensionError(f"expected {self.L} bits in {{0, 1}}, got {bits!r}")
        return sum(b << k for k, b in enumerate(bits))

    def label(self, n: int) -> str:
        """Ket label written most significant spin first, as ``|n_{L-1}...n_0>``."""
        return "".join(str(b) for b in reversed(self.bits(n)))


@dataclass(frozen=True)
class HermitianOperator:
    """Dense Hamiltonian matrix plus the parameters it was built from."""

    entries: np.ndarray
    config: ChainConfig | None = field(default=None, compare=False)

    @property
    def D(self) -> int:
        return self.entries.shape[0]

    def hermiticity_defect(self) -> float:
        H = self.entries
        return float(np.max(np.abs(H - H.conj().T))) if H.size else 0.0


@dataclass(frozen=True)
class RegimeReport:
    j_over_min_gap: float | None
    satisfied: dict[str, bool | None]
    notes: list[str]
    threshold: float = REGIME_THRESHOLD

    @property
    def ok(self) -> bool:
        return all(v is not False for v in self.satisfied.values())


def build_basis(L: int) -> BasisDescriptor:
    if int(L) != L or not 1 <= L <= MAX_QUBITS:
        raise DimensionError(
            f"L={L} outside supported range 1..{MAX_QUBITS} (dense D=2^L matrices)"
        )
    return BasisDescriptor(int(L))


def _sz_table(L: int) -> np.ndarray:
    """``sz[k, n]`` = I^z eigenvalue (+-1/2) of spin k in basis state n."""
    n = np.arange(1 << L)
    return 0.5 - ((n[None, :] >> np.arange(L)[:, None]) & 1)


def diagonal_part(cfg: ChainConfig) -> np.ndarray:
    sz = _sz_table(cfg.L)
    diag = -np.asarray(cfg.detunings) @ sz
    if cfg.L > 1:
        diag = diag - 2.0 * cfg.J * np.sum(sz[:-1] * sz[1:], axis=0)
    return diag


def build_hamiltonian(cfg: ChainConfig) -> HermitianOperator:
    basis = build_basis(cfg.L)
    D = basis.D
    H = np.zeros((D, D), dtype=complex)
    H[np.diag_indices(D)] = diagonal_part(cfg)
    n = np.arange(D)
    half = 0.5j * cfg.Omega
    for k in range(cfg.L):
        up = n[((n >> k) & 1) == 0]
        down = up | (1 << k)
        H[down, up] = half  # <1|I^y|0> = +i/2
        H[up, down] = -half
    return HermitianOperator(H, cfg)


def ground_state_z(basis: BasisDescriptor) -> np.ndarray:
    psi = np.zeros(basis.D, dtype=complex)
    psi[0] = 1.0
    return psi


def uniform_state(basis: BasisDescriptor) -> np.ndarray:
    return np.full(basis.D, 2.0 ** (-basis.L / 2), dtype=complex)


# Columns are |0>_{-y}, |1>_{-y} expressed in the z basis.
MINUS_Y_KETS = np.array([[1.0, 1.0], [-1j, 1j]]) / math.sqrt(2)


def _apply_single_spin(state: np.ndarray, L: int, U: np.ndarray) -> np.ndarray:
    # C-order reshape puts spin k on axis L-1-k; the same U acts on every axis.
    t = np.asarray(state, dtype=complex).reshape((2,) * L)
    for axis in range(L):
        t = np.moveaxis(np.tensordot(U, t, axes=([1], [axis])), 0, axis)
    return t.reshape(-1)


def _check_state(state: np.ndarray, basis: BasisDescriptor) -> None:
    if state.shape != (basis.D,):
        raise DimensionError(f"state has shape {state.shape}, expected ({basis.D},)")
    norm = np.linalg.norm(state)
    if abs(norm - 1.0) > NORM_TOL:
        raise NormalizationError(f"state norm {norm:.12g} deviates from 1")


def to_minus_y_representation(state: np.ndarray, basis: BasisDescriptor) -> np.ndarray:
    """Amplitudes ``<a_{-y}|psi>`` in the product basis of I^y eigenstates."""
    state = np.asarray(state, dtype=complex)
    _check_state(state, basis)
    return _apply_single_spin(state, basis.L, MINUS_Y_KETS.conj().T)


def from_minus_y_representation(state: np.ndarray, basis: BasisDescriptor) -> np.ndarray:
    state = np.asarray(state, dtype=complex)
    _check_state(state, basis)
    return _apply_single_spin(state, basis.L, MINUS_Y_KETS)


def check_regime(cfg: ChainConfig, threshold: float = REGIME_THRESHOLD) -> RegimeReport:
    """Advisory check of the weak-coupling regime J << |delta_{k+1} - delta_k|."""
    notes = [
        "Omega << omega_k involves absolute Larmor frequencies, which the "
        "rotating-frame model does not contain; informational only."
    ]
    satisfied: dict[str, bool | None] = {"J_small_vs_spacing": None, "Omega_small_vs_larmor": None}
    if cfg.L < 2:
        notes.append("single spin: coupling/spacing ratio not applicable")
        return RegimeReport(None, satisfied, notes, threshold)
    gap = float(np.min(np.abs(np.diff(cfg.detunings))))
    if gap == 0.0:
        ratio = 0.0 if cfg.J == 0 else math.inf
    else:
        ratio = abs(cfg.J) / gap
    satisfied["J_small_vs_spacing"] = ratio < threshold
    if ratio >= threshold:
        notes.append(
            f"J / min Larmor spacing = {ratio:.4g} >= {threshold}: outside the "
            "quantum-computation regime"
        )
    return RegimeReport(ratio, satisfied, notes, threshold)
