"""Closed-form one- and two-spin results, used as oracles for the numerics.

The detuned pair uses the pulse resonant with spin 0, i.e. detunings
``(0, dw)``. The Ising pair has zero detuning.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError

FIRST_ORDER_GUARD = 0.2


@dataclass(frozen=True)
class TwoSpinLevels:
    E0: float
    E1: float
    E1prime: float
    E2: float

    def sorted(self) -> np.ndarray:
        return np.sort([self.E0, self.E1, self.E1prime, self.E2])

    @property
    def central_splitting(self) -> float:
        return self.E1prime - self.E1


def _require_positive(Omega: float) -> None:
    if not Omega > 0:
        raise ValidationError(f"Omega must be > 0, got {Omega!r}")


def _guard(ratio: float, what: str) -> None:
    if abs(ratio) > FIRST_ORDER_GUARD:
        warnings.warn(
            f"|{what}| = {abs(ratio):.3g} > {FIRST_ORDER_GUARD}: first-order formula unreliable",
            stacklevel=3,
        )


def effective_field(Omega: float, delta_omega: float) -> float:
    return math.hypot(Omega, delta_omega)


def detuned_levels(Omega: float, delta_omega: float) -> TwoSpinLevels:
    _require_positive(Omega)
    eff = effective_field(Omega, delta_omega)
    return TwoSpinLevels(
        E0=-(Omega + eff) / 2,
        E1=(Omega - eff) / 2,
        E1prime=(eff - Omega) / 2,
        E2=(Omega + eff) / 2,
    )


def central_splitting_approx(Omega: float, delta_omega: float) -> float:
    _require_positive(Omega)
    return delta_omega**2 / (2 * Omega)


def ising_levels(Omega: float, J: float) -> TwoSpinLevels:
    _require_positive(Omega)
    e0 = -math.hypot(Omega, J / 2)
    return TwoSpinLevels(E0=e0, E1=-J / 2, E1prime=J / 2, E2=-e0)


def single_spin_state_first_order(delta_omega: float, Omega: float, t: float) -> np.ndarray:
    """First order in ``dw/Omega``: z-basis amplitudes of an initially up spin."""
    _require_positive(Omega)
    _guard(delta_omega / Omega, "dw/Omega")
    half = Omega * t / 2
    psi = np.array(
        [math.cos(half) + 1j * (delta_omega / Omega) * math.sin(half), math.sin(half)]
    )
    return psi / np.linalg.norm(psi)


def two_spin_ising_state_first_order(Omega: float, J: float, t: float) -> np.ndarray:
    """Two Ising-coupled spins started in ``|00>_z``, in the -y representation.

    Terms of order ``(J/Omega)**2`` are dropped. Returned amplitudes refer to
    this package's -y kets (see ``model.MINUS_Y_KETS``), indexed like the z
    basis (bit k = spin k). The textbook form of this state labels the
    spin-down -y ket with an extra factor ``-i``; that labeling gives
    coefficients ``(e^{i Omega t}, i e^{iJt/2}, i e^{iJt/2}, -e^{-i Omega t}) / 2``
    and is rephased here by ``(-i)**(number of down spins)``.
    """
    _require_positive(Omega)
    _guard(J / Omega, "J/Omega")
    textbook = 0.5 * np.array(
        [
            np.exp(1j * Omega * t),
            1j * np.exp(1j * J * t / 2),
            1j * np.exp(1j * J * t / 2),
            -np.exp(-1j * Omega * t),
        ]
    )
    rephase = np.array([1, -1j, -1j, -1])
    psi = textbook * rephase
    return psi / np.linalg.norm(psi)


def central_pair_phase(Omega: float, J: float) -> float:
    """Phase picked up by the (|01> + |10>)_{-y} pair at the end of a pi/2 pulse."""
    _require_positive(Omega)
    return math.pi * J / (4 * Omega)
