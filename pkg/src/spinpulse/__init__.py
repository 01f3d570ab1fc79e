"""Exact simulation of single-pulse uniform-superposition preparation in an Ising spin chain."""

__version__ = "0.1.0"

from .model import (  # noqa: E402
    BasisDescriptor,
    ChainConfig,
    HermitianOperator,
    build_basis,
    build_hamiltonian,
    check_regime,
    ground_state_z,
    to_minus_y_representation,
)
from .eigensolve import EigenDecomposition, eigh, verify_decomposition  # noqa: E402
from .dynamics import amplitude_cloud, amplitude_errors, apply_pulse, evolve_rk4, evolve_spectral  # noqa: E402

__all__ = [
    "BasisDescriptor", "ChainConfig", "HermitianOperator", "EigenDecomposition",
    "build_basis", "build_hamiltonian", "check_regime", "ground_state_z",
    "to_minus_y_representation", "eigh", "verify_decomposition", "amplitude_cloud",
    "amplitude_errors", "apply_pulse", "evolve_rk4", "evolve_spectral",
]
