"""Dense Hermitian eigendecomposition with residual checks.

LAPACK (via ``scipy.linalg.eigh``) does the work; this module owns the
contract: Hermiticity precheck, ascending eigenvalues, and the residuals
used as acceptance bounds downstream.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import ContractError, DimensionError, SolverError
from .model import HermitianOperator

HERMITIAN_RTOL = 1e-12
ORTHO_TOL = 1e-10
RESIDUAL_RTOL = 1e-9


@dataclass(frozen=True)
class EigenDecomposition:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    residual_norm: float

    @property
    def D(self) -> int:
        return self.eigenvalues.shape[0]


@dataclass(frozen=True)
class ResidualReport:
    max_residual: float
    max_orthogonality_defect: float
    reconstruction_error: float

    def within(self, scale: float) -> bool:
        """True when all residuals meet the module tolerances for a spectrum of size ``scale``."""
        scale = max(scale, 1.0)
        return (
            self.max_residual <= RESIDUAL_RTOL * scale
            and self.max_orthogonality_defect <= ORTHO_TOL
            and self.reconstruction_error <= RESIDUAL_RTOL * scale
        )


def _matrix(H) -> np.ndarray:
    M = H.entries if isinstance(H, HermitianOperator) else np.asarray(H)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {M.shape}")
    return M


def _check_hermitian(M: np.ndarray) -> None:
    if M.size == 0:
        return
    scale = float(np.max(np.abs(M)))
    defect = float(np.max(np.abs(M - M.conj().T)))
    if defect > HERMITIAN_RTOL * scale:
        raise ContractError(f"matrix is not Hermitian: max|H - H^dagger| = {defect:.3e}")


def _residuals(M: np.ndarray, w: np.ndarray, V: np.ndarray) -> np.ndarray:
    return np.linalg.norm(M @ V - V * w, axis=0)


def eigh(H) -> EigenDecomposition:
    """Full spectral decomposition, eigenvalues ascending."""
    M = _matrix(H)
    _check_hermitian(M)
    try:
        w, V = scipy.linalg.eigh(M, driver="evd")
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError) as exc:
        raise SolverError(f"eigh failed for D={M.shape[0]}: {exc}") from exc
    res = float(np.max(_residuals(M, w, V))) if w.size else 0.0
    return EigenDecomposition(w, V, res)


def eigenvalues(H) -> np.ndarray:
    """Eigenvalues only (still the full spectrum), ascending."""
    M = _matrix(H)
    _check_hermitian(M)
    try:
        return scipy.linalg.eigh(M, eigvals_only=True, driver="evd")
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError) as exc:
        raise SolverError(f"eigvalsh failed for D={M.shape[0]}: {exc}") from exc


def verify_decomposition(H, eig: EigenDecomposition) -> ResidualReport:
    M = _matrix(H)
    w, V = eig.eigenvalues, eig.eigenvectors
    if V.shape != M.shape or w.shape != (M.shape[0],):
        raise DimensionError(
            f"decomposition shapes {w.shape}, {V.shape} do not match operator {M.shape}"
        )
    if M.size == 0:
        return ResidualReport(0.0, 0.0, 0.0)
    res = float(np.max(_residuals(M, w, V)))
    ortho = float(np.max(np.abs(V.conj().T @ V - np.eye(M.shape[0]))))
    recon = float(np.max(np.abs((V * w) @ V.conj().T - M)))
    return ResidualReport(res, ortho, recon)
