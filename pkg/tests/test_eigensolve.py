import math

import numpy as np
import pytest

from spinpulse.eigensolve import EigenDecomposition, eigh, eigenvalues, verify_decomposition
from spinpulse.errors import ContractError, DimensionError
from spinpulse.model import ChainConfig, build_hamiltonian
from spinpulse.twospin import detuned_levels


def random_hermitian(rng, D):
    A = rng.normal(size=(D, D)) + 1j * rng.normal(size=(D, D))
    return A + A.conj().T


def test_single_spin_pulse_term():
    eig = eigh(build_hamiltonian(ChainConfig(1, 0.0, 2.0, (0.0,))))
    np.testing.assert_allclose(eig.eigenvalues, [-1, 1], atol=1e-15)


def test_detuned_pair_matches_closed_form():
    dw = 1.0
    eig = eigh(build_hamiltonian(ChainConfig(2, 0.0, 10.0, (0.0, dw))))
    np.testing.assert_allclose(eig.eigenvalues, detuned_levels(10.0, dw).sorted(), atol=1e-12)


def test_symmetric_detuned_pair_is_sum_of_single_spins():
    dw, Om = 1.0, 10.0
    w = eigh(build_hamiltonian(ChainConfig(2, 0.0, Om, (-dw / 2, dw / 2)))).eigenvalues
    h = math.hypot(dw / 2, Om) / 2
    np.testing.assert_allclose(w, [-2 * h, 0, 0, 2 * h], atol=1e-12)


def test_identity_residuals_vanish():
    rep = verify_decomposition(np.eye(8), eigh(np.eye(8)))
    assert max(vars(rep).values()) < 1e-14


def test_random_hermitian_residuals(rng):
    H = random_hermitian(rng, 64)
    eig = eigh(H)
    rep = verify_decomposition(H, eig)
    spec = np.linalg.norm(H, 2)
    assert rep.max_residual <= 1e-10 * spec
    assert rep.max_orthogonality_defect <= 1e-10
    assert eig.residual_norm <= 1e-9 * np.abs(eig.eigenvalues).max()
    assert np.all(np.diff(eig.eigenvalues) >= 0)
    assert abs(eig.eigenvalues.sum() - np.trace(H).real) <= 1e-9 * np.abs(H).sum()
    assert abs(np.sum(eig.eigenvalues**2) - np.linalg.norm(H, "fro") ** 2) <= 1e-9 * np.linalg.norm(H, "fro") ** 2


def test_corrupted_eigenvector_shows_in_reconstruction():
    lam = np.array([1.0, 2.0, 3.0, 4.0])
    H = np.diag(lam).astype(complex)
    eig = eigh(H)
    V = eig.eigenvectors.copy()
    V[:, 2] = 0
    rep = verify_decomposition(H, EigenDecomposition(eig.eigenvalues, V, 0.0))
    assert rep.reconstruction_error == pytest.approx(abs(lam[2]), abs=1e-14)


def test_non_hermitian_rejected():
    with pytest.raises(ContractError):
        eigh(np.array([[0, 1], [0, 0]], dtype=complex))


def test_dimension_mismatch():
    eig = eigh(np.eye(2))
    with pytest.raises(DimensionError):
        verify_decomposition(np.eye(3), eig)


def test_free_chain_multiplicities():
    L, Om = 6, 3.0
    w = eigenvalues(build_hamiltonian(ChainConfig(L, 0.0, Om, (0.0,) * L)))
    expected = np.sort(np.concatenate([[(m - L / 2) * Om] * math.comb(L, m) for m in range(L + 1)]))
    np.testing.assert_allclose(w, expected, atol=1e-10 * Om)


def test_spin_relabeling_preserves_spectrum(rng):
    d = rng.normal(size=5)
    w1 = eigenvalues(build_hamiltonian(ChainConfig(5, 0.3, 2.0, tuple(d))))
    w2 = eigenvalues(build_hamiltonian(ChainConfig(5, 0.3, 2.0, tuple(d[::-1]))))
    np.testing.assert_allclose(w1, w2, atol=1e-10)


def test_deterministic(rng):
    H = random_hermitian(rng, 32)
    a, b = eigh(H), eigh(H)
    np.testing.assert_array_equal(a.eigenvalues, b.eigenvalues)
    np.testing.assert_array_equal(a.eigenvectors, b.eigenvectors)


@pytest.mark.slow
def test_reference_chain_clusters_at_large_omega():
    L, Om = 10, 1e4
    w = eigenvalues(build_hamiltonian(ChainConfig.centered(L, 0.1, Om)))
    centers = np.round(w / Om + L / 2).astype(int)
    assert np.all(np.abs(w - (centers - L / 2) * Om) < 0.01 * Om)
    sizes = np.bincount(centers, minlength=L + 1)
    assert list(sizes) == [1, 10, 45, 120, 210, 252, 210, 120, 45, 10, 1]
