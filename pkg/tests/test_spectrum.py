import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spinpulse.eigensolve import eigenvalues
from spinpulse.errors import DimensionError, ValidationError
from spinpulse.model import ChainConfig, build_hamiltonian
from spinpulse.spectrum import (
    band_report,
    band_strip,
    band_width_sweep,
    fit_power_law,
    group_bands,
    group_by_gaps,
)


def test_group_bands_two_spin():
    bands = group_bands([-10, -0.05, 0.05, 10], 2)
    assert [b.expected_count for b in bands] == [1, 2, 1]
    np.testing.assert_allclose([b.width for b in bands], [0, 0.1, 0], atol=1e-15)


def test_group_bands_free_chain():
    L, Om = 10, 50.0
    bands = group_bands(eigenvalues(build_hamiltonian(ChainConfig(L, 0.0, Om, (0.0,) * L))), L)
    assert len(bands) == 11
    np.testing.assert_allclose([b.width for b in bands], 0, atol=1e-9)
    np.testing.assert_allclose([b.center for b in bands], [(m - 5) * Om for m in range(11)], atol=1e-9)
    assert sum(b.expected_count for b in bands) == 1024


def test_group_bands_errors():
    with pytest.raises(DimensionError):
        group_bands([0, 1, 2], 2)
    with pytest.raises(ValidationError):
        group_bands([1, 0, 2, 3], 2)


def test_overlap_flag():
    assert band_report([-1, 0, 0.5, 1], 2, 1.0).overlap_flag is False
    assert band_report([-1, -1, 0.5, 1], 2, 1.0).overlap_flag is True


@pytest.mark.parametrize("L,Omega", [(4, 500.0), (6, 1000.0), (10, 500.0)])
def test_binomial_grouping_agrees_with_gap_clustering(L, Omega):
    cfg = ChainConfig.centered(L, 0.1, Omega)
    assert Omega >= 10 * (L * max(abs(d) for d in cfg.detunings) + cfg.J)
    w = eigenvalues(build_hamiltonian(cfg))
    by_gaps = group_by_gaps(w, L)
    bands = group_bands(w, L)
    assert [len(g) for g in by_gaps] == [b.expected_count for b in bands]
    assert all(g[0] == b.e_min and g[-1] == b.e_max for g, b in zip(by_gaps, bands))


def test_fit_power_law_exact():
    x = np.array([10.0, 100.0, 1000.0])
    f = fit_power_law(x, 7 / x)
    assert f.exponent == pytest.approx(-1, abs=1e-12)
    assert f.coefficient == pytest.approx(7, rel=1e-12)
    assert f.r_squared == pytest.approx(1) and f.n_points == 3
    g = fit_power_law(x, 3 / x**2)
    assert g.exponent == pytest.approx(-2, abs=1e-12) and g.coefficient == pytest.approx(3, rel=1e-12)


def test_fit_power_law_domain():
    with pytest.raises(ValidationError):
        fit_power_law([1, 2, 3], [1, 0, 1])
    with pytest.raises(ValidationError):
        fit_power_law([1, 2], [1, 2])


@settings(max_examples=40, deadline=None)
@given(
    st.floats(-3, 3), st.floats(1e-3, 1e3), st.floats(1e-3, 1e3),
    st.lists(st.floats(-0.1, 0.1), min_size=6, max_size=6),
)
def test_fit_scale_equivariance(p, a, c, noise):
    x = np.geomspace(1, 1e3, 6)
    y = a * x**p * np.exp(noise)
    f1, f2 = fit_power_law(x, y), fit_power_law(x, c * y)
    assert f2.exponent == pytest.approx(f1.exponent, abs=1e-12)
    assert f2.coefficient == pytest.approx(c * f1.coefficient, rel=1e-12)
    assert 0 <= f1.r_squared <= 1


def test_sweep_small_chain_ordering_and_jobs():
    cfg = ChainConfig.centered(4, 0.1, 1.0)
    grid = np.geomspace(10, 1000, 5)
    serial = band_width_sweep(cfg, grid)
    threaded = band_width_sweep(cfg, grid, jobs=3)
    assert [r.omega for r in serial] == list(grid)
    for a, b in zip(serial, threaded):
        np.testing.assert_array_equal(a.band_widths, b.band_widths)
        assert a.error_metrics == b.error_metrics
    central = [r.band_widths[2] for r in serial]
    assert all(w >= cfg.J for w in central)


def test_sweep_rejects_bad_grid():
    with pytest.raises(ValidationError):
        band_width_sweep(ChainConfig.centered(2, 0.0, 1.0), [10, 5])


def test_central_width_decreasing_without_coupling():
    grid = np.geomspace(100, 1e4, 6)
    recs = band_width_sweep(ChainConfig.centered(6, 0.0, 1.0), grid)
    widths = [r.band_widths[3] for r in recs]
    assert all(a > b for a, b in zip(widths, widths[1:]))


def test_strip_free_chain_single_line():
    pairs = band_strip(ChainConfig(4, 0.0, 1.0, (0.0,) * 4), [10.0, 100.0], 2, (-1.0, 1.0))
    assert len(pairs) == 2 * 6
    assert max(abs(e) for _, e in pairs) < 1e-9


def test_strip_two_spin_ising_lines():
    J = 0.1
    pairs = band_strip(ChainConfig(2, J, 1.0, (0.0, 0.0)), [10.0, 100.0, 1000.0], 1, (-1.0, 1.0))
    for om in (10.0, 100.0, 1000.0):
        offs = sorted(e for o, e in pairs if o == om)
        np.testing.assert_allclose(offs, [-J / 2, J / 2], atol=1e-9)


def test_strip_errors():
    with pytest.raises(ValidationError):
        band_strip(ChainConfig.centered(2, 0.0, 1.0), [1.0], 3, (-1, 1))
    with pytest.raises(ValidationError):
        band_strip(ChainConfig.centered(2, 0.0, 1.0), [1.0], 1, (1, -1))


@pytest.mark.slow
def test_reference_strip_counts_constant():
    pairs = band_strip(ChainConfig.centered(10, 0.1, 1.0), [100.0, 1000.0], 5, (-10.0, 10.0))
    counts = [sum(1 for o, _ in pairs if o == om) for om in (100.0, 1000.0)]
    assert counts == [252, 252]
