import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from spinpulse import levelstats as ls
from spinpulse.errors import ValidationError


def brute_ks(s, cdf):
    """Sup-distance of the empirical CDF, checked on both sides of every jump."""
    s = np.sort(s)
    n = s.size
    F = np.array([cdf(x) for x in s])
    above = np.arange(1, n + 1) / n - F
    below = F - np.arange(n) / n
    return max(above.max(), below.max())


def goe_spectrum(rng, D=400):
    A = rng.normal(size=(D, D))
    return np.linalg.eigvalsh((A + A.T) / 2)


@pytest.mark.parametrize("method", ls.METHODS)
def test_ladder_unit_spacings(method):
    u = ls.unfold(np.arange(200.0) * 0.37 - 5, method)
    np.testing.assert_allclose(u.s_values, 1.0, atol=1e-8)


def test_unfold_validation():
    with pytest.raises(ValidationError):
        ls.unfold(np.arange(10.0))
    with pytest.raises(ValidationError):
        ls.unfold(np.arange(100.0), "bogus")


@pytest.mark.parametrize("method", ls.METHODS)
@pytest.mark.parametrize("c", [1e-3, 2.5, 1e4])
def test_unfold_scale_invariance(method, c, rng):
    w = goe_spectrum(rng)
    a = ls.unfold(w, method).s_values
    b = ls.unfold(c * w, method).s_values
    np.testing.assert_allclose(a, b, atol=1e-10)


def test_unfold_mean_and_sign(rng):
    u = ls.unfold(goe_spectrum(rng))
    assert u.method == ls.POLY_STAIRCASE and not u.fallback
    assert abs(u.s_values.mean() - 1) < 0.02
    assert np.all(u.s_values >= 0)
    assert u.discarded_edges == 8


def test_degeneracies_retained():
    w = np.repeat(np.arange(60.0), 2)
    u = ls.unfold(w, ls.MEAN_SPACING)
    assert u.n == w.size - 1
    assert np.count_nonzero(u.s_values == 0) == 60


def test_poisson_process_unfolds_to_exponential(rng):
    levels = np.cumsum(rng.exponential(size=4001))
    u = ls.unfold(levels, ls.POLY_STAIRCASE, edge_fraction=0.0)
    assert ls.ks_distance(u, "poisson") < 0.03


def test_reference_pdf_values():
    assert ls.reference_pdf("poisson", 0) == 1
    assert ls.reference_pdf("goe", 0) == 0
    with pytest.raises(ValidationError):
        ls.reference_pdf("goe", -1)


@pytest.mark.parametrize("kind", ls.KINDS)
def test_reference_pdf_normalization_and_mean(kind):
    norm, _ = integrate.quad(lambda s: ls.reference_pdf(kind, s), 0, np.inf, epsabs=1e-12)
    mean, _ = integrate.quad(lambda s: s * ls.reference_pdf(kind, s), 0, np.inf, epsabs=1e-12)
    assert norm == pytest.approx(1, abs=1e-8)
    assert mean == pytest.approx(1, abs=1e-8)


@pytest.mark.parametrize("kind", ls.KINDS)
def test_reference_cdf_is_integral_of_pdf(kind):
    for s in (0.3, 1.0, 2.7):
        val, _ = integrate.quad(lambda x: ls.reference_pdf(kind, x), 0, s)
        assert ls.reference_cdf(kind, s) == pytest.approx(val, abs=1e-12)


def test_histogram_single_bin():
    h = ls.spacing_histogram(np.ones(100), bins=10, s_max=2)
    assert np.count_nonzero(h.densities) == 1
    k = int(np.flatnonzero(h.densities)[0])
    assert h.bin_edges[k] <= 1 < h.bin_edges[k + 1]
    assert h.densities[k] == pytest.approx(1 / 0.2)
    assert h.integral == pytest.approx(1, abs=1e-9)


def test_histogram_overflow_accounting(rng):
    s = rng.exponential(size=5000)
    h = ls.spacing_histogram(s, bins=40, s_max=4)
    assert h.overflow == np.count_nonzero(s > 4)
    assert h.integral + h.overflow / h.n_spacings == pytest.approx(1, abs=1e-9)
    with pytest.raises(ValidationError):
        ls.spacing_histogram(s, bins=4)


def test_histogram_matches_poisson_within_3_sigma(rng):
    n = 4000
    h = ls.spacing_histogram(rng.exponential(size=n), bins=20, s_max=4)
    width = np.diff(h.bin_edges)
    p = np.exp(-h.bin_edges[:-1]) - np.exp(-h.bin_edges[1:])
    sigma = np.sqrt(n * p * (1 - p)) / (n * width)
    assert np.all(np.abs(h.densities - p / width) <= 3 * sigma)


@pytest.mark.parametrize("kind", ls.KINDS)
def test_ks_matches_brute_force(kind, rng):
    s = rng.exponential(size=300)
    assert ls.ks_distance(s, kind) == pytest.approx(brute_ks(s, lambda x: ls.reference_cdf(kind, x)), abs=1e-14)


def test_ks_self_tests():
    rng = np.random.default_rng(7)
    goe = ls.sample_reference("goe", 4000, rng)
    assert ls.ks_distance(goe, "goe") < 0.03
    assert ls.ks_distance(goe, "poisson") > 0.15
    poi = ls.sample_reference("poisson", 4000, rng)
    assert ls.ks_distance(poi, "poisson") < 0.03
    assert ls.classify(goe)["label"] == "goe"
    assert ls.classify(poi)["label"] == "poisson"
    with pytest.raises(ValidationError):
        ls.ks_distance(goe[:10], "goe")


@settings(max_examples=25, deadline=None)
@given(st.lists(st.floats(0, 50), min_size=50, max_size=200))
def test_ks_bounded(s):
    for kind in ls.KINDS:
        assert 0 <= ls.ks_distance(np.array(s), kind) <= 1


def test_goe_matrix_spectrum_classified_goe(rng):
    u = ls.unfold(goe_spectrum(rng, 800))
    assert ls.ks_distance(u, "goe") < ls.ks_distance(u, "poisson")


def test_non_monotone_staircase_falls_back():
    w = np.concatenate([np.linspace(0, 1, 100), np.linspace(1000, 1001, 100)])
    u = ls.unfold(w)
    assert u.fallback and u.method == ls.MEAN_SPACING
