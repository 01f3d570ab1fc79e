"""Nearest-neighbour level-spacing statistics: unfolding, P(s), KS distances.

KS distances are used comparatively only. Spacings of one spectrum are
correlated, so classical KS p-values would be meaningless.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import Polynomial
from scipy import stats

from .errors import ValidationError

MEAN_SPACING = "mean-spacing"
POLY_STAIRCASE = "polynomial-staircase"
METHODS = (MEAN_SPACING, POLY_STAIRCASE)
KINDS = ("poisson", "goe")

MIN_LEVELS = 50
DEFAULT_DEGREE = 7
DEFAULT_EDGE_FRACTION = 0.02


@dataclass(frozen=True)
class UnfoldedSpectrum:
    s_values: np.ndarray
    method: str
    discarded_edges: int
    fallback: bool = False

    @property
    def n(self) -> int:
        return int(self.s_values.size)


@dataclass(frozen=True)
class SpacingHistogram:
    bin_edges: np.ndarray
    densities: np.ndarray
    n_spacings: int
    overflow: int

    @property
    def bin_centers(self) -> np.ndarray:
        return 0.5 * (self.bin_edges[:-1] + self.bin_edges[1:])

    @property
    def integral(self) -> float:
        return float(np.sum(self.densities * np.diff(self.bin_edges)))


def _mean_spacing(levels: np.ndarray) -> np.ndarray:
    gaps = np.diff(levels)
    mean = gaps.mean()
    if mean <= 0:
        raise ValidationError("spectrum is fully degenerate; spacings undefined")
    return gaps / mean


def unfold(
    eigs,
    method: str = POLY_STAIRCASE,
    *,
    degree: int = DEFAULT_DEGREE,
    edge_fraction: float | None = None,
) -> UnfoldedSpectrum:
    """Rescale the spectrum to unit mean spacing and return consecutive spacings.

    ``mean-spacing`` divides raw gaps by their global mean. ``polynomial-staircase``
    fits the counting function N(E) with a polynomial of ``degree`` and takes
    differences of the fitted staircase. ``edge_fraction`` of the levels is
    dropped at each end (defaults: 0 for mean-spacing, 0.02 for the staircase).
    A staircase fit that decreases anywhere in the kept range falls back to
    mean-spacing with ``fallback=True``.
    """
    if method not in METHODS:
        raise ValidationError(f"unknown unfolding method {method!r}; choose from {METHODS}")
    levels = np.sort(np.asarray(eigs, dtype=float))
    if levels.size < MIN_LEVELS:
        raise ValidationError(f"need at least {MIN_LEVELS} levels, got {levels.size}")
    if edge_fraction is None:
        edge_fraction = DEFAULT_EDGE_FRACTION if method == POLY_STAIRCASE else 0.0
    if not 0 <= edge_fraction < 0.5:
        raise ValidationError(f"edge_fraction must lie in [0, 0.5), got {edge_fraction}")
    k = int(edge_fraction * levels.size)
    kept = levels[k : levels.size - k]

    if method == MEAN_SPACING:
        return UnfoldedSpectrum(_mean_spacing(kept), MEAN_SPACING, k)

    counts = np.arange(1, levels.size + 1, dtype=float)
    staircase = Polynomial.fit(levels, counts, degree)
    grid = np.linspace(kept[0], kept[-1], 20 * kept.size)
    if np.any(staircase.deriv()(grid) < 0):
        return UnfoldedSpectrum(_mean_spacing(kept), MEAN_SPACING, k, fallback=True)
    return UnfoldedSpectrum(np.diff(staircase(kept)), POLY_STAIRCASE, k)


def reference_pdf(kind: str, s):
    """Poisson ``exp(-s)`` or GOE Wigner surmise ``(pi s / 2) exp(-pi s^2 / 4)``."""
    s_arr = np.asarray(s, dtype=float)
    if np.any(s_arr < 0):
        raise ValidationError("spacing must be non-negative")
    if kind == "poisson":
        out = np.exp(-s_arr)
    elif kind == "goe":
        out = (math.pi * s_arr / 2) * np.exp(-math.pi * s_arr**2 / 4)
    else:
        raise ValidationError(f"unknown reference {kind!r}; choose from {KINDS}")
    return float(out) if out.ndim == 0 else out


def reference_cdf(kind: str, s):
    s_arr = np.asarray(s, dtype=float)
    if kind == "poisson":
        out = -np.expm1(-np.clip(s_arr, 0, None))
    elif kind == "goe":
        out = -np.expm1(-math.pi * np.clip(s_arr, 0, None) ** 2 / 4)
    else:
        raise ValidationError(f"unknown reference {kind!r}; choose from {KINDS}")
    return float(out) if out.ndim == 0 else out


def sample_reference(kind: str, n: int, rng: np.random.Generator) -> np.ndarray:
    """Inverse-CDF samples from a reference spacing law."""
    u = rng.random(n)
    if kind == "poisson":
        return -np.log1p(-u)
    if kind == "goe":
        return np.sqrt(-4 * np.log1p(-u) / math.pi)
    raise ValidationError(f"unknown reference {kind!r}; choose from {KINDS}")


def _spacings(u) -> np.ndarray:
    return u.s_values if isinstance(u, UnfoldedSpectrum) else np.asarray(u, dtype=float)


def spacing_histogram(u, bins: int = 40, s_max: float = 4.0) -> SpacingHistogram:
    """Histogram on ``[0, s_max]`` normalized by the total spacing count.

    Spacings beyond ``s_max`` land in ``overflow``, so ``integral`` equals
    ``1 - overflow / n_spacings``.
    """
    if bins < 5:
        raise ValidationError(f"bins must be >= 5, got {bins}")
    if not s_max > 0:
        raise ValidationError(f"s_max must be > 0, got {s_max}")
    s = _spacings(u)
    edges = np.linspace(0.0, s_max, bins + 1)
    counts, _ = np.histogram(s, bins=edges)
    n = int(s.size)
    overflow = int(np.count_nonzero(s > s_max))
    dens = counts / (n * np.diff(edges)) if n else np.zeros(bins)
    return SpacingHistogram(edges, dens, n, overflow)


def ks_distance(u, kind: str) -> float:
    """Sup-norm distance between the empirical CDF of spacings and a reference CDF."""
    s = _spacings(u)
    if s.size < MIN_LEVELS:
        raise ValidationError(f"need at least {MIN_LEVELS} spacings, got {s.size}")
    if kind not in KINDS:
        raise ValidationError(f"unknown reference {kind!r}; choose from {KINDS}")
    return float(stats.kstest(s, lambda x: reference_cdf(kind, x)).statistic)


def classify(u) -> dict:
    """KS distance to each reference plus the closer one."""
    d = {kind: ks_distance(u, kind) for kind in KINDS}
    d["label"] = min(KINDS, key=d.__getitem__)
    return d
