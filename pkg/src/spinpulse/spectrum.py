"""Band structure of the pulse Hamiltonian, Omega sweeps and power-law fits.

Without coupling and detuning the spectrum is ``L+1`` levels ``(m - L/2) Omega``
of multiplicity ``C(L, m)``. Detunings and J split each level into a band;
bands are identified by sorted position, which is exact while they do not
overlap.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import stats

from .dynamics import ErrorMetrics, amplitude_errors, pulse_from_eig
from .eigensolve import eigenvalues, eigh
from .errors import DimensionError, ValidationError
from .model import ChainConfig, build_hamiltonian

CENTRAL_BAND_L10 = 5  # the "6th" of 11 bands, counted from 1
FOURTH_BAND_L10 = 3


@dataclass(frozen=True)
class Band:
    m: int
    expected_count: int
    e_min: float
    e_max: float

    @property
    def width(self) -> float:
        return self.e_max - self.e_min

    @property
    def center(self) -> float:
        return (self.e_max + self.e_min) / 2


@dataclass(frozen=True)
class BandReport:
    omega: float
    bands: list[Band]
    overlap_flag: bool

    @property
    def widths(self) -> np.ndarray:
        return np.array([b.width for b in self.bands])


@dataclass(frozen=True)
class PowerLawFit:
    exponent: float
    coefficient: float
    r_squared: float
    n_points: int

    def __call__(self, x):
        return self.coefficient * np.asarray(x, dtype=float) ** self.exponent


@dataclass(frozen=True)
class SweepRecord:
    omega: float
    band_widths: np.ndarray
    error_metrics: ErrorMetrics
    overlap_flag: bool = False
    max_residual: float = 0.0
    norm_defect: float = 0.0


def band_sizes(L: int) -> list[int]:
    return [math.comb(L, m) for m in range(L + 1)]


def _check_spectrum(eigs, L: int) -> np.ndarray:
    eigs = np.asarray(eigs, dtype=float)
    if eigs.shape != (1 << L,):
        raise DimensionError(f"expected {1 << L} eigenvalues for L={L}, got {eigs.shape}")
    if np.any(np.diff(eigs) < 0):
        raise ValidationError("eigenvalues must be sorted ascending")
    return eigs


def group_bands(eigs, L: int) -> list[Band]:
    """Split the sorted spectrum into consecutive runs of ``C(L, m)`` levels."""
    eigs = _check_spectrum(eigs, L)
    edges = np.cumsum([0] + band_sizes(L))
    return [
        Band(m, int(edges[m + 1] - edges[m]), float(eigs[edges[m]]), float(eigs[edges[m + 1] - 1]))
        for m in range(L + 1)
    ]


def bands_overlap(bands: Sequence[Band]) -> bool:
    return any(a.e_max >= b.e_min for a, b in zip(bands, bands[1:]))


def band_report(eigs, L: int, omega: float) -> BandReport:
    bands = group_bands(eigs, L)
    return BandReport(omega, bands, bands_overlap(bands))


def group_by_gaps(eigs, L: int) -> list[np.ndarray]:
    """Alternative partition: cut the sorted spectrum at its ``L`` largest gaps."""
    eigs = _check_spectrum(eigs, L)
    cuts = np.sort(np.argsort(np.diff(eigs))[-L:]) + 1 if L else np.array([], dtype=int)
    return np.split(eigs, cuts)


def fit_power_law(x, y) -> PowerLawFit:
    """Least squares of ``log y`` on ``log x``: ``y ~ coefficient * x**exponent``."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ValidationError("x and y must be 1-D arrays of equal length")
    if x.size < 3:
        raise ValidationError(f"need at least 3 points, got {x.size}")
    if np.any(x <= 0) or np.any(y <= 0):
        raise ValidationError("power-law fit requires strictly positive data")
    res = stats.linregress(np.log(x), np.log(y))
    r2 = min(1.0, max(0.0, float(res.rvalue) ** 2))
    return PowerLawFit(float(res.slope), float(np.exp(res.intercept)), r2, int(x.size))


def default_omega_grid(n: int = 16, lo: float = 1e2, hi: float = 1e4) -> np.ndarray:
    return np.geomspace(lo, hi, n)


def _check_grid(omega_grid) -> np.ndarray:
    grid = np.asarray(omega_grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise ValidationError("omega grid must be a non-empty 1-D sequence")
    if np.any(grid <= 0) or np.any(np.diff(grid) <= 0):
        raise ValidationError("omega grid must be positive and strictly ascending")
    return grid


def sweep_point(cfg: ChainConfig, global_phase: bool = False) -> SweepRecord:
    H = build_hamiltonian(cfg)
    eig = eigh(H)
    report = band_report(eig.eigenvalues, cfg.L, cfg.Omega)
    state = pulse_from_eig(cfg, eig)
    return SweepRecord(
        omega=cfg.Omega,
        band_widths=report.widths,
        error_metrics=amplitude_errors(state, cfg.L, global_phase=global_phase),
        overlap_flag=report.overlap_flag,
        max_residual=eig.residual_norm,
        norm_defect=abs(float(np.linalg.norm(state)) - 1.0),
    )


def band_width_sweep(
    cfg_template: ChainConfig, omega_grid, *, jobs: int = 1, global_phase: bool = False
) -> list[SweepRecord]:
    """One record per Omega (ascending); points are independent and may run in threads."""
    grid = _check_grid(omega_grid)
    cfgs = [cfg_template.with_omega(float(om)) for om in grid]
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(lambda c: sweep_point(c, global_phase), cfgs))
    return [sweep_point(c, global_phase) for c in cfgs]


def band_strip(
    cfg_template: ChainConfig, omega_grid, m: int, e_window: tuple[float, float]
) -> list[tuple[float, float]]:
    """Levels of band ``m`` relative to the band center, restricted to ``e_window``."""
    grid = _check_grid(omega_grid)
    if not 0 <= m <= cfg_template.L:
        raise ValidationError(f"band index m={m} outside [0, {cfg_template.L}]")
    lo, hi = e_window
    if not (math.isfinite(lo) and math.isfinite(hi)) or lo > hi:
        raise ValidationError(f"invalid energy window {e_window!r}")
    edges = np.cumsum([0] + band_sizes(cfg_template.L))
    out: list[tuple[float, float]] = []
    for om in grid:
        w = eigenvalues(build_hamiltonian(cfg_template.with_omega(float(om))))
        band = w[edges[m] : edges[m + 1]]
        offsets = band - (band[0] + band[-1]) / 2
        out.extend((float(om), float(e)) for e in offsets if lo <= e <= hi)
    return out
