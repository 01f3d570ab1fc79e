"""Config parsing and deterministic CSV / JSON / gnuplot output."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np

from .errors import ConfigError, SpinPulseError
from .model import ChainConfig, anchored_detunings, centered_detunings

DETUNING_MODES = ("centered", "anchored", "explicit")
CONFIG_KEYS = {
    "L", "J", "omega", "omega_grid", "detuning_mode", "detunings", "pulse_angle", "seed",
}
DEFAULT_SEED = 20240101


class OutputError(SpinPulseError, OSError):
    """Writing an output file failed."""


@dataclass
class RunConfig:
    chain: ChainConfig
    omega_grid: np.ndarray | None = None
    detuning_mode: str = "centered"
    seed: int = DEFAULT_SEED


@dataclass
class RunManifest:
    command: str
    config: dict
    omega_grid: list[float] | None
    output_dir: str
    version: str
    seed: int
    duration_s: float = 0.0
    extra: dict = field(default_factory=dict)


def _number(key: str, value: str) -> float:
    try:
        x = float(value)
    except ValueError:
        raise ConfigError(f"{key}: expected a number, got {value!r}") from None
    if not math.isfinite(x):
        raise ConfigError(f"{key}: value must be finite, got {value!r}")
    return x


def _integer(key: str, value: str) -> int:
    x = _number(key, value)
    if x != int(x):
        raise ConfigError(f"{key}: expected an integer, got {value!r}")
    return int(x)


def parse_grid(text: str) -> np.ndarray:
    """``lo:hi:n`` for a geometric grid, or a comma-separated list."""
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ConfigError(f"omega_grid: expected lo:hi:n, got {text!r}")
        lo, hi = _number("omega_grid", parts[0]), _number("omega_grid", parts[1])
        n = _integer("omega_grid", parts[2])
        if lo <= 0 or hi < lo or n < 1:
            raise ConfigError(f"omega_grid: need 0 < lo <= hi and n >= 1, got {text!r}")
        return np.geomspace(lo, hi, n)
    grid = np.array([_number("omega_grid", p) for p in text.split(",") if p.strip()])
    if grid.size == 0 or np.any(grid <= 0) or np.any(np.diff(grid) <= 0):
        raise ConfigError(f"omega_grid: values must be positive and ascending, got {text!r}")
    return grid


def make_detunings(mode: str, L: int, explicit: Sequence[float] | None = None) -> tuple[float, ...]:
    if mode == "centered":
        return centered_detunings(L)
    if mode == "anchored":
        return anchored_detunings(L)
    if mode == "explicit":
        if explicit is None:
            raise ConfigError("detuning_mode=explicit requires a detunings list")
        if len(explicit) != L:
            raise ConfigError(f"detunings has {len(explicit)} entries, expected L={L}")
        return tuple(float(d) for d in explicit)
    raise ConfigError(f"detuning_mode must be one of {DETUNING_MODES}, got {mode!r}")


def parse_config_text(text: str) -> RunConfig:
    raw: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value, got {line!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in CONFIG_KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        raw[key] = value
    if "L" not in raw:
        raise ConfigError("missing required key 'L'")

    L = _integer("L", raw["L"])
    mode = raw.get("detuning_mode", "explicit" if "detunings" in raw else "centered")
    explicit = None
    if "detunings" in raw:
        explicit = [_number("detunings", p) for p in raw["detunings"].split(",") if p.strip()]
    kwargs: dict[str, Any] = {}
    if "pulse_angle" in raw:
        kwargs["pulse_angle"] = _number("pulse_angle", raw["pulse_angle"])
    chain = ChainConfig(
        L=L,
        J=_number("J", raw.get("J", "0")),
        Omega=_number("omega", raw.get("omega", "100")),
        detunings=make_detunings(mode, L, explicit),
        **kwargs,
    )
    grid = parse_grid(raw["omega_grid"]) if "omega_grid" in raw else None
    seed = _integer("seed", raw["seed"]) if "seed" in raw else DEFAULT_SEED
    return RunConfig(chain, grid, mode, seed)


def parse_config(path: str | Path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    try:
        return parse_config_text(text)
    except ConfigError as exc:
        raise ConfigError(f"{path}: {exc}") from None


def render(x) -> str:
    """CSV field text; floats use 17 significant digits so they round-trip."""
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.17g}"
    return str(x)


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    lines = [",".join(header)]
    for row in rows:
        if len(row) != len(header):
            raise OutputError(f"{path}: row has {len(row)} fields, header has {len(header)}")
        lines.append(",".join(render(v) for v in row))
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text("\n".join(lines) + "\n")
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc.strerror}") from None
    return path


def read_csv(path: Path) -> tuple[list[str], list[list[str]]]:
    lines = Path(path).read_text().splitlines()
    return lines[0].split(","), [ln.split(",") for ln in lines[1:]]


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else str(x)
    return obj


def write_json(path: Path, payload: dict) -> Path:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(_jsonable(payload), indent=2, sort_keys=True) + "\n")
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc.strerror}") from None
    return path


def chain_to_dict(cfg: ChainConfig) -> dict:
    return {
        "L": cfg.L,
        "J": cfg.J,
        "Omega": cfg.Omega,
        "detunings": list(cfg.detunings),
        "pulse_angle": cfg.pulse_angle,
    }


def write_text(path: Path, text: str) -> Path:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc.strerror}") from None
    return path


# gnuplot scripts reference their CSVs by relative path; run them from the output dir.

_GP_HEAD = """set datafile separator ','
set terminal pngcairo size 800,600
set key autotitle columnhead
"""

GNUPLOT = {
    "spectrum": _GP_HEAD + """set output 'spectrum.png'
set xlabel 'Omega'; set ylabel 'E'
plot 'bands.csv' using 1:3 with points pt 7 ps 0.6 title 'band min', \\
     'bands.csv' using 1:4 with points pt 6 ps 0.6 title 'band max'
""",
    "strip": _GP_HEAD + """set output 'strip.png'
set logscale x
set xlabel 'Omega'; set ylabel 'E - band center'
plot 'strip.csv' using 1:2 with dots title 'levels'
""",
    "bandwidths": _GP_HEAD + """set output 'bandwidths.png'
set logscale xy
set xlabel 'Omega'; set ylabel 'band width'
plot 'sweep.csv' using 1:'width_m5' with points pt 6 title 'central band', \\
     'sweep.csv' using 1:'width_m3' with points pt 2 title '4th band'
""",
    "amplitude_errors": _GP_HEAD + """set output 'amplitude_errors.png'
set logscale xy
set xlabel 'Omega'; set ylabel 'eta'
plot 'sweep.csv' using 1:'eta_max' with points pt 6 title 'max', \\
     'sweep.csv' using 1:'eta_ave' with points pt 7 title 'average'
""",
    "phase_errors": _GP_HEAD + """set output 'phase_errors.png'
set logscale xy
set xlabel 'Omega'; set ylabel '|Phi|'
plot 'sweep.csv' using 1:'phi_max' with points pt 6 title 'max', \\
     'sweep.csv' using 1:'phi_ave' with points pt 7 title 'average'
""",
    "amplitudes": _GP_HEAD + """set output 'amplitudes.png'
set xlabel 'Re A_n'; set ylabel 'Im A_n'
plot 'amplitudes.csv' using 2:3 with points pt 7 ps 0.4 title 'A_n'
""",
    "pofs": _GP_HEAD + """set output 'pofs.png'
set xlabel 's'; set ylabel 'P(s)'
plot 'pofs.csv' using 1:2 with boxes title 'histogram', \\
     'pofs.csv' using 1:3 with lines lt 1 title 'Poisson exp(-s)', \\
     'pofs.csv' using 1:4 with lines dt 2 title 'GOE surmise'
""",
}

# Default data file each script reads.
GNUPLOT_DATA = {
    "spectrum": "bands.csv",
    "strip": "strip.csv",
    "bandwidths": "sweep.csv",
    "amplitude_errors": "sweep.csv",
    "phase_errors": "sweep.csv",
    "amplitudes": "amplitudes.csv",
    "pofs": "pofs.csv",
}


def gnuplot_script(kind: str, data: str | None = None) -> tuple[str, str]:
    """Script text and file name for plot ``kind``, optionally reading ``data`` instead of the default CSV."""
    text = GNUPLOT[kind]
    if data is None:
        return text, f"{kind}.gp"
    stem = data.rsplit(".", 1)[0]
    text = text.replace(f"'{GNUPLOT_DATA[kind]}'", f"'{data}'").replace(f"'{kind}.png'", f"'{stem}_{kind}.png'")
    return text, f"{stem}_{kind}.gp"
