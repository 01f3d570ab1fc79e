"""Command-line front end.

Every command writes its CSV tables, ``summary.json`` (including the
tolerance checks) and ``manifest.json`` into ``--out``. Exit codes: 0 on
success, 1 on invalid input, 2 on numerical failure or a failed check.
"""
from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__, io, levelstats, pipelines
from .eigensolve import eigenvalues
from .errors import NumericalError, SpinPulseError, ValidationError
from .model import ChainConfig, build_hamiltonian
from .spectrum import band_sizes, default_omega_grid

EXIT_OK, EXIT_INVALID, EXIT_NUMERICAL = 0, 1, 2

COMMANDS = (
    "spectrum", "strip", "sweep", "pulse-errors", "amplitudes",
    "level-stats", "two-spin-check", "paper-repro",
)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise ValidationError(message)


def _pair(text: str) -> tuple[float, float]:
    try:
        lo, hi = (float(p) for p in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected lo,hi, got {text!r}") from None
    return lo, hi


def _chain_options(p: argparse.ArgumentParser, grid: bool = False) -> None:
    g = p.add_argument_group("chain")
    g.add_argument("--config", type=Path, help="key=value config file; flags override it")
    g.add_argument("--L", type=int, help="number of spins (default 10)")
    g.add_argument("--J", type=float, help="Ising constant (default 0.1)")
    g.add_argument("--omega", type=float, help="Rabi frequency (default 100)")
    g.add_argument("--detuning-mode", choices=io.DETUNING_MODES)
    g.add_argument("--detunings", help="comma-separated list for --detuning-mode explicit")
    g.add_argument("--pulse-angle", type=float)
    if grid:
        g.add_argument("--omega-grid", help="lo:hi:n (geometric) or comma list; default 100:10000:16")


def _common_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", type=Path, help="output directory (default out/<command>)")
    p.add_argument("--plots", action="store_true", help="also write gnuplot scripts")
    p.add_argument("--seed", type=int, help=f"RNG seed recorded in the manifest (default {io.DEFAULT_SEED})")
    p.add_argument("--jobs", type=int, default=1, help="worker threads for sweeps")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="spinpulse", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("spectrum", help="full eigenvalue list and band table at one Omega")
    _chain_options(p)
    _common_options(p)

    p = sub.add_parser("strip", help="fine structure of one band across an Omega grid")
    _chain_options(p, grid=True)
    _common_options(p)
    p.add_argument("--band", type=int, help="band index m (default L//2)")
    p.add_argument("--window", type=_pair, default=(-0.05, 0.05), help="lo,hi offset from band center")

    p = sub.add_parser("sweep", help="band widths and pulse errors over an Omega grid")
    _chain_options(p, grid=True)
    _common_options(p)
    p.add_argument("--remove-global-phase", action="store_true")

    p = sub.add_parser("pulse-errors", help="amplitude and phase errors after one pulse")
    _chain_options(p)
    _common_options(p)
    p.add_argument("--remove-global-phase", action="store_true")

    p = sub.add_parser("amplitudes", help="complex amplitudes A_n after one pulse")
    _chain_options(p)
    _common_options(p)

    p = sub.add_parser("level-stats", help="nearest-neighbour spacing distribution")
    _chain_options(p)
    _common_options(p)
    p.add_argument("--unfold", choices=levelstats.METHODS, default=levelstats.POLY_STAIRCASE)
    p.add_argument("--bins", type=int, default=40)
    p.add_argument("--s-max", type=float, default=4.0)
    p.add_argument("--edge-fraction", type=float)
    p.add_argument("--band", type=int, help="restrict to band m (by sorted position)")

    p = sub.add_parser("two-spin-check", help="closed-form two-spin levels vs numerics")
    p.add_argument("--omega", type=float, default=100.0)
    p.add_argument("--dw", type=float, default=1.0, help="detuning of spin 1")
    p.add_argument("--J", type=float, default=0.1)
    _common_options(p)

    p = sub.add_parser("paper-repro", help="regenerate one published figure's data")
    p.add_argument("--figure", type=int, required=True, choices=sorted(pipelines.FIGURES))
    p.add_argument("--omega-grid", help="override the default grid (figures 1-5)")
    _common_options(p)
    return parser


def resolve_config(args) -> io.RunConfig:
    base = io.parse_config(args.config) if getattr(args, "config", None) else None
    chain = base.chain if base else ChainConfig.centered(10, 0.1, 100.0)
    mode = base.detuning_mode if base else "centered"
    L = args.L if args.L is not None else chain.L
    mode = args.detuning_mode or ("explicit" if args.detunings else mode)
    if args.L is not None and args.L != chain.L and mode == "explicit" and not args.detunings:
        raise ValidationError("--L changes the chain length; pass matching --detunings")
    explicit = [float(x) for x in args.detunings.split(",")] if args.detunings else (
        list(chain.detunings) if mode == "explicit" else None
    )
    chain = ChainConfig(
        L=L,
        J=args.J if args.J is not None else chain.J,
        Omega=args.omega if args.omega is not None else chain.Omega,
        detunings=io.make_detunings(mode, L, explicit),
        pulse_angle=args.pulse_angle if args.pulse_angle is not None else chain.pulse_angle,
    )
    grid = base.omega_grid if base else None
    if getattr(args, "omega_grid", None):
        grid = io.parse_grid(args.omega_grid)
    seed = args.seed if args.seed is not None else (base.seed if base else io.DEFAULT_SEED)
    return io.RunConfig(chain, grid, mode, seed)


def execute(args) -> tuple[pipelines.Result, dict, list | None]:
    """Run one command; returns the result, the manifest config, and the grid used."""
    cmd = args.command
    if cmd == "two-spin-check":
        res = pipelines.two_spin_check(args.omega, args.dw, args.J)
        return res, {"Omega": args.omega, "dw": args.dw, "J": args.J}, None
    if cmd == "paper-repro":
        kwargs = {}
        grid = None
        if args.omega_grid:
            if args.figure > 5:
                raise ValidationError(f"--omega-grid does not apply to figure {args.figure}")
            grid = io.parse_grid(args.omega_grid)
            kwargs["omega_grid"] = grid
        if args.figure in (1, 3, 4, 5):
            kwargs["jobs"] = args.jobs
        res = pipelines.FIGURES[args.figure](**kwargs)
        if grid is None and args.figure <= 5:
            grid = default_omega_grid()
        return res, {"figure": args.figure}, None if grid is None else list(grid)

    rc = resolve_config(args)
    cfg = rc.chain
    conf = io.chain_to_dict(cfg) | {"detuning_mode": rc.detuning_mode}
    grid = rc.omega_grid if rc.omega_grid is not None else default_omega_grid()
    if cmd == "spectrum":
        return pipelines.spectrum(cfg), conf, None
    if cmd == "strip":
        m = cfg.L // 2 if args.band is None else args.band
        return pipelines.strip(cfg, grid, m, args.window), conf | {"band": m}, list(grid)
    if cmd == "sweep":
        return pipelines.sweep(cfg, grid, args.jobs, args.remove_global_phase), conf, list(grid)
    if cmd == "pulse-errors":
        return pipelines.pulse_errors(cfg, args.remove_global_phase), conf, None
    if cmd == "amplitudes":
        return pipelines.amplitudes(cfg), conf, None
    if cmd == "level-stats":
        w = eigenvalues(build_hamiltonian(cfg))
        if args.band is not None:
            if not 0 <= args.band <= cfg.L:
                raise ValidationError(f"--band must lie in [0, {cfg.L}]")
            edges = np.cumsum([0] + band_sizes(cfg.L))
            w = w[edges[args.band] : edges[args.band + 1]]
        res = pipelines.level_stats(w, args.unfold, args.bins, args.s_max, args.edge_fraction)
        return res, conf | {"unfold": args.unfold, "band": args.band}, None
    raise ValidationError(f"unknown command {cmd!r}")


def write_outputs(res: pipelines.Result, out: Path, plots: bool) -> list[Path]:
    written = [io.write_csv(out / name, header, rows) for name, (header, rows) in res.tables.items()]
    written.append(io.write_json(out / "summary.json", {
        "summary": res.summary,
        "checks": [vars(c) for c in res.checks],
        "ok": res.ok,
    }))
    if plots:
        for spec in res.plots:
            kind, _, data = spec.partition(":")
            text, fname = io.gnuplot_script(kind, data or None)
            written.append(io.write_text(out / fname, text))
    return written


def run(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)

    out = args.out or Path("out") / args.command
    started = time.perf_counter()
    try:
        res, conf, grid = execute(args)
        write_outputs(res, out, args.plots)
        manifest = io.RunManifest(
            command=args.command,
            config=conf,
            omega_grid=grid,
            output_dir=str(out),
            version=__version__,
            seed=args.seed if args.seed is not None else io.DEFAULT_SEED,
            duration_s=time.perf_counter() - started,
            extra={"argv": list(argv) if argv is not None else sys.argv[1:]},
        )
        io.write_json(out / "manifest.json", vars(manifest))
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except SpinPulseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID

    for check in res.checks:
        print(check.line())
    for key in ("fits", "ks_poisson", "ks_goe", "label", "extent_ratio", "metrics"):
        if key in res.summary:
            print(f"{key}: {res.summary[key]}")
    print(f"wrote {len(res.tables)} table(s) to {out}")
    return EXIT_OK if res.ok else EXIT_NUMERICAL


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
