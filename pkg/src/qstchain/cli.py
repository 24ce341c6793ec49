"""Command-line interface.

    qstchain fields   --n 8 --a 0.5 --p 2
    qstchain spectrum --n 8 --a 0.5 --p 2 [--vectors | --p-axis 0:4:81]
    qstchain evolve   --preset fig5 --out fig5.csv
    qstchain report   --n 8 --a 0.5 --p 2 --j-edge 1 --j-bulk 1
    qstchain sweep    --preset fig2 --out fig2.csv
    qstchain tstar    --preset fig6 --out fig6.csv
    qstchain exp-ratio

Parameters merge from three layers, later layers winning: a figure preset
(--preset), a JSON config file (--config, same schema as presets), and
explicit flags.  Unknown config keys are rejected by name.  All times are
in units of hbar/J with the Pauli-factor convention (one-magnon matrix:
diag 2*B_n, offdiag 2*J_n).

Exit codes: 0 success, 2 usage/input error, 3 numerical failure.
QST_THREADS caps sweep concurrency; --seed is reserved (accepted, unused:
nothing here is randomised yet).
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass

from .chain import ChainConfig, to_single_excitation
from .dynamics import default_time_grid, evolve
from .experiments import (
    RB87_LATTICE,
    SWEEP_COLUMNS,
    TSTAR_COLUMNS,
    Axis,
    LatticeParams,
    SweepGrid,
    compare_tstar,
    experimental_ratio,
    point_report,
    run_sweep,
    scan_spectrum_vs_p,
    spectrum_columns,
    report_row,
)
from .metrics import REPORT_COLUMNS
from .presets import axis_values, load_preset
from .tables import (
    UNITS_COMMENT,
    fields_table,
    spectrum_table,
    trajectory_columns,
    trajectory_rows,
    write_table,
)
from .tridiag import ConvergenceError, decompose

__all__ = ["Command", "parse_command", "main"]

_CHAIN_KEYS = ("n_sites", "a", "p", "j_edge", "j_bulk", "fields", "couplings")
_COMMON_FILE_KEYS = {"name", "comment", "verb", "chain"}
_FILE_KEYS = {
    "fields": set(),
    "spectrum": {"axis1", "spectrum_axis"},
    "evolve": {"source", "horizon", "dt", "amplitudes"},
    "report": {"dynamics", "threshold", "horizon", "window", "floor", "prominence"},
    "sweep": {
        "axis1", "axis2", "dynamics", "threshold", "horizon", "window",
        "floor", "prominence", "spectrum_axis",
    },
    "tstar": {"axis1", "threshold", "horizon"},
    "exp-ratio": set(),
}


@dataclass
class Command:
    verb: str
    params: dict


def _chain_args(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--n", type=int, help="number of sites")
    sub.add_argument("--a", type=float, help="potential amplitude")
    sub.add_argument("--p", type=float, help="potential exponent")
    sub.add_argument("--j-edge", type=float, help="boundary bond coupling")
    sub.add_argument("--j-bulk", type=float, help="bulk bond coupling")
    sub.add_argument("--fields", type=_float_list, help="explicit fields, comma-separated")
    sub.add_argument("--couplings", type=_float_list, help="explicit couplings, comma-separated")
    sub.add_argument("--config", help="JSON config file (defaults; flags win)")
    sub.add_argument("--preset", help="figure preset name (fig2..fig6)")


def _io_args(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--out", help="output path (default: stdout)")
    sub.add_argument("--format", choices=("csv", "jsonl"), help="table format (default csv)")
    sub.add_argument("--seed", type=int, help="reserved; accepted but unused")


def _float_list(text: str) -> tuple:
    try:
        return tuple(float(x) for x in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def _axis_flag(text: str, fixed_name: str | None = None) -> dict:
    """Parse axis flags: 'name:start:stop:count[:scale]' or 'start:stop:count[:scale]'."""
    parts = text.split(":")
    scale = "linear"
    if parts and parts[-1] in ("linear", "log"):
        scale = parts[-1]
        parts = parts[:-1]
    if fixed_name is None:
        if len(parts) != 4:
            raise argparse.ArgumentTypeError(
                f"axis must be name:start:stop:count[:scale], got {text!r}"
            )
        name, rest = parts[0], parts[1:]
    else:
        if len(parts) != 3:
            raise argparse.ArgumentTypeError(
                f"axis must be start:stop:count[:scale], got {text!r}"
            )
        name, rest = fixed_name, parts
    try:
        start, stop, count = float(rest[0]), float(rest[1]), int(rest[2])
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad axis numbers in {text!r}") from exc
    return {"name": name, "scale": scale, "start": start, "stop": stop, "count": count}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qstchain",
        description="Spin-chain state transfer: fields, spectra, dynamics, sweeps.",
        epilog="Times in units of hbar/J (one-magnon matrix: diag 2*B_n, offdiag 2*J_n).",
    )
    subs = parser.add_subparsers(dest="verb", required=True)

    sub = subs.add_parser("fields", help="site fields and bond couplings table")
    _chain_args(sub)
    _io_args(sub)

    sub = subs.add_parser("spectrum", help="eigenvalues/eigenvectors, or spectrum vs p")
    _chain_args(sub)
    _io_args(sub)
    sub.add_argument("--vectors", action="store_true", help="include eigenvector components")
    sub.add_argument(
        "--p-axis", type=lambda s: _axis_flag(s, "p"), dest="p_axis",
        help="scan spectrum over p: start:stop:count[:scale]",
    )

    sub = subs.add_parser("evolve", help="trajectory table for one chain")
    _chain_args(sub)
    _io_args(sub)
    sub.add_argument("--source", type=int, help="initially excited site (default 1)")
    sub.add_argument("--horizon", type=float, help="time span to sample")
    sub.add_argument("--dt", type=float, help="grid step (default 0.1/max|lambda|)")
    sub.add_argument("--amplitudes", action="store_true", help="include re/im amplitude columns")

    sub = subs.add_parser("report", help="transfer diagnostics for one chain")
    _chain_args(sub)
    _io_args(sub)
    sub.add_argument("--dynamics", choices=("none", "threshold", "smoothed", "full"))
    sub.add_argument("--threshold", type=float, help="population threshold (default 0.95)")
    sub.add_argument("--horizon", type=float, help="scan horizon (default 20 Rabi periods)")
    sub.add_argument("--window", type=float, help="smoothing window (default 3 beat periods)")
    sub.add_argument("--floor", type=float, help="relevance floor for smoothed maxima (default 0.5)")
    sub.add_argument("--prominence", type=float, help="descent confirming a smoothed maximum (default 0.05)")

    sub = subs.add_parser("sweep", help="transfer reports over a 1-D or 2-D parameter grid")
    _chain_args(sub)
    _io_args(sub)
    sub.add_argument("--axis1", type=_axis_flag, help="outer axis: name:start:stop:count[:scale]")
    sub.add_argument("--axis2", type=_axis_flag, help="inner axis: name:start:stop:count[:scale]")
    sub.add_argument("--dynamics", choices=("none", "threshold", "smoothed", "full"))
    sub.add_argument("--threshold", type=float)
    sub.add_argument("--horizon", type=float)
    sub.add_argument("--window", type=float)
    sub.add_argument("--floor", type=float)
    sub.add_argument("--prominence", type=float)
    sub.add_argument("--threads", type=int, help="worker threads (default QST_THREADS or 1)")

    sub = subs.add_parser("tstar", help="threshold transfer time vs two-level estimate, per a")
    _chain_args(sub)
    _io_args(sub)
    sub.add_argument(
        "--a-axis", type=lambda s: _axis_flag(s, "a"), dest="a_axis",
        help="amplitude grid: start:stop:count[:scale]",
    )
    sub.add_argument("--threshold", type=float)
    sub.add_argument("--horizon", type=float)

    sub = subs.add_parser("exp-ratio", help="trap-to-hopping energy ratio from SI lattice parameters")
    _io_args(sub)
    sub.add_argument("--mass", type=float, help="atom mass [kg] (default Rb-87)")
    sub.add_argument("--omega", type=float, help="trap angular frequency [rad/s] (default 2*pi*103)")
    sub.add_argument("--spacing", type=float, help="lattice spacing [m] (default 532e-9)")
    sub.add_argument("--hopping", type=float, help="tunnelling rate J/hbar [1/s] (default 940)")

    return parser


def _load_file(path: str) -> dict:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ValueError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ValueError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ValueError(f"config {path} must hold a JSON object")
    return data


def _validate_file(data: dict, fallback_verb: str, origin: str) -> None:
    verb = data.get("verb", fallback_verb)
    if verb not in _FILE_KEYS:
        raise ValueError(f"{origin}: unknown verb {verb!r}")
    allowed = _COMMON_FILE_KEYS | _FILE_KEYS[verb]
    unknown = sorted(set(data) - allowed)
    if unknown:
        raise ValueError(f"{origin}: unknown key {unknown[0]!r}")
    if "chain" in data:
        ChainConfig.from_dict(data["chain"])  # rejects unknown chain keys by name


def _pick(*values, default=None):
    for v in values:
        if v is not None:
            return v
    return default


def parse_command(argv) -> Command:
    """argv (without program name) -> validated Command."""
    args = _build_parser().parse_args(list(argv))
    verb = args.verb

    preset = load_preset(args.preset) if getattr(args, "preset", None) else {}
    config = {}
    if getattr(args, "config", None):
        config = _load_file(args.config)
        _validate_file(config, verb, f"config {args.config}")

    params: dict = {
        "out": _pick(args.out),
        "format": _pick(args.format, default="csv"),
    }

    if verb == "exp-ratio":
        params.update(
            mass=_pick(args.mass, default=RB87_LATTICE.mass),
            trap_angular_frequency=_pick(args.omega, default=RB87_LATTICE.trap_angular_frequency),
            lattice_spacing=_pick(args.spacing, default=RB87_LATTICE.lattice_spacing),
            hopping_over_hbar=_pick(args.hopping, default=RB87_LATTICE.hopping_over_hbar),
        )
        return Command(verb=verb, params=params)

    chain: dict = {}
    for layer in (preset.get("chain", {}), config.get("chain", {})):
        for key in layer:
            chain[key] = layer[key]
    flag_map = {
        "n_sites": args.n, "a": args.a, "p": args.p,
        "j_edge": getattr(args, "j_edge", None), "j_bulk": getattr(args, "j_bulk", None),
        "fields": getattr(args, "fields", None), "couplings": getattr(args, "couplings", None),
    }
    for key, val in flag_map.items():
        if val is not None:
            chain[key] = list(val) if isinstance(val, tuple) else val
    if "n_sites" not in chain:
        raise ValueError(f"{verb} needs a chain: pass --n or a config/preset with chain.n_sites")
    ChainConfig.from_dict(chain)  # validate now so errors are usage errors
    params["chain"] = chain

    def from_files(key):
        return _pick(config.get(key), preset.get(key))

    if verb == "fields":
        pass
    elif verb == "spectrum":
        params["vectors"] = bool(args.vectors)
        params["axis"] = _pick(args.p_axis, from_files("spectrum_axis"), from_files("axis1"))
        if params["axis"] is not None and params["axis"]["name"] != "p":
            raise ValueError("spectrum scans run over p; give a p axis")
    elif verb == "evolve":
        params["source"] = int(_pick(args.source, from_files("source"), default=1))
        horizon = _pick(args.horizon, from_files("horizon"))
        if horizon is None:
            raise ValueError("evolve needs --horizon (or a preset/config providing one)")
        params["horizon"] = float(horizon)
        dt = _pick(args.dt, from_files("dt"))
        params["dt"] = float(dt) if dt is not None else None
        params["amplitudes"] = bool(_pick(args.amplitudes or None, from_files("amplitudes"), default=False))
    elif verb in ("report", "sweep"):
        params["dynamics"] = _pick(
            args.dynamics, from_files("dynamics"), default="full" if verb == "report" else "none"
        )
        params["threshold"] = float(_pick(args.threshold, from_files("threshold"), default=0.95))
        horizon = _pick(args.horizon, from_files("horizon"))
        params["horizon"] = float(horizon) if horizon is not None else None
        window = _pick(args.window, from_files("window"))
        params["window"] = float(window) if window is not None else None
        params["floor"] = float(_pick(args.floor, from_files("floor"), default=0.5))
        params["prominence"] = float(_pick(args.prominence, from_files("prominence"), default=0.05))
        if verb == "sweep":
            params["axis1"] = _pick(args.axis1, from_files("axis1"))
            params["axis2"] = _pick(args.axis2, from_files("axis2"))
            if params["axis1"] is None:
                raise ValueError("sweep needs --axis1 (or a preset/config providing one)")
            params["threads"] = args.threads
    elif verb == "tstar":
        params["axis"] = _pick(args.a_axis, from_files("axis1"))
        if params["axis"] is None:
            raise ValueError("tstar needs --a-axis (or a preset/config providing one)")
        if params["axis"]["name"] != "a":
            raise ValueError("tstar scans run over a; give an a axis")
        params["threshold"] = float(_pick(args.threshold, from_files("threshold"), default=0.95))
        horizon = _pick(args.horizon, from_files("horizon"))
        params["horizon"] = float(horizon) if horizon is not None else None

    return Command(verb=verb, params=params)


def _run_fields(p: dict) -> None:
    chain = ChainConfig.from_dict(p["chain"]).to_chain()
    cols, rows = fields_table(chain)
    write_table(rows, cols, fmt=p["format"], dest=p["out"])


def _run_spectrum(p: dict) -> None:
    config = ChainConfig.from_dict(p["chain"])
    if p["axis"] is not None:
        axis = axis_values(p["axis"])
        rows = scan_spectrum_vs_p(
            config.n_sites, config.a, config.j_edge, config.j_bulk, axis.values
        )
        write_table(rows, spectrum_columns(config.n_sites), fmt=p["format"], dest=p["out"])
        return
    ed = decompose(to_single_excitation(config.to_chain()))
    cols, rows = spectrum_table(ed, vectors=p["vectors"])
    write_table(rows, cols, fmt=p["format"], dest=p["out"])


def _run_evolve(p: dict) -> None:
    config = ChainConfig.from_dict(p["chain"])
    ed = decompose(to_single_excitation(config.to_chain()))
    times = default_time_grid(ed, p["horizon"], p["dt"])
    traj = evolve(ed, p["source"], times)
    cols = trajectory_columns(config.n_sites, p["amplitudes"])
    write_table(trajectory_rows(traj, p["amplitudes"]), cols, fmt=p["format"], dest=p["out"])


def _run_report(p: dict) -> None:
    config = ChainConfig.from_dict(p["chain"])
    report, status = point_report(
        config,
        dynamics=p["dynamics"],
        threshold=p["threshold"],
        horizon=p["horizon"],
        window=p["window"],
        floor=p["floor"],
        prominence=p["prominence"],
    )
    row = report_row(config, report, status)
    write_table([row], REPORT_COLUMNS, fmt=p["format"], dest=p["out"])
    if status != "ok":
        print(f"status: {status}", file=sys.stderr)


def _run_sweep(p: dict) -> None:
    base = ChainConfig.from_dict(p["chain"])
    axis1 = axis_values(p["axis1"])
    axis2 = axis_values(p["axis2"]) if p["axis2"] is not None else None
    grid = SweepGrid(base=base, axis1=axis1, axis2=axis2)
    rows = run_sweep(
        grid,
        dynamics=p["dynamics"],
        threshold=p["threshold"],
        horizon=p["horizon"],
        window=p["window"],
        floor=p["floor"],
        prominence=p["prominence"],
        threads=p["threads"],
    )
    write_table(rows, SWEEP_COLUMNS, fmt=p["format"], dest=p["out"])


def _run_tstar(p: dict) -> None:
    config = ChainConfig.from_dict(p["chain"])
    axis = axis_values(p["axis"])
    rows = compare_tstar(
        config.n_sites, config.p, config.j_edge, config.j_bulk, axis.values,
        threshold=p["threshold"], horizon=p["horizon"],
    )
    write_table(rows, TSTAR_COLUMNS, fmt=p["format"], dest=p["out"])


_SI_COMMENT = (
    "# SI inputs: mass [kg], trap angular frequency [rad/s], lattice spacing [m], "
    "hopping rate [1/s]; ratio = (m*omega^2*a_lat^2/2)/(hbar*hopping), dimensionless"
)


def _run_exp_ratio(p: dict) -> None:
    params = LatticeParams(
        mass=p["mass"],
        trap_angular_frequency=p["trap_angular_frequency"],
        lattice_spacing=p["lattice_spacing"],
        hopping_over_hbar=p["hopping_over_hbar"],
    )
    row = {
        "mass_kg": params.mass,
        "trap_omega_rad_per_s": params.trap_angular_frequency,
        "lattice_spacing_m": params.lattice_spacing,
        "hopping_per_s": params.hopping_over_hbar,
        "ratio": experimental_ratio(params),
    }
    cols = tuple(row.keys())
    write_table([row], cols, fmt=p["format"], dest=p["out"], comment=_SI_COMMENT)


_DISPATCH = {
    "fields": _run_fields,
    "spectrum": _run_spectrum,
    "evolve": _run_evolve,
    "report": _run_report,
    "sweep": _run_sweep,
    "tstar": _run_tstar,
    "exp-ratio": _run_exp_ratio,
}


def main(argv=None) -> int:
    try:
        cmd = parse_command(sys.argv[1:] if argv is None else argv)
    except SystemExit as exc:  # argparse's own usage/help exits
        code = exc.code
        return code if isinstance(code, int) else 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        _DISPATCH[cmd.verb](cmd.params)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ConvergenceError, ArithmeticError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
