"""Deterministic table writers and row builders.

Byte-identical output for identical inputs is a hard contract here: no
timestamps, no locale, floats as shortest round-trip decimals (repr), and
a fixed "\n" line terminator.  CSV files open with a single `#` comment
line stating units and sign conventions; JSON-lines output carries pure
records (the format has no comment syntax - units are documented in the
README and CLI help).
"""

from __future__ import annotations

import csv
import io
import json
import sys
from typing import Iterable, Mapping

import numpy as np

from .chain import ChainSpec
from .dynamics import Trajectory
from .tridiag import EigenDecomposition

__all__ = [
    "UNITS_COMMENT",
    "format_cell",
    "write_table",
    "render_table",
    "trajectory_columns",
    "trajectory_rows",
    "spectrum_table",
    "fields_table",
]

UNITS_COMMENT = (
    "# time in units of hbar/J, energies in units of J; "
    "one-magnon matrix convention: diag 2*B_n, offdiag 2*J_n (Pauli couplings)"
)


def format_cell(value) -> str:
    """Shortest round-trip text for a cell; absent (None) is empty."""
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    raise TypeError(f"unsupported cell type {type(value).__name__}")


def _jsonable(value):
    if value is None or isinstance(value, (bool, str)):
        return value
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return float(value)
    raise TypeError(f"unsupported cell type {type(value).__name__}")


def render_table(
    rows: Iterable[Mapping],
    columns: tuple,
    fmt: str = "csv",
    comment: str | None = UNITS_COMMENT,
) -> str:
    """Table text for the given rows (missing keys become absent cells)."""
    if fmt == "csv":
        buf = io.StringIO()
        if comment:
            buf.write(comment + "\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([format_cell(row.get(c)) for c in columns])
        return buf.getvalue()
    if fmt == "jsonl":
        lines = [
            json.dumps({c: _jsonable(row.get(c)) for c in columns}, separators=(",", ":"))
            for row in rows
        ]
        return "".join(line + "\n" for line in lines)
    raise ValueError(f"format must be csv or jsonl, got {fmt!r}")


def write_table(
    rows: Iterable[Mapping],
    columns: tuple,
    fmt: str = "csv",
    dest: str | None = None,
    comment: str | None = UNITS_COMMENT,
) -> None:
    """Write a table to a file path, or stdout when dest is None."""
    text = render_table(rows, columns, fmt=fmt, comment=comment)
    if dest is None:
        sys.stdout.write(text)
        return
    try:
        with open(dest, "w", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"writing table to {dest}: {exc}") from exc


def trajectory_columns(n_sites: int, amplitudes: bool = False) -> tuple:
    cols = ("t",) + tuple(f"P_{k}" for k in range(1, n_sites + 1))
    if amplitudes:
        for k in range(1, n_sites + 1):
            cols += (f"re_{k}", f"im_{k}")
    return cols


def trajectory_rows(traj: Trajectory, amplitudes: bool = False) -> Iterable[dict]:
    """Row generator for a trajectory table (kept lazy: files can be long)."""
    n = traj.n_sites
    for i in range(len(traj.times)):
        row = {"t": float(traj.times[i])}
        for k in range(n):
            row[f"P_{k + 1}"] = float(traj.populations[i, k])
        if amplitudes:
            for k in range(n):
                row[f"re_{k + 1}"] = float(traj.amplitudes[i, k].real)
                row[f"im_{k + 1}"] = float(traj.amplitudes[i, k].imag)
        yield row


def spectrum_table(ed: EigenDecomposition, vectors: bool = False) -> tuple[tuple, list[dict]]:
    """(columns, rows) for a single decomposition: one row per mode."""
    cols = ("k", "lambda", "parity")
    if vectors:
        cols += tuple(f"v_{n}" for n in range(1, ed.n + 1))
    rows = []
    for i in range(ed.n):
        row = {"k": i + 1, "lambda": float(ed.values[i]), "parity": ed.parity[i]}
        if vectors:
            for n in range(ed.n):
                row[f"v_{n + 1}"] = float(ed.vectors[n, i])
        rows.append(row)
    return cols, rows


def fields_table(chain: ChainSpec) -> tuple[tuple, list[dict]]:
    """(columns, rows): per-site field and the bond coupling to the right."""
    cols = ("n", "B", "J_right")
    rows = []
    for i in range(chain.n_sites):
        rows.append(
            {
                "n": i + 1,
                "B": float(chain.fields[i]),
                "J_right": float(chain.couplings[i]) if i < chain.n_sites - 1 else None,
            }
        )
    return cols, rows
