"""Named run configurations bundled with the package.

Each preset is a JSON file pairing a chain with the grid, horizon, and
verb that produce one of the standard data sets (fig2..fig6).  Chain
parameters come from the model being reproduced; grid resolutions,
horizon caps, and sampling steps are package choices recorded in each
file's comment field.
"""

from __future__ import annotations

import json
from importlib import resources

import numpy as np

from ..experiments import Axis

__all__ = ["PRESET_NAMES", "load_preset", "axis_values"]

PRESET_NAMES = ("fig2", "fig3", "fig4", "fig5", "fig6")

_AXIS_KEYS = {"name", "scale", "start", "stop", "count"}


def load_preset(name: str) -> dict:
    """Parsed, schema-checked preset dictionary."""
    if name not in PRESET_NAMES:
        raise ValueError(f"unknown preset {name!r}; available: {', '.join(PRESET_NAMES)}")
    text = resources.files("qstchain.presets").joinpath(f"{name}.json").read_text()
    data = json.loads(text)
    for key in ("name", "verb", "chain"):
        if key not in data:
            raise ValueError(f"preset {name!r} is missing required key {key!r}")
    for key in ("axis1", "axis2", "spectrum_axis"):
        if key in data:
            _check_axis(name, key, data[key])
    return data


def _check_axis(preset: str, key: str, axis: dict) -> None:
    unknown = sorted(set(axis) - _AXIS_KEYS)
    if unknown:
        raise ValueError(f"preset {preset!r} {key}: unknown key {unknown[0]!r}")
    missing = sorted(_AXIS_KEYS - set(axis))
    if missing:
        raise ValueError(f"preset {preset!r} {key}: missing key {missing[0]!r}")
    if axis["scale"] not in ("linear", "log"):
        raise ValueError(f"preset {preset!r} {key}: scale must be linear or log")


def axis_values(axis: dict) -> Axis:
    """Materialise an axis spec into concrete grid values."""
    count = int(axis["count"])
    if count < 1:
        raise ValueError(f"axis count must be >= 1, got {count}")
    if axis["scale"] == "log":
        vals = np.geomspace(float(axis["start"]), float(axis["stop"]), count)
    else:
        vals = np.linspace(float(axis["start"]), float(axis["stop"]), count)
    return Axis(name=axis["name"], values=tuple(float(v) for v in vals))
