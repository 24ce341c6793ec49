#!/usr/bin/env python3
"""Regenerate every bundled preset table under data/.

One file per preset, named <preset>_<verb>.<fmt>; fig4 additionally gets
the level-structure scan on its finer spectrum axis.  fig4's sweep runs
full dynamics at weak coupling, so expect a few minutes of wall time.
"""

import argparse
import pathlib
import sys

from qstchain.cli import main as qst
from qstchain.presets import PRESET_NAMES, load_preset


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out-dir", default="data", help="output directory (default ./data)")
    ap.add_argument("--format", choices=("csv", "jsonl"), default="csv")
    ap.add_argument("--only", nargs="*", metavar="PRESET",
                    help="subset of presets (default: all of %s)" % (PRESET_NAMES,))
    args = ap.parse_args(argv)

    names = args.only if args.only else list(PRESET_NAMES)
    out = pathlib.Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)

    jobs = []
    for name in names:
        verb = load_preset(name)["verb"]
        jobs.append((verb, name, out / f"{name}_{verb}.{args.format}"))
        if name == "fig4":
            jobs.append(("spectrum", name, out / f"fig4_spectrum.{args.format}"))

    for verb, name, path in jobs:
        print(f"{name}: {verb} -> {path}", flush=True)
        code = qst([verb, "--preset", name, "--out", str(path), "--format", args.format])
        if code != 0:
            print(f"{name} failed with exit code {code}", file=sys.stderr)
            return code
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
