#!/usr/bin/env python3
"""Trap-to-hopping conversion for the bundled Rb-87 lattice numbers.

Prints the SI inputs, the harmonic offset at one site's distance, and
the dimensionless ratio V_ext/J — the potential amplitude `a` a p = 2
chain picks up per squared site distance.  Override any input to probe a
different platform.
"""

import argparse
import math

from qstchain import HBAR, RB87_LATTICE, LatticeParams, experimental_ratio


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--mass", type=float, default=RB87_LATTICE.mass, help="atom mass [kg]")
    ap.add_argument("--omega", type=float, default=RB87_LATTICE.trap_angular_frequency,
                    help="trap angular frequency [rad/s]")
    ap.add_argument("--spacing", type=float, default=RB87_LATTICE.lattice_spacing,
                    help="lattice spacing [m]")
    ap.add_argument("--hopping", type=float, default=RB87_LATTICE.hopping_over_hbar,
                    help="tunnelling rate J/hbar [1/s]")
    args = ap.parse_args(argv)

    params = LatticeParams(
        mass=args.mass,
        trap_angular_frequency=args.omega,
        lattice_spacing=args.spacing,
        hopping_over_hbar=args.hopping,
    )
    v_ext = 0.5 * params.mass * params.trap_angular_frequency**2 * params.lattice_spacing**2
    ratio = experimental_ratio(params)

    print(f"mass        {params.mass:.4e} kg")
    print(f"trap freq   {params.trap_angular_frequency / (2.0 * math.pi):.1f} Hz "
          f"({params.trap_angular_frequency:.1f} rad/s)")
    print(f"spacing     {params.lattice_spacing * 1e9:.0f} nm")
    print(f"hopping     {params.hopping_over_hbar:.0f} /s "
          f"(J = {HBAR * params.hopping_over_hbar:.3e} J)")
    print(f"V_ext       {v_ext:.3e} J per site^2")
    print(f"V_ext/J     {ratio:.6f}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
