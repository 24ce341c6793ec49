"""State transfer in XX spin chains with mirror-symmetric power-law potentials.

One-magnon simulator: chain construction, an in-house symmetric
tridiagonal eigensolver with parity-resolved degenerate doublets,
spectral time evolution cross-checked by an RK4 oracle, transfer figures
of merit, parameter sweeps, and a CLI emitting deterministic CSV/JSONL
tables.  Times in units of hbar/J (Pauli-factor convention: one-magnon
matrix has diag 2*B_n, offdiag 2*J_n).
"""

from .chain import (
    ChainConfig,
    ChainSpec,
    Hamiltonian1Ex,
    PotentialSpec,
    build_chain,
    build_fields,
    is_mirror_symmetric,
    to_single_excitation,
)
from .dynamics import (
    Trajectory,
    amplitude,
    beat_dt,
    default_time_grid,
    energy_expectation,
    evolve,
    first_crossing,
    integrate_oracle,
    peak_population,
    population_series,
    refine_crossing,
)
from .experiments import (
    HBAR,
    RB87_LATTICE,
    RB87_MASS,
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
)
from .metrics import (
    REPORT_COLUMNS,
    DimerModes,
    TransferReport,
    identify_dimer_modes,
    p_threshold,
    qst_drop,
    t_star_estimate,
    t_star_smoothed,
    t_star_threshold,
)
from .presets import PRESET_NAMES, load_preset
from .tridiag import (
    ConvergenceError,
    EigenDecomposition,
    decompose,
    residual_norm,
    uniform_chain_reference,
)

__version__ = "0.1.0"

__all__ = [
    "ChainConfig", "ChainSpec", "Hamiltonian1Ex", "PotentialSpec",
    "build_chain", "build_fields", "is_mirror_symmetric", "to_single_excitation",
    "ConvergenceError", "EigenDecomposition", "decompose",
    "residual_norm", "uniform_chain_reference",
    "Trajectory", "amplitude", "beat_dt", "default_time_grid",
    "energy_expectation", "evolve", "first_crossing", "integrate_oracle",
    "peak_population", "population_series", "refine_crossing",
    "DimerModes", "TransferReport", "REPORT_COLUMNS",
    "identify_dimer_modes", "p_threshold", "qst_drop",
    "t_star_estimate", "t_star_smoothed", "t_star_threshold",
    "Axis", "LatticeParams", "SweepGrid", "SWEEP_COLUMNS", "TSTAR_COLUMNS",
    "HBAR", "RB87_LATTICE", "RB87_MASS",
    "compare_tstar", "experimental_ratio", "point_report",
    "run_sweep", "scan_spectrum_vs_p",
    "PRESET_NAMES", "load_preset",
    "__version__",
]
