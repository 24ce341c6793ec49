"""Figures of merit for end-to-end state transfer.

* qst_drop: how far the best eigenmode is from the ideal structure in
  which (|1> +/- |N>)/sqrt(2) are exact eigenstates.  Zero means a clean
  sender-receiver dimer hiding inside the chain; nothing in between the
  end sites matters for this diagnostic.
* identify_dimer_modes: which two eigenmodes play the role of that dimer,
  with overlap magnitudes as the quality certificate.
* three transfer-time definitions: the two-level Rabi estimate
  pi/|E_+ - E_-|, the first crossing of a population threshold, and the
  first relevant maximum of a smoothed receiver population.
* p_threshold: perturbative locus where the potential step between two
  neighbouring sites matches the hopping scale, a . (|d_m|^p - |d_{m+1}|^p)
  = j^2 - past it the pairwise site doublets decouple from the band.

Site and mode indices are 1-based throughout, matching the site labels
n = 1..N.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dynamics import Trajectory, refine_crossing
from .tridiag import EigenDecomposition

__all__ = [
    "DimerModes",
    "TransferReport",
    "qst_drop",
    "identify_dimer_modes",
    "t_star_estimate",
    "t_star_threshold",
    "t_star_smoothed",
    "p_threshold",
    "REPORT_COLUMNS",
]

_SQRT_HALF = 1.0 / math.sqrt(2.0)

# CSV schema for a single report row; sweep tables prepend nothing and
# append nothing except a status column.
REPORT_COLUMNS = (
    "N", "a", "p", "j_edge", "j_bulk",
    "F", "E_plus", "E_minus", "ov_plus", "ov_minus",
    "t_est", "t_thr", "t_sm", "p_max",
)


@dataclass(frozen=True)
class DimerModes:
    """The eigenmode pair closest to (|1> +/- |N>)/sqrt(2).

    index_plus/index_minus are 1-based positions in the sorted spectrum.
    ambiguous flags the warning state where neither overlap exceeds
    1/sqrt(2) - the chain has no recognisable sender-receiver doublet and
    downstream two-level estimates should not be trusted.  degenerate
    flags that one eigenvector maximised both overlaps (numerically mixed
    doublet) and the assignment fell back to parity labels.
    """

    index_plus: int
    index_minus: int
    e_plus: float
    e_minus: float
    overlap_plus: float
    overlap_minus: float
    ambiguous: bool
    degenerate: bool = False

    @property
    def identified(self) -> bool:
        return not self.ambiguous


@dataclass(frozen=True)
class TransferReport:
    """One row of transfer diagnostics for a single chain.

    None marks an absent quantity: dynamics that were not run, a
    threshold never reached within the horizon, or a two-level estimate
    that does not exist (ambiguous or unsplit dimer pair).
    """

    drop: float
    e_plus: float
    e_minus: float
    overlap_plus: float
    overlap_minus: float
    t_est: float | None = None
    t_threshold: float | None = None
    t_smoothed: float | None = None
    p_max: float | None = None


def qst_drop(ed: EigenDecomposition) -> float:
    """max_i |v_i(1)| - 1/sqrt(2), in [-1/sqrt(2), 1 - 1/sqrt(2)].

    Zero signals ideal dimer structure: some eigenvector carries exactly
    weight 1/2 on the sender site.  Magnitudes make the value independent
    of eigenvector sign conventions.
    """
    if ed.n < 2:
        raise ValueError("qst_drop needs at least 2 sites")
    return float(np.max(np.abs(ed.vectors[0]))) - _SQRT_HALF


def identify_dimer_modes(ed: EigenDecomposition) -> DimerModes:
    """Locate the eigenmodes maximising |<psi_+|v>| and |<psi_-|v>|.

    psi_+/- = (|1> +/- |N>)/sqrt(2).  If a single (numerically mixed)
    eigenvector wins both, the assignment falls back to parity labels and
    the result is flagged degenerate.
    """
    if ed.n < 2:
        raise ValueError("identify_dimer_modes needs at least 2 sites")
    first = ed.vectors[0]
    last = ed.vectors[-1]
    ov_plus = np.abs(first + last) * _SQRT_HALF
    ov_minus = np.abs(first - last) * _SQRT_HALF
    i_plus = int(np.argmax(ov_plus))
    i_minus = int(np.argmax(ov_minus))
    degenerate = False
    if i_plus == i_minus:
        degenerate = True
        winner = i_plus
        if ed.parity[winner] == "odd":
            # the winner is the antisymmetric partner; plus takes runner-up
            i_plus = _runner_up(ov_plus, winner)
        else:
            i_minus = _runner_up(ov_minus, winner)
    o_p = float(ov_plus[i_plus])
    o_m = float(ov_minus[i_minus])
    return DimerModes(
        index_plus=i_plus + 1,
        index_minus=i_minus + 1,
        e_plus=float(ed.values[i_plus]),
        e_minus=float(ed.values[i_minus]),
        overlap_plus=o_p,
        overlap_minus=o_m,
        ambiguous=bool(o_p < _SQRT_HALF and o_m < _SQRT_HALF),
        degenerate=degenerate,
    )


def _runner_up(overlaps: np.ndarray, excluded: int) -> int:
    masked = overlaps.copy()
    masked[excluded] = -1.0
    return int(np.argmax(masked))


def t_star_estimate(e_plus: float, e_minus: float) -> float:
    """Two-level Rabi transfer time pi/|E_+ - E_-|; inf if degenerate."""
    gap = abs(e_plus - e_minus)
    if gap == 0.0:
        return math.inf
    return math.pi / gap


def t_star_threshold(
    traj: Trajectory,
    target: int,
    threshold: float = 0.95,
    horizon: float | None = None,
) -> float | None:
    """First time P_target >= threshold, or None if never within horizon.

    Scans the trajectory grid for the first qualifying sample, then
    bisects the bracketing interval on the exact spectral amplitude when
    the trajectory carries its decomposition (grid time otherwise).
    """
    if not 0.0 < threshold < 1.0:
        raise ValueError(f"threshold must be in (0, 1), got {threshold}")
    times = traj.times
    if horizon is None:
        horizon = float(times[-1])
    if horizon <= 0.0:
        raise ValueError(f"horizon must be > 0, got {horizon}")
    if float(times[-1]) < horizon - 1e-9:
        raise ValueError(
            f"trajectory spans [0, {float(times[-1])}], shorter than horizon {horizon}"
        )
    series = traj.site_population(target)
    inside = times <= horizon * (1.0 + 1e-12)
    hits = np.nonzero(series[inside] >= threshold)[0]
    if hits.size == 0:
        return None
    j = int(hits[0])
    if j == 0:
        return float(times[0])
    if traj.decomposition is None:
        return float(times[j])
    return refine_crossing(
        traj.decomposition, traj.source, target, threshold,
        float(times[j - 1]), float(times[j]),
    )


def t_star_smoothed(
    traj: Trajectory,
    target: int,
    window: float | None = None,
    floor: float = 0.5,
    prominence: float = 0.05,
) -> float | None:
    """First relevant maximum of the smoothed receiver population.

    A centred moving average of width `window` (time units) washes out
    the fast beats; the answer is the first maximum of the smoothed
    series that exceeds `floor` and is confirmed by a descent of at least
    `prominence` before anything higher appears.  The prominence gate
    keeps micro-ripple that survives the averaging (beats slower than the
    window) from planting a fake "maximum" on the rising Rabi slope; any
    peak a plot reader would point at clears 0.05 easily.  Default
    window: three periods of the fastest spectral beat,
    3 * 2*pi / (lambda_max - lambda_min) - widen it when slower ripple
    components matter.  None if no qualifying maximum is confirmed inside
    the trajectory.
    """
    times = traj.times
    if window is None:
        ed = traj.decomposition
        if ed is None or ed.n < 2:
            raise ValueError("window required for trajectories without a decomposition")
        span = float(ed.values[-1] - ed.values[0])
        if span <= 0.0:
            raise ValueError("degenerate spectrum; pass an explicit window")
        window = 3.0 * 2.0 * math.pi / span
    if not (window > 0.0 and math.isfinite(window)):
        raise ValueError(f"window must be finite and > 0, got {window}")
    t_span = float(times[-1] - times[0])
    if window > t_span:
        raise ValueError(f"window {window} exceeds trajectory span {t_span}")
    series = traj.site_population(target)
    return first_smoothed_max(times, series, window, floor, prominence)


def first_smoothed_max(
    times: np.ndarray,
    series: np.ndarray,
    window: float,
    floor: float,
    prominence: float = 0.05,
) -> float | None:
    """Shared smoothing + first-confirmed-max kernel (uniform grids only).

    A maximum counts once the smoothed series has dropped `prominence`
    below it without first climbing higher; the earliest such peak above
    `floor` wins.  A peak the series never descends from inside the grid
    stays unconfirmed (None) rather than guessed.
    """
    if not (0.0 <= prominence < 1.0):
        raise ValueError(f"prominence must be in [0, 1), got {prominence}")
    if len(times) < 3:
        return None
    steps = np.diff(times)
    dt = float(steps[0])
    if dt <= 0.0 or float(np.max(np.abs(steps - dt))) > 1e-9 * max(dt, 1.0):
        raise ValueError("smoothing requires a uniform time grid")
    if dt > window / 10.0:
        raise ValueError(f"grid step {dt} too coarse for window {window} (need <= window/10)")
    half = max(1, int(round(window / dt)) // 2)
    kernel = np.ones(2 * half + 1)
    sums = np.convolve(series, kernel, mode="same")
    counts = np.convolve(np.ones_like(series), kernel, mode="same")
    smooth = sums / counts  # centred average, window shrinking at the edges
    running = np.maximum.accumulate(smooth)
    above = np.nonzero(running > floor)[0]
    if above.size == 0:
        return None
    k0 = int(above[0])  # first sample where the running peak clears the floor
    drops = np.nonzero(smooth[k0:] < running[k0:] - prominence)[0]
    if drops.size == 0:
        return None
    j = k0 + int(drops[0])
    # argmax takes the first attainment, i.e. the peak the descent confirmed
    return float(times[int(np.argmax(smooth[: j + 1]))])


def p_threshold(n_sites: int, a: float, j: float, site_pair: tuple[int, int]) -> float:
    """Exponent where the (m, m+1) potential step matches the hopping scale.

    Solves a * (|d_m|^p - |d_{m+1}|^p) = j^2 for p by bisection on
    [0, 64], with d_k = k - (N+1)/2 the signed distance from the chain
    centre.  The left side is strictly increasing in p when
    |d_m| > |d_{m+1}| > 1, which holds for pairs well inside the left
    half of a long enough chain; without a sign change over the bracket
    the root is reported missing, never guessed.
    """
    if not isinstance(n_sites, int) or n_sites < 2:
        raise ValueError(f"n_sites must be an integer >= 2, got {n_sites!r}")
    if not (a > 0.0 and math.isfinite(a)):
        raise ValueError(f"a must be finite and > 0, got {a}")
    if not (j > 0.0 and math.isfinite(j)):
        raise ValueError(f"j must be finite and > 0, got {j}")
    m, m1 = site_pair
    if m1 != m + 1:
        raise ValueError(f"site_pair must be consecutive (m, m+1), got {site_pair}")
    if not (1 <= m and m1 <= n_sites // 2):
        raise ValueError(
            f"site_pair must lie within 1..{n_sites // 2} (left half), got {site_pair}"
        )
    centre = 0.5 * (n_sites + 1)
    dm = abs(m - centre)
    dm1 = abs(m1 - centre)
    rhs = j * j

    def lhs(p: float) -> float:
        return a * (dm**p - dm1**p)

    lo, hi = 0.0, 64.0
    f_lo = lhs(lo) - rhs
    f_hi = lhs(hi) - rhs
    if f_lo == 0.0:
        return lo
    if f_lo > 0.0 or f_hi < 0.0:
        raise ValueError(
            f"no sign change for a(|d_{m}|^p - |d_{m1}|^p) = j^2 on p in [0, 64] "
            f"(d_{m} = {dm}, d_{m1} = {dm1}; monotonicity needs |d_{m1}| > 1)"
        )
    for _ in range(200):
        if hi - lo <= 1e-8:
            break
        mid = 0.5 * (lo + hi)
        if lhs(mid) - rhs >= 0.0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)
