"""Time evolution in the one-magnon sector.

States are complex site-amplitude vectors c(t) with c_k = <k|psi>, evolved
under i dc/dt = H1 c (hbar = 1, H1 the tridiagonal one-magnon matrix).
Two independent routes:

* evolve / amplitude expand in the eigenbasis,
      c_k(t) = sum_i v_i(k) v_i(source) exp(-i lambda_i t),
  exact at machine precision for any t;
* integrate_oracle steps the Schroedinger equation with classical RK4 and
  knows nothing about the spectrum.  It exists purely to cross-check the
  spectral route and is deliberately kept decoupled from it.

The per-mode weights v_i(k) v_i(source) are formed before any phase is
attached, so swapping source and target permutes products of the same two
floats: transfer between mirror sites is reproduced bit for bit.

Long scans (threshold crossings, peak populations) walk the time axis in
chunks at a beat-resolving step pi / (4 (lambda_max - lambda_min)) instead
of materialising full trajectories; crossings are then sharpened by
bisection on the exact spectral amplitude.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .chain import Hamiltonian1Ex
from .tridiag import EigenDecomposition

__all__ = [
    "Trajectory",
    "evolve",
    "amplitude",
    "integrate_oracle",
    "default_time_grid",
    "beat_dt",
    "first_crossing",
    "refine_crossing",
    "peak_population",
    "population_series",
    "energy_expectation",
]

_CHUNK_ELEMS = 1 << 20  # complex workspace bound for chunked scans
_ORACLE_STEP_BUDGET = 100_000_000


@dataclass(frozen=True)
class Trajectory:
    """Sampled one-magnon evolution from a single-site initial state.

    amplitudes[t, k] = <k+1|psi(times[t])>, populations the squared
    magnitudes.  decomposition is the spectrum the samples came from, or
    None when produced by the RK4 oracle.
    """

    times: np.ndarray
    amplitudes: np.ndarray
    populations: np.ndarray
    source: int
    decomposition: EigenDecomposition | None = None

    @property
    def n_sites(self) -> int:
        return self.amplitudes.shape[1]

    def site_population(self, site: int) -> np.ndarray:
        """Population series of a 1-based site."""
        _check_site(site, self.n_sites, "site")
        return self.populations[:, site - 1]


def _check_site(site: int, n: int, name: str) -> None:
    if not isinstance(site, (int, np.integer)) or not 1 <= site <= n:
        raise ValueError(f"{name} must be an integer in 1..{n}, got {site!r}")


def _check_times(times: np.ndarray) -> np.ndarray:
    t = np.asarray(times, dtype=float)
    if t.ndim != 1 or len(t) == 0:
        raise ValueError("times must be a non-empty 1-D array")
    if not np.all(np.isfinite(t)):
        raise ValueError("times must be finite")
    if np.any(np.diff(t) < 0.0):
        raise ValueError("times must be non-decreasing")
    return t


def _mode_weights(ed: EigenDecomposition, source: int, target: int) -> np.ndarray:
    # target factor first: the same two floats in either call order.
    return ed.vectors[target - 1] * ed.vectors[source - 1]


def evolve(ed: EigenDecomposition, source: int, times) -> Trajectory:
    """Spectral propagation of |source> sampled on the given time grid."""
    n = ed.n
    _check_site(source, n, "source")
    t = _check_times(times)
    weights = ed.vectors * ed.vectors[source - 1][np.newaxis, :]
    phases = np.exp(-1j * t[:, np.newaxis] * ed.values[np.newaxis, :])
    amps = phases @ weights.T
    pops = amps.real**2 + amps.imag**2
    return Trajectory(times=t, amplitudes=amps, populations=pops, source=source, decomposition=ed)


def amplitude(ed: EigenDecomposition, source: int, target: int, t: float) -> complex:
    """Transfer amplitude <target|exp(-i H1 t)|source>."""
    _check_site(source, ed.n, "source")
    _check_site(target, ed.n, "target")
    w = _mode_weights(ed, source, target)
    return complex(np.exp(-1j * float(t) * ed.values) @ w)


def integrate_oracle(h: Hamiltonian1Ex, source: int, times, tol: float = 1e-7) -> Trajectory:
    """RK4 integration of i dc/dt = H1 c from |source>.

    Independent of any eigendecomposition.  The internal step keeps
    ||H||*dt <= 0.05 and targets a global phase error ~tol over the full
    span (classical dt^4 error accumulation).  Raises ArithmeticError on
    step-size underflow or an absurd step budget.
    """
    t = _check_times(times)
    n = h.n_sites
    _check_site(source, n, "source")
    if not (tol > 0.0 and math.isfinite(tol)):
        raise ValueError(f"tol must be finite and > 0, got {tol}")
    hd = h.dense()
    norm = float(np.max(np.sum(np.abs(hd), axis=1)))
    span = float(t[-1] - t[0])
    if norm > 0.0 and span > 0.0:
        dt_max = min(0.05 / norm, (120.0 * tol / (span * norm**5)) ** 0.25)
    else:
        dt_max = span if span > 0.0 else 1.0
    if not (dt_max > 0.0 and math.isfinite(dt_max)):
        raise ArithmeticError(f"oracle step size underflowed (||H|| = {norm})")
    if span / dt_max > _ORACLE_STEP_BUDGET:
        raise ArithmeticError(
            f"oracle would need {span / dt_max:.2e} steps; span or ||H|| too large"
        )

    c = np.zeros(n, dtype=complex)
    c[source - 1] = 1.0
    out = np.empty((len(t), n), dtype=complex)
    t_now = t[0]
    for j, t_next in enumerate(t):
        gap = t_next - t_now
        if gap > 0.0:
            steps = max(1, math.ceil(gap / dt_max))
            dt = gap / steps
            for _ in range(steps):
                k1 = -1j * (hd @ c)
                k2 = -1j * (hd @ (c + 0.5 * dt * k1))
                k3 = -1j * (hd @ (c + 0.5 * dt * k2))
                k4 = -1j * (hd @ (c + dt * k3))
                c = c + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            t_now = t_next
        out[j] = c
    pops = out.real**2 + out.imag**2
    return Trajectory(times=t, amplitudes=out, populations=pops, source=source, decomposition=None)


def default_time_grid(ed: EigenDecomposition, horizon: float, dt: float | None = None) -> np.ndarray:
    """Uniform grid 0, dt, ..., covering [0, horizon].

    Default dt keeps max|lambda| * dt <= 0.1 (resolves every phase); the
    last point is the first multiple of dt at or past horizon.
    """
    if not (horizon > 0.0 and math.isfinite(horizon)):
        raise ValueError(f"horizon must be finite and > 0, got {horizon}")
    if dt is None:
        top = float(np.max(np.abs(ed.values))) if ed.n else 0.0
        dt = 0.1 / top if top > 0.0 else horizon
    if not (dt > 0.0 and math.isfinite(dt)):
        raise ValueError(f"dt must be finite and > 0, got {dt}")
    steps = max(1, math.ceil(horizon / dt - 1e-9))
    return np.arange(steps + 1) * dt


def beat_dt(ed: EigenDecomposition) -> float:
    """Scan step resolving the fastest population beat.

    Populations from an N-mode expansion oscillate no faster than the full
    spectral span lambda_max - lambda_min; pi/4 of that period keeps every
    beat sampled several times per cycle.
    """
    span = float(ed.values[-1] - ed.values[0]) if ed.n > 1 else 0.0
    if span > 0.0:
        return math.pi / (4.0 * span)
    top = float(np.max(np.abs(ed.values))) if ed.n else 0.0
    return 0.1 / top if top > 0.0 else 1.0


def _chunk_len(n_modes: int) -> int:
    return max(1024, _CHUNK_ELEMS // max(1, n_modes))


def _population_chunk(values: np.ndarray, w: np.ndarray, t: np.ndarray) -> np.ndarray:
    amp = np.exp(-1j * t[:, np.newaxis] * values[np.newaxis, :]) @ w
    return amp.real**2 + amp.imag**2


def first_crossing(
    ed: EigenDecomposition,
    source: int,
    target: int,
    threshold: float,
    horizon: float,
    dt: float | None = None,
    max_samples: int | None = None,
) -> float | None:
    """Earliest t in [0, horizon] with P_target(t) >= threshold, or None.

    Chunked grid scan at the beat-resolving step (early exit at the first
    qualifying sample), then bisection of P(t) - threshold between that
    sample and its predecessor, using the exact spectral amplitude.
    None is only returned after the whole horizon has been scanned; if a
    max_samples budget runs out first, the honest answer is unknown and
    an ArithmeticError reports how far the scan got.
    """
    _check_site(source, ed.n, "source")
    _check_site(target, ed.n, "target")
    if not (0.0 < threshold <= 1.0):
        raise ValueError(f"threshold must be in (0, 1], got {threshold}")
    if not (horizon > 0.0 and math.isfinite(horizon)):
        raise ValueError(f"horizon must be finite and > 0, got {horizon}")
    if dt is None:
        dt = beat_dt(ed)
    w = _mode_weights(ed, source, target)
    n_samples = max(1, math.ceil(horizon / dt - 1e-9)) + 1
    chunk = _chunk_len(ed.n)
    prev_t = None
    for start in range(0, n_samples, chunk):
        stop = min(start + chunk, n_samples)
        truncated = max_samples is not None and stop > max_samples
        if truncated:
            stop = max_samples
        if stop <= start:
            raise ArithmeticError(
                f"crossing scan exhausted its {max_samples}-sample budget at "
                f"t = {prev_t or 0.0:g} (horizon {horizon:g}) without reaching {threshold}"
            )
        idx = np.arange(start, stop)
        t = idx * dt
        pops = _population_chunk(ed.values, w, t)
        hits = np.nonzero(pops >= threshold)[0]
        if hits.size:
            j = int(hits[0])
            hi = float(t[j])
            if j > 0:
                lo = float(t[j - 1])
            elif prev_t is not None:
                lo = prev_t
            else:
                return hi  # threshold already met at the first sample
            return refine_crossing(ed, source, target, threshold, lo, hi)
        prev_t = float(t[-1])
        if truncated:
            raise ArithmeticError(
                f"crossing scan exhausted its {max_samples}-sample budget at "
                f"t = {prev_t:g} (horizon {horizon:g}) without reaching {threshold}"
            )
    return None


def refine_crossing(
    ed: EigenDecomposition, source: int, target: int, threshold: float, lo: float, hi: float
) -> float:
    """Bisect P_target(t) - threshold on [lo, hi] given P(lo) < threshold <= P(hi).

    Converges to ~1e-10 relative in t using the exact spectral amplitude.
    """
    a = amplitude(ed, source, target, lo)
    if a.real**2 + a.imag**2 >= threshold:
        return lo
    for _ in range(200):
        if hi - lo <= max(1e-12, 1e-10 * hi):
            break
        mid = 0.5 * (lo + hi)
        a = amplitude(ed, source, target, mid)
        if a.real**2 + a.imag**2 >= threshold:
            hi = mid
        else:
            lo = mid
    return hi


def peak_population(
    ed: EigenDecomposition,
    source: int,
    target: int,
    horizon: float,
    dt: float | None = None,
) -> tuple[float, float]:
    """(max, argmax) of P_target over the scan grid covering [0, horizon]."""
    _check_site(source, ed.n, "source")
    _check_site(target, ed.n, "target")
    if not (horizon > 0.0 and math.isfinite(horizon)):
        raise ValueError(f"horizon must be finite and > 0, got {horizon}")
    if dt is None:
        dt = beat_dt(ed)
    w = _mode_weights(ed, source, target)
    n_samples = max(1, math.ceil(horizon / dt - 1e-9)) + 1
    chunk = _chunk_len(ed.n)
    best_p = -1.0
    best_t = 0.0
    for start in range(0, n_samples, chunk):
        idx = np.arange(start, min(start + chunk, n_samples))
        t = idx * dt
        pops = _population_chunk(ed.values, w, t)
        j = int(np.argmax(pops))
        if pops[j] > best_p:
            best_p = float(pops[j])
            best_t = float(t[j])
    return best_p, best_t


def population_series(
    ed: EigenDecomposition,
    source: int,
    target: int,
    horizon: float,
    dt: float | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """(times, P_target(times)) on the scan grid covering [0, horizon].

    Materialises only the one site's populations, so horizons far beyond
    what a full Trajectory could hold stay affordable.
    """
    _check_site(source, ed.n, "source")
    _check_site(target, ed.n, "target")
    if not (horizon > 0.0 and math.isfinite(horizon)):
        raise ValueError(f"horizon must be finite and > 0, got {horizon}")
    if dt is None:
        dt = beat_dt(ed)
    w = _mode_weights(ed, source, target)
    n_samples = max(1, math.ceil(horizon / dt - 1e-9)) + 1
    times = np.arange(n_samples) * dt
    series = np.empty(n_samples)
    chunk = _chunk_len(ed.n)
    for start in range(0, n_samples, chunk):
        stop = min(start + chunk, n_samples)
        series[start:stop] = _population_chunk(ed.values, w, times[start:stop])
    return times, series


def energy_expectation(h: Hamiltonian1Ex, traj: Trajectory) -> np.ndarray:
    """<psi(t)|H1|psi(t)> along a trajectory (offset not included)."""
    c = traj.amplitudes
    if c.shape[1] != h.n_sites:
        raise ValueError("trajectory and Hamiltonian have different site counts")
    diag_part = traj.populations @ h.diag
    if h.n_sites == 1:
        return diag_part
    cross = (np.conj(c[:, :-1]) * c[:, 1:]).real @ h.offdiag
    return diag_part + 2.0 * cross
