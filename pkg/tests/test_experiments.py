import math

import numpy as np
import pytest

from qstchain import (
    Axis,
    ChainConfig,
    LatticeParams,
    RB87_LATTICE,
    SweepGrid,
    compare_tstar,
    experimental_ratio,
    load_preset,
    point_report,
    run_sweep,
    scan_spectrum_vs_p,
)
from qstchain.experiments import SWEEP_COLUMNS, TSTAR_COLUMNS, report_row, spectrum_columns
from qstchain.presets import PRESET_NAMES, axis_values

BASE = ChainConfig(n_sites=6, a=0.5, p=1.0, j_edge=0.05, j_bulk=1.0)


class TestGrid:
    def test_axis_must_ascend(self):
        with pytest.raises(ValueError):
            Axis("a", (1.0, 0.5))

    def test_axis_site_counts_must_be_integral(self):
        with pytest.raises(ValueError):
            Axis("n_sites", (4.0, 4.5))
        Axis("n_sites", (4.0, 8.0))  # whole floats are fine

    def test_configs_outer_major_order(self):
        grid = SweepGrid(BASE, Axis("p", (0.0, 1.0)), Axis("a", (0.1, 0.2, 0.3)))
        got = [(c.p, c.a) for c in grid.configs()]
        assert got == [(0.0, 0.1), (0.0, 0.2), (0.0, 0.3), (1.0, 0.1), (1.0, 0.2), (1.0, 0.3)]

    def test_single_axis(self):
        grid = SweepGrid(BASE, Axis("j_edge", (0.0625, 0.125, 0.25)))
        assert [c.j_edge for c in grid.configs()] == [0.0625, 0.125, 0.25]

    def test_point_budget(self):
        with pytest.raises(ValueError):
            SweepGrid(BASE, Axis("p", tuple(map(float, range(2000)))),
                      Axis("a", tuple(map(float, range(1, 2001)))), max_points=10_000)


class TestPointReport:
    def test_dynamics_mode_gates_fields(self):
        spectral, status = point_report(BASE, dynamics="none")
        assert status == "ok"
        assert spectral.t_est is not None
        assert spectral.t_threshold is None and spectral.t_smoothed is None
        assert spectral.p_max is None

        thresh, _ = point_report(BASE, dynamics="threshold")
        assert thresh.t_threshold is not None and thresh.t_smoothed is None

        smooth, _ = point_report(BASE, dynamics="smoothed")
        assert smooth.t_smoothed is not None and smooth.t_threshold is None
        assert smooth.p_max is not None

        full, _ = point_report(BASE, dynamics="full")
        assert None not in (full.t_threshold, full.t_smoothed, full.p_max)
        assert math.isclose(full.t_threshold, thresh.t_threshold, rel_tol=1e-9)

    def test_unknown_mode_rejected(self):
        with pytest.raises(ValueError):
            point_report(BASE, dynamics="everything")

    def test_series_budget_shows_up_in_status(self):
        report, status = point_report(
            BASE, dynamics="smoothed", horizon=1e9)
        assert status.startswith("dynamics-skipped")
        assert report.t_est is not None  # spectral part survives
        assert report.t_smoothed is None

    def test_smoothed_time_tracks_the_estimate_at_weak_coupling(self):
        cfg = ChainConfig(n_sites=12, a=0.5, p=0.5, j_edge=0.01, j_bulk=1.0)
        report, status = point_report(cfg, dynamics="smoothed", horizon=200000.0, window=40.0)
        assert status == "ok"
        assert report.t_est is not None and report.t_smoothed is not None
        assert abs(report.t_smoothed - report.t_est) < 0.02 * report.t_est
        assert report.p_max > 0.999


class TestRunSweep:
    def test_rows_match_individual_reports(self):
        grid = SweepGrid(BASE, Axis("p", (0.0, 0.5, 1.0)))
        rows = run_sweep(grid)
        assert len(rows) == 3
        for row, cfg in zip(rows, grid.configs()):
            rep, status = point_report(cfg)
            assert row == report_row(cfg, rep, status)

    def test_deterministic_and_thread_invariant(self):
        grid = SweepGrid(BASE, Axis("p", (0.0, 1.0, 2.0)), Axis("a", (0.25, 0.75)))
        once = run_sweep(grid, dynamics="threshold")
        again = run_sweep(grid, dynamics="threshold")
        threaded = run_sweep(grid, dynamics="threshold", threads=4)
        assert once == again == threaded

    def test_bad_point_is_isolated(self):
        # j_edge = 0 is an invalid chain; its row carries the error and
        # every other point still computes
        grid = SweepGrid(BASE, Axis("j_edge", (0.0, 0.5, 1.0)))
        rows = run_sweep(grid)
        assert rows[0]["status"].startswith("error: ValueError")
        assert rows[0]["F"] is None
        assert rows[1]["status"] == "ok" and rows[2]["status"] == "ok"

    def test_row_keys_are_the_table_columns(self):
        grid = SweepGrid(BASE, Axis("p", (1.0,)))
        row = run_sweep(grid)[0]
        assert tuple(row.keys()) == SWEEP_COLUMNS


class TestSpectrumScan:
    def test_columns_and_ordering(self):
        rows = scan_spectrum_vs_p(6, 0.5, 0.05, 1.0, np.linspace(0.0, 2.0, 5))
        cols = spectrum_columns(6)
        assert tuple(rows[0].keys()) == cols
        for row in rows:
            levels = [row[f"lambda_{k}"] for k in range(1, 7)]
            assert levels == sorted(levels)
            assert 1 <= row["index_plus"] <= 6
            assert 1 <= row["index_minus"] <= 6


class TestCompareTstar:
    def test_two_site_gauge_invariance(self):
        # both sites sit at |n - 1.5| = 0.5, so any amplitude is a pure
        # energy shift: the threshold time must not move with a
        rows = compare_tstar(2, 2.0, 1.0, 1.0, [0.3, 1.0])
        t_ref = math.asin(math.sqrt(0.95)) / 2.0
        assert tuple(rows[0].keys()) == TSTAR_COLUMNS
        for row in rows:
            assert abs(row["t_threshold"] - t_ref) < 1e-8
            assert math.isclose(row["t_est"], math.pi / 4.0)

    def test_amplitude_ordering(self):
        rows = compare_tstar(8, 2.0, 1.0, 1.0, [0.3, 0.5])
        assert rows[0]["t_threshold"] < rows[1]["t_threshold"]
        assert rows[0]["t_est"] < rows[1]["t_est"]


class TestLattice:
    def test_reference_point(self):
        ratio = experimental_ratio(RB87_LATTICE)
        assert abs(ratio - 0.08628791216089206) < 1e-12

    def test_zero_trap_frequency_means_zero_ratio(self):
        params = LatticeParams(
            mass=RB87_LATTICE.mass,
            trap_angular_frequency=0.0,
            lattice_spacing=RB87_LATTICE.lattice_spacing,
            hopping_over_hbar=RB87_LATTICE.hopping_over_hbar,
        )
        assert experimental_ratio(params) == 0.0

    def test_spacing_enters_quadratically(self):
        doubled = LatticeParams(
            mass=RB87_LATTICE.mass,
            trap_angular_frequency=RB87_LATTICE.trap_angular_frequency,
            lattice_spacing=2.0 * RB87_LATTICE.lattice_spacing,
            hopping_over_hbar=RB87_LATTICE.hopping_over_hbar,
        )
        assert math.isclose(experimental_ratio(doubled), 4.0 * experimental_ratio(RB87_LATTICE))

    def test_validation(self):
        with pytest.raises(ValueError):
            LatticeParams(mass=0.0, trap_angular_frequency=1.0,
                          lattice_spacing=1.0, hopping_over_hbar=1.0)
        with pytest.raises(ValueError):
            LatticeParams(mass=1.0, trap_angular_frequency=-1.0,
                          lattice_spacing=1.0, hopping_over_hbar=1.0)


class TestPresets:
    @pytest.mark.parametrize("name", PRESET_NAMES)
    def test_all_presets_parse(self, name):
        data = load_preset(name)
        assert data["name"] == name
        assert "chain" in data and "verb" in data
        ChainConfig.from_dict(data["chain"])

    def test_unknown_preset(self):
        with pytest.raises(ValueError, match="unknown preset"):
            load_preset("fig99")

    def test_axis_materialisation(self):
        lin = axis_values({"name": "p", "scale": "linear", "start": 0.0, "stop": 2.0, "count": 5})
        assert lin.values == (0.0, 0.5, 1.0, 1.5, 2.0)
        log = axis_values({"name": "j_edge", "scale": "log", "start": 0.01, "stop": 1.0, "count": 3})
        assert log.values == pytest.approx((0.01, 0.1, 1.0))
