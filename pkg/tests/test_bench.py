import csv
import math

import numpy as np
import pytest

from conftest import make_chain
from bursearch.bench import (
    CSV_FIELDS,
    BenchmarkRecord,
    SweepSpec,
    format_paired_tables,
    resolution_sensitivity,
    run_single,
    run_sweep,
    write_csv,
)
from bursearch.planner import PlannerParams, default_params
from bursearch.primitives import Mode, PrimitiveParams
from bursearch.robot import SphereChainModel
from bursearch.workspace import GridSpec, RectObstacle, Scenario

M4 = math.radians(4.0)


def empty_scenario():
    return Scenario(
        name="bench_free",
        tier="EASY",
        grid_spec=GridSpec(-1.3, -1.3, 1.3, 1.3, 0.01),
        obstacles=[],
        chain=make_chain([0.6, 0.4], limit=math.radians(92)),
        q_start=np.radians([0.0, 0.0]),
        q_goal=np.radians([40.0, -24.0]),
        model=SphereChainModel(6, 0.05),
    )


def walled_scenario():
    sc = empty_scenario()
    sc.name = "bench_walled"
    sc.obstacles = [
        RectObstacle(0.3, -0.02, 1.25, 0.02),
        RectObstacle(-1.25, -0.02, -0.3, 0.02),
    ]
    sc.q_start = np.radians([-90.0, 0.0])
    sc.q_goal = np.radians([90.0, 0.0])
    return sc


class TestRunSingle:
    def test_trivial_converges_in_one_iteration(self):
        sc = empty_scenario()
        params = default_params(2, M4, mode=Mode.FIXED, t_plan=20.0, t_repair=20.0)
        rec = run_single(sc, params)
        assert rec.status == "SOLVED_OPTIMAL"
        assert rec.t_final_ms is not None
        assert rec.n_final == rec.n_init
        assert rec.c_rad == pytest.approx(
            float(np.linalg.norm(sc.q_goal - sc.q_start))
        )

    def test_unreachable_goal(self):
        sc = walled_scenario()
        params = default_params(
            2, math.radians(12.0), mode=Mode.FIXED, t_plan=30.0, t_repair=1.0
        )
        rec = run_single(sc, params)
        assert rec.status == "TIMEOUT_NO_SOLUTION"
        assert rec.c_rad is None and rec.t_init_ms is None

    def test_invalid_query_marked(self):
        sc = empty_scenario()
        sc.q_goal = np.radians([120.0, 0.0])  # beyond the 92 deg limits
        params = default_params(2, M4)
        rec = run_single(sc, params)
        assert rec.status.startswith("INVALID")

    def test_mode_override(self):
        sc = empty_scenario()
        params = default_params(2, M4, mode=Mode.FIXED, t_plan=20.0, t_repair=20.0)
        rec = run_single(sc, params, mode=Mode.BUR)
        assert rec.mode == "bur"


class TestRunSweep:
    def sweep(self, reps=1, m_values=(4.0, 8.0, 12.0)):
        return SweepSpec(
            scenarios=[empty_scenario()],
            m_prim_deg=list(m_values),
            repetitions=reps,
            serial=True,
            params_overrides=dict(t_plan=20.0, t_repair=20.0),
        )

    def test_single_rep_equals_single_run(self):
        records = run_sweep(self.sweep())
        assert len(records) == 6  # 3 m_prim x 2 modes
        sc = empty_scenario()
        for rec in records:
            params = default_params(
                2, math.radians(rec.m_prim_deg), mode=Mode(rec.mode),
                t_plan=20.0, t_repair=20.0,
            )
            ref = run_single(sc, params)
            assert rec.n_init == ref.n_init
            assert rec.n_final == ref.n_final
            assert rec.c_rad == ref.c_rad

    def test_deterministic_counts_across_reps(self):
        records = run_sweep(self.sweep(reps=3, m_values=(8.0,)))
        for rec in records:
            assert rec.n_init == int(rec.n_init)  # mean of identical ints

    def test_row_structure_nine_rows(self):
        spec = self.sweep(m_values=tuple(range(4, 13)))
        records = run_sweep(spec)
        per_mode = {}
        for rec in records:
            per_mode.setdefault(rec.mode, []).append(rec.m_prim_deg)
        assert sorted(per_mode) == ["bur", "fixed"]
        for values in per_mode.values():
            assert values == [float(v) for v in range(4, 13)]

    def test_validation(self):
        with pytest.raises(ValueError):
            SweepSpec(scenarios=[], m_prim_deg=[4.0], repetitions=0)
        with pytest.raises(ValueError):
            SweepSpec(scenarios=[], m_prim_deg=[])


class TestOutputs:
    def records(self):
        return [
            BenchmarkRecord("s", "fixed", 4.0, 1.25, 10, 2.5, 20, 1.0, "SOLVED_OPTIMAL"),
            BenchmarkRecord("s", "bur", 4.0, 1.0, 8, 2.0, 15, 1.0, "SOLVED_OPTIMAL"),
            BenchmarkRecord("s", "fixed", 12.0, 0.5, 4, 1.0, 5, 1.1, "SOLVED_OPTIMAL"),
            BenchmarkRecord("s", "bur", 12.0, 0.5, 4, 1.0, 5, 1.1, "SOLVED_OPTIMAL"),
            BenchmarkRecord("t", "fixed", 4.0, None, None, None, None, None,
                            "TIMEOUT_NO_SOLUTION"),
        ]

    def test_csv_layout(self, tmp_path):
        path = write_csv(self.records(), tmp_path / "r.csv")
        with open(path) as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == CSV_FIELDS
        assert len(rows) == 6
        assert rows[5][3] == ""  # absent value serialized as empty

    def test_paired_tables(self):
        text = format_paired_tables(self.records())
        assert "# s (fixed / bur)" in text
        lines = [l for l in text.splitlines() if l and l[0].isdigit()]
        # one row per m_prim for scenario "s", one for "t"
        assert len(lines) == 3
        assert "1.25 / 1.00" in text
        assert "- / -" in text  # timeout row

    def test_resolution_sensitivity(self):
        rows = resolution_sensitivity(self.records())
        by_mode = {r["mode"]: r for r in rows if r["scenario"] == "s"}
        assert by_mode["fixed"]["ratio"] == pytest.approx(20 / 5)
        assert by_mode["bur"]["ratio"] == pytest.approx(15 / 5)
