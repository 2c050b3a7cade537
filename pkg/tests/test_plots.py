import math

import numpy as np
import pytest

import oracles
from conftest import make_chain
from bursearch.bench import BenchmarkRecord
from bursearch.planner import ara_star, default_params
from bursearch.plots import (
    cspace_collision_raster,
    plot_sweep_trends,
    render_cspace,
    render_workspace,
)
from bursearch.primitives import Mode, Provenance
from bursearch.robot import SphereChainModel, forward_kinematics
from bursearch.workspace import CircleObstacle, GridSpec, Scenario, rasterize

M8 = math.radians(8.0)


def scenario_2dof(obstacles=()):
    return Scenario(
        name="plot_case",
        tier="EASY",
        grid_spec=GridSpec(-1.3, -1.3, 1.3, 1.3, 0.01),
        obstacles=list(obstacles),
        chain=make_chain([0.6, 0.4], limit=math.radians(92)),
        model=SphereChainModel(6, 0.05),
        q_start=np.radians([-60.0, -20.0]),
        q_goal=np.radians([60.0, 24.0]),
    )


@pytest.fixture(scope="module")
def solved_run():
    sc = scenario_2dof([CircleObstacle(0.95, 0.0, 0.12)])
    grid = rasterize(sc)
    params = default_params(2, M8, mode=Mode.BUR, t_plan=30.0, t_repair=30.0)
    res = ara_star(sc, params, grid=grid, record_expansions=True)
    assert res.path
    return sc, grid, res


class TestRenderWorkspace:
    def test_empty_path_writes_file(self, tmp_path):
        sc = scenario_2dof()
        out = render_workspace(sc, [], tmp_path / "w.svg")
        assert out.exists() and out.stat().st_size > 0

    def test_byte_identical_output(self, tmp_path, solved_run):
        sc, _, res = solved_run
        a = render_workspace(sc, res.path, tmp_path / "a.svg")
        b = render_workspace(sc, res.path, tmp_path / "b.svg")
        assert a.read_bytes() == b.read_bytes()

    def test_end_effector_trace_avoids_obstacles(self, solved_run):
        sc, _, res = solved_run
        # sample densely along the path and test tip against source shapes
        for q_a, q_b in zip(res.path[:-1], res.path[1:]):
            for t in np.linspace(0.0, 1.0, 50):
                q = q_a + t * (q_b - q_a)
                tip = forward_kinematics(sc.chain, q)[-1]
                assert not oracles.point_in_obstacles(sc, tip)


class TestRenderCspace:
    def test_rejects_non_2dof(self, tmp_path):
        sc = scenario_2dof()
        sc.chain = make_chain([0.3, 0.3, 0.3])
        sc.q_start = np.zeros(3)
        sc.q_goal = np.zeros(3)
        with pytest.raises(ValueError):
            render_cspace(sc, [], tmp_path / "c.svg")

    def test_empty_workspace_has_no_obstacle_region(self):
        sc = scenario_2dof()
        _, _, mask = cspace_collision_raster(sc, resolution_deg=6.0)
        assert not mask.any()

    def test_raster_matches_collision_predicate(self):
        from bursearch.robot import in_collision

        sc = scenario_2dof([CircleObstacle(0.95, 0.0, 0.12)])
        grid = rasterize(sc)
        a1, a2, mask = cspace_collision_raster(sc, resolution_deg=12.0, grid=grid)
        for i in range(0, len(a1), 3):
            for j in range(0, len(a2), 3):
                q = np.array([a1[i], a2[j]])
                assert mask[i, j] == in_collision(sc.chain, sc.model, grid, q)

    def test_bur_edges_are_step_multiples(self, tmp_path, solved_run):
        sc, grid, res = solved_run
        m_prim = M8
        n_bur = 0
        for rec in res.expansion_log:
            for s in rec.successors:
                if s.provenance is Provenance.BUR:
                    length = float(np.linalg.norm(s.q - rec.q))
                    steps = length / m_prim
                    assert abs(steps - round(steps)) < 1e-9
                    assert round(steps) >= 1
                    n_bur += 1
        assert n_bur > 0
        out = render_cspace(sc, res.expansion_log, tmp_path / "c.svg",
                            resolution_deg=6.0, grid=grid)
        assert out.exists() and out.stat().st_size > 0

    def test_cspace_deterministic(self, tmp_path, solved_run):
        sc, grid, res = solved_run
        a = render_cspace(sc, res.expansion_log, tmp_path / "c1.svg",
                          resolution_deg=12.0, grid=grid)
        b = render_cspace(sc, res.expansion_log, tmp_path / "c2.svg",
                          resolution_deg=12.0, grid=grid)
        assert a.read_bytes() == b.read_bytes()


def test_sweep_trend_figures(tmp_path):
    records = [
        BenchmarkRecord("s", "fixed", 4.0, 1.2, 10, 2.5, 20, 1.0, "SOLVED_OPTIMAL"),
        BenchmarkRecord("s", "bur", 4.0, 1.0, 8, 2.0, 15, 1.0, "SOLVED_OPTIMAL"),
        BenchmarkRecord("s", "fixed", 8.0, 0.6, 6, 1.2, 9, 1.0, "SOLVED_OPTIMAL"),
        BenchmarkRecord("s", "bur", 8.0, 0.5, 5, 1.1, 8, 1.0, "SOLVED_OPTIMAL"),
    ]
    files = plot_sweep_trends(records, tmp_path)
    assert len(files) == 2
    assert all(f.exists() and f.stat().st_size > 0 for f in files)
