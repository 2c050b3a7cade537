import math
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from bursearch.robot import KinematicChain, SphereChainModel, clearance
from bursearch.workspace import (
    CircleObstacle,
    GridSpec,
    OccupancyGrid,
    RectObstacle,
    Scenario,
    rasterize,
)

LIM = math.radians(180.0)


def make_chain(lengths, base=(0.0, 0.0), limit=LIM):
    n = len(lengths)
    return KinematicChain(
        base=np.asarray(base, dtype=float),
        link_lengths=np.asarray(lengths, dtype=float),
        joint_limits=np.tile([-limit, limit], (n, 1)),
    )


def make_grid(origin, cell_size, occupied, width=None, height=None):
    """Grid from a list of occupied (ix, iy) cells."""
    occupied = list(occupied)
    if width is None:
        width = max((c[0] for c in occupied), default=0) + 1
    if height is None:
        height = max((c[1] for c in occupied), default=0) + 1
    occ = np.zeros((width, height), dtype=bool)
    for ix, iy in occupied:
        occ[ix, iy] = True
    return OccupancyGrid(
        origin=np.asarray(origin, dtype=float),
        cell_size=cell_size,
        width=width,
        height=height,
        occupancy=occ,
    )


def random_grid(rng, width=20, height=20, n_occupied=40, cell_size=0.1,
                origin=(-1.0, -1.0)):
    occ = np.zeros((width, height), dtype=bool)
    idx = rng.choice(width * height, size=n_occupied, replace=False)
    occ[idx // height, idx % height] = True
    return OccupancyGrid(
        origin=np.asarray(origin, dtype=float),
        cell_size=cell_size,
        width=width,
        height=height,
        occupancy=occ,
    )


def small_scenario(seed: int) -> Scenario:
    """Small random 2-DoF problem with a modest lattice (|coords| <= 23).

    Obstacles live beyond the first link's disc so the base joint is not
    partitioned; start and goal are resampled until collision-free, well
    separated, and actually connectable (checked with a quick inflated
    search at the finest primitive length the tests use).
    """
    import bursearch.planner as planner
    from bursearch.primitives import Mode, PrimitiveParams

    for attempt in range(50):
        rng = np.random.default_rng(seed * 1000 + attempt)
        chain = make_chain([0.6, 0.4], limit=math.radians(92.0))
        model = SphereChainModel(spheres_per_link=6, radius=0.05)
        n_obs = int(rng.integers(2, 5))
        obstacles = []
        for _ in range(n_obs):
            ang = rng.uniform(-math.pi, math.pi)
            rad = rng.uniform(0.78, 1.15)
            obstacles.append(
                CircleObstacle(
                    rad * math.cos(ang), rad * math.sin(ang), rng.uniform(0.06, 0.14)
                )
            )
        scenario = Scenario(
            name=f"small_{seed}",
            tier="EASY",
            grid_spec=GridSpec(-1.3, -1.3, 1.3, 1.3, 0.01),
            obstacles=obstacles,
            chain=chain,
            model=model,
            q_start=np.zeros(2),
            q_goal=np.zeros(2),
        )
        grid = rasterize(scenario)
        lim = math.radians(90.0)

        def sample_free():
            for _ in range(500):
                q = rng.uniform(-lim, lim, size=2)
                if not clearance(chain, model, grid, q).in_collision:
                    return q
            return None

        q_start = sample_free()
        q_goal = sample_free()
        if q_start is None or q_goal is None:
            continue
        if np.linalg.norm(q_goal - q_start) <= 0.8:
            continue
        scenario.q_start = q_start
        scenario.q_goal = q_goal
        probe = planner.PlannerParams(
            epsilon_init=10.0,
            t_plan=20.0,
            t_repair=0.01,
            primitives=PrimitiveParams(m_prim=math.radians(4.0), mode=Mode.FIXED),
        )
        result = planner.ara_star(scenario, probe, grid=grid)
        if result.status is not planner.Status.TIMEOUT_NO_SOLUTION:
            return scenario
    raise RuntimeError(f"no solvable small scenario found for seed {seed}")


@pytest.fixture(scope="session")
def corridor_scenario():
    from bursearch import suite

    return suite.load_packaged("2dof_corridor")


@pytest.fixture(scope="session")
def easy2_scenario():
    from bursearch import suite

    return suite.load_packaged("2dof_easy")
