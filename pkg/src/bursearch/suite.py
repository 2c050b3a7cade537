"""The shipped scenario suite.

Six tiered scenarios (2-DoF and 7-DoF, EASY/MEDIUM/HARD, difficulty graded
by obstacle count and proximity) plus a cluttered-corridor scenario whose
clearance stays below the bur degradation threshold everywhere the search
goes. Geometry is defined here; the packaged YAML files are generated from
these builders (``python -m bursearch.suite <dir>``).
"""

from __future__ import annotations

import math
import sys
from importlib import resources
from pathlib import Path

import numpy as np
import yaml

from .robot import KinematicChain, SphereChainModel
from .workspace import (
    CircleObstacle,
    GridSpec,
    RectObstacle,
    Scenario,
    load_scenario,
    scenario_to_dict,
)

TIER_SUITE = [
    "2dof_easy",
    "2dof_medium",
    "2dof_hard",
    "7dof_easy",
    "7dof_medium",
    "7dof_hard",
]

EXTRA = ["2dof_corridor"]


def _chain(base, lengths, limit_deg=180.0) -> KinematicChain:
    n = len(lengths)
    lim = math.radians(limit_deg)
    return KinematicChain(
        base=np.asarray(base, dtype=float),
        link_lengths=np.asarray(lengths, dtype=float),
        joint_limits=np.tile([-lim, lim], (n, 1)),
    )


def _two_dof(name, tier, obstacles, start_deg, goal_deg) -> Scenario:
    return Scenario(
        name=name,
        tier=tier,
        grid_spec=GridSpec(-2.2, -2.2, 2.2, 2.2, 0.01),
        obstacles=obstacles,
        chain=_chain([0.0, 0.0], [1.0, 1.0]),
        model=SphereChainModel(spheres_per_link=10, radius=0.05),
        q_start=np.radians(start_deg),
        q_goal=np.radians(goal_deg),
    )


def _seven_dof(name, tier, obstacles, start_deg, goal_deg) -> Scenario:
    return Scenario(
        name=name,
        tier=tier,
        grid_spec=GridSpec(-1.7, -1.7, 1.7, 1.7, 0.01),
        obstacles=obstacles,
        chain=_chain([0.0, 0.0], [0.2] * 7),
        model=SphereChainModel(spheres_per_link=4, radius=0.05),
        q_start=np.radians(start_deg),
        q_goal=np.radians(goal_deg),
    )


def _arc(angles_deg, radius, pillar_r):
    return [
        CircleObstacle(
            radius * math.cos(math.radians(a)),
            radius * math.sin(math.radians(a)),
            pillar_r,
        )
        for a in angles_deg
    ]


# The 2-DoF arm sweeps its base joint from the lower-left to the upper-left
# quadrant, transiting the bottom/right/top sectors; obstacles sit in those
# transit sectors, outside the first link's disc (radius 1.05) so the base
# joint is never partitioned.

def two_dof_easy() -> Scenario:
    return _two_dof(
        "2dof_easy",
        "EASY",
        [
            CircleObstacle(1.45, 1.45, 0.22),
            CircleObstacle(-1.5, -1.35, 0.22),
            RectObstacle(1.35, -1.85, 1.85, -1.35),
        ],
        start_deg=[-130.0, -40.0],
        goal_deg=[120.0, 60.0],
    )


def two_dof_medium() -> Scenario:
    return _two_dof(
        "2dof_medium",
        "MEDIUM",
        [
            CircleObstacle(0.2, -1.45, 0.22),
            CircleObstacle(1.35, -0.7, 0.18),
            CircleObstacle(1.5, 0.35, 0.16),
            CircleObstacle(0.6, 1.4, 0.18),
            RectObstacle(-0.3, 1.45, 0.15, 1.9),
        ],
        start_deg=[-135.0, -50.0],
        goal_deg=[115.0, 65.0],
    )


def two_dof_hard() -> Scenario:
    return _two_dof(
        "2dof_hard",
        "HARD",
        _arc([-85, -55, -25, 5, 35, 65], 1.25, 0.15)
        + _arc([-70, -40, -10, 20, 50, 80], 1.68, 0.18)
        + [CircleObstacle(1.5, -1.15, 0.16), CircleObstacle(-0.05, 1.72, 0.16)],
        start_deg=[-135.0, -50.0],
        goal_deg=[115.0, 65.0],
    )


# The 7-DoF journeys unwind a clockwise curl into its mirror image while the
# base joint sweeps 200 degrees; blockers near the reach boundary veto the
# near-straight configurations of the direct interpolation, forcing curled
# detours whose clearance stays moderate.

_SEVEN_START = [-100.0, -10.0, -20.0, -30.0, -40.0, -50.0, -60.0]
_SEVEN_GOAL = [100.0, 10.0, 20.0, 30.0, 40.0, 50.0, 60.0]


def seven_dof_easy() -> Scenario:
    return _seven_dof(
        "7dof_easy",
        "EASY",
        _arc([-50, 0, 50], 1.35, 0.15),
        start_deg=_SEVEN_START,
        goal_deg=_SEVEN_GOAL,
    )


def seven_dof_medium() -> Scenario:
    return _seven_dof(
        "7dof_medium",
        "MEDIUM",
        _arc([-70, -35, 0, 35, 70], 1.32, 0.16),
        start_deg=_SEVEN_START,
        goal_deg=_SEVEN_GOAL,
    )


def seven_dof_hard() -> Scenario:
    return _seven_dof(
        "7dof_hard",
        "HARD",
        _arc([-80, -57, -34, -11, 12, 35, 58, 81], 1.24, 0.18),
        start_deg=_SEVEN_START,
        goal_deg=_SEVEN_GOAL,
    )


def two_dof_corridor() -> Scenario:
    """Cluttered ring just beyond the straight arm's tip.

    The tip disc stays within ~0.02 m of the wall for any base rotation, so
    clearance sits below the 0.03 m degradation threshold along the whole
    search corridor.
    """
    reach = 1.25  # 1.0 + 0.25 links
    pillar_r = 0.04
    ring_r = reach + 0.05 + pillar_r + 0.02  # sphere radius + pillar + gap
    pillars = [
        CircleObstacle(
            ring_r * math.cos(math.radians(a)),
            ring_r * math.sin(math.radians(a)),
            pillar_r,
        )
        for a in range(0, 360, 2)
    ]
    return Scenario(
        name="2dof_corridor",
        tier="HARD",
        grid_spec=GridSpec(-1.5, -1.5, 1.5, 1.5, 0.01),
        obstacles=pillars,
        chain=_chain([0.0, 0.0], [1.0, 0.25]),
        model=SphereChainModel(spheres_per_link=10, radius=0.05),
        q_start=np.radians([0.0, 0.0]),
        q_goal=np.radians([60.0, 0.0]),
    )


_BUILDERS = {
    "2dof_easy": two_dof_easy,
    "2dof_medium": two_dof_medium,
    "2dof_hard": two_dof_hard,
    "7dof_easy": seven_dof_easy,
    "7dof_medium": seven_dof_medium,
    "7dof_hard": seven_dof_hard,
    "2dof_corridor": two_dof_corridor,
}


def build(name: str) -> Scenario:
    try:
        return _BUILDERS[name]()
    except KeyError:
        raise KeyError(f"unknown scenario {name!r}; have {sorted(_BUILDERS)}") from None


def tier_suite() -> list[Scenario]:
    return [build(name) for name in TIER_SUITE]


def write_scenario_yaml(scenario: Scenario, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        yaml.safe_dump(scenario_to_dict(scenario), fh, sort_keys=False)
    return path


def write_suite(out_dir) -> list[Path]:
    out_dir = Path(out_dir)
    return [
        write_scenario_yaml(build(name), out_dir / f"{name}.yaml")
        for name in TIER_SUITE + EXTRA
    ]


def packaged_scenario_path(name: str) -> Path:
    """Filesystem path of a packaged scenario file."""
    res = resources.files("bursearch").joinpath(f"data/scenarios/{name}.yaml")
    with resources.as_file(res) as p:
        return Path(p)


def load_packaged(name: str) -> Scenario:
    return load_scenario(packaged_scenario_path(name))


if __name__ == "__main__":
    target = sys.argv[1] if len(sys.argv) > 1 else "."
    for p in write_suite(target):
        print(p)
