"""Search-based motion planning for planar arms with adaptive bur primitives."""

__version__ = "0.1.0"

from .planner import (  # noqa: F401
    PlannerParams,
    PlanResult,
    Status,
    ara_star,
    compute_eps_prime,
    default_params,
    edge_cost,
    heuristic,
)
from .primitives import (  # noqa: F401
    Mode,
    PrimitiveParams,
    Provenance,
    Successor,
    bur_successors,
    discretize_spine,
    fixed_successors,
    goal_snap,
    spine_length,
)
from .robot import (  # noqa: F401
    ClearanceResult,
    KinematicChain,
    SphereChainModel,
    clearance,
    forward_kinematics,
    moment_arm,
    moment_arms,
    motion_collision_check,
    sphere_centers,
)
from .workspace import (  # noqa: F401
    CircleObstacle,
    GridSpec,
    OccupancyGrid,
    RectObstacle,
    Scenario,
    ScenarioParseError,
    ScenarioValidationError,
    load_scenario,
    rasterize,
)
