"""Planar workspace model: occupancy grid, scenario files, exact distance queries.

The workspace is a 2-D axis-aligned voxel grid. Obstacles come from a
declarative scenario file and are rasterized conservatively (a cell is
occupied iff its square overlaps an obstacle). Distance queries treat
occupied cells as closed squares and return exact point-to-box minima,
which is what makes the clearance-based safety argument of the bur
primitives sound without any inflation heuristics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np
import yaml
from scipy import ndimage
from scipy.spatial import cKDTree

from .robot import KinematicChain, SphereChainModel

UNBOUNDED = math.inf

SCHEMA_VERSION = 1

# Relative slop when classifying cell-boundary contact; geometry closer than
# this to a cell edge is treated as exactly on it.
_EDGE_TOL = 1e-9


class ScenarioParseError(ValueError):
    """Scenario file is missing, malformed, or has unknown structure."""


class ScenarioValidationError(ValueError):
    """Scenario file parsed but its contents are inconsistent."""


@dataclass(frozen=True)
class RectObstacle:
    x_min: float
    y_min: float
    x_max: float
    y_max: float

    def __post_init__(self):
        if self.x_max < self.x_min or self.y_max < self.y_min:
            raise ScenarioValidationError("rect obstacle with inverted corners")


@dataclass(frozen=True)
class CircleObstacle:
    cx: float
    cy: float
    radius: float

    def __post_init__(self):
        if self.radius < 0:
            raise ScenarioValidationError("circle obstacle with negative radius")


Obstacle = RectObstacle | CircleObstacle


@dataclass(frozen=True)
class GridSpec:
    """Workspace bounds and voxel resolution, meters."""

    x_min: float
    y_min: float
    x_max: float
    y_max: float
    cell_size: float

    def __post_init__(self):
        if self.cell_size <= 0:
            raise ScenarioValidationError("cell_size must be > 0")
        if self.x_max <= self.x_min or self.y_max <= self.y_min:
            raise ScenarioValidationError("workspace bounds must have positive extent")


@dataclass
class Scenario:
    """A planning problem: workspace, obstacles, robot, and query endpoints.

    Angles are radians internally; scenario files carry degrees.
    """

    name: str
    tier: str
    grid_spec: GridSpec
    obstacles: list[Obstacle]
    chain: KinematicChain
    model: SphereChainModel
    q_start: np.ndarray
    q_goal: np.ndarray
    source: Path | None = None

    def __post_init__(self):
        self.q_start = np.asarray(self.q_start, dtype=float)
        self.q_goal = np.asarray(self.q_goal, dtype=float)
        n = self.chain.n
        if self.q_start.shape != (n,) or self.q_goal.shape != (n,):
            raise ScenarioValidationError(
                f"start/goal dimension must match the {n}-DoF robot"
            )
        self.model.validate_against(self.chain)
        for obs in self.obstacles:
            if not _bbox_overlaps(obs, self.grid_spec):
                raise ScenarioValidationError(
                    f"obstacle {obs} lies entirely outside the workspace bounds"
                )

    @property
    def dof(self) -> int:
        return self.chain.n


def _bbox_overlaps(obs: Obstacle, spec: GridSpec) -> bool:
    if isinstance(obs, RectObstacle):
        lo = (obs.x_min, obs.y_min)
        hi = (obs.x_max, obs.y_max)
    else:
        lo = (obs.cx - obs.radius, obs.cy - obs.radius)
        hi = (obs.cx + obs.radius, obs.cy + obs.radius)
    return (
        lo[0] <= spec.x_max
        and hi[0] >= spec.x_min
        and lo[1] <= spec.y_max
        and hi[1] >= spec.y_min
    )


# ---------------------------------------------------------------------------
# Scenario files
# ---------------------------------------------------------------------------

def load_scenario(path: str | Path) -> Scenario:
    """Load and validate a scenario file (YAML, degrees/meters).

    Returns a Scenario with angles converted to radians. The grid is not
    rasterized here; start/goal collision checks happen when a planner or
    the `validate` command rasterizes the workspace.
    """
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ScenarioParseError(f"cannot read scenario file {path}: {exc}") from exc
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ScenarioParseError(f"malformed scenario file {path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise ScenarioParseError(f"scenario file {path} must be a mapping")
    return scenario_from_dict(raw, source=path)


def scenario_from_dict(raw: dict, source: Path | None = None) -> Scenario:
    try:
        version = raw["schema_version"]
        name = str(raw["name"])
        tier = str(raw["tier"])
        ws = raw["workspace"]
        spec = GridSpec(
            x_min=float(ws["min"][0]),
            y_min=float(ws["min"][1]),
            x_max=float(ws["max"][0]),
            y_max=float(ws["max"][1]),
            cell_size=float(ws["cell_size"]),
        )
        obstacles = [_obstacle_from_dict(o) for o in raw.get("obstacles", [])]
        rb = raw["robot"]
        link_lengths = [float(v) for v in rb["link_lengths"]]
        base = rb.get("base", [0.0, 0.0])
        limits_deg = rb.get("joint_limits_deg", [-180.0, 180.0])
        chain = KinematicChain(
            base=np.asarray(base, dtype=float),
            link_lengths=np.asarray(link_lengths, dtype=float),
            joint_limits=np.radians(
                np.tile(np.asarray(limits_deg, dtype=float), (len(link_lengths), 1))
            ),
        )
        model = SphereChainModel(
            spheres_per_link=int(rb["spheres_per_link"]),
            radius=float(rb["sphere_radius"]),
        )
        q_start = np.radians(np.asarray(raw["start_deg"], dtype=float))
        q_goal = np.radians(np.asarray(raw["goal_deg"], dtype=float))
    except ScenarioValidationError:
        raise
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise ScenarioParseError(f"malformed scenario: {exc}") from exc
    if version != SCHEMA_VERSION:
        raise ScenarioParseError(
            f"unsupported schema_version {version!r} (expected {SCHEMA_VERSION})"
        )
    return Scenario(
        name=name,
        tier=tier,
        grid_spec=spec,
        obstacles=obstacles,
        chain=chain,
        model=model,
        q_start=q_start,
        q_goal=q_goal,
        source=source,
    )


def _obstacle_from_dict(o: dict) -> Obstacle:
    kind = o.get("type")
    if kind == "rect":
        return RectObstacle(
            x_min=float(o["min"][0]),
            y_min=float(o["min"][1]),
            x_max=float(o["max"][0]),
            y_max=float(o["max"][1]),
        )
    if kind == "circle":
        return CircleObstacle(
            cx=float(o["center"][0]),
            cy=float(o["center"][1]),
            radius=float(o["radius"]),
        )
    raise ScenarioParseError(f"unknown obstacle type {kind!r}")


def scenario_to_dict(scenario: Scenario) -> dict:
    """Inverse of scenario_from_dict (angles back to degrees)."""
    obstacles = []
    for o in scenario.obstacles:
        if isinstance(o, RectObstacle):
            obstacles.append(
                {"type": "rect", "min": [o.x_min, o.y_min], "max": [o.x_max, o.y_max]}
            )
        else:
            obstacles.append(
                {"type": "circle", "center": [o.cx, o.cy], "radius": o.radius}
            )
    gs = scenario.grid_spec
    limits_deg = np.degrees(scenario.chain.joint_limits)
    return {
        "schema_version": SCHEMA_VERSION,
        "name": scenario.name,
        "tier": scenario.tier,
        "workspace": {
            "min": [gs.x_min, gs.y_min],
            "max": [gs.x_max, gs.y_max],
            "cell_size": gs.cell_size,
        },
        "obstacles": obstacles,
        "robot": {
            "base": list(map(float, scenario.chain.base)),
            "link_lengths": list(map(float, scenario.chain.link_lengths)),
            "spheres_per_link": scenario.model.spheres_per_link,
            "sphere_radius": scenario.model.radius,
            "joint_limits_deg": [float(limits_deg[0, 0]), float(limits_deg[0, 1])],
        },
        "start_deg": list(map(float, np.degrees(scenario.q_start))),
        "goal_deg": list(map(float, np.degrees(scenario.q_goal))),
    }


# ---------------------------------------------------------------------------
# Occupancy grid
# ---------------------------------------------------------------------------

@dataclass
class OccupancyGrid:
    """Axis-aligned boolean voxel grid; cells are closed squares.

    occupancy is indexed [ix, iy] with cell (ix, iy) covering
    [origin + ix*cell, origin + (ix+1)*cell] x [... iy ...].
    """

    origin: np.ndarray  # (2,) lower-left corner, m
    cell_size: float
    width: int
    height: int
    occupancy: np.ndarray  # bool, shape (width, height)

    def __post_init__(self):
        self.origin = np.asarray(self.origin, dtype=float)
        if self.cell_size <= 0 or self.width < 1 or self.height < 1:
            raise ValueError("grid needs cell_size > 0 and at least one cell")
        self.occupancy = np.asarray(self.occupancy, dtype=bool)
        if self.occupancy.shape != (self.width, self.height):
            raise ValueError("occupancy shape must be (width, height)")
        self.occupancy.setflags(write=False)

    @cached_property
    def n_occupied(self) -> int:
        return int(self.occupancy.sum())

    @cached_property
    def _index(self):
        return _GridIndex(self)

    # -- queries ----------------------------------------------------------

    def nearest_occupied_distance(self, p) -> float:
        """Exact Euclidean distance from p to the nearest occupied cell square.

        0 inside an occupied cell; UNBOUNDED if nothing is occupied.
        """
        return float(self.min_box_distances(np.asarray(p, dtype=float)[None, :])[0])

    def min_box_distances(self, points: np.ndarray) -> np.ndarray:
        """Vectorized nearest_occupied_distance over an (M, 2) point array."""
        points = np.asarray(points, dtype=float)
        m = len(points)
        if self.n_occupied == 0:
            return np.full(m, UNBOUNDED)
        idx = self._index
        out = np.empty(m)
        cells = np.floor((points - self.origin) / self.cell_size).astype(np.int64)
        inside = (
            (cells[:, 0] >= 0)
            & (cells[:, 0] < self.width)
            & (cells[:, 1] >= 0)
            & (cells[:, 1] < self.height)
        )
        hit = np.zeros(m, dtype=bool)
        ci = cells[inside]
        hit[inside] = self.occupancy[ci[:, 0], ci[:, 1]]
        out[hit] = 0.0
        rest = ~hit
        if rest.any():
            out[rest] = idx.exact_min(points[rest])
        return out

    def within_mask(self, points: np.ndarray, r: float) -> np.ndarray:
        """Per-point test: within distance r (closed) of some occupied cell.

        Equivalent to min_box_distances(points) <= r but cheaper: points are
        resolved through a cascade of bounds (cell occupancy, center-distance
        field, nearest occupied center) and only the residual band falls back
        to the exact query.
        """
        points = np.asarray(points, dtype=float)
        m = len(points)
        if self.n_occupied == 0 or m == 0:
            return np.zeros(m, dtype=bool)
        idx = self._index
        h = idx.half_diag
        out = np.zeros(m, dtype=bool)
        undecided = np.ones(m, dtype=bool)
        cells = np.floor((points - self.origin) / self.cell_size).astype(np.int64)
        inside = (
            (cells[:, 0] >= 0)
            & (cells[:, 0] < self.width)
            & (cells[:, 1] >= 0)
            & (cells[:, 1] < self.height)
        )
        if inside.any():
            where = np.flatnonzero(inside)
            ci = cells[inside]
            occ_hit = self.occupancy[ci[:, 0], ci[:, 1]]
            out[where[occ_hit]] = True
            undecided[where[occ_hit]] = False
            # bounds via the cell-center distance field:
            # d_center - 2h <= true box distance <= d_center + h
            d_center = idx.edt_m[ci[:, 0], ci[:, 1]]
            sure_hit = (d_center + h <= r) & ~occ_hit
            out[where[sure_hit]] = True
            undecided[where[sure_hit]] = False
            sure_free = (d_center - 2.0 * h > r) & ~occ_hit
            undecided[where[sure_free]] = False
        if undecided.any():
            # tighter bounds from the nearest occupied center to the point
            # itself: d0 - h <= true box distance <= box distance to that cell
            sel = np.flatnonzero(undecided)
            pts = points[sel]
            d0, i0 = idx.tree.query(pts)
            b0 = _box_distance(pts, idx.lo[i0], idx.hi[i0])
            hit = b0 <= r
            out[sel[hit]] = True
            residual = ~hit & (d0 - h <= r)
            if residual.any():
                d = idx.exact_min(pts[residual])
                out[sel[residual]] = d <= r
        return out

    def any_within(self, points: np.ndarray, r: float) -> bool:
        """True iff any point lies within distance r of an occupied cell."""
        return bool(self.within_mask(points, r).any())


class _GridIndex:
    """Query acceleration for one immutable grid.

    Holds the occupied-cell boxes, a KD-tree over their centers, and a
    center-to-center distance field. exact_min prunes with the KD-tree but
    evaluates the same point-to-box primitive over every surviving
    candidate, so results are identical to the exhaustive minimum.
    """

    def __init__(self, grid: OccupancyGrid):
        cells = np.argwhere(grid.occupancy)
        self.lo = grid.origin + cells * grid.cell_size
        self.hi = self.lo + grid.cell_size
        centers = self.lo + 0.5 * grid.cell_size
        self.tree = cKDTree(centers)
        self.half_diag = 0.5 * grid.cell_size * math.sqrt(2.0)
        free = ~grid.occupancy
        self.edt_m = (
            ndimage.distance_transform_edt(free) * grid.cell_size
            if free.any()
            else np.zeros_like(grid.occupancy, dtype=float)
        )

    def exact_min(self, points: np.ndarray) -> np.ndarray:
        d0, i0 = self.tree.query(points)
        bound = _box_distance(points, self.lo[i0], self.hi[i0])
        # every cell whose box could beat `bound` has its center within
        # bound + half_diag of the point; pad for float slack
        radius = bound + self.half_diag * (1.0 + 1e-9) + 1e-12
        cand = self.tree.query_ball_point(points, radius)
        counts = np.fromiter((len(c) for c in cand), dtype=np.int64, count=len(cand))
        flat = np.concatenate(cand) if len(cand) else np.empty(0, dtype=np.int64)
        flat = np.asarray(flat, dtype=np.int64)
        rep = np.repeat(points, counts, axis=0)
        d = _box_distance(rep, self.lo[flat], self.hi[flat])
        starts = np.zeros(len(points), dtype=np.int64)
        np.cumsum(counts[:-1], out=starts[1:])
        return np.minimum.reduceat(d, starts)


def _box_distance(p: np.ndarray, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    """Euclidean distance from points to closed axis-aligned boxes."""
    dx = np.maximum(np.maximum(lo[..., 0] - p[..., 0], p[..., 0] - hi[..., 0]), 0.0)
    dy = np.maximum(np.maximum(lo[..., 1] - p[..., 1], p[..., 1] - hi[..., 1]), 0.0)
    return np.hypot(dx, dy)


# ---------------------------------------------------------------------------
# Rasterization
# ---------------------------------------------------------------------------

def rasterize(scenario: Scenario) -> OccupancyGrid:
    """Conservative obstacle rasterization onto the scenario's grid.

    A cell is occupied iff its square and an obstacle overlap with positive
    area; degenerate (zero-area) obstacles occupy every cell they touch.
    """
    spec = scenario.grid_spec
    width = max(1, int(math.ceil((spec.x_max - spec.x_min) / spec.cell_size - _EDGE_TOL)))
    height = max(1, int(math.ceil((spec.y_max - spec.y_min) / spec.cell_size - _EDGE_TOL)))
    occ = np.zeros((width, height), dtype=bool)
    origin = np.array([spec.x_min, spec.y_min])
    cs = spec.cell_size
    for obs in scenario.obstacles:
        if isinstance(obs, RectObstacle):
            xs = _axis_cells(obs.x_min, obs.x_max, spec.x_min, cs, width)
            ys = _axis_cells(obs.y_min, obs.y_max, spec.y_min, cs, height)
            if xs is not None and ys is not None:
                occ[xs[0]:xs[1] + 1, ys[0]:ys[1] + 1] = True
        else:
            _rasterize_circle(occ, obs, origin, cs)
    return OccupancyGrid(
        origin=origin, cell_size=cs, width=width, height=height, occupancy=occ
    )


def _axis_cells(a: float, b: float, origin: float, cs: float, n: int):
    """Index range [lo, hi] of cells overlapping [a, b] along one axis."""
    ta = (a - origin) / cs
    tb = (b - origin) / cs
    if b - a > 0:
        lo = int(math.floor(ta + _EDGE_TOL))
        hi = int(math.ceil(tb - _EDGE_TOL)) - 1
    else:
        # degenerate span: closed touch, including both cells at a shared edge
        lo = int(math.floor(ta - _EDGE_TOL))
        hi = int(math.floor(ta + _EDGE_TOL))
    lo = max(lo, 0)
    hi = min(hi, n - 1)
    if lo > hi:
        return None
    return lo, hi


def _rasterize_circle(occ, obs: CircleObstacle, origin, cs):
    width, height = occ.shape
    xs = _axis_cells(obs.cx - obs.radius, obs.cx + obs.radius, origin[0], cs, width)
    ys = _axis_cells(obs.cy - obs.radius, obs.cy + obs.radius, origin[1], cs, height)
    if xs is None or ys is None:
        return
    ix = np.arange(xs[0], xs[1] + 1)
    iy = np.arange(ys[0], ys[1] + 1)
    gx, gy = np.meshgrid(ix, iy, indexing="ij")
    lo = origin + np.stack([gx, gy], axis=-1) * cs
    hi = lo + cs
    center = np.array([obs.cx, obs.cy])
    d = _box_distance(np.broadcast_to(center, lo.shape), lo, hi)
    if obs.radius > 0:
        mask = d < obs.radius  # positive-area overlap only
    else:
        mask = d <= 0.0
    occ[gx[mask], gy[mask]] = True
