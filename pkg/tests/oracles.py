"""Brute-force reference implementations the tests check the library against.

Everything here favors obviousness over speed: exhaustive enumeration over
all occupied cells, dense interpolation sampling, and a full-lattice
Dijkstra. The point-to-box distance mirrors the production arithmetic so
exact floating-point equality is meaningful.
"""

from __future__ import annotations

import heapq
import math

import numpy as np

from bursearch.robot import (
    in_collision,
    motion_collision_check,
    sphere_centers,
    sphere_centers_batch,
)


def box_distance(px, py, lo_x, lo_y, hi_x, hi_y):
    dx = np.maximum(np.maximum(lo_x - px, px - hi_x), 0.0)
    dy = np.maximum(np.maximum(lo_y - py, py - hi_y), 0.0)
    return np.hypot(dx, dy)


def occupied_boxes(grid):
    cells = np.argwhere(grid.occupancy)
    lo = grid.origin + cells * grid.cell_size
    hi = lo + grid.cell_size
    return lo, hi


def exhaustive_min_distance(grid, p) -> float:
    """Min point-to-box distance over every occupied cell, no pruning."""
    if grid.n_occupied == 0:
        return math.inf
    lo, hi = occupied_boxes(grid)
    d = box_distance(p[0], p[1], lo[:, 0], lo[:, 1], hi[:, 0], hi[:, 1])
    return float(d.min())


def exhaustive_clearance(grid, centers, radius, cap=1.0):
    """Clearance from the full sphere x occupied-cell pair enumeration."""
    if grid.n_occupied == 0:
        return cap, False
    lo, hi = occupied_boxes(grid)
    best = math.inf
    for c in centers:
        d = box_distance(c[0], c[1], lo[:, 0], lo[:, 1], hi[:, 0], hi[:, 1])
        best = min(best, float(d.min()))
    raw = best - radius
    return max(0.0, raw), raw <= 0.0


def circle_covers_cell_subsampled(cx, cy, r, cell_lo, cell_size, n=100) -> bool:
    """Subsampling point-in-circle test over an n x n raster of the cell."""
    xs = cell_lo[0] + (np.arange(n) + 0.5) / n * cell_size
    ys = cell_lo[1] + (np.arange(n) + 0.5) / n * cell_size
    gx, gy = np.meshgrid(xs, ys)
    return bool((np.hypot(gx - cx, gy - cy) < r).any())


def dense_edge_free(chain, model, grid, q_a, q_b, spacing) -> bool:
    """Collision-free along the segment by dense sampling at `spacing`."""
    span = float(np.abs(np.asarray(q_b) - np.asarray(q_a)).max())
    samples = max(2, int(math.ceil(span / spacing)) + 1)
    t = np.linspace(0.0, 1.0, samples)
    Q = np.asarray(q_a) + t[:, None] * (np.asarray(q_b) - np.asarray(q_a))
    pts = sphere_centers_batch(chain, model, Q).reshape(-1, 2)
    return not grid.any_within(pts, model.radius)


def lattice_dijkstra(scenario, grid, m_prim, snap_radius=math.inf):
    """Optimal cost start -> goal on the full fixed-primitive lattice.

    Enumerates every in-limit lattice offset from the start, connects
    4-neighbors (per-joint +/- one step) through the same interpolated edge
    check the planner uses, and adds the direct goal connection from any
    node inside the snap gate. Returns math.inf when unreachable.
    """
    chain, model = scenario.chain, scenario.model
    q_start, q_goal = scenario.q_start, scenario.q_goal
    n = chain.n
    lo_steps = []
    hi_steps = []
    for i in range(n):
        lo, hi = chain.joint_limits[i]
        lo_steps.append(-int(math.floor((q_start[i] - lo) / m_prim + 1e-9)))
        hi_steps.append(int(math.floor((hi - q_start[i]) / m_prim + 1e-9)))

    def config(coord):
        return q_start + np.asarray(coord, dtype=float) * m_prim

    free_cache: dict[tuple, bool] = {}

    def is_free(coord):
        v = free_cache.get(coord)
        if v is None:
            v = not in_collision(chain, model, grid, config(coord))
            free_cache[coord] = v
        return v

    start = tuple([0] * n)
    dist = {start: 0.0}
    heap = [(0.0, start)]
    best_goal = math.inf
    while heap:
        d, coord = heapq.heappop(heap)
        if d > dist.get(coord, math.inf):
            continue
        q = config(coord)
        # direct goal connection
        if float(np.abs(q - q_goal).max()) <= snap_radius:
            if motion_collision_check(chain, model, grid, q, q_goal):
                best_goal = min(best_goal, d + float(np.linalg.norm(q_goal - q)))
        for i in range(n):
            for sign in (1, -1):
                k = coord[i] + sign
                if k < lo_steps[i] or k > hi_steps[i]:
                    continue
                nxt = coord[:i] + (k,) + coord[i + 1:]
                if not is_free(nxt):
                    continue
                if not motion_collision_check(chain, model, grid, q, config(nxt)):
                    continue
                nd = d + m_prim
                if nd < dist.get(nxt, math.inf):
                    dist[nxt] = nd
                    heapq.heappush(heap, (nd, nxt))
    return best_goal


def point_in_obstacles(scenario, p) -> bool:
    """Geometric membership test against the source shapes (not the raster)."""
    from bursearch.workspace import CircleObstacle, RectObstacle

    x, y = p
    for obs in scenario.obstacles:
        if isinstance(obs, RectObstacle):
            if obs.x_min <= x <= obs.x_max and obs.y_min <= y <= obs.y_max:
                return True
        else:
            if math.hypot(x - obs.cx, y - obs.cy) <= obs.radius:
                return True
    return False
