"""Planar n-link revolute chain with a sphere-chain collision model.

All operations are pure functions of immutable inputs: forward kinematics,
minimum clearance against an occupancy grid, per-joint moment arms (the
lever lengths that bound workspace displacement per radian), and swept-edge
collision checking by dense interpolation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

# d_c reported on an obstacle-free grid; keeps adaptive step sizes finite.
DEFAULT_CLEARANCE_CAP = 1.0


@dataclass
class KinematicChain:
    base: np.ndarray  # (2,) m
    link_lengths: np.ndarray  # (n,) m
    joint_limits: np.ndarray  # (n, 2) radians, [lo, hi] rows

    def __post_init__(self):
        self.base = np.asarray(self.base, dtype=float)
        self.link_lengths = np.asarray(self.link_lengths, dtype=float)
        self.joint_limits = np.asarray(self.joint_limits, dtype=float)
        if self.base.shape != (2,):
            raise ValueError("base must be a 2-D point")
        if self.link_lengths.ndim != 1 or len(self.link_lengths) < 1:
            raise ValueError("need at least one link")
        if (self.link_lengths <= 0).any():
            raise ValueError("link lengths must be positive")
        if self.joint_limits.shape != (self.n, 2):
            raise ValueError("joint_limits must be (n, 2)")
        if (self.joint_limits[:, 0] >= self.joint_limits[:, 1]).any():
            raise ValueError("joint limits must satisfy lo < hi")
        for a in (self.base, self.link_lengths, self.joint_limits):
            a.setflags(write=False)

    @property
    def n(self) -> int:
        return len(self.link_lengths)

    @property
    def reach(self) -> float:
        return float(self.link_lengths.sum())

    def within_limits(self, q: np.ndarray, tol: float = 1e-9) -> bool:
        q = np.asarray(q, dtype=float)
        return bool(
            (q >= self.joint_limits[:, 0] - tol).all()
            and (q <= self.joint_limits[:, 1] + tol).all()
        )


@dataclass
class SphereChainModel:
    """Equal-radius discs per link, centers at fractions j/k (tip inclusive)."""

    spheres_per_link: int
    radius: float

    def __post_init__(self):
        if self.spheres_per_link < 1:
            raise ValueError("need at least one sphere per link")
        if self.radius <= 0:
            raise ValueError("sphere radius must be positive")

    @cached_property
    def fractions(self) -> np.ndarray:
        k = self.spheres_per_link
        f = np.arange(1, k + 1, dtype=float) / k
        f.setflags(write=False)
        return f

    def validate_against(self, chain: KinematicChain):
        """Consecutive centers must be no farther apart than a disc diameter."""
        spacing = chain.link_lengths / self.spheres_per_link
        if (spacing > 2.0 * self.radius + 1e-12).any():
            raise ValueError(
                "sphere spacing exceeds disc diameter; links are not covered"
            )


@dataclass
class ClearanceResult:
    d_c: float  # m, >= 0; surface-to-cell minimum over all discs
    in_collision: bool


def _check_dim(chain: KinematicChain, q: np.ndarray) -> np.ndarray:
    q = np.asarray(q, dtype=float)
    if q.shape != (chain.n,):
        raise ValueError(f"configuration must have {chain.n} joints, got {q.shape}")
    return q


def forward_kinematics(chain: KinematicChain, q) -> np.ndarray:
    """Joint positions p_0..p_n, shape (n+1, 2)."""
    q = _check_dim(chain, q)
    ang = np.cumsum(q)
    steps = chain.link_lengths[:, None] * np.stack([np.cos(ang), np.sin(ang)], axis=1)
    return np.vstack([chain.base, chain.base + np.cumsum(steps, axis=0)])


def sphere_centers(chain: KinematicChain, model: SphereChainModel, q) -> np.ndarray:
    """Disc centers for one configuration, shape (n * spheres_per_link, 2)."""
    return sphere_centers_batch(chain, model, np.asarray(q, dtype=float)[None, :])[0]


def sphere_centers_batch(
    chain: KinematicChain, model: SphereChainModel, Q: np.ndarray
) -> np.ndarray:
    """Disc centers for a batch of configurations: (S, n*k, 2)."""
    Q = np.asarray(Q, dtype=float)
    if Q.ndim != 2 or Q.shape[1] != chain.n:
        raise ValueError(f"batch must be (S, {chain.n})")
    ang = np.cumsum(Q, axis=1)  # (S, n)
    dirs = np.stack([np.cos(ang), np.sin(ang)], axis=-1)  # (S, n, 2)
    steps = chain.link_lengths[None, :, None] * dirs
    joints = chain.base + np.cumsum(steps, axis=1)  # (S, n, 2) tips
    prev = np.concatenate(
        [np.broadcast_to(chain.base, (len(Q), 1, 2)), joints[:, :-1, :]], axis=1
    )
    offs = chain.link_lengths[None, :, None, None] * model.fractions[None, None, :, None]
    centers = prev[:, :, None, :] + dirs[:, :, None, :] * offs  # (S, n, k, 2)
    return centers.reshape(len(Q), chain.n * model.spheres_per_link, 2)


def clearance(
    chain: KinematicChain,
    model: SphereChainModel,
    grid,
    q,
    cap: float = DEFAULT_CLEARANCE_CAP,
) -> ClearanceResult:
    """Minimum robot-to-obstacle clearance d_c (surface to occupied cell).

    d_c = max(0, min over discs of nearest_occupied_distance(center) - radius).
    A disc whose center is within its radius of an occupied cell (boundary
    included) is a collision. An obstacle-free grid reports d_c = cap.
    """
    q = _check_dim(chain, q)
    if grid.n_occupied == 0:
        return ClearanceResult(d_c=cap, in_collision=False)
    centers = sphere_centers(chain, model, q)
    raw = float(grid.min_box_distances(centers).min()) - model.radius
    return ClearanceResult(d_c=max(0.0, raw), in_collision=raw <= 0.0)


def in_collision(chain: KinematicChain, model: SphereChainModel, grid, q) -> bool:
    q = _check_dim(chain, q)
    centers = sphere_centers(chain, model, q)
    return grid.any_within(centers, model.radius)


def moment_arm(
    chain: KinematicChain, model: SphereChainModel, q, joint: int
) -> float:
    """Lever length r of one joint (0-based): the largest distance from the
    joint's pivot to any disc surface on the same or a more distal link.

    Rotating the joint by ang moves every robot point by strictly less than
    ang * r, which is what upper-bounds safe single-joint steps by d_c / r.
    """
    if not 0 <= joint < chain.n:
        raise IndexError(f"joint index {joint} out of range for {chain.n}-DoF chain")
    return float(moment_arms(chain, model, q)[joint])


def moment_arms(chain: KinematicChain, model: SphereChainModel, q) -> np.ndarray:
    """All n lever lengths at once, shape (n,)."""
    q = _check_dim(chain, q)
    joints = forward_kinematics(chain, q)  # (n+1, 2); pivot of joint i is joints[i]
    centers = sphere_centers(chain, model, q).reshape(
        chain.n, model.spheres_per_link, 2
    )
    pivots = joints[: chain.n]  # (n, 2)
    diff = centers[None, :, :, :] - pivots[:, None, None, :]
    dist = np.hypot(diff[..., 0], diff[..., 1])  # (n pivots, n links, k)
    r = np.empty(chain.n)
    for i in range(chain.n):
        r[i] = dist[i, i:, :].max() + model.radius
    return r


def default_motion_step(chain: KinematicChain, model: SphereChainModel, grid) -> float:
    """Interpolation step that keeps per-sample workspace sweep below one cell."""
    return grid.cell_size / (chain.reach + model.radius)


_CHUNK = 32  # samples per collision query on long edges (early exit)


def _sample_count(span: float, step: float) -> int:
    if span == 0.0:
        return 1
    return int(math.ceil(span / step - 1e-12)) + 1


def motion_collision_check(
    chain: KinematicChain,
    model: SphereChainModel,
    grid,
    q_a,
    q_b,
    step: float | None = None,
) -> bool:
    """True iff the straight C-space segment q_a -> q_b is collision-free.

    Samples configurations spaced at most `step` apart in the infinity norm,
    endpoints included; bails out at the first colliding sample.
    """
    q_a = _check_dim(chain, q_a)
    q_b = _check_dim(chain, q_b)
    if step is None:
        step = default_motion_step(chain, model, grid)
    if step <= 0:
        raise ValueError("step must be positive")
    samples = _sample_count(float(np.abs(q_b - q_a).max()), step)
    t = np.linspace(0.0, 1.0, samples)
    for lo in range(0, samples, _CHUNK):
        Q = q_a + t[lo:lo + _CHUNK, None] * (q_b - q_a)
        pts = sphere_centers_batch(chain, model, Q).reshape(-1, 2)
        if grid.any_within(pts, model.radius):
            return False
    return True


def motion_collision_check_batch(
    chain: KinematicChain,
    model: SphereChainModel,
    grid,
    q_a,
    targets: np.ndarray,
    step: float | None = None,
) -> np.ndarray:
    """Vectorized edge check from one source to E equal-span targets.

    All edges share the sample count of the widest one, so this is meant for
    bundles of fixed primitives; returns a boolean (E,) array, True = free.
    """
    q_a = _check_dim(chain, q_a)
    targets = np.asarray(targets, dtype=float)
    if targets.ndim != 2 or targets.shape[1] != chain.n:
        raise ValueError(f"targets must be (E, {chain.n})")
    if len(targets) == 0:
        return np.zeros(0, dtype=bool)
    if step is None:
        step = default_motion_step(chain, model, grid)
    samples = _sample_count(float(np.abs(targets - q_a).max()), step)
    t = np.linspace(0.0, 1.0, samples)
    # (E, S, n) lattice of interpolated configurations
    Q = q_a + t[None, :, None] * (targets - q_a)[:, None, :]
    pts = sphere_centers_batch(chain, model, Q.reshape(-1, chain.n))
    hits = grid.within_mask(pts.reshape(-1, 2), model.radius)
    per_edge = hits.reshape(len(targets), -1).any(axis=1)
    return ~per_edge
