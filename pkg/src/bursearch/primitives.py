"""Successor generation on the joint-angle lattice.

States live on a lattice anchored at the start configuration: state identity
is an integer coordinate vector and configuration = q_start + coord * m_prim.
Successors come either from fixed single-joint steps of length m_prim or
from clearance-adaptive bur spines: single-joint moves of length d_c / r_i,
floored to a multiple of m_prim, which are provably collision-free and
therefore skip explicit edge checking.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .robot import (
    KinematicChain,
    SphereChainModel,
    moment_arms,
    motion_collision_check,
    motion_collision_check_batch,
)

LatticeCoord = tuple[int, ...]

_LIMIT_TOL = 1e-9


class Mode(Enum):
    FIXED = "fixed"
    BUR = "bur"


class Provenance(Enum):
    FIXED = "fixed"
    BUR = "bur"
    GOAL_SNAP = "goal_snap"


@dataclass(frozen=True)
class PrimitiveParams:
    """Successor-generation knobs.

    snap_radius gates the per-expansion direct goal connection (infinity-norm
    test). The default is unbounded (the connection is attempted from every
    expanded state); a finite gate saves collision checks but starves the
    search in wide-open spaces, where bur strides overshoot any small landing
    window around the goal.
    """

    m_prim: float  # radians
    d_crit: float = 0.03  # m; below this, bur expansion degrades to fixed
    mode: Mode = Mode.BUR
    snap_radius: float = math.inf  # radians
    clearance_cap: float = 1.0  # m, reported d_c on an empty grid

    def __post_init__(self):
        if self.m_prim <= 0:
            raise ValueError("m_prim must be positive")
        if self.d_crit <= 0:
            raise ValueError("d_crit must be positive")
        if self.snap_radius < 0:
            raise ValueError("snap_radius must be >= 0")
        if self.clearance_cap <= 0:
            raise ValueError("clearance_cap must be positive")


@dataclass(frozen=True, eq=False)
class Successor:
    """One expansion result entry. coord is None for the goal pseudo-state."""

    coord: LatticeCoord | None
    q: np.ndarray
    cost: float  # C-space Euclidean distance from the expanded configuration
    provenance: Provenance


def spine_length(d_c: float, r_i: float) -> float:
    """Largest provably safe single-joint rotation given clearance d_c.

    Any robot point sits within r_i of the pivot, so a rotation by
    d_c / r_i displaces it by a chord strictly shorter than d_c.
    """
    if r_i <= 0:
        raise ValueError("moment arm must be positive")
    if d_c < 0:
        raise ValueError("clearance must be non-negative")
    return d_c / r_i


def discretize_spine(raw: float, m_prim: float) -> float:
    """Floor a spine length to an integer multiple of the primitive length."""
    if raw < 0 or m_prim <= 0:
        raise ValueError("need raw >= 0 and m_prim > 0")
    return math.floor(raw / m_prim) * m_prim


def _steps_within_limit(chain: KinematicChain, q, i: int, sign: int, m_prim: float) -> int:
    """Largest step count k with q_i + sign*k*m_prim still inside the limits."""
    lo, hi = chain.joint_limits[i]
    head = (hi - q[i]) if sign > 0 else (q[i] - lo)
    k = int(math.floor(head / m_prim + _LIMIT_TOL))
    return max(k, 0)


def _fixed_step_candidates(q, coord, params, chain):
    """In-limit single-step targets as (coord, q) pairs, joint-major order."""
    cands = []
    for i in range(chain.n):
        for sign in (1, -1):
            if _steps_within_limit(chain, q, i, sign, params.m_prim) < 1:
                continue
            q2 = q.copy()
            q2[i] += sign * params.m_prim
            c2 = list(coord)
            c2[i] += sign
            cands.append((tuple(c2), q2))
    return cands


def fixed_successors(
    q: np.ndarray,
    coord: LatticeCoord,
    params: PrimitiveParams,
    chain: KinematicChain,
    model: SphereChainModel,
    grid,
) -> list[Successor]:
    """Up to 2n single-joint steps of length m_prim, each collision-checked."""
    cands = _fixed_step_candidates(q, coord, params, chain)
    if not cands:
        return []
    free = motion_collision_check_batch(
        chain, model, grid, q, np.array([c[1] for c in cands])
    )
    return [
        Successor(coord=c2, q=q2, cost=params.m_prim, provenance=Provenance.FIXED)
        for (c2, q2), ok in zip(cands, free)
        if ok
    ]


def bur_successors(
    q: np.ndarray,
    coord: LatticeCoord,
    d_c: float,
    params: PrimitiveParams,
    chain: KinematicChain,
    model: SphereChainModel,
    grid,
) -> list[Successor]:
    """Clearance-adaptive successors.

    With d_c below d_crit the whole expansion degrades to fixed primitives.
    Otherwise each of the 2n signed joint directions gets a bur spine of
    floor((d_c / r_i) / m_prim) lattice steps, emitted without a collision
    check (clipped to the largest in-limit multiple); directions whose spine
    is shorter than m_prim fall back to a checked fixed step.
    """
    if d_c < params.d_crit:
        return fixed_successors(q, coord, params, chain, model, grid)
    arms = moment_arms(chain, model, q)
    entries: list[tuple] = []  # (coord, q, cost, provenance | None = pending check)
    fallbacks: list[int] = []
    for i in range(chain.n):
        steps = int(math.floor(spine_length(d_c, arms[i]) / params.m_prim))
        for sign in (1, -1):
            k_limit = _steps_within_limit(chain, q, i, sign, params.m_prim)
            if steps >= 1:
                k = min(steps, k_limit)
                if k < 1:
                    continue
                q2 = q.copy()
                q2[i] += sign * k * params.m_prim
                c2 = list(coord)
                c2[i] += sign * k
                entries.append(
                    (tuple(c2), q2, k * params.m_prim, Provenance.BUR)
                )
            else:
                # spine shorter than one primitive: per-direction fallback
                if k_limit < 1:
                    continue
                q2 = q.copy()
                q2[i] += sign * params.m_prim
                c2 = list(coord)
                c2[i] += sign
                fallbacks.append(len(entries))
                entries.append((tuple(c2), q2, params.m_prim, None))
    if fallbacks:
        free = motion_collision_check_batch(
            chain, model, grid, q, np.array([entries[j][1] for j in fallbacks])
        )
        keep = {j for j, ok in zip(fallbacks, free) if ok}
    else:
        keep = set()
    out: list[Successor] = []
    for j, (c2, q2, cost, prov) in enumerate(entries):
        if prov is None:
            if j not in keep:
                continue
            prov = Provenance.FIXED
        out.append(Successor(coord=c2, q=q2, cost=cost, provenance=prov))
    return out


def goal_snap(
    q: np.ndarray,
    q_goal: np.ndarray,
    params: PrimitiveParams,
    chain: KinematicChain,
    model: SphereChainModel,
    grid,
) -> Successor | None:
    """Direct connection attempt to the (possibly off-lattice) goal.

    Fires only within the snap_radius infinity-norm gate and when the
    straight segment passes the interpolated collision check.
    """
    if float(np.abs(q - q_goal).max()) > params.snap_radius:
        return None
    if not motion_collision_check(chain, model, grid, q, q_goal):
        return None
    cost = float(np.linalg.norm(q_goal - q))
    return Successor(coord=None, q=q_goal, cost=cost, provenance=Provenance.GOAL_SNAP)
