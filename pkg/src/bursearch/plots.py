"""Static figure rendering: workspace paths, C-space expansions, sweep trends.

All figures are written as SVG with a fixed hash salt and no embedded
timestamp, so identical inputs produce byte-identical files.
"""

from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np
from matplotlib.collections import LineCollection
from matplotlib.patches import Circle, Rectangle

from .primitives import Provenance
from .robot import forward_kinematics, sphere_centers_batch
from .workspace import CircleObstacle, RectObstacle, Scenario, rasterize

_PROVENANCE_COLORS = {
    Provenance.FIXED: "0.35",
    Provenance.BUR: "crimson",
    Provenance.GOAL_SNAP: "seagreen",
}


def _save_svg(fig, out_path) -> Path:
    out = Path(out_path)
    out.parent.mkdir(parents=True, exist_ok=True)
    with plt.rc_context({"svg.hashsalt": "bursearch"}):
        fig.savefig(out, format="svg", metadata={"Date": None})
    plt.close(fig)
    return out


def _draw_obstacles(ax, scenario: Scenario):
    for obs in scenario.obstacles:
        if isinstance(obs, RectObstacle):
            ax.add_patch(
                Rectangle(
                    (obs.x_min, obs.y_min),
                    obs.x_max - obs.x_min,
                    obs.y_max - obs.y_min,
                    facecolor="0.55",
                    edgecolor="0.3",
                    linewidth=0.5,
                )
            )
        else:
            ax.add_patch(
                Circle(
                    (obs.cx, obs.cy),
                    obs.radius,
                    facecolor="0.55",
                    edgecolor="0.3",
                    linewidth=0.5,
                )
            )


def _draw_arm(ax, scenario, q, color, alpha=1.0, lw=2.0):
    joints = forward_kinematics(scenario.chain, q)
    ax.plot(joints[:, 0], joints[:, 1], "-o", color=color, alpha=alpha,
            linewidth=lw, markersize=2.5)


def render_workspace(scenario: Scenario, path, out_path) -> Path:
    """Workspace view: obstacles, poses along the path, end-effector trace."""
    fig, ax = plt.subplots(figsize=(6, 6))
    gs = scenario.grid_spec
    ax.set_xlim(gs.x_min, gs.x_max)
    ax.set_ylim(gs.y_min, gs.y_max)
    ax.set_aspect("equal")
    ax.add_patch(
        Rectangle(
            (gs.x_min, gs.y_min),
            gs.x_max - gs.x_min,
            gs.y_max - gs.y_min,
            fill=False,
            edgecolor="0.2",
            linewidth=1.0,
        )
    )
    _draw_obstacles(ax, scenario)
    path = [np.asarray(q, dtype=float) for q in path]
    for q in path[1:-1]:
        _draw_arm(ax, scenario, q, color="steelblue", alpha=0.25, lw=1.0)
    if path:
        tips = np.array(
            [forward_kinematics(scenario.chain, q)[-1] for q in path]
        )
        ax.plot(tips[:, 0], tips[:, 1], "-", color="darkorange", linewidth=1.5)
    _draw_arm(ax, scenario, scenario.q_start, color="navy", lw=2.5)
    _draw_arm(ax, scenario, scenario.q_goal, color="seagreen", lw=2.5)
    ax.set_title(scenario.name)
    ax.set_xlabel("x [m]")
    ax.set_ylabel("y [m]")
    return _save_svg(fig, out_path)


def cspace_collision_raster(scenario: Scenario, resolution_deg: float, grid=None):
    """Brute-force collision raster of a 2-DoF configuration space.

    Returns (axis1, axis2, mask) with mask[i, j] true when configuration
    (axis1[i], axis2[j]) collides.
    """
    if scenario.dof != 2:
        raise ValueError("C-space raster requires a 2-DoF robot")
    if grid is None:
        grid = rasterize(scenario)
    step = math.radians(resolution_deg)
    axes = []
    for lo, hi in scenario.chain.joint_limits:
        count = max(2, int(round((hi - lo) / step)) + 1)
        axes.append(np.linspace(lo, hi, count))
    a1, a2 = axes
    Q = np.stack(np.meshgrid(a1, a2, indexing="ij"), axis=-1).reshape(-1, 2)
    centers = sphere_centers_batch(scenario.chain, scenario.model, Q)
    flat = centers.reshape(-1, 2)
    hits = grid.within_mask(flat, scenario.model.radius)
    per_cfg = hits.reshape(len(Q), -1).any(axis=1)
    return a1, a2, per_cfg.reshape(len(a1), len(a2))


def render_cspace(
    scenario: Scenario,
    expansion_log,
    out_path,
    resolution_deg: float = 2.0,
    grid=None,
) -> Path:
    """C-space view: collision region plus expanded states and their edges."""
    a1, a2, mask = cspace_collision_raster(scenario, resolution_deg, grid=grid)
    fig, ax = plt.subplots(figsize=(6, 6))
    deg1 = np.degrees(a1)
    deg2 = np.degrees(a2)
    ax.imshow(
        mask.T,
        origin="lower",
        extent=(deg1[0], deg1[-1], deg2[0], deg2[-1]),
        cmap=matplotlib.colors.ListedColormap(["white", "pink"]),
        vmin=0,
        vmax=1,
        interpolation="nearest",
        aspect="equal",
    )
    if expansion_log:
        segments = {prov: [] for prov in _PROVENANCE_COLORS}
        states = []
        for rec in expansion_log:
            states.append(np.degrees(rec.q))
            for succ in rec.successors:
                segments[succ.provenance].append(
                    [np.degrees(rec.q), np.degrees(succ.q)]
                )
        for prov, segs in segments.items():
            if segs:
                ax.add_collection(
                    LineCollection(
                        segs, colors=_PROVENANCE_COLORS[prov], linewidths=0.7
                    )
                )
        states = np.array(states)
        ax.plot(states[:, 0], states[:, 1], ".", color="black", markersize=2.0)
    ax.plot(*np.degrees(scenario.q_start), marker="s", color="navy", markersize=6)
    ax.plot(*np.degrees(scenario.q_goal), marker="*", color="seagreen", markersize=10)
    ax.set_xlabel("joint 1 [deg]")
    ax.set_ylabel("joint 2 [deg]")
    ax.set_title(f"{scenario.name}: expansions")
    return _save_svg(fig, out_path)


def plot_sweep_trends(records, out_dir) -> list[Path]:
    """Per-scenario trend figures: n_init and t_init versus primitive length."""
    out_dir = Path(out_dir)
    by_scenario: dict[str, list] = {}
    for rec in records:
        by_scenario.setdefault(rec.scenario, []).append(rec)
    written = []
    metrics = [("n_init", "initial expansions"), ("t_init_ms", "initial time [ms]")]
    for name, recs in by_scenario.items():
        for attr, label in metrics:
            fig, ax = plt.subplots(figsize=(4.2, 3.2))
            for mode, style in (("fixed", "o-"), ("bur", "s--")):
                pts = sorted(
                    (r.m_prim_deg, getattr(r, attr))
                    for r in recs
                    if r.mode == mode and getattr(r, attr) is not None
                )
                if pts:
                    xs, ys = zip(*pts)
                    ax.plot(xs, ys, style, label=mode)
            ax.set_xlabel("primitive length [deg]")
            ax.set_ylabel(label)
            ax.set_title(name)
            ax.legend()
            fig.tight_layout()
            written.append(_save_svg(fig, out_dir / f"{name}_{attr}.svg"))
    return written
