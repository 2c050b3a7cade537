"""Command-line interface: plan / bench / plot / validate.

Angles cross this boundary in degrees and are converted once; everything
internal is radians and meters. Reports are written as delimited files with
rendered SVG figures beside them.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np
import yaml

from . import __version__, bench, plots, suite
from .planner import PlannerParams, Status, ara_star, default_params
from .primitives import Mode, PrimitiveParams
from .robot import clearance
from .workspace import (
    Scenario,
    ScenarioParseError,
    ScenarioValidationError,
    load_scenario,
    rasterize,
)

DETERMINISM_NOTE = (
    "planner is deterministic for fixed inputs (no RNG; ties break on "
    "heuristic then lattice coordinate); only wall-clock columns vary"
)


class CliError(Exception):
    """Fatal CLI problem with a user-facing message."""


def _add_planner_flags(p: argparse.ArgumentParser, sweep: bool):
    p.add_argument("--mode", choices=["fixed", "bur"], default="bur")
    if sweep:
        p.add_argument(
            "--mprim-deg",
            default="4,5,6,7,8,9,10,11,12",
            help="comma-separated primitive lengths in degrees",
        )
    else:
        p.add_argument("--mprim-deg", type=float, default=4.0)
    p.add_argument("--eps", type=float, default=None, help="initial inflation")
    p.add_argument("--deps", type=float, default=0.5, help="inflation decrement")
    p.add_argument("--tplan-s", type=float, default=None)
    p.add_argument("--trepair-s", type=float, default=None)
    p.add_argument("--dcrit-m", type=float, default=0.03)
    p.add_argument(
        "--snap-radius-deg",
        default=None,
        help="goal-snap gate in degrees, or 'unbounded' (the default)",
    )
    p.add_argument("--literal-incons", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bursearch",
        description="Lattice search planner for planar arms with adaptive bur primitives",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_plan = sub.add_parser("plan", help="run one planning query")
    p_plan.add_argument("--scenario", required=True)
    p_plan.add_argument("--out", default="runs/plan")
    _add_planner_flags(p_plan, sweep=False)

    p_bench = sub.add_parser("bench", help="run a primitive-length sweep")
    p_bench.add_argument(
        "--scenario",
        action="append",
        default=None,
        help="scenario file; repeatable (default: packaged tier suite)",
    )
    p_bench.add_argument("--reps", type=int, default=1)
    p_bench.add_argument("--csv", default=None, help="CSV path (default <out>/results.csv)")
    p_bench.add_argument("--out", default="runs/bench")
    p_bench.add_argument("--serial", action="store_true")
    _add_planner_flags(p_bench, sweep=True)

    p_plot = sub.add_parser("plot", help="render figures from a stored run")
    p_plot.add_argument("--run", required=True, help="run.json written by plan")
    p_plot.add_argument("--out", default=None, help="output dir (default next to run)")
    p_plot.add_argument("--cspace-res-deg", type=float, default=2.0)

    p_val = sub.add_parser("validate", help="check a scenario file")
    p_val.add_argument("--scenario", required=True)
    return parser


def _parse_snap(value: str | None, dof_default: float | None = None) -> float | None:
    if value is None:
        return None
    if value == "unbounded":
        return math.inf
    try:
        deg = float(value)
    except ValueError:
        raise CliError(f"--snap-radius-deg expects a number or 'unbounded', got {value!r}")
    if deg < 0:
        raise CliError("--snap-radius-deg must be >= 0")
    return math.radians(deg)


def _planner_params(args, scenario: Scenario, m_prim_deg: float) -> PlannerParams:
    snap = _parse_snap(args.snap_radius_deg)
    prims = PrimitiveParams(
        m_prim=math.radians(m_prim_deg),
        d_crit=args.dcrit_m,
        mode=Mode(args.mode),
        **({} if snap is None else {"snap_radius": snap}),
    )
    overrides = {}
    if args.eps is not None:
        overrides["epsilon_init"] = args.eps
    if args.tplan_s is not None:
        overrides["t_plan"] = args.tplan_s
    if args.trepair_s is not None:
        overrides["t_repair"] = args.trepair_s
    params = default_params(scenario.dof, prims.m_prim, primitives=prims, **overrides)
    return replace(
        params, delta_epsilon=args.deps, literal_incons=args.literal_incons
    )


def _params_manifest(scenario: Scenario, params: PlannerParams) -> dict:
    prims = params.primitives
    snap = prims.snap_radius
    return {
        "tool": "bursearch",
        "version": __version__,
        "determinism": DETERMINISM_NOTE,
        "scenario": scenario.name,
        "dof": scenario.dof,
        "params": {
            "mode": prims.mode.value,
            "m_prim_deg": math.degrees(prims.m_prim),
            "d_crit_m": prims.d_crit,
            "snap_radius_deg": "unbounded" if math.isinf(snap) else math.degrees(snap),
            "epsilon_init": params.epsilon_init,
            "delta_epsilon": params.delta_epsilon,
            "t_plan_s": params.t_plan,
            "t_repair_s": params.t_repair,
            "literal_incons": params.literal_incons,
        },
    }


def _load(path: str) -> Scenario:
    try:
        return load_scenario(path)
    except (ScenarioParseError, ScenarioValidationError) as exc:
        raise CliError(str(exc))


def cmd_plan(args) -> int:
    scenario = _load(args.scenario)
    params = _planner_params(args, scenario, args.mprim_deg)
    grid = rasterize(scenario)
    try:
        result = ara_star(scenario, params, grid=grid, record_expansions=True)
    except ValueError as exc:
        raise CliError(f"planning failed: {exc}")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    manifest = _params_manifest(scenario, params)
    manifest["status"] = result.status.value
    manifest["cost_rad"] = None if result.cost == math.inf else result.cost
    manifest["eps_prime_final"] = (
        None if result.eps_prime_final == math.inf else result.eps_prime_final
    )
    with open(out / "manifest.yaml", "w") as fh:
        yaml.safe_dump(manifest, fh, sort_keys=False)

    with open(out / "path.csv", "w") as fh:
        fh.write(",".join(f"q{i+1}_deg" for i in range(scenario.dof)) + "\n")
        for q in result.path:
            fh.write(",".join(repr(v) for v in np.degrees(q)) + "\n")

    run = {
        "manifest": manifest,
        "scenario_file": str(Path(args.scenario).resolve()),
        "path_rad": [list(map(float, q)) for q in result.path],
        "iterations": [
            {
                "epsilon": it.epsilon,
                "eps_prime": it.eps_prime,
                "cost": it.cost,
                "expansions": it.expansions,
                "elapsed_s": it.elapsed_s,
            }
            for it in result.iterations
        ],
        "expansions": [
            {
                "q_rad": list(map(float, rec.q)),
                "d_c": rec.d_c,
                "successors": [
                    {
                        "q_rad": list(map(float, s.q)),
                        "cost": s.cost,
                        "provenance": s.provenance.value,
                    }
                    for s in rec.successors
                ],
            }
            for rec in (result.expansion_log or [])
        ],
    }
    with open(out / "run.json", "w") as fh:
        json.dump(run, fh)

    plots.render_workspace(scenario, result.path, out / "workspace.svg")
    if scenario.dof == 2:
        plots.render_cspace(
            scenario, result.expansion_log, out / "cspace.svg", grid=grid
        )
    if result.status is Status.TIMEOUT_NO_SOLUTION:
        print(f"{scenario.name}: no solution within budget", file=sys.stderr)
        return 1
    print(
        f"{scenario.name}: {result.status.value} cost={result.cost:.4f} "
        f"eps'={result.eps_prime_final:.3f} expansions={result.n_init}"
        f" -> {out}"
    )
    return 0


def cmd_bench(args) -> int:
    if args.scenario:
        scenarios = [_load(p) for p in args.scenario]
    else:
        scenarios = [suite.load_packaged(name) for name in suite.TIER_SUITE]
    try:
        m_values = [float(v) for v in str(args.mprim_deg).split(",") if v.strip()]
    except ValueError:
        raise CliError(f"--mprim-deg expects comma-separated numbers, got {args.mprim_deg!r}")
    overrides = {}
    if args.eps is not None:
        overrides["epsilon_init"] = args.eps
    if args.tplan_s is not None:
        overrides["t_plan"] = args.tplan_s
    if args.trepair_s is not None:
        overrides["t_repair"] = args.trepair_s
    overrides["delta_epsilon"] = args.deps
    overrides["literal_incons"] = args.literal_incons
    prim_overrides = {"d_crit": args.dcrit_m, "snap_radius": _parse_snap(args.snap_radius_deg)}

    spec = bench.SweepSpec(
        scenarios=scenarios,
        m_prim_deg=m_values,
        repetitions=args.reps,
        serial=args.serial,
        params_overrides=overrides,
        prim_overrides=prim_overrides,
    )
    records = bench.run_sweep(spec)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    csv_path = Path(args.csv) if args.csv else out / "results.csv"
    bench.write_csv(records, csv_path)
    tables = bench.format_paired_tables(records)
    ratios = bench.resolution_sensitivity(records)
    with open(out / "tables.txt", "w") as fh:
        fh.write(tables)
        fh.write("\n# resolution sensitivity (n_final fine/coarse)\n")
        for row in ratios:
            fh.write(
                f"{row['scenario']} {row['mode']}: "
                f"{row['n_final_fine']:.0f}/{row['n_final_coarse']:.0f} "
                f"= {row['ratio']:.2f}\n"
            )
    figures = plots.plot_sweep_trends(records, out)
    manifest = {
        "tool": "bursearch",
        "version": __version__,
        "determinism": DETERMINISM_NOTE,
        "scenarios": [s.name for s in scenarios],
        "m_prim_deg": m_values,
        "repetitions": args.reps,
        "modes": ["fixed", "bur"],
        "overrides": {k: v for k, v in overrides.items() if k != "_prim_overrides"},
    }
    with open(out / "bench_manifest.yaml", "w") as fh:
        yaml.safe_dump(manifest, fh, sort_keys=False)
    print(f"wrote {csv_path} and {len(figures)} figures under {out}")
    return 0


def cmd_plot(args) -> int:
    run_path = Path(args.run)
    try:
        run = json.loads(run_path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise CliError(f"cannot read run file {run_path}: {exc}")
    scenario = _load(run["scenario_file"])
    out = Path(args.out) if args.out else run_path.parent
    out.mkdir(parents=True, exist_ok=True)
    path = [np.asarray(q) for q in run["path_rad"]]
    plots.render_workspace(scenario, path, out / "workspace.svg")
    if scenario.dof == 2:
        from .planner import ExpansionRecord
        from .primitives import Provenance, Successor

        log = [
            ExpansionRecord(
                key=None,
                q=np.asarray(rec["q_rad"]),
                d_c=rec["d_c"],
                successors=[
                    Successor(
                        coord=None,
                        q=np.asarray(s["q_rad"]),
                        cost=s["cost"],
                        provenance=Provenance(s["provenance"]),
                    )
                    for s in rec["successors"]
                ],
            )
            for rec in run.get("expansions", [])
        ]
        plots.render_cspace(
            scenario, log, out / "cspace.svg", resolution_deg=args.cspace_res_deg
        )
    print(f"figures written under {out}")
    return 0


def cmd_validate(args) -> int:
    scenario = _load(args.scenario)
    grid = rasterize(scenario)
    print(f"scenario: {scenario.name} (tier {scenario.tier}, {scenario.dof} DoF)")
    print(f"grid: {grid.width}x{grid.height} cells of {grid.cell_size} m, "
          f"{grid.n_occupied} occupied")
    problems = []
    for label, q in (("start", scenario.q_start), ("goal", scenario.q_goal)):
        if not scenario.chain.within_limits(q):
            problems.append(f"{label} violates joint limits")
            continue
        res = clearance(scenario.chain, scenario.model, grid, q)
        print(f"{label}: d_c = {res.d_c:.4f} m")
        if res.in_collision:
            problems.append(f"{label} in collision")
    for msg in problems:
        print(f"error: {msg}", file=sys.stderr)
    if problems:
        return 1
    print("ok")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "plan": cmd_plan,
        "bench": cmd_bench,
        "plot": cmd_plot,
        "validate": cmd_validate,
    }
    try:
        return handlers[args.command](args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
