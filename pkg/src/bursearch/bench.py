"""Benchmark harness: repeated planner runs, sweeps, and table/CSV output.

A sweep runs every (scenario, primitive length, mode) cell some number of
times, averages wall-clock metrics, and reports expansion counts and path
cost, which are deterministic. Cells can run in parallel across processes;
repetitions inside one cell always run sequentially so sibling cells do not
perturb each other's timing.
"""

from __future__ import annotations

import csv
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

from .planner import PlanResult, Status, ara_star, default_params
from .primitives import Mode, PrimitiveParams
from .workspace import Scenario, rasterize

CSV_FIELDS = [
    "scenario",
    "mode",
    "m_prim_deg",
    "t_init_ms",
    "n_init",
    "t_final_ms",
    "n_final",
    "c_rad",
    "status",
]


@dataclass
class BenchmarkRecord:
    scenario: str
    mode: str
    m_prim_deg: float
    t_init_ms: float | None
    n_init: float | None
    t_final_ms: float | None
    n_final: float | None
    c_rad: float | None
    status: str

    def as_row(self) -> list[str]:
        def fmt(v):
            if v is None:
                return ""
            if isinstance(v, float):
                return repr(v)
            return str(v)

        return [
            self.scenario,
            self.mode,
            fmt(self.m_prim_deg),
            fmt(self.t_init_ms),
            fmt(self.n_init),
            fmt(self.t_final_ms),
            fmt(self.n_final),
            fmt(self.c_rad),
            self.status,
        ]


@dataclass
class SweepSpec:
    scenarios: list[Scenario]
    m_prim_deg: list[float]
    repetitions: int = 1
    modes: tuple[Mode, ...] = (Mode.FIXED, Mode.BUR)
    serial: bool = False
    # overrides applied on top of the per-DoF defaults (epsilon_init, t_plan, ...)
    params_overrides: dict = field(default_factory=dict)
    # overrides for successor generation (d_crit, snap_radius, ...)
    prim_overrides: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")
        if not self.m_prim_deg or any(v <= 0 for v in self.m_prim_deg):
            raise ValueError("m_prim values must be positive")


def run_single(scenario, params, mode=None, grid=None) -> BenchmarkRecord:
    """One planner execution reduced to a metrics record."""
    record, _ = run_single_with_result(scenario, params, mode=mode, grid=grid)
    return record


def run_single_with_result(
    scenario, params, mode=None, grid=None, record_expansions=False
) -> tuple[BenchmarkRecord, PlanResult | None]:
    if mode is not None:
        params = replace(params, primitives=replace(params.primitives, mode=mode))
    label = params.primitives.mode.value
    m_deg = math.degrees(params.primitives.m_prim)
    if grid is None:
        grid = rasterize(scenario)
    try:
        result = ara_star(
            scenario, params, grid=grid, record_expansions=record_expansions
        )
    except ValueError as exc:
        rec = BenchmarkRecord(
            scenario=scenario.name, mode=label, m_prim_deg=m_deg,
            t_init_ms=None, n_init=None, t_final_ms=None, n_final=None,
            c_rad=None, status=f"INVALID:{exc}",
        )
        return rec, None
    if result.status is Status.TIMEOUT_NO_SOLUTION:
        rec = BenchmarkRecord(
            scenario=scenario.name, mode=label, m_prim_deg=m_deg,
            t_init_ms=None, n_init=None, t_final_ms=None, n_final=None,
            c_rad=None, status=result.status.value,
        )
        return rec, result
    t_final = result.t_final_s
    rec = BenchmarkRecord(
        scenario=scenario.name,
        mode=label,
        m_prim_deg=m_deg,
        t_init_ms=result.t_init_s * 1e3,
        n_init=result.n_init,
        t_final_ms=None if t_final is None else t_final * 1e3,
        n_final=result.n_final,
        c_rad=result.cost,
        status=result.status.value,
    )
    return rec, result


def _run_cell(args) -> BenchmarkRecord:
    scenario, m_prim_deg, mode, repetitions, overrides, prim_overrides = args
    prims = PrimitiveParams(
        m_prim=math.radians(m_prim_deg),
        mode=mode,
        **{k: v for k, v in prim_overrides.items() if v is not None},
    )
    params = default_params(
        scenario.dof, prims.m_prim, primitives=prims, **overrides
    )
    grid = rasterize(scenario)  # excluded from timing
    records = [run_single(scenario, params, grid=grid) for _ in range(repetitions)]
    # report the nominal sweep value, not its degrees->radians round-trip
    return replace(_aggregate(records), m_prim_deg=m_prim_deg)


def _aggregate(records: list[BenchmarkRecord]) -> BenchmarkRecord:
    first = records[0]

    def mean(values):
        vals = [v for v in values if v is not None]
        return sum(vals) / len(vals) if len(vals) == len(values) else None

    return BenchmarkRecord(
        scenario=first.scenario,
        mode=first.mode,
        m_prim_deg=first.m_prim_deg,
        t_init_ms=mean([r.t_init_ms for r in records]),
        n_init=mean([r.n_init for r in records]),
        t_final_ms=mean([r.t_final_ms for r in records]),
        n_final=mean([r.n_final for r in records]),
        c_rad=first.c_rad,
        status=first.status,
    )


def run_sweep(spec: SweepSpec) -> list[BenchmarkRecord]:
    """All (scenario, m_prim, mode) cells, aggregated over repetitions.

    Row order: scenario (given order), then m_prim ascending as given, then
    mode in the given order.
    """
    cells = [
        (scenario, m_deg, mode, spec.repetitions, spec.params_overrides,
         spec.prim_overrides)
        for scenario in spec.scenarios
        for m_deg in spec.m_prim_deg
        for mode in spec.modes
    ]
    if spec.serial or len(cells) == 1:
        return [_run_cell(c) for c in cells]
    workers = min(len(cells), os.cpu_count() or 1)
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_run_cell, cells))


def write_csv(records: list[BenchmarkRecord], path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_FIELDS)
        for rec in records:
            writer.writerow(rec.as_row())
    return path


def format_paired_tables(records: list[BenchmarkRecord]) -> str:
    """Per-scenario tables with one row per primitive length and paired
    fixed/bur cells, mirroring the usual comparison layout."""
    by_scenario: dict[str, dict[float, dict[str, BenchmarkRecord]]] = {}
    order: list[str] = []
    for rec in records:
        if rec.scenario not in by_scenario:
            order.append(rec.scenario)
        by_scenario.setdefault(rec.scenario, {}).setdefault(rec.m_prim_deg, {})[
            rec.mode
        ] = rec

    def cell(a, b, fmt):
        left = "-" if a is None else fmt.format(a)
        right = "-" if b is None else fmt.format(b)
        return f"{left} / {right}"

    lines = []
    for name in order:
        lines.append(f"# {name} (fixed / bur)")
        lines.append("m_prim_deg | t_init_ms | n_init | t_final_ms | n_final | c")
        for m_deg in sorted(by_scenario[name]):
            pair = by_scenario[name][m_deg]
            fx = pair.get("fixed")
            br = pair.get("bur")

            def pick(attr, fmt):
                return cell(
                    getattr(fx, attr) if fx else None,
                    getattr(br, attr) if br else None,
                    fmt,
                )

            lines.append(
                " | ".join(
                    [
                        f"{m_deg:g}",
                        pick("t_init_ms", "{:.2f}"),
                        pick("n_init", "{:.0f}"),
                        pick("t_final_ms", "{:.2f}"),
                        pick("n_final", "{:.0f}"),
                        pick("c_rad", "{:.2f}"),
                    ]
                )
            )
        lines.append("")
    return "\n".join(lines)


def resolution_sensitivity(records: list[BenchmarkRecord]) -> list[dict]:
    """Spread of n_final between the coarsest and finest primitive length.

    Reports, per scenario and mode with n_final at both extremes, the ratio
    n_final(min m_prim) / n_final(max m_prim); smaller means less sensitive
    to graph resolution.
    """
    by_key: dict[tuple[str, str], dict[float, BenchmarkRecord]] = {}
    for rec in records:
        by_key.setdefault((rec.scenario, rec.mode), {})[rec.m_prim_deg] = rec
    out = []
    for (scenario, mode), recs in by_key.items():
        lo, hi = min(recs), max(recs)
        a, b = recs[lo].n_final, recs[hi].n_final
        if lo == hi or a is None or b is None or b == 0:
            continue
        out.append(
            {
                "scenario": scenario,
                "mode": mode,
                "m_prim_deg_fine": lo,
                "m_prim_deg_coarse": hi,
                "n_final_fine": a,
                "n_final_coarse": b,
                "ratio": a / b,
            }
        )
    return out
