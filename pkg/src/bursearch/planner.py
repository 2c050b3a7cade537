"""Anytime bounded-suboptimal lattice search (ARA*) with adaptive primitives.

Runs a first inflated-heuristic search under the planning budget, then
repairs the solution by decrementing the inflation and reusing inconsistent
nodes until the suboptimality bound reaches 1 or the repair budget expires.
Everything is deterministic for fixed inputs: ties in the priority queue
break on smaller heuristic, then lexicographic lattice coordinate.
"""

from __future__ import annotations

import heapq
import math
import time
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np

from . import robot
from .primitives import (
    Mode,
    PrimitiveParams,
    Provenance,
    Successor,
    bur_successors,
    fixed_successors,
    goal_snap,
)
from .workspace import OccupancyGrid, Scenario, rasterize

INF = math.inf

# dict key of the dedicated off-lattice goal node
GOAL_KEY = "goal"


class Status(Enum):
    SOLVED_OPTIMAL = "SOLVED_OPTIMAL"
    SOLVED_SUBOPTIMAL = "SOLVED_SUBOPTIMAL"
    TIMEOUT_NO_SOLUTION = "TIMEOUT_NO_SOLUTION"


class InvalidQueryError(ValueError):
    """Start or goal configuration unusable (limits or collision)."""


@dataclass
class PlannerParams:
    epsilon_init: float  # >= 1; exactly 1 degenerates to plain A*
    t_plan: float  # s, budget for the first solution
    t_repair: float  # s, additional budget measured from first-solution time
    primitives: PrimitiveParams
    delta_epsilon: float = 0.5
    literal_incons: bool = False  # alternate INCONS bookkeeping, see improve loop

    def __post_init__(self):
        if self.epsilon_init < 1:
            raise ValueError("epsilon_init must be >= 1")
        if self.delta_epsilon <= 0:
            raise ValueError("delta_epsilon must be > 0")
        if self.t_plan <= 0 or self.t_repair <= 0:
            raise ValueError("budgets must be positive")


@dataclass
class IterationRecord:
    epsilon: float
    eps_prime: float
    cost: float
    expansions: int  # closed-set insertions during this improve pass
    elapsed_s: float  # wall clock since search start


@dataclass
class ExpansionRecord:
    key: object
    q: np.ndarray
    d_c: float | None  # None in fixed mode (no clearance query)
    successors: list[Successor]


@dataclass
class PlanResult:
    status: Status
    path: list[np.ndarray]  # start -> goal, empty when no solution
    cost: float
    eps_prime_final: float
    iterations: list[IterationRecord]
    expansion_log: list[ExpansionRecord] | None = None

    @property
    def n_init(self) -> int:
        return self.iterations[0].expansions if self.iterations else 0

    @property
    def t_init_s(self) -> float:
        return self.iterations[0].elapsed_s if self.iterations else 0.0

    def converged_at(self) -> int | None:
        """Index of the first iteration whose bound reached 1, else None."""
        for i, it in enumerate(self.iterations):
            if it.eps_prime <= 1.0:
                return i
        return None

    @property
    def n_final(self) -> int | None:
        i = self.converged_at()
        if i is None:
            return None
        return sum(it.expansions for it in self.iterations[: i + 1])

    @property
    def t_final_s(self) -> float | None:
        i = self.converged_at()
        return self.iterations[i].elapsed_s if i is not None else None


def heuristic(q, q_goal) -> float:
    """Euclidean C-space distance to the goal configuration."""
    q = np.asarray(q, dtype=float)
    q_goal = np.asarray(q_goal, dtype=float)
    if q.shape != q_goal.shape:
        raise ValueError("dimension mismatch")
    return float(np.linalg.norm(q - q_goal))


def edge_cost(q_a, q_b) -> float:
    """Euclidean C-space distance between edge endpoints."""
    return heuristic(q_a, q_b)


def compute_eps_prime(
    epsilon: float, g_goal: float, min_g_plus_h: float | None
) -> float:
    """Suboptimality bound min(eps, g_goal / min(g+h)) over OPEN u INCONS.

    min_g_plus_h is None when the union is empty: an exhausted search with a
    finite goal cost is provably optimal (bound 1); with no solution the
    bound stays at epsilon.
    """
    if min_g_plus_h is None:
        return 1.0 if g_goal < INF else epsilon
    if g_goal == INF:
        return epsilon
    if min_g_plus_h <= 0.0:
        return 1.0 if g_goal <= 0.0 else epsilon
    return max(1.0, min(epsilon, g_goal / min_g_plus_h))


@dataclass
class _Node:
    key: object
    q: np.ndarray
    h: float
    tie: tuple
    g: float = INF
    parent: object = None
    provenance: Provenance | None = None
    closed: bool = False
    in_open: bool = False
    in_incons: bool = False


class _Termination(Enum):
    BOUND_MET = "bound_met"  # f(goal) <= min f over OPEN
    EXHAUSTED = "exhausted"  # OPEN ran dry
    TIMEOUT = "timeout"


class AraStarSearch:
    """Search state for one query; drive via run(), or improve_path directly."""

    def __init__(
        self,
        scenario: Scenario,
        params: PlannerParams,
        grid: OccupancyGrid | None = None,
        record_expansions: bool = False,
    ):
        self.scenario = scenario
        self.params = params
        self.prims = params.primitives
        self.chain = scenario.chain
        self.model = scenario.model
        self.grid = grid if grid is not None else rasterize(scenario)
        self.q_start = scenario.q_start
        self.q_goal = scenario.q_goal
        self.expansion_log: list[ExpansionRecord] | None = (
            [] if record_expansions else None
        )
        self._validate_query()

        m = self.prims.m_prim
        rel = (self.q_goal - self.q_start) / m
        rounded = np.round(rel)
        if np.abs(rel - rounded).max() <= 1e-9:
            self.goal_key: object = tuple(int(v) for v in rounded)
        else:
            self.goal_key = GOAL_KEY

        self.nodes: dict[object, _Node] = {}
        self.open_heap: list[tuple] = []
        self.incons: set = set()
        self._closed_keys: list = []
        self.expansions_total = 0
        # expansions are pure functions of the node; reuse across iterations
        self._succ_cache: dict[object, tuple[float | None, list[Successor]]] = {}

        start = self._get_or_make(tuple([0] * self.chain.n), self.q_start)
        start.g = 0.0
        goal = self._get_or_make(self.goal_key, self.q_goal)
        goal.h = 0.0

    # -- setup helpers ------------------------------------------------------

    def _validate_query(self):
        chain, model, grid = self.chain, self.model, self.grid
        if not chain.within_limits(self.q_start):
            raise InvalidQueryError("start configuration violates joint limits")
        if not chain.within_limits(self.q_goal):
            raise InvalidQueryError("goal configuration violates joint limits")
        if robot.in_collision(chain, model, grid, self.q_start):
            raise InvalidQueryError("start configuration in collision")
        if robot.in_collision(chain, model, grid, self.q_goal):
            raise InvalidQueryError("goal configuration in collision")

    def _get_or_make(self, key, q) -> _Node:
        node = self.nodes.get(key)
        if node is None:
            tie = key if isinstance(key, tuple) else (INF,)
            node = _Node(
                key=key, q=np.asarray(q, dtype=float),
                h=heuristic(q, self.q_goal), tie=tie,
            )
            self.nodes[key] = node
        return node

    def _push_open(self, node: _Node, epsilon: float):
        node.in_open = True
        f = node.g + epsilon * node.h
        heapq.heappush(self.open_heap, (f, node.h, node.tie, node.g, node.key))

    def _peek_valid(self):
        """Top of OPEN with stale entries dropped; None when empty."""
        while self.open_heap:
            f, h, tie, g, key = self.open_heap[0]
            node = self.nodes[key]
            if node.in_open and not node.closed and g == node.g:
                return f, node
            heapq.heappop(self.open_heap)
        return None

    # -- the inner search ---------------------------------------------------

    def improve_path(self, epsilon: float, deadline: float) -> tuple[_Termination, int]:
        """Expand until f(goal) <= min f(OPEN), OPEN empties, or time runs out.

        Returns the termination cause and the number of expansions performed.
        """
        goal = self.nodes[self.goal_key]
        prims = self.prims
        expansions = 0
        while True:
            top = self._peek_valid()
            if top is None:
                return _Termination.EXHAUSTED, expansions
            f_min, node = top
            f_goal = goal.g + epsilon * goal.h  # h is 0; f(goal) = g(goal)
            if f_goal <= f_min:
                return _Termination.BOUND_MET, expansions
            if time.perf_counter() > deadline:
                return _Termination.TIMEOUT, expansions
            heapq.heappop(self.open_heap)
            node.in_open = False
            node.closed = True
            self._closed_keys.append(node.key)
            expansions += 1
            self.expansions_total += 1

            cached = self._succ_cache.get(node.key)
            if cached is None:
                d_c = None
                if prims.mode is Mode.BUR:
                    d_c = robot.clearance(
                        self.chain, self.model, self.grid, node.q,
                        cap=prims.clearance_cap,
                    ).d_c
                    succs = bur_successors(
                        node.q, node.key, d_c, prims, self.chain, self.model,
                        self.grid,
                    )
                else:
                    succs = fixed_successors(
                        node.q, node.key, prims, self.chain, self.model, self.grid
                    )
                snap = goal_snap(
                    node.q, self.q_goal, prims, self.chain, self.model, self.grid
                )
                if snap is not None:
                    succs = succs + [snap]
                self._succ_cache[node.key] = (d_c, succs)
            else:
                d_c, succs = cached
            if self.expansion_log is not None:
                self.expansion_log.append(
                    ExpansionRecord(
                        key=node.key, q=node.q, d_c=d_c, successors=succs
                    )
                )
            for succ in succs:
                key = succ.coord if succ.coord is not None else self.goal_key
                child = self._get_or_make(key, succ.q)
                tentative = node.g + succ.cost
                if tentative < child.g:
                    child.g = tentative
                    child.parent = node.key
                    child.provenance = succ.provenance
                    if not child.closed:
                        self._push_open(child, epsilon)
                    elif not self.params.literal_incons:
                        child.in_incons = True
                        self.incons.add(child.key)
                elif self.params.literal_incons:
                    # as-published variant: non-improving relaxations are
                    # parked in INCONS instead of improving closed nodes
                    child.in_incons = True
                    self.incons.add(child.key)

    def _rebuild_open(self, epsilon: float):
        """Move INCONS into OPEN and re-key everything under the new epsilon."""
        keys = {k for k in self.incons}
        keys.update(
            key
            for f, h, tie, g, key in self.open_heap
            if self.nodes[key].in_open and not self.nodes[key].closed
            and self.nodes[key].g == g
        )
        self.open_heap = []
        for key in self.incons:
            self.nodes[key].in_incons = False
        self.incons.clear()
        for key in sorted(keys, key=lambda k: self.nodes[k].tie):
            self._push_open(self.nodes[key], epsilon)

    def _clear_closed(self):
        for key in self._closed_keys:
            self.nodes[key].closed = False
        self._closed_keys = []

    def _min_g_plus_h(self) -> float | None:
        best = INF
        seen = False
        for f, h, tie, g, key in self.open_heap:
            node = self.nodes[key]
            if node.in_open and not node.closed and node.g == g:
                seen = True
                v = node.g + node.h
                if v < best:
                    best = v
        for key in self.incons:
            node = self.nodes[key]
            seen = True
            v = node.g + node.h
            if v < best:
                best = v
        return best if seen else None

    def reconstruct_path(self) -> list[np.ndarray]:
        """Follow parents from the goal back to the start, reversed."""
        goal = self.nodes[self.goal_key]
        if goal.g == INF:
            raise RuntimeError("no path recorded for the goal")
        path = []
        key = self.goal_key
        while key is not None:
            node = self.nodes[key]
            path.append(node.q.copy())
            if node.parent is None and node.g != 0.0:
                raise RuntimeError("broken parent chain")
            key = node.parent
        path.reverse()
        return path

    # -- the anytime loop ---------------------------------------------------

    def run(self) -> PlanResult:
        params = self.params
        epsilon = params.epsilon_init
        t0 = time.perf_counter()
        start = self.nodes[tuple([0] * self.chain.n)]
        self._push_open(start, epsilon)

        reason, expansions = self.improve_path(epsilon, t0 + params.t_plan)
        goal = self.nodes[self.goal_key]
        t_first = time.perf_counter()
        if goal.g == INF:
            return PlanResult(
                status=Status.TIMEOUT_NO_SOLUTION,
                path=[],
                cost=INF,
                eps_prime_final=INF,
                iterations=[],
                expansion_log=self.expansion_log,
            )

        eps_prime = compute_eps_prime(epsilon, goal.g, self._min_g_plus_h())
        iterations = [
            IterationRecord(epsilon, eps_prime, goal.g, expansions, t_first - t0)
        ]
        best_path = self.reconstruct_path()
        best_cost = goal.g

        deadline = t_first + params.t_repair
        while eps_prime > 1.0 and time.perf_counter() < deadline:
            epsilon = max(1.0, epsilon - params.delta_epsilon)
            self._rebuild_open(epsilon)
            self._clear_closed()
            reason, expansions = self.improve_path(epsilon, deadline)
            now = time.perf_counter() - t0
            if reason is _Termination.TIMEOUT:
                # interrupted pass: the bound formula is not valid, but any
                # improved path still honors the previously proven bound
                if goal.g < best_cost:
                    best_cost = goal.g
                    best_path = self.reconstruct_path()
                    iterations.append(
                        IterationRecord(epsilon, eps_prime, goal.g, expansions, now)
                    )
                break
            raw = compute_eps_prime(epsilon, goal.g, self._min_g_plus_h())
            eps_prime = min(eps_prime, raw)
            best_cost = goal.g
            best_path = self.reconstruct_path()
            iterations.append(
                IterationRecord(epsilon, eps_prime, goal.g, expansions, now)
            )

        status = Status.SOLVED_OPTIMAL if eps_prime <= 1.0 else Status.SOLVED_SUBOPTIMAL
        return PlanResult(
            status=status,
            path=best_path,
            cost=best_cost,
            eps_prime_final=eps_prime,
            iterations=iterations,
            expansion_log=self.expansion_log,
        )


def ara_star(
    scenario: Scenario,
    params: PlannerParams,
    grid: OccupancyGrid | None = None,
    record_expansions: bool = False,
) -> PlanResult:
    """Plan one query: first solution under t_plan, then anytime repair."""
    search = AraStarSearch(
        scenario, params, grid=grid, record_expansions=record_expansions
    )
    return search.run()


def default_params(
    dof: int, m_prim: float, mode: Mode = Mode.BUR, **overrides
) -> PlannerParams:
    """Stock search parameters keyed on manipulator class.

    Two-joint arms: epsilon 10, 5 s planning, 1 s repair. Larger arms:
    epsilon 50, 60 s planning, 40 s repair.
    """
    prims = overrides.pop("primitives", None)
    if prims is None:
        prims = PrimitiveParams(m_prim=m_prim, mode=mode)
    if dof <= 2:
        base = dict(epsilon_init=10.0, t_plan=5.0, t_repair=1.0)
    else:
        base = dict(epsilon_init=50.0, t_plan=60.0, t_repair=40.0)
    base.update(overrides)
    return PlannerParams(primitives=prims, **base)
