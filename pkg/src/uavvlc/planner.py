"""Alternating association / placement optimization and its checks."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, replace

import numpy as np

from .association import run_association
from .geometry import as_rng, smallest_enclosing_disk
from .model import (
    NO_PARENT, Association, Placement, Scenario, channel_gain, covers, illuminance,
    objective, sum_rate,
)

__all__ = [
    "PlannerConfig", "PlanResult", "TraceRecord", "Violation", "objective", "check_constraints",
    "optimize_placement", "evaluate", "plan", "exhaustive_solve", "baseline_fixed_placement",
]

# constraint ids reported by check_constraints
SINGLE_SERVER = "single_server"
CAPACITY = "capacity"
D2D_SOURCE = "d2d_source"
D2D_RANGE = "d2d_range"
ILLUMINATION = "illumination"
STRUCTURAL = "structural"

EXHAUSTIVE_MAX_USERS = 10
EXHAUSTIVE_MAX_CAPACITY = 2


@dataclass(frozen=True)
class PlannerConfig:
    max_outer_iters: int = 20
    max_association_rounds: int = 50
    objective_tolerance: float = 1e-6
    seed: int = 0

    def __post_init__(self):
        if self.max_outer_iters < 1 or self.max_association_rounds < 1:
            raise ValueError("iteration limits must be >= 1")
        if not self.objective_tolerance >= 0:
            raise ValueError("objective_tolerance must be >= 0")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")


@dataclass(frozen=True)
class Violation:
    constraint: str
    indices: tuple[int, ...]
    value: float
    bound: float


@dataclass(frozen=True)
class TraceRecord:
    iteration: int
    objective: float
    best_objective: float
    placement: Placement
    feasible: bool


@dataclass(frozen=True)
class PlanResult:
    placement: Placement
    association: Association
    objective: float
    sum_rate: float
    d2d_count: int
    per_user_illuminance: tuple[float, ...]
    feasible: bool
    violations: tuple[Violation, ...] = ()
    trace: tuple[TraceRecord, ...] = ()

    @property
    def iterations(self) -> int:
        """Outer iterations run after the initial association."""
        return max(len(self.trace) - 1, 0)

    def illuminance_margins(self, params) -> np.ndarray:
        """Lux above the threshold for each UAV-served user."""
        lux = np.asarray(self.per_user_illuminance)
        return lux[np.asarray(self.association.uav, dtype=int) > 0] - params.illum_threshold


def check_constraints(
    placement: Placement, association: Association, scenario: Scenario
) -> list[Violation]:
    """Every violated constraint of the joint problem; empty means feasible."""
    n = len(scenario)
    if len(association) != n:
        raise ValueError(f"association covers {len(association)} users, scenario has {n}")
    p = scenario.params
    out: list[Violation] = []

    uav = np.asarray(association.uav, dtype=int)
    parent = np.asarray(association.parent, dtype=int)
    bad_uav = np.flatnonzero(~np.isin(uav, (0, 1, 2)))
    if len(bad_uav):
        out.append(Violation(STRUCTURAL, tuple(bad_uav.tolist()), float(len(bad_uav)), 0.0))
    bad_parent = np.flatnonzero((parent < NO_PARENT) | (parent >= n) | (parent == np.arange(n)))
    if len(bad_parent):
        out.append(Violation(STRUCTURAL, tuple(bad_parent.tolist()), float(len(bad_parent)), 0.0))

    double = np.flatnonzero((uav != 0) & (parent != NO_PARENT))
    if len(double):
        out.append(Violation(SINGLE_SERVER, tuple(double.tolist()), 2.0, 1.0))

    for i in (1, 2):
        served = np.flatnonzero(uav == i)
        if len(served) > p.capacity:
            out.append(Violation(CAPACITY, tuple(served.tolist()), float(len(served)), float(p.capacity)))

    linked = [k for k in range(n) if k not in bad_parent and parent[k] != NO_PARENT]
    for m in linked:
        k = parent[m]
        if uav[k] not in (1, 2):
            out.append(Violation(D2D_SOURCE, (m, int(k)), 0.0, 1.0))
        d = scenario.distances[m, k]
        if d >= p.d2d_range:
            out.append(Violation(D2D_RANGE, (m, int(k)), float(d), p.d2d_range))

    for i in (1, 2):
        for m in np.flatnonzero(uav == i):
            lux = float(illuminance(channel_gain(placement[i], scenario.users[m], p), p))
            if lux < p.illum_threshold:
                out.append(Violation(ILLUMINATION, (int(m),), lux, p.illum_threshold))
    return out


def optimize_placement(
    scenario: Scenario, association: Association, current: Placement | None = None, rng=None
) -> tuple[Placement, tuple[bool, bool]]:
    """Move each UAV over the center of the smallest disk enclosing its users.

    That center minimizes the distance to the farthest served user. A UAV
    without users keeps its position. The flags report whether every served
    user is still illuminated above threshold.
    """
    place = current if current is not None else scenario.start
    rng = as_rng(rng)
    ok = []
    for i in (1, 2):
        served = association.served_by(i)
        if served:
            pts = scenario.users[served]
            place = place.replace(i, smallest_enclosing_disk(pts, rng).center)
            ok.append(bool(np.all(covers(place[i], pts, scenario.params))))
        else:
            ok.append(True)
    return place, (ok[0], ok[1])


def evaluate(
    scenario: Scenario, placement: Placement, association: Association, trace=()
) -> PlanResult:
    """Metrics and feasibility of a (placement, association) pair.

    Illuminance is measured from the serving UAV for centroids and as the
    brighter of the two UAVs for everyone else.
    """
    p = scenario.params
    lux = np.maximum(
        illuminance(channel_gain(placement.uav1, scenario.users, p), p),
        illuminance(channel_gain(placement.uav2, scenario.users, p), p),
    )
    uav = np.asarray(association.uav, dtype=int)
    for i in (1, 2):
        mask = uav == i
        if mask.any():
            lux[mask] = illuminance(channel_gain(placement[i], scenario.users[mask], p), p)
    violations = tuple(check_constraints(placement, association, scenario))
    return PlanResult(
        placement=placement,
        association=association,
        objective=objective(placement, association, scenario),
        sum_rate=sum_rate(placement, association, scenario),
        d2d_count=association.d2d_count,
        per_user_illuminance=tuple(float(x) for x in lux),
        feasible=not violations,
        violations=violations,
        trace=tuple(trace),
    )


def _better(a: PlanResult, b: PlanResult | None, tol: float = 0.0) -> bool:
    if b is None:
        return True
    if a.feasible != b.feasible:
        return a.feasible
    return a.objective > b.objective + tol


def _with_trace(result: PlanResult, trace) -> PlanResult:
    return replace(result, trace=tuple(trace))


def plan(scenario: Scenario, cfg: PlannerConfig = PlannerConfig()) -> PlanResult:
    """Alternate association and placement from the scenario's start placement.

    Iteration 0 associates users at the start placement. Each later
    iteration re-associates at the current placement (warm-started from the
    previous centroids) and then moves the UAVs to their enclosing-disk
    centers. The loop stops once a feasible iteration fails to improve the
    best objective by more than the tolerance; the best solution is
    returned.
    """
    rng = as_rng(cfg.seed)
    place = scenario.start
    assoc = run_association(scenario, place, rng, cfg.max_association_rounds)
    best = evaluate(scenario, place, assoc)
    trace = [TraceRecord(0, best.objective, best.objective, place, best.feasible)]
    restart = False

    for it in range(1, cfg.max_outer_iters + 1):
        if it > 1:
            warm = () if restart else assoc.centroids
            assoc = run_association(scenario, place, rng, cfg.max_association_rounds, warm)
        new_place, ok = optimize_placement(scenario, assoc, place, rng)
        cand = evaluate(scenario, new_place, assoc)
        restart = not all(ok)
        if not restart:
            place = new_place
        improved = _better(cand, best, cfg.objective_tolerance)
        if _better(cand, best):
            best = cand
        trace.append(TraceRecord(it, cand.objective, best.objective, new_place, cand.feasible))
        if cand.feasible and not improved:
            break
    return _with_trace(best, trace)


def baseline_fixed_placement(scenario: Scenario, cfg: PlannerConfig = PlannerConfig()) -> PlanResult:
    """Association only, with the UAVs left at the start placement."""
    rng = as_rng(cfg.seed)
    assoc = run_association(scenario, scenario.start, rng, cfg.max_association_rounds)
    result = evaluate(scenario, scenario.start, assoc)
    return _with_trace(
        result, [TraceRecord(0, result.objective, result.objective, scenario.start, result.feasible)]
    )


def exhaustive_solve(scenario: Scenario) -> PlanResult:
    """Global optimum by enumeration, with each UAV over the enclosing-disk
    center of its centroids.

    For a fixed centroid choice the best D2D assignment links every other
    user to some centroid in range, so enumerating centroid sets for both
    UAVs covers every assignment that can be optimal.
    """
    n, p = len(scenario), scenario.params
    # capacity beyond N never binds, so only min(K, N) sizes the search
    if n > EXHAUSTIVE_MAX_USERS or min(p.capacity, n) > EXHAUSTIVE_MAX_CAPACITY:
        raise ValueError(
            f"instance too large for exhaustive search: N={n}, K={p.capacity} "
            f"(limits N<={EXHAUSTIVE_MAX_USERS}, K<={EXHAUSTIVE_MAX_CAPACITY})"
        )
    subsets = [
        frozenset(c)
        for size in range(min(p.capacity, n) + 1)
        for c in itertools.combinations(range(n), size)
    ]
    rng = as_rng(0)
    centers = {}
    for s in subsets:
        if s:
            pts = scenario.users[sorted(s)]
            center = smallest_enclosing_disk(pts, rng).center
            centers[s] = center
    near = scenario.d2d_neighbors

    best, best_key = None, None
    for s1 in subsets:
        for s2 in subsets:
            if s1 & s2:
                continue
            place = Placement(centers.get(s1, scenario.start.uav1), centers.get(s2, scenario.start.uav2))
            if s1 and not np.all(covers(place.uav1, scenario.users[sorted(s1)], p)):
                continue
            if s2 and not np.all(covers(place.uav2, scenario.users[sorted(s2)], p)):
                continue
            heads = sorted(s1 | s2)
            uav = [1 if m in s1 else 2 if m in s2 else 0 for m in range(n)]
            parent = [NO_PARENT] * n
            for m in range(n):
                if not uav[m]:
                    parent[m] = next((k for k in heads if near[m, k]), NO_PARENT)
            assoc = Association(tuple(uav), tuple(parent))
            value = objective(place, assoc, scenario)
            key = tuple(zip(uav, parent))
            if best is None or value > best[0] or (value == best[0] and key < best_key):
                best, best_key = (value, place, assoc), key
    _, place, assoc = best
    result = evaluate(scenario, place, assoc)
    return _with_trace(result, [TraceRecord(0, result.objective, result.objective, place, result.feasible)])
