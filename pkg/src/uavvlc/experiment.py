"""Seeded experiment sweeps over weights or UAV capacity.

Each (seed, sweep point) runs the alternating planner and the
fixed-placement baseline on the same uniformly drawn users and yields one
``ResultRecord`` per method.
"""
from __future__ import annotations

import csv
import json
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from .files import (
    EXPERIMENT_FORMAT, ConfigError, check_format, check_keys, expect, params_from_json,
    params_to_json, placement_from_json, placement_to_json, planner_from_json, planner_to_json,
    read_json, save_solution, write_json,
)
from .model import NetworkParams, Placement, Scenario
from .planner import PlannerConfig, baseline_fixed_placement, plan

log = logging.getLogger(__name__)

SWEEP_AXES = ("none", "weights", "capacity")
METHODS = ("plan", "baseline")


def generate_scenario(
    params: NetworkParams, n_users: int, seed: int, start: Placement | None = None
) -> Scenario:
    """``n_users`` independent uniform users over the area."""
    if n_users < 1:
        raise ValueError("n_users must be >= 1")
    rng = np.random.default_rng(seed)
    users = rng.uniform((0.0, 0.0), (params.area_width, params.area_height), size=(n_users, 2))
    return Scenario(users, params, seed=seed, start=start or Placement.corner())


@dataclass(frozen=True)
class ExperimentSpec:
    params: NetworkParams = field(default_factory=NetworkParams)
    n_users: int = 200
    seeds: tuple[int, ...] = tuple(range(20))
    sweep: str = "none"
    # (a, b) pairs for "weights", capacities for "capacity"
    sweep_values: tuple = ()
    planner: PlannerConfig = field(default_factory=PlannerConfig)
    start: Placement = field(default_factory=Placement.corner)
    out_dir: str = "results"

    def __post_init__(self):
        object.__setattr__(self, "seeds", tuple(self.seeds))
        values = tuple(tuple(v) if isinstance(v, (list, tuple)) else v for v in self.sweep_values)
        object.__setattr__(self, "sweep_values", values)
        if not self.seeds:
            raise ValueError("seeds must be non-empty")
        if any(s < 0 for s in self.seeds):
            raise ValueError("seeds must be non-negative")
        if self.n_users < 1:
            raise ValueError("n_users must be >= 1")
        if self.sweep not in SWEEP_AXES:
            raise ValueError(f"sweep must be one of {SWEEP_AXES}, got {self.sweep!r}")
        if self.sweep != "none" and not values:
            raise ValueError(f"sweep {self.sweep!r} needs sweep_values")
        # builds every point's params, raising on bad weights or capacities
        self.points()

    def points(self) -> list[tuple[str, NetworkParams]]:
        """(label, params) for every sweep point."""
        if self.sweep == "none":
            return [("", self.params)]
        out = []
        for i, v in enumerate(self.sweep_values):
            try:
                if self.sweep == "weights":
                    a, b = v
                    out.append((f"a={a:.12g},b={b:.12g}", replace(self.params, weight_rate=a, weight_d2d=b)))
                else:
                    out.append((f"K={v}", replace(self.params, capacity=v)))
            except (TypeError, ValueError) as err:
                raise ValueError(f"sweep_values[{i}]: {err}") from None
        return out


@dataclass(frozen=True)
class ResultRecord:
    seed: int
    sweep: str
    point: str
    method: str
    objective: float = math.nan
    sum_rate: float = math.nan
    d2d_count: int = 0
    centroids: int = 0
    min_margin: float | None = None
    mean_margin: float | None = None
    iterations: int = 0
    feasible: bool = False
    wall_time: float = 0.0
    error: str = ""


TIMING_FIELDS = ("wall_time",)


def _run_point(spec: ExperimentSpec, seed: int, index: int, label: str, params: NetworkParams,
               solutions_dir: str | None):
    records = []
    try:
        scenario = generate_scenario(params, spec.n_users, seed, spec.start)
    except ValueError as err:
        return [ResultRecord(seed, spec.sweep, label, m, error=str(err)) for m in METHODS]
    cfg = replace(spec.planner, seed=seed)
    for method, solver in (("plan", plan), ("baseline", baseline_fixed_placement)):
        t0 = time.perf_counter()
        try:
            result = solver(scenario, cfg)
        except Exception as err:  # a failed point must not stop the sweep
            log.warning("seed %d %s %s failed: %s", seed, label, method, err)
            records.append(ResultRecord(seed, spec.sweep, label, method, error=repr(err)))
            continue
        elapsed = time.perf_counter() - t0
        margins = result.illuminance_margins(params)
        records.append(ResultRecord(
            seed=seed,
            sweep=spec.sweep,
            point=label,
            method=method,
            objective=result.objective,
            sum_rate=result.sum_rate,
            d2d_count=result.d2d_count,
            centroids=len(result.association.centroids),
            min_margin=float(margins.min()) if len(margins) else None,
            mean_margin=float(margins.mean()) if len(margins) else None,
            iterations=result.iterations,
            feasible=result.feasible,
            wall_time=elapsed,
        ))
        if solutions_dir is not None:
            name = f"seed{seed}_p{index}_{method}.json"
            save_solution(scenario, result, Path(solutions_dir) / name)
    return records


def run_experiment(
    spec: ExperimentSpec, jobs: int = 1, solutions_dir: str | None = None
) -> list[ResultRecord]:
    """Plan and baseline records for every (seed, sweep point).

    Records come back sorted by seed, then sweep point, then method,
    whatever order the workers finish in.
    """
    tasks = [
        (spec, seed, i, label, params, solutions_dir)
        for seed in spec.seeds
        for i, (label, params) in enumerate(spec.points())
    ]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(_run_point, *zip(*tasks)))
    else:
        chunks = [_run_point(*t) for t in tasks]
    order = {label: i for i, (label, _) in enumerate(spec.points())}
    records = [r for chunk in chunks for r in chunk]
    records.sort(key=lambda r: (spec.seeds.index(r.seed), order[r.point], METHODS.index(r.method)))
    return records


def summarize(records) -> list[dict]:
    """Per (sweep point, method) means and minima over seeds."""
    groups: dict[tuple[str, str], list[ResultRecord]] = {}
    for r in records:
        groups.setdefault((r.point, r.method), []).append(r)
    rows = []
    for (point, method), group in groups.items():
        ok = [r for r in group if not r.error]
        mins = [r.min_margin for r in ok if r.min_margin is not None]
        means = [r.mean_margin for r in ok if r.mean_margin is not None]

        def mean(attr):
            return float(np.mean([getattr(r, attr) for r in ok])) if ok else math.nan

        rows.append({
            "point": point,
            "method": method,
            "runs": len(group),
            "failed": len(group) - len(ok),
            "feasible": sum(r.feasible for r in ok),
            "objective_mean": mean("objective"),
            "sum_rate_mean": mean("sum_rate"),
            "d2d_count_mean": mean("d2d_count"),
            "centroids_mean": mean("centroids"),
            "iterations_mean": mean("iterations"),
            "min_margin_min": min(mins) if mins else math.nan,
            "mean_margin_mean": float(np.mean(means)) if means else math.nan,
        })
    return rows


def _csv_value(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return v


def save_results(records, out_dir, summary=None) -> dict[str, Path]:
    """Write ``records.jsonl``, ``results.csv`` and ``summary.csv`` under out_dir."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {"records": out / "records.jsonl", "table": out / "results.csv",
             "summary": out / "summary.csv"}
    with paths["records"].open("w") as fh:
        for r in records:
            fh.write(json.dumps(asdict(r)) + "\n")
    names = [f.name for f in fields(ResultRecord)]
    with paths["table"].open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(names)
        for r in records:
            w.writerow([_csv_value(getattr(r, n)) for n in names])
    summary = summarize(records) if summary is None else summary
    with paths["summary"].open("w", newline="") as fh:
        if summary:
            w = csv.DictWriter(fh, fieldnames=list(summary[0]))
            w.writeheader()
            for row in summary:
                w.writerow({k: _csv_value(v) for k, v in row.items()})
    return paths


def load_records(path) -> list[ResultRecord]:
    with Path(path).open() as fh:
        return [ResultRecord(**json.loads(line)) for line in fh if line.strip()]


def spec_to_json(spec: ExperimentSpec) -> dict:
    return {
        "format": EXPERIMENT_FORMAT,
        "params": params_to_json(spec.params),
        "n_users": spec.n_users,
        "seeds": list(spec.seeds),
        "sweep": {"axis": spec.sweep, "values": [list(v) if isinstance(v, tuple) else v
                                                 for v in spec.sweep_values]},
        "planner": planner_to_json(spec.planner),
        "start": placement_to_json(spec.start),
        "out_dir": spec.out_dir,
    }


def spec_from_json(doc) -> ExperimentSpec:
    check_format(doc, EXPERIMENT_FORMAT)
    check_keys(doc, ("format", "params", "n_users", "seeds", "sweep", "planner", "start", "out_dir"))
    kwargs = {}
    if "params" in doc:
        kwargs["params"] = params_from_json(doc["params"])
    if "n_users" in doc:
        kwargs["n_users"] = expect(doc, "n_users", int)
    if "seeds" in doc:
        seeds = expect(doc, "seeds", list)
        for i, s in enumerate(seeds):
            if not isinstance(s, int) or isinstance(s, bool) or s < 0:
                raise ConfigError(f"field 'seeds[{i}]': expected non-negative integer, got {s!r}")
        kwargs["seeds"] = tuple(seeds)
    if "sweep" in doc:
        sweep = expect(doc, "sweep", dict)
        check_keys(sweep, ("axis", "values"), "sweep.")
        kwargs["sweep"] = expect(sweep, "axis", str, "sweep.")
        if kwargs["sweep"] not in SWEEP_AXES:
            raise ConfigError(f"field 'sweep.axis': expected one of {SWEEP_AXES}, got {kwargs['sweep']!r}")
        values = sweep.get("values", [])
        if not isinstance(values, list):
            raise ConfigError(f"field 'sweep.values': expected list, got {values!r}")
        if kwargs["sweep"] == "none" and values:
            raise ConfigError("field 'sweep.values': must be empty when the axis is 'none'")
        kwargs["sweep_values"] = tuple(_sweep_value(kwargs["sweep"], v, i) for i, v in enumerate(values))
    if "planner" in doc:
        kwargs["planner"] = planner_from_json(doc["planner"])
    if "start" in doc:
        kwargs["start"] = placement_from_json(doc["start"])
    if "out_dir" in doc:
        kwargs["out_dir"] = expect(doc, "out_dir", str)
    try:
        return ExperimentSpec(**kwargs)
    except ValueError as err:
        raise ConfigError(str(err)) from None


def _sweep_value(axis, v, i):
    where = f"sweep.values[{i}]"
    if axis == "weights":
        if (not isinstance(v, list) or len(v) != 2
                or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in v)):
            raise ConfigError(f"field {where!r}: expected [a, b], got {v!r}")
        return (float(v[0]), float(v[1]))
    if axis == "capacity":
        if not isinstance(v, int) or isinstance(v, bool):
            raise ConfigError(f"field {where!r}: expected integer, got {v!r}")
        return v
    raise ConfigError(f"field {where!r}: axis {axis!r} takes no values")


def load_config(path) -> ExperimentSpec:
    """Read an experiment spec; ``"default"`` gives the built-in default setup."""
    if str(path) == "default":
        return ExperimentSpec()
    return spec_from_json(read_json(path))


def save_config(spec: ExperimentSpec, path) -> None:
    write_json(path, spec_to_json(spec))
