"""JSON schemas for configs, scenarios and solutions.

Every document carries a ``format`` tag; readers reject unknown tags and
unknown fields, naming the offending field in the error.
"""
from __future__ import annotations

import json
from dataclasses import asdict, fields
from pathlib import Path

from .model import Association, NetworkParams, Placement, Scenario
from .planner import PlanResult, PlannerConfig, evaluate

SCENARIO_FORMAT = "uavvlc.scenario/1"
SOLUTION_FORMAT = "uavvlc.solution/1"
EXPERIMENT_FORMAT = "uavvlc.experiment/1"


class ConfigError(ValueError):
    """A config or data file is malformed; the message names the field."""


def expect(doc: dict, key: str, kind, where: str = ""):
    name = f"{where}{key}"
    if key not in doc:
        raise ConfigError(f"missing field {name!r}")
    value = doc[key]
    kinds = kind if isinstance(kind, tuple) else (kind,)
    if isinstance(value, bool) and bool not in kinds:
        raise ConfigError(f"field {name!r}: expected {_kind_name(kinds)}, got {value!r}")
    if not isinstance(value, kinds):
        raise ConfigError(f"field {name!r}: expected {_kind_name(kinds)}, got {value!r}")
    return value


def _kind_name(kinds) -> str:
    return " or ".join({int: "integer", float: "number", str: "string", list: "list",
                        dict: "object", bool: "boolean"}.get(k, k.__name__) for k in kinds)


def check_keys(doc: dict, allowed, where: str = ""):
    extra = sorted(set(doc) - set(allowed))
    if extra:
        raise ConfigError(f"unknown field {where + extra[0]!r}")


def check_format(doc, tag: str):
    if not isinstance(doc, dict):
        raise ConfigError("document must be a JSON object")
    found = doc.get("format")
    if found != tag:
        raise ConfigError(f"field 'format': expected {tag!r}, got {found!r}")


def point_from_json(value, where: str):
    if (
        not isinstance(value, list) or len(value) != 2
        or not all(isinstance(c, (int, float)) and not isinstance(c, bool) for c in value)
    ):
        raise ConfigError(f"field {where!r}: expected [x, y], got {value!r}")
    return (float(value[0]), float(value[1]))


def params_to_json(params: NetworkParams) -> dict:
    return asdict(params)


def params_from_json(doc, where: str = "params.") -> NetworkParams:
    if not isinstance(doc, dict):
        raise ConfigError(f"field {where.rstrip('.')!r}: expected object")
    names = [f.name for f in fields(NetworkParams)]
    check_keys(doc, names, where)
    kwargs = {}
    for f in fields(NetworkParams):
        if f.name in doc:
            kind = int if f.name == "capacity" else (int, float)
            value = expect(doc, f.name, kind, where)
            kwargs[f.name] = value if f.name == "capacity" else float(value)
    try:
        return NetworkParams(**kwargs)
    except ValueError as err:
        raise ConfigError(f"{where.rstrip('.')}: {err}") from None


def placement_to_json(place: Placement) -> dict:
    return {"uav1": list(place.uav1), "uav2": list(place.uav2)}


def placement_from_json(doc, where: str = "start.") -> Placement:
    if not isinstance(doc, dict):
        raise ConfigError(f"field {where.rstrip('.')!r}: expected object")
    check_keys(doc, ("uav1", "uav2"), where)
    return Placement(
        point_from_json(expect(doc, "uav1", list, where), where + "uav1"),
        point_from_json(expect(doc, "uav2", list, where), where + "uav2"),
    )


def planner_to_json(cfg: PlannerConfig) -> dict:
    return asdict(cfg)


def planner_from_json(doc, where: str = "planner.") -> PlannerConfig:
    if not isinstance(doc, dict):
        raise ConfigError(f"field {where.rstrip('.')!r}: expected object")
    check_keys(doc, [f.name for f in fields(PlannerConfig)], where)
    kwargs = {}
    for name in ("max_outer_iters", "max_association_rounds", "seed"):
        if name in doc:
            kwargs[name] = expect(doc, name, int, where)
    if "objective_tolerance" in doc:
        kwargs["objective_tolerance"] = float(expect(doc, "objective_tolerance", (int, float), where))
    try:
        return PlannerConfig(**kwargs)
    except ValueError as err:
        raise ConfigError(f"{where.rstrip('.')}: {err}") from None


def scenario_to_json(scenario: Scenario) -> dict:
    return {
        "format": SCENARIO_FORMAT,
        "seed": scenario.seed,
        "params": params_to_json(scenario.params),
        "start": placement_to_json(scenario.start),
        "users": scenario.users.tolist(),
    }


def scenario_from_json(doc) -> Scenario:
    check_format(doc, SCENARIO_FORMAT)
    check_keys(doc, ("format", "seed", "params", "start", "users"))
    users = expect(doc, "users", list)
    pts = [point_from_json(u, f"users[{i}]") for i, u in enumerate(users)]
    try:
        return Scenario(
            pts,
            params_from_json(expect(doc, "params", dict)),
            seed=expect(doc, "seed", int),
            start=placement_from_json(expect(doc, "start", dict)),
        )
    except ConfigError:
        raise
    except ValueError as err:
        raise ConfigError(f"users: {err}") from None


def solution_to_json(scenario: Scenario, result: PlanResult) -> dict:
    return {
        "format": SOLUTION_FORMAT,
        "scenario": scenario_to_json(scenario),
        "placement": placement_to_json(result.placement),
        "association": result.association.tags(),
        "objective": result.objective,
        "sum_rate": result.sum_rate,
        "d2d_count": result.d2d_count,
        "feasible": result.feasible,
        "per_user_illuminance": list(result.per_user_illuminance),
    }


def solution_from_json(doc) -> tuple[Scenario, Placement, Association, dict]:
    """Return the scenario, placement, association and the stored metrics."""
    check_format(doc, SOLUTION_FORMAT)
    check_keys(doc, ("format", "scenario", "placement", "association", "objective", "sum_rate",
                     "d2d_count", "feasible", "per_user_illuminance"))
    scenario = scenario_from_json(expect(doc, "scenario", dict))
    place = placement_from_json(expect(doc, "placement", dict), "placement.")
    tags = expect(doc, "association", list)
    try:
        assoc = Association.from_tags(tags)
    except ValueError as err:
        raise ConfigError(f"association: {err}") from None
    stored = {k: doc[k] for k in ("objective", "sum_rate", "d2d_count", "feasible") if k in doc}
    return scenario, place, assoc, stored


def write_json(path, doc) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(doc, indent=2) + "\n")


def read_json(path):
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as err:
        raise ConfigError(f"{path}: not valid JSON ({err})") from None


def save_scenario(scenario: Scenario, path) -> None:
    write_json(path, scenario_to_json(scenario))


def load_scenario(path) -> Scenario:
    return scenario_from_json(read_json(path))


def save_solution(scenario: Scenario, result: PlanResult, path) -> None:
    write_json(path, solution_to_json(scenario, result))


def load_solution(path) -> tuple[Scenario, PlanResult, dict]:
    """Re-evaluate a stored solution from scratch; also return the stored metrics."""
    scenario, place, assoc, stored = solution_from_json(read_json(path))
    if len(assoc) != len(scenario):
        raise ConfigError(
            f"association: {len(assoc)} tags for a scenario with {len(scenario)} users"
        )
    return scenario, evaluate(scenario, place, assoc), stored
