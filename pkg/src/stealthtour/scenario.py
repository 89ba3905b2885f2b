"""Problem instances: loading, validation, generation, rewards.

The on-disk format is JSON (documented in the README): top-level keys
``name``, ``t_max``, ``rho_min``, ``rho_max``, ``closed``, ``sensing``,
``sensors``, ``locations``, ``start_id``, ``goal_id`` and the optional
``fixed_headings``.  Internally locations are reordered so index 0 is the
start and the last index is the goal.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace

import numpy as np

from .sensing import SensorField


class ScenarioError(ValueError):
    """Malformed or invariant-violating scenario data."""


@dataclass(frozen=True)
class TargetLocation:
    id: int
    x: float
    y: float
    reward: float


@dataclass(frozen=True)
class Scenario:
    name: str
    locations: tuple[TargetLocation, ...]  # index 0 = start, last = goal
    field: SensorField
    t_max: float
    rho_min: float
    rho_max: float
    closed: bool = False
    fixed_headings: dict[int, float] | None = None

    def __post_init__(self):
        if len(self.locations) < 2:
            raise ScenarioError("locations: need at least start and goal")
        if self.t_max <= 0.0:
            raise ScenarioError("t_max: must be positive")
        if not (0.0 < self.rho_min <= self.rho_max):
            raise ScenarioError("rho_min/rho_max: need 0 < rho_min <= rho_max")
        start, goal = self.locations[0], self.locations[-1]
        if start.reward != 0.0 or goal.reward != 0.0:
            raise ScenarioError("locations: start and goal rewards must be 0")
        if self.closed and (start.x != goal.x or start.y != goal.y):
            raise ScenarioError("closed: start and goal positions must coincide")
        ids = [loc.id for loc in self.locations]
        if len(set(ids)) != len(ids):
            raise ScenarioError("locations: duplicate ids")
        for loc in self.locations:
            if loc.reward < 0.0:
                raise ScenarioError(f"locations[{loc.id}].reward: must be non-negative")
        if self.fixed_headings:
            known = set(ids)
            for lid, th in self.fixed_headings.items():
                if lid not in known:
                    raise ScenarioError(f"fixed_headings: unknown location id {lid}")
                if not math.isfinite(th):
                    raise ScenarioError(f"fixed_headings[{lid}]: must be finite")

    @property
    def start(self) -> TargetLocation:
        return self.locations[0]

    @property
    def goal(self) -> TargetLocation:
        return self.locations[-1]

    def index_of(self, location_id: int) -> int:
        for i, loc in enumerate(self.locations):
            if loc.id == location_id:
                return i
        raise ScenarioError(f"unknown location id {location_id}")


def total_reward(scenario: Scenario, subset) -> float:
    """Sum of rewards of the given location-id subset."""
    rewards = {loc.id: loc.reward for loc in scenario.locations}
    out = 0.0
    for lid in subset:
        if lid not in rewards:
            raise ScenarioError(f"unknown location id {lid}")
        out += rewards[lid]
    return out


def scenario_to_dict(sc: Scenario) -> dict:
    data = {
        "name": sc.name,
        "t_max": sc.t_max,
        "rho_min": sc.rho_min,
        "rho_max": sc.rho_max,
        "closed": sc.closed,
        "sensing": {"alpha": sc.field.alpha, "mu": sc.field.mu, "cap": sc.field.cap},
        "sensors": [[x, y] for x, y in sc.field.nodes],
        "locations": [
            {"id": loc.id, "x": loc.x, "y": loc.y, "reward": loc.reward}
            for loc in sc.locations
        ],
        "start_id": sc.start.id,
        "goal_id": sc.goal.id,
    }
    if sc.fixed_headings:
        data["fixed_headings"] = {str(k): v for k, v in sc.fixed_headings.items()}
    return data


def save_scenario(sc: Scenario) -> str:
    return json.dumps(scenario_to_dict(sc), indent=2) + "\n"


def scenario_from_dict(data: dict) -> Scenario:
    try:
        sensing = data["sensing"]
        sensor_field = SensorField(
            nodes=tuple((float(x), float(y)) for x, y in data["sensors"]),
            alpha=float(sensing["alpha"]),
            mu=float(sensing["mu"]),
            cap=float(sensing["cap"]),
        )
        locations = [
            TargetLocation(int(d["id"]), float(d["x"]), float(d["y"]), float(d["reward"]))
            for d in data["locations"]
        ]
        start_id = int(data["start_id"])
        goal_id = int(data["goal_id"])
        by_id = {loc.id: loc for loc in locations}
        if start_id not in by_id:
            raise ScenarioError("start_id: not present in locations")
        if goal_id not in by_id or goal_id == start_id:
            raise ScenarioError("goal_id: must name a location distinct from start_id")
        ordered = (
            [by_id[start_id]]
            + [loc for loc in locations if loc.id not in (start_id, goal_id)]
            + [by_id[goal_id]]
        )
        fixed = None
        if data.get("fixed_headings"):
            fixed = {int(k): float(v) for k, v in data["fixed_headings"].items()}
        return Scenario(
            name=str(data["name"]),
            locations=tuple(ordered),
            field=sensor_field,
            t_max=float(data["t_max"]),
            rho_min=float(data["rho_min"]),
            rho_max=float(data["rho_max"]),
            closed=bool(data.get("closed", False)),
            fixed_headings=fixed,
        )
    except ScenarioError:
        raise
    except KeyError as exc:
        raise ScenarioError(f"missing field {exc.args[0]!r}") from exc
    except (TypeError, ValueError) as exc:
        raise ScenarioError(f"invalid value: {exc}") from exc


def load_scenario(content: bytes | str) -> Scenario:
    if isinstance(content, bytes):
        content = content.decode("utf-8")
    try:
        data = json.loads(content)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ScenarioError("top level must be an object")
    return scenario_from_dict(data)


# --- builtin instance generation -----------------------------------------

REWARD_CHOICES = (0.2, 0.4, 0.6, 0.8, 1.0)

# 11 nodes: a horizontal row of 7 plus 4 more on the vertical, centered in
# the 30 x 22 workspace.
_CROSS_NODES = (
    (6.0, 11.0), (9.0, 11.0), (12.0, 11.0), (15.0, 11.0),
    (18.0, 11.0), (21.0, 11.0), (24.0, 11.0),
    (15.0, 4.5), (15.0, 7.75), (15.0, 14.25), (15.0, 17.5),
)

# 8 nodes: a 4 x 2 grid in the 30 x 30 workspace.
_GRID_NODES = (
    (6.0, 10.0), (12.0, 10.0), (18.0, 10.0), (24.0, 10.0),
    (6.0, 20.0), (12.0, 20.0), (18.0, 20.0), (24.0, 20.0),
)


def _random_targets(rng, count, xlim, ylim):
    targets = []
    for i in range(count):
        x = round(float(xlim[0] + rng.random() * (xlim[1] - xlim[0])), 2)
        y = round(float(ylim[0] + rng.random() * (ylim[1] - ylim[0])), 2)
        reward = REWARD_CHOICES[int(rng.integers(len(REWARD_CHOICES)))]
        targets.append(TargetLocation(i + 1, x, y, reward))
    return targets


def generate_instance(kind: str, seed: int, closed: bool = False) -> Scenario:
    """Deterministic builtin instance (``cross`` or ``grid``)."""
    rng = np.random.default_rng(seed)
    if kind == "cross":
        nodes, count = _CROSS_NODES, 18
        xlim, ylim = (1.5, 28.5), (1.5, 20.5)
        start_xy, goal_xy = (2.0, 2.0), (28.0, 20.0)
    elif kind == "grid":
        nodes, count = _GRID_NODES, 15
        xlim, ylim = (1.5, 28.5), (1.5, 28.5)
        start_xy, goal_xy = (2.0, 2.0), (28.0, 28.0)
    else:
        raise ScenarioError(f"unknown builtin instance kind {kind!r}")
    targets = _random_targets(rng, count, xlim, ylim)
    if closed:
        goal_xy = start_xy
    start = TargetLocation(0, start_xy[0], start_xy[1], 0.0)
    goal = TargetLocation(count + 1, goal_xy[0], goal_xy[1], 0.0)
    return Scenario(
        name=f"{kind}-{seed}" + ("-closed" if closed else ""),
        locations=tuple([start] + targets + [goal]),
        field=SensorField(nodes=nodes, alpha=50.0, mu=2.0, cap=30.0),
        t_max=100.0,
        rho_min=1.0,
        rho_max=2.0,
        closed=closed,
    )


def with_overrides(sc: Scenario, *, t_max=None, rho_min=None, rho_max=None, closed=None) -> Scenario:
    """Copy of the scenario with selected knobs replaced."""
    changes = {}
    if t_max is not None:
        changes["t_max"] = float(t_max)
    if rho_min is not None:
        changes["rho_min"] = float(rho_min)
    if rho_max is not None:
        changes["rho_max"] = float(rho_max)
    if closed is not None:
        changes["closed"] = bool(closed)
        if closed and (sc.goal.x != sc.start.x or sc.goal.y != sc.start.y):
            goal = replace(sc.goal, x=sc.start.x, y=sc.start.y)
            changes["locations"] = sc.locations[:-1] + (goal,)
    return replace(sc, **changes)


@dataclass
class SolverParams:
    """Evolutionary engine knobs; defaults follow the reference setup."""

    population_size: int = 400
    generations: int = 400
    crossover_prob: float = 0.8
    mutation_prob_individual: float = 0.4
    mutation_prob_gene: float = 0.02
    von_mises_kappa: float = 2.0
    selection: str = "reference-point"  # or "crowding-distance"
    seed: int = 0
    single_objective: bool = False
    alignment_mutation: bool = False
    exposure_step: float = 0.05
    threads: int = 1

    def __post_init__(self):
        if self.population_size <= 0 or self.generations < 0:
            raise ValueError("population_size must be > 0 and generations >= 0")
        for name in ("crossover_prob", "mutation_prob_individual", "mutation_prob_gene"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name} must be in [0, 1]")
        if self.von_mises_kappa <= 0.0:
            raise ValueError("von_mises_kappa must be positive")
        if self.selection not in ("reference-point", "crowding-distance"):
            raise ValueError("selection must be reference-point or crowding-distance")
        if self.exposure_step <= 0.0:
            raise ValueError("exposure_step must be positive")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")

    def to_dict(self) -> dict:
        return {
            "population_size": self.population_size,
            "generations": self.generations,
            "crossover_prob": self.crossover_prob,
            "mutation_prob_individual": self.mutation_prob_individual,
            "mutation_prob_gene": self.mutation_prob_gene,
            "von_mises_kappa": self.von_mises_kappa,
            "selection": self.selection,
            "seed": self.seed,
            "single_objective": self.single_objective,
            "alignment_mutation": self.alignment_mutation,
            "exposure_step": self.exposure_step,
            "threads": self.threads,
        }
