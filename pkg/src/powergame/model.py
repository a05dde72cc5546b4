"""Domain types for the power-investment game.

A game instance consists of a set of strategic players that arrive and
depart stochastically, an always-present block of fixed compute (aggregated
into a single power value), a reward parameter, and a scenario that fixes
how the completion rate and the reward stream are generated:

* ``Scenario1`` -- one winner takes the whole reward; the completion rate is
  proportional to the total invested power.
* ``Scenario2`` -- the reward is streamed per unit time in proportion to each
  player's share of the invested power; the run terminates at a constant rate.
* ``Scenario2General`` -- like ``Scenario2`` but the termination rate may
  depend on the set of present players.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

__all__ = [
    "PlayerParams",
    "Scenario1",
    "Scenario2",
    "Scenario2General",
    "GameConfig",
    "Policy",
    "InvalidConfigError",
    "ConfigFormatError",
    "validate_config",
    "require_valid",
    "parse_config",
    "load_config",
    "config_to_dict",
]


class ConfigFormatError(ValueError):
    """Raised when a config document is structurally malformed."""


class InvalidConfigError(ValueError):
    """Raised by operations that received a config with validation violations."""

    def __init__(self, violations: Sequence[str]):
        self.violations = list(violations)
        super().__init__("invalid config: " + "; ".join(self.violations))


@dataclass(frozen=True)
class PlayerParams:
    """Per-player parameters.

    ``cost`` is the cost of investing one unit of power for one unit of time,
    ``arrival_rate``/``departure_rate`` are the exponential rates at which the
    player joins/leaves while a problem is being worked on, and ``max_power``
    caps the investment the player can choose in any state.
    """

    id: str
    cost: float
    arrival_rate: float
    departure_rate: float
    max_power: float


@dataclass(frozen=True)
class Scenario1:
    """Winner-takes-reward scenario: completion rate = gamma * (total power)."""

    gamma: float

    kind = "scenario1"


@dataclass(frozen=True)
class Scenario2:
    """Streamed-reward scenario: the run terminates at constant rate beta."""

    beta: float

    kind = "scenario2"


@dataclass(frozen=True)
class Scenario2General:
    """Streamed-reward scenario with a state-dependent termination rate.

    The rate function is serializable: either a named preset

    * ``"constant"`` -- ``rate`` for every state;
    * ``"proportional_to_size"`` -- ``rate * (|S| + 1)``, offset by one so the
      empty state keeps a strictly positive rate;

    or an explicit ``table`` keyed by exact-mode state ordinal with an
    optional ``default`` for unlisted states.  Tables are tied to a concrete
    state enumeration, so only preset-based instances can be used with the
    reduced (homogeneous) state space.
    """

    preset: str | None = None
    rate: float | None = None
    table: Mapping[int, float] | None = None
    default: float | None = None

    kind = "scenario2_general"

    def rate_for(self, ordinal: int, size: int) -> float:
        if self.preset == "constant":
            return float(self.rate)
        if self.preset == "proportional_to_size":
            return float(self.rate) * (size + 1)
        if self.table is not None:
            if ordinal in self.table:
                return float(self.table[ordinal])
            if self.default is not None:
                return float(self.default)
            raise ConfigFormatError(
                f"rate table has no entry for state ordinal {ordinal} and no default"
            )
        raise ConfigFormatError("scenario2_general needs a preset or a table")

    def size_only(self) -> bool:
        """True when the rate depends on the state only through its size."""
        return self.preset in ("constant", "proportional_to_size")


Scenario = Scenario1 | Scenario2 | Scenario2General


@dataclass(frozen=True)
class GameConfig:
    """Full game parameterization.

    ``players`` is the universal set of strategic players; list order defines
    the canonical player index used by state spaces and policies.
    ``fixed_power`` is the aggregate power of the always-present fixed
    players and must be strictly positive so the completion rate never
    vanishes.
    """

    players: tuple[PlayerParams, ...]
    reward: float
    fixed_power: float
    scenario: Scenario

    @property
    def n_players(self) -> int:
        return len(self.players)

    def costs(self) -> np.ndarray:
        return np.array([p.cost for p in self.players], dtype=float)

    def arrival_rates(self) -> np.ndarray:
        return np.array([p.arrival_rate for p in self.players], dtype=float)

    def departure_rates(self) -> np.ndarray:
        return np.array([p.departure_rate for p in self.players], dtype=float)

    def max_powers(self) -> np.ndarray:
        return np.array([p.max_power for p in self.players], dtype=float)

    def is_homogeneous(self) -> bool:
        """True when every player shares cost, rates and cap (ids may differ)."""
        if not self.players:
            return False
        first = self.players[0]
        return all(
            p.cost == first.cost
            and p.arrival_rate == first.arrival_rate
            and p.departure_rate == first.departure_rate
            and p.max_power == first.max_power
            for p in self.players[1:]
        )


@dataclass
class Policy:
    """Per-state investment table.

    ``investments`` is a 2-D float array indexed by state ordinal.  On an
    exact state space the second axis is the player index; on a reduced space
    it has two columns: the focal player's investment and the per-player
    investment of each of the anonymous others.  Entries for absent players
    are zero by convention.
    """

    investments: np.ndarray

    def __post_init__(self):
        arr = np.ascontiguousarray(np.asarray(self.investments, dtype=float))
        arr.flags.writeable = False
        self.investments = arr

    def with_entry(self, state_ordinal: int, column: int, value: float) -> "Policy":
        """Copy of this policy with a single entry replaced."""
        inv = self.investments.copy()
        inv[state_ordinal, column] = value
        return Policy(inv)


def validate_config(config: GameConfig) -> list[str]:
    """Collect every invariant violation in ``config``.

    Violations are returned as human-readable strings; an empty list means
    the config is usable by every downstream operation.  Pure: the same
    config always yields the same list.
    """
    violations: list[str] = []
    if not config.players:
        violations.append("players must be non-empty")
    if config.reward <= 0:
        violations.append("reward must be strictly positive")
    if config.fixed_power <= 0:
        violations.append("fixed_power must be strictly positive")

    seen: set[str] = set()
    for p in config.players:
        if p.id in seen:
            violations.append(f"duplicate player id {p.id!r}")
        seen.add(p.id)
        if p.cost <= 0:
            violations.append(f"player {p.id!r}: cost must be strictly positive")
        if p.max_power <= 0:
            violations.append(f"player {p.id!r}: max_power must be strictly positive")
        if p.arrival_rate < 0:
            violations.append(f"player {p.id!r}: arrival_rate must be non-negative")
        if p.departure_rate < 0:
            violations.append(f"player {p.id!r}: departure_rate must be non-negative")

    scenario = config.scenario
    if isinstance(scenario, Scenario1):
        if scenario.gamma <= 0:
            violations.append("scenario1: gamma must be strictly positive")
    elif isinstance(scenario, Scenario2):
        if scenario.beta <= 0:
            violations.append("scenario2: beta must be strictly positive")
    elif isinstance(scenario, Scenario2General):
        if scenario.preset is not None:
            if scenario.preset not in ("constant", "proportional_to_size"):
                violations.append(
                    f"scenario2_general: unknown preset {scenario.preset!r}"
                )
            elif scenario.rate is None or scenario.rate <= 0:
                violations.append("scenario2_general: preset rate must be strictly positive")
        elif scenario.table is not None:
            if any(v <= 0 for v in scenario.table.values()):
                violations.append("scenario2_general: table rates must be strictly positive")
            if scenario.default is not None and scenario.default <= 0:
                violations.append("scenario2_general: default rate must be strictly positive")
        else:
            violations.append("scenario2_general: needs a preset or a table")
    else:
        violations.append(f"unknown scenario type {type(scenario).__name__}")
    return violations


def require_valid(config: GameConfig) -> None:
    """Raise :class:`InvalidConfigError` unless ``config`` validates cleanly."""
    violations = validate_config(config)
    if violations:
        raise InvalidConfigError(violations)


# ---------------------------------------------------------------------------
# JSON config document
# ---------------------------------------------------------------------------

_PLAYER_KEYS = ("cost", "arrival_rate", "departure_rate", "max_power")


def _parse_scenario(data) -> Scenario:
    if not isinstance(data, dict) or "type" not in data:
        raise ConfigFormatError("scenario must be an object with a 'type' key")
    kind = data["type"]
    if kind == "scenario1":
        return Scenario1(gamma=float(data["gamma"]))
    if kind == "scenario2":
        return Scenario2(beta=float(data["beta"]))
    if kind == "scenario2_general":
        if "preset" in data:
            return Scenario2General(preset=data["preset"], rate=float(data["rate"]))
        if "table" in data:
            table = {int(k): float(v) for k, v in data["table"].items()}
            default = data.get("default")
            return Scenario2General(
                table=table, default=None if default is None else float(default)
            )
        raise ConfigFormatError("scenario2_general needs 'preset' or 'table'")
    raise ConfigFormatError(f"unknown scenario type {kind!r}")


def parse_config(data: dict) -> GameConfig:
    """Build a :class:`GameConfig` from a parsed JSON document.

    ``players`` and ``homogeneous`` are mutually exclusive; the latter
    expands to ``count`` identical players with ids ``p0..p{count-1}``.
    Structural problems raise :class:`ConfigFormatError`; semantic problems
    are left for :func:`validate_config`.
    """
    if not isinstance(data, dict):
        raise ConfigFormatError("config document must be a JSON object")
    for key in ("reward", "fixed_power", "scenario"):
        if key not in data:
            raise ConfigFormatError(f"config is missing required key {key!r}")
    if ("players" in data) == ("homogeneous" in data):
        raise ConfigFormatError("config needs exactly one of 'players' or 'homogeneous'")

    if "players" in data:
        players = []
        for i, entry in enumerate(data["players"]):
            missing = [k for k in _PLAYER_KEYS if k not in entry]
            if missing:
                raise ConfigFormatError(f"player #{i} is missing keys {missing}")
            players.append(
                PlayerParams(
                    id=str(entry.get("id", f"p{i}")),
                    cost=float(entry["cost"]),
                    arrival_rate=float(entry["arrival_rate"]),
                    departure_rate=float(entry["departure_rate"]),
                    max_power=float(entry["max_power"]),
                )
            )
    else:
        hom = data["homogeneous"]
        missing = [k for k in ("count",) + _PLAYER_KEYS if k not in hom]
        if missing:
            raise ConfigFormatError(f"homogeneous block is missing keys {missing}")
        count = int(hom["count"])
        if count <= 0:
            raise ConfigFormatError("homogeneous count must be a positive integer")
        players = [
            PlayerParams(
                id=f"p{i}",
                cost=float(hom["cost"]),
                arrival_rate=float(hom["arrival_rate"]),
                departure_rate=float(hom["departure_rate"]),
                max_power=float(hom["max_power"]),
            )
            for i in range(count)
        ]

    return GameConfig(
        players=tuple(players),
        reward=float(data["reward"]),
        fixed_power=float(data["fixed_power"]),
        scenario=_parse_scenario(data["scenario"]),
    )


def load_config(path: str) -> GameConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(json.load(fh))


def config_to_dict(config: GameConfig) -> dict:
    """Inverse of :func:`parse_config` (players always listed explicitly)."""
    scenario = config.scenario
    if isinstance(scenario, Scenario1):
        sdata = {"type": "scenario1", "gamma": scenario.gamma}
    elif isinstance(scenario, Scenario2):
        sdata = {"type": "scenario2", "beta": scenario.beta}
    else:
        if scenario.preset is not None:
            sdata = {"type": "scenario2_general", "preset": scenario.preset,
                     "rate": scenario.rate}
        else:
            sdata = {"type": "scenario2_general",
                     "table": {str(k): v for k, v in scenario.table.items()}}
            if scenario.default is not None:
                sdata["default"] = scenario.default
    return {
        "reward": config.reward,
        "fixed_power": config.fixed_power,
        "scenario": sdata,
        "players": [
            {"id": p.id, "cost": p.cost, "arrival_rate": p.arrival_rate,
             "departure_rate": p.departure_rate, "max_power": p.max_power}
            for p in config.players
        ],
    }
