"""Parameter sweeps over arrival rate, departure rate, and population size.

A sweep takes a homogeneous base game, overrides the swept parameters point
by point, solves the equilibrium on the reduced state space, and reports the
focal player's utility as a function of the number of other players present
(the x-axis of the utility-vs-population plots), next to the static-game
baseline at the same head count and an optional Monte Carlo check.

Rows are emitted for every other-player count when rates are swept; a
``state_size`` sweep instead emits one full-house row per population size.
Output is a CSV with a fixed column set and 17-significant-digit floats, so
identical specs produce byte-identical files.
"""

from __future__ import annotations

import json
import logging
import math
import os
from dataclasses import dataclass, replace
from itertools import product

from .equilibrium import compute_mpe, sne_homogeneous_utility
from .mc import estimate_utilities
from .model import (
    ConfigFormatError,
    GameConfig,
    PlayerParams,
    load_config,
    parse_config,
    require_valid,
)
from .solver import NonConvergenceError
from .statespace import ReducedSpace

__all__ = [
    "CSV_HEADER",
    "SWEEP_PARAMS",
    "MODES",
    "ExperimentSpec",
    "ExperimentRow",
    "ExperimentResult",
    "parse_experiment",
    "load_experiment",
    "run_experiment",
]

log = logging.getLogger("powergame.experiment")

CSV_HEADER = ("scenario,n_others,lambda,mu,mpe_utility,sne_utility,"
              "mc_mean,mc_stderr,residual,iterations")
SWEEP_PARAMS = ("lambda", "mu", "state_size")
MODES = ("mpe", "sne", "mc")


@dataclass(frozen=True)
class ExperimentSpec:
    config: GameConfig
    sweep: dict[str, tuple[float, ...]]
    modes: tuple[str, ...]
    mc_episodes: int = 10_000
    seed: int = 0
    out: str | None = None


@dataclass(frozen=True)
class ExperimentRow:
    scenario: str
    n_others: int
    lam: float
    mu: float
    mpe_utility: float
    sne_utility: float
    mc_mean: float
    mc_stderr: float
    residual: float
    iterations: float


def _fmt(v: float) -> str:
    return "nan" if math.isnan(v) else f"{v:.17g}"


@dataclass(frozen=True)
class ExperimentResult:
    rows: tuple[ExperimentRow, ...]

    def to_csv(self) -> str:
        lines = [CSV_HEADER]
        for row in self.rows:
            iters = "nan" if math.isnan(row.iterations) else str(int(row.iterations))
            lines.append(",".join([
                row.scenario,
                str(row.n_others),
                _fmt(row.lam),
                _fmt(row.mu),
                _fmt(row.mpe_utility),
                _fmt(row.sne_utility),
                _fmt(row.mc_mean),
                _fmt(row.mc_stderr),
                _fmt(row.residual),
                iters,
            ]))
        return "\n".join(lines) + "\n"

    def write_csv(self, path: str) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(self.to_csv())


def parse_experiment(data: dict, base_dir: str = ".") -> ExperimentSpec:
    """Build an :class:`ExperimentSpec` from a parsed JSON document.

    The game comes either inline under ``config`` or from a file named by
    ``config_path`` (resolved against ``base_dir``).
    """
    if not isinstance(data, dict):
        raise ConfigFormatError("experiment spec must be a JSON object")
    if ("config" in data) == ("config_path" in data):
        raise ConfigFormatError("spec needs exactly one of 'config' or 'config_path'")
    if "config" in data:
        config = parse_config(data["config"])
    else:
        config = load_config(os.path.join(base_dir, data["config_path"]))

    sweep_data = data.get("sweep", {})
    if not isinstance(sweep_data, dict):
        raise ConfigFormatError("'sweep' must map parameter names to value lists")
    sweep: dict[str, tuple[float, ...]] = {}
    for name, values in sweep_data.items():
        if name not in SWEEP_PARAMS:
            raise ConfigFormatError(
                f"unknown sweep parameter {name!r} (expected one of {SWEEP_PARAMS})"
            )
        vals = tuple(float(v) for v in values)
        if not vals:
            raise ConfigFormatError(f"sweep parameter {name!r} has no values")
        if any(v <= 0 for v in vals):
            raise ConfigFormatError(f"sweep values for {name!r} must be positive")
        if name == "state_size" and any(v != int(v) for v in vals):
            raise ConfigFormatError("state_size sweep values must be integers")
        sweep[name] = vals

    modes = tuple(data.get("modes", ("mpe", "sne")))
    if not modes:
        raise ConfigFormatError("modes must be non-empty")
    for m in modes:
        if m not in MODES:
            raise ConfigFormatError(f"unknown mode {m!r} (expected subset of {MODES})")

    mc_episodes = int(data.get("mc_episodes", 10_000))
    if mc_episodes < 1:
        raise ConfigFormatError("mc_episodes must be at least 1")

    return ExperimentSpec(
        config=config,
        sweep=sweep,
        modes=modes,
        mc_episodes=mc_episodes,
        seed=int(data.get("seed", 0)),
        out=data.get("out"),
    )


def load_experiment(path: str) -> ExperimentSpec:
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    return parse_experiment(data, base_dir=os.path.dirname(os.path.abspath(path)))


def _point_config(base: GameConfig, lam, mu, n) -> GameConfig:
    p = base.players[0]
    player = PlayerParams(
        id="p0",
        cost=p.cost,
        arrival_rate=p.arrival_rate if lam is None else float(lam),
        departure_rate=p.departure_rate if mu is None else float(mu),
        max_power=p.max_power,
    )
    count = base.n_players if n is None else int(n)
    players = tuple(replace(player, id=f"p{i}") for i in range(count))
    return replace(base, players=players)


def run_experiment(spec: ExperimentSpec) -> ExperimentResult:
    """Execute every sweep point and collect per-population-count rows.

    Rate sweeps keep the universe fixed and emit one row per other-player
    count; ``state_size`` points resize the universe and emit the full-house
    row only.  The Monte Carlo mode simulates the equilibrium policy from
    the same initial state the analytic value is read at, so the two columns
    are directly comparable.
    """
    base = spec.config
    require_valid(base)
    if not base.is_homogeneous():
        raise ValueError("sweeps are defined for homogeneous games")

    grid = [spec.sweep.get(name, (None,)) for name in SWEEP_PARAMS]
    need_policy = "mpe" in spec.modes or "mc" in spec.modes
    rows: list[ExperimentRow] = []

    for lam, mu, n_size in product(*grid):
        config = _point_config(base, lam, mu, n_size)
        n = config.n_players
        space = ReducedSpace(n)
        scenario = config.scenario.kind
        lam_val = config.players[0].arrival_rate
        mu_val = config.players[0].departure_rate

        result = None
        if need_policy:
            try:
                result = compute_mpe(config, space, method="auto")
            except NonConvergenceError as exc:
                # row keeps NaN utilities; the diagnostic goes to the log
                log.error("sweep point lambda=%s mu=%s n=%s: %s",
                          lam_val, mu_val, n, exc)

        counts = [n - 1] if n_size is not None else list(range(n))
        for k in counts:
            ordinal = n + k  # focal present, k others
            mpe_val = math.nan
            residual = math.nan
            iterations = math.nan
            if result is not None:
                if "mpe" in spec.modes:
                    mpe_val = float(result.utilities[ordinal, 0])
                residual = float(result.residuals[0])
                iterations = float(result.iterations[0])

            sne_val = (sne_homogeneous_utility(config, k + 1)
                       if "sne" in spec.modes else math.nan)

            mc_mean = math.nan
            mc_stderr = math.nan
            if "mc" in spec.modes and result is not None:
                est = estimate_utilities(
                    config, space, result.policy, ordinal,
                    spec.mc_episodes, spec.seed,
                )
                mc_mean = float(est.mean[0])
                mc_stderr = float(est.std_error[0])

            rows.append(ExperimentRow(
                scenario=scenario,
                n_others=k,
                lam=lam_val,
                mu=mu_val,
                mpe_utility=mpe_val,
                sne_utility=sne_val,
                mc_mean=mc_mean,
                mc_stderr=mc_stderr,
                residual=residual,
                iterations=iterations,
            ))

    rows.sort(key=lambda row: (row.lam, row.mu, row.n_others))
    return ExperimentResult(tuple(rows))
