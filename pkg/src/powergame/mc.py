"""Monte Carlo simulation of the game's continuous-time chain.

An independent check on the analytic utilities: episodes race exponential
clocks (problem solved, each arrival, each departure), integrate investment
costs and streamed rewards over sojourns, and pay out the winner-takes-all
reward on absorption where the scenario has one.  Holding times use the
competing-exponentials equivalence: one exponential at the total rate, then
a categorical draw over events.

Randomness comes from splitmix64 streams; episode ``i`` of a batch runs on
the stream seeded with ``mix64(seed + (i+1)*GOLDEN)``, so batches are
reproducible and order-independent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .dynamics import sojourn_denominators, solve_rates
from .model import GameConfig, Policy, Scenario1
from .statespace import ExactSpace, StateSpace

__all__ = [
    "DEFAULT_MAX_EVENTS",
    "EpisodeOutcome",
    "UtilityEstimate",
    "NonTerminationError",
    "simulate_episode",
    "estimate_utilities",
]

DEFAULT_MAX_EVENTS = 10 ** 8


class NonTerminationError(RuntimeError):
    """An episode exceeded the event guard before absorbing.

    The solve rate is strictly positive in every state, so this signals a
    mis-built event table (absorption probability ~0), not bad luck.
    """


@dataclass(frozen=True)
class EpisodeOutcome:
    """One realized episode.

    ``winner`` is a player id, ``"fixed"`` for the always-present block,
    ``"other"`` for an anonymous non-focal player in reduced mode, or None
    when the scenario has no winner (streamed rewards).
    ``per_player_utility`` is realized reward minus integrated cost per
    player; in reduced mode it has a single focal-player entry.
    """

    winner: str | None
    per_player_utility: np.ndarray
    duration: float
    path_length: int


@dataclass(frozen=True)
class UtilityEstimate:
    """Sample mean/standard error of per-player utility over a batch."""

    players: tuple[int, ...]
    mean: np.ndarray
    std_error: np.ndarray
    n_episodes: int
    seed: int


@dataclass(frozen=True)
class _EventTables:
    """Per-state event encoding shared by every player's batch run.

    Events of a state occupy ``ev_indptr[s]:ev_indptr[s+1]`` in canonical
    order: absorb first, then the state's remaining edges as emitted by
    ``neighbors`` (arrivals before departures, ascending player index in
    exact mode).  ``ev_target`` holds -1 for absorb.
    """

    ev_indptr: np.ndarray
    ev_prob: np.ndarray
    ev_target: np.ndarray
    total_rate: np.ndarray
    total_investment: np.ndarray
    solve_rate: np.ndarray


def _edge_rate(edge, config: GameConfig, space: StateSpace) -> float:
    if edge.kind == "arrive":
        return config.players[edge.player].arrival_rate
    if edge.kind == "depart":
        return config.players[edge.player].departure_rate
    p = config.players[0]
    if edge.kind == "focal_arrive":
        return p.arrival_rate
    if edge.kind == "focal_depart":
        return p.departure_rate
    if edge.kind == "others_arrive":
        return edge.count * p.arrival_rate
    if edge.kind == "others_depart":
        return edge.count * p.departure_rate
    raise ValueError(f"unexpected edge kind {edge.kind!r}")


def _event_tables(config: GameConfig, space: StateSpace, policy) -> _EventTables:
    inv = policy.investments if isinstance(policy, Policy) else np.asarray(policy, float)
    gamma = solve_rates(config, space, inv)
    denom = sojourn_denominators(config, space, inv)
    indptr = np.zeros(space.size + 1, dtype=np.int64)
    probs: list[float] = []
    targets: list[int] = []
    for s in range(space.size):
        probs.append(float(gamma[s] / denom[s]))
        targets.append(-1)
        for edge in space.neighbors(space.inverse(s))[1:]:
            rate = _edge_rate(edge, config, space)
            if rate > 0:
                probs.append(float(rate / denom[s]))
                targets.append(edge.target_ordinal)
        indptr[s + 1] = len(probs)
    return _EventTables(
        ev_indptr=indptr,
        ev_prob=np.array(probs),
        ev_target=np.array(targets, dtype=np.int64),
        total_rate=np.ascontiguousarray(denom),
        total_investment=space.total_investment(inv),
        solve_rate=gamma,
    )


def _player_arrays(config: GameConfig, space: StateSpace, policy, player: int):
    """Tracked-player accrual rates and win interval, per state."""
    inv = policy.investments if isinstance(policy, Policy) else np.asarray(policy, float)
    total = space.total_investment(inv) + config.fixed_power
    if isinstance(space, ExactSpace):
        x_i = np.where(space.presence(player), inv[:, player], 0.0)
        below = np.zeros(space.size)
        for j in range(player):
            below += np.where(space.presence(j), inv[:, j], 0.0)
        cost = config.players[player].cost
    else:
        if player != 0:
            raise ValueError("reduced space tracks the focal player only")
        x_i = space.focal_present() * inv[:, 0]
        below = np.zeros(space.size)
        cost = config.players[0].cost

    cost_rate = cost * x_i
    if isinstance(config.scenario, Scenario1):
        reward_rate = np.zeros(space.size)
        win_lo = below / total
        win_hi = (below + x_i) / total
        win_payout = config.reward
    else:
        beta_eff = solve_rates(config, space, inv)
        reward_rate = x_i * config.reward * beta_eff / total
        win_lo = np.zeros(space.size)
        win_hi = np.zeros(space.size)
        win_payout = 0.0
    return (np.ascontiguousarray(cost_rate), np.ascontiguousarray(reward_rate),
            np.ascontiguousarray(win_lo), np.ascontiguousarray(win_hi), win_payout)


def _as_ordinal(space: StateSpace, state) -> int:
    if isinstance(state, (int, np.integer)):
        if not 0 <= int(state) < space.size:
            raise ValueError(f"state ordinal {state} out of range")
        return int(state)
    return space.ordinal(state)


def simulate_episode(config: GameConfig, space: StateSpace, policy,
                     initial_state, seed: int, episode_index: int = 0,
                     max_events: int = DEFAULT_MAX_EVENTS) -> EpisodeOutcome:
    """One fully detailed episode (all players scored, winner identified).

    Uses the same stream derivation and draw order as the batch kernel, so
    episode ``i`` of ``estimate_utilities`` is reproduced exactly by
    ``episode_index=i`` with the same seed.
    """
    inv = policy.investments if isinstance(policy, Policy) else np.asarray(policy, float)
    tables = _event_tables(config, space, policy)
    s = _as_ordinal(space, initial_state)
    n = config.n_players
    exact = isinstance(space, ExactSpace)
    scenario1 = isinstance(config.scenario, Scenario1)
    costs = config.costs()
    r = config.reward
    ell = config.fixed_power
    if not scenario1:
        beta_eff = tables.solve_rate

    state = kernels.mix64((seed + kernels.GOLDEN * (episode_index + 1)) & kernels.MASK64)

    def draw() -> float:
        nonlocal state
        state = (state + kernels.GOLDEN) & kernels.MASK64
        return (kernels.mix64(state) >> 11) * 2.0 ** -53

    def present_investments(ordinal: int) -> np.ndarray:
        if exact:
            row = inv[ordinal].copy()
            absent = [j for j in range(n) if not ordinal >> j & 1]
            row[absent] = 0.0
            return row
        f, k = space.inverse(ordinal)
        row = np.zeros(2)
        row[0] = inv[ordinal, 0] if f else 0.0
        row[1] = inv[ordinal, 1] if k else 0.0
        return row

    util = np.zeros(n if exact else 1)
    duration = 0.0
    events = 0
    winner: str | None = None
    while events < max_events:
        u = draw()
        dt = -math.log1p(-u) / tables.total_rate[s]
        duration += dt
        x_row = present_investments(s)
        total = tables.total_investment[s] + ell
        if exact:
            util -= costs * x_row * dt
            if not scenario1:
                util += x_row * r * beta_eff[s] / total * dt
        else:
            f, k = space.inverse(s)
            util[0] -= costs[0] * x_row[0] * dt
            if not scenario1:
                util[0] += x_row[0] * r * beta_eff[s] / total * dt

        u = draw()
        lo = tables.ev_indptr[s]
        hi = tables.ev_indptr[s + 1]
        chosen = hi - 1
        acc = 0.0
        for e in range(lo, hi):
            acc += tables.ev_prob[e]
            if u < acc:
                chosen = e
                break
        events += 1
        target = tables.ev_target[chosen]
        if target < 0:
            if scenario1:
                u = draw()
                pos = u * total
                acc = 0.0
                if exact:
                    for j in range(n):
                        acc += x_row[j]
                        if pos < acc:
                            winner = config.players[j].id
                            util[j] += r
                            break
                    else:
                        winner = "fixed"
                else:
                    # focal player owns the first segment of the split
                    f, k = space.inverse(s)
                    if pos < x_row[0]:
                        winner = config.players[0].id
                        util[0] += r
                    elif pos < x_row[0] + k * x_row[1]:
                        winner = "other"
                    else:
                        winner = "fixed"
            break
        s = int(target)
    else:
        raise NonTerminationError(
            f"episode exceeded {max_events} events without absorbing"
        )
    return EpisodeOutcome(winner, util, duration, events)


def estimate_utilities(config: GameConfig, space: StateSpace, policy,
                       initial_state, n_episodes: int, seed: int,
                       players=None,
                       max_events: int = DEFAULT_MAX_EVENTS) -> UtilityEstimate:
    """Batch mean/standard error of per-player utility from a common start.

    Every tracked player replays the same trajectories (same seed-derived
    streams), scoring its own accruals; winner draws use disjoint intervals
    so replays agree on who won.
    """
    if n_episodes < 1:
        raise ValueError("n_episodes must be at least 1")
    if players is None:
        players = tuple(range(config.n_players)) if isinstance(space, ExactSpace) else (0,)
    else:
        players = tuple(int(i) for i in players)
    start = _as_ordinal(space, initial_state)
    tables = _event_tables(config, space, policy)

    means = np.empty(len(players))
    errs = np.empty(len(players))
    for pos, i in enumerate(players):
        cost_rate, reward_rate, win_lo, win_hi, win_payout = _player_arrays(
            config, space, policy, i
        )
        utils, counts = kernels.simulate_batch(
            tables.ev_indptr, tables.ev_prob, tables.ev_target,
            tables.total_rate, cost_rate, reward_rate, win_lo, win_hi,
            win_payout, start, int(n_episodes), int(seed), int(max_events),
        )
        truncated = int(np.count_nonzero(counts >= max_events))
        if truncated:
            raise NonTerminationError(
                f"{truncated} of {n_episodes} episodes exceeded {max_events} events"
            )
        means[pos] = utils.mean()
        errs[pos] = utils.std(ddof=1) / math.sqrt(n_episodes) if n_episodes > 1 else math.nan
    return UtilityEstimate(players, means, errs, int(n_episodes), int(seed))
