"""State spaces over the set of present strategic players.

Two materializations of the same chain:

* exact -- one state per subset of players, encoded as a bitmask.  The
  ordinal of a subset is the bitmask itself, so encoding is O(1) and the
  enumeration order is deterministic.  Capped at 20 players.
* reduced -- for homogeneous players the chain is lumped to pairs
  ``(focal_present, other_count)``.  The focal player keeps its own presence
  bit because its utility differs between "absent now, may re-arrive" and
  the anonymous others; the others enter only through their count.

Absorbing (problem-solved) states are never materialized; absorption shows
up downstream as row slack in the transition matrix.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, NamedTuple

import numpy as np

from .model import GameConfig

__all__ = [
    "EXACT_PLAYER_CAP",
    "MalformedStateError",
    "Edge",
    "ExactSpace",
    "ReducedSpace",
    "StateSpace",
    "build_space",
    "ordinal",
    "inverse",
    "neighbors",
]

EXACT_PLAYER_CAP = 20


class MalformedStateError(ValueError):
    """State does not belong to the space it was used with."""


# the vectorized views below depend only on (n_players, player); memoized
# read-only so repeated chain builds (the verifier sweeps) skip recomputation
@lru_cache(maxsize=512)
def _presence_table(n_players: int, player: int) -> np.ndarray:
    arr = (np.arange(1 << n_players, dtype=np.int64) >> player & 1).astype(bool)
    arr.flags.writeable = False
    return arr


@lru_cache(maxsize=128)
def _reduced_split(n_players: int) -> tuple[np.ndarray, np.ndarray]:
    ords = np.arange(2 * n_players, dtype=np.int64)
    focal = ords // n_players
    others = ords % n_players
    focal.flags.writeable = False
    others.flags.writeable = False
    return focal, others


class Edge(NamedTuple):
    """One outgoing event of a state.

    ``count`` is the number of indistinguishable players generating the
    event (always 1 in exact mode); the actual rate is count times the
    per-player rate, or the solve rate for ``kind == "absorb"``.
    """

    kind: str
    target: object
    target_ordinal: int | None
    player: int | None
    count: int


@dataclass(frozen=True)
class ExactSpace:
    n_players: int

    mode = "exact"

    def __post_init__(self):
        if self.n_players <= 0:
            raise MalformedStateError("exact space needs at least one player")
        if self.n_players > EXACT_PLAYER_CAP:
            raise MalformedStateError(
                f"exact space is capped at {EXACT_PLAYER_CAP} players "
                f"(got {self.n_players}); use the reduced space"
            )

    @property
    def size(self) -> int:
        return 1 << self.n_players

    @property
    def policy_shape(self) -> tuple[int, int]:
        return (self.size, self.n_players)

    def ordinal(self, state: Iterable[int]) -> int:
        mask = 0
        for j in state:
            if not 0 <= j < self.n_players:
                raise MalformedStateError(f"player index {j} out of range")
            mask |= 1 << j
        return mask

    def inverse(self, k: int) -> frozenset[int]:
        if not 0 <= k < self.size:
            raise MalformedStateError(f"ordinal {k} out of range")
        return frozenset(j for j in range(self.n_players) if k >> j & 1)

    def neighbors(self, state: Iterable[int]) -> list[Edge]:
        mask = self.ordinal(state)
        edges = [Edge("absorb", None, None, None, 1)]
        for j in range(self.n_players):
            if not mask >> j & 1:
                t = mask | 1 << j
                edges.append(Edge("arrive", self.inverse(t), t, j, 1))
        for j in range(self.n_players):
            if mask >> j & 1:
                t = mask & ~(1 << j)
                edges.append(Edge("depart", self.inverse(t), t, j, 1))
        return edges

    # vectorized views used by the dynamics builders

    def presence(self, player: int) -> np.ndarray:
        """Boolean array over ordinals: is ``player`` present in the state."""
        return _presence_table(self.n_players, player)

    def state_sizes(self) -> np.ndarray:
        sizes = np.zeros(self.size, dtype=np.int64)
        for j in range(self.n_players):
            sizes += self.presence(j)
        return sizes

    def total_investment(self, investments: np.ndarray) -> np.ndarray:
        """Per-state sum of present players' investments."""
        total = np.zeros(self.size)
        for j in range(self.n_players):
            total += np.where(self.presence(j), investments[:, j], 0.0)
        return total


@dataclass(frozen=True)
class ReducedSpace:
    n_players: int

    mode = "reduced"

    def __post_init__(self):
        if self.n_players <= 0:
            raise MalformedStateError("reduced space needs at least one player")

    @property
    def size(self) -> int:
        return 2 * self.n_players

    @property
    def policy_shape(self) -> tuple[int, int]:
        # column 0: focal player's investment; column 1: each other's.
        return (self.size, 2)

    def ordinal(self, state: tuple[int, int]) -> int:
        focal, others = state
        if focal not in (0, 1):
            raise MalformedStateError(f"focal_present must be 0 or 1, got {focal}")
        if not 0 <= others < self.n_players:
            raise MalformedStateError(f"other_count {others} out of range")
        return focal * self.n_players + others

    def inverse(self, k: int) -> tuple[int, int]:
        if not 0 <= k < self.size:
            raise MalformedStateError(f"ordinal {k} out of range")
        return (k // self.n_players, k % self.n_players)

    def neighbors(self, state: tuple[int, int]) -> list[Edge]:
        self.ordinal(state)
        focal, others = state
        n = self.n_players
        edges = [Edge("absorb", None, None, None, 1)]
        if focal == 0:
            t = (1, others)
            edges.append(Edge("focal_arrive", t, self.ordinal(t), None, 1))
        else:
            t = (0, others)
            edges.append(Edge("focal_depart", t, self.ordinal(t), None, 1))
        absent_others = n - 1 - others
        if absent_others > 0:
            t = (focal, others + 1)
            edges.append(Edge("others_arrive", t, self.ordinal(t), None, absent_others))
        if others > 0:
            t = (focal, others - 1)
            edges.append(Edge("others_depart", t, self.ordinal(t), None, others))
        return edges

    def focal_present(self) -> np.ndarray:
        return _reduced_split(self.n_players)[0]

    def other_counts(self) -> np.ndarray:
        return _reduced_split(self.n_players)[1]

    def state_sizes(self) -> np.ndarray:
        return self.focal_present() + self.other_counts()

    def total_investment(self, investments: np.ndarray) -> np.ndarray:
        return (self.focal_present() * investments[:, 0]
                + self.other_counts() * investments[:, 1])


StateSpace = ExactSpace | ReducedSpace


def build_space(config: GameConfig, mode: str = "auto") -> StateSpace:
    """Pick the state space for a config.

    ``auto`` uses the exact space up to the player cap and falls back to the
    reduced space beyond it; the reduced space is only sound for homogeneous
    players, so non-homogeneous configs past the cap are rejected.
    """
    n = config.n_players
    if mode == "auto":
        mode = "exact" if n <= EXACT_PLAYER_CAP else "reduced"
    if mode == "exact":
        return ExactSpace(n)
    if mode == "reduced":
        if not config.is_homogeneous():
            raise MalformedStateError(
                "reduced space requires homogeneous players (identical cost, "
                "rates and max_power)"
            )
        return ReducedSpace(n)
    raise ValueError(f"unknown state-space mode {mode!r}")


def ordinal(space: StateSpace, state) -> int:
    return space.ordinal(state)


def inverse(space: StateSpace, k: int):
    return space.inverse(k)


def neighbors(space: StateSpace, state) -> list[Edge]:
    return space.neighbors(state)
