"""Chain ingredients for a config/policy pair.

For every non-absorbing state this module produces the problem-solve rate,
the total outgoing event rate (the sojourn denominator), the one-jump
transition matrix of the embedded chain, and per-player one-sojourn payoffs.
The transition matrix is strictly substochastic: the missing row mass is the
absorption probability (problem solved), kept per row in ``row_slack``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from . import kernels
from .model import GameConfig, Policy, Scenario1, Scenario2, Scenario2General
from .statespace import ExactSpace, ReducedSpace, StateSpace

__all__ = [
    "TransitionMatrix",
    "solve_rates",
    "solve_rate",
    "sojourn_denominators",
    "sojourn_denominator",
    "build_W",
    "build_W_dense",
    "build_Z",
    "dump_dynamics",
]


@dataclass(frozen=True)
class TransitionMatrix:
    """CSR one-jump transition matrix plus per-row absorption mass.

    Rows are strictly substochastic because the solve rate is strictly
    positive in every state; ``row_slack`` holds exactly the per-row deficit
    solve_rate / total_rate.
    """

    indptr: np.ndarray
    indices: np.ndarray
    data: np.ndarray
    row_slack: np.ndarray

    def __post_init__(self):
        for arr in (self.indptr, self.indices, self.data, self.row_slack):
            arr.flags.writeable = False

    @property
    def size(self) -> int:
        return len(self.indptr) - 1

    @property
    def nnz(self) -> int:
        return len(self.data)

    def matvec(self, x: np.ndarray) -> np.ndarray:
        return kernels.csr_matvec(self.indptr, self.indices, self.data, x)

    def row_sums(self) -> np.ndarray:
        return self.matvec(np.ones(self.size))

    def max_row_sum(self) -> float:
        return float(np.max(self.row_sums())) if self.size else 0.0

    def to_scipy(self) -> sp.csr_matrix:
        return sp.csr_matrix(
            (self.data, self.indices, self.indptr), shape=(self.size, self.size)
        )

    def to_dense(self) -> np.ndarray:
        return self.to_scipy().toarray()


def _investments(policy, space: StateSpace) -> np.ndarray:
    inv = policy.investments if isinstance(policy, Policy) else np.asarray(policy, float)
    if inv.shape != space.policy_shape:
        raise ValueError(
            f"policy shape {inv.shape} does not match space shape {space.policy_shape}"
        )
    return inv


def solve_rates(config: GameConfig, space: StateSpace, policy) -> np.ndarray:
    """Per-state rate at which the problem gets solved.

    Strictly positive everywhere: the fixed players keep investing even in
    the empty state, so the work never stalls.
    """
    inv = _investments(policy, space)
    scenario = config.scenario
    if isinstance(scenario, Scenario1):
        total = space.total_investment(inv)
        return scenario.gamma * (total + config.fixed_power)
    if isinstance(scenario, Scenario2):
        return np.full(space.size, scenario.beta)
    if isinstance(scenario, Scenario2General):
        sizes = space.state_sizes()
        if isinstance(space, ReducedSpace) and not scenario.size_only():
            raise ValueError(
                "table-based termination rates are tied to the exact state "
                "enumeration; the reduced space needs a preset"
            )
        return np.array(
            [scenario.rate_for(k, int(sizes[k])) for k in range(space.size)]
        )
    raise TypeError(f"unknown scenario {type(scenario).__name__}")


def solve_rate(config: GameConfig, space: StateSpace, state, policy) -> float:
    return float(solve_rates(config, space, policy)[space.ordinal(state)])


def _exit_rates(config: GameConfig, space: StateSpace) -> np.ndarray:
    """Per-state total arrival + departure rate (policy-independent)."""
    if isinstance(space, ExactSpace):
        out = np.zeros(space.size)
        lam = config.arrival_rates()
        mu = config.departure_rates()
        for j in range(space.n_players):
            out += np.where(space.presence(j), mu[j], lam[j])
        return out
    p = config.players[0]
    f = space.focal_present()
    k = space.other_counts()
    n = space.n_players
    return (p.arrival_rate * (1 - f) + p.departure_rate * f
            + p.arrival_rate * (n - 1 - k) + p.departure_rate * k)


def sojourn_denominators(config: GameConfig, space: StateSpace, policy) -> np.ndarray:
    """Per-state total event rate: solve rate plus all arrival/departure rates."""
    return solve_rates(config, space, policy) + _exit_rates(config, space)


def sojourn_denominator(config: GameConfig, space: StateSpace, state, policy) -> float:
    return float(sojourn_denominators(config, space, policy)[space.ordinal(state)])


def build_W(config: GameConfig, policy, space: StateSpace) -> TransitionMatrix:
    """One-jump transition probabilities of the embedded chain.

    Entry (S, S') is the per-player arrival or departure rate over the
    sojourn denominator of S; structurally impossible moves and zero-rate
    edges are not stored.  Absorption mass goes to ``row_slack``.
    """
    gamma = solve_rates(config, space, policy)
    denom = gamma + _exit_rates(config, space)

    rows: list[np.ndarray] = []
    cols: list[np.ndarray] = []
    vals: list[np.ndarray] = []
    ords = np.arange(space.size, dtype=np.int64)

    if isinstance(space, ExactSpace):
        lam = config.arrival_rates()
        mu = config.departure_rates()
        for j in range(space.n_players):
            present = space.presence(j)
            if lam[j] > 0:
                src = ords[~present]
                rows.append(src)
                cols.append(src | (1 << j))
                vals.append(lam[j] / denom[src])
            if mu[j] > 0:
                src = ords[present]
                rows.append(src)
                cols.append(src & ~(1 << j))
                vals.append(mu[j] / denom[src])
    else:
        p = config.players[0]
        n = space.n_players
        f = space.focal_present()
        k = space.other_counts()
        if p.arrival_rate > 0:
            src = ords[f == 0]
            rows.append(src)
            cols.append(src + n)
            vals.append(np.full(len(src), p.arrival_rate) / denom[src])
            src = ords[k < n - 1]
            rows.append(src)
            cols.append(src + 1)
            vals.append((n - 1 - k[src]) * p.arrival_rate / denom[src])
        if p.departure_rate > 0:
            src = ords[f == 1]
            rows.append(src)
            cols.append(src - n)
            vals.append(np.full(len(src), p.departure_rate) / denom[src])
            src = ords[k > 0]
            rows.append(src)
            cols.append(src - 1)
            vals.append(k[src] * p.departure_rate / denom[src])

    if rows:
        coo = sp.coo_matrix(
            (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
            shape=(space.size, space.size),
        )
        csr = coo.tocsr()
        csr.sort_indices()
        indptr = csr.indptr.astype(np.int64)
        indices = csr.indices.astype(np.int64)
        data = np.ascontiguousarray(csr.data, dtype=np.float64)
    else:
        indptr = np.zeros(space.size + 1, dtype=np.int64)
        indices = np.zeros(0, dtype=np.int64)
        data = np.zeros(0)

    return TransitionMatrix(indptr, indices, data, row_slack=gamma / denom)


def build_W_dense(config: GameConfig, policy, space: StateSpace):
    """Dense variant of build_W, bypassing the sparse assembly.

    Entries are bit-identical to ``build_W(...).to_dense()``; meant for the
    many tiny re-solves of the best-response verifier, where sparse
    construction overhead dominates.  Returns (W, row_slack).
    """
    gamma = solve_rates(config, space, policy)
    denom = gamma + _exit_rates(config, space)
    w = np.zeros((space.size, space.size))
    ords = np.arange(space.size, dtype=np.int64)

    if isinstance(space, ExactSpace):
        lam = config.arrival_rates()
        mu = config.departure_rates()
        for j in range(space.n_players):
            present = space.presence(j)
            src = ords[~present]
            w[src, src | (1 << j)] = lam[j] / denom[src]
            src = ords[present]
            w[src, src & ~(1 << j)] = mu[j] / denom[src]
    else:
        p = config.players[0]
        n = space.n_players
        f = space.focal_present()
        k = space.other_counts()
        src = ords[f == 0]
        w[src, src + n] = p.arrival_rate / denom[src]
        src = ords[k < n - 1]
        w[src, src + 1] = (n - 1 - k[src]) * p.arrival_rate / denom[src]
        src = ords[f == 1]
        w[src, src - n] = p.departure_rate / denom[src]
        src = ords[k > 0]
        w[src, src - 1] = k[src] * p.departure_rate / denom[src]
    return w, gamma / denom


def build_Z(config: GameConfig, policy, space: StateSpace, player: int) -> np.ndarray:
    """Expected one-sojourn payoff of ``player`` in every state.

    On the reduced space only the focal player (index 0 by convention) has a
    payoff vector.  Zero wherever the player is absent or invests nothing.
    """
    inv = _investments(policy, space)
    denom = sojourn_denominators(config, space, policy)
    scenario = config.scenario

    if isinstance(space, ExactSpace):
        cost = config.players[player].cost
        x_i = np.where(space.presence(player), inv[:, player], 0.0)
    else:
        if player != 0:
            raise ValueError("reduced space carries payoffs for the focal player only")
        cost = config.players[0].cost
        x_i = space.focal_present() * inv[:, 0]

    if isinstance(scenario, Scenario1):
        # kept in the (gamma*r - c) form so an exact cost tie gives an exact zero
        return (scenario.gamma * config.reward - cost) * x_i / denom

    total = space.total_investment(inv)
    gamma = solve_rates(config, space, policy)
    share = gamma * config.reward / (total + config.fixed_power)
    return (share - cost) * x_i / denom


def dump_dynamics(tm: TransitionMatrix, z_vectors: dict[int, np.ndarray], fh) -> None:
    """Text dump of the transition matrix and payoff vectors.

    Format: a ``W size nnz`` header followed by ``row col value`` triples,
    a ``slack size`` section of ``row value`` pairs, then one
    ``Z player size`` section per payoff vector.  Values use %.17g so the
    dump round-trips doubles.
    """
    fh.write(f"W {tm.size} {tm.nnz}\n")
    for i in range(tm.size):
        for k in range(tm.indptr[i], tm.indptr[i + 1]):
            fh.write(f"{i} {tm.indices[k]} {tm.data[k]:.17g}\n")
    fh.write(f"slack {tm.size}\n")
    for i, v in enumerate(tm.row_slack):
        fh.write(f"{i} {v:.17g}\n")
    for player in sorted(z_vectors):
        z = z_vectors[player]
        fh.write(f"Z {player} {len(z)}\n")
        for i, v in enumerate(z):
            fh.write(f"{i} {v:.17g}\n")
