"""Equilibrium policies, baselines, and numerical certification.

Winner-takes-reward games have a threshold equilibrium: a player invests its
cap everywhere or nothing anywhere, depending only on the sign of
gamma*reward - cost.  Streamed-reward games have a per-state closed form
driven by psi, the equilibrium total power (investments plus fixed power):
psi solves a quadratic determined by the active players' costs, and the
active set itself is built greedily in ascending cost order.

Both constructions are certified numerically by a best-response sweep: hold
everyone else fixed, grid the deviating player's investment in one state,
re-solve utilities per deviation, and report the largest improvement found.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .dynamics import build_W, build_W_dense, build_Z, solve_rates
from .model import (
    GameConfig,
    Policy,
    Scenario1,
    Scenario2,
    Scenario2General,
    require_valid,
)
from .solver import (
    DEFAULT_TOL,
    solve_utilities,
    solve_utilities_auto,
    solve_utilities_direct,
)
from .statespace import ExactSpace, ReducedSpace, StateSpace, build_space

__all__ = [
    "ActiveSet",
    "EquilibriumResult",
    "psi_value",
    "construct_active_set",
    "mpe_scenario1",
    "mpe_scenario2",
    "compute_mpe",
    "sne",
    "sne_homogeneous_utility",
    "verify_best_response",
    "certify",
    "verifier_tolerance",
    "equilibrium_to_dict",
]

DEFAULT_GRID_POINTS = 256
VERIFIER_TOL_FACTOR = 1e-6
# below this size the verifier assembles W densely per grid point; the sparse
# detour costs more than the solve itself on such systems
DENSE_SWEEP_LIMIT = 512


@dataclass(frozen=True)
class ActiveSet:
    """Players of a state that invest a positive amount, plus the total power.

    ``members`` are positions into the cost list handed to the constructor.
    ``psi`` is the equilibrium value of (total investment + fixed power);
    for an empty set it degenerates to the fixed power alone.
    """

    members: tuple[int, ...]
    psi: float


@dataclass
class EquilibriumResult:
    """A policy with its solved utilities and solver/verification metadata.

    ``utilities`` has one column per player on the exact space, a single
    focal-player column on the reduced space, and one column per player for
    static (single-state) games.  ``certificates`` maps (state ordinal,
    player column) to the best-response gap found by the verifier; it is
    populated by :func:`certify`.
    """

    kind: str
    mode: str
    policy: Policy
    utilities: np.ndarray
    residuals: np.ndarray
    iterations: np.ndarray
    psi: np.ndarray | None = None
    active_counts: np.ndarray | None = None
    flags: dict = field(default_factory=dict)
    certificates: dict | None = None


def verifier_tolerance(config: GameConfig) -> float:
    return VERIFIER_TOL_FACTOR * config.reward


def psi_value(active_costs, r: float, beta: float, ell: float) -> float:
    """Equilibrium total power for a set of active players.

    The positive root of (sum(c)/(r*beta)) * psi^2 - (m-1) * psi - ell = 0
    with m the number of active players.
    """
    costs = np.asarray(active_costs, dtype=float)
    if costs.size == 0:
        raise ValueError("active cost list must be non-empty")
    m = costs.size
    total = float(costs.sum())
    rb = r * beta
    return rb * ((m - 1) + math.sqrt((m - 1) ** 2 + 4.0 * ell * total / rb)) / (2.0 * total)


def construct_active_set(costs, r: float, beta: float, ell: float) -> ActiveSet:
    """Greedy active-set construction over costs sorted ascending.

    Players enter cheapest first; after each tentative add the total power is
    recomputed and the newcomer must still clear cost < r*beta/psi, otherwise
    construction stops and the previous set stands.  The empty set (even the
    cheapest player is priced out) is legal and leaves total power at the
    fixed players' ell.
    """
    costs = list(costs)
    if any(costs[i] > costs[i + 1] for i in range(len(costs) - 1)):
        raise ValueError("costs must be sorted ascending")
    members: list[int] = []
    psi = ell
    for j, c in enumerate(costs):
        tentative = psi_value([costs[k] for k in members] + [c], r, beta, ell)
        if c < r * beta / tentative:
            members.append(j)
            psi = tentative
        else:
            break
    return ActiveSet(tuple(members), psi)


def _solve_column(config, space, policy, player, method, tol=DEFAULT_TOL):
    w = build_W(config, policy, space)
    z = build_Z(config, policy, space, player)
    if method == "iterative":
        return solve_utilities(w, z, tol=tol)
    if method == "direct":
        return solve_utilities_direct(w, z)
    return solve_utilities_auto(w, z)


def _solved_result(config, space, policy, kind, method,
                   tol=DEFAULT_TOL, **extra) -> EquilibriumResult:
    players = range(config.n_players) if isinstance(space, ExactSpace) else (0,)
    w = build_W(config, policy, space)
    cols = []
    residuals = []
    iterations = []
    for i in players:
        z = build_Z(config, policy, space, i)
        if method == "iterative":
            sol = solve_utilities(w, z, tol=tol)
        elif method == "direct":
            sol = solve_utilities_direct(w, z)
        else:
            sol = solve_utilities_auto(w, z)
        cols.append(sol.values)
        residuals.append(sol.residual)
        iterations.append(sol.iterations)
    return EquilibriumResult(
        kind=kind,
        mode=space.mode,
        policy=policy,
        utilities=np.column_stack(cols),
        residuals=np.array(residuals),
        iterations=np.array(iterations, dtype=np.int64),
        **extra,
    )


def mpe_scenario1(config: GameConfig, space: StateSpace | None = None,
                  method: str = "auto", tol: float = DEFAULT_TOL) -> EquilibriumResult:
    """Threshold equilibrium of the winner-takes-reward game.

    A player invests its full cap in every state when gamma*reward exceeds
    its cost, and nothing otherwise; an exact tie also resolves to zero (the
    player is indifferent, zero minimizes exposure).  The policy does not
    depend on the state or on arrival/departure rates.
    """
    require_valid(config)
    if not isinstance(config.scenario, Scenario1):
        raise TypeError("mpe_scenario1 needs a winner-takes-reward config")
    if space is None:
        space = build_space(config)
    gamma = config.scenario.gamma
    per_player = np.where(
        gamma * config.reward > config.costs(), config.max_powers(), 0.0
    )
    if isinstance(space, ExactSpace):
        inv = np.tile(per_player, (space.size, 1))
    else:
        inv = np.tile([per_player[0], per_player[0]], (space.size, 1))
    return _solved_result(config, space, Policy(inv), "mpe", method, tol=tol)


def _scenario2_reward_rates(config: GameConfig, space: StateSpace) -> np.ndarray:
    """Per-state termination rate (the beta role) for streamed-reward games."""
    zeros = np.zeros(space.policy_shape)
    return solve_rates(config, space, zeros)


def mpe_scenario2(config: GameConfig, space: StateSpace | None = None,
                  method: str = "auto", tol: float = DEFAULT_TOL) -> EquilibriumResult:
    """Closed-form equilibrium of the streamed-reward game, state by state.

    Per state: build the active set, get psi, then each present player
    invests max(psi * (1 - cost*psi/(r*beta)), 0), clamped to its cap.  A
    clamp means the interior closed form no longer applies exactly; the
    result is flagged and left to the certificates to quantify.
    """
    require_valid(config)
    if not isinstance(config.scenario, (Scenario2, Scenario2General)):
        raise TypeError("mpe_scenario2 needs a streamed-reward config")
    if space is None:
        space = build_space(config)
    r = config.reward
    ell = config.fixed_power
    beta_eff = _scenario2_reward_rates(config, space)

    clamped: list[tuple[int, int]] = []
    empty_states: list[int] = []
    psi_arr = np.empty(space.size)
    counts = np.zeros(space.size, dtype=np.int64)

    if isinstance(space, ExactSpace):
        costs = config.costs()
        caps = config.max_powers()
        order = sorted(range(config.n_players), key=lambda j: (costs[j], j))
        inv = np.zeros(space.policy_shape)
        for s in range(space.size):
            members = [j for j in order if s >> j & 1]
            rb = r * beta_eff[s]
            if not members:
                psi_arr[s] = ell
                continue
            aset = construct_active_set([costs[j] for j in members],
                                        r, beta_eff[s], ell)
            psi_arr[s] = aset.psi
            counts[s] = len(aset.members)
            if not aset.members:
                empty_states.append(s)
                continue
            for j in members:
                x = max(aset.psi * (1.0 - costs[j] * aset.psi / rb), 0.0)
                if x > caps[j]:
                    clamped.append((s, j))
                    x = caps[j]
                inv[s, j] = x
    else:
        p = config.players[0]
        m = space.state_sizes().astype(float)
        rb = r * beta_eff
        # homogeneous active set is all-or-nothing: the membership test
        # c < r*beta/psi reduces to ell < r*beta/c independently of m
        feasible = (m >= 1) & (ell < rb / p.cost)
        psi_arr = np.full(space.size, ell)
        with np.errstate(divide="ignore", invalid="ignore"):
            disc = (m - 1.0) ** 2 + 4.0 * ell * m * p.cost / rb
            psi_all = rb * ((m - 1.0) + np.sqrt(disc)) / (2.0 * m * p.cost)
        psi_arr[feasible] = psi_all[feasible]
        counts = np.where(feasible, m, 0).astype(np.int64)
        x = np.zeros(space.size)
        x[feasible] = np.maximum(
            psi_arr[feasible] * (1.0 - p.cost * psi_arr[feasible] / rb[feasible]), 0.0
        )
        over = x > p.max_power
        if np.any(over):
            x = np.minimum(x, p.max_power)
        inv = np.zeros(space.policy_shape)
        f = space.focal_present().astype(bool)
        k = space.other_counts()
        inv[f, 0] = x[f]
        inv[k > 0, 1] = x[k > 0]
        for s in np.nonzero(over)[0]:
            if f[s]:
                clamped.append((int(s), 0))
            if k[s] > 0:
                clamped.append((int(s), 1))
        empty_states = [int(s) for s in np.nonzero((m >= 1) & ~feasible)[0]]

    flags = {
        "clamped": bool(clamped),
        "clamped_entries": clamped,
        "empty_active_set_states": empty_states,
    }
    return _solved_result(config, space, Policy(inv), "mpe", method, tol=tol,
                          psi=psi_arr, active_counts=counts, flags=flags)


def compute_mpe(config: GameConfig, space: StateSpace | None = None,
                method: str = "auto", tol: float = DEFAULT_TOL) -> EquilibriumResult:
    if isinstance(config.scenario, Scenario1):
        return mpe_scenario1(config, space, method, tol)
    return mpe_scenario2(config, space, method, tol)


def sne(config: GameConfig, state) -> EquilibriumResult:
    """Static (single-state, no churn) equilibrium for the given player set.

    The per-state policy coincides with the dynamic equilibrium restricted
    to that state; utilities come out in closed form because the only event
    left is the problem getting solved.
    """
    require_valid(config)
    exact = ExactSpace(config.n_players)
    mask = exact.ordinal(state)
    members = sorted(exact.inverse(mask))
    n = config.n_players
    r = config.reward
    ell = config.fixed_power
    costs = config.costs()
    caps = config.max_powers()
    inv = np.zeros((1, n))
    psi_arr = None
    counts = None
    flags: dict = {}

    scenario = config.scenario
    if isinstance(scenario, Scenario1):
        gamma = scenario.gamma
        for j in members:
            inv[0, j] = caps[j] if gamma * r > costs[j] else 0.0
        total = inv.sum() + ell
        util = (gamma * r - costs) * inv[0] / (gamma * total)
    else:
        size = len(members)
        if isinstance(scenario, Scenario2):
            beta = scenario.beta
        else:
            beta = scenario.rate_for(mask, size)
        clamped = []
        psi = ell
        if members:
            order = sorted(members, key=lambda j: (costs[j], j))
            aset = construct_active_set([costs[j] for j in order], r, beta, ell)
            psi = aset.psi
            for j in order:
                x = max(psi * (1.0 - costs[j] * psi / (r * beta)), 0.0)
                if x > caps[j]:
                    clamped.append((0, j))
                    x = caps[j]
                inv[0, j] = x
            counts = np.array([len(aset.members)], dtype=np.int64)
            if not aset.members:
                flags["empty_active_set_states"] = [0]
        total = inv.sum() + ell
        util = (inv[0] * r * beta / total - costs * inv[0]) / beta
        psi_arr = np.array([psi])
        flags.setdefault("clamped", bool(clamped))
        flags.setdefault("clamped_entries", clamped)

    return EquilibriumResult(
        kind="sne",
        mode="static",
        policy=Policy(inv),
        utilities=util.reshape(1, n),
        residuals=np.zeros(n),
        iterations=np.zeros(n, dtype=np.int64),
        psi=psi_arr,
        active_counts=counts,
        flags=flags,
    )


def sne_homogeneous_utility(config: GameConfig, size: int) -> float:
    """Closed-form static per-player utility when ``size`` identical players
    are present.  O(1); avoids materializing a width-n policy row."""
    require_valid(config)
    if size <= 0:
        return 0.0
    p = config.players[0]
    r = config.reward
    ell = config.fixed_power
    scenario = config.scenario
    if isinstance(scenario, Scenario1):
        gamma = scenario.gamma
        x = p.max_power if gamma * r > p.cost else 0.0
        if x == 0.0:
            return 0.0
        return (gamma * r - p.cost) * x / (gamma * (size * x + ell))
    if isinstance(scenario, Scenario2):
        beta = scenario.beta
    else:
        if not scenario.size_only():
            raise ValueError("table-based rates need an explicit state; use sne()")
        beta = scenario.rate_for(-1, size)
    rb = r * beta
    if ell >= rb / p.cost:
        return 0.0
    psi = psi_value([p.cost] * size, r, beta, ell)
    x = min(max(psi * (1.0 - p.cost * psi / rb), 0.0), p.max_power)
    total = size * x + ell
    return (x * rb / total - p.cost * x) / beta


def verify_best_response(config: GameConfig, space: StateSpace, policy,
                         player: int, state, grid_points: int = DEFAULT_GRID_POINTS,
                         method: str = "auto") -> float:
    """Best-response gap of ``player`` at ``state`` against a fixed policy.

    Sweeps the player's investment in that single state over a uniform grid
    on [0, cap] plus the candidate value, re-solving utilities per point.
    Returns max(deviation utility - candidate utility) at that state; values
    within the verifier tolerance certify the candidate as unimprovable
    there.
    """
    if grid_points < 2:
        raise ValueError("grid_points must be at least 2")
    pol = policy if isinstance(policy, Policy) else Policy(np.asarray(policy, float))
    ordinal = state if isinstance(state, (int, np.integer)) else space.ordinal(state)
    if isinstance(space, ExactSpace):
        col = player
        cap = config.players[player].max_power
    else:
        if player != 0:
            raise ValueError("reduced space verifies the focal player only")
        col = 0
        cap = config.players[0].max_power
    candidate = float(pol.investments[ordinal, col])
    points = np.unique(np.append(np.linspace(0.0, cap, grid_points), candidate))

    if method == "auto" and space.size <= DENSE_SWEEP_LIMIT:
        eye = np.eye(space.size)

        def value_at(p):
            w, _ = build_W_dense(config, p, space)
            z = build_Z(config, p, space, player)
            return float(np.linalg.solve(eye - w, z)[ordinal])
    else:
        def value_at(p):
            return float(_solve_column(config, space, p, player, method).values[ordinal])

    base = value_at(pol)
    gap = 0.0
    for x in points:
        if x == candidate:
            continue
        deviant = pol.with_entry(ordinal, col, float(x))
        gap = max(gap, value_at(deviant) - base)
    return gap


def certify(config: GameConfig, space: StateSpace, result: EquilibriumResult,
            states=None, players=None, grid_points: int = DEFAULT_GRID_POINTS,
            method: str = "auto") -> dict:
    """Best-response gaps for a set of (state, player) pairs.

    Defaults to every state, and to every player on the exact space or the
    focal player on the reduced one.  Attaches the table to the result and
    returns it.
    """
    if states is None:
        states = range(space.size)
    if players is None:
        players = range(config.n_players) if isinstance(space, ExactSpace) else (0,)
    table: dict[tuple[int, int], float] = {}
    for s in states:
        for i in players:
            table[(int(s), int(i))] = verify_best_response(
                config, space, result.policy, i, int(s), grid_points, method
            )
    result.certificates = table
    return table


def equilibrium_to_dict(result: EquilibriumResult, config: GameConfig,
                        space: StateSpace | None = None) -> dict:
    """JSON-ready document with the policy table, utilities and metadata."""
    doc = {
        "kind": result.kind,
        "mode": result.mode,
        "investments": result.policy.investments.tolist(),
        "utilities": result.utilities.tolist(),
        "residuals": result.residuals.tolist(),
        "iterations": result.iterations.tolist(),
        "flags": result.flags,
    }
    if result.psi is not None:
        doc["psi"] = result.psi.tolist()
    if result.active_counts is not None:
        doc["active_counts"] = result.active_counts.tolist()
    if result.certificates is not None:
        doc["certificates"] = {
            f"{s}:{i}": gap for (s, i), gap in sorted(result.certificates.items())
        }
    if space is not None and space.size <= 4096:
        if isinstance(space, ExactSpace):
            labels = [sorted(space.inverse(k)) for k in range(space.size)]
        elif isinstance(space, ReducedSpace):
            labels = [list(space.inverse(k)) for k in range(space.size)]
        else:
            labels = None
        if labels is not None:
            doc["states"] = labels
    doc["players"] = [p.id for p in config.players]
    return doc
