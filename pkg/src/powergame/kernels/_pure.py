"""Pure NumPy/Python kernels.

Reference implementations of the hot loops: CSR matvec, the affine
fixed-point iteration, and the episode simulator.  The compiled extension in
``_fast.pyx`` mirrors these bit for bit (same operation order, same libm
calls), so results must not depend on which backend got selected.

The episode simulator draws from splitmix64 streams: episode ``idx`` runs on
the stream whose initial state is ``mix64(seed + (idx+1)*GOLDEN)``, which
makes every episode reproducible in isolation and the batch embarrassingly
parallel in principle.
"""

from __future__ import annotations

import math

import numpy as np

BACKEND_NAME = "pure"

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
_INV_2_53 = 2.0 ** -53


def mix64(z: int) -> int:
    """splitmix64 output function (finalizer) on a 64-bit state."""
    z &= MASK64
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9 & MASK64
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB & MASK64
    return z ^ (z >> 31)


def splitmix64_sequence(seed: int, n: int) -> np.ndarray:
    """First ``n`` raw 64-bit outputs of the stream with initial state ``seed``."""
    out = np.empty(n, dtype=np.uint64)
    state = seed & MASK64
    for i in range(n):
        state = (state + GOLDEN) & MASK64
        out[i] = mix64(state)
    return out


def u01_sequence(seed: int, n: int) -> np.ndarray:
    """First ``n`` uniforms in [0, 1) of the stream with initial state ``seed``."""
    raw = splitmix64_sequence(seed, n)
    return (raw >> np.uint64(11)).astype(np.float64) * _INV_2_53


def csr_matvec(indptr, indices, data, x):
    n = len(indptr) - 1
    if len(data) == 0:
        return np.zeros(n)
    rows = np.repeat(np.arange(n, dtype=np.int64), np.diff(indptr))
    return np.bincount(rows, weights=data * x[indices], minlength=n)


def picard_solve(indptr, indices, data, z, tol, max_iter):
    """Iterate r <- W r + z from r = 0; stop when the step shrinks to ``tol``.

    Returns ``(r, iterations, last_diff)``; the caller decides whether
    ``last_diff <= tol`` counts as convergence.
    """
    n = len(indptr) - 1
    rows = np.repeat(np.arange(n, dtype=np.int64), np.diff(indptr))
    r = np.zeros(n)
    diff = math.inf
    it = 0
    for it in range(1, max_iter + 1):
        if len(data):
            r_new = np.bincount(rows, weights=data * r[indices], minlength=n) + z
        else:
            r_new = z.copy()
        diff = float(np.max(np.abs(r_new - r))) if n else 0.0
        r = r_new
        if diff <= tol:
            break
    return r, it, diff


def simulate_batch(ev_indptr, ev_prob, ev_target, total_rate,
                   cost_rate, reward_rate, win_lo, win_hi, win_payout,
                   start, n_episodes, seed, max_events):
    """Run ``n_episodes`` independent episodes of the jump chain.

    Per sojourn the tracked player accrues ``(reward_rate - cost_rate) * dt``;
    on absorption, when ``win_payout`` is nonzero, one extra uniform decides
    the winner: the tracked player collects the payout iff the draw lands in
    [win_lo, win_hi) of the absorbing state.  Tracking different players of
    the same game with the same seed replays identical trajectories with
    disjoint win intervals, so winners stay mutually exclusive across runs.
    Episodes that hit ``max_events`` are cut off with the utility accrued so
    far; callers detect them via the event count.

    Returns ``(utilities, event_counts)`` as float64/int64 arrays.
    """
    utilities = np.empty(n_episodes)
    event_counts = np.empty(n_episodes, dtype=np.int64)
    log1p = math.log1p

    for idx in range(n_episodes):
        state = mix64((seed + GOLDEN * (idx + 1)) & MASK64)
        s = start
        utility = 0.0
        events = 0
        while events < max_events:
            state = (state + GOLDEN) & MASK64
            u = (mix64(state) >> 11) * _INV_2_53
            dt = -log1p(-u) / total_rate[s]
            utility += (reward_rate[s] - cost_rate[s]) * dt

            state = (state + GOLDEN) & MASK64
            u = (mix64(state) >> 11) * _INV_2_53
            lo = ev_indptr[s]
            hi = ev_indptr[s + 1]
            chosen = hi - 1
            acc = 0.0
            for e in range(lo, hi):
                acc += ev_prob[e]
                if u < acc:
                    chosen = e
                    break
            events += 1
            target = ev_target[chosen]
            if target < 0:
                if win_payout != 0.0:
                    state = (state + GOLDEN) & MASK64
                    u = (mix64(state) >> 11) * _INV_2_53
                    if win_lo[s] <= u < win_hi[s]:
                        utility += win_payout
                break
            s = target
        utilities[idx] = utility
        event_counts[idx] = events
    return utilities, event_counts
