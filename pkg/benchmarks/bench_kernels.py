"""Compare the compiled kernels against the pure-Python fallback.

Times the two hot loops (the affine fixed-point solver and the episode
simulator) on a realistic game chain, checks that both backends produce
bit-identical output, and prints a small table with the speedup.

Usage:
    python3 benchmarks/bench_kernels.py [--players 10] [--episodes 50000]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from powergame.dynamics import build_W, build_Z
from powergame.equilibrium import compute_mpe
from powergame.kernels import available_backends, get_backend
from powergame.mc import _event_tables, _player_arrays
from powergame.model import GameConfig, PlayerParams, Scenario1, Scenario2
from powergame.statespace import ExactSpace


def streamed_config(n: int) -> GameConfig:
    players = tuple(
        PlayerParams(id=f"p{i}", cost=0.5, arrival_rate=1.0,
                     departure_rate=3.0, max_power=1e4)
        for i in range(n)
    )
    return GameConfig(players=players, reward=200.0, fixed_power=5.0,
                      scenario=Scenario2(beta=2.0))


def winner_config(n: int) -> GameConfig:
    players = tuple(
        PlayerParams(id=f"p{i}", cost=1.0 + 0.5 * i, arrival_rate=0.7,
                     departure_rate=1.3, max_power=40.0)
        for i in range(n)
    )
    return GameConfig(players=players, reward=100.0, fixed_power=10.0,
                      scenario=Scenario1(gamma=0.05))


def best_of(fn, repeats: int) -> float:
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def bench_picard(n_players: int, repeats: int):
    cfg = streamed_config(n_players)
    space = ExactSpace(n_players)
    res = compute_mpe(cfg, space)
    w = build_W(cfg, res.policy, space)
    z = build_Z(cfg, res.policy, space, 0)

    results = {}
    outputs = {}
    for name in available_backends():
        impl = get_backend(name)
        run = lambda: impl.picard_solve(w.indptr, w.indices, w.data, z,
                                        1e-10, 10 ** 6)
        outputs[name] = run()
        results[name] = best_of(run, repeats)
    same = all(
        np.array_equal(outputs[name][0], outputs["pure"][0])
        and outputs[name][1] == outputs["pure"][1]
        for name in outputs
    )
    return f"picard_solve ({w.size} states, {w.nnz} edges)", results, same


def bench_simulate(n_players: int, episodes: int, repeats: int):
    cfg = winner_config(n_players)
    space = ExactSpace(n_players)
    res = compute_mpe(cfg, space)
    tables = _event_tables(cfg, space, res.policy)
    cost_rate, reward_rate, win_lo, win_hi, win_payout = _player_arrays(
        cfg, space, res.policy, 0
    )
    start = space.size - 1

    results = {}
    outputs = {}
    for name in available_backends():
        impl = get_backend(name)
        run = lambda: impl.simulate_batch(
            tables.ev_indptr, tables.ev_prob, tables.ev_target,
            tables.total_rate, cost_rate, reward_rate, win_lo, win_hi,
            win_payout, start, episodes, 12345, 10 ** 8,
        )
        outputs[name] = run()
        results[name] = best_of(run, repeats)
    same = all(
        np.array_equal(outputs[name][0], outputs["pure"][0])
        and np.array_equal(outputs[name][1], outputs["pure"][1])
        for name in outputs
    )
    return f"simulate_batch ({episodes} episodes, {space.size} states)", results, same


def report(label: str, results: dict, identical: bool) -> None:
    print(f"\n{label}")
    base = results.get("pure")
    for name in sorted(results):
        t = results[name]
        speedup = f"{base / t:6.1f}x" if name != "pure" and t > 0 else "  1.0x"
        print(f"  {name:<6} {t * 1e3:10.2f} ms  {speedup}")
    print(f"  outputs bit-identical across backends: {identical}")


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--players", type=int, default=10,
                        help="universe size for the solver benchmark")
    parser.add_argument("--episodes", type=int, default=50_000,
                        help="episode count for the simulator benchmark")
    parser.add_argument("--repeats", type=int, default=5,
                        help="timing repetitions (best-of)")
    args = parser.parse_args()

    print(f"backends available: {', '.join(available_backends())}")
    report(*bench_picard(args.players, args.repeats))
    report(*bench_simulate(3, args.episodes, args.repeats))


if __name__ == "__main__":
    main()
