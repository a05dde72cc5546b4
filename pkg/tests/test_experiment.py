import json
import math

import pytest

from powergame.equilibrium import compute_mpe, sne_homogeneous_utility
from powergame.experiment import (
    CSV_HEADER,
    ExperimentSpec,
    load_experiment,
    parse_experiment,
    run_experiment,
)
from powergame.model import ConfigFormatError, GameConfig, Scenario2
from powergame.statespace import ReducedSpace

from conftest import make_players


def config_doc():
    return {
        "reward": 200.0,
        "fixed_power": 5.0,
        "scenario": {"type": "scenario2", "beta": 2.0},
        "homogeneous": {"count": 3, "cost": 0.5, "arrival_rate": 1.0,
                        "departure_rate": 3.0, "max_power": 1e4},
    }


def spec_doc(**overrides):
    doc = {"config": config_doc(), "sweep": {"lambda": [1.0]}}
    doc.update(overrides)
    return doc


class TestParsing:
    def test_minimal(self):
        spec = parse_experiment(spec_doc())
        assert spec.modes == ("mpe", "sne")
        assert spec.mc_episodes == 10_000
        assert spec.seed == 0
        assert spec.out is None
        assert spec.sweep == {"lambda": (1.0,)}

    def test_not_a_dict(self):
        with pytest.raises(ConfigFormatError):
            parse_experiment(["nope"])

    def test_config_keys_are_exclusive(self):
        doc = spec_doc()
        doc["config_path"] = "game.json"
        with pytest.raises(ConfigFormatError, match="exactly one"):
            parse_experiment(doc)
        with pytest.raises(ConfigFormatError, match="exactly one"):
            parse_experiment({"sweep": {}})

    def test_config_path_resolved_against_base_dir(self, tmp_path):
        (tmp_path / "game.json").write_text(json.dumps(config_doc()))
        spec = parse_experiment({"config_path": "game.json"},
                                base_dir=str(tmp_path))
        assert spec.config.n_players == 3

    def test_load_resolves_relative_to_spec_file(self, tmp_path):
        (tmp_path / "game.json").write_text(json.dumps(config_doc()))
        spec_file = tmp_path / "sweep.json"
        spec_file.write_text(json.dumps({"config_path": "game.json",
                                         "sweep": {"mu": [2.0]}}))
        spec = load_experiment(str(spec_file))
        assert spec.sweep == {"mu": (2.0,)}

    @pytest.mark.parametrize("sweep", [
        {"gamma": [1.0]},
        {"lambda": []},
        {"mu": [0.0]},
        {"lambda": [-2.0]},
        {"state_size": [2.5]},
    ])
    def test_bad_sweeps(self, sweep):
        with pytest.raises(ConfigFormatError):
            parse_experiment(spec_doc(sweep=sweep))

    def test_sweep_must_be_mapping(self):
        with pytest.raises(ConfigFormatError):
            parse_experiment(spec_doc(sweep=[["lambda", 1.0]]))

    @pytest.mark.parametrize("modes", [[], ["mpe", "nope"]])
    def test_bad_modes(self, modes):
        with pytest.raises(ConfigFormatError):
            parse_experiment(spec_doc(modes=modes))

    def test_bad_episode_count(self):
        with pytest.raises(ConfigFormatError):
            parse_experiment(spec_doc(mc_episodes=0))

    def test_overrides(self):
        spec = parse_experiment(spec_doc(modes=["mc"], mc_episodes=50,
                                         seed=9, out="rows.csv"))
        assert spec.modes == ("mc",)
        assert spec.mc_episodes == 50
        assert spec.seed == 9
        assert spec.out == "rows.csv"


class TestRunExperiment:
    def test_rate_sweep_rows(self, homogeneous_streamed):
        spec = ExperimentSpec(
            config=homogeneous_streamed(3),
            sweep={"lambda": (2.0, 0.5), "mu": (1.0,)},
            modes=("mpe", "sne"),
        )
        result = run_experiment(spec)
        assert len(result.rows) == 6
        keys = [(r.lam, r.mu, r.n_others) for r in result.rows]
        assert keys == sorted(keys)
        assert keys[0] == (0.5, 1.0, 0)
        assert all(r.scenario == "scenario2" for r in result.rows)

    def test_mpe_column_matches_direct_solve(self, homogeneous_streamed):
        spec = ExperimentSpec(
            config=homogeneous_streamed(3),
            sweep={"lambda": (2.0,), "mu": (1.0,)},
            modes=("mpe",),
        )
        result = run_experiment(spec)
        cfg = homogeneous_streamed(3, lam=2.0, mu=1.0)
        expected = compute_mpe(cfg, ReducedSpace(3))
        for row in result.rows:
            assert row.mpe_utility == float(expected.utilities[3 + row.n_others, 0])
            assert not math.isnan(row.residual)
            assert float(row.iterations).is_integer()
            assert math.isnan(row.sne_utility)

    def test_sne_column(self, homogeneous_streamed):
        cfg = homogeneous_streamed(4)
        spec = ExperimentSpec(config=cfg, sweep={}, modes=("sne",))
        result = run_experiment(spec)
        assert len(result.rows) == 4
        for row in result.rows:
            assert row.sne_utility == sne_homogeneous_utility(cfg, row.n_others + 1)
            assert math.isnan(row.mpe_utility)
            assert math.isnan(row.mc_mean)
            assert math.isnan(row.iterations)

    def test_static_baseline_example(self):
        # ten identical players with negligible fixed power: the static
        # per-player utility lands at reward / 100
        cfg = GameConfig(
            players=make_players(10, cost=1.0, lam=1.0, mu=1.0, cap=1e9),
            reward=1e5, fixed_power=1e-9, scenario=Scenario2(beta=1.0),
        )
        spec = ExperimentSpec(config=cfg, sweep={"state_size": (10.0,)},
                              modes=("sne",))
        rows = run_experiment(spec).rows
        assert len(rows) == 1
        assert rows[0].n_others == 9
        assert rows[0].sne_utility == pytest.approx(1000.0, rel=1e-6)

    def test_state_size_sweep_emits_full_house_only(self, homogeneous_streamed):
        spec = ExperimentSpec(
            config=homogeneous_streamed(3),
            sweep={"state_size": (2.0, 4.0)},
            modes=("mpe",),
        )
        rows = run_experiment(spec).rows
        assert [(r.n_others, r.lam, r.mu) for r in rows] == [
            (1, 1.0, 3.0), (3, 1.0, 3.0)]
        for row, n in zip(rows, (2, 4)):
            cfg = homogeneous_streamed(n)
            expected = compute_mpe(cfg, ReducedSpace(n))
            assert row.mpe_utility == float(expected.utilities[2 * n - 1, 0])

    def test_mc_mode(self, homogeneous_streamed):
        spec = ExperimentSpec(
            config=homogeneous_streamed(2),
            sweep={},
            modes=("mpe", "mc"),
            mc_episodes=300,
            seed=4,
        )
        rows = run_experiment(spec).rows
        for row in rows:
            assert math.isfinite(row.mc_mean)
            assert math.isfinite(row.mc_stderr)
            # the simulation estimates the analytic column
            assert abs(row.mc_mean - row.mpe_utility) <= 5 * row.mc_stderr

    def test_heterogeneous_rejected(self):
        players = (make_players(1, 1.0, 1.0, 1.0, 10.0)
                   + make_players(1, 2.0, 1.0, 1.0, 10.0, prefix="q"))
        cfg = GameConfig(players=players, reward=100.0, fixed_power=1.0,
                         scenario=Scenario2(beta=1.0))
        spec = ExperimentSpec(config=cfg, sweep={}, modes=("sne",))
        with pytest.raises(ValueError, match="homogeneous"):
            run_experiment(spec)

    def test_deterministic(self, homogeneous_streamed):
        spec = ExperimentSpec(
            config=homogeneous_streamed(2),
            sweep={"lambda": (1.0, 2.0)},
            modes=("mpe", "sne", "mc"),
            mc_episodes=50,
            seed=1,
        )
        assert run_experiment(spec).to_csv() == run_experiment(spec).to_csv()


class TestCsvShape:
    @pytest.fixture()
    def result(self, homogeneous_streamed):
        spec = ExperimentSpec(
            config=homogeneous_streamed(2),
            sweep={"lambda": (0.5,)},
            modes=("mpe", "sne"),
        )
        return run_experiment(spec)

    def test_header_and_row_count(self, result):
        lines = result.to_csv().splitlines()
        assert lines[0] == CSV_HEADER
        assert len(lines) == 1 + len(result.rows)

    def test_field_formats(self, result):
        for line in result.to_csv().splitlines()[1:]:
            fields = line.split(",")
            assert len(fields) == 10
            assert fields[0] == "scenario2"
            assert "." not in fields[1]          # n_others is an int
            assert "." not in fields[9]          # iterations too
            for f in fields[1:]:
                float(f)  # every numeric field round-trips (nan included)

    def test_nan_serialization(self, homogeneous_streamed):
        spec = ExperimentSpec(config=homogeneous_streamed(2), sweep={},
                              modes=("sne",))
        line = run_experiment(spec).to_csv().splitlines()[1]
        fields = line.split(",")
        assert fields[4] == "nan" and fields[6] == "nan" and fields[9] == "nan"

    def test_seventeen_digit_floats(self, result):
        row = result.rows[0]
        line = result.to_csv().splitlines()[1]
        assert line.split(",")[4] == f"{row.mpe_utility:.17g}"

    def test_write_csv_newline_discipline(self, result, tmp_path):
        path = tmp_path / "rows.csv"
        result.write_csv(str(path))
        raw = path.read_bytes()
        assert raw == result.to_csv().encode()
        assert b"\r" not in raw
        assert raw.endswith(b"\n")
