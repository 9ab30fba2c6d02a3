"""CLI: config round trip, schemas, determinism, exit codes, file handling."""

import os
import stat

import pytest

from remanopt.cli import (
    EXIT_CONFIG,
    EXIT_INFEASIBLE,
    EXIT_IO,
    EXIT_OK,
    MAP_HEADER,
    RunConfig,
    main,
    read_config_echo,
)


def run(*argv):
    return main([str(a) for a in argv])


def read_rows(path):
    header, rows = None, []
    for line in path.read_text().splitlines():
        if line.startswith("#"):
            continue
        if header is None:
            header = line.split(",")
        else:
            rows.append(line.split(","))
    return header, rows


class TestConfig:
    def test_defaults_are_reference_values(self):
        cfg = RunConfig()
        assert (cfg.lam, cfg.V, cfg.delta) == (1000.0, 1000.0, 0.8)
        assert (cfg.c, cfg.c_r, cfg.c_coll) == (200.0, 80.0, 40.0)
        assert (cfg.H, cfg.h) == (10000.0, 100.0)

    def test_toml_round_trip(self):
        cfg = RunConfig(alpha=0.77, seed=7, fractile="floor", workers=3)
        again = RunConfig.from_toml(cfg.to_toml())
        assert again == cfg

    def test_rejects_unknown_key(self):
        from remanopt.cli import ConfigError

        with pytest.raises(ConfigError):
            RunConfig.from_toml("[market]\nlambda_typo = 3\n")

    def test_rejects_invalid_values(self):
        from remanopt.cli import ConfigError

        with pytest.raises(ConfigError):
            RunConfig.from_toml("[market]\ndelta = 1.4\n")
        with pytest.raises(ConfigError):
            RunConfig.from_toml("[contract]\nh = 300.0\n")


class TestOptimizeCommand:
    def test_published_new_only_record(self, tmp_path):
        assert run("--out", tmp_path, "--quiet", "optimize", "n") == EXIT_OK
        header, rows = read_rows(tmp_path / "optimize_n.csv")
        row = dict(zip(header, rows[0]))
        assert float(row["p_n"]) == pytest.approx(497.74, abs=0.01)
        assert int(row["q_n"]) == 383
        assert float(row["oem_profit"]) == pytest.approx(112488.44, abs=0.5)

    def test_emitted_config_reparses(self, tmp_path):
        assert run("--out", tmp_path, "--quiet", "--seed", 99, "optimize", "n") == EXIT_OK
        cfg = read_config_echo(tmp_path / "optimize_n.csv")
        assert cfg.seed == 99
        assert cfg.out_dir == str(tmp_path)

    def test_reruns_are_byte_identical(self, tmp_path):
        run("--out", tmp_path / "a", "--quiet", "optimize", "n")
        run("--out", tmp_path / "b", "--quiet", "optimize", "n")
        a = (tmp_path / "a" / "optimize_n.csv").read_text().replace(str(tmp_path / "a"), "X")
        b = (tmp_path / "b" / "optimize_n.csv").read_text().replace(str(tmp_path / "b"), "X")
        assert a == b

    def test_infeasible_exits_two(self, tmp_path):
        cfg = tmp_path / "cfg.toml"
        cfg.write_text("[market]\ndelta = 0.15\n")  # product value below cost
        code = run("--config", cfg, "--out", tmp_path, "--quiet", "optimize", "n")
        assert code == EXIT_INFEASIBLE

    def test_bad_config_exits_one(self, tmp_path):
        cfg = tmp_path / "cfg.toml"
        cfg.write_text("not toml [ at all")
        assert run("--config", cfg, "--quiet", "optimize", "n") == EXIT_CONFIG

    def test_unwritable_output_exits_three(self, tmp_path):
        if os.geteuid() == 0:
            pytest.skip("root ignores directory write bits")
        blocked = tmp_path / "blocked"
        blocked.mkdir()
        blocked.chmod(stat.S_IRUSR | stat.S_IXUSR)
        assert run("--out", blocked / "sub", "--quiet", "optimize", "n") == EXIT_IO


@pytest.fixture(scope="module")
def map_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("map")
    code = main([
        "--out", str(out), "--quiet", "--perception-step", "0.5",
        "--price-step", "0.25", "map",
    ])
    assert code == EXIT_OK
    return out


class TestMapPipeline:

    def test_map_schema(self, map_dir):
        header, rows = read_rows(map_dir / "selection_map.csv")
        assert header == MAP_HEADER
        assert len(rows) == 9  # 3x3 perception grid at step 0.5

    def test_dynamics_from_map_file(self, map_dir, tmp_path):
        code = main([
            "--out", str(tmp_path), "--quiet", "dynamics",
            "--map", str(map_dir / "selection_map.csv"),
        ])
        assert code == EXIT_OK
        header, rows = read_rows(tmp_path / "market_dynamics.csv")
        assert header == ["alpha", "beta_mag", "best_model", "total_q", "q_n",
                          "reman_share", "total_delta", "qn_delta"]
        assert len(rows) == 9
        first = dict(zip(header, rows[0]))
        assert first["best_model"] == "N"
        assert float(first["total_delta"]) == 0.0

    def test_impact_from_map_file(self, map_dir, tmp_path):
        code = main([
            "--out", str(tmp_path), "--quiet", "impact", "production-dominant",
            "--map", str(map_dir / "selection_map.csv"),
        ])
        assert code == EXIT_OK
        header, rows = read_rows(
            tmp_path / "environmental_impact_production_dominant.csv"
        )
        assert len(rows) == 9
        for row in rows:
            rec = dict(zip(header, row))
            assert float(rec["impact"]) >= 0.0

    def test_thresholds_with_numeric_edge(self, map_dir, tmp_path):
        code = main([
            "--out", str(tmp_path), "--quiet", "thresholds",
            "--map", str(map_dir / "selection_map.csv"),
        ])
        assert code == EXIT_OK
        header, rows = read_rows(tmp_path / "thresholds.csv")
        kinds = {row[0] for row in rows}
        assert {"alpha1", "alpha2", "beta1_at_alpha2"} <= kinds
        named = {row[0]: row for row in rows}
        assert float(named["alpha1"][2]) == pytest.approx(0.6)
        assert float(named["alpha2"][2]) == pytest.approx(0.836, abs=0.001)


class TestSchemaStability:
    """Golden column order for every emitted table."""

    def test_optimize_header(self, tmp_path):
        run("--out", tmp_path, "--quiet", "optimize", "n")
        header, _ = read_rows(tmp_path / "optimize_n.csv")
        assert header == [
            "model", "alpha", "beta", "p_n", "q_n", "p_r", "q_r", "region",
            "oem_profit", "oem_expected_profit", "tpr_profit",
            "tpr_expected_profit", "authorization_declined",
        ]

    def test_thresholds_header(self, tmp_path):
        run("--out", tmp_path, "--quiet", "thresholds")
        header, _ = read_rows(tmp_path / "thresholds.csv")
        assert header == ["quantity", "alpha", "value"]

    def test_contract_sweep_header(self, tmp_path):
        run("--out", tmp_path, "--quiet", "--price-step", 0.5,
            "contract-sweep", "--h-points", 2)
        header, _ = read_rows(tmp_path / "contract_sweep.csv")
        assert header == [
            "kind", "H", "h", "declined", "p_n", "q_n", "p_r", "q_r",
            "oem_profit", "tpr_profit", "system_profit", "impact",
        ]

    def test_validation_header(self, tmp_path):
        run("--out", tmp_path, "--quiet", "--replications", 50,
            "--price-step", 0.5, "validate")
        header, _ = read_rows(tmp_path / "validation.csv")
        assert header == [
            "model", "side", "analytic_expected_profit", "simulated_mean",
            "std_error", "k_sigma", "margin_sigmas", "passed",
        ]

    def test_stochastic_compare_header(self, tmp_path):
        code = main([
            "--out", str(tmp_path), "--quiet", "--perception-step", "0.5",
            "--price-step", "0.25", "stochastic-compare",
        ])
        assert code == EXIT_OK
        header, rows = read_rows(tmp_path / "stochastic_compare.csv")
        assert header == [
            "alpha", "beta_mag", "best_model", "profit_stoch", "profit_const",
            "profit_delta", "impact_stoch", "impact_const", "impact_delta",
            "near_boundary",
        ]
        assert len(rows) >= 1


class TestValidateCommand:
    def test_small_run_passes(self, tmp_path):
        code = run(
            "--out", tmp_path, "--quiet", "--replications", 3000,
            "--price-step", 0.25, "validate",
        )
        assert code == EXIT_OK
        header, rows = read_rows(tmp_path / "validation.csv")
        assert all(dict(zip(header, r))["passed"] == "true" for r in rows)


class TestContractSweep:
    def test_small_sweep(self, tmp_path):
        code = run(
            "--out", tmp_path, "--quiet", "--price-step", 0.25,
            "contract-sweep", "--h-points", 4,
        )
        assert code == EXIT_OK
        header, rows = read_rows(tmp_path / "contract_sweep.csv")
        kinds = [row[0] for row in rows]
        assert kinds.count("coordination") == 1
        assert kinds.count("one-part") == 3   # H = 0 rows
        assert kinds.count("two-part") == 6   # H = 10k and 20k rows
