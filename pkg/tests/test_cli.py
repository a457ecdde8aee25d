import json
import pathlib

import pytest

from apmopt.cli import main
from apmopt.config import ConfigError, parse_config

CONFIGS = pathlib.Path(__file__).resolve().parent.parent / "configs"


def run(command, config, tmp_path, *extra):
    out = tmp_path / "out"
    code = main([command, "--config", str(config), "--out", str(out), *extra])
    return code, out


class TestParseConfig:
    def test_demo_parses(self):
        cfg = parse_config(str(CONFIGS / "demo.json"))
        assert cfg.model.K == 4
        assert cfg.utility.kind == "appendix_power"
        assert cfg.solver.ladder == (1, 2, 4)

    def test_missing_key_named(self, tmp_path):
        bad = {"model": {"m": 1, "K": 1, "mu": [0.0],
                         "noise": {"family": "rademacher"}}}
        p = tmp_path / "bad.json"
        p.write_text(json.dumps(bad))
        with pytest.raises(ConfigError) as exc:
            parse_config(str(p))
        assert "beta_bar" in str(exc.value)

    def test_monte_carlo_without_seed_listed(self, tmp_path):
        bad = {
            "model": {"m": 1, "K": 1, "mu": [0.0], "beta": [],
                      "beta_bar": [1.0], "noise": {"family": "rademacher"}},
            "scenario": {"mode": "monte_carlo", "n": 100},
        }
        p = tmp_path / "bad.json"
        p.write_text(json.dumps(bad))
        with pytest.raises(ConfigError) as exc:
            parse_config(str(p))
        assert "seed" in str(exc.value)

    def test_all_violations_collected(self, tmp_path):
        bad = {
            "model": {"m": 1, "K": 1, "mu": [0.0], "beta": [],
                      "beta_bar": [1.0], "noise": {"family": "nope"}},
            "scenario": {"mode": "monte_carlo"},
        }
        p = tmp_path / "bad.json"
        p.write_text(json.dumps(bad))
        with pytest.raises(ConfigError) as exc:
            parse_config(str(p))
        assert len(exc.value.violations) >= 3

    def test_malformed_json(self, tmp_path):
        p = tmp_path / "bad.json"
        p.write_text("{not json")
        with pytest.raises(ConfigError, match="malformed"):
            parse_config(str(p))

    def test_model_in_separate_file(self, tmp_path):
        model = {"m": 1, "K": 1, "mu": [0.0], "beta": [], "beta_bar": [1.0],
                 "noise": {"family": "rademacher"}}
        (tmp_path / "model.json").write_text(json.dumps(model))
        (tmp_path / "cfg.json").write_text(json.dumps({"model": "model.json"}))
        cfg = parse_config(str(tmp_path / "cfg.json"))
        assert cfg.model.K == 1


class TestExitCodes:
    def test_check_demo_ok(self, tmp_path):
        code, out = run("check", CONFIGS / "demo.json", tmp_path)
        assert code == 0
        report = json.load(open(out / "report.json"))
        assert report["verdicts"]["assumption_b"] == "holds"
        assert report["verdicts"]["novum_na"] == "holds"

    def test_optimize_arbitrage_fixture_exits_2(self, tmp_path, capsys):
        code, out = run("optimize", CONFIGS / "arbitrage.json", tmp_path)
        assert code == 2
        report = json.load(open(out / "report.json"))
        assert report["na_flagged_coordinates"] == [1]
        assert "arbitrage_witness" in report

    def test_check_divergent_b_exits_2(self, tmp_path):
        code, out = run("check", CONFIGS / "divergent_b.json", tmp_path)
        assert code == 2
        report = json.load(open(out / "report.json"))
        assert report["verdicts"]["assumption_b"] == "fails"

    def test_bad_config_exits_1(self, tmp_path):
        p = tmp_path / "bad.json"
        p.write_text("{}")
        assert main(["check", "--config", str(p)]) == 1

    def test_measure_demo(self, tmp_path):
        code, out = run("measure", CONFIGS / "demo.json", tmp_path)
        assert code == 0
        report = json.load(open(out / "report.json"))
        assert report["measure"]["max_pricing_residual"] <= 1e-10
        assert (out / "tables" / "tilt_coordinates.csv").exists()

    def test_optimize_demo_artifacts(self, tmp_path):
        code, out = run("optimize", CONFIGS / "demo.json", tmp_path)
        assert code == 0
        report = json.load(open(out / "report.json"))
        values = [lv["value"] for lv in report["optimizer"]["levels"]]
        assert values == sorted(values)
        assert (out / "tables" / "ladder.csv").exists()


class TestDeterminism:
    def test_report_bytes_identical_across_worker_counts(self, tmp_path):
        code1, out1 = run("report", CONFIGS / "demo.json", tmp_path / "w1",
                          "--workers", "1")
        code2, out2 = run("report", CONFIGS / "demo.json", tmp_path / "w8",
                          "--workers", "8")
        assert code1 == code2 == 0
        for rel in ["report.json", "tables/assumption_b.csv",
                    "tables/ladder.csv", "tables/tilt_coordinates.csv",
                    "tables/exp_moment.csv", "tables/holder_margins.csv"]:
            b1 = (out1 / "out" / rel).read_bytes() if (out1 / "out" / rel).exists() \
                else (out1 / rel).read_bytes()
            b2 = (out2 / "out" / rel).read_bytes() if (out2 / "out" / rel).exists() \
                else (out2 / rel).read_bytes()
            assert b1 == b2, rel

    def test_seed_env_overrides_flag(self, tmp_path, monkeypatch):
        monkeypatch.setenv("SEED", "99")
        code, out = run("check", CONFIGS / "demo.json", tmp_path, "--seed", "3")
        assert code == 0
        report = json.load(open(out / "report.json"))
        assert report["seed"] == 99

    def test_seed_flag_overrides_config(self, tmp_path, monkeypatch):
        monkeypatch.delenv("SEED", raising=False)
        code, out = run("check", CONFIGS / "demo.json", tmp_path, "--seed", "3")
        assert code == 0
        report = json.load(open(out / "report.json"))
        assert report["seed"] == 3
