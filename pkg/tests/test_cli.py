import json
import os

import pytest

from sheetlab import cli


def base_config(**experiment):
    return {
        "model": {"family": "brownian_sheet",
                  "domain": [[1.0, 2.0], [1.0, 2.0]]},
        "grid": {"counts": [9, 9]},
        "rng": {"master_seed": 7},
        "experiment": experiment,
    }


def write_config(tmp_path, config, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(config))
    return str(p)


def read_outputs(outdir):
    out = {}
    for name in os.listdir(outdir):
        with open(os.path.join(outdir, name), "rb") as f:
            out[name] = f.read()
    return out


class TestValidation:
    def test_unknown_top_level_key(self):
        cfg = base_config()
        cfg["grd"] = {}
        with pytest.raises(cli.ConfigError, match="config.grd"):
            cli.validate_config(cfg, "simulate")

    def test_unknown_nested_key_has_path(self):
        cfg = base_config()
        cfg["grid"]["spacinng"] = 0.1
        with pytest.raises(cli.ConfigError, match="grid.spacinng"):
            cli.validate_config(cfg, "simulate")

    def test_experiment_keys_per_subcommand(self):
        cfg = base_config(pairs=3)
        cli.validate_config(cfg, "verify-cov")
        with pytest.raises(cli.ConfigError, match="experiment.pairs"):
            cli.validate_config(cfg, "chung")

    def test_missing_seed(self):
        cfg = base_config()
        del cfg["rng"]["master_seed"]
        with pytest.raises(cli.ConfigError, match="rng.master_seed"):
            cli.validate_config(cfg, "simulate")

    def test_bad_alpha_cited(self):
        cfg = base_config()
        cfg["model"]["alpha"] = 1.5
        with pytest.raises(cli.ConfigError, match=r"\(0, 1\)"):
            cli.build_model(cfg["model"])

    def test_budget_message_has_remediation(self):
        cfg = base_config()
        cfg["grid"]["counts"] = [500, 500]
        model = cli.build_model(cfg["model"])
        with pytest.raises(cli.ConfigError, match="budget"):
            cli.build_grid(model, cfg["grid"])


class TestExitCodes:
    def test_malformed_json(self, tmp_path, capsys):
        p = tmp_path / "bad.json"
        p.write_text("{not json")
        assert cli.main(["simulate", "--config", str(p)]) == 2
        assert "config error" in capsys.readouterr().err

    def test_config_error_is_2(self, tmp_path, capsys):
        cfg = base_config()
        cfg["model"]["alpha"] = 2.0
        path = write_config(tmp_path, cfg)
        assert cli.main(["simulate", "--config", path,
                         "--out", str(tmp_path / "out")]) == 2
        assert "config error" in capsys.readouterr().err

    def test_successful_run_is_0(self, tmp_path):
        cfg = base_config(count=2)
        path = write_config(tmp_path, cfg)
        out = str(tmp_path / "out")
        assert cli.main(["simulate", "--config", path, "--out", out]) == 0
        names = set(os.listdir(out))
        assert "manifest.json" in names

    def test_failed_assertion_is_1(self, tmp_path, capsys):
        # impossible dimension target makes the built-in check fail
        cfg = base_config(target="range", scales=[0.02, 0.05, 0.1, 0.3, 0.7],
                          reps=3, expected=9.9, tol=0.01)
        cfg["grid"]["counts"] = [33, 33]
        path = write_config(tmp_path, cfg)
        out = str(tmp_path / "out")
        assert cli.main(["dimension", "--config", path, "--out", out]) == 1
        assert "ASSERTION FAILED" in capsys.readouterr().err
        manifest = json.loads(
            (tmp_path / "out" / "manifest.json").read_text())
        assert manifest["assertion_failures"]


class TestDeterminism:
    def test_byte_identical_reruns(self, tmp_path):
        cfg = base_config(pairs=4)
        path = write_config(tmp_path, cfg)
        outs = []
        for run_dir in ("a", "b"):
            out = str(tmp_path / run_dir)
            assert cli.main(["verify-cov", "--config", path,
                             "--out", out]) == 0
            files = read_outputs(out)
            files.pop("manifest.json")  # carries wall time by design
            outs.append(files)
        assert outs[0] == outs[1]

    def test_seed_override_changes_output(self, tmp_path):
        cfg = base_config(count=1)
        path = write_config(tmp_path, cfg)
        out_a, out_b = str(tmp_path / "a"), str(tmp_path / "b")
        assert cli.main(["simulate", "--config", path, "--out", out_a]) == 0
        assert cli.main(["simulate", "--config", path, "--out", out_b,
                         "--seed", "8"]) == 0
        a = read_outputs(out_a)
        b = read_outputs(out_b)
        csvs = [n for n in a if n.endswith(".csv")]
        assert any(a[n] != b[n] for n in csvs)

    def test_config_hash_ignores_key_order(self):
        cfg = base_config(count=1)
        reordered = json.loads(json.dumps(cfg))
        reordered["model"] = dict(reversed(list(cfg["model"].items())))
        assert cli.config_hash(cfg) == cli.config_hash(reordered)

    def test_fmt_round_trips(self):
        for x in (0.1, 1.0 / 3.0, 2.0 ** -52, 123456.789):
            assert float(cli.fmt(x)) == x
