import json

import numpy as np
import pytest

from audit_lab.cli import main
from audit_lab.instances import MixtureConfig, generate_separated_mixture, make_lower_bound_pair
from audit_lab.rng import RngStream

ADULT = "data/adult_fixture.csv"


def _write(path, doc):
    path.write_text(json.dumps(doc))
    return str(path)


class TestExitCodes:
    def test_missing_config_is_config_error(self, tmp_path):
        assert main(["blackbox", "--config", str(tmp_path / "missing.json")]) == 2

    def test_malformed_json_is_config_error(self, tmp_path):
        p = tmp_path / "bad.json"
        p.write_text("{not json")
        assert main(["blackbox", "--config", str(p)]) == 2

    def test_bad_mode_rejected(self, tmp_path):
        cfg = _write(tmp_path / "c.json", {"mode": "mixture"})
        # blackbox subcommand with a mixture-mode config fails validation
        assert main(["blackbox", "--config", cfg]) == 2

    def test_schema_error_on_wrong_dataset(self, tmp_path):
        cfg = _write(
            tmp_path / "c.json",
            {
                "mode": "blackbox",
                "instance": {"dataset": "adult", "path": "data/law_fixture.csv"},
                "tau_sweep": [5],
                "seeds": [1],
                "cost_pairs": [[0.0, 1.0]],
            },
        )
        assert main(["blackbox", "--config", cfg]) == 2


class TestBlackboxCommand:
    def test_runs_and_writes_csv(self, tmp_path):
        out = tmp_path / "rows.csv"
        cfg = _write(
            tmp_path / "c.json",
            {
                "mode": "blackbox",
                "instance": {"dataset": "adult", "path": ADULT},
                "classifier": {"kind": "all_LR", "train_size": 80},
                "tau_sweep": [5, 10],
                "seeds": [1, 2],
                "cost_pairs": [[0.0, 1.0]],
                "past_db_size": 20000,
            },
        )
        assert main(["blackbox", "--config", cfg, "--out", str(out)]) == 0
        lines = out.read_text().strip().split("\n")
        assert len(lines) == 5  # header + 2 algs x 2 taus
        assert lines[0].startswith("algorithm,")

    def test_seed_offset_changes_output(self, tmp_path):
        doc = {
            "mode": "blackbox",
            "instance": {"dataset": "adult", "path": ADULT},
            "classifier": {"kind": "all_LR", "train_size": 80},
            "tau_sweep": [5],
            "seeds": [1],
            "cost_pairs": [[0.0, 1.0]],
            "past_db_size": 10000,
        }
        cfg = _write(tmp_path / "c.json", doc)
        out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
        assert main(["blackbox", "--config", cfg, "--out", str(out1)]) == 0
        assert main(["blackbox", "--config", cfg, "--out", str(out2), "--seed-offset", "7"]) == 0
        assert out1.read_text() != out2.read_text()


class TestIngestCommand:
    def test_ingest_adult(self, tmp_path):
        out = tmp_path / "parsed.json"
        assert main(["ingest", "--dataset", "adult", "--path", ADULT, "--out", str(out)]) == 0
        doc = json.loads(out.read_text())
        assert doc["n"] == 200
        assert len(doc["a"]) == 200

    def test_ingest_schema_error(self, tmp_path):
        out = tmp_path / "parsed.json"
        code = main(["ingest", "--dataset", "law", "--path", ADULT, "--out", str(out)])
        assert code == 2


class TestSummarizeCommand:
    def test_lower_bound_instance(self, tmp_path, capsys):
        _, unfair = make_lower_bound_pair(0.1, 0.3, 0.3)
        inst_path = tmp_path / "inst.json"
        inst_path.write_text(unfair.to_json())
        assert main(["summarize", "--instance", str(inst_path)]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["eod"] == pytest.approx(1.0 / 7.0)

    def test_mixture_instance_with_classifier(self, tmp_path, capsys):
        inst = generate_separated_mixture(MixtureConfig(eps=0.2, sep_scale=0.3), RngStream(1))
        inst_path = tmp_path / "inst.json"
        inst_path.write_text(inst.to_json())
        clf_path = tmp_path / "clf.json"
        clf_path.write_text(json.dumps({"kind": "sense_attr"}))
        assert main([
            "summarize", "--instance", str(inst_path), "--classifier", str(clf_path),
            "--mc-n", "20000",
        ]) == 0
        doc = json.loads(capsys.readouterr().out)
        # f = A makes the disparity exactly 1 in the population; MC is close
        assert doc["eod"] == pytest.approx(1.0, abs=0.02)


class TestLowerBoundCommand:
    def test_report_written(self, tmp_path):
        out = tmp_path / "report.json"
        cfg = _write(
            tmp_path / "c.json",
            {
                "mode": "lower_bound_check",
                "lower_bound": {
                    "triples": [[0.1, 0.3, 0.3]],
                    "slope_eps": [0.2, 0.1],
                    "slope_seeds": 1,
                    "delta": 0.2,
                },
            },
        )
        assert main(["lower-bound", "--config", cfg, "--out", str(out)]) == 0
        doc = json.loads(out.read_text())
        assert doc["exact_checks"][0]["ok"]


class TestMixtureCommand:
    def test_runs_small_sweep(self, tmp_path):
        out = tmp_path / "rows.csv"
        cfg = _write(
            tmp_path / "c.json",
            {
                "mode": "mixture",
                "eps_sweep": [0.5],
                "seeds": [42],
                "cost_pairs": [[0.5, 1.0]],
                "past_db_size": 60000,
                "mixture": {"n_train": 2000},
            },
        )
        assert main(["mixture", "--config", cfg, "--out", str(out)]) == 0
        lines = out.read_text().strip().split("\n")
        assert len(lines) == 3  # header + rs + exp
