import csv
import json
import math

import numpy as np
import pytest

from audit_lab.errors import ConfigError, DomainError, RowError, SchemaError
from audit_lab.harness import (
    DEFAULT_COST_PAIRS,
    DEFAULT_EPS_SWEEP,
    DEFAULT_SEEDS,
    DEFAULT_TAU_SWEEP,
    ExperimentConfig,
    ResultRow,
    _mean_std,
    emit_results,
    ingest_adult,
    ingest_law,
    parse_results_csv,
    run_blackbox_sweep,
    run_lower_bound_check,
    run_mixture_sweep,
)

ADULT = "data/adult_fixture.csv"
LAW = "data/law_fixture.csv"


class TestIngestion:
    def test_adult_fixture(self):
        ds = ingest_adult(ADULT)
        assert ds.n == 200
        assert set(ds.feature_cols) == {
            "age", "fnlwgt", "educational-num", "capital-gain", "capital-loss",
            "hours-per-week", "workclass", "education", "marital-status",
            "occupation", "relationship", "race", "native-country",
        }
        assert set(np.unique(ds.a)) == {0, 1}
        assert set(np.unique(ds.y)) == {0, 1}

    def test_income_mapping(self, tmp_path):
        ds = ingest_adult(ADULT)
        with open(ADULT) as fh:
            rows = list(csv.DictReader(fh))
        for i in (0, 1, 2, 3):
            assert ds.y[i] == (1 if rows[i]["income"] == ">50K" else 0)

    def test_missing_column_schema_error(self, tmp_path):
        with open(ADULT) as fh:
            rows = list(csv.DictReader(fh))
        path = tmp_path / "broken.csv"
        cols = [c for c in rows[0] if c != "gender"]
        with open(path, "w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=cols)
            w.writeheader()
            for r in rows[:5]:
                w.writerow({c: r[c] for c in cols})
        with pytest.raises(SchemaError, match="gender"):
            ingest_adult(path)

    def test_law_fixture(self):
        ds = ingest_law(LAW)
        assert ds.n == 200
        assert "lsat" in ds.feature_cols and "fam inc" in ds.feature_cols

    def test_law_lsat_range(self, tmp_path):
        with open(LAW) as fh:
            rows = list(csv.DictReader(fh))
        rows[3]["lsat"] = "60.0"
        path = tmp_path / "bad.csv"
        with open(path, "w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=list(rows[0].keys()))
            w.writeheader()
            w.writerows(rows)
        with pytest.raises(RowError, match="line 5"):
            ingest_law(path)

    def test_unparsable_numeric(self, tmp_path):
        with open(ADULT) as fh:
            rows = list(csv.DictReader(fh))
        rows[0]["age"] = "abc"
        path = tmp_path / "bad.csv"
        with open(path, "w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=list(rows[0].keys()))
            w.writeheader()
            w.writerows(rows)
        with pytest.raises(RowError, match="line 2"):
            ingest_adult(path)


class TestConfig:
    def test_defaults_match_protocol(self):
        cfg = ExperimentConfig(mode="mixture")
        assert cfg.tau_sweep == DEFAULT_TAU_SWEEP == (5, 10, 50, 100, 200, 500, 1000)
        assert cfg.eps_sweep == DEFAULT_EPS_SWEEP
        assert cfg.seeds == DEFAULT_SEEDS == (1092, 42, 13, 729, 333)
        assert (0.5, 3.0) in cfg.cost_pairs and (0.0, 1.0) in cfg.cost_pairs
        assert cfg.caps.tau_cap == 1000 and cfg.caps.r_cap == 20000

    def test_empty_seeds_rejected(self):
        with pytest.raises(ConfigError):
            ExperimentConfig(mode="mixture", seeds=())

    def test_duplicate_seeds_rejected(self):
        with pytest.raises(ConfigError):
            ExperimentConfig(mode="mixture", seeds=(1, 1))

    def test_unknown_field_rejected(self):
        with pytest.raises(ConfigError):
            ExperimentConfig.from_dict({"mode": "mixture", "bogus": 1})

    def test_unknown_mode_rejected(self):
        with pytest.raises(ConfigError):
            ExperimentConfig.from_dict({"mode": "nope"})

    def test_json_file_roundtrip(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps({
            "mode": "blackbox",
            "instance": {"dataset": "adult", "path": ADULT},
            "tau_sweep": [5, 10],
            "seeds": [1, 2],
            "cost_pairs": [[0.0, 1.0]],
            "caps": {"tau_cap": 100},
        }))
        cfg = ExperimentConfig.from_json_file(path)
        assert cfg.tau_sweep == (5, 10)
        assert cfg.caps.tau_cap == 100
        assert cfg.mixture["d"] == 5  # defaults merged


class TestAggregationAndEmission:
    def test_mean_std_hand_computed(self):
        m, s = _mean_std([1.0, 2.0, 4.0])
        assert m == pytest.approx(7.0 / 3.0)
        # population variance: ((1-7/3)^2 + (2-7/3)^2 + (4-7/3)^2)/3
        assert s == pytest.approx(math.sqrt(14.0 / 9.0))

    def _row(self):
        return ResultRow(
            algorithm="rs_audit", sweep_value=100.0, cost_pair="0.5:1",
            mean_cost=0.123456789, std_cost=0.0, mean_labels=10.0, std_labels=1.0,
            mean_samples=50.0, mean_delta_hat=0.25, std_delta_hat=0.01,
            true_eod=0.2, correctness_fraction=None, n_seeds=5, capped=False,
        )

    def test_single_row_csv(self, tmp_path):
        path = tmp_path / "r.csv"
        emit_results([self._row()], path, "csv")
        lines = path.read_text().strip().split("\n")
        assert len(lines) == 2
        assert lines[0].startswith("algorithm,sweep_value,cost_pair,mean_cost")
        assert "0.123457" in lines[1]  # 6 significant digits
        assert ",false" in lines[1]

    def test_roundtrip(self, tmp_path):
        path = tmp_path / "r.csv"
        emit_results([self._row()], path, "csv")
        back = parse_results_csv(path)
        assert len(back) == 1
        assert back[0].algorithm == "rs_audit"
        assert back[0].correctness_fraction is None
        assert back[0].mean_cost == pytest.approx(0.123457)

    def test_json_format(self, tmp_path):
        path = tmp_path / "r.json"
        emit_results([self._row()], path, "json")
        data = json.loads(path.read_text())
        assert data[0]["algorithm"] == "rs_audit"
        assert data[0]["capped"] is False

    def test_empty_rows_rejected(self, tmp_path):
        with pytest.raises(DomainError):
            emit_results([], tmp_path / "r.csv", "csv")

    def test_bit_stable(self, tmp_path):
        p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
        emit_results([self._row()], p1, "csv")
        emit_results([self._row()], p2, "csv")
        assert p1.read_bytes() == p2.read_bytes()


def _tiny_blackbox_config(**over):
    base = dict(
        mode="blackbox",
        instance={"dataset": "adult", "path": ADULT},
        classifier={"kind": "all_LR", "train_size": 100},
        tau_sweep=(5, 10),
        cost_pairs=((0.0, 1.0),),
        seeds=(1, 2),
        past_db_size=20_000,
    )
    base.update(over)
    return ExperimentConfig(**base)


class TestSweeps:
    def test_blackbox_sweep_shape_and_determinism(self, tmp_path):
        cfg = _tiny_blackbox_config()
        rows = run_blackbox_sweep(cfg)
        assert len(rows) == 4  # 2 algorithms x 2 taus x 1 pair
        assert {r.algorithm for r in rows} == {"baseline", "rs_audit"}
        assert all(r.n_seeds == 2 for r in rows)
        assert all(r.correctness_fraction is None for r in rows)
        # identical config => byte-identical emitted CSV
        p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
        emit_results(rows, p1, "csv")
        emit_results(run_blackbox_sweep(_tiny_blackbox_config()), p2, "csv")
        assert p1.read_bytes() == p2.read_bytes()

    def test_blackbox_wrong_mode(self):
        with pytest.raises(ConfigError):
            run_blackbox_sweep(ExperimentConfig(mode="mixture"))

    def test_mixture_sweep_smoke(self):
        cfg = ExperimentConfig(
            mode="mixture",
            eps_sweep=(0.5,),
            cost_pairs=((0.5, 1.0),),
            seeds=(42,),
            past_db_size=60_000,
        )
        rows = run_mixture_sweep(cfg)
        assert len(rows) == 2
        by_alg = {r.algorithm: r for r in rows}
        assert set(by_alg) == {"rs_audit", "exp_audit"}
        for r in rows:
            assert r.capped  # tau/R caps bind at eps = 0.5 defaults
            assert 0.0 <= r.mean_delta_hat <= 1.0

    def test_lower_bound_check(self):
        cfg = ExperimentConfig(
            mode="lower_bound_check",
            lower_bound={
                "triples": [[0.1, 0.3, 0.3], [0.05, 0.2, 0.4]],
                "slope_eps": [0.2, 0.1],
                "slope_seeds": 1,
                "delta": 0.2,
            },
        )
        report = run_lower_bound_check(cfg)
        assert all(c["ok"] for c in report["exact_checks"])
        assert 0.7 <= report["slope"] <= 1.3
