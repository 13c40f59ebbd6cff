"""CLI contract: exit codes, schema validity, determinism, sweeps."""

import csv
import io
import json
from contextlib import redirect_stdout
from importlib import resources

import jsonschema

from skewflow.cli import main


def run_cli(args, out_path=None):
    buf = io.StringIO()
    with redirect_stdout(buf):
        code = main(args)
    text = buf.getvalue()
    if out_path is not None:
        text = out_path.read_text()
    return code, text


def load_schema():
    with resources.files("skewflow").joinpath("schema/report.schema.json").open() as fh:
        return json.load(fh)


SCHEMA = load_schema()


def validate(doc):
    jsonschema.validate(doc, SCHEMA)


class TestAxioms:
    def test_gallery_system_passes(self, tmp_path):
        out = tmp_path / "r.json"
        code, text = run_cli(["axioms", "--system", "scalar_decay", "--out", str(out)], out)
        doc = json.loads(text)
        validate(doc)
        assert code == 0
        assert doc["laws"]["ok"]

    def test_invalid_params_exit_2(self):
        code, text = run_cli(["axioms", "--system", "scalar_decay", "--param", "mu=0.5"])
        assert code == 2
        assert "InvalidParams" in json.loads(text)["error"]

    def test_time_order_injection_exit_2(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"system": "scalar_decay", "probes": [[1.0, 2.0, 0.0]]}))
        code, text = run_cli(["axioms", "--config", str(cfg)])
        assert code == 2
        assert "TimeOrderViolation" in json.loads(text)["error"]

    def test_broken_custom_system_fails_laws(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({
            "custom_system": {
                "entries": [[{"kind": "linear", "coef": -1.0}]],
                "scales": [1.5],
            }
        }))
        code, text = run_cli(["axioms", "--config", str(cfg)])
        doc = json.loads(text)
        validate(doc)
        assert code == 1
        assert not doc["laws"]["ok"]


class TestClassify:
    def test_bounded_ratio(self, tmp_path):
        out = tmp_path / "r.json"
        code, text = run_cli(["classify", "--system", "bounded_ratio", "--out", str(out)], out)
        doc = json.loads(text)
        validate(doc)
        assert code == 0
        assert doc["verdict"] == "US-not-UES"
        assert doc["contradictions"] == []

    def test_spike(self, tmp_path):
        out = tmp_path / "r.json"
        code, text = run_cli(["classify", "--system", "spike", "--out", str(out)], out)
        doc = json.loads(text)
        validate(doc)
        assert code == 0
        assert doc["verdict"] == "ES-not-UES"

    def test_criteria_subset_with_gauge(self, tmp_path):
        out = tmp_path / "r.json"
        code, text = run_cli(
            ["classify", "--system", "scalar_decay", "--criteria", "datko-v",
             "--gauge", "pow:2", "--out", str(out)],
            out,
        )
        doc = json.loads(text)
        validate(doc)
        assert code == 0
        reports = {r["criterion_id"]: r["verdict"] for r in doc["criteria"]}
        assert reports == {"datko-v": "pass"}

    def test_unknown_system_exit_2(self):
        code, _ = run_cli(["classify", "--system", "nope"])
        assert code == 2

    def test_criterion_ids_match_wire_contract(self, tmp_path):
        from skewflow.reports import NONUNIFORM_CRITERIA, UNIFORM_CRITERIA
        out = tmp_path / "r.json"
        _, text = run_cli(["classify", "--system", "scalar_decay", "--out", str(out)], out)
        doc = json.loads(text)
        ids = [r["criterion_id"] for r in doc["criteria"]]
        assert ids == list(UNIFORM_CRITERIA) + list(NONUNIFORM_CRITERIA)

    def test_determinism_modulo_timestamp(self, tmp_path):
        outs = []
        for i in (1, 2):
            out = tmp_path / f"r{i}.json"
            code, _ = run_cli(
                ["classify", "--system", "bounded_ratio", "--seed", "7", "--out", str(out)], out
            )
            assert code == 0
            lines = out.read_bytes().split(b"\n")
            outs.append(b"\n".join(ln for ln in lines if b'"timestamp"' not in ln))
        assert outs[0] == outs[1]


class TestGrowthAndGallery:
    def test_growth_report(self, tmp_path):
        out = tmp_path / "g.json"
        code, text = run_cli(["growth", "--system", "diag3", "--out", str(out)], out)
        doc = json.loads(text)
        validate(doc)
        assert code == 0
        assert doc["growth"]["uniform_verified"]

    def test_gallery_list(self):
        code, text = run_cli(["gallery", "list"])
        doc = json.loads(text)
        validate(doc)
        assert code == 0
        assert [e["name"] for e in doc["entries"]] == [
            "shift-metric-demo", "diag3", "scalar_decay", "bounded_ratio", "tsint", "spike",
        ]


class TestSweep:
    def test_diag3_sign_sweep(self, tmp_path):
        out = tmp_path / "sweep.csv"
        code, _ = run_cli(
            ["sweep", "--system", "diag3", "--sweep", "alpha1=-1,1",
             "--sweep", "alpha2=-1,1", "--out", str(out)]
        )
        assert code == 0
        rows = list(csv.DictReader(out.read_text().splitlines()))
        cells = {(r["alpha1"], r["alpha2"]): r["verdict"] for r in rows}
        assert cells[("-1.0", "1.0")] == "UES"
        assert cells[("1.0", "1.0")] != "UES"
        assert cells[("1.0", "-1.0")] != "UES"
        assert cells[("-1.0", "-1.0")] != "UES"

    def test_rows_in_lexicographic_param_order(self, tmp_path):
        out = tmp_path / "sweep.csv"
        run_cli(
            ["sweep", "--system", "diag3", "--sweep", "alpha2=1,-1",
             "--sweep", "alpha1=-1,1", "--out", str(out)]
        )
        rows = list(csv.DictReader(out.read_text().splitlines()))
        assert [(r["alpha1"], r["alpha2"]) for r in rows] == [
            ("-1.0", "1.0"), ("-1.0", "-1.0"), ("1.0", "1.0"), ("1.0", "-1.0"),
        ]

    def test_empty_sweep(self, tmp_path):
        out = tmp_path / "sweep.csv"
        code, _ = run_cli(["sweep", "--system", "diag3", "--out", str(out)])
        assert code == 0
        rows = list(csv.DictReader(out.read_text().splitlines()))
        assert rows == []

    def test_scalar_decay_rate_monotone_in_mu(self, tmp_path):
        out = tmp_path / "sweep.csv"
        code, _ = run_cli(
            ["sweep", "--system", "scalar_decay", "--sweep", "mu=1.5,2,3", "--out", str(out)]
        )
        assert code == 0
        rows = list(csv.DictReader(out.read_text().splitlines()))
        nus = [float(r["nu"]) for r in rows]
        assert nus == sorted(nus)

    def test_oversized_sweep_rejected(self):
        code, _ = run_cli(
            ["sweep", "--system", "diag3", "--sweep", "alpha1=" + ",".join(["1"] * 40),
             "--sweep", "alpha2=" + ",".join(["1"] * 40)]
        )
        assert code == 2


class TestConfigFile:
    def test_flags_override_file(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"system": "bounded_ratio", "seed": 3}))
        out = tmp_path / "r.json"
        code, text = run_cli(
            ["classify", "--config", str(cfg), "--system", "scalar_decay", "--out", str(out)], out
        )
        doc = json.loads(text)
        assert doc["system"] == "scalar_decay"
        assert doc["config"]["seed"] == 3

    def test_unknown_keys_rejected(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"sytsem": "spike"}))
        code, _ = run_cli(["classify", "--config", str(cfg)])
        assert code == 2

    def test_custom_system_classification(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({
            "custom_system": {
                "name": "pure-decay",
                "entries": [[{"kind": "linear", "coef": -1.0}]],
            }
        }))
        out = tmp_path / "r.json"
        code, text = run_cli(["classify", "--config", str(cfg), "--out", str(out)], out)
        doc = json.loads(text)
        assert code == 0
        assert doc["verdict"] == "UES"


class TestGroundTruthContradiction:
    def test_mislabeled_custom_system_exits_3(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({
            "custom_system": {
                "name": "mislabeled",
                "entries": [[{"kind": "linear", "coef": -1.0}]],
                "ground_truth": "US-not-UES",
            }
        }))
        out = tmp_path / "r.json"
        code, text = run_cli(["classify", "--config", str(cfg), "--out", str(out)], out)
        doc = json.loads(text)
        validate(doc)
        assert code == 3
        assert doc["contradictions"]
