import json
import re

import pytest

from nblearn.cli import EXIT_CHECK_FAILED, EXIT_DEGENERATE, EXIT_IO, EXIT_OK, EXIT_TAIL, EXIT_USAGE, main
from nblearn.scenarios import catalog_entry

GAUSSIAN_PAIR = catalog_entry("gaussian-pair")["config"]


def write_config(tmp_path, obj, name="scenario.json"):
    path = tmp_path / name
    path.write_text(json.dumps(obj))
    return str(path)


@pytest.fixture
def floods(tmp_path):
    return write_config(tmp_path, catalog_entry("poisson-floods")["config"])


class TestSimulate:
    def test_floods_summary(self, floods, tmp_path, capsys):
        out = tmp_path / "out"
        assert main(["simulate", floods, "--out", str(out)]) == EXIT_OK
        summary = capsys.readouterr().out
        assert "rounds=25" in summary
        mass = float(summary.split("min_mass_at_maximizers=")[1].split()[0])
        assert mass >= 0.99
        diag = json.loads((out / "diagnostics.json").read_text())
        assert diag["maximizer_indices"] == [44]

    def test_csv_layout(self, floods, tmp_path):
        out = tmp_path / "out"
        assert main(["simulate", floods, "--rounds", "0", "--out", str(out), "--seed", "7"]) == EXIT_OK
        lines = (out / "trajectory.csv").read_text().splitlines()
        assert lines[0].startswith("# config_sha256=") and lines[0].endswith("seed=7")
        assert lines[1] == "round,agent,state_index,state_value,probability"
        rows = [line.split(",") for line in lines[2:]]
        assert len(rows) == 2 * 2001
        assert {r[0] for r in rows} == {"0"}

    def test_byte_identical_reruns(self, tmp_path):
        cfg = write_config(tmp_path, GAUSSIAN_PAIR)
        outputs = []
        for k in range(2):
            out = tmp_path / f"run{k}"
            assert main(["simulate", cfg, "--rounds", "3", "--out", str(out), "--seed", "5"]) == EXIT_OK
            outputs.append([(out / f).read_bytes() for f in ("trajectory.csv", "diagnostics.json")])
        assert outputs[0] == outputs[1]

    def test_json_format(self, tmp_path):
        cfg = write_config(tmp_path, GAUSSIAN_PAIR)
        out = tmp_path / "out"
        assert main(["simulate", cfg, "--rounds", "2", "--format", "json", "--out", str(out)]) == EXIT_OK
        data = json.loads((out / "trajectory.json").read_text())
        assert data["seed"] == 0 and len(data["probabilities"]) == 3
        assert len(data["config_sha256"]) == 64

    def test_missing_graph(self, tmp_path, capsys):
        cfg = dict(GAUSSIAN_PAIR)
        del cfg["graph"]
        assert main(["simulate", write_config(tmp_path, cfg)]) == EXIT_USAGE
        assert "graph" in capsys.readouterr().err

    def test_bad_belief_names_field(self, tmp_path, capsys):
        cfg = json.loads(json.dumps(GAUSSIAN_PAIR))
        cfg["beliefs"][1]["params"]["tau"] = -1
        assert main(["simulate", write_config(tmp_path, cfg)]) == EXIT_USAGE
        assert "beliefs[1]" in capsys.readouterr().err

    def test_not_json(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{nope")
        assert main(["simulate", str(path)]) == EXIT_USAGE

    def test_missing_file(self, tmp_path):
        assert main(["simulate", str(tmp_path / "absent.json")]) == EXIT_IO

    def test_unwritable_output(self, floods, tmp_path):
        blocker = tmp_path / "file"
        blocker.write_text("")
        assert main(["simulate", floods, "--rounds", "0", "--out", str(blocker / "sub")]) == EXIT_IO

    def test_negative_rounds(self, floods):
        assert main(["simulate", floods, "--rounds", "-1"]) == EXIT_USAGE

    def test_degenerate(self, tmp_path, capsys):
        # g = f / f* reaches 1.5e308 at state 0, so three of them overflow in round 1
        cfg = {
            "space": {"kind": "finite", "labels": [0, 1]},
            "graph": {"family": "complete", "n": 3},
            "prior": {"log_values": [-1.5e308, 0.0], "proper": True},
            "beliefs": [{"log_values": [0, 0]}] * 3,
            "rounds": 3,
        }
        assert main(["simulate", write_config(tmp_path, cfg), "--out", str(tmp_path)]) == EXIT_DEGENERATE
        assert "round 1" in capsys.readouterr().err

    def test_tail_strict(self, tmp_path, capsys):
        # flat beliefs on 0..20 keep a twenty-first of their mass in the edge band
        cfg = {
            "space": {"kind": "integers", "theta_max": 20},
            "graph": {"family": "complete", "n": 2},
            "beliefs": [{"log_values": [0] * 21}] * 2,
            "rounds": 2,
        }
        path = write_config(tmp_path, cfg)
        assert main(["simulate", path, "--out", str(tmp_path)]) == EXIT_OK
        assert "warning" in capsys.readouterr().err
        assert main(["simulate", path, "--out", str(tmp_path), "--strict"]) == EXIT_TAIL
        assert main(["simulate", path, "--out", str(tmp_path), "--strict", "--tol", "0.5"]) == EXIT_OK


class TestPredict:
    def test_gaussian_pair(self, tmp_path, capsys):
        assert main(["predict", write_config(tmp_path, GAUSSIAN_PAIR), "--format", "json"]) == EXIT_OK
        data = json.loads(capsys.readouterr().out)
        assert data["analytic"]["theta_max"] == pytest.approx(0.5)
        assert data["report"]["predicted_point"] == pytest.approx(0.5, abs=0.01)

    def test_counterexample_gap_fails(self, tmp_path, capsys):
        cfg = catalog_entry("counterexample-2")["config"]
        assert main(["predict", write_config(tmp_path, cfg)]) == EXIT_OK
        assert re.search(r"^positive gap:\s+FAIL", capsys.readouterr().out, re.M)

    def test_bernoulli_tie(self, tmp_path, capsys):
        cfg = {"graph": {"n": 2, "edges": [[0, 1], [1, 0]]},
               "beliefs": [{"family": "bernoulli", "params": {"x": 0.5}}] * 2}
        assert main(["predict", write_config(tmp_path, cfg), "--format", "json"]) == EXIT_OK
        assert json.loads(capsys.readouterr().out)["analytic"]["verdict"] == "tie"

    def test_writes_prediction(self, floods, tmp_path):
        out = tmp_path / "pred"
        assert main(["predict", floods, "--out", str(out), "--seed", "3"]) == EXIT_OK
        data = json.loads((out / "prediction.json").read_text())
        assert data["seed"] == 3 and data["analytic"]["point"] == 44


class TestExperiment:
    @pytest.mark.parametrize("name", ["oscillate-12", "clustered-seeding-51", "feasibility-row-1"])
    def test_passes(self, name, capsys):
        assert main(["experiment", name]) == EXIT_OK
        lines = capsys.readouterr().out.splitlines()
        assert lines and all(line.startswith("PASS") for line in lines)

    def test_unknown_name(self):
        assert main(["experiment", "nope"]) == EXIT_USAGE

    def test_needs_name(self):
        assert main(["experiment"]) == EXIT_USAGE

    def test_check_failure_code(self, monkeypatch):
        from nblearn import cli
        from nblearn.experiments import Check, ExperimentResult

        monkeypatch.setattr(cli, "run_experiment", lambda name: ExperimentResult(name, [Check("x", False)]))
        assert main(["experiment", "oscillate-12"]) == EXIT_CHECK_FAILED


class TestCatalogList:
    def test_text(self, capsys):
        assert main(["catalog-list"]) == EXIT_OK
        assert "poisson-floods" in capsys.readouterr().out

    def test_json(self, capsys):
        assert main(["catalog-list", "--format", "json"]) == EXIT_OK
        names = [e["name"] for e in json.loads(capsys.readouterr().out)]
        assert "clustered-seeding-51" in names


def test_unknown_command():
    assert main(["frobnicate"]) == EXIT_USAGE


def test_help():
    assert main(["--help"]) == EXIT_OK
