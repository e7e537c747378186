"""Scenario files, the runner's exit codes, and the command-line front end."""

import json
from pathlib import Path

import pytest

from obsequiv.cli import main
from obsequiv.scenario import Scenario, ScenarioError, run_scenario


def _write(tmp_path, name, doc):
    p = tmp_path / name
    p.write_text(json.dumps(doc, indent=2))
    return p


PASSING = {
    "seed": 1234,
    "processes": {
        "p": {"kind": "markov", "states": ["s1", "s2"], "matrix": [[0.5, 0.5], [0.75, 0.25]]}
    },
    "tasks": [
        {"kind": "simulate", "process": "p", "grid": [0.0, 1.0], "n": 200},
        {
            "kind": "check:observational_equivalence",
            "a": {"process": "p"},
            "b": {"process": "p"},
            "grids": [[0.0, 1.0]],
            "n": 500,
        },
    ],
}


def test_passing_scenario_exit_zero_and_reports(tmp_path):
    scn = _write(tmp_path, "ok.json", PASSING)
    out = tmp_path / "out"
    assert run_scenario(scn, out_dir=out) == 0
    sim = json.loads((out / "ok" / "0-simulate.json").read_text())
    assert sim["kind"] == "simulate"
    chk = json.loads((out / "ok" / "1-check_observational_equivalence.json").read_text())
    assert chk["schema"] == 1
    assert chk["verdict"] == "pass"


def test_failing_check_exit_one(tmp_path):
    doc = {
        "seed": 9,
        "processes": {
            "p": {"kind": "markov", "states": ["s1", "s2"], "matrix": [[0.5, 0.5], [0.5, 0.5]]},
            "q": {"kind": "markov", "states": ["a", "b"], "matrix": [[0.5, 0.5], [0.5, 0.5]]},
        },
        "tasks": [
            {
                "kind": "check:observational_equivalence",
                "a": {"process": "p"},
                "b": {"process": "q"},
                "grids": [[0.0]],
                "n": 100,
            }
        ],
    }
    scn = _write(tmp_path, "bad.json", doc)
    assert run_scenario(scn, out_dir=tmp_path / "out") == 1
    report = json.loads((tmp_path / "out" / "bad" / "0-check_observational_equivalence.json").read_text())
    assert report["verdict"] == "fail"


def test_unknown_system_kind_exit_two(tmp_path):
    doc = {"seed": 1, "systems": {"s": {"kind": "lorenz", "sigma": 10}}, "tasks": []}
    assert run_scenario(_write(tmp_path, "lorenz.json", doc), out_dir=tmp_path / "o") == 2


def test_missing_seed_exit_two(tmp_path):
    assert run_scenario(_write(tmp_path, "noseed.json", {"tasks": []}), out_dir=tmp_path / "o") == 2


def test_malformed_json_exit_two(tmp_path):
    p = tmp_path / "broken.json"
    p.write_text("{not json")
    assert run_scenario(p, out_dir=tmp_path / "o") == 2


def test_undefined_reference_exit_two(tmp_path):
    doc = {
        "seed": 1,
        "tasks": [
            {
                "kind": "check:observational_equivalence",
                "a": {"process": "ghost"},
                "b": {"process": "ghost"},
                "grids": [[0.0]],
            }
        ],
    }
    assert run_scenario(_write(tmp_path, "ref.json", doc), out_dir=tmp_path / "o") == 2


def test_determinism_byte_identical_json(tmp_path):
    scn = _write(tmp_path, "det.json", PASSING)
    run_scenario(scn, out_dir=tmp_path / "a")
    run_scenario(scn, out_dir=tmp_path / "b")
    for name in ("0-simulate.json", "1-check_observational_equivalence.json"):
        assert (tmp_path / "a" / "det" / name).read_bytes() == (
            tmp_path / "b" / "det" / name
        ).read_bytes()


def test_seed_override_changes_reports(tmp_path):
    scn = _write(tmp_path, "seeded.json", PASSING)
    run_scenario(scn, out_dir=tmp_path / "a")
    run_scenario(scn, out_dir=tmp_path / "b", seed=777)
    a = (tmp_path / "a" / "seeded" / "0-simulate.json").read_text()
    b = (tmp_path / "b" / "seeded" / "0-simulate.json").read_text()
    assert a != b


def test_csv_format_written_for_simulate(tmp_path):
    scn = _write(tmp_path, "csv.json", PASSING)
    run_scenario(scn, out_dir=tmp_path / "out", fmt="both")
    csv_path = tmp_path / "out" / "csv" / "0-simulate.csv"
    assert csv_path.exists()
    assert csv_path.read_text().startswith("times,symbols,count,estimate,stderr")


def test_scenario_with_system_and_observation(tmp_path):
    doc = {
        "seed": 5,
        "systems": {"rot": {"kind": "rotation", "alpha": 0.41421356237}},
        "observations": {
            "halves": {
                "kind": "intervals",
                "system": "rot",
                "breaks": [0.0, 0.5, 1.0],
                "labels": ["a", "b"],
            }
        },
        "tasks": [
            {
                "kind": "check:nontriviality",
                "system": "rot",
                "observation": "halves",
                "lags": [1.0],
                "n": 2000,
            }
        ],
    }
    assert run_scenario(_write(tmp_path, "rot.json", doc), out_dir=tmp_path / "o") == 0


def test_entropy_task_serializes(tmp_path):
    doc = {
        "seed": 3,
        "processes": {
            "p": {"kind": "markov", "states": ["s1", "s2"], "matrix": [[0.5, 0.5], [0.5, 0.5]]}
        },
        "tasks": [
            {"kind": "entropy", "source": {"process": "p"}, "length": 5000, "L_max": 3}
        ],
    }
    scn = _write(tmp_path, "ent.json", doc)
    assert run_scenario(scn, out_dir=tmp_path / "o", fmt="both") == 0
    obj = json.loads((tmp_path / "o" / "ent" / "0-entropy.json").read_text())
    assert obj["positive_rate"] is True
    assert len(obj["block_entropies"]) == 3
    assert (tmp_path / "o" / "ent" / "0-entropy.csv").read_text().startswith("L,H_L")


def test_scenario_object_validates_structure():
    with pytest.raises(ScenarioError):
        Scenario(["not", "a", "dict"])
    with pytest.raises(ScenarioError):
        Scenario({"seed": 1, "tasks": "nope"})


def test_cli_main_runs_and_maps_exit_codes(tmp_path, monkeypatch):
    scn = _write(tmp_path, "cli.json", PASSING)
    out = tmp_path / "cliout"
    assert main([str(scn), "--out", str(out), "--format", "both"]) == 0
    assert (out / "cli" / "0-simulate.csv").exists()
    assert main([str(tmp_path / "missing.json")]) == 2


def test_cli_jobs_env_fallback(tmp_path, monkeypatch):
    monkeypatch.setenv("OBSEQUIV_JOBS", "4")
    scn = _write(tmp_path, "env.json", PASSING)
    # env-provided parallelism must parse without affecting the verdict
    assert main([str(scn), "--out", str(tmp_path / "o")]) == 0


def test_cli_seed_override(tmp_path):
    scn = _write(tmp_path, "ovr.json", PASSING)
    assert main([str(scn), "--out", str(tmp_path / "a"), "--seed", "42"]) == 0
    assert main([str(scn), "--out", str(tmp_path / "b"), "--seed", "42"]) == 0
    assert (tmp_path / "a" / "ovr" / "0-simulate.json").read_bytes() == (
        tmp_path / "b" / "ovr" / "0-simulate.json"
    ).read_bytes()
