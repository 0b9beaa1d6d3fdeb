import json

import pytest

from mpdptw.cli import main
from mpdptw.instance import serialize_instance

from .conftest import FIXTURE

ROW1 = "0 8 2 0 | 0 7 3 10 6 9 5 1 4 0"


@pytest.fixture
def small_file(tmp_path, two_pairs):
    path = tmp_path / "two_pairs.json"
    path.write_text(serialize_instance(two_pairs))
    return path


@pytest.fixture
def pair_file(tmp_path, one_pair):
    path = tmp_path / "one_pair.json"
    path.write_text(serialize_instance(one_pair))
    return path


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_solve_table(capsys):
    code, out, _ = run(capsys, "solve", FIXTURE, "--seed", 7, "--generations", 20, "--pop-size", 20)
    assert code == 0
    header = out.splitlines()[1].split()
    assert header == ["f1", "f2", "f3", "Tour", "by", "vehicle"]
    assert " | 0 " in out


def test_solve_missing_file(capsys):
    code, _, err = run(capsys, "solve", "missing.json")
    assert code == 1
    assert "no such file" in err


def test_solve_invalid_instance(tmp_path, capsys):
    doc = json.loads(FIXTURE.read_text())
    doc["nodes"][8]["succ"] = 0
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(doc))
    code, _, err = run(capsys, "solve", bad)
    assert code == 1
    assert "pairing not mutual" in err


def test_solve_bad_rates(capsys):
    code, _, err = run(capsys, "solve", FIXTURE, "--crossover-rate", 0.9, "--mutation-rate", 0.5)
    assert code == 1
    assert "invalid GA configuration" in err


def test_solve_csv_is_deterministic_and_stable(capsys):
    argv = ("solve", FIXTURE, "--seed", 7, "--generations", 15, "--pop-size", 16, "--format", "csv")
    _, first, _ = run(capsys, *argv)
    _, second, _ = run(capsys, *argv)
    assert first == second
    assert first.splitlines()[0] == "f1,f2,f3,routes"


def test_seed_env_fallback(capsys, monkeypatch):
    argv = ("solve", FIXTURE, "--generations", 5, "--pop-size", 8, "--format", "json")
    monkeypatch.setenv("PDPTW_SEED", "13")
    _, out, _ = run(capsys, *argv)
    assert json.loads(out)["config"]["rng_seed"] == 13
    _, out, _ = run(capsys, *argv, "--seed", 2)
    assert json.loads(out)["config"]["rng_seed"] == 2


def test_fleet_flags(capsys):
    _, out, _ = run(capsys, "solve", FIXTURE, "--generations", 3, "--pop-size", 8, "--format", "json",
                    "--capacity", 60, "--cost-per-distance", 2, "--speed", 1.5)
    fleet = json.loads(out)["fleet"]
    assert (fleet["capacity"], fleet["cost_per_distance"], fleet["speed"]) == (60, 2, 1.5)


def test_output_and_replay(tmp_path, capsys):
    out_csv = tmp_path / "front.csv"
    code, _, _ = run(capsys, "solve", FIXTURE, "--seed", 5, "--generations", 10, "--pop-size", 12,
                     "--pairing-sample", 3, "--capacity", 45, "--output", out_csv)
    assert code == 0
    meta = json.loads((tmp_path / "front.meta.json").read_text())
    assert meta["config"]["rng_seed"] == 5 and meta["config"]["pairing_sample"] == 3
    assert meta["fleet"]["capacity"] == 45
    assert meta["front_csv"] == "front.csv"
    code, replay, _ = run(capsys, "solve", FIXTURE, "--config", tmp_path / "front.meta.json", "--format", "csv")
    assert code == 0
    assert replay == out_csv.read_text()


def test_config_file(tmp_path, capsys):
    cfg = tmp_path / "ga.json"
    cfg.write_text(json.dumps({"population_size": 6, "generations": 2, "rng_seed": 11}))
    _, out, _ = run(capsys, "solve", FIXTURE, "--config", cfg, "--generations", 3, "--format", "json")
    config = json.loads(out)["config"]
    assert (config["population_size"], config["generations"], config["rng_seed"]) == (6, 3, 11)


def test_explain_table2_row1(capsys):
    code, out, _ = run(capsys, "explain", FIXTURE, ROW1)
    assert code == 0
    assert out.count("Vehicle ") == 2
    assert "Objectives: f1=2 f2=1030.1110 f3=397.2899" in out
    assert "Verdict: feasible" in out


def test_explain_flags_precedence(capsys):
    code, out, _ = run(capsys, "explain", FIXTURE, "0 2 8 0")
    assert code == 0
    assert "precedence: 2 before its supplier 8" in out


def test_explain_empty_tour(capsys):
    code, out, _ = run(capsys, "explain", FIXTURE, "0 0")
    assert code == 0
    assert "Objectives: f1=0 f2=0.0000 f3=0.0000" in out


def test_explain_csv_and_json(capsys):
    _, out, _ = run(capsys, "explain", FIXTURE, "0 8 2 0", "--format", "csv")
    assert out.splitlines()[0] == "vehicle,node,arrival,wait,departure,load,tardiness"
    _, out, _ = run(capsys, "explain", FIXTURE, ROW1, "--format", "json")
    doc = json.loads(out)
    assert doc["feasible"] and doc["objectives"]["f1"] == 2


@pytest.mark.parametrize("tour", ["0 8 x 0", "8 2"])
def test_explain_malformed(capsys, tour):
    code, _, err = run(capsys, "explain", FIXTURE, tour)
    assert code == 1


def test_explain_unknown_node(capsys):
    code, _, err = run(capsys, "explain", FIXTURE, "0 8 42 0")
    assert code == 1
    assert "unknown node id 42" in err


def test_verify_two_pairs(capsys, small_file):
    code, out, _ = run(capsys, "verify", small_file)
    assert code == 0
    assert "MATCH: 100% of oracle front attained" in out


def test_verify_one_pair(capsys, pair_file):
    code, out, _ = run(capsys, "verify", pair_file, "--generations", 1)
    assert code == 0
    assert "MATCH" in out


def test_verify_guard(capsys):
    code, _, err = run(capsys, "verify", FIXTURE)
    assert code == 3
    assert "instance exceeds oracle guard (5 pairs > 4)" in err


def test_verify_reports_mismatch(capsys, small_file, monkeypatch):
    from mpdptw import cli
    from mpdptw.pareto import ParetoArchive

    monkeypatch.setattr(cli, "evolve", lambda inst, cfg: ParetoArchive())
    code, out, _ = run(capsys, "verify", small_file)
    assert code == 4
    assert out.splitlines()[-1].startswith("MISMATCH: 0% of oracle front attained")
