"""Command-line driver: artifacts, figures, exit codes, error paths."""

from __future__ import annotations

import json

import pytest

from rpivot.cli import main, rounds_for_epsilon
from rpivot.generators import petersen_graph
from rpivot.graph import read_graph_text


def run_json(tmp_path, name, argv):
    out = tmp_path / name
    code = main(argv + ["--out", str(out)])
    assert code == 0
    return json.loads(out.read_text())


def test_gen_writes_graph_file(tmp_path):
    out = tmp_path / "p.txt"
    assert main(["gen", "--gen", "petersen", "--out", str(out)]) == 0
    assert read_graph_text(out) == petersen_graph()


def test_gen_stdout(capsys):
    assert main(["gen", "--gen", "path:4"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "4 3"
    assert lines[1:] == ["0 1", "1 2", "2 3"]


def test_run_exhaustive_pivot_artifact(tmp_path):
    doc = run_json(
        tmp_path,
        "run.json",
        ["run", "--gen", "path:5", "--algo", "pivot", "--trials", "exhaustive"],
    )
    assert doc["schema"] == "rpivot/run-v1"
    assert doc["results"]["mean_cost"] == pytest.approx(264 / 120)
    assert doc["results"]["trials"] == 120
    assert doc["results"]["exhaustive"] is True
    assert "out" not in doc["config"]
    assert doc["config"]["command"] == "run"


def test_run_artifact_reruns_byte_identical(tmp_path):
    argv = ["run", "--gen", "er:14,0.4", "--algo", "rpivot", "--trials", "50",
            "--seed", "5", "--r", "2"]
    a = tmp_path / "a.json"
    b = tmp_path / "sub" / "b.json"
    b.parent.mkdir()
    assert main(argv + ["--out", str(a)]) == 0
    assert main(argv + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_run_single_trial_embeds_detail(tmp_path):
    doc = run_json(
        tmp_path,
        "one.json",
        ["run", "--gen", "cycle:6", "--algo", "rpivot", "--trials", "1"],
    )
    detail = doc["results"]["detail"]
    assert detail["schema"] == "rpivot/run-v1"
    assert detail["n"] == 6
    assert "extra_mistakes" in detail


def test_run_streaming_resources_csv(tmp_path):
    out = tmp_path / "s.csv"
    code = main(
        ["run", "--gen", "er:12,0.4", "--algo", "streaming", "--trials", "3",
         "--r", "2", "--format", "csv", "--out", str(out)]
    )
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "# schema=rpivot/run-v1"
    assert lines[1].startswith("# config=")
    header = lines[2].split(",")
    assert "max_passes" in header and "max_peak_words" in header
    row = dict(zip(header, lines[3].split(",")))
    assert int(row["max_passes"]) == 5
    assert int(row["max_peak_words"]) <= 6 * 12


def test_run_local_and_lca_resources(tmp_path):
    doc = run_json(
        tmp_path,
        "l.json",
        ["run", "--gen", "er:16,0.3", "--algo", "local", "--trials", "4",
         "--r", "1"],
    )
    res = doc["results"]
    assert res["max_rounds"] == 3
    assert res["max_message_bits"] <= 3 * 4 + 8
    assert res["c"] == 3
    doc = run_json(
        tmp_path,
        "q.json",
        ["run", "--gen", "er:16,0.3", "--algo", "lca", "--trials", "4"],
    )
    assert doc["results"]["max_probes"] > 0


def test_run_mpc_respects_delta(tmp_path):
    doc = run_json(
        tmp_path,
        "m.json",
        ["run", "--gen", "er:45,0.15", "--algo", "mpc", "--trials", "2",
         "--delta", "0.3"],
    )
    res = doc["results"]
    assert res["delta"] == 0.3
    assert res["capacity"] == 4  # ceil(45**0.3)
    assert res["max_peak_machine_words"] <= res["capacity"]


def test_epsilon_maps_to_rounds(tmp_path):
    assert rounds_for_epsilon(8.0) == 1
    assert rounds_for_epsilon(4.0) == 2
    assert rounds_for_epsilon(1.0) == 5
    with pytest.raises(ValueError):
        rounds_for_epsilon(0.0)
    doc = run_json(
        tmp_path,
        "e.json",
        ["run", "--gen", "cycle:8", "--algo", "rpivot", "--trials", "20",
         "--epsilon", "4"],
    )
    assert doc["results"]["r"] == 2


def test_epsilon_and_r_conflict(tmp_path, capsys):
    code = main(
        ["run", "--gen", "cycle:8", "--r", "1", "--epsilon", "4",
         "--trials", "5"]
    )
    assert code == 1
    assert "either --r or --epsilon" in capsys.readouterr().err


def test_ratio_exhaustive_c5(tmp_path):
    doc = run_json(
        tmp_path,
        "ratio.json",
        ["ratio", "--gen", "cycle:5", "--trials", "exhaustive", "--r", "1"],
    )
    res = doc["results"]
    assert res["opt"] == 3
    assert res["mean_cost_rpivot"] == pytest.approx(400 / 120)
    assert res["ratio_cost"] == pytest.approx((400 / 120) / 3)
    assert res["ratio_x"] == pytest.approx((40 / 120) / 3)
    assert res["cost_bound_factor"] == 11.0


def test_ratio_plot_writes_figure(tmp_path):
    out = tmp_path / "ratio.json"
    code = main(
        ["ratio", "--gen", "cycle:5", "--trials", "200", "--r", "1",
         "--out", str(out), "--plot"]
    )
    assert code == 0
    png = tmp_path / "ratio.png"
    assert png.exists()
    assert png.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"


def test_plot_without_out_rejected(capsys):
    code = main(["ratio", "--gen", "cycle:5", "--trials", "50", "--plot"])
    assert code == 1
    assert "--plot needs --out" in capsys.readouterr().err


def test_run_rejects_plot(capsys):
    code = main(["run", "--gen", "cycle:5", "--plot"])
    assert code == 1
    assert "ratio" in capsys.readouterr().err


def test_width_summary_and_rows(tmp_path):
    doc = run_json(
        tmp_path,
        "w.json",
        ["width", "--gen", "petersen", "--trials", "300", "--r", "1"],
    )
    summary = doc["results"]["summary"]
    assert summary["width_bound"] == 8.0
    assert summary["max_mean_charges"] <= 8.0
    assert len(doc["results"]["pairs"]) == 45
    assert doc["config"]["trials"] == 300


def test_width_plot_writes_figure(tmp_path):
    out = tmp_path / "w.json"
    code = main(
        ["width", "--gen", "cycle:5", "--trials", "100", "--r", "1",
         "--out", str(out), "--plot"]
    )
    assert code == 0
    assert (tmp_path / "w.png").exists()


def test_adversarial_clique_path_defaults(tmp_path):
    doc = run_json(tmp_path, "cp.json", ["adversarial", "clique-path"])
    res = doc["results"]
    assert res["kind"] == "clique-path" and res["r"] == 3
    by_n = {rep["clique_n"]: rep for rep in res["reports"]}
    assert set(by_n) == {8, 40}
    assert by_n[8]["cost"] == 31
    assert by_n[8]["witness_cost"] == 3
    assert by_n[8]["pivots"] == "0 2 4"
    assert by_n[40]["ratio"] > 10 * by_n[8]["ratio"]


def test_adversarial_layered_sweep(tmp_path):
    out = tmp_path / "lay.json"
    code = main(
        ["adversarial", "layered", "--r", "1", "--trials", "60",
         "--seed", "4", "--out", str(out), "--plot"]
    )
    assert code == 0
    doc = json.loads(out.read_text())
    res = doc["results"]
    assert res["decreasing"] is True
    assert res["endpoint_separation_sigmas"] > 3
    assert [p["alpha"] for p in res["points"]] == [2, 3]
    assert (tmp_path / "lay.png").exists()


def test_verify_clean_exit_zero(tmp_path, capsys):
    out = tmp_path / "v.json"
    code = main(
        ["verify", "--suite", "invariants", "--budget", "4",
         "--out", str(out)]
    )
    assert code == 0
    stdout = capsys.readouterr().out
    assert "PASS refinement" in stdout
    doc = json.loads(out.read_text())
    assert doc["results"]["schema"] == "rpivot/verify-v1"


def test_gen_error_paths(capsys):
    assert main(["gen", "--gen", "wedge:4"]) == 1
    assert "unknown generator" in capsys.readouterr().err
    assert main(["gen"]) == 1
    assert "exactly one of" in capsys.readouterr().err
    assert main(["gen", "--gen", "er:5"]) == 1
    assert "er:N,P" in capsys.readouterr().err
    assert main(["run", "--gen", "path:4", "--algo", "sorting"]) == 1
    assert "unknown algo" in capsys.readouterr().err
    assert main(["run", "--gen", "path:4", "--trials", "0"]) == 1
    assert "at least 1" in capsys.readouterr().err


def test_file_input_roundtrip(tmp_path):
    gfile = tmp_path / "g.txt"
    assert main(["gen", "--gen", "cliques:3,3", "--out", str(gfile)]) == 0
    doc = run_json(
        tmp_path,
        "file.json",
        ["run", "--file", str(gfile), "--algo", "rpivot", "--trials", "30"],
    )
    assert doc["results"]["mean_cost"] == 0.0
    assert doc["results"]["source"]["file"] == str(gfile)


def test_exhaustive_rejected_for_integer_rank_algos(capsys):
    code = main(
        ["run", "--gen", "path:4", "--algo", "local", "--trials", "exhaustive"]
    )
    assert code == 1
    assert "integer ranks" in capsys.readouterr().err
