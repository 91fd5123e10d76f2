import json

import pytest

from graphtensor.cli import DerivationReport, RunConfig, main


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr()


def test_table_text(capsys):
    code, out = run(capsys, "table")
    assert code == 0
    assert "1.59" in out.out and "5.80" in out.out and "2.88" in out.out


def test_laser_optimize(capsys):
    code, out = run(capsys, "--format", "json", "laser", "--optimize", "--q", "7")
    assert code == 0
    rep = json.loads(out.out)
    assert rep["result"]["optimum"]["bound"] < 0.772318
    assert rep["schema"] == "graphtensor.report/1"
    assert "0.772318" in rep["omega_table"]["tau4"]


def test_verify_lemma_decomp(capsys):
    code, out = run(capsys, "verify", "lemma-decomp")
    assert code == 0 and "1/1 passed" in out.out


def test_json_payload_is_deterministic(capsys):
    _, a = run(capsys, "--format", "json", "bound", "--d", "5", "--method", "treewidth")
    _, b = run(capsys, "--format", "json", "bound", "--d", "5", "--method", "treewidth")
    ra = DerivationReport.from_json(a.out)
    rb = DerivationReport.from_json(b.out)
    assert ra.payload() == rb.payload()
    assert ra.result["value"] == "16/5"


def test_graph_and_circuit_files(tmp_path, capsys):
    g = tmp_path / "c4.txt"
    c = tmp_path / "c4.circ"
    assert main(["graph", "--family", "cycle", "4", "-o", str(g)]) == 0
    assert g.read_text().startswith("d 4\n")
    assert main(["circuit", "build", "--graph", str(g), "--n", "2", "-o", str(c)]) == 0
    capsys.readouterr()
    code, out = run(capsys, "circuit", "check", "--file", str(c), "--graph", str(g), "--n", "2")
    assert code == 0 and "mismatches: 0" in out.out
    x = tmp_path / "x.txt"
    x.write_text("1 1 1 1\n" * 4)
    code, out = run(capsys, "circuit", "eval", "--file", str(c), "--inputs", str(x))
    assert out.out.strip() == "16"


def test_circuit_check_failure_exit_code(tmp_path, capsys):
    # two double edges have the same degrees as C4 but a different tensor
    c4, other, c = tmp_path / "c4.txt", tmp_path / "other.txt", tmp_path / "c4.circ"
    main(["graph", "--family", "cycle", "4", "-o", str(c4)])
    other.write_text("d 4\ne 1 2 1/1\ne 1 2 1/1\ne 3 4 1/1\ne 3 4 1/1\n")
    main(["circuit", "build", "--graph", str(c4), "--n", "2", "-o", str(c)])
    capsys.readouterr()
    code, _ = run(capsys, "circuit", "check", "--file", str(c), "--graph", str(other), "--n", "2")
    assert code == 1


def test_permanent_command(tmp_path, capsys):
    m = tmp_path / "m.txt"
    m.write_text("1 2\n3 4\n")
    code, out = run(capsys, "reduce", "permanent", "--matrix", str(m))
    assert code == 0 and "permanent: 10" in out.out


def test_usage_errors(capsys):
    assert run(capsys, "reduce", "permanent")[0] == 2
    assert run(capsys, "bound", "--d", "2")[0] == 2
    with pytest.raises(SystemExit) as exc:
        main(["nosuch"])
    assert exc.value.code == 2


def test_config_file_and_env(tmp_path, monkeypatch, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"format": "json", "output_dir": str(tmp_path / "out")}))
    monkeypatch.setenv("GRAPHTENSOR_CONFIG", str(cfg))
    code, out = run(capsys, "bound", "--d", "4")
    assert code == 0 and json.loads(out.out)["command"] == "bound"
    assert (tmp_path / "out" / "bound.json").exists()
    cfg.write_text(json.dumps({"bogus": 1}))
    assert run(capsys, "table")[0] == 2


def test_config_validation():
    with pytest.raises(ValueError):
        RunConfig(ipf_tol=0)
    with pytest.raises(ValueError):
        RunConfig(threads=0)
