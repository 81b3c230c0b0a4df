import json

from fmlat.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_lattice_command(capsys):
    code, out, _ = run_cli(capsys, "lattice", "U(3)")
    assert code == 0
    assert "det -9" in out


def test_lattice_json(capsys):
    code, out, _ = run_cli(capsys, "lattice", "U(2)+E8(-2)", "--disc", "--json")
    assert code == 0
    payload = json.loads(out)
    assert payload["invariants"]["det"] == -1024
    assert payload["discriminant_group"]["orders"] == [2] * 10
    # canonical output: byte-identical reruns
    code2, out2, _ = run_cli(capsys, "lattice", "U(2)+E8(-2)", "--disc", "--json")
    assert out == out2


def test_lattice_aut(capsys):
    code, out, _ = run_cli(capsys, "lattice", "U(3)", "--aut")
    assert code == 0
    assert "|O(A_L)| = 4" in out


def test_nikulin_command(capsys):
    code, out, _ = run_cli(capsys, "nikulin", "U(3)")
    assert code == 0
    assert "FAILS" in out
    code, out, _ = run_cli(capsys, "nikulin", "U+U(2)+E8(-2)")
    assert code == 0
    assert "holds" in out


def test_genus_scan_command(capsys):
    code, out, _ = run_cli(capsys, "genus-scan", "--det", "-9", "--bound", "5",
                           "--json")
    assert code == 0
    payload = json.loads(out)
    assert payload["det"] == -9
    assert payload["class_count"] == len(payload["classes"])


def test_count_command(capsys):
    code, out, _ = run_cli(capsys, "count", "abelian", "--ns", "U(3)",
                           "--t", "U(3)+U")
    assert code == 0
    assert "total 1" in out
    code, out, _ = run_cli(capsys, "count", "k3", "--ns", "U(2)+E8(-2)",
                           "--t", "U+U(2)+E8(-2)", "--json")
    assert code == 0
    assert json.loads(out)["total"] == 1


def test_scenario_command(capsys):
    code, out, _ = run_cli(capsys, "scenario", "enriques-FN", "--param", "N=3")
    assert code == 0
    assert "=1" in out


def test_batch_command(tmp_path, capsys):
    manifest = tmp_path / "manifest.json"
    manifest.write_text(json.dumps([
        {"id": "bielliptic-34-rho2"},
        {"id": "k3-rank-ge-12", "params": {"rho": 13}},
    ]))
    code, out, _ = run_cli(capsys, "batch", str(manifest))
    assert code == 0
    assert out.count("\n") == 2


def test_batch_with_failure(tmp_path, capsys):
    manifest = tmp_path / "manifest.json"
    manifest.write_text(json.dumps([{"id": "bogus"}]))
    code, out, _ = run_cli(capsys, "batch", str(manifest))
    assert code == 2
    assert "ERROR" in out


def test_exit_code_2_on_bad_expression(capsys):
    code, _, err = run_cli(capsys, "lattice", "U(3")
    assert code == 2
    assert "position" in err


def test_exit_code_2_on_bad_params(capsys):
    code, _, err = run_cli(capsys, "scenario", "enriques-FN", "--param", "N=1")
    assert code == 2


def test_exit_code_3_on_cap(capsys):
    code, _, err = run_cli(capsys, "lattice", "E8(-2)+E8(-2)", "--aut")
    assert code == 3
    assert "inconclusive" in err


def test_malformed_manifest(tmp_path, capsys):
    manifest = tmp_path / "bad.json"
    manifest.write_text("{not json")
    code, _, err = run_cli(capsys, "batch", str(manifest))
    assert code == 2
