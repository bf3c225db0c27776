import json

import pytest

from superpat.cli import main, manifest_path, verify_manifest


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


def test_enumerate(capsys):
    code, out = run(capsys, "enumerate", "--k", "3", "--d", "3")
    lines = out.split()
    assert code == 0 and len(lines) == 13 and lines[-1] == "321"
    assert lines == sorted(lines)
    assert run(capsys, "enumerate", "--k", "1", "--d", "1")[1] == "1\n"
    assert len(run(capsys, "enumerate", "--k", "4", "--d", "4")[1].split()) == 75
    doc = json.loads(run(capsys, "enumerate", "--k", "3", "--d", "2", "--format", "json")[1])
    assert doc["count"] == 7


def test_check(capsys):
    code, out = run(capsys, "check", "2353134", "--k", "3", "--d", "5", "--surjective")
    assert code == 0 and "result=true" in out
    assert run(capsys, "check", "1221", "--k", "2", "--d", "2")[0] == 0
    code, out = run(capsys, "check", "1111111", "--k", "3", "--d", "3")
    assert code == 1 and "missing=123" in out
    code, out = run(capsys, "check", "1231241", "--k", "3", "--d", "5", "--surjective")
    assert code == 1 and "missing=letter 5" in out
    code, out = run(capsys, "check", "3213213", "--k", "3", "--d", "3", "--mode", "regular")
    assert code == 0


def test_check_parse_error(capsys):
    assert main(["check", "12x", "--k", "2"]) == 2
    assert main(["check", "1,2,3", "--k", "2", "--d", "2"]) == 2


def test_usage_error():
    with pytest.raises(SystemExit) as info:
        main(["search", "--k", "3"])
    assert info.value.code == 2
    with pytest.raises(SystemExit) as info:
        main(["simulate", "--k", "2", "--trials", "10"])
    assert info.value.code == 2


def test_bounds(capsys):
    code, out = run(capsys, "bounds", "--k", "10")
    assert code == 0
    assert "prop1_lower=63" in out and "rado_upper=83" in out and "burstein_upper=84" in out


def test_search(capsys, tmp_path):
    cert = tmp_path / "cert.txt"
    code, out = run(capsys, "search", "--k", "3", "--d", "3", "--certificate", str(cert))
    assert code == 0 and "min_length=7" in out and "witness=1213121" in out
    assert "length: 6" in cert.read_text()


def test_search_budget_exit_code(capsys):
    code, out = run(capsys, "search", "--k", "4", "--d", "4", "--budget", "1000")
    assert code == 3 and "budget_exceeded" in out


def test_exact(capsys):
    code, out = run(capsys, "exact", "--k", "3")
    assert code == 0
    assert "chain_E_X=217/16 (13.5625)" in out and "Var_Y=39/2 (19.5)" in out
    assert main(["exact", "--k", "4", "--process", "X"]) == 4


def test_simulate_csv_and_cache(capsys, tmp_path):
    argv = ["simulate", "--k", "2", "--trials", "20000", "--seed", "1", "--format", "csv"]
    code, first = run(capsys, *argv)
    assert code == 0
    rows = [line.split(",") for line in first.splitlines()]
    assert rows[0] == ["k", "trials", "seed", "process", "mean", "variance", "ci_half_width"]
    mean_x = float(next(r for r in rows if r[3] == "X")[4])
    assert abs(mean_x - 5) < 0.1
    cached = list((tmp_path / "cache").glob("simulate-*.out"))
    assert len(cached) == 1 and verify_manifest(cached[0])
    _, second = run(capsys, *argv)
    _, fresh = run(capsys, *argv, "--no-cache")
    assert first == second == fresh


def test_out_writes_manifest(capsys, tmp_path):
    out = tmp_path / "res" / "bounds.txt"
    run(capsys, "bounds", "--k", "5", "--out", str(out))
    manifest = json.loads(manifest_path(out).read_text())
    assert manifest["subcommand"] == "bounds" and manifest["parameters"]["k"] == 5
    assert verify_manifest(out)
    out.write_text(out.read_text() + "tampered\n")
    assert not verify_manifest(out)


def test_simulate_dump(capsys, tmp_path):
    dump = tmp_path / "trials.csv"
    run(capsys, "simulate", "--k", "3", "--trials", "10", "--seed", "4", "--dump", str(dump))
    lines = dump.read_text().splitlines()
    assert lines[0].startswith("trial,seed,Y,X,Z,k_1") and len(lines) == 11
    assert verify_manifest(dump)


def test_concentration(capsys):
    code, out = run(capsys, "concentration", "--k", "5", "--omega", "3", "--trials", "500",
                    "--seed", "2", "--format", "json")
    doc = json.loads(out)
    assert code == 0 and doc["trials"] == 500 and 0 <= doc["fraction"] <= 1
