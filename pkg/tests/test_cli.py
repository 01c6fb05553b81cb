import io
import json
import shlex

import pytest

from grigid import __version__
from grigid.cli import run_command
from grigid.report import Report, fmt, parse_report

CONVERSE = {"name": "converse y = x", "maps": [
    {"ratio": 0.5, "angle": "0", "translation": [0, 0]},
    {"ratio": 0.5, "angle": "0", "translation": [0.5, 0.5]},
]}


@pytest.fixture
def converse_file(tmp_path):
    p = tmp_path / "converse.ifs"
    p.write_text(json.dumps(CONVERSE))
    return str(p)


def run(argv):
    out, err = io.StringIO(), io.StringIO()
    code = run_command(argv, stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def test_render_writes_file(tmp_path):
    target = tmp_path / "fig.svg"
    code, _, _ = run(["render", "--function", "takagi", "--n", "4096", "--out", str(target)])
    assert code == 0
    assert target.read_text().startswith("<?xml")


def test_verify_pass(converse_file):
    code, out, _ = run(["verify", "--ifs", converse_file, "--function", "affine", "--a", "1",
                        "--b", "0", "--n", "2048"])
    rep = parse_report(out)
    assert code == 0
    assert rep["verdicts"] == [("verify", "PASS")]
    assert float(rep["blocks"]["verify"]["residual"]) <= 2 / 2048
    assert rep["header"]["input.ifs.sha256"]


def test_verify_fail_exit_one(converse_file):
    code, out, _ = run(["verify", "--ifs", converse_file, "--function", "takagi", "--n", "512"])
    assert code == 1
    assert "VERDICT verify FAIL" in out


def test_certify_affine(converse_file):
    code, out, _ = run(["certify-affine", "--ifs", converse_file, "--function", "affine",
                        "--a", "1", "--b", "0", "--stages", "10"])
    rep = parse_report(out)
    assert code == 0
    assert ("affine", "PASS") in rep["verdicts"] and ("cover", "PASS") in rep["verdicts"]
    assert float(rep["blocks"]["affine"]["bound"]) > 0


def test_certify_lipschitz_fail(converse_file):
    code, out, _ = run(["certify-lipschitz", "--ifs", converse_file, "--function", "takagi",
                        "--n", "1024", "--deltas", "0.25,0.125"])
    assert code == 1
    assert "VERDICT cover FAIL" in out


def test_classify_and_fit_are_info():
    code, out, _ = run(["classify-rotation", "--function", "takagi", "--n", "4096",
                        "--angle", "pi", "--angle", "2*pi/7"])
    rep = parse_report(out)
    assert code == 0 and rep["verdicts"] == [("rotation", "INFO")]
    assert rep["blocks"]["rotation"]["angle.2.status"] == "Rejected"
    code, out, _ = run(["fit", "--function", "takagi", "--n", "128", "--restarts", "2",
                        "--budget", "100"])
    assert code == 0 and "VERDICT fit INFO" in out


@pytest.mark.parametrize("argv", [
    ["verify", "--bogus"],
    ["nonsense"],
    [],
    ["verify", "--ifs", "/nonexistent/file.ifs"],
    ["classify-rotation", "--angle", "tau"],
    ["render", "--function", "csv"],
    ["render", "--n", "1"],
    ["render", "--frames"],
])
def test_usage_errors_exit_two(argv):
    assert run(argv)[0] == 2


def test_bad_ifs_documents_exit_two(tmp_path):
    bad = tmp_path / "bad.ifs"
    bad.write_text('{"maps": [{"ratio": 1.2}]}')
    code, _, err = run(["verify", "--ifs", str(bad)])
    assert code == 2 and "map 0" in err
    bad.write_text('{"maps": [\n{"ratio": 0.5,}]}')
    code, _, err = run(["verify", "--ifs", str(bad)])
    assert code == 2 and "line 2" in err


def test_seed_from_environment(monkeypatch):
    monkeypatch.setenv("GRIGID_SEED", "17")
    _, out, _ = run(["fit", "--function", "takagi", "--n", "64", "--restarts", "1", "--budget", "20"])
    assert parse_report(out)["header"]["seed"] == "17"
    monkeypatch.setenv("GRIGID_SEED", "x")
    assert run(["fit", "--function", "takagi", "--n", "64"])[0] == 2


def test_report_rerun_reproduces(converse_file):
    argv = ["verdict", "--function", "weierstrass", "--n", "256", "--restarts", "2",
            "--budget", "100", "--seed", "5"]
    _, first, _ = run(argv)
    recorded = shlex.split(parse_report(first)["header"]["argv"])
    _, second, _ = run(recorded)
    assert first == second
    _, a, _ = run(["certify-affine", "--ifs", converse_file, "--function", "affine", "--stages", "4"])
    _, b, _ = run(shlex.split(parse_report(a)["header"]["argv"]))
    assert a == b


def test_csv_input(tmp_path):
    from grigid.graph import Affine, sample
    p = tmp_path / "g.csv"
    p.write_text("# eval_error = 0\n" + sample(Affine(2.0, 1.0), 64).to_csv())
    code, out, _ = run(["verdict", "--function", "csv", "--csv", str(p)])
    rep = parse_report(out)
    assert code == 0 and rep["blocks"]["rigidity"]["classification"] == "AFFINE"
    assert rep["header"]["input.csv.sha256"]


def test_report_format_round_trip():
    r = Report(__version__)
    r.add_header("x", 0.1)
    b = r.block("demo")
    b.add("value", 1 / 3)
    b.add("flag", True)
    b.add("pair", (0.5, 2))
    b.verdict = "PASS"
    parsed = parse_report(r.render())
    assert float(parsed["blocks"]["demo"]["value"]) == 1 / 3
    assert parsed["header"]["tool_version"] == __version__
    assert parsed["verdicts"] == [("demo", "PASS")]
    assert fmt(0.1) == "0.10000000000000001"
    assert r.exit_code() == 0
    b.verdict = "FAIL"
    assert r.exit_code() == 1
