import csv
import json
import subprocess
import sys

import pytest

from isoperim import cli, suites
from isoperim.errors import NumericFailure


def run(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_profile_eval(capsys):
    code, out, _ = run(["profile", "--kind", "sphere", "--n", "2", "--eval", "0.5"], capsys)
    assert code == 0 and abs(float(out.strip()) - 0.5) <= 1e-8


def test_profile_phi_and_label(capsys):
    code, out, _ = run(["profile", "--kind", "euclidean", "--n", "2", "--phi", "1", "--eval", "4"], capsys)
    assert code == 0
    values = [float(x) for x in out.split()]
    assert values == pytest.approx([4 * 3.5449077018110318 / 2, 0.28209479177387814])
    code, out, _ = run(["profile", "--kind", "log_concave", "--p", "2"], capsys)
    assert code == 0 and "log_concave" in out


def test_profile_out_of_domain(capsys):
    code, _, err = run(["profile", "--kind", "sphere", "--eval", "1.5"], capsys)
    assert code == 2 and "error" in err


def test_malformed_config(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"seed": 1, "resolutoin": 64}))
    code, _, err = run(["verify", "--config", str(cfg), "--out", str(tmp_path / "o")], capsys)
    assert code == 2 and "resolutoin" in err
    cfg.write_text("{not json")
    code, _, err = run(["verify", "--config", str(cfg)], capsys)
    assert code == 2 and "malformed" in err
    cfg.write_text(json.dumps({"seed": "forty-two"}))
    code, _, err = run(["verify", "--config", str(cfg)], capsys)
    assert code == 2 and "seed" in err
    cfg.write_text(json.dumps({"suite": "core", "cases": ["weights.half_plane"]}))
    code, _, err = run(["verify", "--config", str(cfg)], capsys)
    assert code == 2 and "weights.half_plane" in err


def test_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["verify", "--suite", "everything"])
    assert exc.value.code == 2


@pytest.fixture(scope="module")
def core_run(tmp_path_factory):
    out = tmp_path_factory.mktemp("core")
    code = cli.main(["verify", "--suite", "core", "--seed", "42", "--resolution", "256", "--out", str(out)])
    return code, out


def test_verify_core(core_run):
    code, out = core_run
    assert code == 0
    report = json.loads((out / "report.json").read_text())
    assert report["run"]["seed"] == 42 and report["run"]["resolution"] == 256
    assert report["run"]["suite"] == "core" and report["run"]["tolerance"] == 0.05
    assert report["run"]["hash"] == cli.report_hash(report["run"], report["results"])
    assert all(r["pass"] for r in report["results"])
    assert {r["case"] for r in report["results"]} == set(suites.suite_cases("core"))
    meta = json.loads((out / "metadata.json").read_text())
    assert "timestamp" in meta and "timestamp" not in report["run"]


def test_curves(core_run):
    _, out = core_run
    report = json.loads((out / "report.json").read_text())
    curved = [r for r in report["results"] if "curve" in r]
    assert curved
    for r in curved:
        with open(out / r["curve"]) as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["r", "lhs", "rhs", "ratio"] and len(rows) == 257
        assert all(float(row[3]) <= 1.05 for row in rows[1:])


def test_flags_override_config(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"suite": "core", "seed": 3, "tolerance": 0.1, "cases": ["core.profile_sphere"]}))
    code, _, _ = run(["verify", "--config", str(cfg), "--seed", "5", "--out", str(tmp_path / "o")], capsys)
    assert code == 0
    run_info = json.loads((tmp_path / "o" / "report.json").read_text())["run"]
    assert run_info["seed"] == 5 and run_info["tolerance"] == 0.1


def test_jobs_env_fallback(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("ISOPERIM_JOBS", "2")
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"cases": ["core.profile_sphere", "core.profile_gauss"]}))
    code, _, _ = run(["verify", "--config", str(cfg), "--out", str(tmp_path / "o")], capsys)
    assert code == 0
    assert json.loads((tmp_path / "o" / "metadata.json").read_text())["jobs"] == 2
    monkeypatch.setenv("ISOPERIM_JOBS", "lots")
    code, _, err = run(["verify", "--config", str(cfg), "--out", str(tmp_path / "o")], capsys)
    assert code == 2 and "ISOPERIM_JOBS" in err


def test_exit_codes_for_failures_and_errors(tmp_path, monkeypatch, capsys):
    def failing(settings):
        return [suites.row_bound("deliberately violated", 2.0, 1.0)]

    def broken(settings):
        raise NumericFailure("degenerate extrapolation")

    monkeypatch.setitem(suites.CASES, "core.zz_failing", failing)
    code, out, _ = run(["verify", "--suite", "core", "--out", str(tmp_path / "a"), "--jobs", "1"], capsys)
    assert code == 1 and "deliberately violated" in out
    monkeypatch.setitem(suites.CASES, "core.zz_broken", broken)
    code, out, _ = run(["verify", "--suite", "core", "--out", str(tmp_path / "b"), "--jobs", "1"], capsys)
    assert code == 3 and "degenerate extrapolation" in out


def test_report_diff(core_run, tmp_path, capsys):
    _, out = core_run
    path = out / "report.json"
    code, stdout, _ = run(["report", "diff", str(path), str(path)], capsys)
    assert code == 0 and "identical" in stdout
    report = json.loads(path.read_text())
    report["results"][0]["pass"] = not report["results"][0]["pass"]
    report["run"]["seed"] = 7
    other = tmp_path / "r.json"
    other.write_text(json.dumps(report))
    code, stdout, _ = run(["report", "diff", str(path), str(other)], capsys)
    assert code == 1 and "pass changed" in stdout and "run.seed" in stdout


def test_weights_analyze(capsys):
    code, out, _ = run(["weights", "analyze", "--space", "euclidean_box", "--weight", "norm"], capsys)
    assert code == 0
    d = json.loads(out)
    assert abs(d["C_iso"] - 0.5) <= 0.025 and abs(d["M_norm"] - 0.5) <= 0.025
    code, out, _ = run(["weights", "analyze", "--space", "log_concave", "--weight", "prototype",
                        "--resolution", "64"], capsys)
    assert code == 0 and json.loads(out)["C_iso"] <= 1.05


def test_jsonable_nonfinite():
    assert cli.jsonable({"a": float("inf"), "b": [float("nan"), -float("inf")]}) == \
        {"a": "inf", "b": ["nan", "-inf"]}


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "isoperim", "--version"], capture_output=True, text=True)
    assert res.returncode == 0 and "isoperim" in res.stdout
