import io
import json
import subprocess
import sys
from pathlib import Path

import pytest

from padic_simpson.cli import main, run_batch, run_job

ROOT = Path(__file__).resolve().parents[1]
BATCH = ROOT / "jobs" / "example_batch.json"
GOLDEN = ROOT / "jobs" / "golden" / "example_batch.report.json"


def job(task, payload, **ctx):
    return {"task": task, "context": {"p": 3, "N": 2, **ctx}, "payload": payload}


def test_rep_to_higgs_job():
    report, code = run_job(job("correspondence", {"direction": "rep-to-higgs", "rep": [[[4]]]}))
    assert code == 0 and report["status"] == "ok"
    assert report["result"]["theta"] == [[["3"]]]


def test_nilpotent_hitchin_job():
    report, code = run_job(job("hitchin", {"theta": [[[0, 3], [0, 0]]]}))
    assert code == 0
    assert report["result"]["zero"] is True
    assert all(c["poly"]["terms"] == [] for c in report["result"]["coefficients"])


def test_trivial_cohomology_compare_job():
    report, code = run_job(job("cohomology-compare", {"rep": [[[1]], [[1]]]}))
    assert code == 0
    result = report["result"]
    assert result["verdict"] == "match"
    for side in ("group", "higgs"):
        assert [d["divisors"] for d in result[side]] == [["p^2"], ["p^2", "p^2"], ["p^2"]]


def test_domain_error_is_reported():
    report, code = run_job(job("correspondence", {"direction": "rep-to-higgs", "rep": [[[2]]]}))
    assert code == 1
    assert report["status"] == "error" and report["error"]["type"] == "NotSmall"


def test_malformed_job_is_reported():
    report, code = run_job({"task": "hitchin", "context": {"p": 3, "N": 2}, "payload": {}})
    assert code == 2 and report["error"]["type"] == "MalformedJob"
    report, code = run_job({"task": "unknown", "context": {"p": 3, "N": 2}, "payload": {}})
    assert code == 2
    report, code = run_job(job("hitchin", {"theta": [[[3]]]}, p=4))
    assert code == 2


def test_batch_exit_code_is_worst():
    jobs = [job("hitchin", {"theta": [[[3]]]}), job("hitchin", {"theta": [[[1]]]})]
    reports, code = run_batch(jobs)
    assert [r["status"] for r in reports] == ["ok", "error"]
    assert code == 1


def test_guard_override_is_logged(monkeypatch):
    monkeypatch.setenv("PADIC_SIMPSON_GUARD", "9")
    report, code = run_job(job("hitchin", {"theta": [[[3]]]}))
    assert code == 0
    assert report["guard_override"] == "9"
    assert report["context"]["guard"] == 9


def test_seed_controls_random_jobs():
    spec = job("cohomology-compare", {"random": {"count": 2, "n": 2, "d": 2}})
    a, _ = run_job(spec, seed=1)
    b, _ = run_job(spec, seed=1)
    c, _ = run_job(spec, seed=2)
    assert a == b
    assert a["result"]["cases"] != c["result"]["cases"]


def test_cli_matches_golden(tmp_path):
    out = tmp_path / "report.json"
    code = main(["--job", str(BATCH), "--out", str(out)])
    assert code == 2  # the batch deliberately contains one malformed job
    assert out.read_bytes() == GOLDEN.read_bytes()


def test_cli_table_and_stdin(tmp_path, monkeypatch, capsys):
    monkeypatch.setattr(sys, "stdin", io.StringIO(json.dumps(job("hitchin", {"theta": [[[3]]]}))))
    assert main(["--job", "-", "--format", "table"]) == 0
    out = capsys.readouterr().out
    assert out.splitlines()[0].split() == ["#", "id", "task", "status", "summary"]
    assert "hitchin" in out


def test_cli_bad_json(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["--job", str(bad)]) == 2
    assert json.loads(capsys.readouterr().out)["error"]["type"] == "MalformedJob"


@pytest.mark.parametrize("parallel", ["1", "3"])
def test_module_entry_point(parallel):
    proc = subprocess.run([sys.executable, "-m", "padic_simpson", "--job", str(BATCH), "--parallel", parallel],
                          capture_output=True, check=False)
    assert proc.returncode == 2
    assert proc.stdout == GOLDEN.read_bytes()
