import csv
import io
import json
import subprocess
import sys

import pytest

from explicit_primes import cli


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_sieve(capsys):
    code, out, _ = run(capsys, "sieve", "--hi", "1e6")
    assert code == 0
    r = rows(out)[0]
    assert r["prime_count"] == "78498"
    code, out, _ = run(capsys, "sieve", "--lo", "2", "--hi", "30", "--list")
    assert [r["p"] for r in rows(out)] == ["2", "3", "5", "7", "11", "13", "17", "19", "23", "29"]


def test_estermann_summary(capsys):
    code, out, _ = run(capsys, "estermann", "--lo", "3", "--hi", "1000000")
    assert code == 0
    s = rows(out)[0]["summary"]
    assert s.startswith("all decomposed, max attempts ")


def test_cube_bound(capsys):
    code, out, _ = run(capsys, "cube-bound", "--A", "9.7", "--c", "57.54", "--k", "0.9359", "--format", "json")
    assert code == 0
    r = json.loads(out)[0]
    assert r["loglog_n0"] == pytest.approx(33.217, abs=0.05)
    assert r["certified"] is True


def test_empty_zero_file_exit_2(capsys, tmp_path):
    p = tmp_path / "zeros.txt"
    p.write_text("")
    code, out, err = run(capsys, "zero-stats", "--file", str(p), "--check", "window")
    assert code == 2 and out == ""
    assert err.count("\n") == 1 and "line 1" in err


def test_missing_file_and_bad_args(capsys, tmp_path):
    assert run(capsys, "zero-stats", "--file", str(tmp_path / "nope.txt"))[0] == 2
    assert run(capsys, "bogus")[0] == 2
    assert run(capsys, "sieve")[0] == 2
    assert run(capsys, "sieve", "--hi", "2e17")[0] == 2
    assert run(capsys, "ramanujan-verify", "--lo", "10", "--hi", "20")[0] == 2
    assert run(capsys, "sieve", "--hi", "100", "--threads", "0")[0] == 2


def test_zero_stats_default_table(capsys):
    code, out, _ = run(capsys, "zero-stats", "--check", "density")
    assert code == 0
    assert rows(out)[0]["ok"] == "true"


def test_verification_failure_exit_1(capsys):
    code, out, _ = run(capsys, "ramanujan-verify", "--lo", "100000", "--hi", "110000", "--exact")
    assert code == 1
    r = rows(out)
    assert r[0]["mode"] == "exact" and int(r[0]["x"]) >= 100000
    assert r[-1]["mode"] == "summary"


def test_verify_no_counterexample_exit_0(capsys):
    code, out, _ = run(capsys, "ramanujan-verify", "--lo", "630000", "--hi", "700000", "--exact")
    assert code == 0
    assert rows(out)[-1]["counterexamples"] == "0"


def test_stepping_with_checkpoint_file(capsys, tmp_path):
    f = tmp_path / "cp.csv"
    assert run(capsys, "checkpoints", "--plan", "500000:2000100:100", "--save", str(f))[0] == 0
    code, out, _ = run(capsys, "ramanujan-verify", "--lo", "1900000", "--hi", "1950000", "--checkpoints", str(f))
    assert code == 1
    r = rows(out)
    assert r[-1]["status"] == "counterexample"
    assert r[-2]["mode"] == "exact"  # the witness


def test_output_file_and_determinism(capsys, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for p, t in ((a, "1"), (b, "3")):
        assert run(capsys, "psi-formula", "--x", "1000.5", "--x", "20000.5", "--T", "5000",
                   "--threads", t, "--output", str(p))[0] == 0
    assert a.read_bytes() == b.read_bytes()
    r = rows(a.read_text())
    assert len(r) == 2 and r[0]["regime"] == "empirical"


def test_twelve_significant_digits(capsys):
    _, out, _ = run(capsys, "cramer")
    r = rows(out)[0]
    assert r["four_over_pi"] == "1.27323954474"
    assert len(r["min_value"].replace(".", "").lstrip("0")) <= 12


def test_config_file(capsys, tmp_path):
    conf = tmp_path / "c.json"
    conf.write_text(json.dumps({"m": [4], "k": 0.9635}))
    code, out, _ = run(capsys, "mpower-bound", "--config", str(conf))
    assert code == 0
    assert float(rows(out)[0]["loglog_n0"]) == pytest.approx(29.24, abs=0.05)
    conf.write_text(json.dumps({"nonsense": 1}))
    assert run(capsys, "mpower-bound", "--config", str(conf))[0] == 2


def test_ramanujan_uncond(capsys):
    code, out, _ = run(capsys, "ramanujan-uncond", "--a", "3130")
    r = rows(out)[0]
    assert (r["y_a"], r["y_a_prime"]) == ("9393", "9394")


def test_erdos(capsys):
    code, out, _ = run(capsys, "erdos", "--hi", "200000", "--format", "json")
    assert code == 0
    assert json.loads(out)[0]["unresolved"] == 0


def test_console_script_progress_on_stderr():
    p = subprocess.run(
        [sys.executable, "-m", "explicit_primes.cli", "ramanujan-verify", "--lo", "630000",
         "--hi", "700000", "--exact", "--progress"],
        capture_output=True, text=True,
    )
    assert p.returncode == 0
    assert "scan:" in p.stderr and "scan:" not in p.stdout
