import csv
import io
import json
import subprocess
import sys

import pytest

from nearcurve import harness
from nearcurve.cli import COUNT_FIELDS, main


def run(capsys, *argv):
    rc = main(list(argv))
    out = capsys.readouterr()
    return rc, out.out, out.err


def test_count_csv(capsys):
    rc, out, _ = run(capsys, "count", "--curve", "parabola", "--Q", "2", "--delta", "0.3")
    assert rc == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert list(rows[0]) == COUNT_FIELDS
    assert rows[0]["count"] == "2" and rows[0]["mode"] == "full"


def test_count_exact_per_q_to_file(capsys, tmp_path):
    out = tmp_path / "n.csv"
    rc, _, _ = run(capsys, "count", "--curve", "cubic", "--delta", "3/10", "--mode",
                   "dyadic-block", "--Q", "20", "--exact", "--per-q", "--out", str(out))
    assert rc == 0
    row = next(csv.DictReader(out.open()))
    assert row["mode"] == "tilde"
    per_q = list(csv.DictReader(open(str(out) + ".per_q.csv")))
    assert [int(r["q"]) for r in per_q] == list(range(21, 41))
    assert sum(int(r["count"]) for r in per_q) == int(row["count"])


def test_count_inline_curve_table(capsys):
    rc, out, _ = run(capsys, "count", "--curve", '{ poly = ["0", "0", "1"], eta = 1, xi = 2, id = "p2" }',
                     "--Q", "2", "--delta", "0.3")
    assert rc == 0 and out.splitlines()[1].startswith("p2,full,2,0.3,2,")


def test_count_config_and_override(capsys, tmp_path):
    cfg = tmp_path / "c.toml"
    cfg.write_text('curve = "parabola"\nQ = 2\ndelta = 0.3\n')
    rc, out, _ = run(capsys, "count", "--config", str(cfg))
    assert rc == 0 and out.splitlines()[1].split(",")[4] == "2"
    rc, out, _ = run(capsys, "count", "--config", str(cfg), "--Q", "4")
    assert out.splitlines()[1].split(",")[2] == "4"


@pytest.mark.parametrize("argv", [
    ["count", "--curve", "nosuch", "--Q", "2", "--delta", "0.3"],
    ["count", "--curve", "parabola", "--Q", "2", "--delta", "0.7"],
    ["count", "--Q", "2"],
    ["count", "--config", "/nonexistent.toml"],
    ["accept", "--suite", "nosuite"],
    ["oscdiag", "--curve", "parabola", "--k", "3", "--q", "10", "--op", "integral"],
])
def test_usage_errors_exit_2(capsys, argv):
    rc, _, err = run(capsys, *argv)
    assert rc == 2 and "error" in err


def test_argparse_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as e:
        main(["count", "--mode", "sideways"])
    assert e.value.code == 2


def test_selberg_verify_and_dump(capsys, tmp_path):
    path = tmp_path / "c.csv"
    rc, out, _ = run(capsys, "selberg", "--K", "50", "--delta", "0.1", "--sign", "plus", "--verify", "grid=10000",
                     "--dump-coeffs", str(path))
    rep = json.loads(out)
    assert rc == 0 and rep["verify"]["ok"] and rep["mean"] == pytest.approx(0.2 + 1 / 51)
    rows = list(csv.DictReader(path.open()))
    assert len(rows) == 101 and rows[0]["k"] == "-50"
    assert float(rows[50]["re"]) == pytest.approx(rep["mean"])


def test_selberg_failed_check_exits_1(capsys):
    rc, out, _ = run(capsys, "selberg", "--K", "10", "--delta", "0.1", "--sign", "minus", "--verify", "grid=10000")
    assert rc == 1 and not json.loads(out)["verify"]["domination_ok"]


@pytest.mark.parametrize("op, extra", [("expsum", []), ("integral", ["--h", "9"]), ("stationary", ["--h", "9"]),
                                       ("compare", []), ("census", [])])
def test_oscdiag_json(capsys, op, extra):
    rc, out, _ = run(capsys, "oscdiag", "--curve", "parabola", "--k", "3", "--q", "50", "--op", op, *extra)
    rec = json.loads(out)
    assert rc == 0 and set(rec) == {"op", "inputs", "value_re", "value_im", "diagnostics"}
    if op == "stationary":
        assert rec["value_re"] == pytest.approx(1.5) and rec["diagnostics"]["lambda_h"] == pytest.approx(0.25)


@pytest.mark.parametrize("op, key, want", [("mainterm", "value", 1e4 ** 2 * 0.01), ("chooseK", "value", 105),
                                           ("regime", "value", 1), ("bound", "regime", 1)])
def test_analyze_ops(capsys, op, key, want):
    rc, out, _ = run(capsys, "analyze", "--curve", "parabola", "--Q", "1e4", "--delta", "0.01", "--op", op)
    assert rc == 0 and json.loads(out)[key] == pytest.approx(want)


def test_analyze_chain(capsys):
    rc, out, _ = run(capsys, "analyze", "--curve", "parabola", "--Q", "32", "--delta", "0.2", "--K", "3",
                     "--op", "chain")
    rec = json.loads(out)
    assert rc == 0 and rec["K"] == 3 and len(rec["steps"]) == 8


def test_sweep_with_env_cache_and_plot(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv(harness.CACHE_ENV, str(tmp_path / "cache"))
    cfg = tmp_path / "s.toml"
    cfg.write_text('curve = { name = "parabola" }\n[Q_grid]\nbase = 64\nfactor = 2\ncount = 4\n'
                   '[delta]\nschedule = "power"\nc = 1.0\ngamma = 0.4\n')
    plot = tmp_path / "r.dat"
    rc, out, _ = run(capsys, "sweep", "--config", str(cfg), "--mode", "tilde", "--plot", "ratio",
                     "--plot-out", str(plot))
    assert rc == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 4 and {r["mode"] for r in rows} == {"tilde"}
    assert len(list((tmp_path / "cache").iterdir())) == 4
    assert len([l for l in plot.read_text().splitlines() if not l.startswith("#")]) == 4


def test_accept_suite(capsys, tmp_path):
    rep = tmp_path / "a.json"
    rc, out, _ = run(capsys, "accept", "--suite", "dyadic", "--json", str(rep))
    assert rc == 0 and out.startswith("[PASS] dyadic")
    assert json.loads(rep.read_text())[0]["passed"] is True


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "nearcurve", "count", "--curve", "parabola", "--Q", "2",
                        "--delta", "0.3"], capture_output=True, text=True)
    assert r.returncode == 0 and r.stdout.splitlines()[1].startswith("parabola,full,2,0.3,2,")
    r = subprocess.run([sys.executable, "-m", "nearcurve", "bogus"], capture_output=True, text=True)
    assert r.returncode == 2
