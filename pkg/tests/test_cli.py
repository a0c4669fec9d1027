import subprocess
import sys

import numpy as np
import pytest

from zetamoments import cli


def run(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_symcheck(capsys):
    code, out, _ = run(["symcheck", "--count", "50"], capsys)
    assert code == 0
    assert out.count("PASS") == 2


def test_cue_orders(capsys):
    code, out, _ = run(["cue", "--matrix-size", "6", "--orders", "1", "--samples", "5000"], capsys)
    assert code == 0
    assert "within 3 sigma: yes" in out


def test_cue_shifts_n1(capsys):
    code, out, _ = run(["cue", "--matrix-size", "1", "--shifts", "0.3", "--samples", "200"], capsys)
    assert code == 0


def test_argparse_errors():
    with pytest.raises(SystemExit) as e:
        cli.main(["cue", "--matrix-size", "4"])
    assert e.value.code == 2
    with pytest.raises(SystemExit) as e:
        cli.main(["cue", "--matrix-size", "4", "--shifts", "0.1", "--samples", "10"])
    assert e.value.code == 2


def test_derive_second_moment(capsys, tmp_path):
    out_csv = tmp_path / "d.csv"
    code, out, _ = run(["derive", "--orders", "1,1", "--out", str(out_csv)], capsys)
    assert code == 0
    assert "2.12486" in out or "2.12487" in out
    rows = out_csv.read_text().splitlines()
    assert rows[0].startswith("# schema v1")
    assert rows[1] == "power,integrand,integrated"
    assert len(rows) == 2 + 4


def test_derive_bad_orders(capsys):
    code, _, _ = run(["derive", "--orders", "7"], capsys)
    assert code == 3
    code, _, _ = run(["derive", "--orders", "0,1"], capsys)
    assert code == 3


def test_zeros_cache_and_sum(capsys, tmp_path):
    cache = tmp_path / "z.txt"
    code, _, _ = run(["zeros", "--count", "60", "--cache", str(cache)], capsys)
    assert code == 0 and cache.exists()
    code, out, _ = run(["zeros", "--count", "40", "--cache", str(cache)], capsys)
    assert code == 0 and "cache hit" in out
    out_csv = tmp_path / "s.csv"
    code, _, _ = run(["sum", "--orders", "1", "--cache", str(cache), "--out", str(out_csv)], capsys)
    assert code == 0
    data = np.loadtxt(out_csv, delimiter=",", skiprows=2)
    assert data.shape == (60, 3)
    assert data[0, 1] == pytest.approx(0.7832965118668823, abs=1e-9)


def test_compare_writes_plot_script(capsys, tmp_path):
    cache = tmp_path / "z.txt"
    run(["zeros", "--count", "50", "--cache", str(cache)], capsys)
    out_csv = tmp_path / "c.csv"
    code, _, err = run(["compare", "--orders", "1", "--cache", str(cache), "--out", str(out_csv)], capsys)
    assert code == 0
    header = out_csv.read_text().splitlines()[1]
    assert header == "T,re_sum,im_sum,prediction,residual_leading,residual_full"
    assert (tmp_path / "c_plot.py").exists()
    assert "max|res_full|" in err


def test_missing_cache(capsys, tmp_path):
    code, _, _ = run(["sum", "--orders", "1", "--cache", str(tmp_path / "none.txt")], capsys)
    assert code == 5
    code, _, _ = run(["compare", "--orders", "1", "--cache", str(tmp_path / "none.txt")], capsys)
    assert code == 5


def test_malformed_import(capsys, tmp_path):
    bad = tmp_path / "bad.txt"
    bad.write_text("1 14.13\n2 oops\n")
    code, _, err = run(["zeros", "--count", "2", "--cache", str(tmp_path / "z.txt"), "--import", str(bad)], capsys)
    assert code == 4


def test_import_integrity_report(capsys, tmp_path):
    good = tmp_path / "third.txt"
    # second ordinate is off by far more than the zero tolerance
    good.write_text("1 14.134725141734693\n2 21.5\n")
    code, out, err = run(["zeros", "--count", "2", "--cache", str(tmp_path / "z.txt"), "--import", str(good)], capsys)
    assert code == 6


def test_console_script_entry():
    r = subprocess.run([sys.executable, "-m", "zetamoments.cli", "--help"], capture_output=True, text=True)
    assert r.returncode == 0
    assert "derive" in r.stdout


def test_emitted_plot_script_runs(capsys, tmp_path):
    pytest.importorskip("matplotlib")
    cache = tmp_path / "z.txt"
    run(["zeros", "--count", "40", "--cache", str(cache)], capsys)
    run(["compare", "--orders", "1", "--cache", str(cache), "--out", str(tmp_path / "c.csv")], capsys)
    r = subprocess.run(
        [sys.executable, "c_plot.py"], cwd=tmp_path, capture_output=True, text=True, env={"MPLBACKEND": "Agg", "PATH": ""}
    )
    assert r.returncode == 0, r.stderr
    assert (tmp_path / "c.png").exists()
