import csv
import io
import json
import subprocess
import sys

import pytest

from rosette import potential as pc
from rosette.cli import main, render_csv


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_roots_csv(capsys):
    code, out, err = run(capsys, "roots", "--n", "3", "--epsilon", "1", "--mu", "0.003")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [r["interval_tag"] for r in rows] == ["below_one", "at_one", "above_one"]
    for r in rows:
        assert float(r["oracle_residual"]) < 1e-10
    assert "3 configuration(s)" in err
    assert "\r" not in out


def test_roots_json_matches_csv(capsys):
    args = ["roots", "--n", "5", "--epsilon", "0.3", "--mu", "0.001"]
    _, out_csv, _ = run(capsys, *args)
    _, out_json, _ = run(capsys, *args, "--format", "json")
    from_csv = [float(r["x"]) for r in csv.DictReader(io.StringIO(out_csv))]
    from_json = [r["x"] for r in json.loads(out_json)]
    assert from_csv == from_json and len(from_csv) == 3


def test_float_round_trip():
    values = [0.1, 1 / 3, 2.0**-40, 6.02e23]
    text = render_csv(["v"], [[v] for v in values])
    back = [float(r["v"]) for r in csv.DictReader(io.StringIO(text))]
    assert back == values


def test_usage_errors(capsys):
    assert run(capsys, "roots", "--n", "3", "--epsilon", "-1", "--mu", "1")[0] == 2
    assert run(capsys, "roots", "--n", "1", "--epsilon", "1", "--mu", "1")[0] == 2
    assert run(capsys, "fold", "--n", "2", "--epsilon", "0.5")[0] == 2
    assert run(capsys, "fold", "--n", "4", "--epsilon-grid", "bad")[0] == 2
    with pytest.raises(SystemExit) as info:
        main(["roots", "--n", "3"])
    assert info.value.code == 2


def test_io_error(capsys, tmp_path):
    target = tmp_path / "missing" / "out.csv"
    assert run(capsys, "figure", "fig3", "-o", str(target))[0] == 3


def test_output_file(capsys, tmp_path):
    target = tmp_path / "fig3.csv"
    assert run(capsys, "figure", "fig3", "-o", str(target))[0] == 0
    rows = list(csv.DictReader(target.open()))
    assert len(rows) == 459
    assert all(float(r["h3"]) > 0 for r in rows)


def test_fold_single_and_grid(capsys):
    code, out, _ = run(capsys, "fold", "--n", "4", "--epsilon", "1")
    assert code == 0
    (row,) = list(csv.DictReader(io.StringIO(out)))
    assert abs(float(row["mu0"]) - pc.critical_center_mass(4)) < 1e-8
    code, out, _ = run(capsys, "fold", "--n", "4", "--epsilon-grid", "0.1:1:5", "--format", "json")
    recs = json.loads(out)
    assert code == 0 and len(recs) == 5
    assert all(r["status"] == "fold" for r in recs)


def test_fig2(capsys):
    code, out, _ = run(capsys, "figure", "fig2")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and len(rows) == 103
    assert [int(r["n"]) for r in rows] == list(range(4, 107))
    assert all(float(r["h0_at_root"]) > 0 for r in rows)


def test_fig4b(capsys):
    code, out, _ = run(capsys, "figure", "fig4b")
    rows = list(csv.DictReader(io.StringIO(out)))
    eps = [float(r["epsilon"]) for r in rows]
    assert code == 0 and len(rows) == 200
    assert eps[0] == pytest.approx(1e-5) and eps[-1] == pytest.approx(2e-3)
    # the lower sign change sits near 0.028, so h_max stays positive on this window
    assert all(float(r["hmax"]) > 0 for r in rows)


@pytest.mark.parametrize("suite", ["n2", "n3", "theorem2"])
def test_verify_suites(capsys, suite):
    code, out, err = run(capsys, "verify", "--suite", suite)
    reports = json.loads(out)
    assert code == 0
    assert all(r["pass"] for r in reports)
    assert err.count("PASS") == len(reports)


def test_verify_n3_details(capsys):
    _, out, _ = run(capsys, "verify", "--suite", "n3", "--format", "csv")
    ids = [r["lemma_id"] for r in csv.DictReader(io.StringIO(out))]
    assert ids == ["n3_thresholds", "n3_monotone"]


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "rosette", "roots", "--n", "2", "--epsilon", "0.5", "--mu", "1"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert len(proc.stdout.strip().splitlines()) == 2
