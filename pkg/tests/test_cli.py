import csv
import json

import pytest
from click.testing import CliRunner

from fewcrn.cli import main
from fewcrn.reports import AnalysisReport, FindMultiReport

NET = "src/fewcrn/networks"
INTRO = ["--param", "l=1", "--param", "k1=33602", "--param", "k2=15447",
         "--param", "k3=35984", "--param", "k4=8034"]


@pytest.fixture
def run():
    runner = CliRunner()

    def _run(*args):
        return runner.invoke(main, list(args), catch_exceptions=False)

    return _run


def test_analyze_intro(run):
    r = run("analyze", f"{NET}/intro.crn", *INTRO)
    assert r.exit_code == 0
    assert "exact_count: 2" in r.output


def test_analyze_json_round_trip(run, tmp_path):
    out = tmp_path / "r.json"
    r = run("analyze", f"{NET}/intro.crn", *INTRO, "--json", str(out))
    assert r.exit_code == 0
    text = out.read_text()
    report = AnalysisReport.model_validate_json(text)
    assert AnalysisReport.model_validate_json(report.model_dump_json(indent=2)) == report
    assert report.classification.exact_count == len(report.roots) == 2
    # exact values travel as p/q strings
    data = json.loads(text)
    assert all("/" in v and "." not in v for v in data["normalized"]["k"])


def test_analyze_is_byte_stable(run):
    one = run("analyze", f"{NET}/intro.crn", *INTRO, "--json", "-").output
    two = run("analyze", f"{NET}/intro.crn", *INTRO, "--json", "-").output
    assert one == two


def test_malformed_file_exits_two(run, tmp_path):
    bad = tmp_path / "bad.crn"
    bad.write_text("0 -> X1 @ k\nX1 -> @ k\n")
    r = run("analyze", str(bad))
    assert r.exit_code == 2
    assert "line 2" in r.output


def test_unbound_rate_exits_two(run):
    r = run("count", f"{NET}/intro.crn")
    assert r.exit_code == 2 and "--param" in r.output


def test_tangency_exits_one(run, tmp_path):
    f = tmp_path / "tangent.crn"
    f.write_text("X1 + X2 -> 2 X1 + 2 X2 @ 1\n0 <-> X1 @ 1, 2\n0 <-> X2 @ 1, 2\n")
    r = run("analyze", str(f))
    assert r.exit_code == 1
    assert "Degenerate" in r.output


def test_count(run):
    r = run("count", f"{NET}/symmetric.crn")
    assert r.exit_code == 0 and r.output.startswith("3 ")


def test_stability_command(run):
    assert run("stability", f"{NET}/symmetric.crn", "--at", "2,2").output.startswith("Unstable")
    r = run("stability", f"{NET}/symmetric.crn", "--at", "1,2")
    assert r.exit_code == 2


def test_simulate_csv(run, tmp_path):
    out = tmp_path / "traj.csv"
    r = run("simulate", f"{NET}/symmetric.crn", "--x0", "1.9,1.9", "--t-end", "1", "--dt", "0.01",
            "--csv", str(out))
    assert r.exit_code == 0
    rows = list(csv.reader(out.open()))
    assert rows[0] == ["t", "X1", "X2"] and len(rows) == 102


def test_find_multi_is_deterministic(run):
    args = ("find-multi", f"{NET}/mixed4.crn", "--target", "3", "--samples", "40", "--seed", "5",
            "--json", "-")
    one = FindMultiReport.model_validate_json(run(*args).output)
    two = FindMultiReport.model_validate_json(run(*args).output)
    assert one == two and one.reachable and one.witnesses


def test_find_multi_replays_through_analyze(run):
    rep = FindMultiReport.model_validate_json(run(
        "find-multi", f"{NET}/mixed4.crn", "--target", "3", "--strategy", "constructive",
        "--json", "-").output)
    (w,) = rep.witnesses
    params = [x for k, v in w.params.items() for x in ("--param", f"{k}={v}")]
    r = run("count", f"{NET}/mixed4.crn", *params)
    assert r.output.startswith("3 ")


def test_find_multi_unreachable_target(run, tmp_path):
    f = tmp_path / "one.crn"
    f.write_text("X1 + X2 -> 2 X1 @ l\n0 <-> X1 @ k1, c1\n0 <-> X2 @ k2, c2\n")
    rep = FindMultiReport.model_validate_json(run(
        "find-multi", str(f), "--target", "3", "--samples", "5", "--json", "-").output)
    assert not rep.reachable and rep.witnesses == [] and "a_plus" in rep.reason


def test_repro_unknown_id_lists_valid_ids(run):
    r = run("repro", "nope")
    assert r.exit_code == 2 and "intro" in r.output and "ex3.7b" in r.output


def test_repro_intro_passes(run):
    r = run("repro", "intro")
    assert r.exit_code == 0 and r.output.startswith("intro: PASS")


def test_plot_data(run):
    r = run("plot-data", f"{NET}/mixed4.crn", "--param", "l=1", "--param", "k1=4",
            "--param", "k2=2", "--param", "k3=6", "--param", "k4=7", "--param", "c1=2",
            "--param", "c2=2", "--param", "c3=2", "--param", "c4=2", "--points", "5")
    lines = r.output.strip().splitlines()
    assert r.exit_code == 0 and len(lines) == 6


def test_bad_param_exits_two(run):
    r = run("count", f"{NET}/intro.crn", "--param", "l")
    assert r.exit_code == 2
