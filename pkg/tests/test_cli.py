import json
import math

import pytest

from stealthtour.cli import evaluate_tour, main
from stealthtour.scenario import ScenarioError, save_scenario

SMALL_RUN = [
    "--instance", "cross", "--instance-seed", "1",
    "--seed", "3", "--population", "16", "--generations", "4",
]


def run_solve(out_dir, extra=()):
    rc = main(["solve", *SMALL_RUN, "--out-dir", str(out_dir), *extra])
    assert rc == 0
    return (out_dir / "front.csv").read_bytes(), (out_dir / "report.json").read_bytes()


def test_solve_outputs_and_reproducibility(tmp_path):
    csv_a, rep_a = run_solve(tmp_path / "a")
    csv_b, rep_b = run_solve(tmp_path / "b")
    assert csv_a.splitlines()[0] == b"reward,exposure,length"
    assert len(csv_a.splitlines()) >= 2
    assert csv_a == csv_b
    # report differs only in timing
    da, db = json.loads(rep_a), json.loads(rep_b)
    da.pop("duration_seconds"), db.pop("duration_seconds")
    assert da == db


def test_solve_threads_do_not_change_front(tmp_path):
    csv_a, _ = run_solve(tmp_path / "a")
    csv_b, _ = run_solve(tmp_path / "b", extra=["--threads", "2"])
    assert csv_a == csv_b


def test_solve_zero_generations(tmp_path):
    rc = main(["solve", *SMALL_RUN[:6], "--population", "8", "--generations", "0",
               "--out-dir", str(tmp_path)])
    assert rc == 0
    report = json.loads((tmp_path / "report.json").read_text())
    assert len(report["generations"]) == 1
    assert report["budget_violations"] == 0


def test_solve_infeasible_budget_exits_one(tmp_path, capsys):
    rc = main(["solve", *SMALL_RUN, "--t-max", "0.5", "--out-dir", str(tmp_path)])
    assert rc == 1
    assert "infeasible" in capsys.readouterr().err


def test_evaluate_round_trips_report(tmp_path, capsys):
    _, rep = run_solve(tmp_path)
    report = json.loads(rep)
    rc = main(["evaluate", "--instance", "cross", "--instance-seed", "1",
               "--report", str(tmp_path / "report.json"), "--index", "0"])
    out = capsys.readouterr().out
    assert rc == 0
    assert "verdict FEASIBLE" in out
    values = {}
    for line in out.splitlines():
        key, _, val = line.partition(" ")
        if key in ("reward", "exposure", "length"):
            values[key] = float(val)
    stored = report["front"][0]
    for key in ("reward", "exposure", "length"):
        assert values[key] == pytest.approx(stored[key], abs=1e-9)


def test_evaluate_tour_file_and_infeasible(tmp_path, cross, capsys):
    sc_file = tmp_path / "sc.json"
    sc_file.write_text(save_scenario(cross))
    start, goal = cross.locations[0], cross.locations[-1]
    tour = {"ids": [start.id, goal.id], "headings": [0.0, 0.0], "radii": [1.0]}
    tour_file = tmp_path / "tour.json"
    tour_file.write_text(json.dumps(tour))

    rc = main(["evaluate", "--scenario", str(sc_file), "--tour", str(tour_file)])
    assert rc == 0
    assert "verdict FEASIBLE" in capsys.readouterr().out

    rc = main(["evaluate", "--scenario", str(sc_file), "--t-max", "1.0",
               "--tour", str(tour_file)])
    assert rc == 1
    assert "verdict INFEASIBLE" in capsys.readouterr().out


def test_evaluate_unknown_id_errors(tmp_path, cross, capsys):
    sc_file = tmp_path / "sc.json"
    sc_file.write_text(save_scenario(cross))
    tour_file = tmp_path / "tour.json"
    tour_file.write_text(json.dumps({"ids": [0, 9999], "headings": [0.0, 0.0],
                                     "radii": [1.0]}))
    rc = main(["evaluate", "--scenario", str(sc_file), "--tour", str(tour_file)])
    assert rc == 1
    assert "error" in capsys.readouterr().err


def test_evaluate_tour_validation(cross):
    start, goal = cross.locations[0], cross.locations[-1]
    with pytest.raises(ScenarioError, match="heading"):
        evaluate_tour(cross, [start.id, goal.id], [0.0, 7.0], [1.0], 0.05)
    with pytest.raises(ScenarioError, match="radius"):
        evaluate_tour(cross, [start.id, goal.id], [0.0, 0.0], [1.0, 1.0], 0.05)
    with pytest.raises(ScenarioError):
        evaluate_tour(cross, [start.id], [0.0], [], 0.05)


def test_plot_command_deterministic(tmp_path):
    run_solve(tmp_path)
    report = tmp_path / "report.json"
    rc = main(["plot", "--report", str(report), "--index", "0",
               "--out", str(tmp_path / "p1.svg")])
    assert rc == 0
    rc = main(["plot", "--report", str(report), "--index", "0",
               "--out", str(tmp_path / "p2.svg")])
    assert rc == 0
    svg = (tmp_path / "p1.svg").read_bytes()
    assert svg == (tmp_path / "p2.svg").read_bytes()
    assert svg.startswith(b"<svg")


def test_plot_index_out_of_range(tmp_path, capsys):
    run_solve(tmp_path)
    rc = main(["plot", "--report", str(tmp_path / "report.json"),
               "--index", "999", "--out", str(tmp_path / "p.svg")])
    assert rc == 1
    assert "out of range" in capsys.readouterr().err


def test_plot_straight_tour_chord_length(tmp_path, capsys):
    # start-goal only tour in an empty field: plotted polyline should be
    # a straight segment whose chord length matches the reported length
    scenario = {
        "name": "straight",
        "t_max": 50.0,
        "rho_min": 1.0,
        "rho_max": 1.0,
        "closed": False,
        "sensing": {"alpha": 50.0, "mu": 2.0, "cap": 30.0},
        "sensors": [],
        "locations": [
            {"id": 0, "x": 0.0, "y": 0.0, "reward": 0.0},
            {"id": 1, "x": 20.0, "y": 0.0, "reward": 0.0},
        ],
        "start_id": 0,
        "goal_id": 1,
        "fixed_headings": {"0": 0.0, "1": 0.0},
    }
    sc_file = tmp_path / "sc.json"
    sc_file.write_text(json.dumps(scenario))
    rc = main(["solve", "--scenario", str(sc_file), "--seed", "1",
               "--population", "8", "--generations", "0",
               "--out-dir", str(tmp_path), "--plot", "0"])
    assert rc == 0
    svg = (tmp_path / "plot_0.svg").read_text()
    start = svg.index('points="', svg.index("polyline")) + len('points="')
    pts = svg[start:svg.index('"', start)].split()
    coords = [tuple(map(float, p.split(","))) for p in pts]
    chord = sum(math.hypot(b[0] - a[0], b[1] - a[1])
                for a, b in zip(coords, coords[1:]))
    report = json.loads((tmp_path / "report.json").read_text())
    length = report["front"][0]["length"]
    assert length == pytest.approx(20.0, abs=1e-9)
    # the svg canvas spans the 20 m tour plus a 2 m margin each side
    scale = 640.0 / 24.0
    assert abs(chord - scale * length) / (scale * length) < 1e-3
    # every vertex lies on one straight line in svg space
    y0 = coords[0][1]
    assert all(abs(y - y0) < 1e-6 for _, y in coords)


def test_oracle_checks_all_pass(capsys):
    rc = main(["oracle", "--check", "exposure-arctan"])
    assert rc == 0
    assert capsys.readouterr().out.startswith("PASS")
    rc = main(["oracle", "--check", "dominance", "--n", "100"])
    assert rc == 0
    rc = main(["oracle", "--check", "dubins-endpoint", "--n", "200"])
    assert rc == 0


def test_bad_arguments_exit_two():
    with pytest.raises(SystemExit) as exc:
        main(["solve"])  # missing scenario source
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["nonsense"])
    assert exc.value.code == 2
