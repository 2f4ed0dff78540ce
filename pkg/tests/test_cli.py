import json
import subprocess
import sys

import pytest

from anisolattice.asymptotics import records_from_csv
from anisolattice.cli import (EXIT_BUDGET, EXIT_FIT, EXIT_INPUT, ProblemSpec, bundled_problems, main,
                              verify_suite)
from anisolattice.counting import CountResult
from anisolattice.lattice import SubspaceData

RATIONAL = {"n": 2, "d": 0, "F_basis": [["1", "1/2"]]}
X_AXIS = {"n": 2, "d": 0, "F_basis": [["1", "0"]]}
DISK = {"type": "ball", "center": ["0", "0"], "radius_sq": "1"}


@pytest.fixture
def files(tmp_path):
    def write(name, obj):
        path = tmp_path / name
        path.write_text(obj if isinstance(obj, str) else json.dumps(obj))
        return str(path)
    return write


def run_cli(args, capsys):
    code = main(args)
    out, err = capsys.readouterr()
    return code, out, err


def test_lattice_report(files, capsys):
    code, out, _ = run_cli(["lattice", "--subspace", files("s.json", RATIONAL)], capsys)
    report = json.loads(out)
    assert code == 0 and report["schema_version"] == 1
    assert report["gamma"] == [[2, 1]] and report["covolume_sq"] == "5"
    assert SubspaceData.from_json(report).to_json() == report


def test_count_report_round_trips(files, capsys):
    code, out, _ = run_cli(["count", "--domain", files("d.json", DISK), "--subspace", files("s.json", X_AXIS),
                            "--eps", "1/2"], capsys)
    report = json.loads(out)
    assert code == 0 and report["results"][0]["total"] == 3
    for r in report["results"]:
        assert CountResult.from_json(r).to_json() == r


def test_spectral_command(files, capsys):
    code, out, _ = run_cli(["spectral", "--subspace", files("s.json", RATIONAL), "--A", "1/2,0",
                            "--eps", "1/8", "--mu", "5/2", "--report", "json"], capsys)
    report = json.loads(out)
    assert code == 0
    (row,) = report["results"]
    assert row["count"] == row["lattice_count"] == 64 and row["agree"]


def test_sweep_csv_is_deterministic(files, capsys, tmp_path):
    args = ["sweep", "--domain", files("d.json", DISK), "--subspace", files("s.json", RATIONAL),
            "--eps-grid", "1/2,1/4,1/8,1/16"]
    outputs = []
    for i in range(2):
        path = tmp_path / f"out{i}.csv"
        assert main(args + ["--out", str(path), "--seed", "5"]) == 0
        outputs.append(path.read_bytes())
    assert outputs[0] == outputs[1]
    assert len(records_from_csv(outputs[0].decode())) == 4
    code, out, _ = run_cli(["fit", "--csv", str(tmp_path / "out0.csv")], capsys)
    assert code == 0 and json.loads(out)["n_points"] >= 3


def test_oracle_sweep_is_deterministic_with_seed(files, tmp_path):
    spec = {"mode": "sweep", "subspace": RATIONAL, "eps_grid": ["1/2", "1/4"], "seed": 11, "samples": 20000,
            "domain": {"type": "superellipsoid", "center": ["0", "0"], "radii": ["1", "1"], "power": 4}}
    path = files("p.json", spec)
    texts = []
    for i in range(2):
        out = tmp_path / f"o{i}.csv"
        assert main(["run", path, "--out", str(out)]) == 0
        texts.append(out.read_bytes())
    assert texts[0] == texts[1]


def test_malformed_json_exits_2(files, capsys):
    with pytest.raises(SystemExit) as info:
        main(["run", files("bad.json", "{not json")])
    assert info.value.code == EXIT_INPUT
    err = json.loads(capsys.readouterr().err)
    assert err["error"] == "input" and err["schema_version"] == 1


@pytest.mark.parametrize("spec", [
    {"mode": "count", "subspace": X_AXIS, "domain": DISK, "eps_grid": [0.5]},
    {"mode": "count", "subspace": X_AXIS, "domain": DISK, "eps_grid": ["1/4", "1/2"]},
    {"mode": "dance", "subspace": X_AXIS, "domain": DISK, "eps_grid": ["1/2"]},
    {"mode": "count", "subspace": {"n": 2, "F_basis": [["1", "0", "0"]]}, "domain": DISK, "eps_grid": ["1/2"]},
    {"mode": "count", "subspace": X_AXIS, "domain": {"type": "blob"}, "eps_grid": ["1/2"]},
    [1, 2, 3],
])
def test_invalid_specs_exit_2(spec, files, capsys):
    with pytest.raises(SystemExit) as info:
        main(["run", files("p.json", spec)])
    assert info.value.code == EXIT_INPUT
    assert "error" in json.loads(capsys.readouterr().err)


def test_usage_error_is_json(capsys):
    with pytest.raises(SystemExit) as info:
        main(["count", "--eps", "1/2"])
    assert info.value.code == EXIT_INPUT
    assert json.loads(capsys.readouterr().err)["error"] == "usage"


def test_budget_exit_code(files, capsys):
    with pytest.raises(SystemExit) as info:
        main(["count", "--domain", files("d.json", DISK), "--subspace", files("s.json", X_AXIS),
              "--eps", "1/5000", "--budget", "100"])
    assert info.value.code == EXIT_BUDGET
    assert json.loads(capsys.readouterr().err)["error"] == "budget_exceeded"


def test_degenerate_fit_exit_code(files, capsys):
    spec = {"mode": "fit", "subspace": X_AXIS, "domain": DISK, "eps_grid": ["1/2"]}
    with pytest.raises(SystemExit) as info:
        main(["run", files("p.json", spec)])
    assert info.value.code == EXIT_FIT


@pytest.mark.parametrize("name", ["example_rational_line", "example_irrational_line", "gauss_disk"])
def test_bundled_verify_specs_pass(name):
    problems = dict(bundled_problems())
    report = verify_suite(ProblemSpec.from_json(problems[name]))
    assert report["all_passed"], [c for c in report["checks"] if not c["passed"]]
    names = {c["name"].split()[0] for c in report["checks"]}
    assert {"saturation", "duality", "inclusion", "volume", "fiber_sum", "spectral_equivalence"} <= names
    if name == "example_rational_line":
        assert report["subspace"]["gamma"] == [[2, 1]] and report["subspace"]["covolume_sq"] == "5"
    if name == "example_irrational_line":
        assert report["subspace"]["r"] == 0
    if name == "gauss_disk":
        assert "gauss_equivalence" in names


def test_verify_reports_failures_as_content():
    spec = ProblemSpec.from_json({"mode": "verify", "subspace": X_AXIS, "domain": DISK,
                                  "eps_grid": ["1/100000"], "budget": 10})
    report = verify_suite(spec)
    assert not report["all_passed"]


def test_problem_spec_round_trip():
    for _, obj in bundled_problems():
        spec = ProblemSpec.from_json(obj)
        assert ProblemSpec.from_json(spec.to_json()) == spec


def test_console_entry_point(tmp_path):
    out = subprocess.run([sys.executable, "-m", "anisolattice", "reproduce", "--out-dir", str(tmp_path)],
                         capture_output=True, text=True)
    assert out.returncode == 0, out.stderr
    summary = json.loads(out.stdout)
    assert len(summary["problems"]) == len(bundled_problems())
    assert (tmp_path / "remainder_rational_line.csv").exists()
