import json
import subprocess
import sys

import pytest

from metallic import builtin
from metallic.cli import EXIT_ERROR, EXIT_FAIL, EXIT_OK, RunConfig, list_examples, main, run
from metallic.manifold import CheckReport

REPORT_KEYS = {"check_id", "manifold_id", "sample_count", "max_abs_err", "pass", "tolerance"}


def _write(tmp_path, name, data):
    path = tmp_path / name
    path.write_text(json.dumps(data) if not isinstance(data, str) else data)
    return str(path)


def _asymmetric(tmp_path):
    data = dict(builtin.MANIFESTS["E1"], name="bent", J=[["1", "2"], ["-1", "1"]])
    return _write(tmp_path, "bent.json", data)


def test_all_examples_pass(capsys):
    assert main(["run", "--example", "all", "--samples", "50"]) == EXIT_OK
    out, err = capsys.readouterr()
    lines = out.splitlines()
    assert lines and all(line.startswith("CHECK ") and line.endswith("[PASS]") for line in lines)
    assert {line.split()[2] for line in lines} == {"E1", "E2", "E3", "E4"}
    assert "checks passed" in err


def test_asymmetric_structure_fails(tmp_path, capsys):
    assert main(["run", "--input", _asymmetric(tmp_path), "--suite", "core"]) == EXIT_FAIL
    out, _ = capsys.readouterr()
    failing = [line for line in out.splitlines() if line.endswith("[FAIL]")]
    assert any(line.startswith("CHECK core.g_symmetric bent ") for line in failing)


@pytest.mark.parametrize("argv", [
    ["run", "--input", "/nonexistent/manifest.json"],
    ["run", "--example", "E9"],
    ["run", "--example", "E1", "--suite", "spin"],
    ["run", "--example", "E1", "--samples", "0"],
    ["run", "--example", "E1", "--tol", "-1"],
    ["run"],
    ["frobnicate"],
])
def test_usage_and_load_errors(argv, capsys):
    assert main(argv) == EXIT_ERROR


@pytest.mark.parametrize("content", [
    "{broken",
    json.dumps(dict(builtin.MANIFESTS["E1"], g=[["1", "0"], ["0", "y +"]])),
    json.dumps(dict(builtin.MANIFESTS["E1"], g=[["x", "0"], ["0", "x"]],
                    domain=[[0, 0], [-1, 1]])),
    json.dumps(dict(builtin.MANIFESTS["E1"], J=[["1", "1", "1"], ["-1", "1", "1"]])),
])
def test_bad_manifests_exit_two(tmp_path, content, capsys):
    assert main(["run", "--input", _write(tmp_path, "m.json", content)]) == EXIT_ERROR
    assert "error:" in capsys.readouterr().err


def test_json_report_round_trip(tmp_path, capsys):
    out_file = tmp_path / "report.json"
    status = main(["run", "--example", "E2", "--samples", "20", "--format", "json",
                   "--out", str(out_file)])
    assert status == EXIT_OK
    assert capsys.readouterr().out == ""
    rows = json.loads(out_file.read_text())
    assert rows
    for row in rows:
        assert set(row) == REPORT_KEYS | {"wall_time"}
        rep = CheckReport.from_dict(row)
        back = rep.to_dict()
        assert all(back[k] == row[k] for k in REPORT_KEYS)
        assert rep.passed == (rep.max_abs_err <= rep.tolerance)


def test_reports_sorted_by_check_id(capsys):
    main(["run", "--example", "E4", "--example", "E1", "--samples", "10"])
    ids = [tuple(line.split()[1:3]) for line in capsys.readouterr().out.splitlines()]
    assert ids == sorted(ids)


def test_same_seed_gives_identical_json(capsys):
    argv = ["run", "--example", "all", "--samples", "30", "--seed", "7", "--format", "json",
            "--no-timing"]
    main(argv)
    first = capsys.readouterr().out
    main(argv)
    assert capsys.readouterr().out == first
    assert "wall_time" not in first


def test_seed_changes_sample(capsys):
    base = ["run", "--example", "E2", "--suite", "connections", "--samples", "5", "--format", "json",
            "--no-timing"]
    main(base + ["--seed", "1"])
    a = capsys.readouterr().out
    main(base + ["--seed", "2"])
    assert a != capsys.readouterr().out


def test_tight_checks_keep_their_tolerance(capsys):
    main(["run", "--example", "E1", "--suite", "generalized", "--tol", "1e-3", "--format", "json"])
    rows = json.loads(capsys.readouterr().out)
    tol = {r["check_id"]: r["tolerance"] for r in rows}
    assert tol["generalized.hat_J"] == 1e-12
    assert tol["generalized.dhat_J"] == 1e-3


def test_skips_are_reported(capsys):
    main(["run", "--example", "E2", "--suite", "core"])
    assert "SKIP core.norden_* E2" in capsys.readouterr().err


def test_run_with_config_object():
    import io
    out, err = io.StringIO(), io.StringIO()
    status = run(RunConfig(inputs=["E3"], suites=["lifts"], samples=10), out, err)
    assert status == EXIT_OK
    assert "lifts.tangent.integrable" in out.getvalue()


def test_list_examples(capsys):
    assert main(["list"]) == EXIT_OK
    text = capsys.readouterr().out
    assert text == list_examples()
    blocks = dict(zip(["E1", "E2", "E3", "E4"], text.split("\n    ")[1:]))
    assert "integrable=yes locally_metallic=yes nearly_locally_metallic=yes flat=yes" in blocks["E1"]
    rows = {r["id"]: r["flags"] for r in json.loads(list_examples("json"))}
    assert rows["E4"]["flat"] is False
    assert rows["E1"] == {"integrable": True, "locally_metallic": True,
                          "nearly_locally_metallic": True, "flat": True}


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "metallic", "run", "--example", "E1",
                           "--suite", "core", "--samples", "5"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert "CHECK core.polynomial E1" in proc.stdout
