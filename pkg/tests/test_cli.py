"""Golden-file tests for the command line.

Each case runs ``python -m simpkan`` twice in a scratch directory holding
deterministic inputs; both runs must produce identical bytes, matching the
stored golden file and exit code. Set SIMPKAN_UPDATE_GOLDEN=1 to rewrite the
golden files after an intended output change.
"""

import json

import pytest

from cli_cases import CASES, GOLDEN, UPDATE, run_cli, write_inputs
from simpkan.cli import main


@pytest.fixture(scope="module")
def workdir(tmp_path_factory):
    return write_inputs(tmp_path_factory.mktemp("cli"))


@pytest.mark.parametrize("name,args,code", CASES, ids=[c[0] for c in CASES])
def test_golden(workdir, name, args, code):
    first = run_cli(args, workdir)
    second = run_cli(args, workdir)
    assert first == second, "output is not byte-stable across runs"
    rc, out = first
    assert rc == code, out.decode()
    status = json.loads(out)["status"]
    assert status == {0: "ok", 1: "check_failed", 2: "input_error"}[code]
    path = GOLDEN / f"{name}.json"
    if UPDATE or not path.exists():
        if not UPDATE:
            pytest.fail(f"missing golden file {path.name}; rerun with SIMPKAN_UPDATE_GOLDEN=1")
        path.write_bytes(out)
    assert out == path.read_bytes()


def test_enough_golden_commands():
    assert len(CASES) >= 15
    assert {c for _, _, c in CASES} == {0, 1, 2}


def test_output_flag_writes_file(workdir, capsys):
    out = workdir / "written.json"
    assert main(["gen", "example51", "--level", "2", "--output", str(out)]) == 0
    assert capsys.readouterr().out == ""
    assert json.loads(out.read_text())["result"]["schema"] == "affine/1"
    # the top-level spelling works as well
    assert main(["--output", str(out), "gen", "example51", "--level", "2"]) == 0


def test_pipeline_gen_then_validate(workdir):
    rc, out = run_cli(["gen", "dk", "--chain", "chain12.json", "--level", "2"], workdir)
    assert rc == 0
    (workdir / "piped.json").write_bytes(out)
    rc, out = run_cli(["validate", "--input", "piped.json"], workdir)
    assert rc == 0
    rc, out = run_cli(["kan", "--all", "--input", "piped.json"], workdir)
    rows = json.loads(out)["result"]["conditions"]
    assert rc == 0
    assert [(r["n"], r["i"]) for r in rows if r["kind"] == "kan"] == [(1, 0), (1, 1), (2, 0), (2, 1), (2, 2)]
    assert all(r["holds"] for r in rows)


def test_example_profile_payload(workdir):
    rc, out = run_cli(["horn-profile", "--input", "lines.json", "--n", "2", "--removed", "1"], workdir)
    payload = json.loads(out)["result"]
    assert rc == 1
    assert payload["manifold_flag"] is False
    assert payload["dims_present"] == [1, 2]
