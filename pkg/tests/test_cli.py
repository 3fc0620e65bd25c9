"""End-to-end checks of the command line front end.

A shared cache directory keeps the catalog builds to one per session; the
byte-identity tests rerun commands against the warm cache and compare
stdout verbatim.
"""

import json
import os

import pytest

from hierarchon.cli import SIZE_CEILING, _estimate_members, _verdict, main
from hierarchon.cyclo import CycloScalar
from hierarchon.exactmat import ExactMatrix, ScaledUnitary, to_interchange


@pytest.fixture(scope="module", autouse=True)
def cache_env(tmp_path_factory):
    cache = tmp_path_factory.mktemp("clicache")
    old = os.environ.get("HIERARCHON_CACHE")
    os.environ["HIERARCHON_CACHE"] = str(cache)
    yield str(cache)
    if old is None:
        del os.environ["HIERARCHON_CACHE"]
    else:
        os.environ["HIERARCHON_CACHE"] = old


@pytest.fixture(scope="module")
def t9_file(tmp_path_factory):
    z9 = CycloScalar.zeta(3, 2, 1)
    su = ScaledUnitary.exact(ExactMatrix.diag(3, [z9 ** 0, z9, z9 ** 2]))
    path = tmp_path_factory.mktemp("gates") / "t9.json"
    path.write_text(json.dumps(to_interchange(su, 1)))
    return str(path)


def run(capsys, argv):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_enumerate_matches_reference_table(capsys):
    code, out, _ = run(capsys, ["enumerate", "--d", "3", "--max-level", "3"])
    assert code == 0
    assert out.splitlines()[0].split() == ["level", "count", "reference", "verdict"]
    assert out.count("MATCH") == 3
    assert "MISMATCH" not in out


def test_enumerate_json_schema_is_pinned(capsys):
    code, out, _ = run(
        capsys, ["enumerate", "--d", "3", "--max-level", "2", "--format", "json"]
    )
    assert code == 0
    assert json.loads(out) == {
        "schema": "hierarchon.enumerate/1",
        "library": "0.1.0",
        "d": 3,
        "n": 1,
        "max_level": 2,
        "levels": [
            {"level": 1, "count": 9, "reference": 9, "verdict": "MATCH"},
            {"level": 2, "count": 216, "reference": 216, "verdict": "MATCH"},
        ],
        "closure_failures": 0,
    }


def test_enumerate_is_deterministic_across_reruns(capsys):
    argv = ["enumerate", "--d", "3", "--max-level", "3", "--format", "json"]
    _, first, _ = run(capsys, argv)
    _, second, _ = run(capsys, argv)
    assert first == second


def test_enumerate_jobs_do_not_change_the_bytes(capsys):
    one = ["enumerate", "--d", "3", "--max-level", "2", "--format", "json"]
    eight = one + ["--jobs", "8"]
    _, out1, _ = run(capsys, one)
    _, out8, _ = run(capsys, eight)
    assert out1 == out8


def test_enumerate_refuses_two_wire_levels(capsys):
    code, _, err = run(capsys, ["enumerate", "--d", "3", "--n", "2", "--max-level", "2"])
    assert code == 2
    assert "survey" in err


def test_enumerate_refuses_runaway_sizes(capsys):
    code, _, err = run(capsys, ["enumerate", "--d", "3", "--max-level", "8"])
    assert code == 2
    assert "ceiling" in err


def test_size_estimates_track_the_reference_table():
    assert _estimate_members(3, 1, 4) == 7128
    assert _estimate_members(3, 1, 7) == 69336 * 9
    assert _estimate_members(7, 1, 3) == 806736
    assert _estimate_members(7, 1, 4) <= SIZE_CEILING * 10
    assert _estimate_members(3, 2, 1) == 81


def test_verdict_column():
    assert _verdict(1944, 1944) == "MATCH"
    assert _verdict(75000, 7500) == "MISMATCH"
    assert _verdict(42, None) == "NEW"


def test_membership_places_the_ninth_root_diagonal(capsys, t9_file):
    code, out, _ = run(capsys, ["membership", t9_file, "--max-level", "4"])
    assert code == 0
    assert out.strip() == "level: 3"


def test_membership_json_reports_the_gate_hash(capsys, t9_file):
    code, out, _ = run(
        capsys, ["membership", t9_file, "--max-level", "3", "--format", "json"]
    )
    assert code == 0
    doc = json.loads(out)
    assert doc["schema"] == "hierarchon.membership/1"
    assert doc["level"] == 3
    assert doc["gate_hash"] == (
        "d8343ca4f09c8d26ecb19206a57fc5175ccae95df45d4564e6f10f2d4eaaa9d8"
    )


def test_membership_above_max_level_is_null_not_an_error(capsys, t9_file):
    code, out, _ = run(
        capsys, ["membership", t9_file, "--max-level", "2", "--format", "json"]
    )
    assert code == 0
    assert json.loads(out)["level"] is None


def test_membership_rejects_a_broken_gate_file(capsys, tmp_path, t9_file):
    doc = json.loads(open(t9_file).read())
    doc["entries"][0][0][0] = 5  # no longer unitary
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(doc))
    code, _, err = run(capsys, ["membership", str(bad)])
    assert code == 2
    assert "scale2" in err


def test_membership_rejects_a_missing_file(capsys):
    code, _, err = run(capsys, ["membership", "/nonexistent/gate.json"])
    assert code == 2
    assert "error" in err


def test_diagonal_verify(capsys):
    code, out, _ = run(capsys, ["diagonal", "verify", "--d", "3", "--k", "3"])
    assert code == 0
    assert "pass: 27 diagonal classes" in out


def test_diagonal_verify_json(capsys):
    code, out, _ = run(
        capsys, ["diagonal", "verify", "--d", "3", "--k", "2", "--format", "json"]
    )
    assert code == 0
    doc = json.loads(out)
    assert doc["schema"] == "hierarchon.diagonal/1"
    assert doc["verdict"] == "pass"
    assert doc["delta_count"] == 9
    assert doc["diagonal_in_catalog"] == 9
    assert doc["missing"] == [] and doc["extra"] == []


def test_semiclifford_gate_mode(capsys, t9_file):
    code, out, _ = run(capsys, ["semiclifford", t9_file, "--format", "json"])
    assert code == 0
    doc = json.loads(out)
    assert doc["schema"] == "hierarchon.semiclifford/1"
    assert doc["mode"] == "gate"
    assert doc["report"]["semi_clifford"] is True
    assert doc["report"]["witness"]["semibasis"] == [[[1], [0]]]


def test_semiclifford_catalog_mode(capsys):
    code, out, _ = run(
        capsys, ["semiclifford", "--catalog", "2", "--d", "3", "--format", "json"]
    )
    assert code == 0
    doc = json.loads(out)
    assert doc["mode"] == "catalog"
    assert doc["total"] == 216
    assert doc["semi_clifford"] == 216
    assert doc["counterexamples"] == []


def test_semiclifford_needs_exactly_one_input(capsys, t9_file):
    code, _, err = run(capsys, ["semiclifford"])
    assert code == 2
    code, _, err = run(capsys, ["semiclifford", t9_file, "--catalog", "2"])
    assert code == 2
    assert "not both" in err


def test_teleport_verify(capsys):
    code, out, _ = run(
        capsys,
        ["teleport", "verify", "--samples", "4", "--seed", "9", "--format", "json"],
    )
    assert code == 0
    doc = json.loads(out)
    assert doc["schema"] == "hierarchon.teleport/1"
    assert doc["seed"] == 9
    assert doc["branches_checked"] == 12
    assert doc["failures"] == []


def test_qutrit3_survey_quick(capsys):
    code, out, _ = run(
        capsys, ["qutrit3", "survey", "--stride", "5000", "--format", "json"]
    )
    assert code == 0
    doc = json.loads(out)
    assert doc["schema"] == "hierarchon.qutrit3/1"
    assert doc["total"] == doc["passed"] == 984
    assert doc["failed"] == 0


def test_out_flag_writes_the_same_document(capsys, tmp_path):
    path = tmp_path / "report.json"
    _, out, _ = run(
        capsys,
        ["qutrit3", "survey", "--stride", "5000", "--format", "json", "--out", str(path)],
    )
    assert json.loads(path.read_text()) == json.loads(out)


def test_cache_dir_flag_beats_the_environment(capsys, tmp_path):
    flag_cache = tmp_path / "flagcache"
    code, _, _ = run(
        capsys,
        ["enumerate", "--d", "3", "--max-level", "1", "--cache-dir", str(flag_cache)],
    )
    assert code == 0
    assert (flag_cache / "d3_n1").exists()


def test_usage_errors_exit_two(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["enumerate", "--d", "4"])
    assert exc.value.code == 2
    capsys.readouterr()
    with pytest.raises(SystemExit) as exc:
        main(["no-such-command"])
    assert exc.value.code == 2
    capsys.readouterr()
