"""Tests for the oc-witness command line (main() driven in-process)."""

import io
import json
import math
from pathlib import Path

import pytest

from oc_witness import config
from oc_witness.case_studies import make_rac_fragment
from oc_witness.cli import main
from oc_witness.serialization import codec, documents


def _run(capsys, *argv: str):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def _write_part(tmp_path, name: str, part: str, *extra: str) -> str:
    path = tmp_path / f"{name}-{part}.json"
    assert main(["casestudy", name, "--part", part, "--out", str(path), *extra]) == 0
    return str(path)


def test_casestudy_bundle_to_stdout(capsys) -> None:
    code, out, _ = _run(capsys, "casestudy", "rac")
    assert code == 0
    doc = json.loads(out)
    assert doc["kind"] == "casestudy"
    assert set(doc["protocols"]) == {"optimal", "toy"}


def test_casestudy_unknown_part_fails(capsys) -> None:
    code, _, err = _run(capsys, "casestudy", "chsh", "--part", "optimal")
    assert code == 1
    assert "no part" in json.loads(err.strip().splitlines()[-1])["error"]


def test_cc_classical_and_quantum(tmp_path, capsys) -> None:
    task = _write_part(tmp_path, "rac", "task")
    protocol = _write_part(tmp_path, "rac", "optimal")
    code, out, _ = _run(capsys, "cc", "classical", task)
    assert code == 0
    doc = json.loads(out)
    assert doc["value"] == 0.75
    assert doc["p_G"] == 0.5
    code, out, _ = _run(capsys, "cc", "quantum", task, protocol)
    assert code == 0
    assert json.loads(out)["p_Qd"] == pytest.approx(math.cos(math.pi / 8) ** 2, abs=1e-9)


def test_cc_classical_reads_stdin(tmp_path, capsys, monkeypatch) -> None:
    task = _write_part(tmp_path, "rac", "task")
    monkeypatch.setattr("sys.stdin", io.StringIO(Path(task).read_text(encoding="utf-8")))
    code, out, _ = _run(capsys, "cc", "classical", "--levels", "1")
    assert code == 0
    assert json.loads(out)["value"] == 0.5


def test_analyze_rac_reports_violation(tmp_path, capsys) -> None:
    task = _write_part(tmp_path, "rac", "task")
    protocol = _write_part(tmp_path, "rac", "toy")
    out_path = tmp_path / "report.json"
    code, out, _ = _run(capsys, "analyze", task, protocol, "--samples", "20", "--out", str(out_path))
    assert code == 0
    assert out == ""
    report = documents.report_from_doc(codec.read_json(str(out_path)))
    assert report.violation is True
    assert report.p_Qd == pytest.approx(0.801777, abs=1e-6)


def test_construct_and_evaluate_oc(tmp_path, capsys) -> None:
    task = _write_part(tmp_path, "rac", "task")
    protocol = _write_part(tmp_path, "rac", "optimal")
    octask = tmp_path / "oc.json"
    bundle = tmp_path / "bundle.json"
    assert main(["construct", "oc", task, "--out", str(octask)]) == 0
    assert main(["construct", "oc", task, protocol, "--out", str(bundle)]) == 0
    capsys.readouterr()

    code, out, _ = _run(capsys, "oc", "pnc-bound", str(octask), "--samples", "10", "--seed", "3")
    assert code == 0
    doc = json.loads(out)
    assert doc["upper_bound"] == pytest.approx(0.75)
    assert doc["sampled_lower_bound"] <= doc["upper_bound"] + 1e-9

    code, out, _ = _run(capsys, "oc", "quantum", str(bundle))
    assert json.loads(out)["value"] == pytest.approx(math.cos(math.pi / 8) ** 2, abs=1e-9)

    code, out, _ = _run(capsys, "oc", "verify-oblivious", str(bundle), "--maximally-mixed")
    doc = json.loads(out)
    assert doc["ok"] is True
    assert doc["deviation_from_expected"] <= 1e-9


def test_construct_dual_needs_protocol(tmp_path) -> None:
    task = _write_part(tmp_path, "rac", "task")
    with pytest.raises(SystemExit) as exc_info:
        main(["construct", "oc", task, "--dual"])
    assert exc_info.value.code == 2


def test_construct_dual_bundle(tmp_path, capsys) -> None:
    task = _write_part(tmp_path, "rac", "task")
    protocol = _write_part(tmp_path, "rac", "optimal")
    code, out, _ = _run(capsys, "construct", "oc", task, protocol, "--dual")
    assert code == 0
    doc = json.loads(out)
    assert doc["kind"] == "oc_bundle"
    assert doc["octask"]["record"]["kind"] == "dual"


def test_bell_analyze_case_study_bundle(tmp_path, capsys) -> None:
    bundle = tmp_path / "chsh.json"
    assert main(["casestudy", "chsh", "--out", str(bundle)]) == 0
    code, out, _ = _run(capsys, "bell", "analyze", str(bundle))
    assert code == 0
    doc = json.loads(out)
    assert doc["local_bound"] == 0.75
    assert doc["quantum_value"] == pytest.approx((2 + math.sqrt(2)) / 4, abs=1e-9)
    assert doc["oc_quantum_value"] == pytest.approx(doc["quantum_value"], abs=1e-9)
    assert doc["pnc_upper_bound"] <= 0.75 + 1e-9
    assert doc["oblivious_ok"] is True


def test_bell_analyze_separate_files(tmp_path, capsys) -> None:
    scenario = _write_part(tmp_path, "chsh", "bell")
    realization = _write_part(tmp_path, "chsh", "realization")
    code, out, _ = _run(capsys, "bell", "analyze", scenario, realization)
    assert code == 0
    assert json.loads(out)["quantum_value"] == pytest.approx(0.853553, abs=1e-6)


def test_ontology_check(tmp_path, capsys) -> None:
    path = tmp_path / "fragment.json"
    path.write_text(codec.dumps(documents.fragment_to_doc(make_rac_fragment())), encoding="utf-8")
    code, out, _ = _run(capsys, "ontology", "check", str(path))
    assert code == 0
    doc = json.loads(out)
    assert doc["pnc_model_exists"] is False
    assert doc["status"] == "infeasible"
    code, out, _ = _run(capsys, "ontology", "check", str(path), "--no-equivalences")
    assert json.loads(out)["pnc_model_exists"] is True


def test_bounds_subcommands(capsys) -> None:
    code, out, _ = _run(capsys, "bounds", "pump", "--p", "0.75", "--d", "4")
    assert code == 0
    assert json.loads(out)["value"] == pytest.approx(0.0800, abs=1e-4)
    _, out, _ = _run(capsys, "bounds", "pump", "--p", "0.75", "--r", "3")
    assert json.loads(out)["value"] == pytest.approx(0.84375)
    _, out, _ = _run(capsys, "bounds", "two-level", "--p-s", str(2 / 3), "--c", "8")
    assert json.loads(out)["value"] == pytest.approx(0.9082, abs=1e-4)
    _, out, _ = _run(capsys, "bounds", "combined", "--p-c2", "0.75", "--p-g", "0.5", "--d", "2")
    assert json.loads(out)["holds"] is False
    _, out, _ = _run(capsys, "bounds", "c12", "--p-cd", "0.75", "--d", "2", "--chi", "1", "--p-c2", "0.75")
    assert json.loads(out)["holds"] is True
    _, out, _ = _run(capsys, "bounds", "beta", "--p-qd", "1", "--d", "20", "--p-g", "0.5", "--c", "1182.41", "--p-s", "0.75")
    assert json.loads(out)["value"] == pytest.approx(1.4038, abs=1e-3)


def test_domain_error_exits_one(capsys) -> None:
    code, out, err = _run(capsys, "bounds", "pump", "--p", "0.75", "--r", "4")
    assert code == 1
    assert out == ""
    assert "tie convention" in json.loads(err.strip().splitlines()[-1])["error"]


def test_validate_reports_problems(tmp_path, capsys) -> None:
    task = _write_part(tmp_path, "rac", "task")
    code, out, _ = _run(capsys, "validate", task)
    assert code == 0
    assert json.loads(out)["ok"] is True
    doc = codec.read_json(task)
    doc["prior"][0][0] = 0.5
    bad = tmp_path / "bad.json"
    bad.write_text(codec.dumps(doc), encoding="utf-8")
    code, out, _ = _run(capsys, "validate", str(bad))
    assert code == 1
    problems = json.loads(out)["problems"]
    assert problems[0]["code"] == "prior_sum"
    assert problems[0]["pointer"] == "/prior"


def test_validate_reports_malformed_flip(tmp_path, capsys) -> None:
    doc = codec.read_json(_write_part(tmp_path, "hidden-matching", "task"))
    doc["flip"] = 5
    bad = tmp_path / "badflip.json"
    bad.write_text(codec.dumps(doc), encoding="utf-8")
    code, out, _ = _run(capsys, "validate", str(bad))
    assert code == 1
    problems = json.loads(out)["problems"]
    assert problems[0]["code"] == "schema"
    assert problems[0]["pointer"] == "/flip"


def test_schema_error_carries_pointer(tmp_path, capsys) -> None:
    path = tmp_path / "task.json"
    path.write_text(json.dumps({"v": "v1", "kind": "task", "ny": 2}), encoding="utf-8")
    code, _, err = _run(capsys, "cc", "classical", str(path))
    assert code == 1
    assert json.loads(err.strip().splitlines()[-1])["pointer"] == "/nx"


def test_tol_flag_overrides_state_tolerance(tmp_path, capsys, monkeypatch) -> None:
    monkeypatch.setattr(config, "STATE_TOL", config.STATE_TOL)
    task = _write_part(tmp_path, "rac", "task")
    assert main(["cc", "classical", task, "--tol", "1e-6"]) == 0
    assert config.STATE_TOL == 1e-6


def test_missing_subcommand_is_usage_error() -> None:
    with pytest.raises(SystemExit) as exc_info:
        main(["bounds"])
    assert exc_info.value.code == 2
