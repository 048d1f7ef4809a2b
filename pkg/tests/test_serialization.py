"""Tests for the JSON codec and the versioned documents."""

import copy
import json

import numpy as np
import pytest

from oc_witness.bounds import ViolationReport
from oc_witness.case_studies import case_study, make_hidden_matching, make_rac, make_toy_fragment
from oc_witness.constructions import cc_to_oc, dual_cc_to_oc
from oc_witness.errors import SchemaError
from oc_witness.quantum.protocols import pm_value
from oc_witness.serialization import codec, documents


def _report() -> ViolationReport:
    return ViolationReport(
        task_id="rac", d=2, p_G=0.5, p_C2=0.75, p_Cd=0.75, p_Qd=0.85, chi=1.0, d_prime=None,
        p_NC_upper=0.75, p_NC_sampled_lower=0.7, p_Q_star=0.85, alpha_NC=0.25, alpha_Q_star=0.35,
        beta_lower=1.4, c12=True, c1=None, combined=False, combined_value=2.418, violation=True,
    )


def _pointer_of(decode, doc) -> str:
    with pytest.raises(SchemaError) as exc_info:
        decode(doc)
    return exc_info.value.pointer


def test_task_document_round_trip() -> None:
    task, optimal, _ = make_rac()
    decoded = documents.task_from_doc(json.loads(codec.dumps(documents.task_to_doc(task))))
    assert decoded.task_id == "rac"
    assert np.array_equal(decoded.f, task.f)
    protocol = documents.protocol_from_doc(documents.protocol_to_doc(optimal))
    assert pm_value(decoded, protocol) == pytest.approx(pm_value(task, optimal), abs=1e-12)


def test_relational_task_document_keeps_flip_and_labels() -> None:
    task, _ = make_hidden_matching(4)
    decoded = documents.task_from_doc(documents.task_to_doc(task))
    assert decoded.flip == task.flip
    assert decoded.outcome_labels[0] == "edge0:t0"
    assert decoded.relation == task.relation


def test_task_document_pointers() -> None:
    task, _, _ = make_rac()
    doc = documents.task_to_doc(task)
    bad_version = dict(doc, v="v0")
    assert _pointer_of(documents.task_from_doc, bad_version) == "/v"
    missing = {k: v for k, v in doc.items() if k != "nx"}
    assert _pointer_of(documents.task_from_doc, missing) == "/nx"
    wrong_shape = dict(doc, prior=[[0.5, 0.5]])
    assert _pointer_of(documents.task_from_doc, wrong_shape) == "/prior"
    fractional = copy.deepcopy(doc)
    fractional["f"][0][1] = 0.5
    assert _pointer_of(documents.task_from_doc, fractional) == "/f/0/1"


def test_relational_task_flip_pointer() -> None:
    task, _ = make_hidden_matching(4)
    doc = documents.task_to_doc(task)
    assert _pointer_of(documents.task_from_doc, dict(doc, flip=5)) == "/flip"
    assert _pointer_of(documents.task_from_doc, dict(doc, flip=["a"] * len(doc["flip"]))) == "/flip"
    assert _pointer_of(documents.task_from_doc, dict(doc, flip=doc["flip"][:-1])) == "/flip"
    assert _pointer_of(lambda d: documents.task_from_doc(d, validate=False), dict(doc, flip=5)) == "/flip"


def test_task_document_validation_pointer() -> None:
    task, _, _ = make_rac()
    doc = documents.task_to_doc(task)
    doc["prior"][1][0] = -0.125
    assert _pointer_of(documents.task_from_doc, doc) == "/prior/1/0"
    unvalidated = documents.task_from_doc(doc, validate=False)
    assert unvalidated.prior[1, 0] == -0.125


def test_protocol_document_pointers() -> None:
    _, optimal, _ = make_rac()
    doc = documents.protocol_to_doc(optimal)
    bad_entry = copy.deepcopy(doc)
    bad_entry["states"][2][0][1] = "x"
    assert _pointer_of(documents.protocol_from_doc, bad_entry) == "/states/2/0/1"
    not_a_state = copy.deepcopy(doc)
    not_a_state["states"][1] = [[[1, 0], [0, 0]], [[0, 0], [1, 0]]]
    assert _pointer_of(documents.protocol_from_doc, not_a_state) == "/states/1"
    bad_type = dict(doc, type="qc")
    assert _pointer_of(documents.protocol_from_doc, bad_type) == "/type"


def test_complex_entries_survive_encoding() -> None:
    matrix = np.array([[0.5, 0.5j], [-0.5j, 0.5]])
    encoded = codec.encode_matrix(matrix)
    assert encoded[0][1] == [0.0, 0.5]
    assert np.allclose(codec.decode_matrix(encoded, "/m"), matrix)


def test_octask_negative_payoff_pointer() -> None:
    task, _, _ = make_rac()
    doc = documents.octask_to_doc(cc_to_oc(task, 2))
    doc["payoff"][1][0][1][0] = -1.0
    assert _pointer_of(documents.octask_from_doc, doc) == "/payoff/1/0/1/0"


def test_oc_bundle_keeps_missing_states() -> None:
    task, optimal, _ = make_rac()
    oc, states, povms = dual_cc_to_oc(task, optimal)
    states[0][1] = None
    doc = documents.oc_bundle_to_doc(oc, states, povms)
    assert doc["states"][0][1] is None
    decoded_task, decoded_states, decoded_povms = documents.oc_bundle_from_doc(doc)
    assert decoded_states[0][1] is None
    assert decoded_task.record.kind == "dual"
    assert len(decoded_povms) == 4


def test_fragment_document_checks_outcome_counts() -> None:
    doc = documents.fragment_to_doc(make_toy_fragment())
    decoded = documents.fragment_from_doc(doc)
    assert decoded.labels == ("psi00", "psi01", "psi10")
    doc["measurements"][0] = 3
    assert _pointer_of(documents.fragment_from_doc, doc) == "/stats/0"


def test_report_document_round_trip() -> None:
    doc = documents.report_to_doc(_report())
    assert doc["kind"] == "report"
    assert documents.report_from_doc(json.loads(codec.dumps(doc))) == _report()


def test_casestudy_bundle_round_trip() -> None:
    study = case_study("chsh")
    decoded = documents.casestudy_from_doc(json.loads(codec.dumps(documents.casestudy_to_doc(study))))
    assert decoded.name == "chsh"
    assert decoded.task is None
    assert decoded.scenario.scenario_id == "chsh"
    assert decoded.fixtures["local_bound"].value == 0.75


def test_dumps_is_canonical() -> None:
    assert codec.dumps({"b": 1, "a": [1, 2]}) == codec.dumps({"a": [1, 2], "b": 1})
    assert codec.dumps({"a": 1}).endswith("\n")


def test_read_json_from_file_and_errors(tmp_path) -> None:
    path = tmp_path / "doc.json"
    path.write_text('{"v": "v1"}', encoding="utf-8")
    assert codec.read_json(str(path)) == {"v": "v1"}
    path.write_text("{not json", encoding="utf-8")
    with pytest.raises(SchemaError, match="invalid JSON"):
        codec.read_json(str(path))
    with pytest.raises(SchemaError, match="cannot read"):
        codec.read_json(str(tmp_path / "missing.json"))
