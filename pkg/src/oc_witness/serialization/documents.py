"""
Versioned JSON documents for every domain object. Each document carries "v" and a "kind";
decoders raise SchemaError with a JSON pointer to the first offending value.
"""

import dataclasses
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from oc_witness.bell import BellScenario, QuantumRealization
from oc_witness.bounds import ViolationReport
from oc_witness.case_studies import CaseStudy, Fixture
from oc_witness.errors import OCWitnessError, SchemaError
from oc_witness.oc.task import ConstructionRecord, OCTask, validate_oc_task
from oc_witness.ontology import OperationalFragment
from oc_witness.quantum.protocols import EAProtocol, PMProtocol
from oc_witness.quantum.states import DensityMatrix, Povm
from oc_witness.serialization.codec import (
    as_int,
    check_header,
    child,
    decode_matrix,
    encode_matrix,
    field,
    header,
    real_array,
)
from oc_witness.tasks.model import (
    CCTask,
    FunctionalCCTask,
    RelationalCCTask,
    ValidationProblem,
    validate_task,
)

_PROBLEM_FIELDS = {
    "prior_shape": "prior",
    "prior_negative": "prior",
    "prior_sum": "prior",
    "f_shape": "f",
    "f_value": "f",
    "relation_shape": "relation",
    "relation_empty": "relation",
    "relation_range": "relation",
    "flip": "flip",
    "d": "d",
}


def problem_pointer(problem: ValidationProblem) -> str:
    name = _PROBLEM_FIELDS.get(problem.code)
    if name is None:
        return "/"
    pointer = f"/{name}"
    for i in problem.index:
        pointer = child(pointer, i)
    return pointer


def _wrap(pointer: str, build, *args, **kwargs):
    """Run a domain constructor, reporting its validation error at `pointer`."""
    try:
        return build(*args, **kwargs)
    except SchemaError:
        raise
    except OCWitnessError as exc:
        raise SchemaError(pointer, str(exc)) from None


# Tasks


def task_to_doc(task: CCTask) -> dict:
    doc = header("task")
    doc.update({"task_id": task.task_id, "nx": task.n_x, "ny": task.n_y, "d": task.d, "prior": task.prior.tolist()})
    if isinstance(task, FunctionalCCTask):
        doc["f"] = task.f.tolist()
    else:
        doc["relation"] = [[sorted(cell) for cell in row] for row in task.relation]
        doc["outcome_labels"] = list(task.outcome_labels)
        doc["flip"] = list(task.flip) if task.flip is not None else None
    return doc


def task_from_doc(doc: Any, validate: bool = True) -> CCTask:
    """Decode a task; with validate=True the first violated invariant raises SchemaError."""
    check_header(doc, ["task"])
    nx = as_int(field(doc, "nx"), "/nx", 1)
    ny = as_int(field(doc, "ny"), "/ny", 1)
    d = as_int(field(doc, "d"), "/d")
    prior = real_array(field(doc, "prior"), "/prior", 2)
    if prior.shape != (nx, ny):
        raise SchemaError("/prior", f"expected shape ({nx}, {ny}), got {prior.shape}")
    task_id = str(doc.get("task_id", "task"))
    if "f" in doc:
        f = real_array(doc["f"], "/f", 2)
        for idx in zip(*np.nonzero(f != np.round(f))):
            raise SchemaError("/f/" + "/".join(str(int(i)) for i in idx), "f entry not binary")
        task: CCTask = FunctionalCCTask(f=f.astype(int), prior=prior, d=d, task_id=task_id)
    elif "relation" in doc:
        relation = doc["relation"]
        if not isinstance(relation, list) or any(not isinstance(row, list) for row in relation):
            raise SchemaError("/relation", "expected a table of outcome lists")
        for x, row in enumerate(relation):
            for y, cell in enumerate(row):
                if not isinstance(cell, list) or any(isinstance(z, bool) or not isinstance(z, int) for z in cell):
                    raise SchemaError(f"/relation/{x}/{y}", "expected a list of outcome indices")
        labels = field(doc, "outcome_labels")
        if not isinstance(labels, list):
            raise SchemaError("/outcome_labels", "expected a list")
        flip = doc.get("flip")
        if flip is not None:
            if not isinstance(flip, list) or any(isinstance(z, bool) or not isinstance(z, int) for z in flip):
                raise SchemaError("/flip", "expected a list of outcome indices")
            if len(flip) != len(labels):
                raise SchemaError("/flip", f"expected {len(labels)} entries, one per outcome, got {len(flip)}")
        task = RelationalCCTask(
            relation=relation, prior=prior, outcome_labels=labels, flip=flip, d=d, task_id=task_id
        )
    else:
        raise SchemaError("/", "task needs either 'f' or 'relation'")
    if validate:
        result = validate_task(task)
        if not result.ok:
            first = result.problems[0]
            raise SchemaError(problem_pointer(first), first.message)
    return task


# Protocols


def _povm_to_doc(povm: Povm) -> List[list]:
    return [encode_matrix(e) for e in povm.effects]


def _povm_from_doc(value: Any, pointer: str) -> Povm:
    if not isinstance(value, list) or not value:
        raise SchemaError(pointer, "expected a non-empty list of effects")
    effects = [decode_matrix(e, child(pointer, k)) for k, e in enumerate(value)]
    if len({e.shape for e in effects}) != 1:
        raise SchemaError(pointer, "effects have different dimensions")
    return _wrap(pointer, Povm, np.array(effects))


def _state_from_doc(value: Any, pointer: str) -> DensityMatrix:
    return _wrap(pointer, DensityMatrix, decode_matrix(value, pointer))


def protocol_to_doc(protocol) -> dict:
    doc = header("protocol")
    if isinstance(protocol, EAProtocol):
        doc.update({
            "type": "ea",
            "d_a": protocol.d_a,
            "d_b": protocol.d_b,
            "state": encode_matrix(protocol.shared.entries),
            "alice_povms": [_povm_to_doc(p) for p in protocol.alice_povms],
            "bob_povms": [[_povm_to_doc(p) for p in row] for row in protocol.bob_povms],
        })
        return doc
    doc.update({
        "type": "pm",
        "dim": protocol.d,
        "states": [encode_matrix(s.entries) for s in protocol.states],
        "measurements": [_povm_to_doc(m) for m in protocol.measurements],
    })
    return doc


def _list(doc: Any, key: str, pointer: str = "") -> list:
    value = field(doc, key, pointer)
    if not isinstance(value, list) or not value:
        raise SchemaError(child(pointer, key), "expected a non-empty list")
    return value


def protocol_from_doc(doc: Any):
    check_header(doc, ["protocol"])
    kind = field(doc, "type")
    if kind == "pm":
        dim = as_int(field(doc, "dim"), "/dim", 1)
        states = [_state_from_doc(s, f"/states/{i}") for i, s in enumerate(_list(doc, "states"))]
        povms = [_povm_from_doc(m, f"/measurements/{i}") for i, m in enumerate(_list(doc, "measurements"))]
        for i, s in enumerate(states):
            if s.dim != dim:
                raise SchemaError(f"/states/{i}", f"state dimension {s.dim} != dim {dim}")
        return _wrap("/measurements", PMProtocol, states=tuple(states), measurements=tuple(povms))
    if kind == "ea":
        d_a = as_int(field(doc, "d_a"), "/d_a", 1)
        d_b = as_int(field(doc, "d_b"), "/d_b", 1)
        shared = _state_from_doc(field(doc, "state"), "/state")
        alice = [_povm_from_doc(p, f"/alice_povms/{i}") for i, p in enumerate(_list(doc, "alice_povms"))]
        bob = []
        for y, row in enumerate(_list(doc, "bob_povms")):
            if not isinstance(row, list):
                raise SchemaError(f"/bob_povms/{y}", "expected one POVM per message")
            bob.append(tuple(_povm_from_doc(p, f"/bob_povms/{y}/{m}") for m, p in enumerate(row)))
        return _wrap("/", EAProtocol, shared=shared, d_a=d_a, d_b=d_b, alice_povms=tuple(alice), bob_povms=tuple(bob))
    raise SchemaError("/type", f"expected 'pm' or 'ea', got {kind!r}")


# OC tasks and bundles


def octask_to_doc(task: OCTask) -> dict:
    doc = header("octask")
    doc.update({
        "task_id": task.task_id,
        "n_a1": task.n_a1,
        "n_a2": task.n_a2,
        "n_b": task.n_b,
        "n_c": task.n_c,
        "cond_a2": task.cond_a2.tolist(),
        "payoff": task.payoff.tolist(),
        "record": dataclasses.asdict(task.record) if task.record is not None else None,
    })
    return doc


def octask_from_doc(doc: Any, pointer: str = "") -> OCTask:
    check_header(doc, ["octask"], pointer)
    dims = tuple(as_int(field(doc, k, pointer), child(pointer, k), 1) for k in ("n_a1", "n_a2", "n_b", "n_c"))
    cond = real_array(field(doc, "cond_a2", pointer), child(pointer, "cond_a2"), 2)
    payoff = real_array(field(doc, "payoff", pointer), child(pointer, "payoff"), 4)
    if payoff.shape != dims:
        raise SchemaError(child(pointer, "payoff"), f"expected shape {dims}, got {payoff.shape}")
    record_doc = doc.get("record")
    record = None
    if record_doc is not None:
        rp = child(pointer, "record")
        record = _wrap(
            rp,
            ConstructionRecord,
            source_task_id=str(field(record_doc, "source_task_id", rp)),
            kind=field(record_doc, "kind", rp),
            d=as_int(field(record_doc, "d", rp), child(rp, "d")),
            notes=str(record_doc.get("notes", "")),
        )
    task = OCTask(cond_a2=cond, payoff=payoff, record=record, task_id=str(doc.get("task_id", "oc")))
    result = validate_oc_task(task)
    if not result.ok:
        first = result.problems[0]
        name = "payoff" if first.code.startswith("payoff") else "cond_a2"
        target = child(pointer, name)
        for i in first.index:
            target = child(target, i)
        raise SchemaError(target, first.message)
    return task


StateRows = List[List[Optional[DensityMatrix]]]


def oc_bundle_to_doc(task: OCTask, states: StateRows, povms: List[Povm]) -> dict:
    doc = header("oc_bundle")
    doc.update({
        "octask": octask_to_doc(task),
        "states": [[encode_matrix(s.entries) if s is not None else None for s in row] for row in states],
        "povms": [_povm_to_doc(p) for p in povms],
    })
    return doc


def oc_bundle_from_doc(doc: Any) -> Tuple[OCTask, StateRows, List[Povm]]:
    check_header(doc, ["oc_bundle"])
    task = octask_from_doc(field(doc, "octask"), "/octask")
    states: StateRows = []
    for a1, row in enumerate(_list(doc, "states")):
        if not isinstance(row, list):
            raise SchemaError(f"/states/{a1}", "expected a list of states")
        states.append([None if s is None else _state_from_doc(s, f"/states/{a1}/{a2}") for a2, s in enumerate(row)])
    povms = [_povm_from_doc(p, f"/povms/{b}") for b, p in enumerate(_list(doc, "povms"))]
    return task, states, povms


# Bell scenarios and realizations


def bell_to_doc(scenario: BellScenario) -> dict:
    doc = header("bell")
    doc.update({
        "scenario_id": scenario.scenario_id,
        "coeffs": scenario.coefficients.tolist(),
        "prior": scenario.prior.tolist(),
    })
    return doc


def bell_from_doc(doc: Any, pointer: str = "") -> BellScenario:
    check_header(doc, ["bell"], pointer)
    coeffs = real_array(field(doc, "coeffs", pointer), child(pointer, "coeffs"), 4)
    prior = real_array(field(doc, "prior", pointer), child(pointer, "prior"), 2)
    if np.any(coeffs < 0):
        raise SchemaError(child(pointer, "coeffs"), "coefficients must be nonnegative")
    return _wrap(
        child(pointer, "prior"),
        BellScenario,
        coefficients=coeffs,
        prior=prior,
        scenario_id=str(doc.get("scenario_id", "bell")),
    )


def realization_to_doc(realization: QuantumRealization) -> dict:
    doc = header("realization")
    doc.update({
        "d_a": realization.d_a,
        "d_b": realization.d_b,
        "state": encode_matrix(realization.shared.entries),
        "alice_povms": [_povm_to_doc(p) for p in realization.alice_povms],
        "bob_povms": [_povm_to_doc(p) for p in realization.bob_povms],
    })
    return doc


def realization_from_doc(doc: Any, pointer: str = "") -> QuantumRealization:
    check_header(doc, ["realization"], pointer)
    d_a = as_int(field(doc, "d_a", pointer), child(pointer, "d_a"), 1)
    d_b = as_int(field(doc, "d_b", pointer), child(pointer, "d_b"), 1)
    shared = _state_from_doc(field(doc, "state", pointer), child(pointer, "state"))
    alice = [
        _povm_from_doc(p, child(child(pointer, "alice_povms"), i))
        for i, p in enumerate(_list(doc, "alice_povms", pointer))
    ]
    bob = [
        _povm_from_doc(p, child(child(pointer, "bob_povms"), i))
        for i, p in enumerate(_list(doc, "bob_povms", pointer))
    ]
    return _wrap(
        pointer or "/",
        QuantumRealization,
        shared=shared,
        d_a=d_a,
        d_b=d_b,
        alice_povms=tuple(alice),
        bob_povms=tuple(bob),
    )


# Fragments


def fragment_to_doc(fragment: OperationalFragment) -> dict:
    doc = header("fragment")
    doc.update({
        "measurements": list(fragment.outcome_counts),
        "stats": [s.tolist() for s in fragment.statistics],
        "labels": list(fragment.labels),
        "declared_equivalences": [w.tolist() for w in fragment.declared_equivalences],
    })
    return doc


def fragment_from_doc(doc: Any) -> OperationalFragment:
    check_header(doc, ["fragment"])
    counts = field(doc, "measurements")
    stats_doc = _list(doc, "stats")
    if not isinstance(counts, list) or len(counts) != len(stats_doc):
        raise SchemaError("/measurements", "expected one outcome count per statistics table")
    stats = []
    for m, (k, table) in enumerate(zip(counts, stats_doc)):
        k = as_int(k, f"/measurements/{m}", 1)
        arr = real_array(table, f"/stats/{m}", 2)
        if arr.shape[1] != k:
            raise SchemaError(f"/stats/{m}", f"expected {k} outcomes per row, got {arr.shape[1]}")
        stats.append(arr)
    declared = [
        real_array(w, f"/declared_equivalences/{i}", 1) for i, w in enumerate(doc.get("declared_equivalences") or [])
    ]
    return _wrap(
        "/stats",
        OperationalFragment,
        statistics=tuple(stats),
        declared_equivalences=tuple(declared),
        labels=tuple(str(s) for s in doc.get("labels") or ()),
    )


# Reports and case studies


def report_to_doc(report: ViolationReport) -> dict:
    doc = header("report")
    doc.update(dataclasses.asdict(report))
    return doc


def report_from_doc(doc: Any) -> ViolationReport:
    check_header(doc, ["report"])
    names = [f.name for f in dataclasses.fields(ViolationReport)]
    return ViolationReport(**{name: field(doc, name) for name in names})


def casestudy_to_doc(study: CaseStudy) -> dict:
    doc = header("casestudy")
    doc.update({
        "name": study.name,
        "task": task_to_doc(study.task) if study.task is not None else None,
        "protocols": {name: protocol_to_doc(p) for name, p in study.protocols.items()},
        "bell": bell_to_doc(study.scenario) if study.scenario is not None else None,
        "realization": realization_to_doc(study.realization) if study.realization is not None else None,
        "fixtures": {name: dataclasses.asdict(f) for name, f in study.fixtures.items()},
    })
    return doc


def casestudy_from_doc(doc: Any) -> CaseStudy:
    check_header(doc, ["casestudy"])
    protocols = field(doc, "protocols")
    if not isinstance(protocols, dict):
        raise SchemaError("/protocols", "expected an object")
    fixtures: Dict[str, Fixture] = {}
    for name, value in (doc.get("fixtures") or {}).items():
        fp = child("/fixtures", name)
        fixtures[name] = Fixture(
            value=float(field(value, "value", fp)),
            provenance=str(field(value, "provenance", fp)),
            note=str(value.get("note", "")),
        )
    return CaseStudy(
        name=str(field(doc, "name")),
        task=task_from_doc(doc["task"]) if doc.get("task") is not None else None,
        protocols={name: protocol_from_doc(p) for name, p in protocols.items()},
        scenario=bell_from_doc(doc["bell"], "/bell") if doc.get("bell") is not None else None,
        realization=realization_from_doc(doc["realization"], "/realization") if doc.get("realization") else None,
        fixtures=fixtures,
    )
