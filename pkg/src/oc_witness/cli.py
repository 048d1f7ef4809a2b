"""Command-line entry point: run with oc-witness or python -m oc_witness.cli."""

import argparse
import dataclasses
import json
import logging
import sys
from typing import Any, Callable, Dict, List, Optional

import numpy as np

from oc_witness import config
from oc_witness.analysis import AnalysisConfig, analyze
from oc_witness.bell import bell_quantum_value, local_bound
from oc_witness.bounds import (
    beta_lower_bound,
    c12_value,
    chernoff_repetition_bound,
    combined_condition,
    combined_value,
    condition_c12,
    pumping_exact,
    pumping_lower_bound,
    two_level_upper_bound,
)
from oc_witness.case_studies import case_study
from oc_witness.constructions import bell_to_oc, cc_to_oc, dual_cc_to_oc, pm_to_oc_protocol, relational_cc_to_oc
from oc_witness.errors import OCWitnessError, SchemaError
from oc_witness.oc.engine import oc_quantum_value, pnc_upper_bound, sampled_oblivious_lower_bound, verify_oblivious
from oc_witness.ontology import pnc_model_exists
from oc_witness.quantum.protocols import EAProtocol, chi, ea_to_pm, ea_value, pm_value
from oc_witness.serialization import codec, documents
from oc_witness.tasks.classical import best_classical_value, guessing_probability
from oc_witness.tasks.model import FunctionalCCTask, RelationalCCTask, validate_task

logger = logging.getLogger(__name__)

Handler = Callable[[argparse.Namespace], Dict[str, Any]]


def _settings(args: argparse.Namespace) -> AnalysisConfig:
    return AnalysisConfig(
        state_tol=args.tol if args.tol is not None else config.STATE_TOL,
        oblivious_tol=args.tol if args.tol is not None else config.OBLIVIOUS_TOL,
        budget=args.budget if args.budget is not None else config.ENUMERATION_BUDGET,
        samples=args.samples if args.samples is not None else config.SAMPLES,
        seed=args.seed if args.seed is not None else config.SEED,
        out=args.out,
    )


def _result(kind: str, **fields: Any) -> Dict[str, Any]:
    doc = codec.header(kind)
    doc.update(fields)
    return doc


# validate / cc


def cmd_validate(args: argparse.Namespace) -> Dict[str, Any]:
    doc = codec.read_json(args.file)
    kind = codec.field(doc, "kind")
    decoders = {
        "task": lambda d: documents.task_from_doc(d, validate=False),
        "protocol": documents.protocol_from_doc,
        "octask": documents.octask_from_doc,
        "oc_bundle": documents.oc_bundle_from_doc,
        "bell": documents.bell_from_doc,
        "realization": documents.realization_from_doc,
        "fragment": documents.fragment_from_doc,
        "report": documents.report_from_doc,
        "casestudy": documents.casestudy_from_doc,
    }
    if kind not in decoders:
        raise SchemaError("/kind", f"unknown document kind {kind!r}")
    problems: List[Dict[str, Any]] = []
    try:
        decoded = decoders[kind](doc)
    except SchemaError as exc:
        problems = [{"code": "schema", "message": str(exc), "index": [], "pointer": exc.pointer}]
    else:
        if kind == "task":
            problems = [
                {"code": p.code, "message": p.message, "index": list(p.index), "pointer": documents.problem_pointer(p)}
                for p in validate_task(decoded).problems
            ]
    return _result("validation", document_kind=kind, ok=not problems, problems=problems)


def cmd_cc_classical(args: argparse.Namespace) -> Dict[str, Any]:
    task = documents.task_from_doc(codec.read_json(args.task))
    levels = args.levels if args.levels is not None else task.d
    value, strategy = best_classical_value(task, levels, _settings(args).budget)
    return _result(
        "classical",
        task_id=task.task_id,
        levels=levels,
        p_G=guessing_probability(task),
        value=value,
        encoding=strategy.encoding.tolist(),
        decoding=strategy.decoding.tolist(),
    )


def cmd_cc_quantum(args: argparse.Namespace) -> Dict[str, Any]:
    task = documents.task_from_doc(codec.read_json(args.task))
    protocol = documents.protocol_from_doc(codec.read_json(args.protocol))
    if isinstance(protocol, EAProtocol):
        pm = ea_to_pm(protocol)
        return _result(
            "quantum",
            task_id=task.task_id,
            d=protocol.d,
            d_prime=pm.d,
            p_Qd=ea_value(task, protocol),
            chi=chi(task, pm),
        )
    return _result(
        "quantum",
        task_id=task.task_id,
        d=protocol.d,
        d_prime=None,
        p_Qd=pm_value(task, protocol),
        chi=chi(task, protocol),
    )


# construct / oc


def cmd_construct_oc(args: argparse.Namespace) -> Dict[str, Any]:
    task = documents.task_from_doc(codec.read_json(args.task))
    protocol = documents.protocol_from_doc(codec.read_json(args.protocol)) if args.protocol else None
    if isinstance(protocol, EAProtocol):
        protocol = ea_to_pm(protocol)
    if args.dual:
        if not isinstance(task, FunctionalCCTask):
            raise OCWitnessError("the dual construction needs a functional task")
        oc, states, povms = dual_cc_to_oc(task, protocol)
        return documents.oc_bundle_to_doc(oc, states, povms)
    d = args.d if args.d is not None else (protocol.d if protocol is not None else task.d)
    oc = relational_cc_to_oc(task, d) if isinstance(task, RelationalCCTask) else cc_to_oc(task, d)
    if protocol is None:
        return documents.octask_to_doc(oc)
    states, povms = pm_to_oc_protocol(protocol)
    return documents.oc_bundle_to_doc(oc, states, povms)


def _load_octask(source: Optional[str]):
    doc = codec.read_json(source)
    if codec.field(doc, "kind") == "oc_bundle":
        return documents.oc_bundle_from_doc(doc)
    return documents.octask_from_doc(doc), None, None


def cmd_oc_pnc_bound(args: argparse.Namespace) -> Dict[str, Any]:
    task, _, _ = _load_octask(args.file)
    settings = _settings(args)
    bound, enc, decoding = pnc_upper_bound(task, settings.budget)
    lower = sampled_oblivious_lower_bound(task, settings.samples, settings.seed)
    return _result(
        "pnc_bound",
        task_id=task.task_id,
        upper_bound=bound,
        encoding=list(enc.e),
        decoding=list(decoding),
        sampled_lower_bound=lower,
        samples=settings.samples,
        seed=settings.seed,
    )


def cmd_oc_quantum(args: argparse.Namespace) -> Dict[str, Any]:
    task, states, povms = documents.oc_bundle_from_doc(codec.read_json(args.file))
    return _result("oc_quantum", task_id=task.task_id, value=oc_quantum_value(task, states, povms))


def cmd_oc_verify(args: argparse.Namespace) -> Dict[str, Any]:
    task, states, _ = documents.oc_bundle_from_doc(codec.read_json(args.file))
    expected = None
    if args.maximally_mixed:
        dim = next(s.dim for row in states for s in row if s is not None)
        expected = np.eye(dim) / dim
    report = verify_oblivious(states, task.cond_a2, args.tol, expected)
    return _result("oblivious", task_id=task.task_id, **dataclasses.asdict(report))


# bell / ontology


def cmd_bell_analyze(args: argparse.Namespace) -> Dict[str, Any]:
    doc = codec.read_json(args.scenario)
    if codec.field(doc, "kind") == "casestudy":
        study = documents.casestudy_from_doc(doc)
        scenario, realization = study.scenario, study.realization
        if scenario is None:
            raise SchemaError("/bell", f"case study {study.name!r} has no Bell scenario")
    else:
        scenario = documents.bell_from_doc(doc)
        realization = documents.realization_from_doc(codec.read_json(args.realization)) if args.realization else None
    settings = _settings(args)
    bound, strategy = local_bound(scenario, settings.budget)
    out = _result("bell_report", scenario_id=scenario.scenario_id, local_bound=bound,
                  local_strategy={"alice": list(strategy.alice), "bob": list(strategy.bob)})
    if realization is not None:
        oc, states, povms = bell_to_oc(scenario, realization)
        upper, _, _ = pnc_upper_bound(oc, settings.budget)
        oblivious = verify_oblivious(states, oc.cond_a2, settings.oblivious_tol)
        out.update({
            "quantum_value": bell_quantum_value(scenario, realization),
            "pnc_upper_bound": upper,
            "oc_quantum_value": oc_quantum_value(oc, states, povms),
            "oblivious_deviation": oblivious.max_deviation,
            "oblivious_ok": oblivious.ok,
        })
    return out


def cmd_ontology_check(args: argparse.Namespace) -> Dict[str, Any]:
    fragment = documents.fragment_from_doc(codec.read_json(args.file))
    result = pnc_model_exists(fragment, use_equivalences=not args.no_equivalences, budget=_settings(args).budget)
    return _result(
        "ontology",
        pnc_model_exists=result.pnc_model_exists,
        status=result.status,
        message=result.message,
        equivalences=result.equivalences.tolist() if result.equivalences is not None else [],
        atoms=[list(a) for a in result.atoms],
        model=result.model.tolist() if result.model is not None else None,
        residual=result.residual,
    )


# bounds


def cmd_bounds_pump(args: argparse.Namespace) -> Dict[str, Any]:
    if args.d is not None:
        return _result("bound", name="pumping_lower_bound", p=args.p, d=args.d, value=pumping_lower_bound(args.p, args.d))
    if args.r is None:
        raise OCWitnessError("bounds pump needs --d or --r")
    return _result(
        "bound",
        name="pumping_exact",
        p=args.p,
        r=args.r,
        value=pumping_exact(args.p, args.r, ties_fail=args.ties_fail),
        chernoff=chernoff_repetition_bound(args.p, args.r) if args.p > 0.5 else None,
    )


def cmd_bounds_two_level(args: argparse.Namespace) -> Dict[str, Any]:
    return _result("bound", name="two_level_upper_bound", p_S=args.p_s, C=args.c, value=two_level_upper_bound(args.p_s, args.c))


def cmd_bounds_beta(args: argparse.Namespace) -> Dict[str, Any]:
    value = beta_lower_bound(args.p_qd, args.d, args.p_g, args.c, args.p_s)
    return _result("bound", name="beta_lower_bound", value=value)


def cmd_bounds_c12(args: argparse.Namespace) -> Dict[str, Any]:
    return _result(
        "bound",
        name="c12",
        value=c12_value(args.p_cd, args.d, args.chi),
        holds=condition_c12(args.p_cd, args.d, args.chi, args.p_c2),
    )


def cmd_bounds_combined(args: argparse.Namespace) -> Dict[str, Any]:
    return _result(
        "bound",
        name="combined",
        value=combined_value(args.p_c2, args.p_g, args.d),
        holds=combined_condition(args.p_c2, args.p_g, args.d),
    )


# casestudy / analyze


def cmd_casestudy(args: argparse.Namespace) -> Dict[str, Any]:
    doc = documents.casestudy_to_doc(case_study(args.name, args.n))
    if args.part is None:
        return doc
    if args.part == "task":
        part = doc["task"]
    elif args.part in ("bell", "realization"):
        part = doc[args.part]
    else:
        part = doc["protocols"].get(args.part)
    if part is None:
        raise OCWitnessError(f"case study {args.name!r} has no part {args.part!r}")
    return part


def cmd_analyze(args: argparse.Namespace) -> Dict[str, Any]:
    task = documents.task_from_doc(codec.read_json(args.task))
    protocol = documents.protocol_from_doc(codec.read_json(args.protocol))
    report = analyze(task, protocol, args.d, _settings(args))
    return documents.report_to_doc(report)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="RNG seed for sampled bounds")
    common.add_argument("--budget", type=int, default=None, help="enumeration budget")
    common.add_argument("--samples", type=int, default=None, help="oblivious encodings to sample")
    common.add_argument("--tol", type=float, default=None, help="state / obliviousness tolerance")
    common.add_argument("--out", default=None, help="write JSON here instead of stdout")
    common.add_argument("--verbose", action="store_true", help="debug logging")

    parser = argparse.ArgumentParser(prog="oc-witness", description="Preparation-contextuality witnesses from CC tasks.")
    sub = parser.add_subparsers(dest="command", required=True)

    def leaf(group, name: str, handler: Handler, **kwargs) -> argparse.ArgumentParser:
        p = group.add_parser(name, parents=[common], **kwargs)
        p.set_defaults(handler=handler)
        return p

    p = leaf(sub, "validate", cmd_validate, help="validate any document")
    p.add_argument("file", nargs="?", default="-")

    cc = sub.add_parser("cc", help="CC task values").add_subparsers(dest="cc_command", required=True)
    p = leaf(cc, "classical", cmd_cc_classical)
    p.add_argument("task", nargs="?", default="-")
    p.add_argument("--levels", type=int, default=None)
    p = leaf(cc, "quantum", cmd_cc_quantum)
    p.add_argument("task")
    p.add_argument("protocol")

    construct = sub.add_parser("construct", help="build derived tasks").add_subparsers(dest="construct_command", required=True)
    p = leaf(construct, "oc", cmd_construct_oc)
    p.add_argument("task")
    p.add_argument("protocol", nargs="?", default=None)
    p.add_argument("--dual", action="store_true", help="dual construction (needs a protocol)")
    p.add_argument("--d", type=int, default=None)

    oc = sub.add_parser("oc", help="OC task values").add_subparsers(dest="oc_command", required=True)
    p = leaf(oc, "pnc-bound", cmd_oc_pnc_bound)
    p.add_argument("file", nargs="?", default="-")
    p = leaf(oc, "quantum", cmd_oc_quantum)
    p.add_argument("file", nargs="?", default="-")
    p = leaf(oc, "verify-oblivious", cmd_oc_verify)
    p.add_argument("file", nargs="?", default="-")
    p.add_argument("--maximally-mixed", action="store_true", help="also compare each mixture with I/d")

    bell = sub.add_parser("bell", help="Bell scenarios").add_subparsers(dest="bell_command", required=True)
    p = leaf(bell, "analyze", cmd_bell_analyze)
    p.add_argument("scenario", nargs="?", default="-")
    p.add_argument("realization", nargs="?", default=None)

    ontology = sub.add_parser("ontology", help="ontological models").add_subparsers(dest="ontology_command", required=True)
    p = leaf(ontology, "check", cmd_ontology_check)
    p.add_argument("file", nargs="?", default="-")
    p.add_argument("--no-equivalences", action="store_true")

    bounds = sub.add_parser("bounds", help="closed-form bounds").add_subparsers(dest="bounds_command", required=True)
    p = leaf(bounds, "pump", cmd_bounds_pump)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--d", type=int, default=None)
    p.add_argument("--r", type=int, default=None)
    p.add_argument("--ties-fail", action="store_true")
    p = leaf(bounds, "two-level", cmd_bounds_two_level, aliases=["lemma4"])
    p.add_argument("--p-s", type=float, required=True)
    p.add_argument("--c", type=float, required=True)
    p = leaf(bounds, "beta", cmd_bounds_beta)
    for flag in ("--p-qd", "--p-g", "--c", "--p-s"):
        p.add_argument(flag, type=float, required=True)
    p.add_argument("--d", type=float, required=True)
    p = leaf(bounds, "c12", cmd_bounds_c12)
    for flag in ("--p-cd", "--chi", "--p-c2"):
        p.add_argument(flag, type=float, required=True)
    p.add_argument("--d", type=int, required=True)
    p = leaf(bounds, "combined", cmd_bounds_combined)
    p.add_argument("--p-c2", type=float, required=True)
    p.add_argument("--p-g", type=float, required=True)
    p.add_argument("--d", type=int, required=True)

    p = leaf(sub, "casestudy", cmd_casestudy, help="built-in instances")
    p.add_argument("name", choices=["rac", "chsh", "hidden-matching"])
    p.add_argument("--n", type=int, default=4)
    p.add_argument("--part", default=None, help="emit one part: task, bell, realization or a protocol name")

    p = leaf(sub, "analyze", cmd_analyze, help="full violation report")
    p.add_argument("task")
    p.add_argument("protocol")
    p.add_argument("d", type=int, nargs="?", default=None)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "dual", False) and args.protocol is None:
        parser.error("construct oc --dual needs a PROTOCOL")
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(asctime)s %(levelname)s %(name)s %(message)s",
        stream=sys.stderr,
    )
    try:
        settings = _settings(args)
        if args.tol is not None:
            config.STATE_TOL = settings.state_tol
        doc = args.handler(args)
    except SchemaError as exc:
        sys.stderr.write(json.dumps(exc.to_dict()) + "\n")
        return 1
    except OCWitnessError as exc:
        sys.stderr.write(json.dumps({"error": str(exc), "pointer": None}) + "\n")
        return 1
    codec.write_json(doc, settings.out)
    if doc.get("kind") == "validation" and not doc["ok"]:
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
