"""Mechanical constructions of OC tasks (and their quantum protocols) from CC tasks and Bell scenarios."""

import logging
from typing import List, Optional, Tuple

import numpy as np

from oc_witness import config
from oc_witness.bell import BellScenario, QuantumRealization, alice_marginals_and_collapses
from oc_witness.errors import OCWitnessError
from oc_witness.oc.task import ConstructionRecord, OCTask
from oc_witness.quantum.protocols import PMProtocol
from oc_witness.quantum.states import DensityMatrix, Povm, orthogonal_mixture
from oc_witness.tasks.model import FunctionalCCTask, RelationalCCTask, ensure_valid

logger = logging.getLogger(__name__)

StateRows = List[List[Optional[DensityMatrix]]]


def _flag_condition(d: int) -> np.ndarray:
    """p(a2|x): 1/d for a2 = 0, (d−1)/d for a2 = 1."""
    if d < 2:
        raise OCWitnessError(f"message dimension d must be >= 2, got {d}")
    return np.array([1.0 / d, (d - 1.0) / d])


def cc_to_oc(task: FunctionalCCTask, d: Optional[int] = None, prior_tol: Optional[float] = None) -> OCTask:
    """a = (x, a2), b = y, c = f(x,y) ⊕ a2, oblivious variable x."""
    ensure_valid(task, prior_tol)
    d = task.d if d is None else d
    flag = _flag_condition(d)
    correct = task.success_indicator()  # (x, y, z)
    payoff = np.zeros((task.n_x, 2, task.n_y, 2))
    payoff[:, 0] = task.prior[:, :, None] * flag[0] * correct
    payoff[:, 1] = task.prior[:, :, None] * flag[1] * correct[:, :, ::-1]
    cond = np.tile(flag, (task.n_x, 1))
    record = ConstructionRecord(source_task_id=task.task_id, kind="primary", d=d)
    return OCTask(cond_a2=cond, payoff=payoff, record=record, task_id=f"{task.task_id}/oc")


def relational_cc_to_oc(
    task: RelationalCCTask, d: Optional[int] = None, prior_tol: Optional[float] = None
) -> OCTask:
    """As cc_to_oc with R(x,y) accepted for a2 = 0 and the flipped relation for a2 = 1."""
    ensure_valid(task, prior_tol)
    d = task.d if d is None else d
    flag = _flag_condition(d)
    flipped = task.flipped_indicator()
    payoff = np.zeros((task.n_x, 2, task.n_y, task.n_outcomes))
    payoff[:, 0] = task.prior[:, :, None] * flag[0] * task.success_indicator()
    payoff[:, 1] = task.prior[:, :, None] * flag[1] * flipped
    cond = np.tile(flag, (task.n_x, 1))
    record = ConstructionRecord(source_task_id=task.task_id, kind="relational", d=d)
    return OCTask(cond_a2=cond, payoff=payoff, record=record, task_id=f"{task.task_id}/oc")


def pm_to_oc_protocol(protocol: PMProtocol) -> Tuple[StateRows, List[Povm]]:
    """ρ_{x,0} = ρ_x and ρ_{x,1} = its orthogonal mixture; measurements unchanged."""
    states: StateRows = [[rho, orthogonal_mixture(rho)] for rho in protocol.states]
    return states, list(protocol.measurements)


def dual_cc_to_oc(task: FunctionalCCTask, protocol: PMProtocol) -> Tuple[OCTask, StateRows, List[Povm]]:
    """
    Dual construction: a = (y, z), b = x, oblivious variable y, p(z|y) = χ^y_z / d.
    States are the normalized effects M^y_z / χ^y_z and Bob's measurement for x is
    {ρ_x, I − ρ_x}. Effects with χ^y_z within STATE_TOL of zero get p(z|y) = 0 and a None state.
    """
    ensure_valid(task)
    protocol.check_against(task)
    d = protocol.d
    traces = np.stack([m.traces() for m in protocol.measurements])  # (y, z)
    negligible = traces <= config.STATE_TOL
    cond = np.where(negligible, 0.0, traces / d)
    cond = cond / cond.sum(axis=1, keepdims=True)
    correct = task.success_indicator()  # (x, y, f-value)
    payoff = np.zeros((task.n_y, 2, task.n_x, 2))
    for z in range(2):
        hit = correct if z == 0 else correct[:, :, ::-1]  # c = f ⊕ z
        payoff[:, z] = np.transpose(task.prior[:, :, None] * hit, (1, 0, 2)) * cond[:, z, None, None]
    states: StateRows = []
    for y, povm in enumerate(protocol.measurements):
        row: List[Optional[DensityMatrix]] = []
        for z, effect in enumerate(povm.effects):
            if negligible[y, z]:
                logger.debug("Omitting near-zero-trace effect y=%d z=%d", y, z)
                row.append(None)
            else:
                row.append(DensityMatrix(effect / traces[y, z]))
        states.append(row)
    eye = np.eye(d)
    povms = [Povm(np.array([rho.entries, eye - rho.entries])) for rho in protocol.states]
    record = ConstructionRecord(source_task_id=task.task_id, kind="dual", d=d)
    oc = OCTask(cond_a2=cond, payoff=payoff, record=record, task_id=f"{task.task_id}/oc-dual")
    return oc, states, povms


def bell_to_oc(
    scenario: BellScenario, realization: QuantumRealization
) -> Tuple[OCTask, StateRows, List[Povm]]:
    """a = (x, u), b = y, c = v, p(u|x) = p_Q(u|x); states are Bob's collapses ρ^B_{u|x}."""
    realization.check_against(scenario)
    probs, collapses = alice_marginals_and_collapses(realization)
    # W[x, u, y, v] = c_{x,y}(u,v) p(x,y) p_Q(u|x)
    payoff = scenario.weights() * probs[:, :, None, None]
    n_u = probs.shape[1]
    record = ConstructionRecord(source_task_id=scenario.scenario_id, kind="bell", d=n_u)
    oc = OCTask(cond_a2=probs, payoff=payoff, record=record, task_id=f"{scenario.scenario_id}/oc")
    return oc, collapses, list(realization.bob_povms)
