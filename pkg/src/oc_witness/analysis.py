"""End-to-end analysis of a CC task and a quantum protocol: every bound and flag in one report."""

import logging
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from oc_witness import config
from oc_witness.bounds import (
    ViolationReport,
    beta_ratio,
    combined_condition,
    combined_value,
    condition_c1,
    condition_c12,
    is_violation,
)
from oc_witness.constructions import cc_to_oc, pm_to_oc_protocol, relational_cc_to_oc
from oc_witness.errors import BudgetExceededError, OCWitnessError, ShapeMismatchError
from oc_witness.oc.engine import oc_quantum_value, pnc_upper_bound, sampled_oblivious_lower_bound, verify_oblivious
from oc_witness.quantum.protocols import EAProtocol, PMProtocol, chi, ea_to_pm, pm_value
from oc_witness.run_log import log_run_event
from oc_witness.tasks.classical import best_classical_value, guessing_probability
from oc_witness.tasks.model import CCTask, RelationalCCTask, ensure_valid

logger = logging.getLogger(__name__)

Protocol = Union[PMProtocol, EAProtocol]


@dataclass(frozen=True)
class AnalysisConfig:
    """Run settings; defaults come from the environment (see config.py)."""

    state_tol: float = config.STATE_TOL
    prior_tol: float = config.PRIOR_TOL
    oblivious_tol: float = config.OBLIVIOUS_TOL
    budget: int = config.ENUMERATION_BUDGET
    samples: int = config.SAMPLES
    seed: int = config.SEED
    out: Optional[str] = None

    def __post_init__(self) -> None:
        if self.budget <= 0:
            raise OCWitnessError(f"budget must be positive, got {self.budget}")
        for name in ("state_tol", "prior_tol", "oblivious_tol"):
            if getattr(self, name) <= 0:
                raise OCWitnessError(f"{name} must be positive")
        if self.samples < 1:
            raise OCWitnessError(f"samples must be >= 1, got {self.samples}")


def analyze(
    task: CCTask,
    protocol: Protocol,
    d: Optional[int] = None,
    settings: Optional[AnalysisConfig] = None,
) -> ViolationReport:
    """
    Classical values at 2 and d levels, the protocol's p_Qd and χ, the OC task built from
    the CC task with its PNC bounds, the orthogonal-mixture quantum OC value, and every flag.
    EA protocols are converted to PM first (reported as d_prime).
    """
    settings = settings or AnalysisConfig()
    ensure_valid(task, settings.prior_tol)
    protocol.check_tolerance(settings.state_tol)
    if isinstance(protocol, EAProtocol):
        d = protocol.d if d is None else d
        if d != protocol.d:
            raise ShapeMismatchError(f"d={d} does not match the EA message alphabet {protocol.d}")
        pm = ea_to_pm(protocol)
        d_prime: Optional[int] = pm.d
    else:
        d = protocol.d if d is None else d
        if d != protocol.d:
            raise ShapeMismatchError(f"d={d} does not match the protocol dimension {protocol.d}")
        pm, d_prime = protocol, None
    log_run_event("ANALYZE_START", f"task={task.task_id} d={d} d_prime={d_prime}")

    p_g = guessing_probability(task)
    p_c2, _ = best_classical_value(task, 2, settings.budget, settings.prior_tol)
    p_cd: Optional[float]
    if d == 2:
        p_cd = p_c2
    else:
        try:
            p_cd, _ = best_classical_value(task, d, settings.budget, settings.prior_tol)
        except BudgetExceededError as exc:
            logger.warning("p_Cd not computed for task %s: %s", task.task_id, exc)
            p_cd = None

    p_qd = pm_value(task, pm)
    chi_value = chi(task, pm)

    oc_dim = pm.d
    if isinstance(task, RelationalCCTask):
        oc_task = relational_cc_to_oc(task, oc_dim, settings.prior_tol)
    else:
        oc_task = cc_to_oc(task, oc_dim, settings.prior_tol)
    p_nc_upper, _, _ = pnc_upper_bound(oc_task, settings.budget)
    p_nc_lower = sampled_oblivious_lower_bound(oc_task, settings.samples, settings.seed)
    states, povms = pm_to_oc_protocol(pm)
    oblivious = verify_oblivious(states, oc_task.cond_a2, settings.oblivious_tol, expected=np.eye(oc_dim) / oc_dim)
    if not oblivious.ok:
        logger.warning("Orthogonal-mixture states deviate from I/d by %.3g", oblivious.max_deviation)
    p_q_star = oc_quantum_value(oc_task, states, povms)

    c12 = c1 = None
    if p_cd is not None:
        if d_prime is None:
            c12 = condition_c12(p_cd, d, chi_value, p_c2)
        else:
            c1 = condition_c1(p_cd, d_prime, chi_value, p_c2)
    report = ViolationReport(
        task_id=task.task_id,
        d=d,
        p_G=p_g,
        p_C2=p_c2,
        p_Cd=p_cd,
        p_Qd=p_qd,
        chi=chi_value,
        d_prime=d_prime,
        p_NC_upper=p_nc_upper,
        p_NC_sampled_lower=p_nc_lower,
        p_Q_star=p_q_star,
        alpha_NC=p_nc_upper - 0.5,
        alpha_Q_star=p_q_star - 0.5,
        beta_lower=beta_ratio(p_q_star, p_c2) if p_c2 >= 0.5 else None,
        c12=c12,
        c1=c1,
        combined=combined_condition(p_c2, p_g, d),
        combined_value=combined_value(p_c2, p_g, d),
        violation=is_violation(p_q_star, p_c2),
    )
    log_run_event(
        "VERDICT",
        f"task={task.task_id} p_Q_star={p_q_star:.12g} p_C2={p_c2:.12g} violation={report.violation}",
    )
    return report
