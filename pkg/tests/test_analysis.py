"""Tests for the end-to-end violation analysis."""

import logging
import math

import numpy as np
import pytest

from oc_witness.analysis import AnalysisConfig, analyze
from oc_witness.case_studies import make_hidden_matching, make_rac
from oc_witness.errors import InvalidStateError, OCWitnessError, ShapeMismatchError
from oc_witness.quantum.protocols import EAProtocol, PMProtocol, ea_value
from oc_witness.quantum.states import DensityMatrix, random_density_matrix, random_povm
from oc_witness.tasks.model import FunctionalCCTask


def _settings(**overrides) -> AnalysisConfig:
    values = {"samples": 40, "seed": 7}
    values.update(overrides)
    return AnalysisConfig(**values)


def _random_ea(rng: np.random.Generator, n_x: int, n_y: int) -> EAProtocol:
    return EAProtocol(
        shared=random_density_matrix(4, rng),
        d_a=2,
        d_b=2,
        alice_povms=tuple(random_povm(2, 2, rng) for _ in range(n_x)),
        bob_povms=tuple(tuple(random_povm(2, 2, rng) for _ in range(2)) for _ in range(n_y)),
    )


def test_rac_optimal_protocol_violates() -> None:
    task, optimal, _ = make_rac()
    report = analyze(task, optimal, settings=_settings())
    assert report.p_C2 == 0.75
    assert report.p_Cd == report.p_C2
    assert report.p_Qd == pytest.approx(math.cos(math.pi / 8) ** 2, abs=1e-9)
    assert report.chi == pytest.approx(1.0)
    assert report.p_Q_star == pytest.approx(report.p_Qd, abs=1e-9)
    assert report.p_NC_upper == pytest.approx(0.75, abs=1e-12)
    assert report.p_NC_sampled_lower <= report.p_NC_upper + 1e-9
    assert report.violation is True
    assert report.c12 is True
    assert report.c1 is None
    assert report.d_prime is None
    assert report.beta_lower == pytest.approx(math.sqrt(2), abs=1e-9)
    assert report.alpha_NC == pytest.approx(0.25)


def test_rac_toy_protocol_violates() -> None:
    task, _, toy = make_rac()
    report = analyze(task, toy, settings=_settings())
    assert report.p_Qd == pytest.approx(0.801777, abs=1e-6)
    assert report.violation is True


def test_hidden_matching_four_ties(caplog) -> None:
    """p_C4 is over budget (reported as None); the OC value ties p_C2, so no violation."""
    task, protocol = make_hidden_matching(4)
    with caplog.at_level(logging.WARNING, logger="oc_witness.analysis"):
        report = analyze(task, protocol, settings=_settings())
    assert report.d == 4
    assert report.p_Cd is None
    assert report.c12 is None
    assert "p_Cd not computed" in caplog.text
    assert report.p_Qd == pytest.approx(1.0, abs=1e-9)
    assert report.chi == pytest.approx(2.0, abs=1e-9)
    assert report.p_Q_star == pytest.approx(0.75, abs=1e-9)
    assert report.p_C2 == pytest.approx(0.75, abs=1e-12)
    assert report.violation is False


def test_entanglement_assisted_protocol_reports_converted_dimension() -> None:
    rng = np.random.default_rng(3)
    task, _, _ = make_rac()
    protocol = _random_ea(rng, task.n_x, task.n_y)
    report = analyze(task, protocol, settings=_settings())
    assert report.d == 2
    assert report.d_prime == 4
    assert report.p_Qd == pytest.approx(ea_value(task, protocol), abs=1e-9)
    assert report.c12 is None
    assert report.c1 is not None


def test_dimension_must_match_protocol() -> None:
    task, optimal, _ = make_rac()
    with pytest.raises(ShapeMismatchError):
        analyze(task, optimal, d=3, settings=_settings())


def test_verdict_is_audited(caplog) -> None:
    task, optimal, _ = make_rac()
    with caplog.at_level(logging.INFO, logger="oc_witness.audit"):
        analyze(task, optimal, settings=_settings())
    assert "VERDICT" in caplog.text
    assert "task=rac" in caplog.text


def test_tighter_state_tolerance_rejects_protocol() -> None:
    task, optimal, _ = make_rac()
    nudged = DensityMatrix(optimal.states[0].entries + 1e-10 * np.diag([1.0, 0.0]))
    protocol = PMProtocol(states=(nudged,) + optimal.states[1:], measurements=optimal.measurements)
    assert analyze(task, protocol, settings=_settings()).violation is True
    with pytest.raises(InvalidStateError, match="trace"):
        analyze(task, protocol, settings=_settings(state_tol=1e-12))


def test_prior_tolerance_controls_task_acceptance() -> None:
    task, optimal, _ = make_rac()
    prior = task.prior.copy()
    prior[0, 0] += 1e-8
    skewed = FunctionalCCTask(f=task.f, prior=prior, d=task.d, task_id="rac-skewed")
    with pytest.raises(OCWitnessError, match="prior not normalized"):
        analyze(skewed, optimal, settings=_settings())
    report = analyze(skewed, optimal, settings=_settings(prior_tol=1e-6))
    assert report.p_C2 == pytest.approx(0.75, abs=1e-7)
    assert report.violation is True


def test_analysis_config_validation() -> None:
    with pytest.raises(OCWitnessError):
        AnalysisConfig(budget=0)
    with pytest.raises(OCWitnessError):
        AnalysisConfig(samples=0)
    with pytest.raises(OCWitnessError):
        AnalysisConfig(state_tol=0.0)
