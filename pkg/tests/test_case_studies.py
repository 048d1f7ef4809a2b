"""Tests for the built-in case studies and their recorded fixtures."""

import math

import pytest

from oc_witness.bell import bell_quantum_value, local_bound
from oc_witness.case_studies import (
    case_study,
    hidden_matching_beta,
    make_hidden_matching,
    matching_family,
    vector_in_subspace_beta,
)
from oc_witness.constructions import pm_to_oc_protocol, relational_cc_to_oc
from oc_witness.errors import DomainError
from oc_witness.oc.engine import oc_quantum_value
from oc_witness.quantum.protocols import chi, pm_value
from oc_witness.tasks.classical import best_classical_value, guessing_probability
from oc_witness.tasks.model import validate_task


def test_rac_fixtures_match_computed_values() -> None:
    study = case_study("rac")
    task = study.task
    assert best_classical_value(task, 2)[0] == pytest.approx(study.fixtures["p_C2"].value, abs=1e-12)
    assert guessing_probability(task) == pytest.approx(study.fixtures["p_G"].value, abs=1e-12)
    optimal, toy = study.protocols["optimal"], study.protocols["toy"]
    assert pm_value(task, optimal) == pytest.approx(study.fixtures["pm_value_optimal"].value, abs=1e-9)
    assert pm_value(task, toy) == pytest.approx(study.fixtures["pm_value_toy"].value, abs=1e-9)
    assert chi(task, optimal) == pytest.approx(study.fixtures["chi"].value, abs=1e-12)
    assert study.fixtures["p_C2"].provenance == "published"


def test_chsh_fixtures_match_computed_values() -> None:
    study = case_study("chsh")
    assert study.task is None
    assert local_bound(study.scenario)[0] == pytest.approx(study.fixtures["local_bound"].value)
    assert bell_quantum_value(study.scenario, study.realization) == pytest.approx(
        study.fixtures["quantum_value"].value, abs=1e-9
    )


def test_hidden_matching_four_fixtures() -> None:
    """pm_value 1, χ 2, OC value 0.75; p_C2 ties the OC value at n = 4."""
    study = case_study("hidden-matching", 4)
    task, protocol = study.task, study.protocols["protocol"]
    assert pm_value(task, protocol) == pytest.approx(1.0, abs=1e-9)
    assert chi(task, protocol) == pytest.approx(study.fixtures["chi"].value, abs=1e-9)
    states, povms = pm_to_oc_protocol(protocol)
    oc_value = oc_quantum_value(relational_cc_to_oc(task, 4), states, povms)
    assert oc_value == pytest.approx(study.fixtures["oc_quantum_value"].value, abs=1e-9)
    assert oc_value == pytest.approx(study.fixtures["p_C2"].value, abs=1e-9)


def test_hidden_matching_eight_uses_subfamily() -> None:
    family = matching_family(8)
    assert len(family) == 4
    assert family[-1] == ((0, 7), (1, 6), (2, 5), (3, 4))
    for matching in family:
        assert sorted(v for edge in matching for v in edge) == list(range(8))
    task, protocol = make_hidden_matching(8)
    assert validate_task(task).ok
    assert pm_value(task, protocol) == pytest.approx(1.0, abs=1e-9)
    assert chi(task, protocol) == pytest.approx(4.0, abs=1e-9)


def test_hidden_matching_two_and_four_families() -> None:
    assert matching_family(2) == [((0, 1),)]
    assert len(matching_family(4)) == 3


def test_hidden_matching_rejects_unsupported_size() -> None:
    with pytest.raises(DomainError):
        make_hidden_matching(6)


def test_unknown_case_study() -> None:
    with pytest.raises(DomainError):
        case_study("ghz")


def test_beta_helpers_spot_values() -> None:
    n = 2 ** 20
    assert vector_in_subspace_beta(n) == pytest.approx(0.436449, abs=1e-5)
    assert hidden_matching_beta(n) == pytest.approx(1.40381, abs=1e-5)
    assert hidden_matching_beta(4 * n) > hidden_matching_beta(n)


def test_fixture_values_are_consistent_with_closed_forms() -> None:
    study = case_study("rac")
    assert study.fixtures["pm_value_optimal"].value == pytest.approx(math.cos(math.pi / 8) ** 2)
    assert study.fixtures["pm_value_toy"].value == pytest.approx(0.801777, abs=1e-6)
