"""Tests for the quantum kernel: states, POVMs, PM / EA protocol values and conversions."""

import math

import numpy as np
import pytest

from oc_witness.case_studies import PAULI_X, make_hidden_matching, make_rac
from oc_witness.errors import DomainError, InvalidStateError, ShapeMismatchError, ZeroProbabilityBranchError
from oc_witness.quantum.protocols import (
    EAProtocol,
    PMProtocol,
    chi,
    cptp_ea_protocol,
    ea_to_pm,
    ea_to_pm_cptp,
    ea_value,
    pm_value,
)
from oc_witness.quantum.states import (
    DensityMatrix,
    Povm,
    binary_observable_povm,
    collapse_B,
    ket,
    maximally_entangled,
    maximally_mixed,
    orthogonal_mixture,
    partial_trace_A,
    pure_state,
    random_density_matrix,
    random_povm,
    random_pure_state,
    trivial_povm,
)
from oc_witness.tasks.classical import guessing_probability
from oc_witness.tasks.model import FunctionalCCTask


def _random_task(rng: np.random.Generator, n_x: int, n_y: int) -> FunctionalCCTask:
    f = rng.integers(0, 2, size=(n_x, n_y))
    prior = rng.dirichlet(np.ones(n_x * n_y)).reshape(n_x, n_y)
    return FunctionalCCTask(f=f, prior=prior)


def _random_ea(rng: np.random.Generator, n_x: int, n_y: int) -> EAProtocol:
    d_a, d_b, d = (int(v) for v in rng.integers(1, 4, size=3))
    d = max(d, 2)
    return EAProtocol(
        shared=random_density_matrix(d_a * d_b, rng),
        d_a=d_a,
        d_b=d_b,
        alice_povms=tuple(random_povm(d_a, d, rng) for _ in range(n_x)),
        bob_povms=tuple(tuple(random_povm(d_b, 2, rng) for _ in range(d)) for _ in range(n_y)),
    )


def _amplitude_damping(gamma: float) -> list:
    return [
        np.array([[1.0, 0.0], [0.0, math.sqrt(1.0 - gamma)]]),
        np.array([[0.0, math.sqrt(gamma)], [0.0, 0.0]]),
    ]


def test_density_matrix_rejects_non_hermitian() -> None:
    with pytest.raises(InvalidStateError, match="Hermitian"):
        DensityMatrix(np.array([[0.5, 0.5], [0.0, 0.5]]))


def test_density_matrix_rejects_wrong_trace() -> None:
    with pytest.raises(InvalidStateError, match="trace"):
        DensityMatrix(np.eye(2))


def test_density_matrix_rejects_negative_eigenvalue() -> None:
    with pytest.raises(InvalidStateError, match="positive"):
        DensityMatrix(np.diag([1.5, -0.5]))


def test_density_matrix_rejects_non_square() -> None:
    with pytest.raises(ShapeMismatchError):
        DensityMatrix(np.ones((2, 3)) / 2)


def test_povm_must_sum_to_identity() -> None:
    with pytest.raises(InvalidStateError, match="identity"):
        Povm(np.array([np.eye(2), np.eye(2)]))


def test_pure_state_fixes_global_phase() -> None:
    assert np.allclose(ket([1j, 0]), [1, 0])
    assert np.allclose(ket([0, -1]), [0, 1])
    assert np.allclose(pure_state([1j, 1j]).entries, pure_state([1, 1]).entries)


def test_trivial_povm_always_returns_outcome() -> None:
    povm = trivial_povm(3, n_outcomes=2, outcome=1)
    assert povm.traces().tolist() == [0.0, 3.0]


def test_orthogonal_mixture_completes_to_maximally_mixed() -> None:
    rng = np.random.default_rng(5)
    for d in (2, 3, 4):
        rho = random_density_matrix(d, rng)
        orth = orthogonal_mixture(rho)
        assert np.allclose((rho.entries + (d - 1) * orth.entries) / d, np.eye(d) / d)


def test_orthogonal_mixture_rejects_dimension_one() -> None:
    with pytest.raises(DomainError):
        orthogonal_mixture(maximally_mixed(1))


def test_partial_trace_of_maximally_entangled_is_maximally_mixed() -> None:
    reduced = partial_trace_A(maximally_entangled(3), 3, 3)
    assert np.allclose(reduced.entries, np.eye(3) / 3)


def test_collapse_b_on_bell_state() -> None:
    p, state = collapse_B(maximally_entangled(2), np.diag([1.0, 0.0]), 2, 2)
    assert p == pytest.approx(0.5)
    assert np.allclose(state.entries, np.diag([1.0, 0.0]))


def test_collapse_b_zero_probability_branch() -> None:
    product = pure_state([1, 0, 0, 0])
    with pytest.raises(ZeroProbabilityBranchError):
        collapse_B(product, np.diag([0.0, 1.0]), 2, 2)


def test_rac_protocol_values() -> None:
    """Optimal RAC reaches cos²(π/8), the toy protocol (5+√2)/8; χ = 1 for both."""
    task, optimal, toy = make_rac()
    assert pm_value(task, optimal) == pytest.approx(math.cos(math.pi / 8) ** 2, abs=1e-9)
    assert pm_value(task, toy) == pytest.approx(0.801777, abs=1e-6)
    assert chi(task, optimal) == pytest.approx(1.0, abs=1e-12)
    assert chi(task, toy) == pytest.approx(1.0, abs=1e-12)


def test_hidden_matching_protocol_is_perfect() -> None:
    task, protocol = make_hidden_matching(4)
    assert protocol.d == 4
    assert pm_value(task, protocol) == pytest.approx(1.0, abs=1e-9)
    assert chi(task, protocol) == pytest.approx(2.0, abs=1e-9)


def test_protocol_shape_mismatch() -> None:
    task, optimal, _ = make_rac()
    short = PMProtocol(states=optimal.states[:3], measurements=optimal.measurements)
    with pytest.raises(ShapeMismatchError):
        pm_value(task, short)
    with pytest.raises(ShapeMismatchError):
        PMProtocol(states=(maximally_mixed(3),), measurements=(binary_observable_povm(PAULI_X),))


def test_chi_bounded_by_dimension_times_guessing_probability() -> None:
    """χ ≤ d·p_G on random tasks and measurements."""
    rng = np.random.default_rng(2024)
    for _ in range(1000):
        n_x, n_y = (int(v) for v in rng.integers(1, 5, size=2))
        d = int(rng.integers(2, 5))
        task = _random_task(rng, n_x, n_y)
        protocol = PMProtocol(
            states=tuple(maximally_mixed(d) for _ in range(n_x)),
            measurements=tuple(random_povm(d, 2, rng) for _ in range(n_y)),
        )
        assert chi(task, protocol) <= d * guessing_probability(task) + 1e-9


def test_ea_to_pm_preserves_value() -> None:
    rng = np.random.default_rng(99)
    for _ in range(100):
        n_x, n_y = (int(v) for v in rng.integers(1, 4, size=2))
        task = _random_task(rng, n_x, n_y)
        protocol = _random_ea(rng, n_x, n_y)
        pm = ea_to_pm(protocol)
        assert pm.d == protocol.d * protocol.d_b
        assert pm_value(task, pm) == pytest.approx(ea_value(task, protocol), abs=1e-9)


def test_ea_protocol_rejects_wrong_message_rows() -> None:
    rng = np.random.default_rng(1)
    with pytest.raises(ShapeMismatchError, match="one per message"):
        EAProtocol(
            shared=maximally_entangled(2),
            d_a=2,
            d_b=2,
            alice_povms=(random_povm(2, 3, rng),),
            bob_povms=((random_povm(2, 2, rng), random_povm(2, 2, rng)),),
        )


def test_cptp_conversion_preserves_value() -> None:
    """Bob applies a message-dependent channel then a fixed measurement."""
    rng = np.random.default_rng(17)
    for _ in range(20):
        task = _random_task(rng, 3, 2)
        alice = [random_povm(2, 2, rng) for _ in range(3)]
        channels = [[np.eye(2)], _amplitude_damping(float(rng.uniform(0.1, 0.9)))]
        measurements = [random_povm(2, 2, rng) for _ in range(2)]
        shared = random_pure_state(4, rng)
        ea = cptp_ea_protocol(shared, 2, 2, alice, channels, measurements)
        pm = ea_to_pm_cptp(shared, 2, 2, alice, channels, measurements)
        assert pm.d == 2
        assert pm_value(task, pm) == pytest.approx(ea_value(task, ea), abs=1e-9)


def test_cptp_rejects_non_trace_preserving_channel() -> None:
    rng = np.random.default_rng(4)
    alice = [random_povm(2, 2, rng)]
    with pytest.raises(ShapeMismatchError, match="trace preserving"):
        cptp_ea_protocol(maximally_entangled(2), 2, 2, alice, [[np.eye(2)], [0.5 * np.eye(2)]], [random_povm(2, 2, rng)])
