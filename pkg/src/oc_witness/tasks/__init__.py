"""CC task model: functional and relational tasks, validation, classical optima."""

from oc_witness.tasks.classical import (
    best_classical_value,
    classical_optimum,
    guessing_probability,
    relational_classical_optimum,
    strategy_value,
)
from oc_witness.tasks.model import (
    CCTask,
    ClassicalStrategy,
    FunctionalCCTask,
    RelationalCCTask,
    ValidationResult,
    ensure_valid,
    is_binary_outcome,
    uniform_prior,
    validate_task,
)

__all__ = [
    "CCTask",
    "FunctionalCCTask",
    "RelationalCCTask",
    "ClassicalStrategy",
    "ValidationResult",
    "validate_task",
    "ensure_valid",
    "is_binary_outcome",
    "uniform_prior",
    "guessing_probability",
    "classical_optimum",
    "relational_classical_optimum",
    "best_classical_value",
    "strategy_value",
]
