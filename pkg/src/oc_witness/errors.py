"""Exceptions raised by oc_witness. All derive from ValueError so callers can treat them as bad input."""


class OCWitnessError(ValueError):
    """Base class for every error raised by this package."""


class ShapeMismatchError(OCWitnessError):
    """Task, protocol or tensor shapes do not line up."""


class InvalidStateError(OCWitnessError):
    """A density matrix or POVM violates Hermiticity, positivity or normalization."""


class DomainError(OCWitnessError):
    """A scalar evaluator was called outside its stated domain."""


class ZeroProbabilityBranchError(OCWitnessError):
    """A collapse was requested on an outcome that (numerically) never occurs."""


class ProvenanceError(OCWitnessError):
    """An OC task was not built from the CC task it is being mapped back to."""


class BudgetExceededError(OCWitnessError):
    """Exhaustive enumeration would visit more points than the configured budget."""

    def __init__(self, required: int, budget: int, what: str = "assignments") -> None:
        self.required = required
        self.budget = budget
        super().__init__(
            f"enumeration budget exceeded: {required} {what} required, budget is {budget}"
        )


class SchemaError(OCWitnessError):
    """A JSON document does not match its schema. `pointer` locates the offending value."""

    def __init__(self, pointer: str, message: str) -> None:
        self.pointer = pointer or "/"
        super().__init__(f"{self.pointer}: {message}")

    def to_dict(self) -> dict:
        return {"error": str(self), "pointer": self.pointer}
