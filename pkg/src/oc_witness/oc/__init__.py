"""Oblivious-communication tasks: encodings, PNC bounds, quantum values, strategy mapping."""

from oc_witness.oc.engine import (
    ObliviousnessReport,
    enumerate_extremal_encodings,
    extremal_to_cc_strategy,
    oblivious_encoding_value,
    oc_quantum_value,
    optimal_oc_decoding,
    pnc_upper_bound,
    random_oblivious_encoding,
    sampled_oblivious_lower_bound,
    verify_oblivious,
)
from oc_witness.oc.task import (
    ConstructionRecord,
    ExtremalEncoding,
    ObliviousEncoding,
    OCTask,
    ensure_valid_oc,
    validate_oc_task,
)

__all__ = [
    "OCTask",
    "ConstructionRecord",
    "ExtremalEncoding",
    "ObliviousEncoding",
    "ObliviousnessReport",
    "validate_oc_task",
    "ensure_valid_oc",
    "enumerate_extremal_encodings",
    "optimal_oc_decoding",
    "pnc_upper_bound",
    "oblivious_encoding_value",
    "random_oblivious_encoding",
    "sampled_oblivious_lower_bound",
    "oc_quantum_value",
    "verify_oblivious",
    "extremal_to_cc_strategy",
]
