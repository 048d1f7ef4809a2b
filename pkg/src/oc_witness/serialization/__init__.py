"""JSON persistence: value codec and versioned domain documents."""

from oc_witness.serialization.codec import decode_matrix, dumps, encode_matrix, read_json, write_json
from oc_witness.serialization.documents import (
    bell_from_doc,
    bell_to_doc,
    casestudy_from_doc,
    casestudy_to_doc,
    fragment_from_doc,
    fragment_to_doc,
    oc_bundle_from_doc,
    oc_bundle_to_doc,
    octask_from_doc,
    octask_to_doc,
    problem_pointer,
    protocol_from_doc,
    protocol_to_doc,
    realization_from_doc,
    realization_to_doc,
    report_from_doc,
    report_to_doc,
    task_from_doc,
    task_to_doc,
)

__all__ = [
    "decode_matrix",
    "encode_matrix",
    "dumps",
    "read_json",
    "write_json",
    "task_to_doc",
    "task_from_doc",
    "problem_pointer",
    "protocol_to_doc",
    "protocol_from_doc",
    "octask_to_doc",
    "octask_from_doc",
    "oc_bundle_to_doc",
    "oc_bundle_from_doc",
    "bell_to_doc",
    "bell_from_doc",
    "realization_to_doc",
    "realization_from_doc",
    "fragment_to_doc",
    "fragment_from_doc",
    "report_to_doc",
    "report_from_doc",
    "casestudy_to_doc",
    "casestudy_from_doc",
]
