"""Low-level JSON value codec: complex matrices as [re, im] pairs, pointer-aware field access."""

import json
import sys
from pathlib import Path
from typing import Any, List, Optional, Sequence

import numpy as np

from oc_witness import config
from oc_witness.errors import SchemaError


def child(pointer: str, key: Any) -> str:
    """JSON pointer of `key` under `pointer` (RFC 6901 escaping)."""
    token = str(key).replace("~", "~0").replace("/", "~1")
    return f"{pointer.rstrip('/')}/{token}"


def field(doc: Any, key: str, pointer: str = "") -> Any:
    if not isinstance(doc, dict):
        raise SchemaError(pointer, "expected an object")
    if key not in doc:
        raise SchemaError(child(pointer, key), "missing required field")
    return doc[key]


def check_header(doc: Any, kinds: Sequence[str], pointer: str = "") -> str:
    """Validate "v" and "kind"; return the kind."""
    version = field(doc, "v", pointer)
    if version != config.SCHEMA_VERSION:
        raise SchemaError(child(pointer, "v"), f"unsupported schema version {version!r}")
    kind = field(doc, "kind", pointer)
    if kind not in kinds:
        raise SchemaError(child(pointer, "kind"), f"expected kind in {list(kinds)}, got {kind!r}")
    return kind


def header(kind: str) -> dict:
    return {"v": config.SCHEMA_VERSION, "kind": kind}


def as_int(value: Any, pointer: str, minimum: Optional[int] = None) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise SchemaError(pointer, f"expected an integer, got {value!r}")
    if minimum is not None and value < minimum:
        raise SchemaError(pointer, f"must be >= {minimum}, got {value}")
    return value


def real_array(value: Any, pointer: str, ndim: int) -> np.ndarray:
    """Rectangular nested list of numbers with exactly `ndim` levels."""
    try:
        arr = np.asarray(value, dtype=float)
    except (TypeError, ValueError):
        raise SchemaError(pointer, "expected a rectangular array of numbers") from None
    if arr.ndim != ndim:
        raise SchemaError(pointer, f"expected a {ndim}-D array, got {arr.ndim}-D")
    return arr


def encode_complex(z: complex) -> List[float]:
    return [float(np.real(z)), float(np.imag(z))]


def encode_matrix(m: np.ndarray) -> List[List[List[float]]]:
    """Row-major list of rows, each entry [re, im]."""
    return [[encode_complex(z) for z in row] for row in np.asarray(m)]


def decode_matrix(value: Any, pointer: str) -> np.ndarray:
    """Square complex matrix from rows of [re, im] pairs (bare numbers are read as real)."""
    if not isinstance(value, list) or not value:
        raise SchemaError(pointer, "expected a non-empty list of rows")
    n = len(value)
    out = np.zeros((n, n), dtype=complex)
    for i, row in enumerate(value):
        row_ptr = child(pointer, i)
        if not isinstance(row, list) or len(row) != n:
            raise SchemaError(row_ptr, f"expected a row of {n} entries")
        for j, entry in enumerate(row):
            if isinstance(entry, (int, float)) and not isinstance(entry, bool):
                out[i, j] = entry
            elif (
                isinstance(entry, list)
                and len(entry) == 2
                and all(isinstance(p, (int, float)) and not isinstance(p, bool) for p in entry)
            ):
                out[i, j] = complex(entry[0], entry[1])
            else:
                raise SchemaError(child(row_ptr, j), "expected [re, im]")
    return out


def read_json(source: Optional[str]) -> Any:
    """Parse a JSON document from a path, or from stdin when source is None or '-'."""
    try:
        if source in (None, "-"):
            return json.load(sys.stdin)
        return json.loads(Path(source).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SchemaError("", f"invalid JSON: {exc}") from None
    except OSError as exc:
        raise SchemaError("", f"cannot read {source}: {exc.strerror}") from None


def dumps(doc: Any) -> str:
    """Canonical rendering: sorted keys, fixed indent, so equal inputs give identical bytes."""
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def write_json(doc: Any, out: Optional[str] = None) -> None:
    text = dumps(doc)
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")
