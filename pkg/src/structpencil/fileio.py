"""JSON pencil and vector files.

Complex entries are stored as ``[re, im]`` pairs and matrices as row-major
nested lists. Python's float repr round-trips doubles exactly, so a
write/read cycle is lossless for finite values.
"""

from __future__ import annotations

import json
import math
import re
from pathlib import Path

import numpy as np

from .errors import InvalidPencil, StructPencilError
from .model import StructuredPencil

__all__ = [
    "SCHEMA_VERSION",
    "FileFormatError",
    "pencil_to_dict",
    "pencil_from_dict",
    "write_pencil",
    "read_pencil",
    "read_pencil_metadata",
    "vectors_to_dict",
    "vectors_from_dict",
    "write_vectors",
    "read_vectors",
    "parse_lambda",
]

SCHEMA_VERSION = 1
BLOCK_NAMES = ("J", "R", "E", "B", "S")


class FileFormatError(StructPencilError, ValueError):
    """Malformed pencil or vector file."""


def _encode_number(z) -> list[float]:
    z = complex(z)
    return [float(z.real), float(z.imag)]


def _encode_matrix(A: np.ndarray) -> list:
    return [[_encode_number(v) for v in row] for row in np.asarray(A)]


def _decode_number(v, where: str) -> complex:
    ok = (
        isinstance(v, list)
        and len(v) == 2
        and all(isinstance(t, (int, float)) and not isinstance(t, bool) for t in v)
    )
    if not ok:
        raise FileFormatError(f"{where}: expected an [re, im] pair of numbers, got {v!r}")
    if not all(math.isfinite(t) for t in v):
        raise FileFormatError(f"{where}: non-finite value {v!r}")
    return complex(float(v[0]), float(v[1]))


def _decode_matrix(data, name: str, shape: tuple[int, int]) -> np.ndarray:
    rows, cols = shape
    if not isinstance(data, list) or len(data) != rows:
        got = len(data) if isinstance(data, list) else type(data).__name__
        raise FileFormatError(f"{name}: expected {rows} rows, got {got}")
    out = np.empty(shape, dtype=complex)
    for i, row in enumerate(data):
        if not isinstance(row, list) or len(row) != cols:
            got = len(row) if isinstance(row, list) else type(row).__name__
            raise FileFormatError(f"{name}[{i}]: expected {cols} entries, got {got}")
        for j, v in enumerate(row):
            out[i, j] = _decode_number(v, f"{name}[{i}][{j}] (row {i}, column {j})")
    return out


def _decode_vector(data, name: str, length: int | None = None) -> np.ndarray:
    if not isinstance(data, list):
        raise FileFormatError(f"{name}: expected a list of [re, im] pairs")
    if length is not None and len(data) != length:
        raise FileFormatError(f"{name}: expected {length} entries, got {len(data)}")
    return np.array([_decode_number(v, f"{name}[{i}]") for i, v in enumerate(data)], dtype=complex)


def _check_version(data: dict) -> None:
    if not isinstance(data, dict):
        raise FileFormatError("top level must be a JSON object")
    version = data.get("schema_version")
    if version != SCHEMA_VERSION:
        raise FileFormatError(f"schema_version: expected {SCHEMA_VERSION}, got {version!r}")


def _positive_int(data: dict, key: str) -> int:
    v = data.get(key)
    if not isinstance(v, int) or isinstance(v, bool) or v < 1:
        raise FileFormatError(f"{key}: expected a positive integer, got {v!r}")
    return v


def pencil_to_dict(p: StructuredPencil, metadata: dict | None = None) -> dict:
    out = {"schema_version": SCHEMA_VERSION, "n": p.n, "m": p.m}
    for name, A in p.blocks().items():
        out[name] = _encode_matrix(A)
    if metadata:
        out["metadata"] = dict(metadata)
    return out


def pencil_from_dict(data: dict) -> StructuredPencil:
    _check_version(data)
    n, m = _positive_int(data, "n"), _positive_int(data, "m")
    shapes = {"J": (n, n), "R": (n, n), "E": (n, n), "B": (n, m), "S": (m, m)}
    blocks = {}
    for name in BLOCK_NAMES:
        if name not in data:
            raise FileFormatError(f"{name}: missing block")
        blocks[name] = _decode_matrix(data[name], name, shapes[name])
    try:
        return StructuredPencil(**blocks)
    except InvalidPencil as exc:
        raise FileFormatError(str(exc)) from exc


def write_pencil(path, p: StructuredPencil, metadata: dict | None = None) -> None:
    Path(path).write_text(json.dumps(pencil_to_dict(p, metadata), indent=1) + "\n")


def _load_json(path) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise FileFormatError(f"{path}: invalid JSON ({exc})") from exc


def read_pencil(path) -> StructuredPencil:
    return pencil_from_dict(_load_json(path))


def read_pencil_metadata(path) -> dict:
    return dict(_load_json(path).get("metadata") or {})


def vectors_to_dict(x1, x2, x3) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "x1": [_encode_number(v) for v in np.ravel(x1)],
        "x2": [_encode_number(v) for v in np.ravel(x2)],
        "x3": [_encode_number(v) for v in np.ravel(x3)],
    }


def vectors_from_dict(data: dict, n: int | None = None, m: int | None = None):
    _check_version(data)
    out = []
    for name, length in (("x1", n), ("x2", n), ("x3", m)):
        if name not in data:
            raise FileFormatError(f"{name}: missing vector")
        out.append(_decode_vector(data[name], name, length))
    return tuple(out)


def write_vectors(path, x1, x2, x3) -> None:
    Path(path).write_text(json.dumps(vectors_to_dict(x1, x2, x3), indent=1) + "\n")


def read_vectors(path, n: int | None = None, m: int | None = None):
    return vectors_from_dict(_load_json(path), n, m)


_I_FORM = re.compile(r"^\s*([+-]?)\s*i\s*([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)\s*$")


def parse_lambda(text: str) -> complex:
    """Parse ``"i0.25"``, ``"-i2"``, ``"i-2"`` or any Python complex literal such as ``"0.25j"``."""
    match = _I_FORM.match(text)
    if match:
        sign = -1.0 if match.group(1) == "-" else 1.0
        return complex(0.0, sign * float(match.group(2)))
    try:
        return complex(text.replace(" ", "").replace("i", "j"))
    except ValueError as exc:
        raise FileFormatError(f"cannot parse lambda {text!r}; expected the form i<real>, e.g. i0.25") from exc
