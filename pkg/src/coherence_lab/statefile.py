"""JSON state files.

Pure state::

    {"dims": [2, 2], "amps": [[re, im], ...]}

Density matrix (row-major)::

    {"dims": [2, 2], "matrix": [[[re, im], ...], ...]}
"""

from __future__ import annotations

import json
from math import prod
from pathlib import Path

import numpy as np

from .errors import CoherenceLabError, SchemaError
from .hilbert import NORM_TOL, TRACE_TOL, DensityMatrix, StateVector, check_dims


def _complex(entry, where: str) -> complex:
    if isinstance(entry, (int, float)) and not isinstance(entry, bool):
        return complex(entry)
    if (
        isinstance(entry, list)
        and len(entry) == 2
        and all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in entry)
    ):
        return complex(entry[0], entry[1])
    raise SchemaError(f"{where}: expected [re, im], got {entry!r}")


def _dims(doc: dict, where: str) -> tuple[int, ...]:
    dims = doc.get("dims")
    if not isinstance(dims, list) or not all(isinstance(d, int) and not isinstance(d, bool) for d in dims):
        raise SchemaError(f"{where}: field 'dims' must be a list of integers")
    try:
        return check_dims(dims)
    except CoherenceLabError as exc:
        raise SchemaError(f"{where}: field 'dims': {exc}") from None


def parse_state(doc, normalize_check: bool = True, source: str = "<state>"):
    """Turn a decoded JSON document into a StateVector or DensityMatrix."""
    if not isinstance(doc, dict):
        raise SchemaError(f"{source}: top level must be an object")
    dims = _dims(doc, source)
    n = prod(dims)
    if "amps" in doc:
        raw = doc["amps"]
        if not isinstance(raw, list) or len(raw) != n:
            got = len(raw) if isinstance(raw, list) else type(raw).__name__
            raise SchemaError(f"{source}: field 'amps' must hold prod(dims) = {n} entries, got {got}")
        amps = np.array([_complex(a, f"{source}: amps[{i}]") for i, a in enumerate(raw)])
        norm2 = float(np.vdot(amps, amps).real)
        if normalize_check and abs(norm2 - 1.0) > NORM_TOL:
            raise SchemaError(f"{source}: norm mismatch, sum |amp|^2 = {norm2:.12g} (expected 1)")
        return StateVector.normalized(amps, dims)
    if "matrix" in doc:
        raw = doc["matrix"]
        if not isinstance(raw, list) or len(raw) != n or any(not isinstance(r, list) or len(r) != n for r in raw):
            raise SchemaError(f"{source}: field 'matrix' must be {n} rows of {n} entries")
        m = np.array(
            [[_complex(x, f"{source}: matrix[{i}][{j}]") for j, x in enumerate(row)] for i, row in enumerate(raw)]
        )
        tr = complex(np.trace(m)).real
        if abs(tr - 1.0) > TRACE_TOL:
            if normalize_check:
                raise SchemaError(f"{source}: trace mismatch, trace = {tr:.12g} (expected 1)")
            m = m / tr
        return DensityMatrix(dims, m)
    raise SchemaError(f"{source}: expected field 'amps' or 'matrix'")


def load_state(path, normalize_check: bool = True):
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise OSError(f"cannot read {path}: {exc.strerror or exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return parse_state(doc, normalize_check, str(path))


def _pair(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


def state_to_json(state) -> dict:
    if isinstance(state, StateVector):
        return {"dims": list(state.dims), "amps": [_pair(a) for a in state.amps]}
    if isinstance(state, DensityMatrix):
        return {"dims": list(state.dims), "matrix": [[_pair(z) for z in row] for row in state.matrix]}
    raise TypeError(f"cannot serialize {type(state).__name__}")


def save_state(state, path) -> None:
    Path(path).write_text(json.dumps(state_to_json(state), indent=1) + "\n")
