"""JSON family and state files.

A family file looks like::

    {"dim": 2,
     "kraus": [[[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.7071, 0.0]]], ...],
     "tolerance": 1e-9,
     "metadata": {...}}

Each matrix is a list of rows and each entry a ``[re, im]`` pair. A state
file is ``{"dim": d, "psi": [[re, im], ...]}``. Floats are written with
``repr`` precision, so writing and re-reading reproduces every bit.
"""

from __future__ import annotations

import json
import numbers
from pathlib import Path

import numpy as np

from .channel import DEFAULT_TOL, KrausFamily
from .errors import FormatError

__all__ = [
    "STATE_NORM_TOL",
    "complex_to_json",
    "family_to_dict",
    "family_from_dict",
    "read_family",
    "write_family",
    "state_to_dict",
    "state_from_dict",
    "read_state",
    "write_state",
]

STATE_NORM_TOL = 1e-6


def complex_to_json(a):
    """Nested lists with every complex entry replaced by ``[re, im]``."""
    arr = np.asarray(a)
    if arr.ndim == 0:
        z = complex(arr)
        return [z.real, z.imag]
    return [complex_to_json(x) for x in arr]


def _is_number(x) -> bool:
    return isinstance(x, numbers.Real) and not isinstance(x, bool)


def _entry(x, where: str) -> complex:
    if not isinstance(x, list) or len(x) != 2 or not all(_is_number(v) for v in x):
        raise FormatError(f"{where}: expected a [re, im] pair of numbers, got {x!r}")
    z = complex(float(x[0]), float(x[1]))
    if not np.isfinite(z.real) or not np.isfinite(z.imag):
        raise FormatError(f"{where}: non-finite entry")
    return z


def _dim(doc: dict, where: str = "dim") -> int:
    d = doc.get("dim")
    if not isinstance(d, int) or isinstance(d, bool) or d < 1:
        raise FormatError(f"{where}: expected a positive integer, got {d!r}")
    return d


def family_to_dict(F: KrausFamily, metadata: dict | None = None) -> dict:
    doc = {"dim": F.dim, "kraus": complex_to_json(F.ops), "tolerance": F.tol}
    if metadata:
        doc["metadata"] = metadata
    return doc


def family_from_dict(doc) -> KrausFamily:
    """Parse a family document, naming the first malformed position on error."""
    if not isinstance(doc, dict):
        raise FormatError("family file: top level must be an object")
    d = _dim(doc)
    kraus = doc.get("kraus")
    if not isinstance(kraus, list) or not kraus:
        raise FormatError("kraus: expected a non-empty list of matrices")
    ops = np.empty((len(kraus), d, d), dtype=np.complex128)
    for a, mat in enumerate(kraus):
        if not isinstance(mat, list) or len(mat) != d:
            raise FormatError(f"kraus[{a}]: expected {d} rows")
        for i, row in enumerate(mat):
            if not isinstance(row, list) or len(row) != d:
                got = len(row) if isinstance(row, list) else type(row).__name__
                raise FormatError(f"kraus[{a}][{i}]: expected {d} entries, got {got}")
            for j, x in enumerate(row):
                ops[a, i, j] = _entry(x, f"kraus[{a}][{i}][{j}]")
    tol = doc.get("tolerance", DEFAULT_TOL)
    if tol is None:
        tol = DEFAULT_TOL
    if not _is_number(tol) or not tol > 0:
        raise FormatError(f"tolerance: expected a positive number, got {tol!r}")
    meta = doc.get("metadata")
    if meta is not None and not isinstance(meta, dict):
        raise FormatError("metadata: expected an object")
    return KrausFamily(ops, float(tol))


def read_family(path) -> KrausFamily:
    return family_from_dict(_load(path))


def write_family(F: KrausFamily, path, metadata: dict | None = None):
    Path(path).write_text(json.dumps(family_to_dict(F, metadata)) + "\n")


def state_to_dict(psi) -> dict:
    psi = np.asarray(psi, dtype=np.complex128).reshape(-1)
    return {"dim": int(psi.size), "psi": complex_to_json(psi)}


def state_from_dict(doc) -> tuple[np.ndarray, float]:
    """Parse a state document; returns the normalized vector and its original norm.

    Vectors whose norm is within ``1e-6`` of one are rescaled to unit norm;
    others are rejected.
    """
    if not isinstance(doc, dict):
        raise FormatError("state file: top level must be an object")
    d = _dim(doc)
    raw = doc.get("psi")
    if not isinstance(raw, list) or len(raw) != d:
        raise FormatError(f"psi: expected {d} entries")
    psi = np.array([_entry(x, f"psi[{j}]") for j, x in enumerate(raw)], dtype=np.complex128)
    norm = float(np.linalg.norm(psi))
    if abs(norm - 1.0) > STATE_NORM_TOL:
        raise FormatError(f"psi: norm {norm:.12g} is not within {STATE_NORM_TOL:g} of 1")
    return psi / norm, norm


def read_state(path) -> tuple[np.ndarray, float]:
    return state_from_dict(_load(path))


def write_state(psi, path):
    Path(path).write_text(json.dumps(state_to_dict(psi)) + "\n")


def _load(path):
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}") from exc
