"""JSON wire formats for vectors, matrices, subspaces, and relations.

A complex scalar travels as a two-element list ``[re, im]``.  Subspace
objects are ``{"ambient_dim": n, "basis": [vector, ...]}``; the basis is
canonicalized on load, so it need not be orthonormal in the file.  A
relation object is ``{"dim_in": n, "dim_out": m, "repr": R}`` where R is
one of three shapes: a graph basis, a plain matrix, or an operator given
by domain basis, ambient image columns, and a multivalued part.  Dumps
always normalize to graph form and attach the derived subspace dims.

Every float is emitted through ``repr`` (the json module's default), so
serializing the same state twice gives byte-identical text.
"""

from __future__ import annotations

import json
import math

import numpy as np

from . import kernel
from .errors import FormatError
from .kernel import DEFAULT_TOL, Tolerances
from .relation import LinearRelation
from .subspace import Subspace

__all__ = [
    "load_complex",
    "dump_complex",
    "load_vector",
    "dump_vector",
    "load_matrix",
    "dump_matrix",
    "load_subspace",
    "dump_subspace",
    "load_relation",
    "dump_relation",
    "dump_diagnostics",
    "dump_block_representation",
    "dump_schur_result",
    "dumps",
]


def _real(obj, where: str) -> float:
    # bool is an int subclass; reject it explicitly
    if isinstance(obj, bool) or not isinstance(obj, (int, float)):
        raise FormatError(f"{where}: expected a number, got {type(obj).__name__}")
    if not math.isfinite(obj):
        raise FormatError(f"{where}: non-finite number {obj!r}")
    return float(obj)


def _int_field(obj: dict, key: str, where: str, minimum: int = 0) -> int:
    if key not in obj:
        raise FormatError(f"{where}: missing field '{key}'")
    value = obj[key]
    if isinstance(value, bool) or not isinstance(value, int):
        raise FormatError(f"{where}: field '{key}' must be an integer")
    if value < minimum:
        raise FormatError(f"{where}: field '{key}' must be >= {minimum}")
    return value


def _list_field(obj: dict, key: str, where: str) -> list:
    if key not in obj:
        raise FormatError(f"{where}: missing field '{key}'")
    value = obj[key]
    if not isinstance(value, list):
        raise FormatError(f"{where}: field '{key}' must be a list")
    return value


def load_complex(obj, where: str = "complex") -> complex:
    """One scalar from a ``[re, im]`` pair."""
    if not isinstance(obj, list) or len(obj) != 2:
        raise FormatError(f"{where}: expected a two-element [re, im] list")
    return complex(_real(obj[0], where), _real(obj[1], where))


def dump_complex(z) -> list:
    z = complex(z)
    return [float(z.real), float(z.imag)]


def load_vector(obj, length: int, where: str = "vector") -> np.ndarray:
    if not isinstance(obj, list):
        raise FormatError(f"{where}: expected a list of complex entries")
    if len(obj) != length:
        raise FormatError(f"{where}: expected {length} entries, got {len(obj)}")
    out = np.zeros(length, dtype=np.complex128)
    for i, entry in enumerate(obj):
        out[i] = load_complex(entry, f"{where}[{i}]")
    return out


def dump_vector(v) -> list:
    return [dump_complex(z) for z in np.asarray(v, dtype=np.complex128).ravel()]


def load_matrix(obj, rows: int, cols: int, where: str = "matrix") -> np.ndarray:
    """Row-major matrix of ``[re, im]`` entries with an expected shape."""
    if not isinstance(obj, list):
        raise FormatError(f"{where}: expected a list of rows")
    if len(obj) != rows:
        raise FormatError(f"{where}: expected {rows} rows, got {len(obj)}")
    out = np.zeros((rows, cols), dtype=np.complex128)
    for i, row in enumerate(obj):
        out[i] = load_vector(row, cols, f"{where}[{i}]")
    return out


def dump_matrix(m) -> list:
    m = np.asarray(m, dtype=np.complex128)
    if m.ndim != 2:
        raise FormatError(f"matrix dump: expected 2 dimensions, got {m.ndim}")
    return [dump_vector(row) for row in m]


def _columns(entries: list, length: int, where: str) -> np.ndarray:
    cols = np.zeros((length, len(entries)), dtype=np.complex128)
    for j, entry in enumerate(entries):
        cols[:, j] = load_vector(entry, length, f"{where}[{j}]")
    return cols


def load_subspace(obj, tol: Tolerances = DEFAULT_TOL,
                  where: str = "subspace") -> Subspace:
    """Subspace from JSON; the stored basis is canonicalized."""
    if not isinstance(obj, dict):
        raise FormatError(f"{where}: expected an object")
    n = _int_field(obj, "ambient_dim", where)
    cols = _columns(_list_field(obj, "basis", where), n, f"{where}.basis")
    return Subspace(n, kernel.orthonormal_columns(cols, tol))


def dump_subspace(s: Subspace) -> dict:
    return {
        "ambient_dim": s.ambient_dim,
        "basis": [dump_vector(col) for col in s.basis.T],
    }


def load_relation(obj, tol: Tolerances = DEFAULT_TOL,
                  where: str = "relation") -> LinearRelation:
    """Relation from JSON, accepting graph, matrix, or operator+mul form."""
    if not isinstance(obj, dict):
        raise FormatError(f"{where}: expected an object")
    din = _int_field(obj, "dim_in", where)
    dout = _int_field(obj, "dim_out", where)
    rep = obj.get("repr")
    if not isinstance(rep, dict):
        raise FormatError(f"{where}: missing or non-object field 'repr'")
    kind = rep.get("type")

    if kind == "graph":
        cols = _columns(_list_field(rep, "basis", f"{where}.repr"),
                        din + dout, f"{where}.repr.basis")
        graph = Subspace(din + dout, kernel.orthonormal_columns(cols, tol))
        return LinearRelation(din, dout, graph, tol=tol)

    if kind == "matrix":
        m = load_matrix(rep.get("matrix"), dout, din, f"{where}.repr.matrix")
        return LinearRelation.from_matrix(m, tol)

    if kind == "operator_mul":
        dom_entries = _list_field(rep, "domain_basis", f"{where}.repr")
        dom_cols = _columns(dom_entries, din, f"{where}.repr.domain_basis")
        images = load_matrix(rep.get("matrix_on_domain"), dout, len(dom_entries),
                             f"{where}.repr.matrix_on_domain")
        mul_cols = _columns(_list_field(rep, "mul_basis", f"{where}.repr"),
                            dout, f"{where}.repr.mul_basis")
        # graph spanned by (domain column, image column) pairs plus {0} x mul
        op_part = np.vstack([dom_cols, images])
        mul_part = np.vstack([
            np.zeros((din, mul_cols.shape[1]), dtype=np.complex128), mul_cols,
        ])
        cols = np.hstack([op_part, mul_part])
        graph = Subspace(din + dout, kernel.orthonormal_columns(cols, tol))
        return LinearRelation(din, dout, graph, tol=tol)

    raise FormatError(f"{where}: unknown repr type {kind!r}")


def dump_relation(rel: LinearRelation, validated: bool = False) -> dict:
    """Relation to JSON, normalized to graph form with derived dims."""
    obj = {
        "dim_in": rel.dim_in,
        "dim_out": rel.dim_out,
        "repr": {
            "type": "graph",
            "basis": [dump_vector(col) for col in rel.graph.basis.T],
        },
        "dom_dim": rel.dom.dim,
        "ran_dim": rel.ran.dim,
        "ker_dim": rel.ker.dim,
        "mul_dim": rel.mul.dim,
    }
    if validated:
        obj["validated"] = True
    return obj


def dump_diagnostics(diag: dict) -> dict:
    """Residual dict to JSON-safe values (floats, or lists of floats)."""
    out = {}
    for key, value in diag.items():
        if isinstance(value, (tuple, list)):
            out[str(key)] = [float(v) for v in value]
        else:
            out[str(key)] = float(value)
    return out


def dump_block_representation(rep) -> dict:
    """Block decomposition to JSON: corner relations, matrices, subspaces."""
    return {
        "a": dump_relation(rep.a),
        "b": dump_relation(rep.b),
        "c": dump_relation(rep.c),
        "d": dump_relation(rep.d),
        "f": dump_matrix(rep.f),
        "g": dump_matrix(rep.g),
        "v1": dump_matrix(rep.v1),
        "v2": dump_matrix(rep.v2),
        "s": dump_subspace(rep.s),
        "d1": dump_subspace(rep.d1),
        "d2": dump_subspace(rep.d2),
        "m1": dump_subspace(rep.m1),
        "m2": dump_subspace(rep.m2),
        "n1": dump_subspace(rep.n1),
        "n2": dump_subspace(rep.n2),
        "diagnostics": dump_diagnostics(rep.diagnostics),
    }


def dump_schur_result(res) -> dict:
    """Complement/compression pair to JSON with per-identity residuals."""
    return {
        "schur": dump_relation(res.schur.rel, validated=True),
        "compression": dump_relation(res.compression.rel, validated=True),
        "L": dump_subspace(res.l_space),
        "diagnostics": dump_diagnostics(res.diagnostics),
    }


def dumps(obj) -> str:
    """Deterministic JSON text: sorted keys, repr floats, trailing newline."""
    return json.dumps(obj, sort_keys=True, indent=2, allow_nan=False) + "\n"
