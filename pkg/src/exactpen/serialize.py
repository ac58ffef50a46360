"""JSON documents for instances and run reports.

Instances round-trip losslessly: floats are emitted via repr, the shortest
decimal that parses back to the same binary value, and the document layout
is canonical (sorted keys, fixed structure), so emit(parse(emit(x))) is
byte-identical to emit(x). Reports carry a kind tag, an input echo with the
instance hash, a payload mirroring the producing module's types, and
timings; everything but the timings is deterministic for a fixed seed.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
from typing import Any

import numpy as np

from .errors import SchemaError
from .model import (
    BlockPoint,
    Instance,
    Monomial,
    MultiAffineObjective,
    Polyhedron,
)

SCHEMA_VERSION = "1"
REPORT_KINDS = ("solve", "certify", "probe", "enumerate")

# A pairwise coupling is stored as triplets once fewer than a third of its
# entries are nonzero; below that density the triplet form is smaller.
_SPARSE_DENSITY = 1.0 / 3.0


def _fail(path: str, message: str):
    raise SchemaError(f"{path}: {message}")


def _get(doc: dict, path: str, key: str, required: bool = True, default=None):
    if not isinstance(doc, dict):
        _fail(path, "expected an object")
    if key not in doc:
        if required:
            _fail(path, f"missing required field '{key}'")
        return default
    return doc[key]


def _matrix(obj, path: str) -> np.ndarray:
    try:
        arr = np.asarray(obj, dtype=float)
    except (TypeError, ValueError):
        _fail(path, "expected a rectangular array of numbers")
    if arr.ndim != 2:
        _fail(path, "expected a two-dimensional array")
    return arr


def _vector(obj, path: str) -> np.ndarray:
    try:
        arr = np.asarray(obj, dtype=float)
    except (TypeError, ValueError):
        _fail(path, "expected an array of numbers")
    if arr.ndim != 1:
        _fail(path, "expected a one-dimensional array")
    return arr


def _pairwise_matrix(entry, m: int, path: str) -> tuple[int, int, np.ndarray]:
    i = _get(entry, path, "i")
    j = _get(entry, path, "j")
    if not isinstance(i, int) or not isinstance(j, int):
        _fail(path, "block indices i and j must be integers")
    if i >= j:
        _fail(path, f"pair key must have i < j, got i={i}, j={j}")
    has_dense = "dense" in entry
    has_triplets = "triplets" in entry
    if has_dense == has_triplets:
        _fail(path, "exactly one of 'dense' or 'triplets' is required")
    if has_dense:
        mat = _matrix(entry["dense"], f"{path}.dense")
        if mat.shape != (m, m):
            _fail(path, f"dense coupling must be {m}x{m}, got {mat.shape}")
        return i, j, mat
    mat = np.zeros((m, m))
    for k, trip in enumerate(entry["triplets"]):
        tpath = f"{path}.triplets[{k}]"
        if not isinstance(trip, (list, tuple)) or len(trip) != 3:
            _fail(tpath, "expected [row, col, value]")
        r, c, v = trip
        if not isinstance(r, int) or not isinstance(c, int):
            _fail(tpath, "row and col must be integers")
        if not (0 <= r < m and 0 <= c < m):
            _fail(tpath, f"indices out of range for dimension {m}")
        mat[r, c] = float(v)
    return i, j, mat


def _polyhedron(entry, m: int, path: str) -> Polyhedron:
    def system(key):
        block = _get(entry, path, key, required=False)
        if block is None:
            return None, None
        mat = _matrix(_get(block, f"{path}.{key}", "matrix"), f"{path}.{key}.matrix")
        rhs = _vector(_get(block, f"{path}.{key}", "rhs"), f"{path}.{key}.rhs")
        return mat, rhs

    eq_matrix, eq_rhs = system("eq")
    ineq_matrix, ineq_rhs = system("ineq")
    nonneg = _get(entry, path, "nonneg", required=False, default=True)
    if not isinstance(nonneg, bool):
        _fail(path, "nonneg must be a boolean")
    try:
        return Polyhedron(
            dim=m,
            eq_matrix=eq_matrix,
            eq_rhs=eq_rhs,
            ineq_matrix=ineq_matrix,
            ineq_rhs=ineq_rhs,
            nonneg=nonneg,
        )
    except Exception as exc:
        _fail(path, str(exc))


def document_to_instance(doc: Any) -> Instance:
    """Validate a parsed document and build the Instance it describes."""
    if not isinstance(doc, dict):
        _fail("$", "top-level value must be an object")
    version = _get(doc, "$", "schema_version")
    if version != SCHEMA_VERSION:
        _fail("$.schema_version", f"unsupported version {version!r}")
    obj_doc = _get(doc, "$", "objective")
    linear = _matrix(_get(obj_doc, "$.objective", "linear"), "$.objective.linear")
    n, m = linear.shape
    constant = _get(obj_doc, "$.objective", "constant", required=False, default=0.0)
    if not isinstance(constant, (int, float)) or isinstance(constant, bool):
        _fail("$.objective.constant", "expected a number")
    pairwise = {}
    entries = _get(obj_doc, "$.objective", "pairwise", required=False, default=[])
    if not isinstance(entries, list):
        _fail("$.objective.pairwise", "expected a list")
    for k, entry in enumerate(entries):
        path = f"$.objective.pairwise[{k}]"
        i, j, mat = _pairwise_matrix(entry, m, path)
        if (i, j) in pairwise:
            _fail(path, f"duplicate pair ({i}, {j})")
        pairwise[(i, j)] = mat
    terms = []
    raw_terms = _get(obj_doc, "$.objective", "higher_terms", required=False, default=[])
    if not isinstance(raw_terms, list):
        _fail("$.objective.higher_terms", "expected a list")
    for k, entry in enumerate(raw_terms):
        path = f"$.objective.higher_terms[{k}]"
        coeff = _get(entry, path, "coeff")
        factors = _get(entry, path, "factors")
        if not isinstance(factors, list):
            _fail(f"{path}.factors", "expected a list of [block, coord] pairs")
        try:
            terms.append(
                Monomial(float(coeff), tuple((int(b), int(c)) for b, c in factors))
            )
        except Exception as exc:
            _fail(path, str(exc))
    polys_doc = _get(doc, "$", "polyhedra")
    if not isinstance(polys_doc, list):
        _fail("$.polyhedra", "expected a list")
    if len(polys_doc) != n:
        _fail(
            "$.polyhedra",
            f"expected one polyhedron per block ({n}), got {len(polys_doc)}",
        )
    polyhedra = tuple(
        _polyhedron(entry, m, f"$.polyhedra[{k}]")
        for k, entry in enumerate(polys_doc)
    )
    warnings = _get(doc, "$", "warnings", required=False, default=[])
    if not isinstance(warnings, list) or not all(
        isinstance(w, str) for w in warnings
    ):
        _fail("$.warnings", "expected a list of strings")
    try:
        objective = MultiAffineObjective(
            n_blocks=n,
            block_dim=m,
            constant=float(constant),
            linear=linear,
            pairwise=pairwise,
            higher_terms=tuple(terms),
        )
        return Instance(
            objective=objective, polyhedra=polyhedra, warnings=tuple(warnings)
        )
    except Exception as exc:
        _fail("$", str(exc))


def instance_to_document(inst: Instance) -> dict:
    """Canonical plain-data form of an instance."""
    obj = inst.objective
    m = inst.block_dim
    pairwise = []
    for (i, j) in sorted(obj.pairwise):
        mat = obj.pairwise[(i, j)]
        nonzero = np.argwhere(mat != 0.0)
        entry: dict[str, Any] = {"i": int(i), "j": int(j)}
        if len(nonzero) < _SPARSE_DENSITY * m * m:
            entry["triplets"] = [
                [int(r), int(c), float(mat[r, c])] for r, c in nonzero
            ]
        else:
            entry["dense"] = mat.tolist()
        pairwise.append(entry)
    doc: dict[str, Any] = {
        "schema_version": SCHEMA_VERSION,
        "objective": {
            "constant": float(obj.constant),
            "linear": obj.linear.tolist(),
            "pairwise": pairwise,
            "higher_terms": [
                {
                    "coeff": float(t.coeff),
                    "factors": [[int(b), int(c)] for b, c in t.factors],
                }
                for t in obj.higher_terms
            ],
        },
        "polyhedra": [],
        "warnings": list(inst.warnings),
    }
    for poly in inst.polyhedra:
        entry = {"nonneg": bool(poly.nonneg)}
        if poly.eq_matrix.shape[0]:
            entry["eq"] = {
                "matrix": poly.eq_matrix.tolist(),
                "rhs": poly.eq_rhs.tolist(),
            }
        if poly.ineq_matrix.shape[0]:
            entry["ineq"] = {
                "matrix": poly.ineq_matrix.tolist(),
                "rhs": poly.ineq_rhs.tolist(),
            }
        doc["polyhedra"].append(entry)
    return doc


def parse_instance(text: str) -> Instance:
    """Parse and validate an instance document from JSON text."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(
            f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc
    return document_to_instance(doc)


def emit_instance(inst: Instance) -> str:
    """Canonical JSON text for an instance."""
    return json.dumps(instance_to_document(inst), indent=2, sort_keys=True) + "\n"


def instance_sha256(inst: Instance) -> str:
    return hashlib.sha256(emit_instance(inst).encode("utf-8")).hexdigest()


def to_jsonable(obj: Any) -> Any:
    """Recursively convert report values to plain JSON data."""
    if isinstance(obj, BlockPoint):
        return {"blocks": obj.blocks.tolist()}
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {
            f.name: to_jsonable(getattr(obj, f.name))
            for f in dataclasses.fields(obj)
        }
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    if isinstance(obj, dict):
        out = {}
        for key, value in obj.items():
            if not isinstance(key, str):
                key = json.dumps(to_jsonable(key))
            out[key] = to_jsonable(value)
        return out
    if isinstance(obj, (list, tuple, set, frozenset)):
        items = [to_jsonable(v) for v in obj]
        if isinstance(obj, (set, frozenset)):
            items.sort(key=json.dumps)
        return items
    if obj is None or isinstance(obj, (bool, int, float, str)):
        return obj
    raise TypeError(f"cannot serialize {type(obj).__name__} into a report")


def build_report(
    kind: str,
    instance: Instance | None,
    options: dict,
    payload: Any,
    timings: dict | None = None,
) -> dict:
    """Assemble a report document; payload and inputs are seed-deterministic."""
    if kind not in REPORT_KINDS:
        raise SchemaError(f"unknown report kind {kind!r}")
    inputs = {"options": to_jsonable(options)}
    if instance is not None:
        inputs["instance_sha256"] = instance_sha256(instance)
    return {
        "kind": kind,
        "inputs": inputs,
        "payload": to_jsonable(payload),
        "timings": dict(timings or {}),
    }


def emit_report(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"
