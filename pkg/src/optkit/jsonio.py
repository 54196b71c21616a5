"""JSON schemas, parsers and the byte-stable report writer used by the CLI.

Report envelope, keys in this order::

    {"command", "model", "seed", "tolerances",
     "checks": [{"name", "pass", "measured", "bound"}, ...],
     "violations", "details"}

Floats are written with 17 significant digits; non-finite floats become
``null``. Dict keys keep insertion order, so the output is byte-identical
for identical inputs and seed.
"""
from __future__ import annotations

import json
import math
from pathlib import Path

import jsonschema
import numpy as np

from optkit.errors import UnsupportedComposite
from optkit.models import Model, classical_model, composite_model, quantum_model
from optkit.tomography import CountTable

MODEL_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "$defs": {
        "model": {
            "oneOf": [
                {
                    "type": "object",
                    "properties": {"kind": {"const": "quantum"}, "dim": {"type": "integer", "minimum": 2, "maximum": 8}},
                    "required": ["kind", "dim"],
                    "additionalProperties": False,
                },
                {
                    "type": "object",
                    "properties": {"kind": {"const": "classical"}, "n": {"type": "integer", "minimum": 2}},
                    "required": ["kind", "n"],
                    "additionalProperties": False,
                },
                {
                    "type": "object",
                    "properties": {
                        "kind": {"const": "composite"},
                        "parts": {"type": "array", "items": {"$ref": "#/$defs/model"}, "minItems": 2, "maxItems": 2},
                    },
                    "required": ["kind", "parts"],
                    "additionalProperties": False,
                },
            ]
        }
    },
    "$ref": "#/$defs/model",
}

TRANSFORMATION_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "properties": {
        "format": {"enum": ["choi", "kraus", "bloch"]},
        "data": {"type": "array", "minItems": 1},
    },
    "required": ["format", "data"],
    "additionalProperties": False,
}

COUNT_TABLE_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "properties": {
        "shots": {"type": "integer", "minimum": 0},
        "no_click": {"type": "integer", "minimum": 0},
        "counts": {"type": "array", "items": {"type": "array", "items": {"type": "integer", "minimum": 0}}},
    },
    "required": ["shots", "no_click", "counts"],
    "additionalProperties": False,
}


class SpecError(ValueError):
    """Input that fails schema or shape validation; ``pointer`` locates it."""

    def __init__(self, message: str, pointer: str = ""):
        super().__init__(f"{pointer or '/'}: {message}")
        self.pointer = pointer or "/"


def _pointer(path) -> str:
    return "".join(f"/{p}" for p in path)


def validate(instance, schema) -> None:
    validator = jsonschema.Draft202012Validator(schema)
    errors = sorted(validator.iter_errors(instance), key=lambda e: list(e.absolute_path))
    if errors:
        best = jsonschema.exceptions.best_match(errors)
        raise SpecError(best.message, _pointer(best.absolute_path))


def load_json_arg(text: str):
    """Inline JSON (starting with ``{`` or ``[``) or a path to a JSON file."""
    stripped = text.lstrip()
    try:
        if stripped.startswith(("{", "[")):
            return json.loads(stripped)
        return json.loads(Path(text).read_text())
    except json.JSONDecodeError as exc:
        raise SpecError(f"invalid JSON: {exc.msg} at line {exc.lineno} column {exc.colno}") from exc
    except OSError as exc:
        raise SpecError(f"cannot read {text!r}: {exc.strerror}") from exc


def model_from_json(obj) -> Model:
    validate(obj, MODEL_SCHEMA)
    return _build_model(obj, "")


def _build_model(obj, pointer) -> Model:
    if obj["kind"] == "quantum":
        return quantum_model(obj["dim"])
    if obj["kind"] == "classical":
        return classical_model(obj["n"])
    parts = [_build_model(p, f"{pointer}/parts/{i}") for i, p in enumerate(obj["parts"])]
    try:
        return composite_model(*parts)
    except UnsupportedComposite as exc:
        raise SpecError(str(exc), f"{pointer}/parts") from exc


def model_to_json(m: Model) -> dict:
    if m.kind == "quantum":
        return {"kind": "quantum", "dim": m.d}
    if m.kind == "classical":
        return {"kind": "classical", "n": m.d}
    return {"kind": "composite", "parts": [model_to_json(p) for p in m.parts]}


def _to_array(data, pointer: str) -> np.ndarray:
    try:
        return np.array(data, dtype=float)
    except (TypeError, ValueError) as exc:
        raise SpecError("ragged or non-numeric array", pointer) from exc


def _complex_array(data, ndim: int, pointer: str) -> np.ndarray:
    arr = _to_array(data, pointer)
    if arr.ndim == ndim + 1 and arr.shape[-1] == 2:
        return arr[..., 0] + 1j * arr[..., 1]
    if arr.ndim == ndim:
        return arr.astype(complex)
    raise SpecError(f"expected a {ndim}-dimensional array of numbers or [re, im] pairs, got shape {arr.shape}", pointer)


def transformation_from_json(obj, m: Model):
    """Returns ``(format, payload)``: a real Bloch matrix, a Choi matrix or a Kraus list."""
    validate(obj, TRANSFORMATION_SCHEMA)
    fmt = obj["format"]
    if fmt == "bloch":
        T = _to_array(obj["data"], "/data")
        if T.shape != (m.size, m.size):
            raise SpecError(f"Bloch matrix for {m.label()} must be {m.size}x{m.size}, got {T.shape}", "/data")
        return fmt, T
    if fmt == "choi":
        C = _complex_array(obj["data"], 2, "/data")
        if C.shape != (m.d**2, m.d**2):
            raise SpecError(f"Choi matrix for {m.label()} must be {m.d**2}x{m.d**2}, got {C.shape}", "/data")
        return fmt, C
    K = _complex_array(obj["data"], 3, "/data")
    if K.shape[1:] != (m.d, m.d):
        raise SpecError(f"Kraus operators for {m.label()} must be {m.d}x{m.d}, got {K.shape[1:]}", "/data")
    return fmt, list(K)


def complex_to_json(X) -> list:
    X = np.asarray(X)
    if X.ndim == 0:
        return [float(X.real), float(X.imag)]
    return [complex_to_json(x) for x in X]


def transformation_to_json(fmt: str, payload) -> dict:
    if fmt == "bloch":
        return {"format": "bloch", "data": np.asarray(payload, dtype=float).tolist()}
    return {"format": fmt, "data": complex_to_json(np.asarray(payload))}


def count_table_to_json(table) -> dict:
    return {"shots": int(table.shots), "no_click": int(table.no_click), "counts": np.asarray(table.counts).tolist()}


def count_table_from_json(obj):
    validate(obj, COUNT_TABLE_SCHEMA)
    try:
        return CountTable(np.array(obj["counts"], dtype=np.int64), obj["no_click"], obj["shots"])
    except ValueError as exc:
        raise SpecError(str(exc), "/counts") from exc


# --- deterministic writer --------------------------------------------------


def _emit(obj, out: list) -> None:
    if obj is None:
        out.append("null")
    elif isinstance(obj, (bool, np.bool_)):
        out.append("true" if obj else "false")
    elif isinstance(obj, (int, np.integer)):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        x = float(obj)
        out.append(format(x, ".17g") if math.isfinite(x) else "null")
    elif isinstance(obj, str):
        out.append(json.dumps(obj))
    elif isinstance(obj, dict):
        out.append("{")
        for i, (k, v) in enumerate(obj.items()):
            if i:
                out.append(", ")
            out.append(json.dumps(str(k)) + ": ")
            _emit(v, out)
        out.append("}")
    elif isinstance(obj, (list, tuple, np.ndarray)):
        out.append("[")
        for i, v in enumerate(obj):
            if i:
                out.append(", ")
            _emit(v, out)
        out.append("]")
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj) -> str:
    out: list[str] = []
    _emit(obj, out)
    return "".join(out)


def check(name: str, passed: bool, measured, bound) -> dict:
    return {"name": name, "pass": bool(passed), "measured": measured, "bound": bound}


def envelope(command: str, model: dict | None, seed: int, tolerances: dict, checks: list, details: dict) -> dict:
    return {
        "command": command,
        "model": model,
        "seed": seed,
        "tolerances": tolerances,
        "checks": checks,
        "violations": sum(not c["pass"] for c in checks),
        "details": details,
    }
