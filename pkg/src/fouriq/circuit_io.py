"""JSON documents for circuits and Hamiltonians.

Circuit document::

    {"n": 3, "d": 2, "gates": [
        {"type": "fixed", "name": "H", "targets": [0]},
        {"type": "fixed", "matrix": [[[re, im], ...], ...], "targets": [0, 1]},
        {"type": "encode", "pauli": "ZIZ", "param": 0}
    ]}

Optional keys: ``label`` (top level), ``angle`` for RX/RY/RZ, ``bit`` on a
fixed gate (applied only when that input bit is 1), ``scale`` on an encoding.
"""
from __future__ import annotations

import json
from typing import Any

import numpy as np

from .circuit import (
    NAMED_GATES,
    ROTATION_GATES,
    Encode,
    Fixed,
    ParametrizedCircuit,
    check,
    fixed,
    validate,
)
from .pauli import PauliString


class DocumentError(ValueError):
    """Raised for malformed circuit or Hamiltonian documents."""


def _gate_doc(g) -> dict[str, Any]:
    if isinstance(g, Encode):
        doc = {"type": "encode", "pauli": g.pauli.letters, "param": g.param}
        if g.scale != 1.0:
            doc["scale"] = g.scale
        return doc
    if g.name in NAMED_GATES or g.name in ROTATION_GATES:
        doc = {"type": "fixed", "name": g.name, "targets": list(g.targets)}
        if g.angle is not None:
            doc["angle"] = g.angle
    else:
        doc = {
            "type": "fixed",
            "matrix": [[[float(z.real), float(z.imag)] for z in row] for row in g.matrix],
            "targets": list(g.targets),
        }
    if g.bit is not None:
        doc["bit"] = g.bit
    return doc


def circuit_to_dict(circuit: ParametrizedCircuit) -> dict[str, Any]:
    check(circuit)
    doc: dict[str, Any] = {"n": circuit.n, "d": circuit.d, "gates": [_gate_doc(g) for g in circuit.gates]}
    if circuit.label:
        doc["label"] = circuit.label
    return doc


def serialize(circuit: ParametrizedCircuit) -> str:
    return json.dumps(circuit_to_dict(circuit), indent=1)


def _require(doc: dict, key: str, where: str, kind=None):
    if key not in doc:
        raise DocumentError(f"{where}: missing field {key!r}")
    value = doc[key]
    if kind is not None and (not isinstance(value, kind) or isinstance(value, bool)):
        raise DocumentError(f"{where}: field {key!r} has wrong type {type(value).__name__}")
    return value


def _pauli(text: Any, where: str) -> PauliString:
    if not isinstance(text, str):
        raise DocumentError(f"{where}: pauli must be a string")
    try:
        return PauliString(text)
    except ValueError as exc:
        raise DocumentError(f"{where}: {exc}") from None


def _parse_gate(doc: Any, where: str):
    if not isinstance(doc, dict):
        raise DocumentError(f"{where}: gate must be an object")
    kind = _require(doc, "type", where, str)
    if kind == "encode":
        pauli = _pauli(_require(doc, "pauli", where), f"{where}.pauli")
        param = _require(doc, "param", where, int)
        scale = doc.get("scale", 1.0)
        if not isinstance(scale, (int, float)) or isinstance(scale, bool):
            raise DocumentError(f"{where}: field 'scale' must be a number")
        return Encode(pauli, param, float(scale))
    if kind != "fixed":
        raise DocumentError(f"{where}: unknown gate type {kind!r}")
    targets = _require(doc, "targets", where, list)
    if not all(isinstance(t, int) and not isinstance(t, bool) for t in targets):
        raise DocumentError(f"{where}: targets must be integers")
    bit = doc.get("bit")
    if bit is not None and (not isinstance(bit, int) or isinstance(bit, bool)):
        raise DocumentError(f"{where}: field 'bit' must be an integer")
    if "name" in doc:
        name = doc["name"]
        if not isinstance(name, str) or name.upper() not in set(NAMED_GATES) | set(ROTATION_GATES):
            raise DocumentError(f"{where}: unknown gate name {name!r}")
        angle = doc.get("angle")
        if name.upper() in ROTATION_GATES and not isinstance(angle, (int, float)):
            raise DocumentError(f"{where}: rotation {name} needs a numeric 'angle'")
        g = fixed(name, targets, angle, bit)
        if g.matrix.shape[0] != 2 ** len(targets):
            raise DocumentError(f"{where}: gate {name} has wrong number of targets")
        return g
    raw = _require(doc, "matrix", where, list)
    try:
        arr = np.array(raw, dtype=float)
    except (TypeError, ValueError):
        raise DocumentError(f"{where}: matrix must be a rectangular array of [re, im] pairs") from None
    if arr.ndim != 3 or arr.shape[2] != 2 or arr.shape[0] != arr.shape[1]:
        raise DocumentError(f"{where}: matrix must be square with [re, im] entries")
    return Fixed(arr[..., 0] + 1j * arr[..., 1], tuple(targets), None, None, bit)


def circuit_from_dict(doc: Any) -> ParametrizedCircuit:
    if not isinstance(doc, dict):
        raise DocumentError("top level: expected an object")
    n = _require(doc, "n", "top level", int)
    d = _require(doc, "d", "top level", int)
    gates_doc = _require(doc, "gates", "top level", list)
    gates = tuple(_parse_gate(g, f"gates[{i}]") for i, g in enumerate(gates_doc))
    circuit = ParametrizedCircuit(n, d, gates, str(doc.get("label", "")))
    issues = validate(circuit)
    if issues:
        raise DocumentError(issues[0])
    return circuit


def parse(text: str) -> ParametrizedCircuit:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return circuit_from_dict(doc)


def load_circuit(path) -> ParametrizedCircuit:
    with open(path) as fh:
        return parse(fh.read())


def save_circuit(circuit: ParametrizedCircuit, path) -> None:
    with open(path, "w") as fh:
        fh.write(serialize(circuit) + "\n")
