"""Pauli-encoded parametrized circuits.

A circuit is an ordered list of :class:`Fixed` gates (opaque unitaries on a
few qubits) and :class:`Encode` gates ``exp(i*pi*scale*alpha_s*P)``.  With the
default ``scale=1`` this is exactly the Pauli-encoding convention, and the
resulting functions are trigonometric polynomials in ``exp(i*pi*alpha_s)``.
Compilers that need another base frequency (Trotterization) set ``scale``;
all encodings of the same parameter must then share ``|scale|``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, replace
from enum import Enum
from typing import Iterator, Sequence, Union

import numpy as np

from .pauli import PauliString

UNITARY_TOL = 1e-10
MAX_FIXED_ARITY = 3

_S2 = 1 / np.sqrt(2)
NAMED_GATES: dict[str, np.ndarray] = {
    "I": np.eye(2, dtype=complex),
    "H": np.array([[1, 1], [1, -1]], dtype=complex) * _S2,
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
    "S": np.array([[1, 0], [0, 1j]], dtype=complex),
    "SDG": np.array([[1, 0], [0, -1j]], dtype=complex),
    "T": np.array([[1, 0], [0, np.exp(1j * np.pi / 4)]], dtype=complex),
    "CNOT": np.array(
        [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
    ),
    "CZ": np.diag([1, 1, 1, -1]).astype(complex),
    "SWAP": np.array(
        [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex
    ),
}
ROTATION_GATES = ("RX", "RY", "RZ")

# V with V^dag Z V = Y; used to rotate Y encodings onto Z.
Y_BASIS = np.array([[1, -1j], [1, 1j]], dtype=complex) * _S2
NAMED_GATES["YB"] = Y_BASIS
NAMED_GATES["YBDG"] = Y_BASIS.conj().T


def rotation_matrix(name: str, angle: float) -> np.ndarray:
    c, s = np.cos(angle / 2), np.sin(angle / 2)
    if name == "RX":
        return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)
    if name == "RY":
        return np.array([[c, -s], [s, c]], dtype=complex)
    if name == "RZ":
        return np.diag([np.exp(-1j * angle / 2), np.exp(1j * angle / 2)])
    raise KeyError(name)


@dataclass(frozen=True, eq=False)
class Fixed:
    """A parameter-free gate.

    ``bit`` marks a template gate that is applied only when input bit
    ``x[bit]`` is 1; see :meth:`ParametrizedCircuit.bind`.
    """

    matrix: np.ndarray
    targets: tuple[int, ...]
    name: str | None = None
    angle: float | None = None
    bit: int | None = None

    def __eq__(self, other):
        if not isinstance(other, Fixed):
            return NotImplemented
        return (
            self.targets == other.targets
            and self.name == other.name
            and self.angle == other.angle
            and self.bit == other.bit
            and self.matrix.shape == other.matrix.shape
            and np.array_equal(self.matrix, other.matrix)
        )

    __hash__ = None


@dataclass(frozen=True)
class Encode:
    pauli: PauliString
    param: int
    scale: float = 1.0


Gate = Union[Fixed, Encode]


def fixed(name_or_matrix, targets: Sequence[int], angle: float | None = None, bit: int | None = None) -> Fixed:
    """Shorthand constructor: ``fixed('H', [0])``, ``fixed('RZ', [1], 0.3)`` or a raw matrix."""
    targets = tuple(int(t) for t in targets)
    if isinstance(name_or_matrix, str):
        name = name_or_matrix.upper()
        if name in ROTATION_GATES:
            if angle is None:
                raise ValueError(f"{name} needs an angle")
            return Fixed(rotation_matrix(name, angle), targets, name, float(angle), bit)
        if name not in NAMED_GATES:
            raise KeyError(f"unknown gate name {name_or_matrix!r}")
        return Fixed(NAMED_GATES[name], targets, name, None, bit)
    return Fixed(np.asarray(name_or_matrix, dtype=complex), targets, None, None, bit)


def encode(pauli: str | PauliString, param: int, scale: float = 1.0) -> Encode:
    if isinstance(pauli, str):
        pauli = PauliString(pauli)
    return Encode(pauli, int(param), float(scale))


@dataclass(frozen=True)
class ParametrizedCircuit:
    n: int
    d: int
    gates: tuple[Gate, ...] = ()
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))

    @property
    def encodings(self) -> list[Encode]:
        return [g for g in self.gates if isinstance(g, Encode)]

    @property
    def is_template(self) -> bool:
        return any(isinstance(g, Fixed) and g.bit is not None for g in self.gates)

    @property
    def n_bits(self) -> int:
        bits = [g.bit for g in self.gates if isinstance(g, Fixed) and g.bit is not None]
        return max(bits) + 1 if bits else 0

    def bind(self, x: Sequence[int]) -> "ParametrizedCircuit":
        """Resolve bit-conditioned gates for the input bitstring ``x``."""
        gates = []
        for g in self.gates:
            if isinstance(g, Fixed) and g.bit is not None:
                if g.bit >= len(x):
                    raise ValueError(f"gate conditioned on bit {g.bit} but x has {len(x)} bits")
                if x[g.bit]:
                    gates.append(replace(g, bit=None))
            else:
                gates.append(g)
        return ParametrizedCircuit(self.n, self.d, tuple(gates), self.label)

    def base_frequencies(self) -> np.ndarray:
        """Per-parameter base frequency ``|scale|`` (1.0 for unused parameters)."""
        omega = np.ones(self.d)
        for g in self.encodings:
            omega[g.param] = abs(g.scale)
        return omega

    def inverse(self) -> "ParametrizedCircuit":
        gates = []
        for g in reversed(self.gates):
            if isinstance(g, Fixed):
                gates.append(Fixed(g.matrix.conj().T, g.targets, None, None, g.bit))
            else:
                gates.append(replace(g, scale=-g.scale))
        return ParametrizedCircuit(self.n, self.d, tuple(gates), self.label)


def validate(circuit: ParametrizedCircuit) -> list[str]:
    """Return every invariant violation; an empty list means well-formed."""
    issues = []
    n, d = circuit.n, circuit.d
    if n < 1:
        issues.append(f"qubit count must be positive, got {n}")
    if d < 0:
        issues.append(f"parameter count must be non-negative, got {d}")
    scales: dict[int, float] = {}
    for i, g in enumerate(circuit.gates):
        where = f"gate {i}"
        if isinstance(g, Fixed):
            k = len(g.targets)
            if k == 0:
                issues.append(f"{where}: fixed gate has no targets")
                continue
            if k > MAX_FIXED_ARITY:
                issues.append(f"{where}: fixed gate arity {k} exceeds {MAX_FIXED_ARITY}")
            if len(set(g.targets)) != k:
                issues.append(f"{where}: repeated target qubits {g.targets}")
            if any(t < 0 or t >= n for t in g.targets):
                issues.append(f"{where}: target qubit out of range {g.targets}")
            if g.matrix.shape != (2**k, 2**k):
                issues.append(f"{where}: matrix shape {g.matrix.shape} does not match {k} targets")
            elif not np.all(np.isfinite(g.matrix)):
                issues.append(f"{where}: non-finite matrix entries")
            elif np.max(np.abs(g.matrix.conj().T @ g.matrix - np.eye(2**k))) > UNITARY_TOL:
                issues.append(f"{where}: unitarity tolerance exceeded")
            if g.bit is not None and g.bit < 0:
                issues.append(f"{where}: negative input bit index {g.bit}")
        elif isinstance(g, Encode):
            if g.pauli.n != n:
                issues.append(f"{where}: pauli length {g.pauli.n} does not match n={n}")
            if g.pauli.is_identity:
                issues.append(f"{where}: encoding pauli is the identity")
            if not 0 <= g.param < max(d, 0):
                issues.append(f"{where}: parameter index out of range ({g.param} not in [0, {d}))")
            if not np.isfinite(g.scale) or g.scale == 0:
                issues.append(f"{where}: encoding scale must be finite and non-zero")
            else:
                prev = scales.setdefault(g.param, abs(g.scale))
                if not np.isclose(prev, abs(g.scale), rtol=1e-12, atol=0):
                    issues.append(f"{where}: inconsistent encoding scale for parameter {g.param}")
        else:
            issues.append(f"{where}: unknown gate type {type(g).__name__}")
    return issues


def check(circuit: ParametrizedCircuit) -> ParametrizedCircuit:
    issues = validate(circuit)
    if issues:
        raise ValueError("invalid circuit: " + "; ".join(issues))
    return circuit


def upload_counts(circuit: ParametrizedCircuit) -> list[int]:
    check(circuit)
    counts = [0] * circuit.d
    for g in circuit.encodings:
        counts[g.param] += 1
    return counts


class LatticeKind(str, Enum):
    STATE = "state"
    EXPECTATION = "expectation"


@dataclass(frozen=True)
class FrequencyLattice:
    """The box ``prod_s [-K_s, K_s]`` of integer frequency vectors."""

    bounds: tuple[int, ...]
    kind: LatticeKind = LatticeKind.EXPECTATION

    def __post_init__(self):
        object.__setattr__(self, "bounds", tuple(int(k) for k in self.bounds))
        if any(k < 0 for k in self.bounds):
            raise ValueError("lattice bounds must be non-negative")

    @property
    def d(self) -> int:
        return len(self.bounds)

    @property
    def size(self) -> int:
        return int(np.prod([2 * k + 1 for k in self.bounds], dtype=np.int64))

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(2 * k + 1 for k in self.bounds)

    def __iter__(self) -> Iterator[tuple[int, ...]]:
        return itertools.product(*[range(-k, k + 1) for k in self.bounds])

    def points(self) -> np.ndarray:
        """All lattice vectors, shape ``(m, d)``, in lexicographic order."""
        if self.d == 0:
            return np.zeros((1, 0), dtype=int)
        return np.array(list(self), dtype=int).reshape(self.size, self.d)

    def __contains__(self, l) -> bool:
        l = tuple(l)
        return len(l) == self.d and all(abs(v) <= k for v, k in zip(l, self.bounds))

    def index(self, l) -> int:
        l = tuple(int(v) for v in l)
        if l not in self:
            raise KeyError(f"frequency {l} outside lattice with bounds {self.bounds}")
        return int(np.ravel_multi_index(tuple(v + k for v, k in zip(l, self.bounds)), self.shape)) if self.d else 0


def lattice(circuit: ParametrizedCircuit, kind: LatticeKind | str = LatticeKind.EXPECTATION) -> FrequencyLattice:
    kind = LatticeKind(kind)
    counts = upload_counts(circuit)
    factor = 1 if kind is LatticeKind.STATE else 2
    return FrequencyLattice(tuple(factor * c for c in counts), kind)


def normalize_to_z(circuit: ParametrizedCircuit) -> ParametrizedCircuit:
    """Rewrite every encoding as a Z/I string flanked by local basis changes.

    X letters use H on both sides; Y letters use ``Y_BASIS`` before and its
    adjoint after, since ``V^dag Z V = Y``.
    """
    check(circuit)
    gates: list[Gate] = []
    for g in circuit.gates:
        if isinstance(g, Fixed) or set(g.pauli.letters) <= {"I", "Z"}:
            gates.append(g)
            continue
        before, after = [], []
        for q, c in enumerate(g.pauli.letters):
            if c == "X":
                before.append(fixed("H", [q]))
                after.append(fixed("H", [q]))
            elif c == "Y":
                before.append(fixed("YB", [q]))
                after.append(fixed("YBDG", [q]))
        zs = "".join("I" if c == "I" else "Z" for c in g.pauli.letters)
        gates.extend(before)
        gates.append(replace(g, pauli=PauliString(zs)))
        gates.extend(after)
    return ParametrizedCircuit(circuit.n, circuit.d, tuple(gates), circuit.label)


def pauli_rotation_gates(pauli: PauliString, angle: float) -> list[Fixed]:
    """Gates implementing ``exp(i*angle*P)``.

    Strings on at most ``MAX_FIXED_ARITY`` qubits become one dense gate;
    wider ones are decomposed into basis changes, a CNOT parity ladder and
    a single-qubit Z rotation.
    """
    sup = pauli.support
    if not sup:
        raise ValueError("rotation about the identity string is a global phase")
    if len(sup) <= MAX_FIXED_ARITY:
        p = pauli.local_matrix()
        u = np.cos(angle) * np.eye(p.shape[0]) + 1j * np.sin(angle) * p
        return [Fixed(u, sup, None)]
    before, after = [], []
    for q in sup:
        c = pauli.letters[q]
        if c == "X":
            before.append(fixed("H", [q]))
            after.append(fixed("H", [q]))
        elif c == "Y":
            before.append(fixed("YB", [q]))
            after.append(fixed("YBDG", [q]))
    ladder = [fixed("CNOT", [q, sup[-1]]) for q in sup[:-1]]
    core = Fixed(np.diag([np.exp(1j * angle), np.exp(-1j * angle)]), (sup[-1],), None)
    return before + ladder + [core] + ladder[::-1] + after[::-1]


def random_circuit(
    rng: np.random.Generator,
    n: int,
    d: int,
    uploads: Sequence[int],
    letters: str = "XYZ",
    layers: int = 1,
) -> ParametrizedCircuit:
    """A random Pauli-encoded circuit with ``uploads[s]`` encodings of parameter ``s``.

    Encodings are interleaved in random order with layers of random
    single-qubit unitaries and CNOTs.
    """
    from scipy.stats import unitary_group

    def fixed_layer():
        out = []
        for q in range(n):
            out.append(Fixed(unitary_group.rvs(2, random_state=rng), (q,)))
        for q in range(n - 1):
            if rng.random() < 0.6:
                out.append(fixed("CNOT", [q, q + 1]))
        return out

    order = [s for s in range(d) for _ in range(uploads[s])]
    rng.shuffle(order)
    gates: list[Gate] = []
    for _ in range(layers):
        gates.extend(fixed_layer())
    for s in order:
        while True:
            p = "".join(rng.choice(list("I" + letters)) for _ in range(n))
            if set(p) != {"I"}:
                break
        gates.append(encode(p, s))
        for _ in range(layers):
            gates.extend(fixed_layer())
    return ParametrizedCircuit(n, d, tuple(gates), "random")
