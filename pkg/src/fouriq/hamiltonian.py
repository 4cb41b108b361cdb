"""Parametrized Hamiltonians, first-order Trotterization and its error bound.

``H(x, alpha) = sum_j c_j(x) P_j + sum_s alpha_s Q_s`` where each fixed
coefficient is either a constant or an input bit ``x_i``.  The concept value
is ``<0| U^dag O U |0>`` with ``U = exp(i tau H)``.
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .circuit import Fixed, ParametrizedCircuit, encode, pauli_rotation_gates
from .circuit_io import DocumentError
from .errors import BudgetError
from .pauli import Observable, PauliString
from .shots import Exact
from .statevector import exact_evolution, expectation, run, zero_state

DENSE_NORM_MAX_QUBITS = 6


@dataclass(frozen=True)
class InputBit:
    index: int


@dataclass(frozen=True)
class Constant:
    value: float


Source = Union[InputBit, Constant]


@dataclass(frozen=True)
class FixedTerm:
    source: Source
    pauli: PauliString


@dataclass(frozen=True)
class AlphaTerm:
    param: int
    pauli: PauliString


@dataclass(frozen=True)
class ParamHamiltonian:
    n: int
    fixed_terms: tuple[FixedTerm, ...]
    alpha_terms: tuple[AlphaTerm, ...]
    tau: float = 1.0
    d: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "fixed_terms", tuple(self.fixed_terms))
        object.__setattr__(self, "alpha_terms", tuple(self.alpha_terms))
        if self.d is None:
            object.__setattr__(self, "d", max((t.param + 1 for t in self.alpha_terms), default=0))
        if not math.isfinite(self.tau):
            raise ValueError("tau must be finite")
        for t in self.fixed_terms + self.alpha_terms:
            if t.pauli.n != self.n:
                raise ValueError(f"pauli {t.pauli} has length {t.pauli.n}, expected {self.n}")
        for t in self.alpha_terms:
            if not 0 <= t.param < self.d:
                raise ValueError(f"alpha term parameter {t.param} out of range for d={self.d}")

    @property
    def n_bits(self) -> int:
        bits = [t.source.index for t in self.fixed_terms if isinstance(t.source, InputBit)]
        return max(bits) + 1 if bits else 0

    def coefficient(self, term: FixedTerm, x: Sequence[int] | None) -> float:
        if isinstance(term.source, Constant):
            return term.source.value
        if x is None:
            raise ValueError("this Hamiltonian depends on input bits; pass x")
        return float(x[term.source.index])

    def terms(self, x: Sequence[int] | None, alpha) -> list[tuple[float, PauliString]]:
        alpha = np.asarray(alpha, dtype=float).reshape(-1)
        out = [(self.coefficient(t, x), t.pauli) for t in self.fixed_terms]
        out += [(float(alpha[t.param]), t.pauli) for t in self.alpha_terms]
        return out

    def matrix(self, x: Sequence[int] | None, alpha) -> np.ndarray:
        dim = 2**self.n
        h = np.zeros((dim, dim), dtype=complex)
        for c, p in self.terms(x, alpha):
            if c:
                h += c * p.matrix()
        return h


def _edges(n: int) -> list[tuple[int, int]]:
    return list(itertools.combinations(range(n), 2))


def _zz(n: int, i: int, j: int) -> PauliString:
    return PauliString.from_sparse(n, {i: "Z", j: "Z"})


def ising_template(n: int, tau: float = 1.0) -> ParamHamiltonian:
    """Ising model with every edge weight an input bit (upper-triangular order)."""
    fixed = [FixedTerm(InputBit(k), _zz(n, i, j)) for k, (i, j) in enumerate(_edges(n))]
    field = [AlphaTerm(0, PauliString.from_sparse(n, {q: "X"})) for q in range(n)]
    return ParamHamiltonian(n, tuple(fixed), tuple(field), tau, 1)


def build_ising(x: Sequence[int], n: int, tau: float = 1.0) -> ParamHamiltonian:
    """``sum_{i<j} x_ij Z_i Z_j + alpha sum_i X_i`` for a fixed graph ``x``."""
    edges = _edges(n)
    if len(x) != len(edges):
        raise ValueError(f"edge bitstring has {len(x)} bits, expected n(n-1)/2 = {len(edges)}")
    fixed = [FixedTerm(Constant(1.0), _zz(n, i, j)) for b, (i, j) in zip(x, edges) if int(b)]
    field = [AlphaTerm(0, PauliString.from_sparse(n, {q: "X"})) for q in range(n)]
    return ParamHamiltonian(n, tuple(fixed), tuple(field), tau, 1)


def _term_order(t) -> tuple:
    return (t.pauli.support, t.pauli.letters)


def trotterize(H: ParamHamiltonian, r: int) -> ParametrizedCircuit:
    """``(prod_j exp(i tau/r c_j P_j) prod_s exp(i tau/r alpha_s Q_s))^r``.

    Input-bit terms become bit-conditioned fixed gates (``bind(x)`` resolves
    them).  Alpha terms become encodings with scale ``tau/(r*pi)`` so the gate
    equals ``exp(i (tau/r) alpha_s Q_s)`` under the ``exp(i*pi*scale*alpha*P)``
    convention; the base frequency of the Fourier series is then ``tau/(r*pi)``.
    """
    if r < 1:
        raise ValueError("r must be at least 1")
    if H.tau == 0:
        raise ValueError("tau must be non-zero to Trotterize")
    dt = H.tau / r
    step = []
    for t in sorted(H.fixed_terms, key=_term_order):
        if t.pauli.is_identity:
            continue  # global phase
        if isinstance(t.source, Constant):
            if t.source.value:
                step += pauli_rotation_gates(t.pauli, dt * t.source.value)
        else:
            step += [Fixed(g.matrix, g.targets, g.name, g.angle, t.source.index)
                     for g in pauli_rotation_gates(t.pauli, dt)]
    for t in sorted(H.alpha_terms, key=_term_order):
        step.append(encode(t.pauli, t.param, dt / np.pi))
    return ParametrizedCircuit(H.n, H.d, tuple(step) * r, f"trotter r={r}")


def commutator_bound(H: ParamHamiltonian, x: Sequence[int] | None = None, max_qubits: int = DENSE_NORM_MAX_QUBITS) -> float:
    """``A = sum_{i<j} |[h_i, h_j]|`` with dense spectral norms.

    Alpha coefficients take their domain maximum 1; input-bit coefficients are
    1, or ``x_i`` when ``x`` is given.
    """
    if H.n > max_qubits:
        raise BudgetError(f"dense commutator norms limited to {max_qubits} qubits, got {H.n}")
    terms = []
    for t in H.fixed_terms:
        c = abs(t.source.value) if isinstance(t.source, Constant) else (1.0 if x is None else float(x[t.source.index]))
        terms.append((c, t.pauli))
    terms += [(1.0, t.pauli) for t in H.alpha_terms]
    mats = [(c, p.matrix()) for c, p in terms if c and not p.is_identity]
    total = 0.0
    for (ca, a), (cb, b) in itertools.combinations(mats, 2):
        comm = a @ b - b @ a
        if np.any(comm):
            total += ca * cb * float(np.linalg.norm(comm, 2))
    return total


@dataclass(frozen=True)
class TrotterPlan:
    r: int
    A: float
    epsilon_y: float


def trotter_error_bound(tau: float, A: float, r: int) -> float:
    return tau**2 * A / (2 * r)


def plan_trotter(H: ParamHamiltonian, epsilon: float, x: Sequence[int] | None = None, A: float | None = None) -> TrotterPlan:
    """Smallest ``r`` with ``tau^2 A / (2r) <= epsilon / 2``."""
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    if A is None:
        A = commutator_bound(H, x)
    need = H.tau**2 * A / epsilon
    r = max(1, math.ceil(need * (1 - 1e-12)))
    return TrotterPlan(r, A, trotter_error_bound(H.tau, A, r))


@dataclass(frozen=True)
class Trotter:
    r: int


def eval_dynamics(H: ParamHamiltonian, obs: Observable, x: Sequence[int] | None, alpha, mode: Exact | Trotter = Exact()) -> float:
    """``<0| U^dag O U |0>`` with ``U = exp(i tau H(x, alpha))`` or its Trotter circuit."""
    if isinstance(mode, Trotter):
        circuit = trotterize(H, mode.r)
        if circuit.is_template:
            circuit = circuit.bind(x)
        return expectation(run(circuit, alpha), obs)
    psi = exact_evolution(H.matrix(x, alpha), H.tau, zero_state(H.n))
    return expectation(psi, obs)


def _pauli_field(doc: dict, where: str, n: int) -> PauliString:
    text = doc.get("pauli")
    if not isinstance(text, str):
        raise DocumentError(f"{where}: missing field 'pauli'")
    try:
        p = PauliString(text)
    except ValueError as exc:
        raise DocumentError(f"{where}.pauli: {exc}") from None
    if p.n != n:
        raise DocumentError(f"{where}.pauli: length {p.n} does not match n={n}")
    return p


def hamiltonian_from_dict(doc) -> ParamHamiltonian:
    if not isinstance(doc, dict):
        raise DocumentError("top level: expected an object")
    for key in ("n", "tau"):
        if key not in doc:
            raise DocumentError(f"top level: missing field {key!r}")
    n = doc["n"]
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise DocumentError("top level: field 'n' must be a positive integer")
    tau = doc["tau"]
    if not isinstance(tau, (int, float)) or isinstance(tau, bool):
        raise DocumentError("top level: field 'tau' must be a number")
    fixed = []
    for i, t in enumerate(doc.get("fixed_terms", [])):
        where = f"fixed_terms[{i}]"
        if not isinstance(t, dict):
            raise DocumentError(f"{where}: term must be an object")
        if "bit" in t:
            if not isinstance(t["bit"], int) or t["bit"] < 0:
                raise DocumentError(f"{where}: field 'bit' must be a non-negative integer")
            src: Source = InputBit(t["bit"])
        elif "const" in t:
            if not isinstance(t["const"], (int, float)):
                raise DocumentError(f"{where}: field 'const' must be a number")
            src = Constant(float(t["const"]))
        else:
            raise DocumentError(f"{where}: needs 'bit' or 'const'")
        fixed.append(FixedTerm(src, _pauli_field(t, where, n)))
    alpha = []
    for i, t in enumerate(doc.get("alpha_terms", [])):
        where = f"alpha_terms[{i}]"
        if not isinstance(t, dict) or not isinstance(t.get("param"), int) or t["param"] < 0:
            raise DocumentError(f"{where}: field 'param' must be a non-negative integer")
        alpha.append(AlphaTerm(t["param"], _pauli_field(t, where, n)))
    d = doc.get("d")
    try:
        return ParamHamiltonian(n, tuple(fixed), tuple(alpha), float(tau), d)
    except ValueError as exc:
        raise DocumentError(str(exc)) from None


def hamiltonian_to_dict(H: ParamHamiltonian) -> dict:
    fixed = []
    for t in H.fixed_terms:
        src = {"bit": t.source.index} if isinstance(t.source, InputBit) else {"const": t.source.value}
        fixed.append({**src, "pauli": t.pauli.letters})
    return {
        "n": H.n,
        "tau": H.tau,
        "d": H.d,
        "fixed_terms": fixed,
        "alpha_terms": [{"param": t.param, "pauli": t.pauli.letters} for t in H.alpha_terms],
    }


def load_hamiltonian(path) -> ParamHamiltonian:
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise DocumentError(f"line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return hamiltonian_from_dict(doc)
