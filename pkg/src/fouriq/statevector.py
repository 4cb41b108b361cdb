"""Dense statevector simulation.

Qubit 0 is the most significant bit of the amplitude index.  States are plain
complex numpy arrays of length ``2**n``; most routines also accept a leading
batch axis ``(B, 2**n)`` so a circuit can be evaluated on many parameter
points at once.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .circuit import Fixed, ParametrizedCircuit, check
from .pauli import Combination, Observable, PauliObs, PauliString, ZeroProjector, letter_matrix

MAX_QUBITS = 24
HERMITIAN_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class Op:
    """A (multi-)controlled dense gate on absolute qubit indices."""

    matrix: np.ndarray
    targets: tuple[int, ...]
    controls: tuple[int, ...] = ()
    cvals: tuple[int, ...] = ()
    tag: str = ""

    def dagger(self) -> "Op":
        return Op(self.matrix.conj().T, self.targets, self.controls, self.cvals, self.tag)

    def with_control(self, qubit: int, value: int = 1) -> "Op":
        if qubit in self.targets or qubit in self.controls:
            raise ValueError(f"control qubit {qubit} overlaps the gate register")
        return Op(self.matrix, self.targets, self.controls + (qubit,), self.cvals + (value,), self.tag)

    def shifted(self, offset: int) -> "Op":
        return Op(
            self.matrix,
            tuple(q + offset for q in self.targets),
            tuple(q + offset for q in self.controls),
            self.cvals,
            self.tag,
        )


def zero_state(n: int, batch: int | None = None) -> np.ndarray:
    if n > MAX_QUBITS:
        raise ValueError(f"{n} qubits exceeds the simulator cap of {MAX_QUBITS}")
    shape = (2**n,) if batch is None else (batch, 2**n)
    psi = np.zeros(shape, dtype=complex)
    psi[..., 0] = 1.0
    return psi


def basis_state(n: int, index: int) -> np.ndarray:
    psi = np.zeros(2**n, dtype=complex)
    psi[index] = 1.0
    return psi


def _n_qubits(psi: np.ndarray) -> int:
    n = psi.shape[-1].bit_length() - 1
    if 2**n != psi.shape[-1]:
        raise ValueError(f"state length {psi.shape[-1]} is not a power of two")
    return n


def apply_matrix(psi, matrix, targets, controls=(), cvals=()):
    """Apply ``matrix`` to ``targets`` in place, conditioned on ``controls == cvals``."""
    n = _n_qubits(psi)
    t = psi.reshape((-1,) + (2,) * n)
    idx = [slice(None)] * (n + 1)
    for c, v in zip(controls, cvals):
        idx[c + 1] = v
    idx = tuple(idx)
    sub = t[idx]
    remaining = [q for q in range(n) if q not in controls]
    axes = [1 + remaining.index(q) for q in targets]
    k = len(targets)
    mat = np.asarray(matrix).reshape((2,) * (2 * k))
    out = np.tensordot(mat, sub, axes=(list(range(k, 2 * k)), axes))
    t[idx] = np.moveaxis(out, list(range(k)), axes)
    return psi


def apply_op(psi: np.ndarray, op: Op) -> np.ndarray:
    return apply_matrix(psi, op.matrix, op.targets, op.controls, op.cvals)


def apply_ops(psi: np.ndarray, ops: Sequence[Op]) -> np.ndarray:
    for op in ops:
        apply_matrix(psi, op.matrix, op.targets, op.controls, op.cvals)
    return psi


def apply_pauli(psi: np.ndarray, pauli: PauliString, offset: int = 0) -> np.ndarray:
    for q in pauli.support:
        apply_matrix(psi, letter_matrix(pauli.letters[q]), (q + offset,))
    return psi


def apply_encoding(psi: np.ndarray, pauli: PauliString, theta) -> np.ndarray:
    """``exp(i*theta*P)`` with one angle per batch row."""
    theta = np.asarray(theta, dtype=float)
    p_psi = apply_pauli(psi.copy(), pauli)
    shape = theta.shape + (1,) * (psi.ndim - theta.ndim)
    theta = theta.reshape(shape)
    psi *= np.cos(theta)
    psi += 1j * np.sin(theta) * p_psi
    return psi


def _alpha_matrix(circuit: ParametrizedCircuit, alphas) -> np.ndarray:
    alphas = np.asarray(alphas, dtype=float)
    if alphas.ndim == 1:
        alphas = alphas[None, :]
    if alphas.shape[-1] != circuit.d:
        raise ValueError(f"alpha has length {alphas.shape[-1]}, circuit expects d={circuit.d}")
    if not np.all(np.isfinite(alphas)):
        raise ValueError("alpha must be finite")
    return alphas


def run_batch(circuit: ParametrizedCircuit, alphas, initial: np.ndarray | None = None) -> np.ndarray:
    """``U(alpha)|0>`` for every row of ``alphas``; returns shape ``(B, 2**n)``."""
    check(circuit)
    if circuit.is_template:
        raise ValueError("circuit has bit-conditioned gates; bind an input first")
    alphas = _alpha_matrix(circuit, alphas)
    if initial is None:
        psi = zero_state(circuit.n, batch=len(alphas))
    else:
        psi = np.array(np.broadcast_to(initial, (len(alphas), 2**circuit.n)), dtype=complex)
    for g in circuit.gates:
        if isinstance(g, Fixed):
            apply_matrix(psi, g.matrix, g.targets)
        else:
            apply_encoding(psi, g.pauli, np.pi * g.scale * alphas[:, g.param])
    return psi


def run(circuit: ParametrizedCircuit, alpha, initial: np.ndarray | None = None) -> np.ndarray:
    return run_batch(circuit, np.atleast_1d(np.asarray(alpha, dtype=float)).reshape(1, -1)
                     if circuit.d else np.zeros((1, 0)), initial)[0]


def circuit_ops(circuit: ParametrizedCircuit, alpha, offset: int = 0) -> list[Op]:
    """The circuit at a fixed ``alpha`` as dense :class:`Op` gates."""
    check(circuit)
    alpha = np.asarray(alpha, dtype=float).reshape(-1)
    ops = []
    for g in circuit.gates:
        if isinstance(g, Fixed):
            ops.append(Op(g.matrix, tuple(t + offset for t in g.targets), tag="fixed"))
        elif not g.pauli.is_identity:
            theta = np.pi * g.scale * alpha[g.param]
            p = g.pauli.local_matrix()
            u = np.cos(theta) * np.eye(p.shape[0]) + 1j * np.sin(theta) * p
            ops.append(Op(u, tuple(q + offset for q in g.pauli.support), tag="encode"))
        else:
            phase = np.exp(1j * np.pi * g.scale * alpha[g.param])
            ops.append(Op(phase * np.eye(2), (offset,), tag="encode"))
    return ops


def circuit_unitary(circuit: ParametrizedCircuit, alpha) -> np.ndarray:
    """Full ``2**n x 2**n`` unitary, built column by column."""
    dim = 2**circuit.n
    cols = run_batch(circuit, np.tile(np.asarray(alpha, dtype=float).reshape(1, -1), (dim, 1)),
                     initial=np.eye(dim, dtype=complex))
    return cols.T


def controlled(ops: Sequence[Op], control: int, value: int = 1) -> list[Op]:
    return [op.with_control(control, value) for op in ops]


def controlled_run(
    circuit: ParametrizedCircuit | Sequence[Op],
    state: np.ndarray,
    control: int,
    alpha=None,
    offset: int = 0,
) -> np.ndarray:
    """Apply the circuit (or compiled op list) on the control=1 branch only.

    ``offset`` shifts the circuit's qubits inside the larger register.
    """
    if isinstance(circuit, ParametrizedCircuit):
        if circuit.d and alpha is None:
            raise ValueError("alpha required for a parametrized circuit")
        ops = circuit_ops(circuit, alpha if alpha is not None else [], offset)
    else:
        ops = [op.shifted(offset) for op in circuit]
    return apply_ops(np.array(state, dtype=complex), controlled(ops, control))


def _obs_apply(psi: np.ndarray, obs: Observable) -> np.ndarray:
    if isinstance(obs, PauliObs):
        return apply_pauli(psi.copy(), obs.p)
    if isinstance(obs, Combination):
        out = np.zeros_like(psi)
        for beta, p in obs.terms:
            out += beta * apply_pauli(psi.copy(), p)
        return out
    if isinstance(obs, ZeroProjector):
        out = np.zeros_like(psi)
        out[..., 0] = psi[..., 0]
        return out
    raise TypeError(f"not an observable: {obs!r}")


def expectation(state: np.ndarray, obs: Observable):
    """``<psi|O|psi>`` (real); vectorised over a leading batch axis."""
    state = np.asarray(state, dtype=complex)
    n = _n_qubits(state)
    if obs.n != n:
        raise ValueError(f"observable acts on {obs.n} qubits, state has {n}")
    val = np.sum(state.conj() * _obs_apply(state, obs), axis=-1).real
    return float(val) if np.ndim(val) == 0 else val


def eval_concept(circuit: ParametrizedCircuit, obs: Observable, alpha) -> float:
    return expectation(run(circuit, alpha), obs)


def eval_concept_batch(circuit: ParametrizedCircuit, obs: Observable, alphas) -> np.ndarray:
    return expectation(run_batch(circuit, alphas), obs)


class PostSelection(NamedTuple):
    state: np.ndarray
    probability: float

    @property
    def ok(self) -> bool:
        return self.probability > 0


def postselect(state: np.ndarray, qubits: Sequence[int], value: Sequence[int]) -> PostSelection:
    """Project ``qubits`` onto the bit values ``value`` and renormalise.

    The qubits stay in the returned state (now in a definite basis state).  A
    zero-probability outcome returns the all-zero vector with probability 0.
    """
    n = _n_qubits(state)
    if len(qubits) != len(value):
        raise ValueError("qubits and value must have equal length")
    if any(q < 0 or q >= n for q in qubits):
        raise ValueError(f"register {tuple(qubits)} out of range for {n} qubits")
    t = np.asarray(state, dtype=complex).reshape((2,) * n)
    mask = np.zeros((2,) * n, dtype=bool)
    idx = [slice(None)] * n
    for q, v in zip(qubits, value):
        idx[q] = int(v)
    mask[tuple(idx)] = True
    out = np.where(mask, t, 0).reshape(-1)
    prob = float(np.vdot(out, out).real)
    if prob <= 0:
        return PostSelection(np.zeros_like(out), 0.0)
    return PostSelection(out / np.sqrt(prob), prob)


def exact_evolution(H: np.ndarray, tau: float, initial: np.ndarray) -> np.ndarray:
    """``exp(i*tau*H) @ initial`` via dense eigendecomposition.

    No global phase is removed, e.g. ``H=X, tau=pi/2`` maps ``|0>`` to ``i|1>``.
    """
    H = np.asarray(H, dtype=complex)
    if H.shape[0] != H.shape[1] or np.max(np.abs(H - H.conj().T), initial=0) > HERMITIAN_TOL:
        raise ValueError("H must be a square Hermitian matrix")
    if H.shape[0] != initial.shape[-1]:
        raise ValueError(f"H has dimension {H.shape[0]}, state has {initial.shape[-1]}")
    evals, evecs = np.linalg.eigh(H)
    return evecs @ (np.exp(1j * tau * evals) * (evecs.conj().T @ initial))


def dump_csv(state: np.ndarray, path) -> None:
    with open(path, "w") as fh:
        fh.write("index,re,im\n")
        for i, a in enumerate(np.asarray(state).reshape(-1)):
            fh.write(f"{i},{a.real!r},{a.imag!r}\n")
