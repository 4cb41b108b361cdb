"""Fourier representation of Pauli-encoded circuits.

``compile_state`` rewrites a circuit ``U(alpha)`` into a parameter-free circuit
``A(U)`` over ``[frequency registers][ancilla][circuit]``.  Every Z-string
encoding becomes a parity network onto the ancilla followed by a cyclic
increment (even parity) or decrement (odd parity) of its frequency register,
so the amplitude of ``|l>|0>|k>`` is the coefficient ``a_{l,k}`` in

    <k|U(alpha)|0> = sum_l a_{l,k} exp(i*pi*omega*l*alpha).

The expectation variants prepare ``b_l`` of ``f(alpha) = <0|U^dag O U|0>`` on
``|l>|0...0>``.  Coefficients are read exactly from amplitudes, estimated by
a simulated Hadamard test, or computed classically by a grid DFT.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Callable, Iterable, Sequence

import numpy as np

from .circuit import (
    Encode,
    Fixed,
    FrequencyLattice,
    LatticeKind,
    ParametrizedCircuit,
    check,
    lattice,
    normalize_to_z,
)
from .errors import BudgetError
from .pauli import Combination, Observable, PauliObs, PauliString, ZeroProjector, observable_norm_bound
from .shots import EXACT, OP_EXTRACT, Exact, Mode, Shots, stream
from .statevector import (
    MAX_QUBITS,
    Op,
    apply_matrix,
    apply_ops,
    circuit_ops,
    controlled,
    expectation,
    postselect,
    run_batch,
    zero_state,
)

_X = np.array([[0, 1], [1, 0]], dtype=complex)
_H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
_SDG = np.diag([1, -1j])
DEFAULT_MAX_LATTICE = 4096


class CompiledKind(str, Enum):
    STATE = "state"
    PAULI = "expectation-pauli"
    LCU = "expectation-lcu"
    PROJECTOR = "expectation-projector"


@dataclass(frozen=True)
class Layout:
    """Qubit assignment of a compiled circuit (qubit 0 is the MSB)."""

    freq: tuple[tuple[int, ...], ...]
    capacity: tuple[int, ...]
    index: tuple[int, ...]
    ancilla: int | None
    circuit: tuple[int, ...]
    circuit2: tuple[int, ...] = ()

    @property
    def n_freq(self) -> int:
        return sum(len(r) for r in self.freq)

    @property
    def n_total(self) -> int:
        return self.n_freq + len(self.index) + (self.ancilla is not None) + len(self.circuit) + len(self.circuit2)

    def freq_index(self, l: Sequence[int]) -> int:
        """Basis index of ``|l>`` within the frequency registers (two's complement)."""
        idx = 0
        for v, reg in zip(l, self.freq):
            m = len(reg)
            idx = (idx << m) | (int(v) % (1 << m)) if m else idx
        return idx


def register_width(capacity: int) -> int:
    """Qubits needed for a cyclic register holding ``[-K, K]``."""
    return 0 if capacity == 0 else math.ceil(math.log2(2 * capacity + 1))


def _increment(reg: Sequence[int], extra: tuple[int, ...], extra_vals: tuple[int, ...]) -> list[Op]:
    """Cyclic +1 on ``reg`` (MSB first) as a multi-controlled-X ladder."""
    ops = []
    for j, q in enumerate(reg):
        lower = tuple(reg[j + 1:])
        ops.append(Op(_X, (q,), lower + extra, (1,) * len(lower) + extra_vals, "inc"))
    return ops


def _shift(reg, direction: int, extra=(), extra_vals=()) -> list[Op]:
    ops = _increment(reg, tuple(extra), tuple(extra_vals))
    if direction > 0:
        return ops
    return [replace(op, tag="dec") for op in reversed(ops)]


def _encoding_block(g: Encode, layout: Layout, cq: Sequence[int], conj: bool) -> list[Op]:
    """Parity network, conditional shift, parity network (``D G D``)."""
    direction = int(np.sign(g.scale)) * (-1 if conj else 1)
    reg = layout.freq[g.param]
    support = [cq[q] for q in g.pauli.support]
    if not support:
        return _shift(reg, direction)
    a = layout.ancilla
    parity = [Op(_X, (a,), (q,), (1,), "parity") for q in support]
    block = list(parity)
    block += _shift(reg, direction, (a,), (0,))
    block += _shift(reg, -direction, (a,), (1,))
    block += parity
    return block


def _circuit_block(circuit: ParametrizedCircuit, layout: Layout, cq: Sequence[int], conj: bool = False) -> list[Op]:
    ops: list[Op] = []
    for g in circuit.gates:
        if isinstance(g, Fixed):
            m = g.matrix.conj() if conj else g.matrix
            ops.append(Op(m, tuple(cq[t] for t in g.targets), tag="fixed"))
        else:
            ops.extend(_encoding_block(g, layout, cq, conj))
    return ops


def _dagger(ops: Sequence[Op]) -> list[Op]:
    return [op.dagger() for op in reversed(ops)]


@dataclass(frozen=True, eq=False)
class CompiledFourierCircuit:
    ops: tuple[Op, ...]
    layout: Layout
    kind: CompiledKind
    lattice: FrequencyLattice
    omega: np.ndarray
    scale: float = 1.0  # coefficients are amplitude * scale
    n: int = 0
    label: str = ""
    # simulated Hadamard-test probabilities per frequency; shots are drawn fresh each call
    _probs: dict = field(default_factory=dict, repr=False)

    def amplitudes(self) -> np.ndarray:
        if self.layout.n_total > MAX_QUBITS:
            raise BudgetError(f"compiled circuit needs {self.layout.n_total} qubits (cap {MAX_QUBITS})")
        return apply_ops(zero_state(self.layout.n_total), self.ops)

    def gate_counts(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for op in self.ops:
            counts[op.tag] = counts.get(op.tag, 0) + 1
        return counts


def _layout(circuit: ParametrizedCircuit, capacity: Sequence[int], n_index: int = 0, copies: int = 1) -> Layout:
    widths = [register_width(k) for k in capacity]
    q = 0
    freq = []
    for w in widths:
        freq.append(tuple(range(q, q + w)))
        q += w
    index = tuple(range(q, q + n_index))
    q += n_index
    ancilla = None
    if circuit.encodings:
        ancilla = q
        q += 1
    c1 = tuple(range(q, q + circuit.n))
    q += circuit.n
    c2 = tuple(range(q, q + circuit.n)) if copies == 2 else ()
    layout = Layout(tuple(freq), tuple(int(k) for k in capacity), index, ancilla, c1, c2)
    if layout.n_total > MAX_QUBITS:
        raise BudgetError(f"compilation needs {layout.n_total} qubits, cap is {MAX_QUBITS}")
    return layout


def compile_state(circuit: ParametrizedCircuit) -> CompiledFourierCircuit:
    """``A(U)`` with ``|l>_f |0>_a |k>_c`` amplitude ``a_{l,k}``."""
    check(circuit)
    if circuit.is_template:
        raise ValueError("circuit has bit-conditioned gates; bind an input first")
    lat = lattice(circuit, LatticeKind.STATE)
    z = normalize_to_z(circuit)
    layout = _layout(circuit, lat.bounds)
    ops = _circuit_block(z, layout, layout.circuit)
    return CompiledFourierCircuit(tuple(ops), layout, CompiledKind.STATE, lat,
                                  circuit.base_frequencies(), 1.0, circuit.n, circuit.label)


def _householder_prep(amps: np.ndarray) -> np.ndarray:
    """Real unitary whose first column is the unit vector ``amps``."""
    dim = len(amps)
    e0 = np.zeros(dim)
    e0[0] = 1.0
    u = e0 - amps
    nrm = np.dot(u, u)
    if nrm < 1e-30:
        return np.eye(dim, dtype=complex)
    return (np.eye(dim) - 2 * np.outer(u, u) / nrm).astype(complex)


def _pauli_ops(p: PauliString, cq: Sequence[int], sign: float = 1.0, ctrl=(), cvals=()) -> list[Op]:
    letters = {"X": _X, "Y": np.array([[0, -1j], [1j, 0]]), "Z": np.diag([1.0 + 0j, -1.0])}
    ops = [Op(letters[p.letters[q]], (cq[q],), tuple(ctrl), tuple(cvals), "observable") for q in p.support]
    if sign < 0:
        ops.append(Op(-np.eye(2, dtype=complex), (cq[0],), tuple(ctrl), tuple(cvals), "observable"))
    return ops


def compile_expectation(circuit: ParametrizedCircuit, obs: Observable) -> CompiledFourierCircuit:
    """Circuit whose ``|l>|0...0>`` amplitude is ``b_l / scale``."""
    check(circuit)
    if circuit.is_template:
        raise ValueError("circuit has bit-conditioned gates; bind an input first")
    if obs.n != circuit.n:
        raise ValueError(f"observable acts on {obs.n} qubits, circuit has {circuit.n}")
    lat = lattice(circuit, LatticeKind.EXPECTATION)
    omega = circuit.base_frequencies()
    z = normalize_to_z(circuit)

    if isinstance(obs, PauliObs):
        layout = _layout(circuit, lat.bounds)
        a = _circuit_block(z, layout, layout.circuit)
        ops = a + _pauli_ops(obs.p, layout.circuit) + _dagger(a)
        return CompiledFourierCircuit(tuple(ops), layout, CompiledKind.PAULI, lat, omega, 1.0, circuit.n, circuit.label)

    if isinstance(obs, Combination):
        betas = np.array([b for b, _ in obs.terms], dtype=float)
        norm1 = float(np.sum(np.abs(betas)))
        if norm1 == 0:
            raise ValueError("linear combination with all-zero coefficients")
        h = len(betas)
        n_index = math.ceil(math.log2(h)) if h > 1 else 0
        layout = _layout(circuit, lat.bounds, n_index=n_index)
        ops: list[Op] = []
        if n_index:
            amps = np.zeros(2**n_index)
            amps[:h] = np.sqrt(np.abs(betas) / norm1)
            prep = Op(_householder_prep(amps), layout.index, tag="prepare")
            ops.append(prep)
        a = _circuit_block(z, layout, layout.circuit)
        ops += a
        for j, (beta, p) in enumerate(obs.terms):
            if beta == 0:
                continue
            cvals = tuple((j >> (n_index - 1 - b)) & 1 for b in range(n_index))
            ops += _pauli_ops(p, layout.circuit, np.sign(beta), layout.index, cvals)
        ops += _dagger(a)
        if n_index:
            ops.append(prep.dagger())
        return CompiledFourierCircuit(tuple(ops), layout, CompiledKind.LCU, lat, omega, norm1, circuit.n, circuit.label)

    if isinstance(obs, ZeroProjector):
        layout = _layout(circuit, lat.bounds, copies=2)
        ops = _circuit_block(z, layout, layout.circuit) + _circuit_block(z, layout, layout.circuit2, conj=True)
        return CompiledFourierCircuit(tuple(ops), layout, CompiledKind.PROJECTOR, lat, omega, 1.0, circuit.n, circuit.label)

    raise TypeError(f"not an observable: {obs!r}")


def state_coefficients(compiled: CompiledFourierCircuit) -> np.ndarray:
    """``a_{l,k}`` as an ``(m, 2**n)`` array in lattice order."""
    if compiled.kind is not CompiledKind.STATE:
        raise ValueError("state coefficients need a state-kind compilation")
    lay = compiled.layout
    amps = compiled.amplitudes().reshape(2**lay.n_freq, -1, 2**compiled.n)[:, 0, :]
    rows = [lay.freq_index(l) for l in compiled.lattice]
    return amps[rows]


def reconstruct_state(compiled: CompiledFourierCircuit, alpha, coeffs: np.ndarray | None = None) -> np.ndarray:
    """Phase-weight the frequency register: ``sum_l a_l exp(i*pi*omega*l*alpha)``."""
    if coeffs is None:
        coeffs = state_coefficients(compiled)
    pts = compiled.lattice.points()
    phases = np.exp(1j * np.pi * pts @ (compiled.omega * np.asarray(alpha, dtype=float).reshape(-1)))
    return phases @ coeffs


def _readout_index(compiled: CompiledFourierCircuit, l) -> int:
    lay = compiled.layout
    return lay.freq_index(l) << (lay.n_total - lay.n_freq)


def _expect_kind(compiled: CompiledFourierCircuit):
    if compiled.kind is CompiledKind.STATE:
        raise ValueError("operation needs an expectation-kind compilation")


def exact_coefficients(compiled: CompiledFourierCircuit) -> np.ndarray:
    _expect_kind(compiled)
    lay = compiled.layout
    col = compiled.amplitudes().reshape(2**lay.n_freq, -1)[:, 0]
    return compiled.scale * col[[lay.freq_index(l) for l in compiled.lattice]]


def hadamard_probabilities(compiled: CompiledFourierCircuit, l) -> tuple[float, float]:
    """``P(control = 0)`` for the real and imaginary Hadamard tests of ``b_l``.

    Control qubit 0 is prepended; the test applies controlled ``A`` then the
    controlled basis flip ``V_l`` (``V_l|0> = |l>``), so
    ``P0 = (1 + Re<l|A|0>)/2``; an ``S^dag`` on the control gives ``Im``.
    """
    _expect_kind(compiled)
    l = tuple(int(v) for v in np.atleast_1d(l))
    if l not in compiled.lattice:
        raise KeyError(f"frequency {tuple(l)} outside lattice with bounds {compiled.lattice.bounds}")
    if l in compiled._probs:
        return compiled._probs[l]
    lay = compiled.layout
    shifted = [op.shifted(1) for op in compiled.ops]
    flips = []
    for v, reg in zip(l, lay.freq):
        m = len(reg)
        for b, q in enumerate(reg):
            if (int(v) % (1 << m)) >> (m - 1 - b) & 1:
                flips.append(Op(_X, (q + 1,), tag="basis"))
    probs = []
    for part in (0, 1):
        psi = zero_state(lay.n_total + 1)
        apply_matrix(psi, _H, (0,))
        if part:
            apply_matrix(psi, _SDG, (0,))
        apply_ops(psi, controlled(shifted + flips, 0))
        apply_matrix(psi, _H, (0,))
        half = psi[: 2**lay.n_total]
        probs.append(min(1.0, max(0.0, float(np.vdot(half, half).real))))
    compiled._probs[l] = (probs[0], probs[1])
    return probs[0], probs[1]


def extract_coefficient(compiled: CompiledFourierCircuit, l, mode: Mode = EXACT, key: tuple[int, ...] | None = None) -> complex:
    """``b_l`` exactly or from a shot-sampled Hadamard test."""
    _expect_kind(compiled)
    l = tuple(int(v) for v in np.atleast_1d(l))
    if l not in compiled.lattice:
        raise KeyError(f"frequency {l} outside lattice with bounds {compiled.lattice.bounds}")
    if isinstance(mode, Exact):
        return complex(compiled.scale * compiled.amplitudes()[_readout_index(compiled, l)])
    p_re, p_im = hadamard_probabilities(compiled, l)
    return _sample_coefficient(compiled.scale, p_re, p_im, mode, key if key is not None else l)


def _sample_coefficient(scale, p_re, p_im, mode: Shots, key) -> complex:
    s = mode.per_part(scale)
    key = tuple(key)
    re = stream(mode.seed, OP_EXTRACT, *key, 0).binomial(s, p_re) / s
    im = stream(mode.seed, OP_EXTRACT, *key, 1).binomial(s, p_im) / s
    return scale * complex(2 * re - 1, 2 * im - 1)


@dataclass
class FourierTable:
    """Coefficients ``b_l`` of ``f(alpha) = sum_l b_l exp(i*pi*(omega*l).alpha)``."""

    lattice: FrequencyLattice
    coeffs: np.ndarray
    omega: np.ndarray = None
    provenance: str = "exact"
    shots: int | None = None
    seed: int | None = None

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=complex).reshape(-1)
        if len(self.coeffs) != self.lattice.size:
            raise ValueError(f"{len(self.coeffs)} coefficients for a lattice of size {self.lattice.size}")
        self.omega = np.ones(self.lattice.d) if self.omega is None else np.asarray(self.omega, dtype=float)

    @classmethod
    def from_dict(cls, entries: dict, d: int = 1, **kw) -> "FourierTable":
        keys = [tuple(np.atleast_1d(k)) for k in entries]
        bounds = tuple(max([abs(int(k[s])) for k in keys], default=0) for s in range(d))
        lat = FrequencyLattice(bounds)
        coeffs = np.zeros(lat.size, dtype=complex)
        for k, v in zip(keys, entries.values()):
            coeffs[lat.index(k)] = v
        return cls(lat, coeffs, **kw)

    def __getitem__(self, l) -> complex:
        return complex(self.coeffs[self.lattice.index(np.atleast_1d(l))])

    def get(self, l, default: complex = 0.0) -> complex:
        l = tuple(np.atleast_1d(l))
        return self[l] if l in self.lattice else default

    def items(self) -> Iterable[tuple[tuple[int, ...], complex]]:
        return zip(self.lattice, self.coeffs)

    @property
    def norm2(self) -> float:
        return float(np.linalg.norm(self.coeffs))

    @property
    def norm1(self) -> float:
        return float(np.sum(np.abs(self.coeffs)))

    def symmetry_defect(self) -> float:
        """``max |b_{-l} - conj(b_l)|``; zero for real functions."""
        mirrored = self.coeffs[::-1]  # lattice order is symmetric under l -> -l
        return float(np.max(np.abs(mirrored - self.coeffs.conj()), initial=0.0))

    def to_csv(self, header: Sequence[str] = ()) -> str:
        out = io.StringIO()
        for line in header:
            out.write(f"# {line}\n")
        w = csv.writer(out, lineterminator="\n")
        w.writerow([f"l_{s}" for s in range(self.lattice.d)] + ["re", "im", "provenance"])
        for l, b in self.items():
            w.writerow(list(l) + [repr(float(b.real)), repr(float(b.imag)), self.provenance])
        return out.getvalue()

    def to_json(self) -> dict:
        return {
            "lattice": {"bounds": list(self.lattice.bounds), "kind": self.lattice.kind.value, "size": self.lattice.size},
            "omega": [float(w) for w in self.omega],
            "provenance": {"kind": self.provenance, "shots": self.shots, "seed": self.seed},
            "coefficients": [
                {"l": list(l), "re": float(b.real), "im": float(b.imag)} for l, b in self.items()
            ],
        }


def extract_table(
    circuit: ParametrizedCircuit,
    obs: Observable,
    mode: Mode = EXACT,
    max_lattice: int = DEFAULT_MAX_LATTICE,
    symmetric: bool = False,
    compiled: CompiledFourierCircuit | None = None,
    key: tuple[int, ...] = (),
) -> FourierTable:
    """Every ``b_l`` on the expectation lattice.

    With ``symmetric=True`` only the half-lattice ``l >= 0`` (lexicographic)
    is estimated and the rest is filled by conjugation.
    """
    lat = lattice(circuit, LatticeKind.EXPECTATION)
    if lat.size > max_lattice:
        raise BudgetError(f"lattice size m={lat.size} exceeds budget {max_lattice}")
    if compiled is None:
        compiled = compile_expectation(circuit, obs)
    omega = circuit.base_frequencies()
    if isinstance(mode, Exact):
        return FourierTable(lat, exact_coefficients(compiled), omega, "exact")
    m = lat.size
    coeffs = np.zeros(m, dtype=complex)
    half = (m + 1) // 2 if symmetric else m
    order = list(lat)
    for i in range(m - half, m) if symmetric else range(m):
        p_re, p_im = hadamard_probabilities(compiled, order[i])
        coeffs[i] = _sample_coefficient(compiled.scale, p_re, p_im, mode, tuple(key) + (i,))
    if symmetric:
        mid = m // 2  # m is odd; index m-1-i holds -l
        coeffs[:mid] = coeffs[::-1][:mid].conj()
        coeffs[mid] = coeffs[mid].real
    return FourierTable(lat, coeffs, omega, "shots", mode.per_part(compiled.scale), mode.seed)


def reconstruct(table: FourierTable, alpha) -> complex | np.ndarray:
    """``sum_l b_l exp(i*pi*(omega*l).alpha)``; accepts one point or a ``(B, d)`` batch."""
    alpha = np.asarray(alpha, dtype=float)
    single = alpha.ndim <= 1
    alpha = alpha.reshape(1, -1) if single else alpha
    if alpha.shape[1] != table.lattice.d:
        raise ValueError(f"alpha has length {alpha.shape[1]}, table has d={table.lattice.d}")
    pts = table.lattice.points() * table.omega
    vals = np.exp(1j * np.pi * alpha @ pts.T) @ table.coeffs
    return complex(vals[0]) if single else vals


def dft_coefficients(values: np.ndarray, bounds: Sequence[int]) -> np.ndarray:
    """Lattice-ordered coefficients from samples on the grid ``k_s / N_s`` of one period.

    ``values`` has shape ``(N_0, ..., N_{d-1})``; coefficient ``l`` is
    ``fftn(values)[l mod N] / prod(N)``.
    """
    shape = values.shape
    if any(n < 2 * k + 1 for n, k in zip(shape, bounds)):
        raise ValueError(f"grid {shape} too small for bounds {tuple(bounds)} (aliasing)")
    spec = np.fft.fftn(values) / values.size
    lat = FrequencyLattice(tuple(bounds))
    pts = lat.points()
    idx = tuple((pts[:, s] % shape[s]) for s in range(len(shape)))
    return spec[idx] if len(shape) else spec.reshape(1)


def concept_values(circuit: ParametrizedCircuit, obs: Observable, alphas: np.ndarray) -> np.ndarray:
    return np.asarray(expectation(run_batch(circuit, alphas), obs), dtype=float).reshape(-1)


def period_grid(omega: Sequence[float], sizes: Sequence[int]) -> np.ndarray:
    """Grid ``alpha_{k,s} = 2 k_s / (N_s omega_s)`` over one period, ``(prod N, d)`` rows."""
    axes = [2 * np.arange(n) / (n * w) for n, w in zip(sizes, omega)]
    if not axes:
        return np.zeros((1, 0))
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([g.reshape(-1) for g in mesh], axis=1)


def grid_dft_oracle(
    circuit: ParametrizedCircuit,
    obs: Observable,
    lat: FrequencyLattice | None = None,
    sizes: Sequence[int] | None = None,
) -> FourierTable:
    """Classical ground truth: sample ``f`` on the period grid and take the DFT."""
    if lat is None:
        lat = lattice(circuit, LatticeKind.EXPECTATION)
    if sizes is None:
        sizes = [2 * k + 1 for k in lat.bounds]
    if any(n < 2 * k + 1 for n, k in zip(sizes, lat.bounds)):
        raise ValueError(f"grid sizes {tuple(sizes)} too small for lattice bounds {lat.bounds} (aliasing)")
    omega = circuit.base_frequencies()
    grid = period_grid(omega, sizes)
    vals = concept_values(circuit, obs, grid).reshape(tuple(sizes))
    return FourierTable(lat, dft_coefficients(vals, lat.bounds), omega, "oracle")


def success_probability(compiled: CompiledFourierCircuit) -> float:
    """Probability of finding every non-frequency register in ``|0>``.

    Equals ``sum_l |b_l|^2`` for Pauli and projector observables and
    ``sum_l |b_l|^2 / scale^2`` for linear combinations.
    """
    _expect_kind(compiled)
    lay = compiled.layout
    rest = list(range(lay.n_freq, lay.n_total))
    return postselect(compiled.amplitudes(), rest, [0] * len(rest)).probability


def _qft_matrix(dim: int) -> np.ndarray:
    j = np.arange(dim)
    return np.exp(2j * np.pi * np.outer(j, j) / dim) / np.sqrt(dim)


def _amplitude_oracle(value: float) -> np.ndarray:
    # |0> -> value|0> + sqrt(1 - value^2)|1>
    c = float(np.clip(value, -1.0, 1.0))
    s = math.sqrt(max(0.0, 1 - c * c))
    return np.array([[c, -s], [s, c]], dtype=complex)


def qft_pathway(
    circuit: ParametrizedCircuit,
    obs: Observable | None,
    M: int,
    max_qubits: int = 3,
    max_grid: int = 8,
) -> FourierTable | np.ndarray:
    """Oracle-plus-QFT extraction, simulated gate by gate.

    An index register of ``log2 M`` qubits is put in uniform superposition and
    each grid point ``k`` controls an oracle at ``alpha_k = 2k/(M omega)``.  An
    inverse QFT then moves coefficient ``l`` to index ``l mod M``.  With
    ``obs=None`` the oracle is ``U(alpha_k)`` itself and the result is the
    ``(m, 2**n)`` array of state coefficients; otherwise the oracle writes
    ``f(alpha_k) / |O|`` into an amplitude and a FourierTable is returned.
    """
    check(circuit)
    if circuit.d > 1:
        raise BudgetError("the QFT pathway supports d <= 1 only")
    if circuit.n > max_qubits or M > max_grid:
        raise BudgetError(f"QFT pathway budget exceeded (n={circuit.n} > {max_qubits} or M={M} > {max_grid})")
    if M < 1 or M & (M - 1):
        raise ValueError(f"grid size M={M} must be a power of two")
    kind = LatticeKind.STATE if obs is None else LatticeKind.EXPECTATION
    lat = lattice(circuit, kind)
    K = lat.bounds[0] if circuit.d else 0
    if M < 2 * K + 1:
        raise ValueError(f"grid size M={M} below 2K+1={2 * K + 1} (aliasing)")
    omega = circuit.base_frequencies()
    q = int(math.log2(M))
    idx = tuple(range(q))
    if circuit.d:
        alphas = (2 * np.arange(M) / (M * omega[0])).reshape(M, 1)
    else:
        alphas = np.zeros((M, 0))  # constant circuit: same oracle at every grid point
    n_tail = circuit.n if obs is None else 1
    psi = zero_state(q + n_tail)
    for j in idx:
        apply_matrix(psi, _H, (j,))
    if obs is None:
        for k in range(M):
            cvals = tuple((k >> (q - 1 - b)) & 1 for b in range(q))
            for op in circuit_ops(circuit, alphas[k], offset=q):
                op = Op(op.matrix, op.targets, idx, cvals) if q else op
                apply_matrix(psi, op.matrix, op.targets, op.controls, op.cvals)
    else:
        norm = observable_norm_bound(obs)
        vals = concept_values(circuit, obs, alphas) / norm
        for k in range(M):
            cvals = tuple((k >> (q - 1 - b)) & 1 for b in range(q))
            apply_matrix(psi, _amplitude_oracle(vals[k]), (q,), idx, cvals)
    if q:
        apply_matrix(psi, _qft_matrix(M).conj().T, idx)
    rows = [int(l[0]) % M if l else 0 for l in lat]
    if obs is None:
        return psi.reshape(M, -1)[rows]
    amps = psi.reshape(M, 2)[:, 0]
    return FourierTable(lat, norm * amps[rows], omega, "oracle")


def unit_cell_table(func: Callable[[np.ndarray], np.ndarray], d: int, N: int) -> FourierTable:
    """DFT of ``func`` sampled on ``alpha = k/N`` in ``[0, 1)^d``.

    The basis is ``exp(2*pi*i*k.alpha)`` (``omega = 2``).  By the discrete
    Parseval identity the 2-norm distance of two such tables equals the RMS
    difference of the sampled functions, so it never exceeds their maximum
    deviation on ``[0, 1]^d``.
    """
    K = (N - 1) // 2
    grid = period_grid([2.0] * d, [N] * d)
    vals = np.asarray(func(grid), dtype=complex).reshape((N,) * d)
    lat = FrequencyLattice((K,) * d)
    if N % 2 == 0:
        raise ValueError("unit-cell grids need an odd point count")
    return FourierTable(lat, dft_coefficients(vals, lat.bounds), np.full(d, 2.0), "oracle")


def table_distance(a: FourierTable, b: FourierTable) -> float:
    """2-norm distance after aligning both tables on a common base frequency.

    Each table's base frequency must be an integer multiple of the common one
    (the smaller of the two) in every dimension.
    """
    if a.lattice.d != b.lattice.d:
        raise ValueError("tables have different dimensions")
    base = np.minimum(a.omega, b.omega)
    acc: dict[tuple[int, ...], complex] = {}
    for t, sign in ((a, 1.0), (b, -1.0)):
        ratio = t.omega / base
        if not np.allclose(ratio, np.round(ratio), rtol=1e-9, atol=0):
            raise ValueError("table frequencies are not commensurate")
        r = np.round(ratio).astype(int)
        for l, c in t.items():
            key = tuple(int(v) * int(k) for v, k in zip(l, r))
            acc[key] = acc.get(key, 0) + sign * c
    return float(math.sqrt(sum(abs(v) ** 2 for v in acc.values())))


def resource_report(compiled: CompiledFourierCircuit, circuit: ParametrizedCircuit) -> dict[str, int]:
    """Actual qubit and gate counts beside the estimate ``N_f + L(2n + d*ceil(log2 L))``.

    The estimate assumes a particular increment decomposition; it is reported
    for comparison, not enforced.
    """
    n_fixed = sum(isinstance(g, Fixed) for g in circuit.gates)
    L = len(circuit.encodings)
    log_l = math.ceil(math.log2(L)) if L > 1 else 0
    return {
        "qubits": compiled.layout.n_total,
        "gates": len(compiled.ops),
        "estimated_gates": n_fixed + L * (2 * circuit.n + circuit.d * log_l),
        **{f"gates_{tag}": c for tag, c in sorted(compiled.gate_counts().items())},
    }
