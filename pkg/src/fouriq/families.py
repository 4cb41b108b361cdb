"""Concept families ``x -> c_alpha(x)``: bit-configured circuits and Trotterized Hamiltonians.

A family maps an input bitstring to a Pauli-encoded circuit whose encoding
structure does not depend on ``x``, so every member shares one frequency
lattice and one compiled register layout.
"""
from __future__ import annotations

from typing import Sequence

import numpy as np

from .circuit import FrequencyLattice, LatticeKind, ParametrizedCircuit, encode, fixed, lattice
from .fourier import CompiledFourierCircuit, compile_expectation, exact_coefficients, extract_table, grid_dft_oracle
from .hamiltonian import ParamHamiltonian, Trotter, eval_dynamics, trotterize
from .pauli import Observable, pauli_obs
from .shots import EXACT, Exact, Mode, OP_FEATURE_NOISE, stream
from .statevector import eval_concept


class ConceptFamily:
    obs: Observable

    def circuit(self, x: Sequence[int]) -> ParametrizedCircuit:
        raise NotImplementedError

    @property
    def n_bits(self) -> int:
        raise NotImplementedError

    def __init__(self):
        self._compiled: dict[tuple[int, ...], CompiledFourierCircuit] = {}

    @property
    def reference(self) -> ParametrizedCircuit:
        return self.circuit([0] * self.n_bits)

    @property
    def d(self) -> int:
        return self.reference.d

    @property
    def lattice(self) -> FrequencyLattice:
        return lattice(self.reference, LatticeKind.EXPECTATION)

    @property
    def omega(self) -> np.ndarray:
        return self.reference.base_frequencies()

    def concept(self, x: Sequence[int], alpha) -> float:
        return eval_concept(self.circuit(x), self.obs, alpha)

    def compiled(self, x: Sequence[int]) -> CompiledFourierCircuit:
        key = tuple(int(b) for b in x)
        if key not in self._compiled:
            self._compiled[key] = compile_expectation(self.circuit(key), self.obs)
        return self._compiled[key]

    def features(self, x: Sequence[int], mode: Mode = EXACT, key: tuple[int, ...] = ()) -> np.ndarray:
        """Coefficient vector ``b(x)`` in lattice order, exact or shot-estimated."""
        comp = self.compiled(x)
        if isinstance(mode, Exact):
            return exact_coefficients(comp)
        return extract_table(self.circuit(x), self.obs, mode, compiled=comp, key=key).coeffs

    def oracle_features(self, x: Sequence[int]) -> np.ndarray:
        return grid_dft_oracle(self.circuit(x), self.obs).coeffs

    def feature_matrix(self, xs: np.ndarray, mode: Mode = EXACT, phase: int = 0) -> np.ndarray:
        return np.array([self.features(x, mode, (phase, t)) for t, x in enumerate(xs)])


class CircuitFamily(ConceptFamily):
    """Template circuit whose ``bit``-tagged fixed gates are switched on by ``x``."""

    def __init__(self, template: ParametrizedCircuit, obs: Observable, n_bits: int | None = None):
        super().__init__()
        self.template = template
        self.obs = obs
        self._n_bits = template.n_bits if n_bits is None else n_bits

    @property
    def n_bits(self) -> int:
        return self._n_bits

    def circuit(self, x: Sequence[int]) -> ParametrizedCircuit:
        return self.template.bind(x)


class HamiltonianFamily(ConceptFamily):
    """``x -> `` r-step Trotter circuit of ``H(x, alpha)``; labels come from that circuit."""

    def __init__(self, hamiltonian: ParamHamiltonian, r: int, obs: Observable):
        super().__init__()
        self.hamiltonian = hamiltonian
        self.r = r
        self.obs = obs
        self._template = trotterize(hamiltonian, r)

    @property
    def n_bits(self) -> int:
        return self.hamiltonian.n_bits

    def circuit(self, x: Sequence[int]) -> ParametrizedCircuit:
        return self._template.bind(x) if self._template.is_template else self._template

    def exact_concept(self, x: Sequence[int], alpha) -> float:
        return eval_dynamics(self.hamiltonian, self.obs, x, alpha)

    def trotter_concept(self, x: Sequence[int], alpha) -> float:
        return eval_dynamics(self.hamiltonian, self.obs, x, alpha, Trotter(self.r))


def demo_family() -> CircuitFamily:
    """Three qubits, six input bits, one encoding (``m = 5``), observable ``Z0``.

    With a single encoding only ``l = 0, +-2`` can be non-zero; the angles are
    chosen so the 64 inputs give 51 distinct, well-spread feature vectors.
    """
    gates = [
        fixed("RY", [0], 1.5), fixed("RY", [1], 0.3), fixed("RY", [2], 0.6),
        fixed("RX", [0], 0.3, bit=0),
        fixed("CNOT", [0, 1], bit=1),
        fixed("RY", [1], 2.5, bit=2),
        encode("XZY", 0),
        fixed("RX", [2], 1.1, bit=3),
        fixed("CNOT", [1, 2], bit=4),
        fixed("RY", [0], 1.6, bit=5),
        fixed("CNOT", [2, 0]),
    ]
    return CircuitFamily(ParametrizedCircuit(3, 1, tuple(gates), "demo"), pauli_obs("ZII"))


def perturb_features(B: np.ndarray, epsilon_b: float, seed: int, key: int = 0) -> np.ndarray:
    """Add complex noise of modulus uniform in ``[0, epsilon_b]`` and uniform phase."""
    rng = stream(seed, OP_FEATURE_NOISE, key)
    mod = rng.uniform(0, epsilon_b, B.shape)
    phase = rng.uniform(0, 2 * np.pi, B.shape)
    return B + mod * np.exp(1j * phase)
