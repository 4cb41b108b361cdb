"""Pauli strings and the observables built from them.

Strings are written most-significant-qubit first, so ``letters[i]`` acts on
qubit ``i`` (qubit 0 is the most significant bit of an amplitude index).
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Sequence, Union

import numpy as np

PAULI_LETTERS = "IXYZ"

_MATS = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def letter_matrix(letter: str) -> np.ndarray:
    return _MATS[letter]


@dataclass(frozen=True)
class PauliString:
    letters: str

    def __post_init__(self):
        bad = [c for c in self.letters if c not in PAULI_LETTERS]
        if bad:
            raise ValueError(f"unknown Pauli letter {bad[0]!r}")
        if not self.letters:
            raise ValueError("empty Pauli string")

    @classmethod
    def from_sparse(cls, n: int, ops: dict[int, str]) -> "PauliString":
        """Build from ``{qubit: letter}``, e.g. ``from_sparse(3, {0: 'Z', 2: 'Z'})``."""
        letters = ["I"] * n
        for q, c in ops.items():
            letters[q] = c
        return cls("".join(letters))

    @classmethod
    def identity(cls, n: int) -> "PauliString":
        return cls("I" * n)

    @property
    def n(self) -> int:
        return len(self.letters)

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(i for i, c in enumerate(self.letters) if c != "I")

    @property
    def is_identity(self) -> bool:
        return not self.support

    def commutes_with(self, other: "PauliString") -> bool:
        clashes = sum(
            1 for a, b in zip(self.letters, other.letters) if a != "I" and b != "I" and a != b
        )
        return clashes % 2 == 0

    def local_matrix(self) -> np.ndarray:
        """Matrix on the support qubits only (ordered as :attr:`support`)."""
        if self.is_identity:
            return np.eye(1, dtype=complex)
        return reduce(np.kron, [_MATS[self.letters[q]] for q in self.support])

    def matrix(self) -> np.ndarray:
        return reduce(np.kron, [_MATS[c] for c in self.letters])

    def __str__(self) -> str:
        return self.letters


@dataclass(frozen=True)
class PauliObs:
    p: PauliString

    @property
    def n(self) -> int:
        return self.p.n


@dataclass(frozen=True)
class Combination:
    """Real linear combination ``sum_h beta_h P_h``."""

    terms: tuple[tuple[float, PauliString], ...]

    def __post_init__(self):
        if not self.terms:
            raise ValueError("a Combination needs at least one term")
        ns = {p.n for _, p in self.terms}
        if len(ns) != 1:
            raise ValueError("all Pauli terms must have the same length")
        for beta, _ in self.terms:
            if not np.isfinite(beta):
                raise ValueError("non-finite coefficient in Combination")

    @property
    def n(self) -> int:
        return self.terms[0][1].n

    @property
    def l1_norm(self) -> float:
        return float(sum(abs(b) for b, _ in self.terms))


@dataclass(frozen=True)
class ZeroProjector:
    """The projector onto ``|0...0>`` of an ``n``-qubit register."""

    n: int


Observable = Union[PauliObs, Combination, ZeroProjector]


def pauli_obs(letters: str) -> PauliObs:
    return PauliObs(PauliString(letters))


def combination(terms: Sequence[tuple[float, str]]) -> Combination:
    return Combination(tuple((float(b), PauliString(p)) for b, p in terms))


def observable_matrix(obs: Observable) -> np.ndarray:
    """Dense Hermitian matrix of an observable (small ``n`` only)."""
    if isinstance(obs, PauliObs):
        return obs.p.matrix()
    if isinstance(obs, Combination):
        return sum(b * p.matrix() for b, p in obs.terms)
    if isinstance(obs, ZeroProjector):
        m = np.zeros((2**obs.n, 2**obs.n), dtype=complex)
        m[0, 0] = 1.0
        return m
    raise TypeError(f"not an observable: {obs!r}")


def observable_norm_bound(obs: Observable) -> float:
    """Cheap upper bound on the spectral norm."""
    if isinstance(obs, Combination):
        return obs.l1_norm
    return 1.0
