"""Finite-shot statistics: shot planning, seeded sampling, Gram-entry estimation.

Randomness comes from counter-based Philox streams keyed by
``(seed, operation, task index..., part)`` so every estimate is reproducible
regardless of evaluation order.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .statevector import apply_matrix, apply_ops, controlled, zero_state

# operation ids for stream splitting
OP_EXTRACT = 1
OP_GRAM = 2
OP_DATASET = 3
OP_LABEL_NOISE = 4
OP_FEATURE_NOISE = 5
OP_RISK = 6
OP_ALPHA = 7

_H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)


@dataclass(frozen=True)
class ShotPlan:
    epsilon_b: float
    delta: float
    shots_per_estimate: int


def shots_for(epsilon_b: float, delta: float) -> ShotPlan:
    """Two-sided Hoeffding count ``S = ceil(ln(2/delta) / (2 eps^2))``.

    The guarantee ``P(|mean - p| > eps) <= delta`` holds for the mean of
    ``S`` draws of a variable with range 1.  Estimators with a wider range
    must shrink ``epsilon_b`` accordingly (see :func:`coefficient_plan`).
    """
    if not 0 < epsilon_b <= 1:
        raise ValueError(f"epsilon_b must lie in (0, 1], got {epsilon_b}")
    if not 0 < delta < 1:
        raise ValueError(f"delta must lie in (0, 1), got {delta}")
    s = math.ceil(math.log(2 / delta) / (2 * epsilon_b**2))
    return ShotPlan(epsilon_b, delta, max(1, s))


def coefficient_plan(epsilon_b: float, delta: float, scale: float = 1.0) -> ShotPlan:
    """Shots per Hadamard-test part so a complex coefficient is ``epsilon_b``-accurate.

    Each part estimates ``scale * (2p - 1)``; requiring both parts within
    ``epsilon_b / sqrt(2)`` with probability ``1 - delta/2`` each bounds the
    complex error by ``epsilon_b`` with probability ``1 - delta``.
    """
    eps = epsilon_b / (2 * math.sqrt(2) * scale)
    return ShotPlan(epsilon_b, delta, shots_for(min(eps, 1.0), delta / 2).shots_per_estimate)


def signed_plan(epsilon: float, delta: float, scale: float = 1.0) -> ShotPlan:
    """Shots for a real estimator with outcomes in ``[-scale, scale]``."""
    eps = epsilon / (2 * scale)
    return ShotPlan(epsilon, delta, shots_for(min(eps, 1.0), delta).shots_per_estimate)


@dataclass(frozen=True)
class Exact:
    """Read values directly from simulated amplitudes."""


@dataclass(frozen=True)
class Shots:
    """Finite-shot estimation.

    Give either ``shots`` (per part) or ``epsilon``; with ``epsilon`` the shot
    count is planned from ``(epsilon, delta)`` for the estimator at hand.
    """

    seed: int
    shots: int | None = None
    epsilon: float | None = None
    delta: float = 0.05

    def __post_init__(self):
        if self.shots is None and self.epsilon is None:
            raise ValueError("Shots mode needs either a shot count or a target epsilon")
        if self.shots is not None and self.shots < 1:
            raise ValueError("shot count must be at least 1")
        if int(self.seed) < 0:
            raise ValueError("seed must be a non-negative integer")

    def per_part(self, scale: float = 1.0) -> int:
        if self.shots is not None:
            return int(self.shots)
        return coefficient_plan(self.epsilon, self.delta, scale).shots_per_estimate

    def per_signed(self, scale: float = 1.0) -> int:
        if self.shots is not None:
            return int(self.shots)
        return signed_plan(self.epsilon, self.delta, scale).shots_per_estimate


Mode = Union[Exact, Shots]
EXACT = Exact()


def stream(seed: int, op: int, *key: int) -> np.random.Generator:
    """Independent generator for one task; same arguments give the same draws."""
    # zigzag keeps negative keys (e.g. frequencies) distinct and non-negative
    spawn = tuple(2 * int(k) if k >= 0 else -2 * int(k) - 1 for k in (op,) + key)
    ss = np.random.SeedSequence(int(seed), spawn_key=spawn)
    return np.random.Generator(np.random.Philox(ss))


def sample_bernoulli_mean(p: float, shots: int, seed: int, key: tuple[int, ...] = ()) -> float:
    if not 0 <= p <= 1:
        raise ValueError(f"probability out of range: {p}")
    if shots < 1:
        raise ValueError("shots must be at least 1")
    rng = stream(seed, OP_EXTRACT, *key)
    return rng.binomial(shots, p) / shots


def _clip_prob(p: float) -> float:
    # float round-off from the simulator can leave p a hair outside [0, 1]
    return min(1.0, max(0.0, float(p)))


def gram_probabilities(compiled_x, compiled_xp) -> tuple[float, float]:
    """Outcome probabilities ``(p_plus, p_minus)`` of the overlap circuit.

    A control qubit in ``|+>`` selects ``A(U(x))`` (control 0) or
    ``A(U(x'))`` (control 1); after a final Hadamard on the control the
    observable ``Z (x) |0><0|`` on every non-frequency register takes value
    +1, -1 or 0, and its mean is ``Re<b(x)|b(x')>`` in amplitude units.
    """
    la, lb = compiled_x.layout, compiled_xp.layout
    if la != lb or compiled_x.kind != compiled_xp.kind:
        raise ValueError("mismatched circuit family: compiled layouts differ")
    n = la.n_total + 1
    psi = zero_state(n)
    apply_matrix(psi, _H, (0,))
    apply_ops(psi, controlled([op.shifted(1) for op in compiled_x.ops], 0, 0))
    apply_ops(psi, controlled([op.shifted(1) for op in compiled_xp.ops], 0, 1))
    apply_matrix(psi, _H, (0,))
    t = psi.reshape(2, 2**la.n_freq, -1)[:, :, 0]
    p_plus = float(np.vdot(t[0], t[0]).real)
    p_minus = float(np.vdot(t[1], t[1]).real)
    return _clip_prob(p_plus), _clip_prob(p_minus)


def gram_entry(compiled_x, compiled_xp, mode: Mode = EXACT, key: tuple[int, ...] = ()) -> float:
    """Kernel entry ``Re<b(x)|b(x')>`` from two compiled expectation circuits.

    In shots mode the three-outcome distribution is sampled multinomially;
    the planned count keeps the error below ``mode.epsilon`` with
    probability ``1 - mode.delta``.
    """
    p_plus, p_minus = gram_probabilities(compiled_x, compiled_xp)
    scale = compiled_x.scale * compiled_xp.scale
    if isinstance(mode, Exact):
        return scale * (p_plus - p_minus)
    s = mode.per_signed(scale)
    p_zero = max(0.0, 1.0 - p_plus - p_minus)
    probs = np.array([p_plus, p_minus, p_zero])
    counts = stream(mode.seed, OP_GRAM, *key).multinomial(s, probs / probs.sum())
    return scale * (counts[0] - counts[1]) / s
