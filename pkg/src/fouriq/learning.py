"""Learning on Fourier features: L1-constrained regression, kernel ridge regression,
the flipped-concept Fourier fit, and the sample/covering-number planners.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
import scipy.linalg

from .circuit import FrequencyLattice
from .errors import ConvergenceError
from .fourier import FourierTable
from .shots import OP_DATASET, OP_LABEL_NOISE, OP_RISK, stream


# -- planning -----------------------------------------------------------------

@dataclass(frozen=True)
class LassoPlan:
    m: int
    T: int
    epsilon_b: float
    Lambda1: float
    epsilon: float
    delta: float

    @property
    def circuit_executions(self) -> float:
        """``m T / epsilon_b^2`` circuit runs to estimate every training feature."""
        return self.m * self.T / self.epsilon_b**2


def lasso_sample_count(m: int, epsilon: float, delta: float) -> int:
    return math.ceil(16 * m**4 * math.sqrt(2 * math.log(2 * m / delta)) / epsilon**2)


def plan_lasso(m: int, epsilon: float, delta: float) -> LassoPlan:
    """Sample count, feature accuracy and L1 budget for target risk ``epsilon``."""
    if m < 1:
        raise ValueError("lattice size m must be at least 1")
    if not 0 < epsilon <= 1:
        raise ValueError(f"epsilon must lie in (0, 1], got {epsilon}")
    if not 0 < delta < 1:
        raise ValueError(f"delta must lie in (0, 1), got {delta}")
    return LassoPlan(m, lasso_sample_count(m, epsilon, delta), 0.2 * epsilon / m, float(m), epsilon, delta)


def covering_grid(d: int, L: int, b_l1_norm: float, epsilon: float) -> tuple[int, int]:
    """Per-dimension grid ``M = ceil(d L |b|_1 / eps)`` and cell count ``G = M^d``."""
    if min(d, L, b_l1_norm, epsilon) <= 0:
        raise ValueError("covering_grid inputs must be positive")
    M = max(1, math.ceil(d * L * b_l1_norm / epsilon))
    return M, M**d


# -- data ---------------------------------------------------------------------

@dataclass
class Dataset:
    inputs: np.ndarray  # (T, n_bits) of 0/1
    labels: np.ndarray
    label_noise_bound: float = 0.0

    def __post_init__(self):
        self.inputs = np.asarray(self.inputs, dtype=np.int8).reshape(len(self.inputs), -1)
        self.labels = np.asarray(self.labels, dtype=float)
        if len(self.inputs) != len(self.labels):
            raise ValueError("inputs and labels differ in length")

    def __len__(self) -> int:
        return len(self.labels)


def sample_inputs(n_bits: int, T: int, rng: np.random.Generator, probs: Sequence[float] | None = None) -> np.ndarray:
    """``T`` bitstrings from a product distribution (uniform by default)."""
    p = np.full(n_bits, 0.5) if probs is None else np.asarray(probs, dtype=float)
    return (rng.random((T, n_bits)) < p).astype(np.int8)


def generate_dataset(
    concept: Callable[[np.ndarray], float],
    n_bits: int,
    T: int,
    seed: int,
    label_noise: float = 0.0,
    probs: Sequence[float] | None = None,
    key: int = 0,
) -> Dataset:
    """i.i.d. inputs labelled by ``concept`` plus noise uniform in ``[-eps_y, eps_y]``."""
    if T < 1:
        raise ValueError("T must be at least 1")
    if label_noise < 0:
        raise ValueError("label noise bound must be non-negative")
    xs = sample_inputs(n_bits, T, stream(seed, OP_DATASET, key), probs)
    labels = np.array([concept(x) for x in xs], dtype=float)
    if label_noise:
        labels += stream(seed, OP_LABEL_NOISE, key).uniform(-label_noise, label_noise, T)
    return Dataset(xs, labels, label_noise)


def true_weights(alpha, lat: FrequencyLattice, omega=None) -> np.ndarray:
    """``w_l = exp(i*pi*(omega*l).alpha)``, so ``f(alpha) = b . w``."""
    alpha = np.asarray(alpha, dtype=float).reshape(-1)
    if len(alpha) != lat.d:
        raise ValueError(f"alpha has length {len(alpha)}, lattice has d={lat.d}")
    omega = np.ones(lat.d) if omega is None else np.asarray(omega, dtype=float)
    return np.exp(1j * np.pi * lat.points() @ (omega * alpha))


# -- L1-constrained least squares ---------------------------------------------

def project_l1_ball(w: np.ndarray, radius: float) -> np.ndarray:
    """Euclidean projection onto ``{w : sum |w_l| <= radius}`` (complex entries keep their phase)."""
    mod = np.abs(w)
    if mod.sum() <= radius:
        return w.copy()
    u = np.sort(mod)[::-1]
    css = np.cumsum(u)
    k = np.arange(1, len(u) + 1)
    rho = np.nonzero(u * k > css - radius)[0][-1]
    theta = (css[rho] - radius) / (rho + 1)
    shrunk = np.maximum(mod - theta, 0)
    with np.errstate(invalid="ignore", divide="ignore"):
        phase = np.where(mod > 0, w / np.where(mod > 0, mod, 1), 0)
    return shrunk * phase


@dataclass(frozen=True)
class FitReport:
    gap: float
    iterations: int
    objective: float
    tolerance: float
    certificate: str = "frank-wolfe duality gap"

    def to_json(self) -> dict:
        return {"gap": self.gap, "iterations": self.iterations, "objective": self.objective,
                "tolerance": self.tolerance, "certificate": self.certificate}


@dataclass
class LassoModel:
    lattice: FrequencyLattice
    weights: np.ndarray
    Lambda1: float
    report: FitReport | None = None
    omega: np.ndarray | None = None

    def to_json(self) -> dict:
        return {
            "lattice": {"bounds": list(self.lattice.bounds), "size": self.lattice.size},
            "Lambda1": self.Lambda1,
            "weights": [{"l": list(l), "re": float(w.real), "im": float(w.imag)}
                        for l, w in zip(self.lattice, self.weights)],
            "report": self.report.to_json() if self.report else None,
        }


def _objective(B, y, w) -> float:
    r = B @ w - y
    return float(np.vdot(r, r).real) / len(y)


def _gradient(B, y, w) -> np.ndarray:
    return (2.0 / len(y)) * (B.conj().T @ (B @ w - y))


def duality_gap(B, y, w, Lambda1) -> float:
    """Frank-Wolfe gap, an upper bound on ``objective(w) - min objective``."""
    g = _gradient(B, y, w)
    return float(np.vdot(g, w).real + Lambda1 * np.max(np.abs(g), initial=0.0))


def lasso_fit(
    B: np.ndarray,
    y: np.ndarray,
    Lambda1: float,
    eps3: float,
    lat: FrequencyLattice | None = None,
    max_iter: int = 200_000,
    check_every: int = 10,
) -> LassoModel:
    """``argmin (1/T)|y - B w|^2`` subject to ``|w|_1 <= Lambda1``.

    Accelerated projected gradient with backtracking; stops once the duality
    gap certifies the objective is within ``eps3/2`` of optimal.
    """
    B = np.asarray(B, dtype=complex)
    y = np.asarray(y, dtype=complex).reshape(-1)
    T, m = B.shape
    if len(y) != T:
        raise ValueError(f"B has {T} rows but there are {len(y)} labels")
    if Lambda1 <= 0:
        raise ValueError("Lambda1 must be positive")
    if lat is None:
        lat = FrequencyLattice(((m - 1) // 2,))
    tol = eps3 / 2
    w = np.zeros(m, dtype=complex)
    z, t_k = w.copy(), 1.0
    lip = max(2.0 * np.linalg.norm(B, 2) ** 2 / T, 1e-12) / 4
    for it in range(max_iter):
        if it % check_every == 0:
            gap = duality_gap(B, y, w, Lambda1)
            if gap <= tol:
                return LassoModel(lat, w, Lambda1, FitReport(gap, it, _objective(B, y, w), tol))
        fz, gz = _objective(B, y, z), _gradient(B, y, z)
        while True:
            w_new = project_l1_ball(z - gz / lip, Lambda1)
            step = w_new - z
            if _objective(B, y, w_new) <= fz + np.vdot(gz, step).real + 0.5 * lip * np.vdot(step, step).real + 1e-15:
                break
            lip *= 2
        t_new = (1 + math.sqrt(1 + 4 * t_k**2)) / 2
        # restart momentum when the objective goes up
        if _objective(B, y, w_new) > _objective(B, y, w):
            z, t_k = w.copy(), 1.0
            continue
        z = w_new + ((t_k - 1) / t_new) * (w_new - w)
        w, t_k = w_new, t_new
    gap = duality_gap(B, y, w, Lambda1)
    if gap <= tol:
        return LassoModel(lat, w, Lambda1, FitReport(gap, max_iter, _objective(B, y, w), tol))
    raise ConvergenceError(f"LASSO did not certify gap {tol:g} within {max_iter} iterations (gap {gap:.3g})", gap, max_iter)


def predict(model: LassoModel, features: np.ndarray, return_imag: bool = False):
    """``Re(w . b)`` for one feature vector or a ``(N, m)`` batch."""
    val = np.asarray(features) @ model.weights
    if return_imag:
        return val.real, val.imag
    return float(val.real) if np.ndim(val) == 0 else val.real


@dataclass(frozen=True)
class RiskEstimate:
    mean: float
    stderr: float
    n: int


def risk(
    predictor: Callable[[np.ndarray], float],
    concept: Callable[[np.ndarray], float],
    n_bits: int,
    N: int,
    seed: int,
    probs: Sequence[float] | None = None,
) -> RiskEstimate:
    """Monte-Carlo estimate of ``E_x |h(x) - c(x)|^2``."""
    if N < 1:
        raise ValueError("N must be at least 1")
    xs = sample_inputs(n_bits, N, stream(seed, OP_RISK), probs)
    sq = np.array([(predictor(x) - concept(x)) ** 2 for x in xs])
    se = float(sq.std(ddof=1) / math.sqrt(N)) if N > 1 else float("nan")
    return RiskEstimate(float(sq.mean()), se, N)


def exhaustive_risk(predictor, concept, n_bits: int, probs: Sequence[float] | None = None) -> float:
    p = np.full(n_bits, 0.5) if probs is None else np.asarray(probs, dtype=float)
    total = 0.0
    for k in range(2**n_bits):
        x = np.array([(k >> (n_bits - 1 - i)) & 1 for i in range(n_bits)], dtype=np.int8)
        weight = float(np.prod(np.where(x == 1, p, 1 - p)))
        total += weight * (predictor(x) - concept(x)) ** 2
    return total


# -- kernel ridge regression ----------------------------------------------------

def clip_psd(K: np.ndarray, sym_tol: float = 1e-8) -> np.ndarray:
    """Nearest PSD matrix in Frobenius norm (negative eigenvalues set to zero)."""
    K = np.asarray(K, dtype=float)
    if K.shape[0] != K.shape[1] or np.max(np.abs(K - K.T), initial=0) > sym_tol * max(1.0, np.max(np.abs(K), initial=0)):
        raise ValueError("clip_psd needs a symmetric matrix")
    K = (K + K.T) / 2
    vals, vecs = np.linalg.eigh(K)
    if vals.min(initial=0) >= 0:
        return K
    out = (vecs * np.maximum(vals, 0)) @ vecs.T
    return (out + out.T) / 2


@dataclass
class KrrModel:
    dual: np.ndarray
    lam: float
    gram: np.ndarray
    labels: np.ndarray
    train_inputs: np.ndarray | None = None

    def to_json(self) -> dict:
        return {"lambda": self.lam, "dual": [float(a) for a in self.dual]}


def krr_fit(K: np.ndarray, y: np.ndarray, lam: float, train_inputs: np.ndarray | None = None) -> KrrModel:
    """``a = (K + lam I)^{-1} y`` via Cholesky after PSD clipping."""
    if lam < 0:
        raise ValueError("lambda must be non-negative")
    Kc = clip_psd(K)
    y = np.asarray(y, dtype=float)
    if lam == 0 and np.linalg.matrix_rank(Kc) < len(Kc):
        raise np.linalg.LinAlgError("singular kernel system at lambda = 0")
    try:
        factor = scipy.linalg.cho_factor(Kc + lam * np.eye(len(Kc)), lower=True)
    except np.linalg.LinAlgError:
        raise np.linalg.LinAlgError("singular kernel system; use lambda > 0") from None
    a = scipy.linalg.cho_solve(factor, y)
    return KrrModel(a, lam, Kc, y, train_inputs)


def krr_predict(model: KrrModel, F: np.ndarray):
    """Prediction ``F . a`` from overlaps with the training points (one row per query)."""
    val = np.asarray(F, dtype=float) @ model.dual
    return float(val) if np.ndim(val) == 0 else val


def krr_error_bound(B: float, T: int, kappa: float, epsilon_k: float, epsilon_y: float, lam: float) -> float:
    """Four-term perturbation bound on the prediction error of noisy-kernel KRR."""
    if lam <= 0:
        raise ValueError("lambda must be positive")
    if min(B, T, kappa, epsilon_k, epsilon_y) < 0:
        raise ValueError("bound inputs must be non-negative")
    rt = math.sqrt(T)
    return (B * T**2 * epsilon_k * kappa / lam**2
            + kappa * rt * epsilon_y / lam
            + rt * kappa * B * epsilon_k / lam
            + T * epsilon_k * epsilon_y / lam)


# -- flipped concept -------------------------------------------------------------

def fit_flipped(alphas: np.ndarray, y: np.ndarray, lat: FrequencyLattice, omega=None, rcond: float = 1e-10) -> FourierTable:
    """Least-squares Fourier coefficients from samples ``(alpha_t, y_t)``."""
    alphas = np.asarray(alphas, dtype=float).reshape(len(y), -1)
    omega = np.ones(lat.d) if omega is None else np.asarray(omega, dtype=float)
    design = np.exp(1j * np.pi * alphas @ (lat.points() * omega).T)
    coeffs, _, rank, sv = np.linalg.lstsq(design, np.asarray(y, dtype=complex), rcond=rcond)
    if rank < lat.size:
        raise np.linalg.LinAlgError(f"rank-deficient design: rank {rank} < m = {lat.size}")
    return FourierTable(lat, coeffs, omega, "oracle")
