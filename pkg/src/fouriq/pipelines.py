"""End-to-end learning runs: dataset, features, fit, held-out evaluation."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .families import ConceptFamily, perturb_features
from .learning import (
    KrrModel,
    LassoModel,
    LassoPlan,
    generate_dataset,
    krr_error_bound,
    krr_fit,
    krr_predict,
    lasso_fit,
    plan_lasso,
    predict,
    sample_inputs,
)
from .shots import EXACT, OP_ALPHA, OP_RISK, Exact, Mode, Shots, gram_entry, stream


def hidden_alpha(d: int, seed: int) -> np.ndarray:
    """The unknown parameter, uniform on ``[0, 1]^d``."""
    return stream(seed, OP_ALPHA).uniform(0, 1, d)


@dataclass
class LassoRun:
    plan: LassoPlan
    model: LassoModel
    alpha: np.ndarray
    T: int
    train_objective: float
    test_mse: float
    test_stderr: float
    n_test: int
    bound: float | None = None
    curve: list[tuple[int, float]] = field(default_factory=list)

    def report(self) -> dict:
        return {
            "T_used": self.T,
            "T_planned": self.plan.T,
            "certified": self.T >= self.plan.T,
            "epsilon": self.plan.epsilon,
            "delta": self.plan.delta,
            "epsilon_b_planned": self.plan.epsilon_b,
            "Lambda1": self.plan.Lambda1,
            "circuit_executions_planned": self.plan.circuit_executions,
            "train_objective": self.train_objective,
            "test_mse": self.test_mse,
            "test_stderr": self.test_stderr,
            "n_test": self.n_test,
            "risk_bound": self.bound,
        }


def run_lasso(
    family: ConceptFamily,
    alpha,
    T: int,
    seed: int,
    eps3: float = 1e-3,
    mode: Mode = EXACT,
    n_test: int = 200,
    epsilon: float = 0.5,
    delta: float = 0.1,
    feature_noise: float = 0.0,
    label_noise: float = 0.0,
    curve_sizes: tuple[int, ...] = (),
) -> LassoRun:
    """Train on ``T`` labelled inputs, test on ``n_test`` fresh ones.

    Test predictions use features obtained the same way as the training ones
    (shots or injected noise) and are compared with the noiseless concept.
    """
    alpha = np.asarray(alpha, dtype=float).reshape(-1)
    lat = family.lattice
    plan = plan_lasso(lat.size, epsilon, delta)
    concept = lambda x: family.concept(x, alpha)
    data = generate_dataset(concept, family.n_bits, T, seed, label_noise)
    B = family.feature_matrix(data.inputs, mode, phase=0)
    xs_test = sample_inputs(family.n_bits, n_test, stream(seed, OP_RISK))
    B_test = family.feature_matrix(xs_test, mode, phase=1)
    if feature_noise:
        B = perturb_features(B, feature_noise, seed, 0)
        B_test = perturb_features(B_test, feature_noise, seed, 1)
    y_test = np.array([concept(x) for x in xs_test])

    def fit(k: int) -> tuple[LassoModel, float]:
        model = lasso_fit(B[:k], data.labels[:k], plan.Lambda1, eps3, lat)
        model.omega = family.omega
        sq = (predict(model, B_test) - y_test) ** 2
        return model, sq

    curve = []
    for k in curve_sizes:
        if k < T:
            curve.append((k, float(fit(k)[1].mean())))
    model, sq = fit(T)
    curve.append((T, float(sq.mean())))
    bound = None
    if feature_noise or isinstance(mode, Shots):
        eps_b = feature_noise or (mode.epsilon or 0.0)
        bound = (plan.Lambda1 * eps_b + label_noise) ** 2 + eps3
    elif label_noise:
        bound = label_noise**2 + eps3
    return LassoRun(plan, model, alpha, T, model.report.objective, float(sq.mean()),
                    float(sq.std(ddof=1) / math.sqrt(n_test)), n_test, bound, curve)


@dataclass
class KrrRun:
    model: KrrModel
    gram_raw: np.ndarray
    train_residual: float
    test_mse: float
    min_eig_raw: float
    min_eig_clipped: float
    bound: float
    params: dict


def gram_matrix(family: ConceptFamily, xs: np.ndarray, mode: Mode = EXACT) -> np.ndarray:
    T = len(xs)
    K = np.zeros((T, T))
    comps = [family.compiled(x) for x in xs]
    for i in range(T):
        for j in range(i, T):
            K[i, j] = K[j, i] = gram_entry(comps[i], comps[j], mode, key=(0, i, j))
    return K


def overlap_matrix(family: ConceptFamily, xs_query: np.ndarray, xs_train: np.ndarray, mode: Mode = EXACT) -> np.ndarray:
    F = np.zeros((len(xs_query), len(xs_train)))
    train = [family.compiled(x) for x in xs_train]
    for i, x in enumerate(xs_query):
        cq = family.compiled(x)
        for j, ct in enumerate(train):
            F[i, j] = gram_entry(cq, ct, mode, key=(1, i, j))
    return F


def run_krr(
    family: ConceptFamily,
    alpha,
    T: int,
    lam: float,
    seed: int,
    mode: Mode = EXACT,
    n_test: int = 50,
    label_noise: float = 0.0,
) -> KrrRun:
    alpha = np.asarray(alpha, dtype=float).reshape(-1)
    concept = lambda x: family.concept(x, alpha)
    data = generate_dataset(concept, family.n_bits, T, seed, label_noise)
    K = gram_matrix(family, data.inputs, mode)
    model = krr_fit(K, data.labels, lam, data.inputs)
    residual = float(np.max(np.abs(model.gram @ model.dual - data.labels)))
    xs_test = sample_inputs(family.n_bits, n_test, stream(seed, OP_RISK))
    F = overlap_matrix(family, xs_test, data.inputs, mode)
    y_test = np.array([concept(x) for x in xs_test])
    mse = float(np.mean((krr_predict(model, F) - y_test) ** 2))
    eps_k = 0.0 if isinstance(mode, Exact) else float(mode.epsilon or 0.0)
    B = math.sqrt(family.lattice.size)
    params = {"B": B, "T": T, "kappa": 1.0, "epsilon_k": eps_k, "epsilon_y": label_noise, "lambda": lam}
    bound = krr_error_bound(B, T, 1.0, eps_k, label_noise, lam) if lam > 0 else float("inf")
    return KrrRun(model, K, residual, mse, float(np.linalg.eigvalsh(K).min()),
                  float(np.linalg.eigvalsh(model.gram).min()), bound, params)
