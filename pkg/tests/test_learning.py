import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fouriq.circuit import FrequencyLattice, ParametrizedCircuit, encode, fixed
from fouriq.errors import ConvergenceError
from fouriq.families import demo_family, perturb_features
from fouriq.fourier import FourierTable, concept_values, grid_dft_oracle, period_grid, reconstruct
from fouriq.learning import (
    Dataset,
    LassoModel,
    clip_psd,
    covering_grid,
    exhaustive_risk,
    fit_flipped,
    generate_dataset,
    krr_error_bound,
    krr_fit,
    krr_predict,
    lasso_fit,
    plan_lasso,
    predict,
    project_l1_ball,
    risk,
    sample_inputs,
    true_weights,
)
from fouriq.pauli import pauli_obs
from fouriq.shots import stream

LAT5 = FrequencyLattice((2,))
H_Z = ParametrizedCircuit(1, 1, (fixed("H", [0]), encode("Z", 0)))


def test_plan_lasso_examples():
    p = plan_lasso(5, 0.5, 0.1)
    assert p.T == math.ceil(16 * 625 * math.sqrt(2 * math.log(100)) / 0.25)
    assert p.epsilon_b == pytest.approx(0.02) and p.Lambda1 == 5
    assert p.circuit_executions == pytest.approx(5 * p.T / 0.02**2)
    one = plan_lasso(1, 0.3, 0.2)
    assert one.epsilon_b == pytest.approx(0.06) and one.Lambda1 == 1
    ratio = plan_lasso(10, 0.5, 0.1).T / plan_lasso(5, 0.5, 0.1).T
    assert 16 <= ratio <= 16 * math.sqrt(math.log(200) / math.log(100)) + 1e-9
    for bad in ((0, 0.5, 0.1), (5, 0.0, 0.1), (5, 1.5, 0.1), (5, 0.5, 1.0)):
        with pytest.raises(ValueError):
            plan_lasso(*bad)


def test_covering_grid_examples():
    assert covering_grid(2, 1, 3.0, 0.5) == (12, 144)
    assert covering_grid(1, 2, 1.0, 5.0) == (1, 1)
    M, G = covering_grid(3, 2, 1.5, 0.7)
    assert G == M**3
    with pytest.raises(ValueError):
        covering_grid(0, 1, 1.0, 0.1)


def test_dataset_examples():
    fam = demo_family()
    alpha = [0.37]
    concept = lambda x: fam.concept(x, alpha)
    a = generate_dataset(concept, fam.n_bits, 20, seed=4)
    b = generate_dataset(concept, fam.n_bits, 20, seed=4)
    assert np.array_equal(a.inputs, b.inputs) and np.array_equal(a.labels, b.labels)
    assert all(y == concept(x) for x, y in zip(a.inputs, a.labels))
    noisy = generate_dataset(concept, fam.n_bits, 20, seed=4, label_noise=0.05)
    assert np.max(np.abs(noisy.labels - a.labels)) <= 0.05
    with pytest.raises(ValueError):
        Dataset(np.zeros((3, 2)), np.zeros(2))


def test_uniform_inputs_multinomial():
    T = 10_000
    xs = sample_inputs(3, T, stream(0, 3))
    codes = xs @ np.array([4, 2, 1])
    counts = np.bincount(codes, minlength=8)
    sigma = math.sqrt(T * (1 / 8) * (7 / 8))
    assert np.all(np.abs(counts - T / 8) <= 5 * sigma)


def test_true_weights_examples():
    assert np.allclose(true_weights([0.0], LAT5), 1)
    w = true_weights([0.5], LAT5)
    assert w[LAT5.index((2,))] == pytest.approx(-1)
    assert np.sum(np.abs(w)) == pytest.approx(5)
    t = grid_dft_oracle(H_Z, pauli_obs("X"))
    for a in (0.1, 0.6):
        assert reconstruct(t, [a]) == pytest.approx(t.coeffs @ true_weights([a], t.lattice, t.omega))


def test_project_l1_ball():
    rng = np.random.default_rng(0)
    w = rng.normal(size=7) + 1j * rng.normal(size=7)
    p = project_l1_ball(w, 2.0)
    assert np.sum(np.abs(p)) == pytest.approx(2.0)
    nz = np.abs(p) > 0
    assert np.allclose(np.angle(p[nz]), np.angle(w[nz]))
    small = w * 0.01
    assert np.array_equal(project_l1_ball(small, 2.0), small)


def features(n_points, seed):
    fam = demo_family()
    xs = sample_inputs(fam.n_bits, n_points, stream(seed, 3))
    return fam, fam.feature_matrix(xs)


def test_lasso_noiseless_recovery():
    fam, B = features(40, 1)
    w_star = true_weights([0.3], fam.lattice, fam.omega)
    y = (B @ w_star).real
    model = lasso_fit(B, y, 5.0, 1e-6, fam.lattice)
    assert model.report.objective <= 0.5e-6
    assert np.sum(np.abs(model.weights)) <= 5 + 1e-9
    assert model.report.gap <= 0.5e-6


def test_lasso_zero_labels():
    _, B = features(20, 2)
    model = lasso_fit(B, np.zeros(20), 5.0, 1e-8)
    assert np.allclose(model.weights, 0)


def test_lasso_nonconvergence_reports_gap():
    _, B = features(30, 3)
    y = np.random.default_rng(0).normal(size=30)
    with pytest.raises(ConvergenceError) as info:
        lasso_fit(B, y, 5.0, 1e-14, max_iter=5, check_every=1)
    assert info.value.gap > 0 and info.value.iterations == 5


def test_lasso_synthetic_risk_bound():
    fam, B = features(200, 4)
    _, B_test = features(1000, 5)
    w_star = true_weights([0.3], fam.lattice, fam.omega)
    y, y_test = (B @ w_star).real, (B_test @ w_star).real
    eps_b, eps3 = 0.01, 1e-3
    Bn = perturb_features(B, eps_b, 0, 0)
    Bt = perturb_features(B_test, eps_b, 0, 1)
    model = lasso_fit(Bn, y, 5.0, eps3, fam.lattice)
    mse = np.mean((predict(model, Bt) - y_test) ** 2)
    assert mse <= (5 * eps_b) ** 2 + eps3


def test_predict_examples():
    fam = demo_family()
    x = [1, 0, 1, 1, 0, 0]
    b = fam.features(x)
    w = true_weights([0.42], fam.lattice, fam.omega)
    model = LassoModel(fam.lattice, w, 5.0)
    assert predict(model, b) == pytest.approx(fam.concept(x, [0.42]), abs=1e-9)
    zero = LassoModel(fam.lattice, np.zeros(5, complex), 5.0)
    assert predict(zero, b) == 0


def test_risk_examples():
    fam = demo_family()
    c = lambda x: fam.concept(x, [0.2])
    assert risk(c, c, fam.n_bits, 50, 0).mean == pytest.approx(0, abs=1e-15)
    shifted = risk(lambda x: c(x) + 0.1, c, fam.n_bits, 50, 0)
    assert abs(shifted.mean - 0.01) <= max(3 * shifted.stderr, 1e-12)
    h = lambda x: 0.5 * c(x) + 0.1 * x[0]
    small = lambda x: h(x[:3].tolist() + [0, 0, 0])
    cc = lambda x: c(x[:3].tolist() + [0, 0, 0])
    mc = risk(small, cc, 3, 400, 1)
    assert abs(mc.mean - exhaustive_risk(small, cc, 3)) <= 3 * mc.stderr


def test_clip_psd_examples():
    P = np.array([[2.0, 0.5], [0.5, 1.0]])
    assert np.allclose(clip_psd(P), P, atol=1e-10)
    assert np.allclose(clip_psd(np.diag([1.0, -0.1])), np.diag([1.0, 0.0]))
    rng = np.random.default_rng(0)
    A = rng.normal(size=(10, 10))
    S = (A + A.T) / 2
    C = clip_psd(S)
    assert np.linalg.eigvalsh(C).min() >= -1e-10
    # Frobenius-nearest: no random PSD matrix does better
    best = np.linalg.norm(C - S)
    for _ in range(20):
        G = rng.normal(size=(10, 10))
        assert np.linalg.norm(C + 0.01 * G @ G.T - S) >= best
    with pytest.raises(ValueError):
        clip_psd(np.array([[1.0, 2.0], [0.0, 1.0]]))


def test_krr_examples():
    y = np.array([0.3, -1.2, 2.0])
    model = krr_fit(np.eye(3), y, 1.0)
    assert np.allclose(model.dual, y / 2)
    assert krr_predict(model, np.eye(3)[0]) == pytest.approx(0.15)
    fam, B = features(15, 6)
    K = (B @ B.conj().T).real
    labels = np.array([fam.concept(x, [0.1]) for x in sample_inputs(fam.n_bits, 15, stream(6, 3))])
    # exact Gram from 15 points of a 5-dimensional family is singular
    with pytest.raises(np.linalg.LinAlgError):
        krr_fit(K, labels, 0.0)
    m = krr_fit(K, labels, 1e-8)
    assert np.allclose(m.dual, np.linalg.solve(m.gram + 1e-8 * np.eye(15), labels), atol=1e-8 * (1 + np.abs(m.dual).max()))


def test_krr_interpolates_small_invertible():
    fam = demo_family()
    # real feature space has dimension 3 (b_0 real, b_2 = conj(b_-2), b_+-1 = 0)
    xs = [[1, 0, 0, 0, 1, 1], [1, 0, 1, 0, 1, 1], [1, 1, 0, 0, 1, 0]]
    B = fam.feature_matrix(np.array(xs))
    K = (B @ B.conj().T).real
    assert np.linalg.cond(K) < 10
    y = np.array([0.1, -0.4, 0.8])
    m = krr_fit(K, y, 1e-8)
    assert np.max(np.abs(m.gram @ m.dual - y)) <= 1e-6


def test_krr_error_bound_examples():
    assert krr_error_bound(1, 4, 1, 0, 0, 1) == 0
    assert krr_error_bound(1, 4, 1, 0.01, 0.1, 1) == pytest.approx(0.384)
    with pytest.raises(ValueError):
        krr_error_bound(1, 4, 1, 0.01, 0.1, 0)


@settings(max_examples=40, deadline=None)
@given(st.floats(0, 0.2), st.floats(0, 0.2), st.floats(0, 0.1), st.floats(0, 0.1))
def test_krr_bound_monotone(ek, ey, dk, dy):
    base = krr_error_bound(2.0, 10, 1.0, ek, ey, 0.3)
    assert krr_error_bound(2.0, 10, 1.0, ek + dk, ey + dy, 0.3) >= base


def test_fit_flipped_examples():
    grid = period_grid([1.0], [5])
    t = fit_flipped(grid, np.cos(2 * np.pi * grid[:, 0]), LAT5)
    assert np.allclose(t.coeffs, [0.5, 0, 0, 0, 0.5], atol=1e-12)
    const = fit_flipped(grid, np.full(5, 0.7), LAT5)
    assert np.allclose(const.coeffs, [0, 0, 0.7, 0, 0], atol=1e-12)
    with pytest.raises(np.linalg.LinAlgError):
        fit_flipped(grid[:3], np.zeros(3), LAT5)


def test_fit_flipped_matches_oracle():
    fam = demo_family()
    circ = fam.circuit([1, 1, 0, 1, 0, 1])
    oracle = grid_dft_oracle(circ, fam.obs)
    grid = period_grid(circ.base_frequencies(), [5])
    y = concept_values(circ, fam.obs, grid)
    t = fit_flipped(grid, y, oracle.lattice, circ.base_frequencies())
    assert np.allclose(t.coeffs, oracle.coeffs, atol=1e-9)
    rng = np.random.default_rng(0)
    scattered = rng.uniform(0, 2, (12, 1))
    t2 = fit_flipped(scattered, concept_values(circ, fam.obs, scattered), oracle.lattice)
    assert np.allclose(t2.coeffs, oracle.coeffs, atol=1e-9)
    assert isinstance(t2, FourierTable)
