import numpy as np
import pytest
from scipy.linalg import expm

from conftest import dense_unitary

from fouriq.circuit import ParametrizedCircuit, encode, fixed, random_circuit
from fouriq.fourier import compile_expectation
from fouriq.pauli import PauliString, ZeroProjector, pauli_obs
from fouriq.statevector import (
    apply_matrix,
    basis_state,
    circuit_unitary,
    controlled_run,
    eval_concept,
    exact_evolution,
    expectation,
    postselect,
    run,
    zero_state,
)

H_Z = ParametrizedCircuit(1, 1, (fixed("H", [0]), encode("Z", 0)))


def test_run_examples():
    assert np.allclose(run(ParametrizedCircuit(1, 0), []), [1, 0])
    assert np.allclose(run(H_Z, [0]), [1 / np.sqrt(2)] * 2)
    want = np.array([np.exp(1j * np.pi / 4), np.exp(-1j * np.pi / 4)]) / np.sqrt(2)
    assert np.allclose(run(H_Z, [0.25]), want, atol=1e-12)


def test_expectation_examples():
    assert expectation(zero_state(1), pauli_obs("Z")) == pytest.approx(1)
    plus = np.array([1, 1]) / np.sqrt(2)
    assert expectation(plus, pauli_obs("Z")) == pytest.approx(0, abs=1e-15)
    assert expectation(run(H_Z, [0.25]), pauli_obs("X")) == pytest.approx(0, abs=1e-12)


def test_eval_concept_examples():
    const = ParametrizedCircuit(2, 1, (fixed("H", [0]), fixed("CNOT", [0, 1])))
    vals = {round(eval_concept(const, pauli_obs("ZZ"), [a]), 12) for a in (0, 0.3, 0.9)}
    assert len(vals) == 1
    assert eval_concept(H_Z, pauli_obs("X"), [0]) == pytest.approx(1)
    for a in (0.1, 0.37, 0.8):
        assert eval_concept(H_Z, pauli_obs("Z"), [a]) == pytest.approx(0, abs=1e-12)
        assert eval_concept(H_Z, pauli_obs("X"), [a]) == pytest.approx(np.cos(2 * np.pi * a))


def test_postselect_examples():
    plus = np.array([1, 1]) / np.sqrt(2)
    ps = postselect(plus, [0], [0])
    assert ps.probability == pytest.approx(0.5) and ps.ok
    assert np.allclose(ps.state, [1, 0])  # measured qubit stays in the register
    ps = postselect(zero_state(2), [0], [1])
    assert ps.probability == 0 and not ps.ok
    # Fourier state of cos(2 pi alpha): the post-selected norm is |b|^2 = 1/2
    comp = compile_expectation(H_Z, pauli_obs("X"))
    lay = comp.layout
    rest = list(range(lay.n_freq, lay.n_total))
    assert postselect(comp.amplitudes(), rest, [0] * len(rest)).probability == pytest.approx(0.5)


def test_controlled_run_examples():
    flip = ParametrizedCircuit(1, 0, (fixed("X", [0]),))
    # control |0>: target untouched
    psi = controlled_run(flip, zero_state(2), 0, [], offset=1)
    assert np.allclose(psi, basis_state(2, 0))
    # control |1>: same as uncontrolled
    psi = controlled_run(flip, basis_state(2, 2), 0, [], offset=1)
    assert np.allclose(psi, basis_state(2, 3))
    # control |+>, Z on target |1>
    z = ParametrizedCircuit(1, 0, (fixed("Z", [0]),))
    start = (basis_state(2, 1) + basis_state(2, 3)) / np.sqrt(2)
    psi = controlled_run(z, start, 0, [], offset=1)
    want = (basis_state(2, 1) - basis_state(2, 3)) / np.sqrt(2)
    assert np.allclose(psi, want)


def test_exact_evolution_examples():
    psi0 = np.array([0.6, 0.8j])
    Z = PauliString("Z").matrix()
    X = PauliString("X").matrix()
    assert np.allclose(exact_evolution(Z, 0.0, psi0), psi0)
    assert np.allclose(exact_evolution(Z, np.pi, zero_state(1)), [np.exp(1j * np.pi), 0])
    # exp(i pi/2 X)|0> = i|1>
    assert np.allclose(exact_evolution(X, np.pi / 2, zero_state(1)), [0, 1j])
    with pytest.raises(ValueError):
        exact_evolution(np.array([[0, 1], [0, 0]]), 1.0, zero_state(1))


@pytest.mark.parametrize("seed", range(5))
def test_norm_and_associativity(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 5))
    c = random_circuit(rng, n, 2, [1, 2], layers=2)
    alpha = rng.uniform(0, 1, 2)
    psi = run(c, alpha)
    assert np.vdot(psi, psi).real == pytest.approx(1, abs=1e-9)
    U = dense_unitary(c, alpha)
    assert np.allclose(U[:, 0], psi, atol=1e-9)
    assert np.allclose(circuit_unitary(c, alpha), U, atol=1e-9)
    for letters in ("Z" * n, "X" + "I" * (n - 1)):
        assert -1 - 1e-12 <= expectation(psi, pauli_obs(letters)) <= 1 + 1e-12


def test_apply_matrix_against_kron():
    rng = np.random.default_rng(3)
    psi = rng.normal(size=8) + 1j * rng.normal(size=8)
    U = np.linalg.qr(rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)))[0]
    got = apply_matrix(psi.copy(), U, (1,))
    want = np.kron(np.kron(np.eye(2), U), np.eye(2)) @ psi
    assert np.allclose(got, want)


def test_evolution_composition():
    rng = np.random.default_rng(11)
    A = rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8))
    H = (A + A.conj().T) / 2
    psi = zero_state(3)
    one = exact_evolution(H, 0.7, psi)
    two = exact_evolution(H, 0.4, exact_evolution(H, 0.3, psi))
    assert np.allclose(one, two, atol=1e-9)
    assert np.allclose(one, expm(1j * 0.7 * H) @ psi, atol=1e-9)


def test_zero_projector_expectation():
    psi = np.array([0.6, 0, 0, 0.8])
    assert expectation(psi, ZeroProjector(2)) == pytest.approx(0.36)
