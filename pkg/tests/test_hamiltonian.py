import itertools
import json

import numpy as np
import pytest
from scipy.linalg import expm

from fouriq.circuit import Encode, LatticeKind, lattice, upload_counts, validate
from fouriq.circuit_io import DocumentError
from fouriq.fourier import extract_table
from fouriq.hamiltonian import (
    AlphaTerm,
    Constant,
    FixedTerm,
    ParamHamiltonian,
    Trotter,
    build_ising,
    commutator_bound,
    eval_dynamics,
    hamiltonian_from_dict,
    hamiltonian_to_dict,
    ising_template,
    plan_trotter,
    trotter_error_bound,
    trotterize,
)
from fouriq.pauli import PauliString, pauli_obs
from fouriq.statevector import circuit_unitary


def two_qubit_h(tau=1.0):
    return ParamHamiltonian(2, (FixedTerm(Constant(1.0), PauliString("ZZ")),),
                            (AlphaTerm(0, PauliString("XI")),), tau)


def anticommutation_oracle(H):
    """Pauli products either commute or have commutator norm 2."""
    terms = [(1.0 if not isinstance(t.source, Constant) else abs(t.source.value), t.pauli) for t in H.fixed_terms]
    terms += [(1.0, t.pauli) for t in H.alpha_terms]
    return sum(2 * ca * cb for (ca, a), (cb, b) in itertools.combinations(terms, 2) if not a.commutes_with(b))


def test_build_ising_examples():
    H = build_ising([1, 1, 0], 3)
    assert [str(t.pauli) for t in H.fixed_terms] == ["ZZI", "ZIZ"]
    assert [str(t.pauli) for t in H.alpha_terms] == ["XII", "IXI", "IIX"]
    assert H.d == 1
    assert build_ising([0, 0, 0], 3).fixed_terms == ()
    H2 = build_ising([1], 2)
    assert len(H2.fixed_terms) == 1 and len(H2.alpha_terms) == 2
    with pytest.raises(ValueError):
        build_ising([1, 0], 3)


def test_matrix_matches_definition():
    H = build_ising([1, 0, 1], 3)
    Z = np.diag([1.0, -1.0])
    X = np.array([[0, 1.0], [1, 0]])
    I = np.eye(2)
    kron = lambda *m: np.kron(np.kron(m[0], m[1]), m[2])
    want = kron(Z, Z, I) + kron(I, Z, Z) + 0.3 * (kron(X, I, I) + kron(I, X, I) + kron(I, I, X))
    assert np.allclose(H.matrix(None, [0.3]), want)


def test_trotter_structure_fig2():
    circ = trotterize(build_ising([1, 1, 1], 3), 1)
    assert validate(circ) == []
    encs = circ.encodings
    assert [str(g.pauli) for g in encs] == ["XII", "IXI", "IIX"]
    # ZZ rotations come first, transverse-field encodings last
    first_enc = next(i for i, g in enumerate(circ.gates) if isinstance(g, Encode))
    assert all(isinstance(g, Encode) for g in circ.gates[first_enc:])
    zz = circ.gates[:first_enc]
    assert [g.targets for g in zz] == [(0, 1), (0, 2), (1, 2)]
    want = expm(1j * PauliString("ZZ").matrix())
    assert all(np.allclose(g.matrix, want) for g in zz)
    assert all(g.scale == pytest.approx(1 / np.pi) for g in encs)


def test_trotter_counting_law():
    H = build_ising([1, 0, 1], 3)
    for r in (1, 2, 4):
        c = trotterize(H, r)
        assert upload_counts(c) == [3 * r]
        assert lattice(c, LatticeKind.EXPECTATION).bounds == (2 * 3 * r,)
        assert len(trotterize(H, 2 * r).encodings) == 2 * len(c.encodings)
    no_alpha = ParamHamiltonian(2, (FixedTerm(Constant(0.5), PauliString("ZZ")),), ())
    assert trotterize(no_alpha, 3).encodings == []


def test_trotter_gates_match_exponentials():
    H = two_qubit_h(0.8)
    for r in (1, 3):
        circ = trotterize(H, r)
        ZZ = PauliString("ZZ").matrix()
        X0 = PauliString("XI").matrix()
        # gates apply left to right, so the later factor multiplies from the left
        step = expm(1j * 0.8 / r * 0.45 * X0) @ expm(1j * 0.8 / r * ZZ)
        assert np.allclose(circuit_unitary(circ, [0.45]), np.linalg.matrix_power(step, r), atol=1e-12)


def test_template_binding():
    tmpl = trotterize(ising_template(3), 2)
    assert tmpl.is_template and tmpl.n_bits == 3
    for x in ([1, 0, 1], [0, 1, 1]):
        a = eval_dynamics(ising_template(3), pauli_obs("ZII"), x, [0.4], Trotter(2))
        b = eval_dynamics(build_ising(x, 3), pauli_obs("ZII"), None, [0.4], Trotter(2))
        assert a == pytest.approx(b, abs=1e-12)


def test_commutator_examples():
    allz = ParamHamiltonian(3, (FixedTerm(Constant(1.0), PauliString("ZZI")),
                                FixedTerm(Constant(2.0), PauliString("IZZ"))),
                            (AlphaTerm(0, PauliString("ZII")),))
    assert commutator_bound(allz) == 0
    assert commutator_bound(two_qubit_h()) == pytest.approx(2)
    H = build_ising([1, 1, 1], 3)
    assert commutator_bound(H) == pytest.approx(anticommutation_oracle(H), abs=1e-9)
    assert commutator_bound(H) == pytest.approx(12)


def test_plan_examples():
    allz = ParamHamiltonian(1, (), (AlphaTerm(0, PauliString("Z")),))
    assert plan_trotter(allz, 0.1).r == 1
    p = plan_trotter(two_qubit_h(), 0.5)
    assert (p.r, p.A) == (4, 2.0)
    assert p.epsilon_y == pytest.approx(trotter_error_bound(1.0, 2.0, 4))
    H = build_ising([1, 1, 1], 3)
    r1, r2 = plan_trotter(H, 0.2).r, plan_trotter(H, 0.1).r
    assert abs(r2 - 2 * r1) <= 1


def test_commuting_trotter_is_exact():
    H = ParamHamiltonian(2, (FixedTerm(Constant(0.7), PauliString("ZZ")),), (AlphaTerm(0, PauliString("ZI")),))
    obs = pauli_obs("XI")
    for a in (0.0, 0.3, 0.9):
        assert eval_dynamics(H, obs, None, [a]) == pytest.approx(eval_dynamics(H, obs, None, [a], Trotter(1)), abs=1e-9)


def test_no_alpha_dependence_table_at_zero():
    H = ParamHamiltonian(2, (FixedTerm(Constant(0.7), PauliString("ZZ")),
                             FixedTerm(Constant(0.4), PauliString("XI"))), ())
    obs = pauli_obs("ZI")
    vals = {round(eval_dynamics(H, obs, None, [a]), 12) for a in (0.0, 0.5)}
    assert len(vals) == 1
    t = extract_table(trotterize(H, 2), obs)
    assert t.lattice.size == 1


def trotter_errors(obs, rs=(1, 2, 4, 8, 16)):
    H = two_qubit_h()
    ex = eval_dynamics(H, obs, None, [0.7])
    return [abs(ex - eval_dynamics(H, obs, None, [0.7], Trotter(r))) for r in rs]


def test_first_order_halving():
    # Y0 exposes the first-order term: error halves as r doubles
    e = trotter_errors(pauli_obs("YI"))
    for a, b in zip(e, e[1:]):
        assert 1.5 <= a / b <= 3
    # Z0 cancels it here; the error falls four-fold (checked against expm directly)
    e = trotter_errors(pauli_obs("ZI"))
    assert all(3.9 <= a / b <= 4.3 for a, b in zip(e, e[1:]))


@pytest.mark.parametrize("seed", range(8))
def test_bound_soundness(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 5))
    x = rng.integers(0, 2, n * (n - 1) // 2)
    H = build_ising(x, n)
    A = commutator_bound(H)
    obs = pauli_obs("".join(rng.choice(list("XYZ")) if q == 0 else "I" for q in range(n)))
    alpha = rng.uniform(0, 1, 1)
    ex = eval_dynamics(H, obs, None, alpha)
    for r in (1, 2, 4):
        assert abs(ex - eval_dynamics(H, obs, None, alpha, Trotter(r))) <= trotter_error_bound(1.0, A, r) + 1e-8


def test_document_round_trip():
    doc = {"n": 3, "tau": 0.5,
           "fixed_terms": [{"bit": 0, "pauli": "ZZI"}, {"const": 0.3, "pauli": "IZZ"}],
           "alpha_terms": [{"param": 0, "pauli": "XII"}]}
    H = hamiltonian_from_dict(doc)
    assert H.n_bits == 1 and H.tau == 0.5
    assert hamiltonian_from_dict(json.loads(json.dumps(hamiltonian_to_dict(H)))) == H
    bad = dict(doc, alpha_terms=[{"param": 0, "pauli": "XI"}])
    with pytest.raises(DocumentError):
        hamiltonian_from_dict(bad)


def test_expectation_error_can_exceed_half_bound():
    # tau^2 A / (2r) bounds the unitary error; an expectation can move by twice that.
    H = ParamHamiltonian(1, (FixedTerm(Constant(0.75), PauliString("Z")),), (AlphaTerm(0, PauliString("Y")),))
    Z, Y = PauliString("Z").matrix(), PauliString("Y").matrix()
    psi0 = np.array([1, 0], complex)
    ex = expm(1j * (0.75 * Z + Y)) @ psi0
    tr = expm(1j * Y) @ expm(1j * 0.75 * Z) @ psi0
    want = abs(np.vdot(ex, Y @ ex).real - np.vdot(tr, Y @ tr).real)
    err = abs(eval_dynamics(H, pauli_obs("Y"), None, [1.0]) - eval_dynamics(H, pauli_obs("Y"), None, [1.0], Trotter(1)))
    assert err == pytest.approx(want, abs=1e-12)
    bound = trotter_error_bound(1.0, commutator_bound(H), 1)
    assert bound < err <= 2 * bound
    U = expm(1j * (0.75 * Z + Y))
    V = expm(1j * Y) @ expm(1j * 0.75 * Z)
    assert np.linalg.norm(U - V, 2) <= bound
