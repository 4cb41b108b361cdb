import numpy as np

from fouriq.circuit import Encode


def dense_unitary(circuit, alpha) -> np.ndarray:
    """Full unitary built from Kronecker products, independent of the simulator.

    Handles encodings and fixed gates on contiguous ascending targets, which
    covers everything ``random_circuit`` produces.
    """
    n = circuit.n
    U = np.eye(2**n, dtype=complex)
    for g in circuit.gates:
        if isinstance(g, Encode):
            theta = np.pi * g.scale * alpha[g.param]
            G = np.cos(theta) * np.eye(2**n) + 1j * np.sin(theta) * g.pauli.matrix()
        else:
            t = g.targets
            assert list(t) == list(range(t[0], t[0] + len(t))), "oracle needs contiguous targets"
            G = np.kron(np.kron(np.eye(2 ** t[0]), g.matrix), np.eye(2 ** (n - t[-1] - 1)))
        U = G @ U
    return U
