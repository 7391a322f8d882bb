import numpy as np
import pytest
from numpy.testing import assert_allclose

from dmera.exceptions import OracleSizeError
from dmera.gaussian import apply_two_site_gate, vacuum_state
from dmera.statevector import (
    MAX_QUBITS,
    DenseGate,
    Statevector,
    spin_gate_matrix,
    statevector_oracle,
)


def test_vacuum_covariance():
    psi = Statevector(3)
    assert_allclose(psi.covariance(), vacuum_state(3).gamma, atol=1e-15)
    assert_allclose(psi.expectation("ZII"), 1.0)


def test_spin_gate_is_unitary():
    u = spin_gate_matrix(0.2, 1.3)
    assert_allclose(u @ u.conj().T, np.eye(4), atol=1e-14)


@pytest.mark.parametrize("n_qubits", [2, 4, 6, 8])
def test_random_matchgate_circuits_match_covariance(n_qubits, rng):
    for _ in range(50):
        psi = Statevector(n_qubits)
        state = vacuum_state(n_qubits)
        for _ in range(int(rng.integers(1, 3 * n_qubits + 1))):
            left = int(rng.integers(n_qubits))
            x, y = rng.uniform(-np.pi, np.pi, size=2)
            psi.apply_gate(DenseGate.matchgate(n_qubits, left, x, y))
            state = apply_two_site_gate(state, left, (x, y))
        assert_allclose(psi.covariance(), state.gamma, atol=1e-10)


def test_oracle_observables_follow_covariance(rng):
    n = 4
    angles = [(left, *rng.uniform(-1, 1, size=2)) for left in (0, 1, 2, 3, 0)]
    gates = [DenseGate.matchgate(n, left, x, y) for left, x, y in angles]
    state = vacuum_state(n)
    for left, x, y in angles:
        state = apply_two_site_gate(state, left, (x, y))
    z0, xx, wrap = statevector_oracle(n, gates, ["ZIII", "XXII", "XIIX"])
    assert_allclose(z0, -state.gamma[0, 1], atol=1e-12)
    assert_allclose(xx, -state.gamma[1, 2], atol=1e-12)
    assert_allclose(wrap, state.gamma[7, 0], atol=1e-12)


def test_size_cap():
    with pytest.raises(OracleSizeError):
        Statevector(MAX_QUBITS + 1)
