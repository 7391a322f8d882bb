import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy import linalg

from conftest import random_circuit_state
from dmera.exceptions import InvalidArgumentError, PhysicalityError
from dmera.gaussian import (
    CovarianceState,
    ModeSubset,
    apply_plane_rotation,
    apply_rotations,
    apply_two_site_gate,
    canonical_eigenvalues,
    entanglement_entropy,
    entropy,
    expectation_quadratic,
    fidelity,
    interleave_vacuum,
    log_fidelity,
    majorana_gate_matrix,
    mode_entropy,
    normalized_infidelity,
    purify,
    restrict,
    vacuum_state,
)
from dmera.statevector import DenseGate, Statevector

J = np.array([[0.0, 1.0], [-1.0, 0.0]])


def single_mode(lam: float) -> CovarianceState:
    return CovarianceState(lam * J)


def test_vacuum():
    state = vacuum_state(3)
    assert state.n_sites == 3
    assert state.n_modes == 6
    assert state.is_pure
    assert_allclose(state.gamma[0, 1], -1.0)
    assert_allclose(state.gamma[4, 5], -1.0)
    assert_allclose(state.gamma[1, 2], 0.0)


def test_constructor_rejects_bad_matrices():
    with pytest.raises(InvalidArgumentError):
        CovarianceState(np.zeros((3, 3)))
    with pytest.raises(PhysicalityError):
        CovarianceState(np.array([[0.0, 1.0], [1.0, 0.0]]))
    with pytest.raises(PhysicalityError):
        CovarianceState(1.5 * J)


def test_state_is_read_only():
    state = vacuum_state(2)
    with pytest.raises(ValueError):
        state.gamma[0, 1] = 0.0


def test_rotation_inside_site_plane_leaves_vacuum():
    state = apply_plane_rotation(vacuum_state(2), 0, 1, 0.7)
    assert_allclose(state.gamma, vacuum_state(2).gamma, atol=1e-15)


def test_rotation_arguments_checked():
    state = vacuum_state(2)
    with pytest.raises(InvalidArgumentError):
        apply_plane_rotation(state, 1, 1, 0.3)
    with pytest.raises(InvalidArgumentError):
        apply_plane_rotation(state, 0, 4, 0.3)
    with pytest.raises(InvalidArgumentError):
        apply_rotations(state, [0, 1], [1, 2], [0.1, 0.2])


def test_many_gates_keep_state_pure(rng):
    state = random_circuit_state(4, 10_000, rng)
    assert state.purity_deviation() < 1e-9
    assert np.max(np.abs(state.gamma + state.gamma.T)) < 1e-12


def test_majorana_gate_matrix_is_special_orthogonal():
    r = majorana_gate_matrix(0.4, -1.1)
    assert_allclose(r @ r.T, np.eye(4), atol=1e-15)
    assert_allclose(np.linalg.det(r), 1.0)


def test_two_site_gate_matches_explicit_rotation(rng):
    state = random_circuit_state(3, 5, rng)
    x, y = 0.3, -0.8
    r = np.eye(6)
    r[:4, :4] = majorana_gate_matrix(x + y, x - y)
    expected = r @ state.gamma @ r.T
    assert_allclose(apply_two_site_gate(state, 0, (x, y)).gamma, expected, atol=1e-14)


def test_wrapping_gate_is_translation_of_bulk_gate():
    n = 4
    angles = (0.37, -0.52)
    wrapped = apply_two_site_gate(vacuum_state(n), n - 1, angles)
    bulk = apply_two_site_gate(vacuum_state(n), 0, angles)
    assert_allclose(wrapped.window(n - 1, 2).gamma, bulk.window(0, 2).gamma, atol=1e-14)


def test_interleave_vacuum(rng):
    state = random_circuit_state(2, 4, rng)
    doubled = interleave_vacuum(state)
    assert doubled.n_sites == 4
    old = [0, 1, 4, 5]
    assert_allclose(doubled.gamma[np.ix_(old, old)], state.gamma)
    assert_allclose(doubled.gamma[2, 3], -1.0)
    assert_allclose(doubled.gamma[6, 7], -1.0)
    assert_allclose(doubled.gamma[0, 2], 0.0)


def test_mode_subset_validation():
    with pytest.raises(InvalidArgumentError):
        ModeSubset(())
    with pytest.raises(InvalidArgumentError):
        ModeSubset((3, 1))
    assert ModeSubset.sites([2, 0]).indices == (0, 1, 4, 5)


def test_restrict_needs_even_subset():
    with pytest.raises(InvalidArgumentError):
        restrict(vacuum_state(2), ModeSubset((0, 1, 2)))


def test_window_wraps_with_sign(rng):
    state = random_circuit_state(4, 12, rng)
    window = state.window(3, 2)
    assert_allclose(window.gamma[:2, 2:], -state.gamma[6:8, 0:2])
    assert_allclose(window.gamma[2:, 2:], state.gamma[0:2, 0:2])


def test_mode_entropy_half_polarised():
    expected = -(0.75 * np.log(0.75) + 0.25 * np.log(0.25))
    assert_allclose(mode_entropy(0.5), expected)
    assert_allclose(mode_entropy(1.0), 0.0)
    assert_allclose(mode_entropy(0.0), np.log(2.0))


def test_entropy_is_additive_on_products():
    gamma = linalg.block_diag(0.3 * J, 0.8 * J)
    assert_allclose(entropy(CovarianceState(gamma)), mode_entropy(0.3) + mode_entropy(0.8))


def test_pure_state_entanglement_is_symmetric(rng):
    state = random_circuit_state(6, 40, rng)
    left = entanglement_entropy(state, ModeSubset.sites([0, 1]))
    right = entanglement_entropy(state, ModeSubset.sites([2, 3, 4, 5]))
    assert_allclose(left, right, atol=1e-10)
    assert entanglement_entropy(vacuum_state(4), ModeSubset.sites([0, 1])) < 1e-12


def test_canonical_eigenvalues_reject_unphysical():
    with pytest.raises(PhysicalityError):
        canonical_eigenvalues(CovarianceState.trusted(1.5 * J))


def test_purify(rng):
    mixed = random_circuit_state(4, 20, rng).window(1, 2)
    assert not mixed.is_pure
    pure = purify(mixed)
    assert pure.is_pure
    assert_allclose(pure.gamma[:4, :4], mixed.gamma)


def test_pure_fidelity_limits(rng):
    state = random_circuit_state(4, 10, rng)
    assert_allclose(fidelity(state, state), 1.0, atol=1e-12)
    flipped = CovarianceState(-vacuum_state(3).gamma)
    assert fidelity(vacuum_state(3), flipped) == 0.0
    assert log_fidelity(vacuum_state(3), flipped) == -np.inf
    assert normalized_infidelity(-np.inf, 3) == 1.0


def test_single_mode_mixed_fidelity():
    a, b = 0.3, 0.8
    p, q = (1 + a) / 2, (1 + b) / 2
    expected = np.sqrt(p * q) + np.sqrt((1 - p) * (1 - q))
    assert_allclose(fidelity(single_mode(a), single_mode(b)), expected, atol=1e-12)


def _dense_and_gaussian(n, gates):
    psi = Statevector(n)
    state = vacuum_state(n)
    for left, x, y in gates:
        psi.apply_gate(DenseGate.matchgate(n, left, x, y))
        state = apply_two_site_gate(state, left, (x, y))
    return psi, state


def _random_gates(n, count, rng):
    return [(int(rng.integers(n - 1)), *rng.uniform(-np.pi, np.pi, size=2)) for _ in range(count)]


def test_pure_fidelity_matches_overlap(rng):
    psi, a = _dense_and_gaussian(4, _random_gates(4, 8, rng))
    phi, b = _dense_and_gaussian(4, _random_gates(4, 8, rng))
    assert_allclose(fidelity(a, b), abs(psi.inner(phi)), atol=1e-10)


def test_mixed_fidelity_matches_uhlmann(rng):
    psi, a = _dense_and_gaussian(4, _random_gates(4, 10, rng))
    phi, b = _dense_and_gaussian(4, _random_gates(4, 10, rng))
    subset = ModeSubset.sites([0, 1])
    ra, rb = restrict(a, subset), restrict(b, subset)
    assert not ra.is_pure and not rb.is_pure

    def reduced(vec):
        m = vec.amplitudes.reshape(4, 4)
        return m @ m.conj().T

    root = linalg.sqrtm(reduced(psi)) @ linalg.sqrtm(reduced(phi))
    expected = np.sum(linalg.svdvals(root))
    assert_allclose(fidelity(ra, rb), expected, atol=1e-8)
    assert_allclose(fidelity(ra, rb), fidelity(rb, ra), atol=1e-10)


def test_quadratic_expectation_reads_covariance(rng):
    state = random_circuit_state(3, 8, rng)
    assert_allclose(expectation_quadratic(vacuum_state(3), 0, 1), -1.0)
    assert_allclose(expectation_quadratic(state, 4, 1), -expectation_quadratic(state, 1, 4))
    with pytest.raises(InvalidArgumentError):
        expectation_quadratic(state, 2, 2)
    with pytest.raises(InvalidArgumentError):
        expectation_quadratic(state, 0, 6)


def test_fidelity_needs_equal_size():
    with pytest.raises(InvalidArgumentError):
        fidelity(vacuum_state(2), vacuum_state(3))


def test_csv_round_trip(tmp_path, rng):
    state = random_circuit_state(3, 6, rng)
    path = tmp_path / "gamma.csv"
    state.to_csv(path)
    assert_allclose(CovarianceState.from_csv(path).gamma, state.gamma, rtol=0, atol=0)
