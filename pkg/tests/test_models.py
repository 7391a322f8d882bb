import numpy as np
import pytest
from numpy.testing import assert_allclose

from dmera.exceptions import DegenerateSpectrumError, InvalidArgumentError
from dmera.gaussian import CovarianceState, vacuum_state
from dmera.models import (
    INFINITE_ENERGY_DENSITY,
    SOLUTIONS,
    Model,
    QuadraticHamiltonian,
    correlator,
    energy,
    exact_correlator_table,
    exact_ground_state,
    ising_hamiltonian,
    local_energy,
    many_body_spectrum,
    modified_ising_hamiltonian,
    parity,
    to_ising_frame,
)
from dmera.statevector import dense_ground_energy, dense_spectrum


def test_chain_length_checks():
    with pytest.raises(InvalidArgumentError):
        ising_hamiltonian(5)
    with pytest.raises(InvalidArgumentError):
        modified_ising_hamiltonian(2)


def test_ising_coupling_layout():
    a = ising_hamiltonian(4).coupling
    assert_allclose(a, -a.T)
    assert a[0, 1] == 1.0
    assert a[1, 2] == 1.0
    assert a[7, 0] == -1.0


def test_vacuum_energy():
    h = ising_hamiltonian(6)
    assert_allclose(energy(vacuum_state(6), h), -6.0)
    assert_allclose(local_energy(vacuum_state(6), Model.ISING, 5), -1.0)


def test_two_site_ground_energy():
    solution = exact_ground_state(ising_hamiltonian(2))
    assert_allclose(solution.ground_energy, -2.0 * np.sqrt(2.0), atol=1e-12)


@pytest.mark.parametrize("n_sites", [2, 4, 6, 8])
def test_ising_ground_energy_matches_dense(n_sites):
    solution = exact_ground_state(ising_hamiltonian(n_sites))
    assert_allclose(solution.ground_energy, dense_ground_energy("ising", n_sites), atol=1e-10)
    assert_allclose(energy(solution.ground_state, ising_hamiltonian(n_sites)),
                    solution.ground_energy, atol=1e-12)
    assert solution.ground_state.is_pure
    assert solution.parity == 1


@pytest.mark.parametrize("label", ["ising", "modified_ising"])
@pytest.mark.parametrize("n_sites", [4, 6])
def test_even_sector_spectrum_matches_dense(label, n_sites):
    h = ising_hamiltonian(n_sites) if label == "ising" else modified_ising_hamiltonian(n_sites)
    assert_allclose(many_body_spectrum(h, "even"), dense_spectrum(label, n_sites, "even"), atol=1e-10)


def test_modified_chain_shares_single_particle_spectrum():
    ising = exact_ground_state(ising_hamiltonian(8))
    modified = exact_ground_state(modified_ising_hamiltonian(8))
    assert_allclose(modified.single_particle_spectrum, ising.single_particle_spectrum, atol=1e-10)
    assert_allclose(modified.ground_energy, ising.ground_energy, atol=1e-10)


def test_modified_ground_state_maps_to_ising_frame():
    modified = exact_ground_state(modified_ising_hamiltonian(8)).ground_state
    ising = exact_ground_state(ising_hamiltonian(8)).ground_state
    assert_allclose(to_ising_frame(modified).gamma, ising.gamma, atol=1e-10)


def test_large_chain_approaches_infinite_density():
    solution = SOLUTIONS.get(Model.ISING, 512)
    assert solution.energy_density < INFINITE_ENERGY_DENSITY
    assert abs(solution.energy_density - INFINITE_ENERGY_DENSITY) < 1e-5
    assert_allclose(correlator(solution.ground_state, "A", 0, 0), -2.0 / np.pi, atol=1e-4)


def test_exact_families_agree():
    state = SOLUTIONS.get("ising", 16).ground_state
    for d in range(8):
        assert_allclose(correlator(state, "A", 3, d), correlator(state, "B", 3, d), atol=1e-12)
        assert_allclose(correlator(state, "A", 0, d), correlator(state, "A", 11, d), atol=1e-12)


def test_zero_coupling_is_degenerate():
    h = QuadraticHamiltonian(n_sites=2, coupling=np.zeros((4, 4)))
    with pytest.raises(DegenerateSpectrumError):
        exact_ground_state(h)


def test_parity_of_flipped_site():
    gamma = np.array(vacuum_state(2).gamma)
    gamma[0, 1], gamma[1, 0] = 1.0, -1.0
    assert parity(vacuum_state(2)) == 1
    assert parity(CovarianceState(gamma)) == -1


def test_exact_correlator_table():
    rows = exact_correlator_table("ising", 8, 3)
    assert len(rows) == 8
    assert {r["family"] for r in rows} == {"A", "B"}
    with pytest.raises(InvalidArgumentError):
        exact_correlator_table("ising", 8, 8)
