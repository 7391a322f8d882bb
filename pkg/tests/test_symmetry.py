import numpy as np
import pytest
from numpy.testing import assert_allclose

from dmera.ansatz import load_bundled_parameters, prepare_state
from dmera.exceptions import InvalidArgumentError
from dmera.gaussian import apply_two_site_gate, vacuum_state
from dmera.models import SOLUTIONS, Model
from dmera.statevector import DenseGate, Statevector
from dmera.symmetry import (
    FULL_GROUP,
    KramersWannierGroup,
    TranslationGroup,
    analysis_frame,
    chord_distance,
    correlator_decay_exponent,
    correlator_table,
    decay_exponent,
    entropy_profile,
    error_summary,
    family_errors,
    kw_average,
    orbit_values,
    orbit_variance,
    out_of_phase_fraction,
    shot_variance,
    subsystem_infidelity_profile,
    translation_average,
)


@pytest.fixture
def exact16():
    return SOLUTIONS.get(Model.ISING, 16).ground_state


@pytest.fixture
def dmera_pair(isolated_settings):
    state = prepare_state(load_bundled_parameters("ising", 2), 2, 5)
    return state, SOLUTIONS.get(Model.ISING, 32).ground_state


def test_exact_state_has_no_error(exact16):
    table = correlator_table(exact16, exact16, 8)
    for d in range(9):
        summary = error_summary(table, d)
        assert summary.exact_match
        assert summary.ratio == 0.0
        assert_allclose(kw_average(table, d), table.exact[0, 0, d], atol=1e-12)
        assert orbit_variance(table, "A", d) < 1e-24


def test_orbit_has_every_label():
    orbit = FULL_GROUP.orbit(6)
    assert len(orbit) == 12
    assert len(set(orbit)) == 12
    assert len(TranslationGroup().orbit(6)) == 6
    assert KramersWannierGroup().orbit(6, 0, 2) == [(0, 2), (1, 2)]


def test_families_match_statevector(rng):
    n = 4
    psi = Statevector(n)
    state = vacuum_state(n)
    for _ in range(12):
        left = int(rng.integers(n))
        x, y = rng.uniform(-np.pi, np.pi, size=2)
        psi.apply_gate(DenseGate.matchgate(n, left, x, y))
        state = apply_two_site_gate(state, left, (x, y))
    table = correlator_table(state, state, 2)
    for i in range(n):
        z = "".join("Z" if q == i else "I" for q in range(n))
        xx = "".join("X" if q in (i, (i + 1) % n) else "I" for q in range(n))
        assert_allclose(table.values[0, i, 0], -psi.expectation(z), atol=1e-10)
        assert_allclose(table.values[1, i, 0], -psi.expectation(xx), atol=1e-10)


def test_averaging_never_hurts(dmera_pair):
    state, exact = dmera_pair
    table = correlator_table(state, exact, 16)
    for d in range(17):
        summary = error_summary(table, d)
        assert summary.abs_error_of_mean <= summary.mean_abs_error + 1e-15
        assert 0.0 <= summary.ratio <= 1.0 + 1e-12


def test_translation_average_is_orbit_mean(dmera_pair):
    state, exact = dmera_pair
    table = correlator_table(state, exact, 4)
    values, _ = orbit_values(table, 3, TranslationGroup())
    assert_allclose(translation_average(table, "A", 3), np.mean(values))
    a_err, b_err = family_errors(table, 3)
    assert_allclose(kw_average(table, 3) - table.exact[0, 0, 3], 0.5 * (a_err + b_err), atol=1e-11)
    assert 0.0 <= out_of_phase_fraction(table, range(1, 5)) <= 1.0


def test_table_validation(exact16):
    with pytest.raises(InvalidArgumentError):
        correlator_table(exact16, exact16, 9)
    table = correlator_table(exact16, exact16, 2)
    with pytest.raises(InvalidArgumentError):
        translation_average(table, "C", 0)
    with pytest.raises(InvalidArgumentError):
        kw_average(table, 3)
    assert len(table.rows()) == 2 * 16 * 3


def test_modified_state_analysed_in_ising_frame():
    modified = SOLUTIONS.get(Model.MODIFIED_ISING, 16).ground_state
    exact = SOLUTIONS.get(Model.ISING, 16).ground_state
    table = correlator_table(analysis_frame(modified, "modified_ising"), exact, 8)
    assert np.max(np.abs(table.values - table.exact)) < 1e-10


def test_profiles_of_exact_state(exact16, isolated_settings):
    entropies = entropy_profile(exact16, exact16, [1, 2, 4])
    assert all(row["relative_error"] == 0.0 for row in entropies)
    assert entropies[0]["mean_entropy"] < entropies[1]["mean_entropy"] < entropies[2]["mean_entropy"]
    infidelities = subsystem_infidelity_profile(exact16, exact16, [1, 2])
    assert all(abs(row["mean_normalized_infidelity"]) < 1e-10 for row in infidelities)
    with pytest.raises(InvalidArgumentError):
        entropy_profile(exact16, exact16, [16])


def test_profiles_of_product_state(isolated_settings):
    state = vacuum_state(8)
    rows = entropy_profile(state, state, [2])
    assert rows[0]["mean_entropy"] == 0.0
    assert rows[0]["relative_error"] == 0.0


def test_decay_exponent_and_shot_variance():
    distances = np.arange(1, 10)
    assert_allclose(decay_exponent(distances, 0.3 / distances), -1.0)
    assert_allclose(shot_variance(0.5), 0.75)


def test_chord_distance():
    assert_allclose(chord_distance([0.0, 32.0], 64), [0.0, 64 / np.pi])
    assert_allclose(chord_distance(1.0, 10_000), 1.0, rtol=1e-7)
    ring = np.arange(1, 20)
    values = 1.0 / chord_distance(ring, 40)
    assert_allclose(decay_exponent(ring, values, 40), -1.0)


def test_exact_correlator_decays_as_inverse_chord():
    exact = SOLUTIONS.get(Model.ISING, 512).ground_state
    table = correlator_table(exact, exact, 128)
    assert_allclose(correlator_decay_exponent(table, range(4, 129)), -1.0, atol=1e-8)


@pytest.mark.slow
def test_deep_circuits_recover_symmetry():
    exact = SOLUTIONS.get(Model.ISING, 64).ground_state
    spreads = []
    for depth in (2, 4, 6):
        state = prepare_state(load_bundled_parameters("ising", depth), depth, 6)
        spreads.append(orbit_variance(correlator_table(state, exact, 4), "A", 4))
    assert spreads[0] > spreads[1] > spreads[2]


@pytest.fixture(scope="module")
def ising512_tables():
    exact = SOLUTIONS.get(Model.ISING, 512).ground_state
    tables = {}
    for depth in (2, 6):
        state = prepare_state(load_bundled_parameters("ising", depth), depth, 9)
        tables[depth] = correlator_table(state, exact, 128)
    return tables


@pytest.mark.slow
def test_averaged_correlators_at_512_sites(ising512_tables):
    table = ising512_tables[6]
    summaries = [error_summary(table, d) for d in range(2, 65)]
    assert max(s.relative_error_of_mean for s in summaries) < 1e-7
    assert sum(s.ratio <= 1e-2 for s in summaries) > len(summaries) / 2
    shallow = [error_summary(ising512_tables[2], d).ratio for d in range(2, 65)]
    assert np.median([s.ratio for s in summaries]) < np.median(shallow)


@pytest.mark.slow
def test_deep_circuit_correlator_decay(ising512_tables):
    assert abs(correlator_decay_exponent(ising512_tables[6], range(4, 129)) + 1.0) < 0.05


@pytest.mark.slow
def test_modified_model_averaging_gain():
    exact = SOLUTIONS.get(Model.ISING, 512).ground_state
    state = prepare_state(load_bundled_parameters("modified_ising", 6), 6, 9)
    table = correlator_table(analysis_frame(state, "modified_ising"), exact, 64)
    summaries = [error_summary(table, d) for d in range(2, 65)]
    assert max(s.relative_error_of_mean for s in summaries) < 1e-6
    assert np.median([s.ratio for s in summaries]) < 1e-2


@pytest.mark.slow
def test_entropy_error_changes_sign_with_depth(isolated_settings):
    exact = SOLUTIONS.get(Model.ISING, 256).ground_state
    sizes = [2 ** k for k in range(8)]
    signed, magnitude = {}, {}
    for depth in range(1, 7):
        state = prepare_state(load_bundled_parameters("ising", depth), depth, 8)
        errors = [row["relative_error"] for row in entropy_profile(state, exact, sizes)]
        signed[depth] = np.mean(errors)
        magnitude[depth] = np.mean(np.abs(errors))
    assert signed[1] > 0 and signed[2] > 0
    assert all(signed[d] < 0 for d in (4, 5, 6))
    assert magnitude[6] * 100 < magnitude[1]
