import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import phase_aligned_distance
from qscissors import (
    DensityMatrix,
    DetectorModel,
    DeviceParams,
    FockVector,
    HeraldPattern,
    InvalidDimensionError,
    MultimodeState,
    TruncationWarning,
    ZeroProbabilityHeraldError,
    coherent_coefficients,
    conditioned_density,
    fidelity,
    fock_state,
    output_state_closed_form,
    povm_element,
    truncate_max,
)
from qscissors.devices import auto_cutoffs

REF = DeviceParams(0.5, math.pi / 2, math.pi / 4)


def reference_output():
    psi = coherent_coefficients(1.0, 30)
    return psi, output_state_closed_form(psi, REF, auto_cutoffs(psi, REF))


def test_model_domain():
    with pytest.raises(ValueError):
        DetectorModel(eta=1.2)
    with pytest.raises(ValueError):
        DetectorModel(nu=-1e-3)


@pytest.mark.parametrize("count, expected", [(1, [0, 1, 0, 0]), (0, [1, 0, 0, 0])])
def test_perfect_detector_is_projector(count, expected):
    np.testing.assert_array_equal(povm_element(DetectorModel(), count, 4).diagonal, expected)


def test_povm_hand_evaluation():
    d = povm_element(DetectorModel(0.7, 1e-4), 1, 3).diagonal
    assert d[1] == pytest.approx(math.exp(-1e-4) * (1e-4 * 0.3 + 0.7), rel=1e-14)
    assert d[2] == pytest.approx(math.exp(-1e-4) * (1e-4 * 0.09 + 2 * 0.7 * 0.3), rel=1e-14)


@settings(max_examples=30, deadline=None)
@given(eta=st.floats(0, 1), nu=st.floats(0, 1e-2), dim=st.integers(1, 12))
def test_povm_entries_nonnegative_and_subnormalized(eta, nu, dim):
    model = DetectorModel(eta, nu)
    total = np.zeros(dim)
    for count in range(dim + 5):
        diag = povm_element(model, count, dim).diagonal
        assert np.all(diag >= 0)
        total += diag
    assert np.all(total <= 1 + 1e-10)


def test_povm_tail_bound():
    el = povm_element(DetectorModel(0.7), 2, 10)
    assert el.tail_bound == pytest.approx(0.3**8)


def test_single_term_state_half_efficiency():
    full = MultimodeState({(0, 1, 0): 1.0}, (2, 2, 2))
    rho, prob = conditioned_density(full, HeraldPattern("b", "c", 1), DetectorModel(0.5, 0.0))
    assert prob == pytest.approx(0.5)
    np.testing.assert_allclose(rho.matrix, np.diag([1.0, 0.0]), atol=1e-15)


def test_conditioned_density_against_term_loop():
    # explicit sum over pairs of sparse terms sharing the detected occupations
    psi = coherent_coefficients(0.8, 8)
    full = output_state_closed_form(psi, DeviceParams(0.4, 0.3, 0.6), (8, 16, 16), tail_budget=1.0)
    model = DetectorModel(0.6, 1e-3)
    pat = HeraldPattern.max_config(1)
    pi_n = povm_element(model, 1, 16).diagonal
    pi_0 = povm_element(model, 0, 16).diagonal
    oracle = np.zeros((8, 8), dtype=complex)
    items = list(full.terms.items())
    for (x, nb, nc), u in items:
        for (y, mb, mc), v in items:
            if (nb, nc) == (mb, mc):
                oracle[x, y] += pi_n[nb] * pi_0[nc] * u * np.conj(v)
    with pytest.warns(TruncationWarning):
        rho, prob = conditioned_density(full, pat, model)
    assert prob == pytest.approx(np.trace(oracle).real, rel=1e-12)
    np.testing.assert_allclose(rho.matrix, oracle / np.trace(oracle).real, atol=1e-13)


@pytest.mark.parametrize("count", [0, 1, 2, 3])
def test_perfect_detector_limit(count):
    psi, full = reference_output()
    rho, prob = conditioned_density(full, HeraldPattern.max_config(count), DetectorModel())
    ideal = truncate_max(psi, REF, count)
    assert prob == pytest.approx(ideal.probability, abs=1e-12)
    target = ideal.state.resize(rho.dim)
    np.testing.assert_allclose(rho.matrix, np.outer(target.amplitudes, target.amplitudes.conj()), atol=1e-10)
    assert fidelity(rho, target) == pytest.approx(1.0, abs=1e-10)


def test_reference_point_fidelity_near_point_nine():
    psi, full = reference_output()
    rho, _ = conditioned_density(full, HeraldPattern.max_config(1), DetectorModel(0.7, 1e-4))
    target = truncate_max(psi, REF, 1).state.resize(rho.dim)
    assert fidelity(rho, target) >= 0.9


def test_fidelity_degrades_with_efficiency():
    psi, full = reference_output()
    target = truncate_max(psi, REF, 1).state
    values = []
    for eta in (1.0, 0.9, 0.7, 0.5):
        rho, _ = conditioned_density(full, HeraldPattern.max_config(1), DetectorModel(eta, 1e-4))
        values.append(fidelity(rho, target.resize(rho.dim)))
    assert all(b <= a + 1e-12 for a, b in zip(values, values[1:]))


def test_conditioned_density_is_valid_state():
    _, full = reference_output()
    rho, _ = conditioned_density(full, HeraldPattern.min_config(2), DetectorModel(0.5, 1e-2))
    assert np.min(np.linalg.eigvalsh(rho.matrix)) >= -1e-10
    assert rho.trace() == pytest.approx(1.0, abs=1e-10)


def test_zero_probability_herald():
    full = MultimodeState({(0, 0, 0): 1.0}, (3, 3, 3))
    with pytest.raises(ZeroProbabilityHeraldError):
        conditioned_density(full, HeraldPattern.max_config(1), DetectorModel())


def test_fidelity_examples():
    phi = fock_state(1, 3)
    assert fidelity(DensityMatrix.from_pure(phi), phi) == pytest.approx(1.0)
    assert fidelity(DensityMatrix.from_pure(fock_state(0, 2)), fock_state(1, 2)) == 0.0
    plus = np.array([1.0, 1.0]) / math.sqrt(2)
    assert fidelity(DensityMatrix(np.diag([0.25, 0.75])), FockVector(plus)) == pytest.approx(0.5, abs=1e-15)


def test_fidelity_dimension_mismatch():
    with pytest.raises(InvalidDimensionError):
        fidelity(DensityMatrix(np.eye(2) / 2), fock_state(0, 3))


def test_phase_aligned_helper_sanity():
    v = np.array([0.6, 0.8j])
    assert phase_aligned_distance(v, v * np.exp(0.7j)) < 1e-15
