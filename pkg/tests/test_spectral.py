import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jxsim.combinatorics import ModeOccupation, Permutation, right_transversal
from jxsim.errors import ResourceLimitError
from jxsim.spectral import (
    FrequencyGrid,
    OverlapEngine,
    PairProductState,
    SpectralAmplitude,
    apply_delay,
    build_gaussian_jsa,
    check_symmetry,
    external_density_matrix,
    fwhm_nm_to_angular,
    grid_for_filters,
    heralded_visibility,
    internal_overlap,
    normalization_np,
    np_from_power_sums,
    pair_exchange_visibility,
    reduced_spectral_operator,
    schmidt_power_sums,
)

FILTER_W = fwhm_nm_to_angular(3.0, 795.0)


def gauss(pump_nm=0.4, off_ab=0.0, size=17, span=4.0):
    grid = grid_for_filters(3.0, (off_ab / 2, -off_ab / 2), 795.0, size=size, span_fwhm=span)
    return build_gaussian_jsa(pump_nm, 3.0, off_ab / 2, -off_ab / 2, 795.0, grid)


def separable(size=17):
    # effectively constant pump: no frequency correlation left
    return gauss(pump_nm=1e6, size=size)


def test_grid_validation():
    with pytest.raises(ValueError):
        FrequencyGrid((0.0,))
    with pytest.raises(ValueError):
        FrequencyGrid((0.0, 1.0, 1.5))
    with pytest.raises(ValueError):
        FrequencyGrid((0.0, -1.0))


def test_jsa_normalization_invariant():
    jsa = gauss()
    assert np.sum(np.abs(jsa.amps) ** 2) * jsa.grid.weight**2 == pytest.approx(1.0, abs=1e-12)


def test_builder_rejects_narrow_grid():
    sigma = FILTER_W / math.sqrt(8 * math.log(2))
    grid = FrequencyGrid.symmetric(9, 1.5 * sigma)
    with pytest.raises(ValueError):
        build_gaussian_jsa(0.4, 3.0, 0.0, 0.0, 795.0, grid)


def test_builder_warns_when_mass_leaks():
    # passes the hard precondition but clips more than 1% of the tails
    grid = FrequencyGrid.symmetric(31, 1.0 * FILTER_W)
    with pytest.warns(UserWarning):
        build_gaussian_jsa(20.0, 3.0, 0.0, 0.0, 795.0, grid)


def test_narrow_pump_concentrates_on_antidiagonal():
    jsa = gauss(pump_nm=1e-5)
    weights = np.abs(jsa.amps) ** 2
    anti = np.trace(weights[:, ::-1])
    assert anti / weights.sum() > 0.999


def test_delay_preserves_norm_and_zero_delay_is_identity():
    jsa = gauss()
    delayed = apply_delay(jsa, "first", 3.7)
    assert np.sum(np.abs(delayed.amps) ** 2) * delayed.grid.weight**2 == pytest.approx(
        1.0, abs=1e-14
    )
    same = apply_delay(jsa, "second", 0.0)
    assert np.allclose(same.amps, jsa.amps)


def test_large_delay_kills_exchange_overlap(distinguishing_delay):
    jsa = gauss(size=129)  # resolves the delay phase
    delayed = apply_delay(jsa, "first", distinguishing_delay)
    assert abs(pair_exchange_visibility(delayed)) < 0.01


def test_exchange_visibility_even_and_decreasing_in_delay():
    jsa = gauss(size=129)
    taus = [0.0, 0.05, 0.1, 0.2, 0.4]
    values = [pair_exchange_visibility(apply_delay(jsa, "first", t)) for t in taus]
    mirrored = [pair_exchange_visibility(apply_delay(jsa, "first", -t)) for t in taus]
    assert np.allclose(values, mirrored, atol=1e-12)
    assert all(a >= b - 1e-12 for a, b in zip(values, values[1:]))


def test_exchange_visibility_symmetric_jsa_is_one():
    assert pair_exchange_visibility(gauss()) == pytest.approx(1.0, abs=1e-12)


def test_exchange_visibility_disjoint_filters_vanishes():
    jsa = gauss(off_ab=30.0, size=61, span=6.0)
    assert abs(pair_exchange_visibility(jsa)) < 1e-6


def test_exchange_visibility_matches_offset_formula():
    # For Gaussian filters the exchange overlap is exp(-delta^2 / (4 sigma^2))
    # independent of the pump width; check on a fine grid.
    off = 0.625
    jsa = gauss(off_ab=off, size=201, span=6.0)
    delta = fwhm_nm_to_angular(off, 795.0)
    sigma = FILTER_W / math.sqrt(8 * math.log(2))
    assert pair_exchange_visibility(jsa) == pytest.approx(
        math.exp(-(delta**2) / (4 * sigma**2)), abs=1e-4
    )


def test_calibrated_pair_visibilities(paper_cfg):
    assert pair_exchange_visibility(paper_cfg.source.jsa_ab) == pytest.approx(0.94, abs=0.02)
    assert pair_exchange_visibility(paper_cfg.source.jsa_cd) == pytest.approx(0.90, abs=0.02)


def test_heralded_visibility_pure_identical_states():
    jsa = separable()
    assert heralded_visibility(jsa, jsa) == pytest.approx(1.0, abs=1e-9)


def test_heralded_visibility_correlated_equals_inverse_schmidt_number():
    jsa = gauss(pump_nm=1e-5)
    spectrum = np.linalg.eigvalsh(reduced_spectral_operator(jsa, "second"))
    schmidt_number = 1.0 / float(np.sum(spectrum**2))
    value = heralded_visibility(jsa, jsa)
    assert value == pytest.approx(1.0 / schmidt_number, abs=1e-12)
    assert value < 1.0


def test_calibrated_cross_pair_visibility(paper_cfg):
    value = heralded_visibility(paper_cfg.source.jsa_ab, paper_cfg.source.jsa_cd)
    assert value == pytest.approx(0.591, abs=0.03)


def test_power_sums_start_at_one():
    sums = schmidt_power_sums(gauss(), 4)
    assert sums[0] == pytest.approx(1.0, abs=1e-12)
    assert all(0 < t <= 1 + 1e-12 for t in sums)


def test_np_limits_from_power_sums():
    for pairs in (2, 3, 4):
        assert np_from_power_sums((1.0,) * pairs, pairs) == pytest.approx(
            math.factorial(pairs) ** 2
        )
        assert np_from_power_sums((1.0,) + (0.0,) * (pairs - 1), pairs) == pytest.approx(
            math.factorial(pairs)
        )


def test_np_separable_jsa():
    jsa = separable()
    assert normalization_np(jsa, 2) == pytest.approx(4.0, abs=1e-9)
    assert normalization_np(jsa, 3) == pytest.approx(36.0, abs=1e-7)


def test_np_calibrated_values(paper_cfg):
    assert normalization_np(paper_cfg.source.jsa_ab, 2) == pytest.approx(3.18, abs=0.05)
    assert normalization_np(paper_cfg.source.jsa_ab, 3) == pytest.approx(21.65, abs=0.5)


def test_np_antidiagonal_approaches_spontaneous_limit():
    # On a d-point grid the excess over P! scales like the inverse
    # participation ratio of the antidiagonal weights, i.e. ~1/d.
    coarse = normalization_np(gauss(pump_nm=1e-5, size=17), 2)
    mid = normalization_np(gauss(pump_nm=1e-5, size=61), 2)
    fine = normalization_np(gauss(pump_nm=1e-5, size=241), 2)
    assert 2.0 < fine < mid < coarse
    assert fine - 2.0 < 0.07


def test_np_invariant_under_delays():
    jsa = gauss(off_ab=0.625)
    delayed = apply_delay(apply_delay(jsa, "first", 1.3), "second", -0.4)
    for pairs in (2, 3):
        assert normalization_np(delayed, pairs) == pytest.approx(
            normalization_np(jsa, pairs), abs=1e-10
        )


@given(st.floats(min_value=0.05, max_value=50.0))
@settings(max_examples=15, deadline=None)
def test_np_monotonicity_bounds(pump_nm):
    jsa = gauss(pump_nm=pump_nm)
    for pairs in (2, 3, 4):
        value = normalization_np(jsa, pairs)
        assert math.factorial(pairs) <= value <= math.factorial(pairs) ** 2 + 1e-9


def test_np_pair_cap():
    with pytest.raises(ResourceLimitError):
        normalization_np(gauss(), 5)


# ---------------------------------------------------------------------------
# multi-pair overlaps and the external density matrix
# ---------------------------------------------------------------------------


def two_pair_state(jsa_1, jsa_2, modes_1=(1, 7), modes_2=(3, 5)):
    return PairProductState(((jsa_1, modes_1), (jsa_2, modes_2)), 1, 1)


def test_internal_overlap_diagonal_is_one(symmetric_source):
    state = two_pair_state(symmetric_source.jsa_ab, symmetric_source.jsa_cd)
    occ = state.occupation(7)
    transversal = right_transversal(occ)
    engine = OverlapEngine(state, occ)
    for mu in transversal.representatives[:6]:
        assert internal_overlap(state, occ, mu, mu, engine=engine) == pytest.approx(
            1.0, abs=1e-12
        )


def test_internal_overlap_identical_uncorrelated_photons():
    jsa = separable()
    state = two_pair_state(jsa, jsa)
    occ = state.occupation(7)
    transversal = right_transversal(occ)
    engine = OverlapEngine(state, occ)
    for mu in transversal.representatives:
        for nu in transversal.representatives:
            assert internal_overlap(state, occ, mu, nu, engine=engine) == pytest.approx(
                1.0, abs=1e-9
            )


def test_internal_overlap_orthogonal_pairs_cross_exchange_vanishes():
    # pairs with disjoint spectra: swapping photons across pairs kills the overlap
    grid = grid_for_filters(3.0, (40.0,), 795.0, size=61, span_fwhm=5.0)
    jsa_lo = build_gaussian_jsa(0.4, 3.0, -40.0, -40.0, 795.0, grid)
    jsa_hi = build_gaussian_jsa(0.4, 3.0, 40.0, 40.0, 795.0, grid)
    state = two_pair_state(jsa_lo, jsa_hi)
    occ = state.occupation(7)
    transversal = right_transversal(occ)
    engine = OverlapEngine(state, occ)
    mu = transversal.representatives[0]
    worst = 0.0
    for k, nu in enumerate(transversal.representatives):
        value = internal_overlap(state, occ, mu, nu, engine=engine)
        if transversal.assignment_lists[k] != transversal.assignment_lists[0]:
            worst = max(worst, abs(value))
    assert worst < 1e-12


def test_density_matrix_invariants(paper_cfg):
    src = paper_cfg.source
    state = two_pair_state(src.jsa_ab, src.jsa_cd)
    occ = state.occupation(7)
    rho = external_density_matrix(state, occ)
    rho.validate()
    assert np.allclose(np.diag(rho.entries), 1.0 / rho.dim, atol=1e-12)


def test_density_matrix_fully_indistinguishable_is_uniform():
    jsa = separable()
    state = PairProductState(((jsa, (1, 7)), (jsa, (1, 7))), 2, 0)
    occ = state.occupation(7)
    rho = external_density_matrix(state, occ)
    assert np.allclose(rho.entries, 1.0 / rho.dim, atol=1e-9)


def test_density_matrix_distinguishable_single_occupancy_is_diagonal():
    grid = grid_for_filters(3.0, (40.0,), 795.0, size=61, span_fwhm=5.0)
    jsa_lo = build_gaussian_jsa(0.4, 3.0, -40.0, -40.0, 795.0, grid)
    jsa_hi = build_gaussian_jsa(0.4, 3.0, 40.0, 40.0, 795.0, grid)
    state = two_pair_state(jsa_lo, jsa_hi)
    occ = state.occupation(7)
    rho = external_density_matrix(state, occ)
    off_diag = rho.entries - np.diag(np.diag(rho.entries))
    assert np.max(np.abs(off_diag)) < 1e-10
    assert np.allclose(np.diag(rho.entries), 1.0 / rho.dim, atol=1e-12)


def test_check_symmetry_scenarios(symmetric_source, distinguishing_delay):
    mirror = Permutation.mirror(7)
    tau = distinguishing_delay
    src = symmetric_source

    plain = two_pair_state(src.jsa_ab, src.jsa_cd)
    occ = plain.occupation(7)
    rho = external_density_matrix(plain, occ)
    assert check_symmetry(rho, mirror) < 1e-10

    inter = two_pair_state(
        src.jsa_ab, apply_delay(apply_delay(src.jsa_cd, "first", tau), "second", tau)
    )
    rho_inter = external_density_matrix(inter, occ)
    assert check_symmetry(rho_inter, mirror) < 1e-10

    intra = two_pair_state(
        apply_delay(src.jsa_ab, "second", tau), apply_delay(src.jsa_cd, "second", tau)
    )
    rho_intra = external_density_matrix(intra, occ)
    assert check_symmetry(rho_intra, mirror) > 0.01


def test_check_symmetry_rejects_incompatible_occupation(symmetric_source):
    state = two_pair_state(symmetric_source.jsa_ab, symmetric_source.jsa_cd, (1, 2), (3, 5))
    occ = state.occupation(7)
    rho = external_density_matrix(state, occ)
    with pytest.raises(ValueError):
        check_symmetry(rho, Permutation.mirror(7))
