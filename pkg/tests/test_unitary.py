import math

import numpy as np
import pytest

from jxsim.unitary import (
    LossConfig,
    extend_with_loss,
    jx_generator,
    jx_unitary,
    merge_amplitude_phase,
    mirror_phase_deviation,
    reconstruct_amplitudes,
    unitary_fidelity,
)

PAPER_ETA = (0.055, 1.0, 0.034, 1.0, 0.107, 1.0, 0.065)


def test_generator_two_modes():
    assert np.allclose(jx_generator(2), 0.5 * np.array([[0, 1], [1, 0]]))


def test_generator_three_modes():
    j = jx_generator(3)
    assert j[0, 1] == pytest.approx(math.sqrt(2) / 2)
    assert j[1, 2] == pytest.approx(math.sqrt(2) / 2)


def test_generator_seven_modes_offdiagonal():
    j = jx_generator(7)
    expected = np.sqrt(np.array([6.0, 10.0, 12.0, 12.0, 10.0, 6.0])) / 2
    assert np.allclose(np.diag(j, 1), expected)
    assert np.allclose(j, j.T)


def test_generator_rejects_single_mode():
    with pytest.raises(ValueError):
        jx_generator(1)


@pytest.mark.parametrize("n", range(2, 17))
def test_unitarity(n):
    u = jx_unitary(n)
    assert np.max(np.abs(u.conj().T @ u - np.eye(n))) < 1e-12


def test_zero_time_is_identity():
    assert np.allclose(jx_unitary(5, 0.0), np.eye(5), atol=1e-14)


def test_two_modes_is_balanced_beamsplitter():
    expected = np.array([[1, 1j], [1j, 1]]) / math.sqrt(2)
    assert np.allclose(jx_unitary(2), expected, atol=1e-14)


@pytest.mark.parametrize("n", range(2, 17))
def test_mirror_phase_relation(n):
    assert mirror_phase_deviation(jx_unitary(n)) < 1e-10


def test_mirror_phase_beamsplitter_entry():
    u = jx_unitary(2)
    # entry (1, 2) equals entry (1, 1) times exp(i*pi/2)
    assert abs(u[0, 1] - u[0, 0] * np.exp(1j * np.pi / 2)) < 1e-14


def test_mirror_phase_generic_unitary_violates():
    rng = np.random.default_rng(11)
    z = rng.normal(size=(7, 7)) + 1j * rng.normal(size=(7, 7))
    q, _ = np.linalg.qr(z)
    assert mirror_phase_deviation(q) > 0.01


def test_mirror_phase_rejects_rectangular():
    with pytest.raises(ValueError):
        mirror_phase_deviation(np.ones((2, 3)))


def test_loss_extension_is_unitary_and_preserves_survival():
    u = jx_unitary(7)
    ext = extend_with_loss(u, LossConfig(PAPER_ETA))
    assert np.max(np.abs(ext.conj().T @ ext - np.eye(14))) < 1e-12
    for j in range(7):
        survival = np.sum(np.abs(ext[:7, j]) ** 2)
        assert survival == pytest.approx(PAPER_ETA[j], abs=1e-12)


def test_loss_extension_lossless_is_block_diagonal():
    u = jx_unitary(3)
    ext = extend_with_loss(u, LossConfig.lossless(3))
    assert np.allclose(ext[:3, :3], u)
    assert np.allclose(ext[3:, 3:], np.eye(3))
    assert np.allclose(ext[3:, :3], 0)


def test_loss_extension_fully_opaque_mode_routes_to_ancilla():
    u = jx_unitary(3)
    ext = extend_with_loss(u, LossConfig((1.0, 0.0, 1.0)))
    assert np.allclose(ext[:3, 1], 0)
    assert abs(ext[4, 1]) == pytest.approx(1.0)


def test_loss_config_validates_range():
    with pytest.raises(ValueError):
        LossConfig((0.5, 1.2))


def test_merge_recovers_matrix_from_its_own_pieces():
    u = jx_unitary(7)
    merged = merge_amplitude_phase(np.abs(u), u)
    assert np.max(np.abs(merged - u)) < 1e-14


def test_merge_zero_amplitudes():
    assert np.allclose(merge_amplitude_phase(np.zeros((3, 3)), jx_unitary(3)), 0)


def test_merge_perturbed_amplitudes_stay_close():
    u = jx_unitary(5)
    rng = np.random.default_rng(3)
    eps = 1e-3
    noisy = np.abs(u) * (1 + eps * rng.normal(size=u.shape))
    merged = merge_amplitude_phase(noisy, u)
    assert np.max(np.abs(merged - u)) < 5 * eps


def test_merge_is_idempotent_on_matching_phases():
    u = jx_unitary(4)
    once = merge_amplitude_phase(np.abs(u), u)
    twice = merge_amplitude_phase(np.abs(once), once)
    assert np.allclose(once, twice, atol=1e-14)


def test_merge_shape_mismatch():
    with pytest.raises(ValueError):
        merge_amplitude_phase(np.ones((2, 2)), np.ones((3, 3)))


def test_reconstruction_noiseless_roundtrip():
    rng = np.random.default_rng(7)
    w = np.abs(jx_unitary(7)) ** 2
    t_true = rng.uniform(0.2, 1.0, size=7)
    i_true = rng.uniform(0.5, 2.0, size=7)
    counts = t_true[:, None] * w * i_true[None, :]
    result = reconstruct_amplitudes(counts)
    assert np.max(np.abs(result.amplitudes_sq - w)) < 1e-10
    ratio = result.output_scales / t_true
    assert np.max(np.abs(ratio / ratio[0] - 1)) < 1e-10


def test_reconstruction_uniform_counts():
    result = reconstruct_amplitudes(np.full((5, 5), 3.7))
    assert np.allclose(result.amplitudes_sq, 1 / 5, atol=1e-12)


def test_reconstruction_with_noise_stays_close():
    rng = np.random.default_rng(19)
    w = np.abs(jx_unitary(7)) ** 2
    t_true = rng.uniform(0.2, 1.0, size=7)
    i_true = rng.uniform(0.5, 2.0, size=7)
    worst = 0.0
    for _ in range(20):
        counts = t_true[:, None] * w * i_true[None, :]
        counts = counts * (1 + 0.01 * rng.normal(size=counts.shape))
        result = reconstruct_amplitudes(counts)
        rel = np.abs(np.sqrt(result.amplitudes_sq) - np.sqrt(w)) / np.sqrt(w).max()
        worst = max(worst, float(rel.max()))
    assert worst < 0.05


def test_reconstruction_rejects_nonpositive_counts():
    counts = np.ones((3, 3))
    counts[1, 2] = 0.0
    with pytest.raises(ValueError):
        reconstruct_amplitudes(counts)


def test_fidelity_identical_columns():
    w = np.abs(jx_unitary(7)) ** 2
    assert np.allclose(unitary_fidelity(w, w), 1.0, atol=1e-12)


def test_fidelity_orthogonal_support():
    a = np.array([[1.0, 0.0], [0.0, 1.0]])
    b = np.array([[0.0, 1.0], [1.0, 0.0]])
    assert np.allclose(unitary_fidelity(a, b), 0.0)


def test_fidelity_swapped_column_matches_direct_formula():
    w = np.abs(jx_unitary(5)) ** 2
    swapped = w.copy()
    swapped[:, [0, 1]] = swapped[:, [1, 0]]
    expected = np.sum(np.sqrt(w * swapped), axis=0) ** 2
    assert np.allclose(unitary_fidelity(swapped, w), expected)
    assert np.all(unitary_fidelity(swapped, w) <= 1.0 + 1e-12)


def test_fidelity_rejects_unnormalized():
    with pytest.raises(ValueError):
        unitary_fidelity(np.ones((3, 3)), np.full((3, 3), 1 / 3))
