"""The Jx lattice unitary, its mirror phase symmetry, loss ancillas, and
single-photon amplitude reconstruction.

Matrix convention throughout: rows index output modes, columns index input
modes, both 1-based at the API level (numpy arrays are of course 0-based
internally).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

UNITARITY_TOL = 1e-12


@dataclass(frozen=True)
class LossConfig:
    """Per-input-mode transmissivity in [0, 1]."""

    eta: tuple[float, ...]

    def __post_init__(self):
        if any(not (0.0 <= e <= 1.0) for e in self.eta):
            raise ValueError(f"transmissivities must lie in [0, 1]: {self.eta}")

    @classmethod
    def lossless(cls, n: int) -> "LossConfig":
        return cls((1.0,) * n)


def jx_generator(n: int) -> np.ndarray:
    """Tridiagonal coupling matrix of an n-mode Jx lattice (hbar = 1).

    Off-diagonal element between modes k and k+1 is sqrt(k(n-k))/2, the
    square-root coupling profile that makes the lattice an angular-momentum
    ladder.
    """
    if n < 2:
        raise ValueError("a coupled lattice needs at least 2 modes")
    J = np.zeros((n, n))
    for k in range(1, n):
        J[k - 1, k] = J[k, k - 1] = 0.5 * np.sqrt(k * (n - k))
    return J


def jx_unitary(n: int, t: float = np.pi / 2) -> np.ndarray:
    """Evolution operator exp(i J t) of the Jx lattice.

    Computed by eigendecomposition of the real symmetric generator, which is
    exact and stable; at the standard evolution time t = pi/2 the result is
    mirror symmetric up to phases (see :func:`mirror_phase_deviation`).
    """
    if not np.isfinite(t):
        raise ValueError("evolution time must be finite")
    w, v = np.linalg.eigh(jx_generator(n))
    return (v * np.exp(1j * w * t)) @ v.conj().T


def mirror_phase_deviation(u: np.ndarray) -> float:
    """Largest violation of the mirror phase relation of an n-mode matrix.

    For the ideal Jx unitary at t = pi/2, entry (k, n+1-j) equals entry
    (k, j) times exp(i*pi*(k - j + (n-1)/2)); the returned value is the
    maximum absolute mismatch over all entries (0 for the ideal lattice,
    O(1) for a generic unitary).
    """
    u = np.asarray(u)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise ValueError("mirror symmetry is defined for square matrices")
    n = u.shape[0]
    k = np.arange(1, n + 1)[:, None]
    j = np.arange(1, n + 1)[None, :]
    phase = np.exp(1j * np.pi * (k - j + (n - 1) / 2))
    return float(np.max(np.abs(u[:, ::-1] - u * phase)))


def check_mirror_phase_symmetry(u: np.ndarray, tol: float = 1e-10) -> float:
    """Return the mirror phase deviation of ``u``.

    ``tol`` is the conventional threshold below which the suppression law is
    taken to apply; callers compare the returned deviation against it.
    """
    return mirror_phase_deviation(u)


def extend_with_loss(u: np.ndarray, loss: LossConfig) -> np.ndarray:
    """Embed pre-network loss into a doubled, exactly unitary matrix.

    Mode j is preceded by an unbalanced beamsplitter that routes a photon to
    the uncoupled ancilla mode n+j with probability 1 - eta_j, so a photon
    injected into mode j survives into the real output modes with total
    probability eta_j.  Returns the 2n x 2n matrix (U plus identity on the
    ancillas) composed with the beamsplitter layer.
    """
    u = np.asarray(u, dtype=complex)
    n = u.shape[0]
    if u.shape != (n, n):
        raise ValueError("unitary must be square")
    if len(loss.eta) != n:
        raise ValueError(f"need {n} transmissivities, got {len(loss.eta)}")
    eta = np.asarray(loss.eta)
    t = np.sqrt(eta)
    r = np.sqrt(1.0 - eta)
    ext = np.zeros((2 * n, 2 * n), dtype=complex)
    ext[:n, :n] = u * t[None, :]
    ext[:n, n:] = -u * r[None, :]
    ext[n:, :n] = np.diag(r)
    ext[n:, n:] = np.diag(t)
    return ext


def merge_amplitude_phase(magnitudes: np.ndarray, phase_source: np.ndarray) -> np.ndarray:
    """Combine measured moduli with the phases of a reference matrix.

    Entrywise magnitudes * exp(i * arg(phase_source)); entries where the
    phase reference vanishes keep phase zero.  The result is used as-is,
    without re-unitarization; any global imbalance is absorbed by the final
    renormalization of the output distribution.
    """
    magnitudes = np.asarray(magnitudes, dtype=float)
    phase_source = np.asarray(phase_source, dtype=complex)
    if magnitudes.shape != phase_source.shape:
        raise ValueError("shape mismatch between amplitude and phase matrices")
    if np.any(magnitudes < 0):
        raise ValueError("amplitude entries must be nonnegative")
    return magnitudes * np.exp(1j * np.angle(phase_source))


@dataclass(frozen=True)
class AmplitudeReconstruction:
    """Result of the single-photon count-rate factorization.

    ``amplitudes_sq`` has columns summing to one (relative |U|^2), and
    ``output_scales`` are the relative output transmissivities T_k (detector
    efficiency included), determined up to one global factor.
    """

    amplitudes_sq: np.ndarray
    output_scales: np.ndarray
    input_scales: np.ndarray
    residual: float
    iterations: int


def reconstruct_amplitudes(
    counts: np.ndarray,
    tol: float = 1e-14,
    max_iterations: int = 50000,
) -> AmplitudeReconstruction:
    """Factor a single-photon count matrix as T_k * |U_kj|^2 * I_j.

    Because |U|^2 of a unitary is doubly stochastic, the factorization is
    the Sinkhorn scaling of the count matrix: alternate column and row
    normalizations until the scaled matrix has unit row and column sums.
    Columns of the returned |U|^2 sum to one and the output scales T_k are
    recovered up to a single global factor, fixed here by normalizing their
    mean to one.

    Raises ValueError for counts that are not strictly positive, or that
    fail to converge (rank-deficient or otherwise degenerate data).
    """
    c = np.asarray(counts, dtype=float)
    if c.ndim != 2 or c.shape[0] != c.shape[1]:
        raise ValueError("counts must be a square matrix (outputs x inputs)")
    if np.any(c <= 0) or not np.all(np.isfinite(c)):
        raise ValueError("counts must be strictly positive and finite")
    n = c.shape[0]
    t = np.ones(n)
    residual = np.inf
    iterations = 0
    for iterations in range(1, max_iterations + 1):
        i_scale = (c / t[:, None]).sum(axis=0)
        w = c / t[:, None] / i_scale[None, :]
        row_sums = w.sum(axis=1)
        residual = float(np.max(np.abs(row_sums - 1.0)))
        if residual < tol:
            break
        t = t * row_sums
    if residual > 1e-8:
        raise ValueError(
            f"count matrix did not factor into T |U|^2 I (residual {residual:.2e}); "
            "data is degenerate or inconsistent"
        )
    i_scale = (c / t[:, None]).sum(axis=0)
    w = c / t[:, None] / i_scale[None, :]
    scale = t.mean()
    return AmplitudeReconstruction(
        amplitudes_sq=w,
        output_scales=t / scale,
        input_scales=i_scale * scale,
        residual=residual,
        iterations=iterations,
    )


def unitary_fidelity(recon_sq: np.ndarray, ideal_sq: np.ndarray) -> np.ndarray:
    """Per-input-mode fidelity between two |U|^2 matrices.

    F_j = (sum_k sqrt(recon_kj * ideal_kj))^2 for column-normalized inputs.
    """
    recon_sq = np.asarray(recon_sq, dtype=float)
    ideal_sq = np.asarray(ideal_sq, dtype=float)
    if recon_sq.shape != ideal_sq.shape:
        raise ValueError("shape mismatch")
    for name, m in (("reconstructed", recon_sq), ("ideal", ideal_sq)):
        if np.max(np.abs(m.sum(axis=0) - 1.0)) > 1e-8:
            raise ValueError(f"columns of the {name} matrix must sum to one")
    return np.sum(np.sqrt(recon_sq * ideal_sq), axis=0) ** 2
