"""Brute-force reference implementations for validating the fast engine.

These deliberately avoid the transversal reduction and the cycle-contraction
shortcut: the full oracle symmetrizes over every particle ordering of S_N
and evaluates overlap integrals by generic tensor contraction, and the dense
oracle sums overlap integrands over the full N-dimensional frequency grid.
Slow is fine here; agreement is the point.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import asdict, dataclass

import numpy as np

from .combinatorics import (
    ModeOccupation,
    Permutation,
    assignment_from_occupation,
    right_transversal,
)
from .errors import ResourceLimitError
from .interference import (
    SCENARIOS,
    build_pair_product_state,
    scenario_delays,
    transition_probability,
)
from .source import ChannelWiring, SourceParams
from .spectral import (
    FrequencyGrid,
    OverlapEngine,
    PairProductState,
    SpectralAmplitude,
    external_density_matrix,
    internal_overlap,
)
from .unitary import jx_unitary

_LETTERS = "abcdefghijkl"


def _raw_layout(state: PairProductState):
    """Photon slots in plain pair order: pair i owns slots (2i, 2i+1)."""
    slots = [(2 * i, 2 * i + 1) for i in range(len(state.pairs))]
    modes = []
    for _, (m1, m2) in state.pairs:
        modes.extend([m1, m2])
    mats = [jsa.weighted() for jsa, _ in state.pairs]
    return slots, tuple(modes), mats


def _overlap_einsum(mats, slots, perm: tuple[int, ...]) -> complex:
    """Overlap of the product amplitude with its slot permutation, evaluated
    by letting einsum contract the full index network."""
    subscripts = []
    operands = []
    for mat, (s1, s2) in zip(mats, slots):
        subscripts.append(_LETTERS[s1] + _LETTERS[s2])
        operands.append(mat)
    for mat, (s1, s2) in zip(mats, slots):
        subscripts.append(_LETTERS[perm[s1]] + _LETTERS[perm[s2]])
        operands.append(np.conj(mat))
    return complex(np.einsum(",".join(subscripts) + "->", *operands, optimize="greedy"))


def transition_probability_full(
    state: PairProductState,
    unitary: np.ndarray,
    occupation_in: ModeOccupation,
    occupation_out: ModeOccupation,
) -> float:
    """Input-output probability via the double sum over all of S_N.

    No Young-subgroup reduction: both the state normalization and the
    output projection run over every particle ordering, with the internal
    overlaps taken between permuted product amplitudes.
    """
    photons = state.photon_count
    if photons > 6:
        raise ResourceLimitError("full-permutation oracle is capped at 6 photons")
    if occupation_in.photon_count != photons or occupation_out.photon_count != photons:
        raise ValueError("photon numbers do not match")
    if state.occupation(occupation_in.mode_count) != occupation_in:
        raise ValueError("state does not realize the input occupation")
    slots, in_modes, mats = _raw_layout(state)
    perms = list(itertools.permutations(range(photons)))
    index = {p: i for i, p in enumerate(perms)}
    overlaps = np.array([_overlap_einsum(mats, slots, p) for p in perms])

    inverse = [tuple(np.argsort(p)) for p in perms]
    compose_idx = np.empty((len(perms), len(perms)), dtype=np.int32)
    for i, p in enumerate(perms):
        for j, q_inv in enumerate(inverse):
            compose_idx[i, j] = index[tuple(p[k] for k in q_inv)]
    gram = overlaps[compose_idx]

    stabilizer = [
        p for p in perms if all(in_modes[p[i]] == in_modes[i] for i in range(photons))
    ]
    norm = math.factorial(photons) * sum(overlaps[index[p]] for p in stabilizer)

    out_modes = assignment_from_occupation(occupation_out).modes
    amp = np.array(
        [
            np.prod([unitary[out_modes[a] - 1, in_modes[p[a]] - 1] for a in range(photons)])
            for p in perms
        ]
    )
    s_factor = math.factorial(photons)
    for c in occupation_out.counts:
        s_factor //= math.factorial(c)
    value = complex(amp @ gram @ np.conj(amp)) / norm
    return float(s_factor * value.real)


def dense_overlap(
    state: PairProductState,
    occupation: ModeOccupation,
    mu: Permutation,
    nu: Permutation,
    max_points: int = 10_000_000,
) -> complex:
    """Internal-state overlap by direct summation on the N-dimensional grid.

    Builds the symmetrized coefficient tensor explicitly, so it is limited
    to small grids (d^N capped at ten million points).
    """
    photons = state.photon_count
    d = state.pairs[0][0].grid.size
    if d**photons > max_points:
        raise ResourceLimitError(f"dense grid of {d}^{photons} points exceeds the cap")

    # Same canonical slot convention as the engine (sorted by mode, ties by
    # pair), recomputed here from scratch.
    photon_keys = []
    for pair_idx, (_, (m1, m2)) in enumerate(state.pairs):
        photon_keys.append((m1, pair_idx, 0))
        photon_keys.append((m2, pair_idx, 1))
    order = sorted(range(photons), key=lambda k: photon_keys[k])
    slot_of_photon = {k: s for s, k in enumerate(order)}
    subscripts = []
    operands = []
    for pair_idx, (jsa, _) in enumerate(state.pairs):
        s1 = slot_of_photon[2 * pair_idx]
        s2 = slot_of_photon[2 * pair_idx + 1]
        subscripts.append(_LETTERS[s1] + _LETTERS[s2])
        operands.append(jsa.weighted())
    output = _LETTERS[:photons]
    product = np.einsum(",".join(subscripts) + "->" + output, *operands)

    sorted_modes = assignment_from_occupation(occupation).modes
    symmetrized = np.zeros_like(product)
    for perm in itertools.permutations(range(photons)):
        if all(sorted_modes[perm[i]] == sorted_modes[i] for i in range(photons)):
            symmetrized += np.transpose(product, axes=perm)
    norm_sq = float(np.sum(np.abs(symmetrized) ** 2))
    coeff = symmetrized / math.sqrt(norm_sq)

    nu_inv = nu.inverse()
    offset = tuple(mu.mapping[nu_inv.mapping[i] - 1] - 1 for i in range(photons))
    return complex(np.sum(coeff * np.conj(np.transpose(coeff, axes=offset))))


def classical_permanent(
    u_sq: np.ndarray, occupation_in: ModeOccupation, occupation_out: ModeOccupation
) -> float:
    """Distinguishable-particle transition probability.

    Permanent (by Ryser's inclusion-exclusion) of the |U|^2 submatrix with
    rows repeated per output photon and columns per input photon, divided by
    the output multiplicities.
    """
    photons = occupation_in.photon_count
    if photons != occupation_out.photon_count:
        raise ValueError("photon numbers do not match")
    if photons > 8:
        raise ResourceLimitError("permanent oracle capped at 8 photons")
    rows = [m - 1 for m in assignment_from_occupation(occupation_out).modes]
    cols = [m - 1 for m in assignment_from_occupation(occupation_in).modes]
    matrix = np.asarray(u_sq, dtype=float)[np.ix_(rows, cols)]
    denom = 1
    for c in occupation_out.counts:
        denom *= math.factorial(c)
    return _ryser(matrix) / denom


def _ryser(matrix: np.ndarray) -> float:
    n = matrix.shape[0]
    if n == 0:
        return 1.0
    total = 0.0
    for mask in range(1, 1 << n):
        col_sum = np.zeros(n, dtype=matrix.dtype)
        m = mask
        j = 0
        while m:
            if m & 1:
                col_sum += matrix[:, j]
            m >>= 1
            j += 1
        sign = -1 if (bin(mask).count("1") & 1) else 1
        total += sign * float(np.prod(col_sum))
    return total if n % 2 == 0 else -total


@dataclass(frozen=True)
class OracleReport:
    """Summary of a fast-path validation sweep."""

    max_abs_diff: float
    worst_case: str
    cases_checked: int

    def to_dict(self) -> dict:
        return asdict(self)


def validate_fast_path(
    source: SourceParams,
    wiring: ChannelWiring,
    distinguishing_delay: float,
    random_cases: int = 100,
    seed: int = 2024,
    dense_grid_size: int = 5,
) -> OracleReport:
    """Compare the coset engine against the independent oracles.

    Covers the four scenarios of the seven-mode lattice for every
    four-photon input and output occupation, randomized (unitary, JSA)
    cases at four photons on up to five modes, and the dense-grid check of
    the cycle-contraction overlaps on a small grid.
    """
    worst = 0.0
    worst_case = "none"
    checked = 0

    def consider(diff: float, description: str):
        nonlocal worst, worst_case, checked
        checked += 1
        if diff > worst:
            worst = diff
            worst_case = description

    u7 = jx_unitary(7)
    pair_setups = [(2, 0), (1, 1), (0, 2)]
    for scenario in SCENARIOS:
        delays = scenario_delays(scenario, distinguishing_delay)
        for p_count, q_count in pair_setups:
            state = build_pair_product_state(source, p_count, q_count, wiring, delays)
            occ_in = state.occupation(7)
            rho = external_density_matrix(state, occ_in)
            for counts in _occupations(7, 4):
                occ_out = ModeOccupation(counts)
                fast = transition_probability(rho, u7, occ_in, occ_out)
                full = transition_probability_full(state, u7, occ_in, occ_out)
                consider(
                    abs(fast - full),
                    f"scenario={scenario} R={occ_in.counts} S={counts}",
                )

    rng = np.random.default_rng(seed)
    grid = FrequencyGrid.symmetric(7, 5.0)
    for case in range(random_cases):
        n = int(rng.integers(4, 6))
        u = _haar_unitary(n, rng)
        jsas = [_random_jsa(grid, rng) for _ in range(2)]
        mode_pairs = []
        for _ in range(2):
            pick = rng.choice(n, size=2, replace=bool(rng.integers(0, 2)))
            mode_pairs.append((int(pick[0]) + 1, int(pick[1]) + 1))
        state = PairProductState(
            ((jsas[0], mode_pairs[0]), (jsas[1], mode_pairs[1])), 1, 1
        )
        occ_in = state.occupation(n)
        rho = external_density_matrix(state, occ_in)
        for counts in _occupations(n, 4):
            occ_out = ModeOccupation(counts)
            fast = transition_probability(rho, u, occ_in, occ_out)
            full = transition_probability_full(state, u, occ_in, occ_out)
            consider(abs(fast - full), f"random case {case} R={occ_in.counts} S={counts}")

    dense_grid = FrequencyGrid.symmetric(dense_grid_size, 4.0)
    for case in range(3):
        jsas = [_random_jsa(dense_grid, rng) for _ in range(2)]
        modes = [(1, 2), (3, 4)] if case == 0 else [(1, 2), (1, 2)]
        state = PairProductState(((jsas[0], modes[0]), (jsas[1], modes[1])), 1, 1)
        occ = state.occupation(4)
        transversal = right_transversal(occ)
        engine = OverlapEngine(state, occ)
        for a, mu in enumerate(transversal.representatives):
            for b, nu in enumerate(transversal.representatives):
                fast = internal_overlap(state, occ, mu, nu, engine=engine)
                dense = dense_overlap(state, occ, mu, nu)
                consider(
                    abs(fast - dense),
                    f"dense case {case} entry ({a},{b}) R={occ.counts}",
                )

    return OracleReport(max_abs_diff=worst, worst_case=worst_case, cases_checked=checked)


def _occupations(mode_count: int, photons: int):
    for combo in itertools.combinations_with_replacement(range(mode_count), photons):
        counts = [0] * mode_count
        for m in combo:
            counts[m] += 1
        yield tuple(counts)


def _haar_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))[None, :]


def _random_jsa(grid: FrequencyGrid, rng: np.random.Generator) -> SpectralAmplitude:
    raw = rng.normal(size=(grid.size, grid.size)) + 1j * rng.normal(size=(grid.size, grid.size))
    return SpectralAmplitude.from_amplitudes(grid, raw)
