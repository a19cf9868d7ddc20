"""Spectral (internal) degrees of freedom of photon pairs.

A pair's joint spectral amplitude (JSA) lives on a shared uniform grid of
angular-frequency detunings, in rad/ps around the filter band center; delays
are in ps.  All many-photon overlap integrals reduce to contractions of the
d x d pair matrices: each permutation term factorizes along the cycles of a
bipartite graph whose vertices are the pair amplitudes (bra and ket side)
and whose edges are the frequency variables, so a term is a product of
traces of d x d matrix products instead of a d^N grid sum.
"""
from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .combinatorics import (
    ModeOccupation,
    Permutation,
    Transversal,
    right_transversal,
    young_subgroup,
)
from .errors import ResourceLimitError

SPEED_OF_LIGHT_NM_PER_PS = 299792.458

MAX_PAIR_COUNT = 4


def fwhm_nm_to_angular(width_nm: float, wavelength_nm: float) -> float:
    """Convert a wavelength FWHM at a carrier wavelength to rad/ps."""
    return 2.0 * np.pi * SPEED_OF_LIGHT_NM_PER_PS * width_nm / wavelength_nm**2


@dataclass(frozen=True)
class FrequencyGrid:
    """Uniform, strictly increasing grid of angular-frequency detunings."""

    points: tuple[float, ...]

    def __post_init__(self):
        if len(self.points) < 2:
            raise ValueError("grid needs at least two points")
        diffs = np.diff(self.points)
        if np.any(diffs <= 0):
            raise ValueError("grid points must be strictly increasing")
        if np.max(np.abs(diffs - diffs[0])) > 1e-9 * abs(diffs[0]):
            raise ValueError("grid must be uniform")

    @classmethod
    def symmetric(cls, size: int, half_span: float) -> "FrequencyGrid":
        return cls(tuple(np.linspace(-half_span, half_span, size)))

    @property
    def size(self) -> int:
        return len(self.points)

    @property
    def weight(self) -> float:
        """Quadrature weight of one point (the grid spacing)."""
        return self.points[1] - self.points[0]

    def as_array(self) -> np.ndarray:
        return np.asarray(self.points)


def grid_for_filters(
    filter_fwhm_nm: float,
    offsets_nm: tuple[float, ...],
    center_wavelength_nm: float,
    size: int = 17,
    span_fwhm: float = 4.0,
) -> FrequencyGrid:
    """Shared grid covering every shifted filter band.

    The half span is ``span_fwhm`` filter bandwidths beyond the outermost
    filter center.  The default of 4 bandwidths on a 17-point grid matches
    the discretization against which the multi-pair normalization factors
    and visibilities were calibrated.
    """
    w = fwhm_nm_to_angular(filter_fwhm_nm, center_wavelength_nm)
    reach = max((abs(fwhm_nm_to_angular(o, center_wavelength_nm)) for o in offsets_nm), default=0.0)
    return FrequencyGrid.symmetric(size, span_fwhm * w + reach)


@dataclass(frozen=True)
class SpectralAmplitude:
    """Two-photon JSA on a shared grid, unit-normalized with the grid weight:
    sum |amps|^2 * weight^2 == 1."""

    grid: FrequencyGrid
    amps: np.ndarray

    def __post_init__(self):
        d = self.grid.size
        if self.amps.shape != (d, d):
            raise ValueError(f"amplitude array must be {d}x{d}")
        norm = np.sum(np.abs(self.amps) ** 2) * self.grid.weight**2
        if abs(norm - 1.0) > 1e-9:
            raise ValueError(f"JSA not normalized (got {norm!r}); use from_amplitudes")

    @classmethod
    def from_amplitudes(cls, grid: FrequencyGrid, raw: np.ndarray) -> "SpectralAmplitude":
        raw = np.asarray(raw, dtype=complex)
        norm = math.sqrt(float(np.sum(np.abs(raw) ** 2))) * grid.weight
        if norm == 0.0:
            raise ValueError("cannot normalize an all-zero amplitude array")
        return cls(grid, raw / norm)

    def weighted(self) -> np.ndarray:
        """Pair matrix with the quadrature weight absorbed (Frobenius norm 1)."""
        return self.amps * self.grid.weight


def build_gaussian_jsa(
    pump_fwhm_nm: float,
    filter_fwhm_nm: float,
    offset_a_nm: float,
    offset_b_nm: float,
    center_wavelength_nm: float,
    grid: FrequencyGrid,
    pump_wavelength_nm: float | None = None,
) -> SpectralAmplitude:
    """Gaussian pump-times-filters model of an SPDC pair amplitude.

    amps(w, w') = pump(w + w') * filterA(w - offsetA) * filterB(w' - offsetB)
    with intensity-FWHM Gaussians.  The pump width is quoted at the
    up-converted pump wavelength (half the photon center wavelength unless
    given explicitly); filter widths and offsets are quoted at the photon
    wavelength.  Warns if more than 1% of the continuum norm falls outside
    the grid.
    """
    if pump_fwhm_nm <= 0 or filter_fwhm_nm <= 0:
        raise ValueError("spectral widths must be positive")
    if pump_wavelength_nm is None:
        pump_wavelength_nm = center_wavelength_nm / 2.0
    w_f = fwhm_nm_to_angular(filter_fwhm_nm, center_wavelength_nm)
    w_p = fwhm_nm_to_angular(pump_fwhm_nm, pump_wavelength_nm)
    c_a = fwhm_nm_to_angular(offset_a_nm, center_wavelength_nm)
    c_b = fwhm_nm_to_angular(offset_b_nm, center_wavelength_nm)
    sig_f = w_f / math.sqrt(8.0 * math.log(2.0))
    sig_p = w_p / math.sqrt(8.0 * math.log(2.0))

    pts = grid.as_array()
    lo, hi = pts[0], pts[-1]
    for c in (c_a, c_b):
        if lo > c - 2.0 * sig_f or hi < c + 2.0 * sig_f:
            raise ValueError("grid must span at least two filter widths around each filter")

    def envelope(w1, w2):
        return np.exp(
            -((w1 + w2) ** 2) / (4.0 * sig_p**2)
            - ((w1 - c_a) ** 2) / (4.0 * sig_f**2)
            - ((w2 - c_b) ** 2) / (4.0 * sig_f**2)
        )

    raw = envelope(pts[:, None], pts[None, :])
    # Truncation check at fixed sampling: extend the grid threefold with the
    # same spacing and compare the captured squared norm.
    h = grid.weight
    extra = len(pts)
    wide = np.concatenate(
        [lo - h * np.arange(extra, 0, -1), pts, hi + h * np.arange(1, extra + 1)]
    )
    captured = float(np.sum(raw**2))
    total = float(np.sum(envelope(wide[:, None], wide[None, :]) ** 2))
    if total > 0 and captured < 0.99 * total:
        warnings.warn(
            f"grid keeps only {captured / total:.1%} of the JSA norm; widen the span",
            stacklevel=2,
        )
    return SpectralAmplitude.from_amplitudes(grid, raw)


def apply_delay(jsa: SpectralAmplitude, axis: str, tau_ps: float) -> SpectralAmplitude:
    """Multiply one frequency axis by the delay phase exp(i*w*tau).

    Pure phase, so the normalization is untouched.
    """
    if axis not in ("first", "second"):
        raise ValueError("axis must be 'first' or 'second'")
    if not np.isfinite(tau_ps):
        raise ValueError("delay must be finite")
    phase = np.exp(1j * jsa.grid.as_array() * tau_ps)
    if axis == "first":
        amps = phase[:, None] * jsa.amps
    else:
        amps = jsa.amps * phase[None, :]
    return SpectralAmplitude(jsa.grid, amps)


def pair_exchange_visibility(jsa: SpectralAmplitude) -> float:
    """Two-photon interference visibility of the pair on a balanced
    beamsplitter: Re sum amps(w,w') * conj(amps(w',w)) with grid weights."""
    a = jsa.weighted()
    return float(np.real(np.sum(a * np.conj(a.T))))


def reduced_spectral_operator(jsa: SpectralAmplitude, axis: str) -> np.ndarray:
    """Single-photon density operator of one photon of the pair, i.e. the
    partial trace of the projector on the JSA over the partner axis."""
    a = jsa.weighted()
    if axis == "first":
        return a @ a.conj().T
    if axis == "second":
        return (a.conj().T @ a).T
    raise ValueError("axis must be 'first' or 'second'")


def heralded_visibility(
    jsa_a: SpectralAmplitude,
    jsa_b: SpectralAmplitude,
    axis_a: str = "second",
    axis_b: str = "second",
) -> float:
    """Overlap Tr(rho_a rho_b) of heralded single-photon spectral states.

    Equals the heralded two-photon interference visibility when the
    heralding projection is spectrally blind.
    """
    if jsa_a.grid != jsa_b.grid:
        raise ValueError("heralded visibility needs both JSAs on the same grid")
    rho_a = reduced_spectral_operator(jsa_a, axis_a)
    rho_b = reduced_spectral_operator(jsa_b, axis_b)
    return float(np.real(np.trace(rho_a @ rho_b)))


def schmidt_power_sums(jsa: SpectralAmplitude, max_power: int) -> tuple[float, ...]:
    """(t_1, ..., t_max) with t_m the m-th power sum of the squared Schmidt
    coefficients; t_1 = 1 by normalization."""
    a = jsa.weighted()
    g = a @ a.conj().T
    sums = []
    m = g
    for _ in range(max_power):
        sums.append(float(np.real(np.trace(m))))
        m = m @ g
    return tuple(sums)


def np_from_power_sums(power_sums: tuple[float, ...], pairs: int) -> float:
    """Multi-pair symmetrization factor N_P from Schmidt power sums.

    N_P = P! * sum over permutations of P elements of the product of
    t_(cycle length) over the permutation's cycles.  A separable pair state
    (all t_m = 1) gives P!^2; the delta-correlated limit (t_m = 0 for
    m >= 2, unreachable on a finite grid but meaningful as input here)
    gives P!.
    """
    if pairs < 0:
        raise ValueError("pair count must be nonnegative")
    if pairs <= 1:
        return 1.0
    if len(power_sums) < pairs:
        raise ValueError(f"need power sums up to order {pairs}")
    total = 0.0
    for perm in itertools.permutations(range(pairs)):
        term = 1.0
        seen = [False] * pairs
        for start in range(pairs):
            if seen[start]:
                continue
            length = 0
            i = start
            while not seen[i]:
                seen[i] = True
                i = perm[i]
                length += 1
            term *= power_sums[length - 1]
        total += term
    return math.factorial(pairs) * total


def normalization_np(jsa: SpectralAmplitude, pairs: int, max_pairs: int = MAX_PAIR_COUNT) -> float:
    """N_P for P identical pairs with this JSA; lies in [P!, P!^2]."""
    if pairs > max_pairs:
        raise ResourceLimitError(f"pair count {pairs} exceeds the cap of {max_pairs}")
    if pairs <= 1:
        return 1.0
    return np_from_power_sums(schmidt_power_sums(jsa, pairs), pairs)


# ---------------------------------------------------------------------------
# Multi-pair product states and the reduced external density matrix
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PairProductState:
    """Tensor product of pair amplitudes, each injected into a mode pair.

    ``pairs[i]`` is (JSA, (mode of photon 1, mode of photon 2)); the first
    ``p_count`` pairs come from the first source, the remaining ``q_count``
    from the second.  Delays and other per-channel phases are expected to be
    baked into the JSAs via :func:`apply_delay`.
    """

    pairs: tuple[tuple[SpectralAmplitude, tuple[int, int]], ...]
    p_count: int
    q_count: int

    def __post_init__(self):
        if self.p_count + self.q_count != len(self.pairs):
            raise ValueError("pair counts do not match the pair list")

    @property
    def photon_count(self) -> int:
        return 2 * len(self.pairs)

    def occupation(self, mode_count: int) -> ModeOccupation:
        counts = [0] * mode_count
        for _, (m1, m2) in self.pairs:
            counts[m1 - 1] += 1
            counts[m2 - 1] += 1
        return ModeOccupation(tuple(counts))


class OverlapEngine:
    """Caches the permutation-overlap table G for one pair-product state.

    G(p) is the overlap of the product amplitude with itself under a
    permutation p of the photon slots; every entry of the external density
    matrix is a double Young-subgroup average of G values.
    """

    def __init__(self, state: PairProductState, occupation: ModeOccupation):
        if state.occupation(occupation.mode_count) != occupation:
            raise ValueError("pair-product state does not realize the occupation")
        n = state.photon_count
        # Assign each photon a slot in the canonical (sorted) assignment
        # list; ties broken by pair index so the layout is reproducible.
        photons = []
        for pair_idx, (_, (m1, m2)) in enumerate(state.pairs):
            photons.append((m1, pair_idx, 0))
            photons.append((m2, pair_idx, 1))
        order = sorted(range(n), key=lambda k: photons[k])
        slot_of_photon = [0] * n
        for slot, k in enumerate(order):
            slot_of_photon[k] = slot
        self.pair_slots = [
            (slot_of_photon[2 * i], slot_of_photon[2 * i + 1])
            for i in range(len(state.pairs))
        ]
        self.pair_mats = [jsa.weighted() for jsa, _ in state.pairs]
        self.photon_count = n
        self._table: dict[tuple[int, ...], complex] = {}

    def overlap(self, perm: tuple[int, ...]) -> complex:
        """G(perm) for a 0-based permutation tuple of the photon slots."""
        cached = self._table.get(perm)
        if cached is None:
            cached = self._contract(perm)
            self._table[perm] = cached
        return cached

    def _contract(self, perm: tuple[int, ...]) -> complex:
        """Trace out the permuted product amplitude along its index cycles.

        Each frequency index joins one ket-side and one bra-side pair
        matrix; following those links yields disjoint cycles, and each cycle
        contributes the trace of the corresponding matrix product (with a
        transpose whenever a matrix is entered through its column slot).
        """
        ket_at = {}
        bra_at = {}
        for i, (s1, s2) in enumerate(self.pair_slots):
            ket_at[s1] = (i, 0)
            ket_at[s2] = (i, 1)
            bra_at[perm[s1]] = (i, 0)
            bra_at[perm[s2]] = (i, 1)
        visited = [False] * self.photon_count
        value = 1.0 + 0.0j
        for start in range(self.photon_count):
            if visited[start]:
                continue
            product = None
            v = start
            while True:
                i, side = ket_at[v]
                s1, s2 = self.pair_slots[i]
                nxt = s2 if side == 0 else s1
                mat = self.pair_mats[i] if side == 0 else self.pair_mats[i].T
                product = mat if product is None else product @ mat
                visited[v] = True
                j, side = bra_at[nxt]
                t1, t2 = self.pair_slots[j]
                nxt2 = perm[t2] if side == 0 else perm[t1]
                mat = np.conj(self.pair_mats[j]) if side == 0 else np.conj(self.pair_mats[j]).T
                product = product @ mat
                visited[nxt] = True
                v = nxt2
                if v == start:
                    break
            value *= np.trace(product)
        return complex(value)


def _as_zero_based(perm: Permutation) -> tuple[int, ...]:
    return tuple(t - 1 for t in perm.mapping)


def _compose0(x: tuple[int, ...], y: tuple[int, ...]) -> tuple[int, ...]:
    return tuple(x[i] for i in y)


def _invert0(x: tuple[int, ...]) -> tuple[int, ...]:
    inv = [0] * len(x)
    for i, t in enumerate(x):
        inv[t] = i
    return tuple(inv)


@dataclass(frozen=True)
class ExternalDensityMatrix:
    """Reduced state of the photons' mode labels in the transversal basis.

    Entry (mu, nu) is the internal-state overlap of the orderings induced by
    transversal representatives mu and nu, divided by the coset count; the
    matrix is Hermitian, positive semidefinite, has unit trace, and every
    diagonal entry equals 1/size.
    """

    transversal: Transversal
    entries: np.ndarray

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def validate(self, herm_tol: float = 1e-12, eig_floor: float = -1e-10, trace_tol: float = 1e-10):
        dev = float(np.max(np.abs(self.entries - self.entries.conj().T)))
        if dev > herm_tol:
            raise ValueError(f"density matrix not Hermitian (deviation {dev:.2e})")
        trace = float(np.real(np.trace(self.entries)))
        if abs(trace - 1.0) > trace_tol:
            raise ValueError(f"density matrix trace {trace!r} != 1")
        lowest = float(np.min(np.linalg.eigvalsh(self.entries)))
        if lowest < eig_floor:
            raise ValueError(f"density matrix has negative eigenvalue {lowest:.2e}")


class _OverlapAverager:
    """Young-subgroup double average of G values, cached per coset offset."""

    def __init__(self, engine: OverlapEngine, occupation: ModeOccupation):
        self.engine = engine
        subgroup = young_subgroup(occupation)
        self.group0 = [_as_zero_based(p) for p in subgroup]
        self.group0_inv = [_invert0(p) for p in self.group0]
        self.norm = len(self.group0) * sum(
            self.engine.overlap(xi) for xi in self.group0
        )
        self._cache: dict[tuple[int, ...], complex] = {}

    def averaged(self, offset: tuple[int, ...]) -> complex:
        """sum over xi, xi' in S_R of G(xi^-1 offset xi') / norm."""
        cached = self._cache.get(offset)
        if cached is not None:
            return cached
        total = 0.0 + 0.0j
        for xi_inv in self.group0_inv:
            left = _compose0(xi_inv, offset)
            for xi2 in self.group0:
                total += self.engine.overlap(_compose0(left, xi2))
        value = total / self.norm
        self._cache[offset] = value
        return value


def internal_overlap(
    state: PairProductState,
    occupation: ModeOccupation,
    mu: Permutation,
    nu: Permutation,
    engine: OverlapEngine | None = None,
) -> complex:
    """Overlap of the symmetrized internal states attached to two particle
    orderings mu and nu (transversal representatives for the occupation).

    The self-overlap (mu == nu) is 1 by construction.
    """
    if engine is None:
        engine = OverlapEngine(state, occupation)
    averager = _OverlapAverager(engine, occupation)
    offset = _compose0(_as_zero_based(mu), _invert0(_as_zero_based(nu)))
    return averager.averaged(offset)


def external_density_matrix(
    state: PairProductState,
    occupation: ModeOccupation,
    max_photons: int = 8,
    max_transversal: int = 1000,
) -> ExternalDensityMatrix:
    """Assemble the reduced external density matrix over the transversal.

    All entries reuse one cached overlap table; the double Young-subgroup
    average depends only on mu nu^-1, which keeps the assembly at
    O(|S_N| + |Sigma|^2) table lookups.
    """
    n = state.photon_count
    if n != occupation.photon_count:
        raise ValueError("photon number of state and occupation differ")
    if n > max_photons:
        raise ResourceLimitError(f"{n} photons exceed the cap of {max_photons}")
    transversal = right_transversal(occupation, max_photons=max_photons)
    if transversal.size > max_transversal:
        raise ResourceLimitError(
            f"transversal size {transversal.size} exceeds the cap of {max_transversal}"
        )
    engine = OverlapEngine(state, occupation)
    averager = _OverlapAverager(engine, occupation)
    reps0 = [_as_zero_based(p) for p in transversal.representatives]
    reps0_inv = [_invert0(p) for p in reps0]
    dim = transversal.size
    entries = np.zeros((dim, dim), dtype=complex)
    for a in range(dim):
        for b in range(a, dim):
            value = averager.averaged(_compose0(reps0[a], reps0_inv[b])) / dim
            entries[a, b] = value
            entries[b, a] = np.conj(value)
    return ExternalDensityMatrix(transversal, entries)


def check_symmetry(rho: ExternalDensityMatrix, mode_perm: Permutation) -> float:
    """Max-norm of the commutator of rho with a mode permutation.

    The permutation acts entrywise on the assignment lists indexing the
    transversal basis; a vanishing commutator certifies the hypothesis of
    the suppression law for this input state.
    """
    lists = rho.transversal.assignment_lists
    dim = len(lists)
    permuted_index = []
    for L in lists:
        image = tuple(mode_perm(m) for m in L)
        try:
            permuted_index.append(rho.transversal.index_of(image))
        except KeyError:
            raise ValueError(
                "occupation is not invariant under the mode permutation; "
                "the induced action on assignment lists is undefined"
            ) from None
    p_mat = np.zeros((dim, dim))
    for src, dst in enumerate(permuted_index):
        p_mat[dst, src] = 1.0
    comm = p_mat @ rho.entries - rho.entries @ p_mat
    return float(np.max(np.abs(comm)))
