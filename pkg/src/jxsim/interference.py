"""Input-output statistics of the lossy lattice: transition probabilities via
the transversal-reduced density matrix, detector-pattern aggregation, the
suppression-law bookkeeping, and simulated delay scans.
"""
from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .combinatorics import ModeOccupation, assignment_from_occupation
from .errors import ConfigError
from .source import ChannelWiring, InputStateRecord, SourceParams, enumerate_input_states
from .spectral import (
    ExternalDensityMatrix,
    PairProductState,
    SpectralAmplitude,
    apply_delay,
    external_density_matrix,
)
from .unitary import LossConfig, extend_with_loss

SCENARIOS = (
    "mutually-indistinguishable",
    "inter-cycle",
    "intra-cycle",
    "mutually-distinguishable",
)

DetectorPattern = tuple[int, ...]

NEGATIVE_CLAMP = -1e-12
IMAG_TOL = 1e-12
UNITARY_SUM_TOL = 1e-9


def is_suppressed(occupation: ModeOccupation) -> bool:
    """Suppression-law flag: odd total photon number in the even modes.

    Defined for an odd mode count, where the mirror axis passes through the
    central mode.
    """
    if occupation.mode_count % 2 == 0:
        raise ValueError("the mirror suppression law needs an odd mode count")
    return sum(occupation.counts[1::2]) % 2 == 1


def pattern_is_suppressed(pattern: DetectorPattern) -> bool:
    """Same flag for a detector pattern (collision-free reading)."""
    return sum(1 for m in pattern if m % 2 == 0) % 2 == 1


def collision_free_patterns(mode_count: int, photons: int):
    """All detector patterns of ``photons`` distinct fired modes."""
    return itertools.combinations(range(1, mode_count + 1), photons)


def count_suppressed_patterns(mode_count: int, photons: int) -> tuple[int, int]:
    """(number of suppressed, total) collision-free patterns."""
    if photons > mode_count:
        raise ValueError("more photons than modes has no collision-free pattern")
    if mode_count % 2 == 0:
        raise ValueError("the mirror suppression law needs an odd mode count")
    suppressed = 0
    total = 0
    for pattern in collision_free_patterns(mode_count, photons):
        total += 1
        if pattern_is_suppressed(pattern):
            suppressed += 1
    return suppressed, total


def transition_probability(
    rho: ExternalDensityMatrix,
    unitary: np.ndarray,
    occupation_in: ModeOccupation,
    occupation_out: ModeOccupation,
) -> float:
    """Probability of scattering the input occupation into the output one.

    Quadratic form of the external density matrix with the product
    amplitudes of every inequivalent particle ordering, times the output
    multinomial factor.  The imaginary residue must stay below 1e-12 and
    small negative round-off is clamped to zero.
    """
    n_in = occupation_in.photon_count
    if n_in != occupation_out.photon_count:
        raise ValueError("photon numbers of input and output occupations differ")
    amps = _ordering_amplitudes(rho, unitary, occupation_out)
    value = complex(amps @ rho.entries @ np.conj(amps))
    if abs(value.imag) > IMAG_TOL:
        raise ValueError(f"transition probability has imaginary residue {value.imag:.2e}")
    p = _output_factor(occupation_out) * value.real
    if p < NEGATIVE_CLAMP:
        raise ValueError(f"transition probability {p:.2e} below round-off floor")
    return max(p, 0.0)


def _output_factor(occupation: ModeOccupation) -> float:
    denom = 1
    for c in occupation.counts:
        denom *= math.factorial(c)
    return math.factorial(occupation.photon_count) / denom


def _ordering_amplitudes(
    rho: ExternalDensityMatrix, unitary: np.ndarray, occupation_out: ModeOccupation
) -> np.ndarray:
    out_modes = np.asarray(assignment_from_occupation(occupation_out).modes) - 1
    in_lists = np.asarray(rho.transversal.assignment_lists) - 1
    gathered = unitary[out_modes[None, :], in_lists]
    return gathered.prod(axis=1)


def scenario_delays(scenario: str, tau: float) -> dict[str, float]:
    """Per-channel delays realizing one of the four distinguishability
    scenarios; tau must exceed the photons' coherence time."""
    if scenario == "mutually-indistinguishable":
        return {"a": 0.0, "b": 0.0, "c": 0.0, "d": 0.0}
    if scenario == "inter-cycle":
        return {"a": 0.0, "b": 0.0, "c": tau, "d": tau}
    if scenario == "intra-cycle":
        return {"a": 0.0, "b": tau, "c": 0.0, "d": tau}
    if scenario == "mutually-distinguishable":
        return {"a": 0.0, "b": tau, "c": 2.0 * tau, "d": 3.0 * tau}
    raise ConfigError(f"unknown scenario {scenario!r}; expected one of {SCENARIOS}")


def build_pair_product_state(
    source: SourceParams,
    p_count: int,
    q_count: int,
    wiring: ChannelWiring,
    delays: dict[str, float],
) -> PairProductState:
    """P pairs of source 1 plus Q pairs of source 2 with channel delays
    applied as spectral phases."""

    def delayed(jsa: SpectralAmplitude, ch1: str, ch2: str) -> SpectralAmplitude:
        out = apply_delay(jsa, "first", delays.get(ch1, 0.0))
        return apply_delay(out, "second", delays.get(ch2, 0.0))

    pairs = []
    ab = delayed(source.jsa_ab, "a", "b")
    cd = delayed(source.jsa_cd, "c", "d")
    for _ in range(p_count):
        pairs.append((ab, (wiring.a, wiring.b)))
    for _ in range(q_count):
        pairs.append((cd, (wiring.c, wiring.d)))
    return PairProductState(tuple(pairs), p_count, q_count)


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything the pipeline needs for one run.

    ``unitary`` is the bare n x n network matrix (ideal or amplitude-merged);
    loss ancillas are appended internally.  ``detection`` holds the relative
    output transmissivity times detector efficiency per real output mode.
    ``distinguishing_delay`` is the per-step channel delay (ps) used by the
    asymmetric scenarios.
    """

    unitary: np.ndarray
    loss: LossConfig
    source: SourceParams
    wiring: ChannelWiring
    scenario: str
    detection: tuple[float, ...]
    distinguishing_delay: float
    max_transversal: int = 1000

    def __post_init__(self):
        n = self.unitary.shape[0]
        if self.unitary.shape != (n, n):
            raise ConfigError("network matrix must be square")
        if len(self.loss.eta) != n or len(self.detection) != n:
            raise ConfigError("loss and detection vectors must match the mode count")
        if self.scenario not in SCENARIOS:
            raise ConfigError(f"unknown scenario {self.scenario!r}")
        if max(self.wiring.channels) > n:
            raise ConfigError("wiring targets a mode beyond the network size")

    @property
    def mode_count(self) -> int:
        return self.unitary.shape[0]


@dataclass(frozen=True)
class OutputDistribution:
    """Detector-pattern probabilities with the per-input-state breakdown."""

    fold: int
    mode_count: int
    probabilities: dict[DetectorPattern, float]
    contributions: dict[DetectorPattern, dict[str, float]]
    labels: tuple[str, ...]
    background_labels: tuple[str, ...]
    raw_weight: float
    detection: tuple[float, ...] = field(default=())

    @property
    def patterns(self) -> tuple[DetectorPattern, ...]:
        return tuple(self.probabilities)


def degree_of_violation(dist: OutputDistribution) -> float:
    """Fraction of reported events on ideally suppressed patterns."""
    total = sum(dist.probabilities.values())
    if total <= 0.0:
        raise ValueError("distribution carries no probability")
    forbidden = sum(
        p for pattern, p in dist.probabilities.items() if pattern_is_suppressed(pattern)
    )
    return forbidden / total


def background_fraction(dist: OutputDistribution) -> float:
    """Share of the reported events fed by higher photon numbers than the
    reported fold (loss and collision background)."""
    total = sum(dist.probabilities.values())
    if total <= 0.0:
        raise ValueError("distribution carries no probability")
    bg = sum(
        sum(contrib.get(label, 0.0) for label in dist.background_labels)
        for contrib in dist.contributions.values()
    )
    return bg / total


def distribution_fidelity(p, q) -> float:
    """Classical (Bhattacharyya) fidelity of two pattern distributions.

    Accepts OutputDistribution objects or plain pattern->probability dicts;
    missing patterns count as zero.
    """
    pp = p.probabilities if isinstance(p, OutputDistribution) else dict(p)
    qq = q.probabilities if isinstance(q, OutputDistribution) else dict(q)
    support = set(pp) | set(qq)
    return float(sum(math.sqrt(pp.get(s, 0.0) * qq.get(s, 0.0)) for s in support) ** 2)


def simulate_experiment(cfg: ExperimentConfig, threads: int = 1) -> OutputDistribution:
    """Fourfold coincidence statistics of the configured experiment."""
    return _run_pipeline(cfg, fold=4, threads=threads)


def twofold_distribution(cfg: ExperimentConfig, threads: int = 1) -> OutputDistribution:
    """Twofold coincidence statistics, including the four- and six-photon
    loss background."""
    return _run_pipeline(cfg, fold=2, threads=threads)


def _run_pipeline(cfg: ExperimentConfig, fold: int, threads: int = 1) -> OutputDistribution:
    n = cfg.mode_count
    extended = extend_with_loss(cfg.unitary, cfg.loss)
    unitary_input = _is_unitary(cfg.unitary)
    delays = scenario_delays(cfg.scenario, cfg.distinguishing_delay)
    photon_numbers = tuple(
        k for k in range(fold, cfg.source.max_photons + 1, 2) if k >= fold
    )
    records = enumerate_input_states(
        cfg.source, cfg.wiring, photon_numbers=photon_numbers, mode_count=n
    )

    def run(record: InputStateRecord) -> dict[DetectorPattern, float]:
        return _patterns_for_input(cfg, extended, delays, record, check_total=unitary_input)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run, records))
    else:
        results = [run(r) for r in records]

    labels = tuple(r.label for r in records)
    background = tuple(r.label for r in records if r.photon_count > fold)
    totals: dict[DetectorPattern, float] = {}
    contribs: dict[DetectorPattern, dict[str, float]] = {}
    for record, per_pattern in zip(records, results):
        for pattern, p in per_pattern.items():
            weighted = record.p_gen * p
            totals[pattern] = totals.get(pattern, 0.0) + weighted
            contribs.setdefault(pattern, {})[record.label] = (
                contribs.get(pattern, {}).get(record.label, 0.0) + weighted
            )

    # Detector model: a pattern needs one click per fired mode, so its raw
    # weight is damped by the product of the fired modes' detection factors.
    reported = {}
    for pattern in sorted(totals):
        if len(pattern) != fold:
            continue
        gain = math.prod(cfg.detection[m - 1] for m in pattern)
        reported[pattern] = totals[pattern] * gain
    raw_weight = sum(reported.values())
    if raw_weight <= 0.0:
        raise ValueError("no probability mass on the requested coincidence fold")
    probabilities = {pat: p / raw_weight for pat, p in reported.items()}
    contributions = {}
    for pattern in probabilities:
        gain = math.prod(cfg.detection[m - 1] for m in pattern)
        contributions[pattern] = {
            label: contribs[pattern].get(label, 0.0) * gain / raw_weight
            for label in labels
            if contribs[pattern].get(label, 0.0) != 0.0
        }
    return OutputDistribution(
        fold=fold,
        mode_count=n,
        probabilities=probabilities,
        contributions=contributions,
        labels=labels,
        background_labels=background,
        raw_weight=raw_weight,
        detection=cfg.detection,
    )


def _is_unitary(matrix: np.ndarray) -> bool:
    n = matrix.shape[0]
    return float(np.max(np.abs(matrix.conj().T @ matrix - np.eye(n)))) < 1e-9


def _patterns_for_input(
    cfg: ExperimentConfig,
    extended: np.ndarray,
    delays: dict[str, float],
    record: InputStateRecord,
    check_total: bool,
) -> dict[DetectorPattern, float]:
    """Exact pattern probabilities for one emission record (unit weight)."""
    n = cfg.mode_count
    p_count, q_count = record.pair_counts
    state = build_pair_product_state(cfg.source, p_count, q_count, cfg.wiring, delays)
    rho = external_density_matrix(
        state, record.mode_occupation, max_transversal=cfg.max_transversal
    )
    photons = record.photon_count

    # Outputs live on the real modes plus the ancillas fed by occupied
    # inputs; ancilla n+j can hold at most as many photons as entered mode j.
    real_caps = [photons] * n
    ancilla_modes = [
        j for j in range(1, n + 1) if record.mode_occupation.counts[j - 1] > 0
    ]
    ancilla_caps = [record.mode_occupation.counts[j - 1] for j in ancilla_modes]
    occupations = _bounded_occupations(real_caps + ancilla_caps, photons)

    in_lists = np.asarray(rho.transversal.assignment_lists) - 1
    dim = in_lists.shape[0]
    out_lists = np.empty((len(occupations), photons), dtype=int)
    factors = np.empty(len(occupations))
    mode_ids = list(range(1, n + 1)) + [n + j for j in ancilla_modes]
    for row, occ in enumerate(occupations):
        assignment = []
        denom = 1
        for mode, c in zip(mode_ids, occ):
            assignment.extend([mode - 1] * c)
            denom *= math.factorial(c)
        out_lists[row] = assignment
        factors[row] = math.factorial(photons) / denom

    probs = np.empty(len(occupations))
    chunk = max(1, int(2_000_000 // max(dim * photons, 1)))
    for start in range(0, len(occupations), chunk):
        stop = min(start + chunk, len(occupations))
        gathered = extended[out_lists[start:stop, None, :], in_lists[None, :, :]]
        amps = gathered.prod(axis=2)
        probs[start:stop] = np.real(
            np.einsum("cs,st,ct->c", amps, rho.entries, np.conj(amps))
        )
    probs *= factors
    total = float(probs.sum())
    if check_total and abs(total - 1.0) > UNITARY_SUM_TOL:
        raise AssertionError(
            f"probabilities over all outputs sum to {total!r} for input {record.label}"
        )

    patterns: dict[DetectorPattern, float] = {}
    for occ, p in zip(occupations, probs):
        if p <= 0.0:
            continue
        fired = tuple(j for j in range(1, n + 1) if occ[j - 1] > 0)
        patterns[fired] = patterns.get(fired, 0.0) + float(p)
    return patterns


def _bounded_occupations(caps: list[int], photons: int) -> list[tuple[int, ...]]:
    """All occupation tuples with per-slot caps summing to the photon count."""
    results: list[tuple[int, ...]] = []

    def rec(idx: int, left: int, current: list[int]):
        if idx == len(caps):
            if left == 0:
                results.append(tuple(current))
            return
        remaining_cap = sum(caps[idx:])
        if left > remaining_cap:
            return
        for k in range(min(caps[idx], left) + 1):
            current.append(k)
            rec(idx + 1, left - k, current)
            current.pop()

    rec(0, photons, [])
    return results


def hom_scan(
    cfg: ExperimentConfig,
    channel: str,
    taus,
    watch_pattern: DetectorPattern,
) -> list[tuple[float, float]]:
    """Two-photon interference scan: probability of one coincidence pattern
    versus the delay applied to a single channel.

    Uses the bare (lossless) network with the single pair that feeds the
    scanned channel; the large-delay limit is the distinguishable-photon
    probability.
    """
    if channel not in "abcd" or len(channel) != 1:
        raise ConfigError(f"unknown channel {channel!r}")
    pair_is_ab = channel in ("a", "b")
    modes = (cfg.wiring.a, cfg.wiring.b) if pair_is_ab else (cfg.wiring.c, cfg.wiring.d)
    jsa = cfg.source.jsa_ab if pair_is_ab else cfg.source.jsa_cd
    n = cfg.mode_count
    counts = [0] * n
    for m in modes:
        counts[m - 1] += 1
    occupation_in = ModeOccupation(tuple(counts))
    out_counts = [0] * n
    for m in watch_pattern:
        out_counts[m - 1] += 1
    occupation_out = ModeOccupation(tuple(out_counts))

    results = []
    for tau in taus:
        axis = "first" if channel in ("a", "c") else "second"
        delayed = apply_delay(jsa, axis, float(tau))
        state = PairProductState(
            ((delayed, modes),), int(pair_is_ab), int(not pair_is_ab)
        )
        rho = external_density_matrix(state, occupation_in)
        results.append(
            (float(tau), transition_probability(rho, cfg.unitary, occupation_in, occupation_out))
        )
    return results
