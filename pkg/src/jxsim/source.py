"""Multi-pair emission statistics of the two SPDC sources and the wiring of
their four collection channels into lattice input modes."""
from __future__ import annotations

import math
from dataclasses import dataclass

from .combinatorics import ModeOccupation
from .errors import ConfigError
from .spectral import MAX_PAIR_COUNT, SpectralAmplitude, normalization_np


@dataclass(frozen=True)
class ChannelWiring:
    """Input mode fed by each collection channel.

    The default keeps photons of one pair inside one mirror cycle of the
    seven-mode lattice: a, b -> 1, 7 and c, d -> 3, 5.
    """

    a: int = 1
    b: int = 7
    c: int = 3
    d: int = 5

    def __post_init__(self):
        targets = (self.a, self.b, self.c, self.d)
        if len(set(targets)) != 4:
            raise ConfigError(f"channel wiring must be injective: {targets}")
        if any(m < 1 for m in targets):
            raise ConfigError("mode indices are 1-based")

    @property
    def channels(self) -> tuple[int, int, int, int]:
        return (self.a, self.b, self.c, self.d)


@dataclass(frozen=True)
class SourceParams:
    """Pair probabilities per pulse and pair amplitudes of the two sources."""

    p_ab: float
    p_cd: float
    jsa_ab: SpectralAmplitude
    jsa_cd: SpectralAmplitude
    max_photons: int = 6

    def __post_init__(self):
        for name, p in (("p_ab", self.p_ab), ("p_cd", self.p_cd)):
            if not 0.0 < p < 1.0:
                raise ConfigError(f"{name} must lie strictly between 0 and 1")
        if self.max_photons % 2 != 0 or self.max_photons > 8 or self.max_photons < 2:
            raise ConfigError("max_photons must be an even number of at most 8")


def normalization_constant(
    p: float, jsa: SpectralAmplitude, max_pairs: int = MAX_PAIR_COUNT
) -> float:
    """Squared normalization constant c^2 of the multi-pair emission series.

    c^2 = 1 / sum_{P=0}^{max} p^P N_P / P!^2, the vacuum weight of the
    source state; approaches 1 - p for a separable pair amplitude.
    """
    total = 0.0
    previous = math.inf
    for pairs in range(max_pairs + 1):
        n_p = normalization_np(jsa, pairs, max_pairs=max_pairs)
        term = p**pairs * n_p / math.factorial(pairs) ** 2
        if term > previous:
            raise ValueError("multi-pair series does not decay; emission model invalid")
        previous = term
        total += term
    return 1.0 / total


def generation_probability(p_count: int, q_count: int, params: SourceParams) -> float:
    """Joint probability that source 1 emits P pairs and source 2 emits Q.

    p_{P,Q} = (c_ab c_cd)^2 p_ab^P p_cd^Q N_P N_Q / (P!^2 Q!^2), with the
    multi-pair factors N interpolating between purely spontaneous (P!) and
    fully stimulated (P!^2) emission.
    """
    if 2 * (p_count + q_count) > params.max_photons:
        raise ValueError(
            f"{p_count}+{q_count} pairs exceed the configured photon cap "
            f"of {params.max_photons}"
        )
    c2 = normalization_constant(params.p_ab, params.jsa_ab) * normalization_constant(
        params.p_cd, params.jsa_cd
    )
    n_p = normalization_np(params.jsa_ab, p_count)
    n_q = normalization_np(params.jsa_cd, q_count)
    return (
        c2
        * params.p_ab**p_count
        * params.p_cd**q_count
        * n_p
        * n_q
        / (math.factorial(p_count) ** 2 * math.factorial(q_count) ** 2)
    )


@dataclass(frozen=True)
class InputStateRecord:
    """One emission pattern that can contribute to the measured coincidences."""

    label: str
    channel_occupation: tuple[int, int, int, int]
    pair_counts: tuple[int, int]
    photon_count: int
    mode_occupation: ModeOccupation
    p_gen: float
    p_gen_norm: float


_LABELS = {(1, 0): "R5", (0, 1): "R4", (2, 0): "R1", (1, 1): "R2", (0, 2): "R3"}


def _label(p_count: int, q_count: int) -> str:
    known = _LABELS.get((p_count, q_count))
    if known is not None:
        return known
    return f"{2 * (p_count + q_count)}ph-{p_count}ab{q_count}cd"


def enumerate_input_states(
    params: SourceParams,
    wiring: ChannelWiring,
    photon_numbers: tuple[int, ...] = (4, 6),
    mode_count: int = 7,
) -> list[InputStateRecord]:
    """All emission patterns with the requested photon numbers.

    Records are ordered by photon number and then by decreasing pair count
    of the first source, which reproduces the conventional table layout:
    (2,2,0,0), (1,1,1,1), (0,0,2,2), then the six-photon rows.  The
    normalized weights sum to one over the returned set.
    """
    for n in photon_numbers:
        if n % 2 != 0 or n <= 0:
            raise ValueError("photon numbers must be positive and even")
        if n > params.max_photons:
            raise ValueError(f"{n} photons exceed the configured cap of {params.max_photons}")
    records = []
    for n in photon_numbers:
        half = n // 2
        for p_count in range(half, -1, -1):
            q_count = half - p_count
            channel_occ = (p_count, p_count, q_count, q_count)
            counts = [0] * mode_count
            counts[wiring.a - 1] += p_count
            counts[wiring.b - 1] += p_count
            counts[wiring.c - 1] += q_count
            counts[wiring.d - 1] += q_count
            records.append(
                (
                    _label(p_count, q_count),
                    channel_occ,
                    (p_count, q_count),
                    n,
                    ModeOccupation(tuple(counts)),
                    generation_probability(p_count, q_count, params),
                )
            )
    total = sum(r[-1] for r in records)
    return [
        InputStateRecord(label, channel_occ, pair_counts, n, occ, p_gen, p_gen / total)
        for label, channel_occ, pair_counts, n, occ, p_gen in records
    ]
