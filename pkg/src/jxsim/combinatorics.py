"""Permutation machinery for multiphoton mode bookkeeping.

Everything here is 1-based: a permutation of N particles maps {1..N} to
itself, mode indices run from 1 to n.  This matches the usual optics
convention where "mode 1" is the first waveguide, and keeps cycle notation
readable, e.g. the mirror permutation of seven modes is (1 7)(2 6)(3 5)(4).

The central object is the right transversal of a Young subgroup S_R inside
S_N: for an input occupation R the Young subgroup permutes particles only
within equally occupied modes, and the transversal representatives enumerate
the inequivalent particle orderings.  The interference engine sums over the
transversal instead of over all of S_N.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import ResourceLimitError

DEFAULT_MAX_PHOTONS = 8


@dataclass(frozen=True)
class Permutation:
    """A permutation of {1..N} in one-line notation.

    ``mapping[i-1]`` is the image of ``i``.  Composition is right-to-left:
    ``(p @ q)(i) == p(q(i))``.
    """

    mapping: tuple[int, ...]

    def __post_init__(self):
        n = len(self.mapping)
        if sorted(self.mapping) != list(range(1, n + 1)):
            raise ValueError(f"not a permutation of 1..{n}: {self.mapping}")

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(tuple(range(1, n + 1)))

    @classmethod
    def mirror(cls, n: int) -> "Permutation":
        """The mode reversal j -> n + 1 - j."""
        return cls(tuple(n + 1 - j for j in range(1, n + 1)))

    @property
    def size(self) -> int:
        return len(self.mapping)

    def __call__(self, i: int) -> int:
        return self.mapping[i - 1]

    def __matmul__(self, other: "Permutation") -> "Permutation":
        if self.size != other.size:
            raise ValueError("cannot compose permutations of different sizes")
        return Permutation(tuple(self.mapping[t - 1] for t in other.mapping))

    def inverse(self) -> "Permutation":
        inv = [0] * self.size
        for i, t in enumerate(self.mapping, start=1):
            inv[t - 1] = i
        return Permutation(tuple(inv))

    def apply_to(self, values: Sequence) -> tuple:
        """Gather: returns ``(values[p(1)], ..., values[p(N)])`` (1-based)."""
        return tuple(values[t - 1] for t in self.mapping)


def cycle_decomposition(p: Permutation) -> list[tuple[int, ...]]:
    """Disjoint cycles of ``p``, each starting at its smallest element,
    ordered by that element.  Fixed points appear as 1-cycles.

    >>> cycle_decomposition(Permutation.mirror(7))
    [(1, 7), (2, 6), (3, 5), (4,)]
    """
    seen = [False] * p.size
    cycles = []
    for start in range(1, p.size + 1):
        if seen[start - 1]:
            continue
        cycle = []
        i = start
        while not seen[i - 1]:
            seen[i - 1] = True
            cycle.append(i)
            i = p(i)
        cycles.append(tuple(cycle))
    return cycles


@dataclass(frozen=True)
class ModeOccupation:
    """Photon count per mode; ``counts[j-1]`` photons sit in mode ``j``."""

    counts: tuple[int, ...]

    def __post_init__(self):
        if any(c < 0 for c in self.counts):
            raise ValueError(f"negative occupation: {self.counts}")

    @classmethod
    def of(cls, counts: Iterable[int]) -> "ModeOccupation":
        return cls(tuple(int(c) for c in counts))

    @property
    def photon_count(self) -> int:
        return sum(self.counts)

    @property
    def mode_count(self) -> int:
        return len(self.counts)


@dataclass(frozen=True)
class ModeAssignment:
    """Mode index of each particle, kept in canonical nondecreasing order."""

    modes: tuple[int, ...]

    def __post_init__(self):
        if any(m < 1 for m in self.modes):
            raise ValueError("mode indices are 1-based")
        if list(self.modes) != sorted(self.modes):
            raise ValueError(f"canonical assignment must be sorted: {self.modes}")

    def occupation(self, mode_count: int) -> ModeOccupation:
        counts = [0] * mode_count
        for m in self.modes:
            counts[m - 1] += 1
        return ModeOccupation(tuple(counts))


def assignment_from_occupation(occ: ModeOccupation) -> ModeAssignment:
    """Canonical assignment list: mode j repeated R_j times.

    >>> assignment_from_occupation(ModeOccupation.of([1, 0, 1, 0, 1, 0, 1])).modes
    (1, 3, 5, 7)
    """
    modes = []
    for j, c in enumerate(occ.counts, start=1):
        modes.extend([j] * c)
    return ModeAssignment(tuple(modes))


def young_subgroup_order(occ: ModeOccupation) -> int:
    """Order of the Young subgroup S_R, i.e. the product of R_j!."""
    order = 1
    for c in occ.counts:
        order *= math.factorial(c)
    return order


def young_subgroup(occ: ModeOccupation) -> list[Permutation]:
    """All permutations that shuffle particles only within a mode.

    Particles are numbered by the canonical assignment list, so the particles
    of mode j form a contiguous block.
    """
    assignment = assignment_from_occupation(occ)
    n = len(assignment.modes)
    blocks = []
    start = 0
    while start < n:
        end = start
        while end < n and assignment.modes[end] == assignment.modes[start]:
            end += 1
        blocks.append(range(start + 1, end + 1))
        start = end
    members = [Permutation.identity(n)]
    for block in blocks:
        extended = []
        for image in itertools.permutations(block):
            base = list(range(1, n + 1))
            for pos, tgt in zip(block, image):
                base[pos - 1] = tgt
            block_perm = Permutation(tuple(base))
            extended.extend(block_perm @ m for m in members)
        members = extended
    return members


@dataclass(frozen=True)
class Transversal:
    """Right transversal of S_R in S_N for an occupation R.

    ``representatives[k]`` applied to the canonical assignment list yields
    ``assignment_lists[k]``; the lists are all distinct orderings of the
    occupation's multiset in lexicographic order, which fixes a reproducible
    basis for the external density matrix.
    """

    occupation: ModeOccupation
    representatives: tuple[Permutation, ...]
    assignment_lists: tuple[tuple[int, ...], ...]
    _index: dict = field(repr=False, hash=False, compare=False, default_factory=dict)

    @property
    def size(self) -> int:
        return len(self.representatives)

    @property
    def coset_count(self) -> int:
        """N!/|S_R|; the paper's factor R."""
        return self.size

    def index_of(self, assignment_list: Sequence[int]) -> int:
        return self._index[tuple(assignment_list)]


def right_transversal(occ: ModeOccupation, max_photons: int = DEFAULT_MAX_PHOTONS) -> Transversal:
    """Build the right transversal of S_R in S_N.

    Representatives are chosen so that within each coset the particles of a
    given mode keep their relative order (smallest available slot first);
    any other coset representative would induce the same assignment list.
    """
    n = occ.photon_count
    if n > max_photons:
        raise ResourceLimitError(
            f"transversal for {n} photons exceeds the cap of {max_photons}"
        )
    assignment = assignment_from_occupation(occ)
    slots_by_mode: dict[int, list[int]] = {}
    for slot, m in enumerate(assignment.modes, start=1):
        slots_by_mode.setdefault(m, []).append(slot)

    lists = _distinct_orderings(assignment.modes)
    reps = []
    for target in lists:
        cursor = {m: 0 for m in slots_by_mode}
        image = []
        for m in target:
            image.append(slots_by_mode[m][cursor[m]])
            cursor[m] += 1
        reps.append(Permutation(tuple(image)))
    index = {L: k for k, L in enumerate(lists)}
    return Transversal(occ, tuple(reps), tuple(lists), index)


def _distinct_orderings(modes: tuple[int, ...]) -> list[tuple[int, ...]]:
    """All distinct orderings of a sorted multiset, lexicographically."""
    results: list[tuple[int, ...]] = []

    def extend(prefix: list[int], remaining: list[int]):
        if not remaining:
            results.append(tuple(prefix))
            return
        for m in sorted(set(remaining)):
            rest = list(remaining)
            rest.remove(m)
            extend(prefix + [m], rest)

    extend([], list(modes))
    return results
