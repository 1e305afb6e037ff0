"""Access structures: which participant subsets may reconstruct the secret.

Subsets of [K] = {1, ..., K} are encoded as bitmasks (bit k-1 set means
participant k is in the subset).  Validity is checked exhaustively, which
caps K at 20 participants.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

PARTICIPANT_CAP = 20


class CloningViolation(ValueError):
    """Raised for threshold parameters with two disjoint qualified sets (2t <= K)."""


class ParticipantCapExceeded(ValueError):
    """Raised when K exceeds the exhaustive-enumeration cap."""


def subset_to_mask(subset: Iterable[int]) -> int:
    mask = 0
    for k in subset:
        if k < 1:
            raise ValueError(f"participants are 1-indexed, got {k}")
        mask |= 1 << (k - 1)
    return mask


def mask_to_subset(mask: int) -> frozenset[int]:
    return frozenset(k + 1 for k in range(mask.bit_length()) if mask >> k & 1)


def complement(subset: Iterable[int], K: int) -> frozenset[int]:
    """Set complement within [K]."""
    s = frozenset(subset)
    return frozenset(range(1, K + 1)) - s


@dataclass(frozen=True)
class ValidityReport:
    upward_closed: bool
    no_disjoint_qualified: bool
    self_dual: bool


@dataclass(frozen=True)
class AccessStructure:
    """The family of qualified subsets of [K], stored as bitmasks."""

    K: int
    qualified: frozenset[int]

    def __post_init__(self):
        if self.K < 1:
            raise ValueError("need at least one participant")
        if self.K > PARTICIPANT_CAP:
            raise ParticipantCapExceeded(f"K = {self.K} exceeds cap {PARTICIPANT_CAP}")
        full = (1 << self.K) - 1
        masks = frozenset(int(m) for m in self.qualified)
        if any(m & ~full or m == 0 for m in masks):
            raise ValueError("qualified sets must be nonempty subsets of [K]")
        object.__setattr__(self, "qualified", masks)

    def is_qualified(self, subset: Iterable[int]) -> bool:
        return subset_to_mask(subset) in self.qualified

    def qualified_sets(self) -> list[frozenset[int]]:
        """All qualified subsets, sorted by size then lexicographically."""
        sets = [mask_to_subset(m) for m in self.qualified]
        return sorted(sets, key=lambda s: (len(s), sorted(s)))

    def minimal_qualified(self) -> list[frozenset[int]]:
        """The inclusion-minimal qualified sets (an antichain)."""
        out = []
        for m in self.qualified:
            if not any(o != m and o & m == o for o in self.qualified):
                out.append(mask_to_subset(m))
        return sorted(out, key=lambda s: (len(s), sorted(s)))

    def maximal_non_qualified(self) -> list[frozenset[int]]:
        """Non-qualified sets whose every one-element extension is qualified."""
        out = []
        for m in range(1 << self.K):
            if m in self.qualified:
                continue
            if all(
                (m | (1 << k)) in self.qualified
                for k in range(self.K)
                if not m >> k & 1
            ):
                out.append(mask_to_subset(m))
        return sorted(out, key=lambda s: (len(s), sorted(s)))


def from_threshold(t: int, K: int) -> AccessStructure:
    """Threshold structure: qualified iff at least t of K participants."""
    if not 1 <= t <= K:
        raise ValueError(f"need 1 <= t <= K, got t={t}, K={K}")
    if 2 * t <= K:
        raise CloningViolation(
            f"(t={t}, K={K}) admits two disjoint qualified sets; need 2t > K"
        )
    qualified = frozenset(
        m for m in range(1, 1 << K) if bin(m).count("1") >= t
    )
    return AccessStructure(K, qualified)


def validate(a: AccessStructure) -> ValidityReport:
    """Exhaustive checks of upward closure, the no-cloning condition, and strict self-duality."""
    full = (1 << a.K) - 1
    upward = all(
        (m | (1 << k)) in a.qualified
        for m in a.qualified
        for k in range(a.K)
        if not m >> k & 1
    )
    if upward:
        no_disjoint = all((full & ~m) not in a.qualified for m in a.qualified)
    else:
        members = sorted(a.qualified)
        no_disjoint = all(
            m1 & m2 for i, m1 in enumerate(members) for m2 in members[i + 1 :]
        )
    self_dual = all(
        (m in a.qualified) == ((full & ~m) not in a.qualified)
        for m in range(1 << a.K)
    )
    return ValidityReport(upward, no_disjoint, self_dual)


def from_descriptor(obj: dict) -> AccessStructure:
    """Build from a JSON descriptor: {"K", "threshold"} or {"K", "qualified": [[...]]}."""
    K = int(obj["K"])
    if "threshold" in obj:
        return from_threshold(int(obj["threshold"]), K)
    if "qualified" in obj:
        masks = frozenset(subset_to_mask(s) for s in obj["qualified"])
        return AccessStructure(K, masks)
    raise ValueError("descriptor needs a 'threshold' or 'qualified' field")
