"""Ordered (possibly partial) vertex partitions with non-increasing part sizes."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterator, Sequence

from chizeta.graph import Graph, bits_to_list, mask_of
from chizeta.profile import Profile


@dataclass(frozen=True)
class OrderedPartition:
    n: int
    parts: tuple[int, ...]  # vertex bitsets

    def __post_init__(self):
        seen = 0
        prev = None
        for p in self.parts:
            if p == 0:
                raise ValueError("empty part")
            if p >> self.n:
                raise ValueError("part contains vertex outside [n]")
            if p & seen:
                raise ValueError("parts are not disjoint")
            seen |= p
            size = p.bit_count()
            if prev is not None and size > prev:
                raise ValueError("part sizes must be non-increasing")
            prev = size

    @classmethod
    def from_lists(cls, n: int, parts: Sequence[Sequence[int]]) -> OrderedPartition:
        return cls(n, tuple(mask_of(p) for p in parts))

    @property
    def covered(self) -> int:
        out = 0
        for p in self.parts:
            out |= p
        return out

    @property
    def k(self) -> int:
        return len(self.parts)

    def is_complete(self) -> bool:
        return self.covered == (1 << self.n) - 1

    def sizes(self) -> list[int]:
        return [p.bit_count() for p in self.parts]

    def profile(self) -> Profile:
        m: dict[int, int] = {}
        for s in self.sizes():
            m[s] = m.get(s, 0) + 1
        return Profile.from_mapping(m)

    def as_lists(self) -> list[list[int]]:
        return [bits_to_list(p) for p in self.parts]

    def part_set(self) -> frozenset[int]:
        return frozenset(self.parts)

    def is_colouring(self, g: Graph) -> bool:
        return all(g.is_independent(p) for p in self.parts)

    def is_cocolouring(self, g: Graph) -> bool:
        return all(g.is_independent(p) or g.is_clique(p) for p in self.parts)


def ordered_partitions(n: int, profile: Profile) -> Iterator[OrderedPartition]:
    """All ordered partitions of (a subset of) [n] with the given profile;
    there are exactly P_k of them."""
    profile.check(n)
    sizes = profile.sizes()

    def rec(i: int, remaining: list[int], parts: list[int]):
        if i == len(sizes):
            yield OrderedPartition(n, tuple(parts))
            return
        for combo in combinations(remaining, sizes[i]):
            m = mask_of(combo)
            rest = [v for v in remaining if not m >> v & 1]
            parts.append(m)
            yield from rec(i + 1, rest, parts)
            parts.pop()

    yield from rec(0, list(range(n)), [])


def unordered_partitions(n: int, profile: Profile) -> Iterator[OrderedPartition]:
    """One representative per unordered partition with the given complete
    profile (equal-size parts listed by increasing lowest vertex)."""
    profile.check(n, complete=True)
    sizes = profile.sizes()

    def rec(i: int, remaining: int, parts: list[int]):
        if i == len(sizes):
            yield OrderedPartition(n, tuple(parts))
            return
        u = sizes[i]
        same_as_prev = i > 0 and sizes[i - 1] == u
        # Parts of equal size are canonically ordered by their lowest vertex.
        cand = bits_to_list(remaining)
        if same_as_prev:
            prev_min = (parts[-1] & -parts[-1]).bit_length() - 1
            cand_first = [v for v in cand if v > prev_min]
        else:
            cand_first = cand
        for first in cand_first:
            others = [v for v in cand if v > first]
            for combo in combinations(others, u - 1):
                m = (1 << first) | mask_of(combo)
                parts.append(m)
                yield from rec(i + 1, remaining & ~m, parts)
                parts.pop()

    yield from rec(0, (1 << n) - 1, [])
