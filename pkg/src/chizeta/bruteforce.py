"""Exhaustive oracles over set partitions, independent of the
branch-and-bound solvers.  Only for small n (Bell(10) = 115975)."""

from __future__ import annotations

from itertools import combinations
from typing import Iterator

from chizeta.graph import Graph
from chizeta.profile import Profile


def set_partitions(n: int) -> Iterator[list[int]]:
    """All set partitions of {0..n-1} as lists of block bitsets
    (restricted-growth-string enumeration)."""
    if n == 0:
        yield []
        return
    blocks: list[int] = []

    def rec(v: int):
        if v == n:
            yield list(blocks)
            return
        for i in range(len(blocks)):
            blocks[i] |= 1 << v
            yield from rec(v + 1)
            blocks[i] &= ~(1 << v)
        blocks.append(1 << v)
        yield from rec(v + 1)
        blocks.pop()

    yield from rec(0)


def _independent(g: Graph, s: int) -> bool:
    vs = [v for v in range(g.n) if s >> v & 1]
    return all(not g.has_edge(a, b) for a, b in combinations(vs, 2))


def _clique(g: Graph, s: int) -> bool:
    vs = [v for v in range(g.n) if s >> v & 1]
    return all(g.has_edge(a, b) for a, b in combinations(vs, 2))


def chromatic_bruteforce(g: Graph, t: int | None = None) -> int:
    best = g.n
    for blocks in set_partitions(g.n):
        if len(blocks) >= best:
            continue
        if t is not None and any(b.bit_count() > t for b in blocks):
            continue
        if all(_independent(g, b) for b in blocks):
            best = len(blocks)
    return best


def cochromatic_bruteforce(g: Graph) -> int:
    best = g.n
    for blocks in set_partitions(g.n):
        if len(blocks) < best and all(_independent(g, b) or _clique(g, b) for b in blocks):
            best = len(blocks)
    return best


def _block_profile(blocks: list[int]) -> Profile:
    m: dict[int, int] = {}
    for b in blocks:
        m[b.bit_count()] = m.get(b.bit_count(), 0) + 1
    return Profile.from_mapping(m)


def count_profile_bruteforce(g: Graph, profile: Profile, co: bool = False) -> int:
    """Unordered (co)colourings of g realising ``profile``."""
    ok = (lambda b: _independent(g, b) or _clique(g, b)) if co else (lambda b: _independent(g, b))
    return sum(
        1
        for blocks in set_partitions(g.n)
        if _block_profile(blocks) == profile and all(ok(b) for b in blocks)
    )


def colourings_by_profile(g: Graph, k: int, t: int) -> dict[Profile, int]:
    """Unordered t-bounded k-colourings of g grouped by profile."""
    out: dict[Profile, int] = {}
    for blocks in set_partitions(g.n):
        if len(blocks) != k or any(b.bit_count() > t for b in blocks):
            continue
        if all(_independent(g, b) for b in blocks):
            p = _block_profile(blocks)
            out[p] = out.get(p, 0) + 1
    return out


def all_graphs(n: int) -> Iterator[Graph]:
    for mask in range(1 << (n * (n - 1) // 2)):
        yield Graph.from_edge_mask(n, mask)
