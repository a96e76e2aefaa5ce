"""Graphs on vertices 0..n-1 with adjacency stored as Python int bitsets."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator

import numpy as np

from chizeta.rng import make_rng


@dataclass(frozen=True)
class Graph:
    n: int
    adj: tuple[int, ...]
    _edge_count: int = field(default=-1, compare=False, repr=False)

    def __post_init__(self):
        if self.n < 0 or len(self.adj) != self.n:
            raise ValueError("adjacency length must equal n")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> Graph:
        adj = [0] * n
        for u, v in edges:
            u, v = int(u), int(v)
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) out of range for n={n}")
            if u == v:
                raise ValueError(f"self-loop at {u}")
            adj[u] |= 1 << v
            adj[v] |= 1 << u
        return cls(n, tuple(adj))

    @classmethod
    def from_matrix(cls, a) -> Graph:
        """From a symmetric 0/1 matrix (numpy array or nested lists)."""
        a = np.asarray(a, dtype=bool)
        n = a.shape[0]
        if a.shape != (n, n):
            raise ValueError("adjacency matrix must be square")
        if np.any(np.diag(a)):
            raise ValueError("self-loops in adjacency matrix")
        if not np.array_equal(a, a.T):
            raise ValueError("adjacency matrix not symmetric")
        return cls(n, _rows_to_bitsets(a))

    @classmethod
    def empty(cls, n: int) -> Graph:
        return cls(n, (0,) * n)

    @classmethod
    def complete(cls, n: int) -> Graph:
        full = (1 << n) - 1
        return cls(n, tuple(full & ~(1 << v) for v in range(n)))

    @classmethod
    def cycle(cls, n: int) -> Graph:
        return cls.from_edges(n, [(i, (i + 1) % n) for i in range(n)])

    @classmethod
    def petersen(cls) -> Graph:
        outer = [(i, (i + 1) % 5) for i in range(5)]
        spokes = [(i, i + 5) for i in range(5)]
        inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
        return cls.from_edges(10, outer + spokes + inner)

    @classmethod
    def from_edge_mask(cls, n: int, mask: int) -> Graph:
        """Graph whose edges are the set bits of ``mask`` in pair order
        (0,1), (0,2), ..., (0,n-1), (1,2), ..."""
        adj = [0] * n
        idx = 0
        for u in range(n):
            for v in range(u + 1, n):
                if mask >> idx & 1:
                    adj[u] |= 1 << v
                    adj[v] |= 1 << u
                idx += 1
        return cls(n, tuple(adj))

    # -- queries ----------------------------------------------------------
    @property
    def vertices_mask(self) -> int:
        return (1 << self.n) - 1

    @property
    def N(self) -> int:
        return self.n * (self.n - 1) // 2

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.adj[u] >> v & 1)

    def degree(self, v: int) -> int:
        return self.adj[v].bit_count()

    def degrees(self) -> list[int]:
        return [a.bit_count() for a in self.adj]

    def edge_count(self) -> int:
        if self._edge_count < 0:
            object.__setattr__(self, "_edge_count", sum(self.degrees()) // 2)
        return self._edge_count

    def edges(self) -> Iterator[tuple[int, int]]:
        for u in range(self.n):
            rest = self.adj[u] >> (u + 1)
            v = u + 1
            while rest:
                if rest & 1:
                    yield (u, v)
                rest >>= 1
                v += 1

    def edge_mask(self) -> int:
        """Inverse of :meth:`from_edge_mask`."""
        mask = 0
        idx = 0
        for u in range(self.n):
            for v in range(u + 1, self.n):
                if self.adj[u] >> v & 1:
                    mask |= 1 << idx
                idx += 1
        return mask

    def is_independent(self, s: int) -> bool:
        for v in iter_bits(s):
            if self.adj[v] & s:
                return False
        return True

    def is_clique(self, s: int) -> bool:
        for v in iter_bits(s):
            if (s & ~(1 << v)) & ~self.adj[v]:
                return False
        return True

    def check_invariants(self) -> None:
        for u in range(self.n):
            if self.adj[u] >> u & 1:
                raise ValueError(f"self-loop at {u}")
            if self.adj[u] >> self.n:
                raise ValueError(f"neighbour of {u} out of range")
            for v in iter_bits(self.adj[u]):
                if not self.adj[v] >> u & 1:
                    raise ValueError(f"asymmetric edge ({u}, {v})")

    def with_edge_toggled(self, u: int, v: int) -> Graph:
        adj = list(self.adj)
        adj[u] ^= 1 << v
        adj[v] ^= 1 << u
        return Graph(self.n, tuple(adj))

    def induced(self, s: int) -> Graph:
        """Subgraph induced by bitset ``s``, relabelled 0..|s|-1 in order."""
        verts = list(iter_bits(s))
        pos = {v: i for i, v in enumerate(verts)}
        adj = []
        for v in verts:
            a = 0
            for w in iter_bits(self.adj[v] & s):
                a |= 1 << pos[w]
            adj.append(a)
        return Graph(len(verts), tuple(adj))


@dataclass(frozen=True)
class GnmParams:
    n: int
    m: int | None = None

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"invalid vertex count n={self.n}")
        if self.m is None:
            object.__setattr__(self, "m", self.N // 2)
        if not 0 <= self.m <= self.N:
            raise ValueError(f"edge count m={self.m} outside [0, N={self.N}]")

    @property
    def N(self) -> int:
        return self.n * (self.n - 1) // 2


def iter_bits(x: int) -> Iterator[int]:
    while x:
        low = x & -x
        yield low.bit_length() - 1
        x ^= low


def bits_to_list(x: int) -> list[int]:
    return list(iter_bits(x))


def mask_of(vertices: Iterable[int]) -> int:
    m = 0
    for v in vertices:
        m |= 1 << v
    return m


def complement(g: Graph) -> Graph:
    full = g.vertices_mask
    return Graph(g.n, tuple(full & ~a & ~(1 << v) for v, a in enumerate(g.adj)))


def _rows_to_bitsets(a: np.ndarray) -> tuple[int, ...]:
    packed = np.packbits(a, axis=1, bitorder="little")
    return tuple(int.from_bytes(row.tobytes(), "little") for row in packed)


def pair_from_index(idx: int, n: int) -> tuple[int, int]:
    """Pair (u, v), u < v, at position ``idx`` in the row-major upper triangle."""
    # Row u starts at u*n - u*(u+1)/2.
    u = int((2 * n - 1 - math.isqrt((2 * n - 1) ** 2 - 8 * idx)) // 2)
    while u > 0 and u * n - u * (u + 1) // 2 > idx:
        u -= 1
    while (u + 1) * n - (u + 1) * (u + 2) // 2 <= idx:
        u += 1
    start = u * n - u * (u + 1) // 2
    return u, u + 1 + (idx - start)


def sample_gnp_half(n: int, seed: int) -> Graph:
    """G(n, 1/2): every pair is an edge independently with probability 1/2."""
    if n < 1:
        raise ValueError(f"invalid graph size n={n}")
    rng = make_rng(seed, n, 0x67_6E_70)
    iu = np.triu_indices(n, k=1)
    bits = rng.integers(0, 2, size=len(iu[0]), dtype=np.uint8).astype(bool)
    a = np.zeros((n, n), dtype=bool)
    a[iu] = bits
    a |= a.T
    return Graph(n, _rows_to_bitsets(a))


def sample_gnm(params: GnmParams, seed: int) -> Graph:
    """Uniform graph with exactly m edges (partial Fisher-Yates on pair indices)."""
    n, m, N = params.n, params.m, params.N
    if m > N:
        raise ValueError(f"m={m} exceeds N={N}")
    rng = make_rng(seed, n, m, 0x67_6E_6D)
    # Draw the smaller of the edge set and its complement.
    flip = m > N - m
    r = N - m if flip else m
    chosen = _partial_fisher_yates(N, r, rng)
    a = np.zeros((n, n), dtype=bool)
    if chosen:
        pairs = np.array([pair_from_index(i, n) for i in chosen], dtype=np.int64)
        a[pairs[:, 0], pairs[:, 1]] = True
    if flip:
        a = ~a
        a[np.tril_indices(n)] = False
    a |= a.T
    return Graph(n, _rows_to_bitsets(a))


def _partial_fisher_yates(N: int, r: int, rng: np.random.Generator) -> list[int]:
    # Only displaced positions are stored, so memory is O(r).
    swapped: dict[int, int] = {}
    out = []
    if r == 0:
        return out
    js = rng.integers(np.arange(r), N)
    for i in range(r):
        j = int(js[i])
        vj = swapped.get(j, j)
        swapped[j] = swapped.get(i, i)
        out.append(vj)
    return out
