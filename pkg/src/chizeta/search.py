"""Independent-set and clique search on bitset graphs.

Maximum clique uses branch-and-bound with a greedy colouring bound over
vertices relabelled in descending-degree order; independent sets are
cliques of the complement.
"""

from __future__ import annotations

import sys

from chizeta.graph import Graph, complement, iter_bits

sys.setrecursionlimit(max(sys.getrecursionlimit(), 10000))


def _relabel_by_degree(g: Graph) -> tuple[list[int], list[int]]:
    """Adjacency relabelled so bit i is the i-th vertex by descending degree
    (ties by label); returns (new adjacency, order) with order[i] = old label."""
    order = sorted(range(g.n), key=lambda v: (-g.degree(v), v))
    pos = [0] * g.n
    for i, v in enumerate(order):
        pos[v] = i
    adj = []
    for v in order:
        a = 0
        for w in iter_bits(g.adj[v]):
            a |= 1 << pos[w]
        adj.append(a)
    return adj, order


def _colour_bound(adj: list[int], p: int) -> tuple[list[int], list[int]]:
    """Greedy sequential colouring of candidate set p.

    Returns vertices and their colour numbers, in non-decreasing colour
    order; colour[i] bounds the clique size within the first i+1 vertices.
    """
    verts, cols = [], []
    u = p
    c = 0
    while u:
        c += 1
        q = u
        while q:
            low = q & -q
            v = low.bit_length() - 1
            q &= ~adj[v] & ~low
            u &= ~low
            verts.append(v)
            cols.append(c)
    return verts, cols


def max_clique(g: Graph) -> list[int]:
    """A maximum clique of g, as a sorted list of vertices."""
    if g.n == 0:
        return []
    adj, order = _relabel_by_degree(g)
    best: list[int] = []
    current: list[int] = []

    def expand(p: int) -> None:
        nonlocal best
        verts, cols = _colour_bound(adj, p)
        for i in range(len(verts) - 1, -1, -1):
            if len(current) + cols[i] <= len(best):
                return
            v = verts[i]
            current.append(v)
            newp = p & adj[v]
            if newp:
                expand(newp)
            elif len(current) > len(best):
                best = current.copy()
            current.pop()
            p &= ~(1 << v)

    expand((1 << g.n) - 1)
    return sorted(order[v] for v in best)


def clique_number(g: Graph) -> int:
    return len(max_clique(g))


def max_independent_set(g: Graph) -> list[int]:
    return max_clique(complement(g))


def independence_number(g: Graph) -> int:
    """Exact alpha(g) by branch-and-bound on the complement."""
    return len(max_independent_set(g))


def count_independent_sets(g: Graph, t: int) -> int:
    """Number of independent vertex sets of size exactly t."""
    return count_cliques(complement(g), t)


def count_cliques(g: Graph, t: int) -> int:
    """Number of t-cliques.

    Same enumeration as :func:`max_clique`: candidates are greedily coloured
    and scanned from the highest colour down; once the colour number drops
    below the remaining requirement no further clique can be completed.
    """
    if t < 0:
        raise ValueError("set size must be non-negative")
    if t == 0:
        return 1
    if t > g.n:
        return 0
    adj, _ = _relabel_by_degree(g)

    def count(p: int, need: int) -> int:
        if need == 1:
            return p.bit_count()
        total = 0
        if need == 2:
            while p:
                low = p & -p
                p ^= low
                total += (p & adj[low.bit_length() - 1]).bit_count()
            return total
        verts, cols = _colour_bound(adj, p)
        for i in range(len(verts) - 1, -1, -1):
            if cols[i] < need:
                break
            v = verts[i]
            p &= ~(1 << v)
            q = p & adj[v]
            if q.bit_count() >= need - 1:
                total += count(q, need - 1)
        return total

    return count((1 << g.n) - 1, t)


def independent_sets_in_range(g: Graph, lo: int, hi: int) -> list[int]:
    """All independent sets S (as bitsets) with lo <= |S| <= hi."""
    lo = max(lo, 1)
    out: list[int] = []
    if hi < lo:
        return out
    adj = g.adj

    def rec(s: int, size: int, p: int) -> None:
        if size >= lo:
            out.append(s)
        if size == hi:
            return
        while p and size + p.bit_count() >= lo:
            low = p & -p
            v = low.bit_length() - 1
            p ^= low
            rec(s | low, size + 1, p & ~adj[v])

    rec(0, 0, g.vertices_mask)
    return out


def cliques_in_range(g: Graph, lo: int, hi: int) -> list[int]:
    return independent_sets_in_range(complement(g), lo, hi)
