"""Exact chromatic, t-bounded chromatic and cochromatic numbers for small
graphs, exact (co)colouring counts for a fixed profile, and the greedy
cocolouring upper bound."""

from __future__ import annotations

from dataclasses import dataclass

from chizeta.graph import Graph, bits_to_list, iter_bits
from chizeta.profile import Profile, ProfileError
from chizeta.search import clique_number, max_clique, max_independent_set


@dataclass(frozen=True)
class ColouringCounts:
    ordered: int
    unordered: int

    def __post_init__(self):
        if self.ordered < 0 or self.unordered < 0:
            raise ValueError("counts must be non-negative")


# -- colouring -----------------------------------------------------------

def dsatur_colouring(g: Graph, cap: int | None = None) -> list[int]:
    """Greedy DSATUR colouring as a list of class bitsets; ``cap`` limits
    class sizes."""
    n = g.n
    classes: list[int] = []
    uncoloured = g.vertices_mask
    while uncoloured:
        v = _pick_saturated(g, classes, uncoloured)
        for i, c in enumerate(classes):
            if not g.adj[v] & c and (cap is None or c.bit_count() < cap):
                classes[i] |= 1 << v
                break
        else:
            classes.append(1 << v)
        uncoloured &= ~(1 << v)
    return classes


def _pick_saturated(g: Graph, classes: list[int], uncoloured: int) -> int:
    best_v, best_key = -1, None
    for v in iter_bits(uncoloured):
        sat = sum(1 for c in classes if g.adj[v] & c)
        key = (sat, (g.adj[v] & uncoloured).bit_count(), -v)
        if best_key is None or key > best_key:
            best_v, best_key = v, key
    return best_v


def _bounded_colouring_search(g: Graph, cap: int | None, lower: int, upper: int) -> int:
    """Least k in [lower, upper] with a proper colouring whose classes have at
    most ``cap`` vertices; ``upper`` must be achievable."""
    best = upper
    if best <= lower:
        return best
    classes: list[int] = []

    def rec(uncoloured: int) -> bool:
        nonlocal best
        if not uncoloured:
            best = len(classes)
            return best <= lower
        if cap is not None:
            room = sum(cap - c.bit_count() for c in classes)
            extra = max(0, -(-(uncoloured.bit_count() - room) // cap))
            if len(classes) + extra >= best:
                return False
        v = _pick_saturated(g, classes, uncoloured)
        rest = uncoloured & ~(1 << v)
        bit = 1 << v
        for i in range(len(classes)):
            c = classes[i]
            if g.adj[v] & c or (cap is not None and c.bit_count() >= cap):
                continue
            classes[i] = c | bit
            done = rec(rest)
            classes[i] = c
            if done:
                return True
        if len(classes) + 1 < best:
            classes.append(bit)
            done = rec(rest)
            classes.pop()
            if done:
                return True
        return False

    rec(g.vertices_mask)
    return best


def chromatic_number(g: Graph) -> int:
    """Exact chi(g): clique lower bound, DSATUR upper bound, then DSATUR
    branch-and-bound."""
    if g.n < 1:
        raise ValueError("graph must have at least one vertex")
    lower = clique_number(g)
    upper = len(dsatur_colouring(g))
    return _bounded_colouring_search(g, None, lower, upper)


def t_bounded_chromatic(g: Graph, t: int) -> int:
    """Least k admitting a proper colouring with all classes of size <= t."""
    if not 1 <= t <= g.n:
        raise ValueError(f"need 1 <= t <= n, got t={t}, n={g.n}")
    if t == 1:
        return g.n
    lower = max(clique_number(g), -(-g.n // t))
    upper = len(dsatur_colouring(g, cap=t))
    return _bounded_colouring_search(g, t, lower, upper)


# -- cocolouring ---------------------------------------------------------

_SINGLE, _INDEP, _CLIQUE = 0, 1, 2


def _cocolour_order(g: Graph) -> list[int]:
    # Vertices of extreme degree constrain class types earliest.
    mid = (g.n - 1) / 2
    return sorted(range(g.n), key=lambda v: (-abs(g.degree(v) - mid), v))


def cochromatic_number(g: Graph) -> int:
    """Exact zeta(g) by branch-and-bound over classes typed independent or
    clique; a class's type is fixed when it receives its second vertex."""
    if g.n < 1:
        raise ValueError("graph must have at least one vertex")
    best = greedy_cocolouring(g)
    if best == 1:
        return 1
    adj = g.adj
    order = _cocolour_order(g)
    masks: list[int] = []
    types: list[int] = []

    def rec(i: int) -> bool:
        nonlocal best
        if i == len(order):
            best = len(masks)
            return best == 1
        v = order[i]
        bit = 1 << v
        av = adj[v]
        for c in range(len(masks)):
            m, ty = masks[c], types[c]
            if ty == _SINGLE:
                nty = _CLIQUE if av & m else _INDEP
            elif ty == _INDEP:
                if av & m:
                    continue
                nty = _INDEP
            else:
                if m & ~av:
                    continue
                nty = _CLIQUE
            masks[c] = m | bit
            types[c] = nty
            done = rec(i + 1)
            masks[c] = m
            types[c] = ty
            if done:
                return True
        if len(masks) + 1 < best:
            masks.append(bit)
            types.append(_SINGLE)
            done = rec(i + 1)
            masks.pop()
            types.pop()
            if done:
                return True
        return False

    rec(0)
    return best


def greedy_cocolouring_classes(g: Graph) -> list[int]:
    """Repeatedly remove a maximum independent set or maximum clique of the
    remaining graph, whichever is larger (independent set on ties)."""
    classes = []
    remaining = g.vertices_mask
    while remaining:
        verts = bits_to_list(remaining)
        h = g.induced(remaining)
        ind = max_independent_set(h)
        cl = max_clique(h)
        chosen = ind if len(ind) >= len(cl) else cl
        m = 0
        for i in chosen:
            m |= 1 << verts[i]
        classes.append(m)
        remaining &= ~m
    return classes


def greedy_cocolouring(g: Graph) -> int:
    return len(greedy_cocolouring_classes(g))


# -- counting ------------------------------------------------------------

def _count_partitions(g: Graph, profile: Profile, homogeneous) -> int:
    """Unordered partitions of V(g) realising ``profile`` whose classes all
    satisfy ``homogeneous(class_mask, new_vertex, class_type)``."""
    profile.check(g.n, complete=True)
    if not profile.is_integer:
        raise ProfileError("counting needs an integer profile")
    need = [0] + [int(c) for c in profile.counts]
    adj = g.adj

    def extend(rem: int, cls: int, size: int, target: int, ty: int, cand: int) -> int:
        # Grow class cls (containing the lowest remaining vertex) to ``target``
        # using candidates above the last added vertex.
        if size == target:
            return place(rem & ~cls)
        total = 0
        while cand and cand.bit_count() >= target - size:
            low = cand & -cand
            cand ^= low
            w = low.bit_length() - 1
            nty = homogeneous(adj, cls, w, ty)
            if nty is None:
                continue
            total += extend(rem, cls | low, size + 1, target, nty, cand)
        return total

    def place(rem: int) -> int:
        if not rem:
            return 1
        low = rem & -rem
        v = low.bit_length() - 1
        total = 0
        for u in range(1, len(need)):
            if need[u]:
                need[u] -= 1
                total += extend(rem, low, 1, u, _SINGLE, rem & ~low & ~(low - 1))
                need[u] += 1
        return total

    return place(g.vertices_mask)


def _indep_rule(adj, cls, w, ty):
    return _INDEP if not adj[w] & cls else None


def _co_rule(adj, cls, w, ty):
    a = adj[w] & cls
    if ty == _SINGLE:
        return _CLIQUE if a else _INDEP
    if ty == _INDEP:
        return _INDEP if not a else None
    return _CLIQUE if a == cls else None


def count_colourings_with_profile(g: Graph, k: Profile) -> ColouringCounts:
    """Exact numbers of ordered and unordered proper colourings with profile k."""
    un = _count_partitions(g, k, _indep_rule)
    return ColouringCounts(ordered=un * k.multiplicity_factorial(), unordered=un)


def count_cocolourings_with_profile(g: Graph, k: Profile) -> ColouringCounts:
    """As :func:`count_colourings_with_profile` with every class independent or
    a clique."""
    un = _count_partitions(g, k, _co_rule)
    return ColouringCounts(ordered=un * k.multiplicity_factorial(), unordered=un)


def chi_minus_zeta(g: Graph) -> int:
    return chromatic_number(g) - cochromatic_number(g)


def x_alpha_bound_holds(g: Graph) -> tuple[bool, dict]:
    """Check chi_{alpha-1}(g) <= chi(g) + X_alpha for a graph with alpha >= 2."""
    from chizeta.search import count_independent_sets, independence_number

    a = independence_number(g)
    chi = chromatic_number(g)
    x = count_independent_sets(g, a)
    chi_t = t_bounded_chromatic(g, a - 1) if a >= 2 else g.n
    return chi_t <= chi + x, {"alpha": a, "chi": chi, "x_alpha": x, "chi_t": chi_t}


__all__ = [
    "ColouringCounts",
    "chromatic_number",
    "t_bounded_chromatic",
    "cochromatic_number",
    "count_colourings_with_profile",
    "count_cocolourings_with_profile",
    "greedy_cocolouring",
    "greedy_cocolouring_classes",
    "dsatur_colouring",
]
