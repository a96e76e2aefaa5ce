"""Partition-structure machinery for the second-moment argument on
cocolourings: z-composedness, the events B/C/D and their clique variants,
relevant partition pairs, overlap classification, and exhaustive
small-n oracles."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

import numpy as np

from chizeta.graph import Graph, complement
from chizeta.partition import OrderedPartition, ordered_partitions
from chizeta.profile import Profile, ProfileError
from chizeta.search import cliques_in_range, independent_sets_in_range

MAX_RATIO_N = 7
MAX_SECOND_MOMENT_N = 6


def z_composed(s: int, pi: OrderedPartition) -> int:
    """Number of parts of pi meeting the vertex set s."""
    if s & ~pi.covered:
        raise ValueError("set contains vertices not covered by the partition")
    return sum(1 for p in pi.parts if p & s)


def d_threshold(n: int) -> int:
    """Integer cap for event D: ceil(ln^3 n / 2)."""
    return math.ceil(math.log(n) ** 3 / 2) if n > 1 else 0


def relevance_cap(n: int) -> float:
    return math.log(n) ** 3 if n > 1 else 0.0


def _straddle_ok(z: int, size: int, alpha: int) -> bool:
    return z <= 2 or z >= size - 2 * (alpha - size) - 1


def _split_ok(s: int, size: int, parts: tuple[int, ...]) -> bool:
    # z(S, pi) = 2 case: one part takes a single vertex, another the rest.
    inter = [(s & p).bit_count() for p in parts if s & p]
    return len(inter) == 2 and sorted(inter) == [1, size - 1] if size > 2 else inter == [1, 1]


def _near_part(s: int, parts: tuple[int, ...]) -> bool:
    return any((s & p).bit_count() >= p.bit_count() - 1 for p in parts)


@dataclass(frozen=True)
class SetFlags:
    B: bool
    C: bool
    D: bool
    d_count: int


def _flags_for_sets(sets: list[int], pi: OrderedPartition, alpha: int, cap: int) -> SetFlags:
    B = C = True
    d_count = 0
    parts = pi.parts
    for s in sets:
        size = s.bit_count()
        z = sum(1 for p in parts if p & s)
        if not _straddle_ok(z, size, alpha):
            B = False
        if z == 2:
            if not _split_ok(s, size, parts):
                C = False
            if _near_part(s, parts):
                d_count += 1
    return SetFlags(B, C, d_count <= cap, d_count)


@dataclass(frozen=True)
class EventFlags:
    A: bool  # pi is a colouring
    A_co: bool  # pi is a cocolouring
    B: bool
    C: bool
    D: bool
    B_clique: bool
    C_clique: bool
    D_clique: bool
    d_count: int = 0
    d_count_clique: int = 0

    @property
    def B_co(self) -> bool:
        return self.B and self.B_clique

    @property
    def C_co(self) -> bool:
        return self.C and self.C_clique

    @property
    def D_co(self) -> bool:
        return self.D and self.D_clique

    @property
    def Z_indicator(self) -> bool:
        return self.A and self.B and self.C and self.D

    @property
    def Zco_indicator(self) -> bool:
        return self.A_co and self.B_co and self.C_co and self.D_co


def evaluate_events(g: Graph, pi: OrderedPartition, u_star: int, alpha: int,
                    _sets: tuple[list[int], list[int]] | None = None) -> EventFlags:
    """All event flags of pi in g, quantifying over independent sets (and
    cliques, for the clique variants) S with u_star <= |S| <= alpha - 1."""
    if not pi.is_complete() or pi.n != g.n:
        raise ValueError("partition must cover all vertices of g")
    if u_star > alpha - 1:
        raise ValueError("need u_star <= alpha - 1")
    if _sets is None:
        ind = independent_sets_in_range(g, u_star, alpha - 1)
        cl = cliques_in_range(g, u_star, alpha - 1)
    else:
        ind, cl = _sets
    cap = d_threshold(g.n)
    fi = _flags_for_sets(ind, pi, alpha, cap)
    fc = _flags_for_sets(cl, pi, alpha, cap)
    return EventFlags(
        A=pi.is_colouring(g),
        A_co=pi.is_cocolouring(g),
        B=fi.B, C=fi.C, D=fi.D,
        B_clique=fc.B, C_clique=fc.C, D_clique=fc.D,
        d_count=fi.d_count, d_count_clique=fc.d_count,
    )


# -- relevant pairs --------------------------------------------------------

def _check_same_profile(pi: OrderedPartition, pi2: OrderedPartition) -> None:
    if pi.n != pi2.n or pi.covered != pi2.covered:
        raise ProfileError("partitions must cover the same vertex set")
    if pi.profile() != pi2.profile():
        raise ProfileError("partitions must share a profile")


def relevance_conditions(pi: OrderedPartition, pi2: OrderedPartition, alpha: int) -> dict[str, bool]:
    """The six sub-conditions: a1/a2/a3 for parts of pi2 against pi, and
    b1/b2/b3 with the roles swapped."""
    _check_same_profile(pi, pi2)
    cap = relevance_cap(pi.n)
    out = {}
    for tag, p, q in (("a", pi, pi2), ("b", pi2, pi)):
        c1 = c2 = True
        near = 0
        for part in q.parts:
            size = part.bit_count()
            z = z_composed(part, p)
            if not _straddle_ok(z, size, alpha):
                c1 = False
            if z == 2:
                if not _split_ok(part, size, p.parts):
                    c2 = False
                if _near_part(part, p.parts):
                    near += 1
        out[f"{tag}1"] = c1
        out[f"{tag}2"] = c2
        out[f"{tag}3"] = near <= cap
    return out


def is_relevant_pair(pi: OrderedPartition, pi2: OrderedPartition, alpha: int) -> bool:
    return all(relevance_conditions(pi, pi2, alpha).values())


# -- overlap ---------------------------------------------------------------

BANDS = ("scrambled", "middle", "similar")


@dataclass(frozen=True)
class PairClassification:
    ell_u: dict
    ell: int
    lam: Fraction
    band: str
    c0: float
    lower: float = field(default=0.0)  # ln^{-3} n
    upper: float = field(default=1.0)  # 1 - n^{-c0}


def band_of(lam, n: int, c0: float) -> tuple[str, float, float]:
    lower = math.log(n) ** -3 if n > 1 else math.inf
    upper = 1 - n ** -c0
    if lam < lower:
        return "scrambled", lower, upper
    if lam > upper:
        return "similar", lower, upper
    return "middle", lower, upper


def classify_pair(pi: OrderedPartition, pi2: OrderedPartition, n: int, c0: float) -> PairClassification:
    """Identical-part counts ell_u, overlap lambda = sum ell_u u / n and the
    scrambled/middle/similar band (middle closed, the others open)."""
    _check_same_profile(pi, pi2)
    common = pi.part_set() & pi2.part_set()
    ell_u: dict[int, int] = {}
    for p in common:
        ell_u[p.bit_count()] = ell_u.get(p.bit_count(), 0) + 1
    lam = Fraction(sum(u * c for u, c in ell_u.items()), n)
    band, lo, hi = band_of(lam, n, c0)
    return PairClassification(dict(sorted(ell_u.items())), sum(ell_u.values()), lam, band, c0, lo, hi)


def common_parts(pi: OrderedPartition, pi2: OrderedPartition) -> int:
    return len(pi.part_set() & pi2.part_set())


# -- exhaustive oracles ------------------------------------------------------

def _pair_index(n: int) -> dict[tuple[int, int], int]:
    return {pr: i for i, pr in enumerate(combinations(range(n), 2))}


def _part_pair_masks(pi: OrderedPartition, index: dict) -> list[int]:
    out = []
    for p in pi.parts:
        vs = [v for v in range(pi.n) if p >> v & 1]
        m = 0
        for pr in combinations(vs, 2):
            m |= 1 << index[pr]
        out.append(m)
    return out


def _all_edge_masks(n: int) -> np.ndarray:
    N = n * (n - 1) // 2
    return np.arange(1 << N, dtype=np.uint32 if N <= 32 else np.uint64)


def _event_arrays(graphs: np.ndarray, masks: list[int]) -> tuple[np.ndarray, np.ndarray]:
    """Boolean arrays over graphs: pi is a colouring / a cocolouring."""
    col = np.ones(len(graphs), dtype=bool)
    co = np.ones(len(graphs), dtype=bool)
    for m in masks:
        hit = graphs & graphs.dtype.type(m)
        empty = hit == 0
        col &= empty
        co &= empty | (hit == m)
    return col, co


@dataclass
class RatioReport:
    n: int
    profile: str
    k: int
    graphs: int
    canonical_colouring: int  # graphs in which the canonical pi is a colouring
    canonical_cocolouring: int
    total_colourings: int  # sum over graphs and partitions
    total_cocolourings: int
    equality_holds: bool
    pair_levels: dict = field(default_factory=dict)  # ell -> {pairs, max_ratio, holds}
    inequality_holds: bool = True

    def to_json(self) -> dict:
        levels = {
            str(l): {**v, "max_ratio": None if v["max_ratio"] is None else str(v["max_ratio"])}
            for l, v in sorted(self.pair_levels.items())
        }
        return {
            "mode": "ratio",
            "n": self.n,
            "profile": self.profile,
            "k": self.k,
            "graphs": str(self.graphs),
            "canonical_colouring": str(self.canonical_colouring),
            "canonical_cocolouring": str(self.canonical_cocolouring),
            "total_colourings": str(self.total_colourings),
            "total_cocolourings": str(self.total_cocolourings),
            "ratio": str(Fraction(self.total_cocolourings, self.total_colourings))
            if self.total_colourings else None,
            "equality_holds": self.equality_holds,
            "pair_levels": levels,
            "inequality_holds": self.inequality_holds,
        }


def _require_no_singletons(k: Profile) -> None:
    if k[1] != 0:
        raise ProfileError("the 2^k correspondence needs k_1 = 0")


def cocolouring_ratio_oracle(n: int, k: Profile, pairs: bool = True) -> RatioReport:
    """Exhaustive check over all 2^C(n,2) graphs that
    P(pi cocolouring) = 2^k P(pi colouring), and, for every pair of
    partitions sharing ell parts, P(both cocolourings) <= 2^{2k-ell} P(both
    colourings).  Counts are exact integers (probabilities times 2^N)."""
    _require_no_singletons(k)
    k.check(n, complete=True)
    if n > MAX_RATIO_N:
        raise ValueError(f"exhaustive oracle limited to n <= {MAX_RATIO_N}")
    graphs = _all_edge_masks(n)
    index = _pair_index(n)
    parts = list(ordered_partitions(n, k))
    col, co = [], []
    for pi in parts:
        a, b = _event_arrays(graphs, _part_pair_masks(pi, index))
        col.append(a)
        co.append(b)
    kk = k.k
    canon_col, canon_co = int(col[0].sum()), int(co[0].sum())
    tot_col = sum(int(a.sum()) for a in col)
    tot_co = sum(int(b.sum()) for b in co)
    eq = canon_co == (canon_col << kk) and all(
        int(b.sum()) == int(a.sum()) << kk for a, b in zip(col, co)
    )
    rep = RatioReport(n, str(k), kk, len(graphs), canon_col, canon_co, tot_col, tot_co, eq)
    if pairs:
        levels: dict[int, dict] = {l: {"pairs": 0, "max_ratio": None, "holds": True} for l in range(kk + 1)}
        for i, pi in enumerate(parts):
            for j, pj in enumerate(parts):
                ell = common_parts(pi, pj)
                both_co = int(np.count_nonzero(co[i] & co[j]))
                both_col = int(np.count_nonzero(col[i] & col[j]))
                lv = levels[ell]
                lv["pairs"] += 1
                if both_co > (both_col << (2 * kk - ell)):
                    lv["holds"] = False
                if both_col:
                    r = Fraction(both_co, both_col << (2 * kk - ell))
                    if lv["max_ratio"] is None or r > lv["max_ratio"]:
                        lv["max_ratio"] = r
        rep.pair_levels = levels
        rep.inequality_holds = all(v["holds"] for v in levels.values())
    return rep


@dataclass
class SecondMomentReport:
    n: int
    profile: str
    u_star: int
    alpha: int
    graphs: int
    partitions: int
    E_Z: Fraction
    E_Z2: Fraction
    E_Zco: Fraction
    E_Zco2: Fraction
    E_X: Fraction
    E_Xco: Fraction
    ratio_Z: Fraction | None  # E[Z^2] / E[Z]^2
    ratio_Zco: Fraction | None
    pz_bound: Fraction  # E[Zco]^2 / E[Zco^2]
    empirical_P: Fraction  # P(Zco > 0)
    sum_relevant: Fraction  # sum over relevant pairs of P(A^co_pi and A^co_pi')
    sum_all: Fraction
    band_sums: dict  # band -> sum over relevant pairs in that band
    unrelevant_positive_pairs: int  # pairs with positive conditioned probability but not relevant

    def to_json(self) -> dict:
        s = lambda x: None if x is None else str(x)
        return {
            "mode": "secondmoment",
            "n": self.n,
            "profile": self.profile,
            "u_star": self.u_star,
            "alpha": self.alpha,
            "graphs": self.graphs,
            "partitions": self.partitions,
            **{
                key: s(getattr(self, key))
                for key in ("E_Z", "E_Z2", "E_Zco", "E_Zco2", "E_X", "E_Xco", "ratio_Z",
                            "ratio_Zco", "pz_bound", "empirical_P", "sum_relevant", "sum_all")
            },
            "band_sums": {b: str(v) for b, v in self.band_sums.items()},
            "unrelevant_positive_pairs": self.unrelevant_positive_pairs,
        }


def second_moment_ratio_tiny(n: int, k: Profile, u_star: int, alpha: int,
                             c0: float = 1 / 3) -> SecondMomentReport:
    """Exact first and second moments of Z_k and Z^co_k over all graphs on
    n <= 6 vertices, with the relevant-pair restriction of the second-moment
    sum, the Paley-Zygmund bound and the true P(Z^co > 0)."""
    _require_no_singletons(k)
    k.check(n, complete=True)
    if n > MAX_SECOND_MOMENT_N:
        raise ValueError(f"exhaustive second moment limited to n <= {MAX_SECOND_MOMENT_N}")
    if u_star > alpha - 1:
        raise ValueError("need u_star <= alpha - 1")
    graphs = _all_edge_masks(n)
    G = len(graphs)
    index = _pair_index(n)
    parts = list(ordered_partitions(n, k))
    P = len(parts)
    col = np.zeros((P, G), dtype=bool)
    co = np.zeros((P, G), dtype=bool)
    for i, pi in enumerate(parts):
        col[i], co[i] = _event_arrays(graphs, _part_pair_masks(pi, index))

    rel = np.zeros((P, P), dtype=bool)
    band_idx = np.zeros((P, P), dtype=np.int8)
    for i, pi in enumerate(parts):
        for j, pj in enumerate(parts):
            rel[i, j] = is_relevant_pair(pi, pj, alpha)
            band_idx[i, j] = BANDS.index(classify_pair(pi, pj, n, c0).band)

    z_sum = z2_sum = zc_sum = zc2_sum = zc_pos = 0
    x_sum = xc_sum = 0
    rel_sum = all_sum = 0
    band_tot = [0, 0, 0]
    positive = np.zeros((P, P), dtype=bool)
    any_co = co.any(axis=0)
    for gi in np.nonzero(any_co)[0]:
        g = Graph.from_edge_mask(n, int(graphs[gi]))
        sets = (independent_sets_in_range(g, u_star, alpha - 1), cliques_in_range(g, u_star, alpha - 1))
        co_idx = np.nonzero(co[:, gi])[0]
        z = zc = 0
        good = []
        for i in co_idx:
            f = evaluate_events(g, parts[i], u_star, alpha, _sets=sets)
            if f.Z_indicator:
                z += 1
            if f.Zco_indicator:
                zc += 1
                good.append(i)
        x_sum += int(col[:, gi].sum())
        xc_sum += len(co_idx)
        z_sum += z
        z2_sum += z * z
        zc_sum += zc
        zc2_sum += zc * zc
        zc_pos += zc > 0
        all_sum += len(co_idx) ** 2
        sub = rel[np.ix_(co_idx, co_idx)]
        rel_sum += int(sub.sum())
        bsub = band_idx[np.ix_(co_idx, co_idx)]
        for b in range(3):
            band_tot[b] += int((sub & (bsub == b)).sum())
        if good:
            positive[np.ix_(good, good)] = True

    F = lambda x: Fraction(x, G)
    E_Z, E_Z2, E_Zco, E_Zco2 = F(z_sum), F(z2_sum), F(zc_sum), F(zc2_sum)
    ratio = lambda m2, m1: m2 / (m1 * m1) if m1 else None
    return SecondMomentReport(
        n=n, profile=str(k), u_star=u_star, alpha=alpha, graphs=G, partitions=P,
        E_Z=E_Z, E_Z2=E_Z2, E_Zco=E_Zco, E_Zco2=E_Zco2,
        E_X=F(x_sum), E_Xco=F(xc_sum),
        ratio_Z=ratio(E_Z2, E_Z), ratio_Zco=ratio(E_Zco2, E_Zco),
        pz_bound=(E_Zco * E_Zco / E_Zco2) if E_Zco2 else Fraction(0),
        empirical_P=F(zc_pos),
        sum_relevant=F(rel_sum), sum_all=F(all_sum),
        band_sums={b: F(v) for b, v in zip(BANDS, band_tot)},
        unrelevant_positive_pairs=int((positive & ~rel).sum()),
    )


__all__ = [
    "EventFlags",
    "PairClassification",
    "RatioReport",
    "SecondMomentReport",
    "z_composed",
    "evaluate_events",
    "is_relevant_pair",
    "relevance_conditions",
    "classify_pair",
    "cocolouring_ratio_oracle",
    "second_moment_ratio_tiny",
    "complement",
]
