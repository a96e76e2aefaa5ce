import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chizeta.cli import random_partition
from chizeta.graph import Graph, complement, mask_of, sample_gnp_half
from chizeta.partition import OrderedPartition
from chizeta.profile import Profile, ProfileError
from chizeta.rng import make_rng
from chizeta.structure import (
    band_of,
    classify_pair,
    evaluate_events,
    is_relevant_pair,
    cocolouring_ratio_oracle,
    relevance_conditions,
    second_moment_ratio_tiny,
    z_composed,
)

P = Profile.parse
OP = OrderedPartition.from_lists


def test_z_composed_examples():
    pi = OP(6, [[0, 1], [2, 3], [4, 5]])
    assert z_composed(mask_of([2, 3]), pi) == 1
    assert z_composed(mask_of([0, 2]), pi) == 2
    assert z_composed(pi.covered, pi) == 3
    partial = OP(6, [[0, 1], [2, 3]])
    with pytest.raises(ValueError):
        z_composed(mask_of([0, 5]), partial)


@given(st.integers(2, 12), st.data())
@settings(max_examples=60, deadline=None)
def test_z_composed_range(n, data):
    seed = data.draw(st.integers(0, 10**6))
    rng = make_rng(seed)
    sizes = []
    left = n
    while left:
        s = int(rng.integers(1, left + 1))
        sizes.append(s)
        left -= s
    k = Profile.from_mapping({s: sizes.count(s) for s in set(sizes)})
    pi = random_partition(n, k, rng)
    s = data.draw(st.integers(1, (1 << n) - 1))
    z = z_composed(s, pi)
    assert 1 <= z <= min(s.bit_count(), pi.k)


def test_events_empty_and_complete():
    n = 5
    singles = OP(n, [[v] for v in range(n)])
    f = evaluate_events(Graph.empty(n), singles, 2, 3)
    assert f.B and f.C
    assert f.d_count == math.comb(n, 2)
    f = evaluate_events(Graph.complete(n), singles, 2, 3)
    assert f.B and f.C and f.D
    assert f.B_clique and f.C_clique and not f.D_clique


def test_events_duality():
    for seed in range(40):
        g = sample_gnp_half(10, seed)
        pi = random_partition(10, P("3:2,2:2"), make_rng(seed, 1))
        a = evaluate_events(g, pi, 2, 4)
        b = evaluate_events(complement(g), pi, 2, 4)
        assert (a.B_clique, a.C_clique, a.D_clique) == (b.B, b.C, b.D)
        assert a.A_co == b.A_co
        assert a.B_co == (a.B and a.B_clique)


def test_events_preconditions():
    g = Graph.empty(4)
    with pytest.raises(ValueError):
        evaluate_events(g, OP(4, [[0, 1]]), 2, 3)
    with pytest.raises(ValueError):
        evaluate_events(g, OP(4, [[0, 1], [2, 3]]), 3, 3)


def test_event_monotonicity():
    # Deleting an edge only adds independent sets, so the independent-set
    # events can only go from true to false; the clique variants the reverse.
    rng = np.random.default_rng(5)
    checked = 0
    for i in range(1000):
        n = int(rng.integers(6, 16))
        g = sample_gnp_half(n, 9000 + i)
        edges = list(g.edges())
        if not edges:
            continue
        u, v = edges[int(rng.integers(len(edges)))]
        h = g.with_edge_toggled(u, v)
        sizes = [3] * (n // 3) + ([n % 3] if n % 3 else [])
        k = Profile.from_mapping({s: sizes.count(s) for s in set(sizes)})
        pi = random_partition(n, k, make_rng(i, 2))
        fg, fh = evaluate_events(g, pi, 2, 5), evaluate_events(h, pi, 2, 5)
        for name in ("B", "C", "D"):
            assert not (getattr(fh, name) and not getattr(fg, name))
            assert not (getattr(fg, name + "_clique") and not getattr(fh, name + "_clique"))
        checked += 1
    assert checked > 900


def test_relevant_identity_and_violation():
    pi = OP(12, [[0, 1, 2, 3, 4], [5, 6, 7, 8, 9], [10, 11]])
    assert is_relevant_pair(pi, pi, 5)
    # a 5-part meeting three parts: z = 3 < 5 - 2(5 - 5) - 1 = 4
    pi2 = OP(12, [[0, 1, 2, 5, 10], [3, 4, 6, 7, 8], [9, 11]])
    cond = relevance_conditions(pi, pi2, 5)
    assert not cond["a1"]
    assert not is_relevant_pair(pi, pi2, 5)
    with pytest.raises(ProfileError):
        is_relevant_pair(pi, OP(12, [[0, 1, 2, 3], [4, 5, 6, 7], [8, 9, 10, 11]]), 5)


def _relevant_naive(pi, pi2, alpha, n):
    """Second implementation of the definition on Python sets."""
    A = [set(p) for p in pi]
    B = [set(p) for p in pi2]

    def side(X, Y):
        near = 0
        for part in Y:
            u = len(part)
            meets = [x for x in X if x & part]
            z = len(meets)
            if not (z <= 2 or z >= u - 2 * (alpha - u) - 1):
                return False
            if z == 2:
                a, b = (len(m & part) for m in meets)
                if sorted((a, b)) != sorted((1, u - 1)):
                    return False
                if any(len(x & part) >= len(x) - 1 for x in X):
                    near += 1
        return near <= math.log(n) ** 3

    return side(A, B) and side(B, A)


@pytest.mark.parametrize("prof,both", [("3:5", False), ("5:3", True)])
def test_relevance_double_entry_and_symmetry(prof, both):
    # With 3-parts and alpha = 5 every condition is vacuous; 5-parts are not.
    n, k, alpha = 15, P(prof), 5
    rng = make_rng(123)
    seen = set()
    for i in range(400):
        pi = random_partition(n, k, rng)
        if i % 2:
            # partner close to pi: swap two vertices between two parts
            parts = pi.as_lists()
            a, b = rng.choice(len(parts), 2, replace=False)
            parts[a][0], parts[b][0] = parts[b][0], parts[a][0]
            pi2 = OP(n, parts)
        else:
            pi2 = random_partition(n, k, rng)
        r = is_relevant_pair(pi, pi2, alpha)
        assert r == _relevant_naive(pi.as_lists(), pi2.as_lists(), alpha, n)
        assert r == is_relevant_pair(pi2, pi, alpha)
        seen.add(r)
    assert seen == ({True, False} if both else {True})


def test_classify_examples():
    pi = OP(12, [[0, 1, 2], [3, 4, 5], [6, 7, 8], [9, 10, 11]])
    c = classify_pair(pi, pi, 12, 0.5)
    assert c.lam == 1 and c.band == "similar" and c.ell == 4 and c.ell_u == {3: 4}
    other = OP(12, [[0, 3, 6], [1, 4, 9], [2, 7, 10], [5, 8, 11]])
    c = classify_pair(pi, other, 12, 0.5)
    assert c.lam == 0 and c.band == "scrambled"
    half = OP(12, [[0, 1, 2], [3, 4, 5], [6, 9, 10], [7, 8, 11]])
    for c0 in (0.1, 0.3, 0.5):
        c = classify_pair(pi, half, 12, c0)
        assert c.lam == Fraction(1, 2)
        middle = math.log(12) ** -3 <= 0.5 <= 1 - 12**-c0
        assert (c.band == "middle") == middle


def test_bands_partition_unit_interval():
    n, c0 = 50, 0.3
    lo, hi = math.log(n) ** -3, 1 - n**-c0
    assert band_of(lo, n, c0)[0] == "middle"
    assert band_of(hi, n, c0)[0] == "middle"
    assert band_of(lo * (1 - 1e-12), n, c0)[0] == "scrambled"
    assert band_of(hi + 1e-12, n, c0)[0] == "similar"
    for lam in np.linspace(0, 1, 101):
        assert band_of(lam, n, c0)[0] in ("scrambled", "middle", "similar")


def test_ratio_oracle_n4():
    r = cocolouring_ratio_oracle(4, P("2:2"))
    assert (r.canonical_colouring, r.canonical_cocolouring) == (16, 64)
    assert r.graphs == 64 and r.equality_holds and r.inequality_holds
    assert r.total_cocolourings == 4 * r.total_colourings
    # pi = pi' (ell = k): met with equality
    assert r.pair_levels[2]["max_ratio"] == 1


def test_ratio_oracle_n6_levels():
    r = cocolouring_ratio_oracle(6, P("3:2"))
    assert r.equality_holds and r.inequality_holds
    assert r.pair_levels[1]["pairs"] == 0  # two 3-parts: sharing one forces sharing both
    r = cocolouring_ratio_oracle(6, P("2:3"))
    assert r.pair_levels[1]["pairs"] > 0 and r.pair_levels[1]["holds"]
    assert r.inequality_holds


def test_ratio_oracle_rejects():
    with pytest.raises(ProfileError):
        cocolouring_ratio_oracle(4, P("2:1,1:2"))
    with pytest.raises(ValueError):
        cocolouring_ratio_oracle(8, P("2:4"))


@pytest.mark.parametrize("n,prof,u_star,alpha", [(4, "2:2", 2, 3), (5, "3:1,2:1", 2, 4),
                                                  (6, "3:2", 2, 4), (6, "3:2", 3, 5)])
def test_second_moment_tiny(n, prof, u_star, alpha):
    k = P(prof)
    r = second_moment_ratio_tiny(n, k, u_star, alpha)
    assert r.pz_bound <= r.empirical_P
    assert r.sum_relevant <= r.sum_all
    assert r.E_Xco == 2**k.k * r.E_X
    if r.E_Z == r.E_X and r.E_Zco == r.E_Xco:
        assert r.E_Zco == 2**k.k * r.E_Z
    assert sum(r.band_sums.values()) == r.sum_relevant
    assert r.unrelevant_positive_pairs == 0
    if r.E_Zco:
        assert r.E_Zco2 >= r.E_Zco**2


def test_second_moment_rejects():
    with pytest.raises(ValueError):
        second_moment_ratio_tiny(7, P("3:1,2:2"), 2, 4)
    with pytest.raises(ValueError):
        second_moment_ratio_tiny(4, P("2:2"), 3, 3)


def test_conditioned_cocolourings_can_exceed_2k():
    # The B/C/D conditioning removes more colourings than cocolourings here:
    # clique parts hold no independent 3-sets, so D binds less often.
    r = second_moment_ratio_tiny(6, P("3:2"), 2, 4)
    assert (r.E_Z, r.E_Zco) == (Fraction(1055, 8192), Fraction(2405, 4096))
    assert r.E_Zco > 4 * r.E_Z
