import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from mpmath import mpf

from chizeta.bruteforce import all_graphs
from chizeta.graph import sample_gnp_half
from chizeta.logreal import LogReal
from chizeta.moments import (
    FRACTION_HIGH,
    FRACTION_LOW,
    InconsistentMoments,
    alpha0,
    alpha_data,
    azuma_tail,
    expected_cocolourings,
    expected_colourings,
    fraction_applicable,
    gnm_transfer_ratio,
    mu,
    paley_zygmund_bound,
    window_condition,
    window_scan,
)
from chizeta.profile import Profile, ProfileError
from chizeta.solver import count_cocolourings_with_profile, count_colourings_with_profile

P = Profile.parse
TIGHT = mpf(10) ** -40


def test_alpha0_values():
    assert abs(alpha0(4) - (2 + 2 * mpmath.log(mpmath.e / 2, 2) + 1)) < TIGHT
    assert mpmath.nstr(alpha0(4), 7) == "3.88539"
    assert abs(alpha0(16) - (5 + 2 * mpmath.log(mpmath.e / 2, 2))) < TIGHT
    n = 10**6
    assert abs(alpha0(n * n) - alpha0(n) - (2 * mpmath.log(n, 2) - 2)) < TIGHT
    with pytest.raises(ValueError):
        alpha0(2)


def test_mu_values():
    assert mu(37, 1).isclose(37)
    assert mu(16, 4).isclose(Fraction(1820, 64))
    d = alpha_data(1000)
    assert d.mu_alpha.log >= 0
    assert d.exponent <= 1.2
    with pytest.raises(ValueError):
        mu(5, 6)


def test_band_relations():
    # (alpha0 - alpha) tracks the exponent only up to a slowly decaying o(1);
    # 0.3 is the tolerance that holds over the whole range (see notes).
    for e in np.linspace(2, 7, 120):
        n = int(10**e)
        d = alpha_data(n)
        ln = mpmath.log(n)
        assert d.mu_alpha.log >= 0
        assert abs((d.alpha0 - d.alpha) - d.exponent) <= 0.3
        assert abs(d.mu_alpha_minus_1.log - (ln + d.mu_alpha.log - mpmath.log(ln))) <= 3 + mpmath.log(ln)


def test_window_examples():
    assert window_condition(11105, 0.1).holds
    # n just past a jump of alpha: alpha0 within 0.01 above an integer
    ns, _, holds = window_scan(200_000, 0.1)
    a0 = 2 * np.log2(ns) - 2 * np.log2(np.log2(ns)) + 2 * np.log2(np.e / 2) + 1
    frac = a0 - np.floor(a0)
    near = ns[(frac > 0) & (frac < 0.01) & (ns >= 100)]
    assert len(near) > 0
    for n in near[near >= 1000][:20]:
        # Just past a jump mu_alpha is still n^{0.24..0.28} at these sizes, so
        # the eps = 0.1 window holds; it fails once 0.05 + eps exceeds that.
        w = window_condition(int(n), 0.1)
        assert w.mu_at_least_one and 0.2 < w.data.exponent < 0.3
        assert w.holds
        assert not window_condition(int(n), 0.25).holds
    with pytest.raises(ValueError):
        window_condition(100, 0.45)


def test_scan_agrees_with_exact():
    ns, expo, holds = window_scan(3000, 0.1)
    for i in range(0, len(ns), 97):
        w = window_condition(int(ns[i]), 0.1)
        assert w.holds == bool(holds[i])
        assert abs(float(w.data.exponent) - expo[i]) < 1e-8


def test_fraction_constants():
    assert FRACTION_LOW == pytest.approx(0.9413, abs=5e-5)
    assert FRACTION_HIGH == pytest.approx(0.9578, abs=5e-5)
    with pytest.raises(ValueError):
        fraction_applicable(999, 0.1)


def test_fraction_shrinks_as_eps_grows():
    vals = [fraction_applicable(20_000, e) for e in (0.1, 0.3, 0.4, 0.449)]
    assert all(a > b for a, b in zip(vals, vals[1:]))
    assert vals[-1] < 0.1


def test_expected_colourings_examples():
    e = expected_colourings(4, P("2:2"))
    assert e.isclose(Fraction(3, 2))
    assert expected_colourings(4, P("2:2"), unordered=True).isclose(Fraction(3, 4))
    assert expected_colourings(7, P("1:7")).isclose(math.factorial(7))
    g = expected_colourings(6, P("3:2"), "gnm", m=7)
    assert g.isclose(Fraction(20 * 36, 6435))
    with pytest.raises(ProfileError):
        expected_colourings(4, P("3:2"))


def test_expected_cocolourings_examples():
    assert expected_cocolourings(4, P("2:2")).isclose(6)
    total = sum(count_cocolourings_with_profile(g, P("2:2")).ordered for g in all_graphs(4))
    assert Fraction(total, 64) == 6
    with pytest.raises(ProfileError):
        expected_cocolourings(5, P("2:2,1:1"))


@pytest.mark.parametrize("n,prof", [(3, "2:1,1:1"), (4, "2:2"), (4, "2:1,1:2"), (5, "3:1,2:1"), (5, "2:2,1:1")])
def test_expectations_match_exhaustive(n, prof):
    k = P(prof)
    graphs = list(all_graphs(n))
    col = Fraction(sum(count_colourings_with_profile(g, k).ordered for g in graphs), len(graphs))
    assert LogReal.from_value(col).isclose(expected_colourings(n, k), rel_log=1e-60)
    if k[1] == 0:
        co = Fraction(sum(count_cocolourings_with_profile(g, k).ordered for g in graphs), len(graphs))
        assert co == col * 2**k.k
        assert LogReal.from_value(co).isclose(expected_cocolourings(n, k), rel_log=1e-60)


@pytest.mark.parametrize("n,prof", [(6, "3:2"), (7, "3:1,2:2")])
def test_expectations_match_sampling(n, prof):
    k = P(prof)
    reps = 20_000
    xs = np.array([count_colourings_with_profile(sample_gnp_half(n, s), k).ordered for s in range(reps)])
    se = xs.std(ddof=1) / math.sqrt(reps)
    assert abs(xs.mean() - float(expected_colourings(n, k))) <= 4 * se


def test_cocolouring_ratio_exact():
    for n, prof in [(20, "4:3,3:2,2:1"), (300, "10:20,9:10,5:2")]:
        k = P(prof)
        d = expected_cocolourings(n, k).log - expected_colourings(n, k).log
        assert abs(d - k.k * mpmath.log(2)) < TIGHT


def test_transfer_ratio():
    n = 30
    N = n * (n - 1) // 2
    m = N // 2
    r0 = gnm_transfer_ratio(n, 0)
    assert r0.exact.isclose(1) and r0.asymptotic.isclose(1)
    top = gnm_transfer_ratio(n, N - m)
    assert top.exact.isclose(LogReal.from_value(Fraction(1, math.comb(N, m))), rel_log=1e-60)
    over = gnm_transfer_ratio(n, N - m + 1)
    assert not over.admissible and over.exact.sign == 0
    vals = [gnm_transfer_ratio(n, x).exact for x in range(0, N - m + 1, 7)]
    assert all(a > b for a, b in zip(vals, vals[1:]))


def test_transfer_error_shrinks():
    errs = [gnm_transfer_ratio(n, int(n**1.2)).relative_log_error for n in (500, 2000, 8000)]
    assert errs[0] > errs[1] > errs[2]


def test_azuma():
    assert azuma_tail(50, 0) == 2
    assert abs(azuma_tail(100, mpmath.sqrt(200 * mpmath.log(2))) - 1) < TIGHT
    assert azuma_tail(10**4, mpf(10**4) ** mpf("0.999")) < mpf(10) ** -100


def test_paley_zygmund():
    assert paley_zygmund_bound(3, 9).isclose(1)
    assert paley_zygmund_bound(1, 4).isclose(Fraction(1, 4))
    with pytest.raises(InconsistentMoments):
        paley_zygmund_bound(2, 3)
    # n = 4, Z = cocolouring count with profile 2:2 over all 64 graphs
    zs = [count_cocolourings_with_profile(g, P("2:2")).ordered for g in all_graphs(4)]
    mean = Fraction(sum(zs), 64)
    second = Fraction(sum(z * z for z in zs), 64)
    p_pos = Fraction(sum(z > 0 for z in zs), 64)
    assert paley_zygmund_bound(mean, second) <= LogReal.from_value(p_pos)
