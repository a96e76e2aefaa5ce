"""Closed-form expectations and threshold-window quantities for G(n, 1/2).

All values are evaluated at the mpmath working precision (256 bits by
default).  Finite-n tolerances used by the band checks are artifact choices:
the underlying relations only hold up to o(1) terms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath
import numpy as np
from mpmath import mpf

from chizeta.logreal import LogReal, ln_binomial, ln_factorial, log_int
from chizeta.profile import Profile, ProfileError

# Limit band of the fraction of n to which the window condition applies.
FRACTION_LOW = (2 ** (-0.05 / 2) - 2 ** -0.5) / (1 - 2 ** -0.5)
FRACTION_HIGH = (1 - 2 ** (-0.95 / 2)) / (1 - 2 ** -0.5)


def alpha0(n) -> mpf:
    """2 log2 n - 2 log2 log2 n + 2 log2(e/2) + 1."""
    if n <= 2:
        raise ValueError(f"alpha0 needs n >= 3, got {n}")
    n = mpf(n)
    l2 = mpmath.log(n, 2)
    return 2 * l2 - 2 * mpmath.log(l2, 2) + 2 * mpmath.log(mpmath.e / 2, 2) + 1


def alpha(n) -> int:
    return int(mpmath.floor(alpha0(n)))


def ln_mu(n: int, t: int) -> mpf:
    """log of mu_t = C(n, t) 2^{-C(t, 2)}."""
    return ln_binomial(n, t) - math.comb(t, 2) * mpmath.log(2)


def mu(n: int, t: int) -> LogReal:
    """Expected number of independent t-sets in G(n, 1/2)."""
    if not 0 <= t <= n:
        raise ValueError(f"need 0 <= t <= n, got t={t}, n={n}")
    return LogReal.from_log(ln_mu(n, t))


@dataclass(frozen=True)
class AlphaData:
    n: int
    alpha0: mpf
    alpha: int
    mu_alpha: LogReal
    mu_alpha_minus_1: LogReal
    exponent: mpf  # log mu_alpha / log n

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "alpha0": mpmath.nstr(self.alpha0, 20),
            "alpha": self.alpha,
            "log_mu_alpha": mpmath.nstr(self.mu_alpha.log, 20),
            "mu_alpha": self.mu_alpha.to_json(),
            "mu_alpha_minus_1": self.mu_alpha_minus_1.to_json(),
            "exponent": mpmath.nstr(self.exponent, 20),
        }


def alpha_data(n: int) -> AlphaData:
    a0 = alpha0(n)
    a = int(mpmath.floor(a0))
    m = mu(n, a)
    return AlphaData(n, a0, a, m, mu(n, a - 1), m.log / mpmath.log(n))


@dataclass(frozen=True)
class WindowResult:
    holds: bool
    data: AlphaData
    lower_ok: bool  # n^{0.05+eps} <= mu_alpha
    upper_ok: bool  # mu_alpha <= n^{1-eps}
    mu_at_least_one: bool


def _check_eps(eps) -> None:
    if not 0 < eps < 0.45:
        raise ValueError(f"eps must lie in (0, 0.45), got {eps}")


def window_condition(n: int, eps) -> WindowResult:
    """n^{0.05+eps} <= mu_alpha <= n^{1-eps}, compared in log space."""
    _check_eps(eps)
    d = alpha_data(n)
    ln_n = mpmath.log(n)
    eps = mpf(eps)
    lo = d.mu_alpha.log >= (mpf("0.05") + eps) * ln_n
    hi = d.mu_alpha.log <= (1 - eps) * ln_n
    return WindowResult(bool(lo and hi), d, bool(lo), bool(hi), d.mu_alpha.log >= 0)


def window_scan(n_max: int, eps, n_min: int = 3) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorised window check for every n in [n_min, n_max].

    Returns (n, exponent log mu_alpha / log n, holds).  Double precision is
    used throughout; any n whose alpha or window decision lies within 1e-9 of
    a boundary is re-decided at full precision.
    """
    _check_eps(eps)
    ns = np.arange(n_min, n_max + 1, dtype=np.float64)
    l2 = np.log2(ns)
    a0 = 2 * l2 - 2 * np.log2(l2) + 2 * np.log2(np.e / 2) + 1
    a = np.floor(a0).astype(np.int64)
    # log C(n, a) = sum_{i<a} log(n - i) - log a!
    amax = int(a.max())
    lc = np.zeros_like(ns)
    for i in range(amax):
        active = a > i
        lc[active] += np.log(ns[active] - i)
    lgam = np.array([math.lgamma(x + 1) for x in range(amax + 1)])
    lmu = lc - lgam[a] - (a * (a - 1) / 2) * math.log(2)
    ln_n = np.log(ns)
    lo_b = (0.05 + eps) * ln_n
    hi_b = (1 - eps) * ln_n
    holds = (lmu >= lo_b) & (lmu <= hi_b)
    near = (
        (np.abs(a0 - np.round(a0)) < 1e-9)
        | (np.abs(lmu - lo_b) < 1e-9)
        | (np.abs(lmu - hi_b) < 1e-9)
    )
    exponent = lmu / ln_n
    for idx in np.nonzero(near)[0]:
        w = window_condition(int(ns[idx]), eps)
        holds[idx] = w.holds
        exponent[idx] = float(w.data.exponent)
    return ns.astype(np.int64), exponent, holds


def fraction_applicable(n_max: int, eps) -> float:
    """Fraction of 3 <= n' <= n_max for which the window condition holds."""
    if n_max < 1000:
        raise ValueError(f"n_max must be >= 1000, got {n_max}")
    _, _, holds = window_scan(n_max, eps)
    return float(holds.mean())


def _profile_for(n: int, k: Profile) -> Profile:
    if not isinstance(k, Profile):
        k = Profile.from_mapping(k)
    k.check(n)
    return k


def expected_colourings(n: int, k: Profile, model: str = "half", m: int | None = None,
                        unordered: bool = False) -> LogReal:
    """E[X_k] in G(n, 1/2) (``model="half"``) or G(n, m) (``model="gnm"``,
    default m = floor(N/2)); with ``unordered`` divided by prod k_u!."""
    k = _profile_for(n, k)
    ln = k.ln_P(n)
    if model == "half":
        ln -= k.f * mpmath.log(2)
    elif model == "gnm":
        N = n * (n - 1) // 2
        m = N // 2 if m is None else m
        if k.f > N or N - k.f < m:
            return LogReal.zero()
        ln += ln_binomial(N - k.f, m) - ln_binomial(N, m)
    else:
        raise ValueError(f"unknown model {model!r}")
    if unordered:
        ln -= k.ln_multiplicity_factorial()
    return LogReal.from_log(ln)


def expected_cocolourings(n: int, k: Profile, unordered: bool = False) -> LogReal:
    """E[X^co_k] = 2^k E[X_k] in G(n, 1/2); only valid when k_1 = 0."""
    k = _profile_for(n, k)
    if k[1] != 0:
        raise ProfileError("expected_cocolourings requires k_1 = 0")
    return expected_colourings(n, k, "half", unordered=unordered) * LogReal.from_log(
        k.k * mpmath.log(2)
    )


@dataclass(frozen=True)
class TransferRatio:
    exact: LogReal
    asymptotic: LogReal
    admissible: bool  # False when x > N - m (exact ratio is 0)

    @property
    def relative_log_error(self) -> mpf:
        return abs(self.exact.log - self.asymptotic.log) / abs(self.exact.log)


def gnm_transfer_ratio(n: int, x: int, m: int | None = None) -> TransferRatio:
    """C(N-x, m)/C(N, m) against q^x exp(-(b-1) x^2/n^2), q = 1/2, b = 2."""
    N = n * (n - 1) // 2
    m = N // 2 if m is None else m
    if x < 0:
        raise ValueError("x must be non-negative")
    asym = LogReal.from_log(-x * mpmath.log(2) - mpf(x) ** 2 / mpf(n) ** 2)
    if x > N - m:
        return TransferRatio(LogReal.zero(), asym, False)
    exact = LogReal.from_log(ln_binomial(N - x, m) - ln_binomial(N, m))
    return TransferRatio(exact, asym, True)


def azuma_tail(n: int, t) -> mpf:
    """2 exp(-t^2 / (2n))."""
    if t < 0:
        raise ValueError("t must be non-negative")
    return 2 * mpmath.exp(-mpf(t) ** 2 / (2 * mpf(n)))


class InconsistentMoments(ValueError):
    pass


def paley_zygmund_bound(mean, second_moment) -> LogReal:
    """E[Z]^2 / E[Z^2], a lower bound on P(Z > 0) for Z >= 0."""
    mean = LogReal.from_value(mean)
    second_moment = LogReal.from_value(second_moment)
    if mean.sign < 0 or second_moment.sign < 0:
        raise InconsistentMoments("moments of a non-negative variable must be >= 0")
    if mean.sign == 0:
        return LogReal.zero()
    if second_moment < mean * mean:
        raise InconsistentMoments("E[Z^2] < E[Z]^2")
    return mean * mean / second_moment


def ln_expected_unordered_gnm(n: int, k: Profile) -> mpf:
    return expected_colourings(n, k, "gnm", unordered=True).log


__all__ = [
    "FRACTION_HIGH",
    "FRACTION_LOW",
    "AlphaData",
    "WindowResult",
    "TransferRatio",
    "InconsistentMoments",
    "alpha0",
    "alpha",
    "alpha_data",
    "mu",
    "ln_mu",
    "window_condition",
    "window_scan",
    "fraction_applicable",
    "expected_colourings",
    "expected_cocolourings",
    "gnm_transfer_ratio",
    "azuma_tail",
    "paley_zygmund_bound",
    "ln_factorial",
    "log_int",
]
