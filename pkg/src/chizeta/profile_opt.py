"""Expected numbers of t-bounded colourings, the L0 variational
approximation, the first-moment threshold k_t(n), and the k*/k_1/k_2
bookkeeping built on it."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import mpmath
from mpmath import mpf

from chizeta import moments
from chizeta.logreal import LogReal, ln_factorial
from chizeta.profile import Profile, ProfileError, ln_d

EXACT_LIMIT = 3000
NEWTON_MAX_ITER = 400


class NonConvergence(RuntimeError):
    """Root finder gave up; ``state`` holds the last bracket."""

    def __init__(self, msg: str, state: dict):
        super().__init__(f"{msg} (state: {state})")
        self.state = state


class BracketError(RuntimeError):
    pass


# -- exact E_{n,k,t} -------------------------------------------------------

@dataclass(frozen=True)
class ExactE:
    value: LogReal
    feasible: bool
    numerator: int = field(repr=False, default=0)  # value = numerator / 2^(scale_bits)
    scale_bits: int = 0

    def __ge__(self, other):
        return self.value >= other

    def __lt__(self, other):
        return self.value < other


def _block_weight(u: int, j: int, h: int) -> int:
    # (uj)! / (u!^j j!) * 2^{j (h u - C(u,2))}
    return (
        math.factorial(u * j)
        // (math.factorial(u) ** j * math.factorial(j))
        << (j * (h * u - math.comb(u, 2)))
    )


def exact_E_nkt(n: int, k: int, t: int) -> ExactE:
    """Expected number of unordered t-bounded k-colourings of G(n, 1/2).

    Dynamic programme over class sizes u = 1..t with state (vertices used,
    classes used).  Every intermediate value is an integer: with
    h = ceil((t-1)/2), the state stores
        sum over partial profiles of  m! / prod(u!^k_u k_u!) * 2^{h m - f}
    so the result is exact; the log is taken only at the end.
    """
    if not (1 <= t and k >= 0 and n >= 0):
        raise ValueError(f"invalid (n, k, t) = ({n}, {k}, {t})")
    t = min(t, n) if n else t
    if n == 0:
        return ExactE(LogReal.one() if k == 0 else LogReal.zero(), k == 0, int(k == 0), 0)
    if k > n or n > k * t or k == 0:
        return ExactE(LogReal.zero(), False, 0, 0)
    h = t // 2  # ceil((t-1)/2)
    states: dict[tuple[int, int], int] = {(0, 0): 1}
    weights: dict[tuple[int, int], int] = {}
    for u in range(1, t + 1):
        nxt: dict[tuple[int, int], int] = {}
        last = u == t
        for (m, c), val in states.items():
            # j size-u classes leave rem_v vertices for rem_c classes of size
            # in (u, t]: rem_c (u+1) <= rem_v <= rem_c t.  The lower bound
            # loosens and the upper bound tightens as j grows.
            rv, rc = n - m, k - c
            j_min = 0 if last else max(0, rc * (u + 1) - rv)
            for j in range(j_min, min(rc, rv // u) + 1):
                rem_v, rem_c = rv - u * j, rc - j
                if last:
                    if rem_v or rem_c:
                        continue
                elif rem_v > rem_c * t:
                    break
                w = weights.get((u, j))
                if w is None:
                    w = weights[(u, j)] = _block_weight(u, j, h)
                mm, cc = m + u * j, c + j
                nxt[(mm, cc)] = nxt.get((mm, cc), 0) + val * math.comb(mm, u * j) * w
        states = nxt
        if not states:
            break
    num = states.get((n, k), 0)
    bits = h * n
    if num == 0:
        return ExactE(LogReal.zero(), False, 0, bits)
    return ExactE(LogReal.from_log(mpmath.log(mpf(num)) - bits * mpmath.log(2)), True, num, bits)


def exact_E_by_profiles(n: int, k: int, t: int) -> LogReal:
    """Same quantity by explicit enumeration of complete t-bounded k-profiles."""
    total = LogReal.zero()
    for p in enumerate_profiles(n, k, t):
        total = total + moments.expected_colourings(n, p, "half", unordered=True)
    return total


def enumerate_profiles(n: int, k: int, t: int):
    """All complete t-bounded profiles with k classes on n vertices."""

    def rec(u: int, mass: int, cnt: int, acc: list[int]):
        if u == 0:
            if mass == n and cnt == k:
                yield Profile(tuple(reversed(acc)))
            return
        rem_v, rem_c = n - mass, k - cnt
        for j in range(0, min(rem_c, rem_v // u) + 1):
            rv, rc = rem_v - u * j, rem_c - j
            if rc <= rv <= rc * (u - 1) or (u == 1 and rv == rc == 0):
                acc.append(j)
                yield from rec(u - 1, mass + u * j, cnt + j, acc)
                acc.pop()

    yield from rec(t, 0, 0, [])


# -- L0 ------------------------------------------------------------------

@dataclass(frozen=True)
class LagrangeSolution:
    n: int
    k: mpf
    t: int
    a: mpf
    b: mpf
    value: mpf
    iterations: int

    def counts(self) -> list[mpf]:
        return [mpmath.exp(self.a + self.b * u - ln_d(u)) for u in range(1, self.t + 1)]

    def residuals(self) -> tuple[mpf, mpf]:
        ku = self.counts()
        return (
            abs(sum(ku) - self.k),
            abs(sum(u * x for u, x in enumerate(ku, 1)) - self.n),
        )


def _check_regime(n, k, t) -> None:
    if not (k > 0 and 1 <= n / k <= t):
        raise ValueError(f"L0 needs 1 <= n/k <= t, got n={n}, k={k}, t={t}")


def _mean_size(b: mpf, lnd: list[mpf]) -> tuple[mpf, mpf, mpf]:
    """(log-partition, mean, variance) of the size distribution ~ e^{bu}/d_u."""
    logs = [b * u - lnd[u - 1] for u in range(1, len(lnd) + 1)]
    top = max(logs)
    w = [mpmath.exp(x - top) for x in logs]
    z = sum(w)
    mean = sum(u * x for u, x in enumerate(w, 1)) / z
    var = sum((u - mean) ** 2 * x for u, x in enumerate(w, 1)) / z
    return top + mpmath.log(z), mean, var


def solve_lagrange(n: int, k, t: int, b0=None) -> LagrangeSolution:
    """Stationary point k_u = e^{a + b u} / d_u of the L0 objective.

    Eliminating a through sum k_u = k leaves one equation in b, the mean
    class size under weights e^{bu}/d_u equals n/k; it is monotone in b and
    solved by bracketed Newton iteration.
    """
    _check_regime(n, k, t)
    k = mpf(k)
    s = mpf(n) / k
    lnd = [ln_d(u) for u in range(1, t + 1)]
    if t == 1 or s == t or s == 1:
        raise ValueError("degenerate regime has no interior stationary point")
    # Mean ~ u where the log-weight b u - ln d_u peaks, i.e. b ~ ln(u 2^{u-1}).
    b = mpf(b0) if b0 is not None else mpmath.log(s) + (s - 1) * mpmath.log(2)
    lo, hi = None, None
    tol = mpf(2) ** (-(mpmath.mp.prec - 24))
    it = 0
    for it in range(1, NEWTON_MAX_ITER + 1):
        _, mean, var = _mean_size(b, lnd)
        g = mean - s
        if g < 0:
            lo = b
        else:
            hi = b
        if abs(g) <= tol * s:
            break
        step = -g / var if var > 0 else None
        nb = b + step if step is not None else None
        if lo is not None and hi is not None:
            if nb is None or not (lo < nb < hi):
                nb = (lo + hi) / 2
        elif nb is None or abs(step) > 50:
            nb = b + (50 if g < 0 else -50)
        if nb == b:
            break
        b = nb
    else:
        raise NonConvergence("L0 Newton iteration cap reached", {"lo": lo, "hi": hi, "b": b})
    logz, _, _ = _mean_size(b, lnd)
    a = mpmath.log(k) - logz
    value = n * mpmath.log(n) - n + k - a * k - b * n
    return LagrangeSolution(n, k, t, a, b, value, it)


def L0_objective(n: int, counts) -> mpf:
    """n log n - n + k - sum k_u log(k_u d_u), with 0 log 0 = 0."""
    out = n * mpmath.log(n) - n
    for u, c in enumerate(counts, 1):
        if c:
            c = mpf(c)
            out += c - c * (mpmath.log(c) + ln_d(u))
    return out


def L0(n: int, k, t: int, mode: str = "relaxed") -> mpf:
    """Supremum of the L0 objective over complete t-bounded k-profiles
    (``relaxed``: real k_u >= 0; ``integer``: the repaired integer profile
    from :func:`optimal_profile`)."""
    _check_regime(n, k, t)
    if mode == "integer":
        return L0_objective(n, optimal_profile(n, int(k), t).counts)
    if mode != "relaxed":
        raise ValueError(f"unknown mode {mode!r}")
    s = mpf(n) / mpf(k)
    if t == 1 or s == t:
        counts = [0] * (t - 1) + [mpf(k)]
        return L0_objective(n, counts)
    if s == 1:
        return L0_objective(n, [mpf(k)])
    return solve_lagrange(n, k, t).value


def L0_corrected(n: int, k, t: int) -> mpf:
    """Relaxed L0 plus the saddle-point correction towards log E_{n,k,t}.

    With W(x) = sum_u x^u / d_u, E_{n,k,t} = n! [x^n] W(x)^k / k!.  Stirling
    for n! and k! and a local limit theorem for the sum of k class sizes
    give log E = L0 + (1/2) log(n/k) - (1/2) log(2 pi k var) + o(1), with var
    the class-size variance under the optimal weights.  When n/k is 1 or t
    the profile is forced and only the Stirling term remains.
    """
    _check_regime(n, k, t)
    s = mpf(n) / mpf(k)
    if t == 1 or s == t or s == 1:
        return L0(n, k, t) + mpmath.log(s) / 2
    sol = solve_lagrange(n, k, t)
    _, _, var = _mean_size(sol.b, [ln_d(u) for u in range(1, t + 1)])
    return sol.value + mpmath.log(s) / 2 - mpmath.log(2 * mpmath.pi * mpf(k) * var) / 2


def dL0_dk(n: int, k, t: int, h=1.0) -> mpf:
    """Central finite difference (L0(k+h) - L0(k-h)) / 2h of relaxed L0."""
    h = mpf(h)
    return (L0(n, mpf(k) + h, t) - L0(n, mpf(k) - h, t)) / (2 * h)


def dL0_dk_analytic(n: int, k, t: int) -> mpf:
    """Envelope-theorem derivative: dL0/dk = -a at the stationary point."""
    return -solve_lagrange(n, k, t).a


# -- threshold -------------------------------------------------------------

@dataclass(frozen=True)
class ThresholdResult:
    n: int
    t: int
    k_threshold: int
    L0_at: mpf | None
    L0_below: mpf | None
    method: str  # "exact_dp" or "L0_bisection"
    E_at: LogReal | None = None
    E_below: LogReal | None = None
    L0c_at: mpf | None = None  # corrected L0, see L0_corrected
    L0c_below: mpf | None = None

    def to_json(self) -> dict:
        f = lambda x: None if x is None else mpmath.nstr(x, 20)
        return {
            "n": self.n,
            "t": self.t,
            "k_threshold": self.k_threshold,
            "L0_at": f(self.L0_at),
            "L0_below": f(self.L0_below),
            "method": self.method,
            "E_at": None if self.E_at is None else self.E_at.to_json(),
            "E_below": None if self.E_below is None else self.E_below.to_json(),
            "L0c_at": f(self.L0c_at),
            "L0c_below": f(self.L0c_below),
        }


def _min_k(pred: Callable[[int], bool], lo: int, hi: int, guess: int | None = None) -> int:
    """Least k in [lo, hi] with pred(k), assuming pred is monotone there and
    pred(hi) holds.  Gallops outward from ``guess`` (default lo), then
    bisects the last gap."""
    g = lo if guess is None else min(max(guess, lo), hi)
    if pred(g):
        good, step = g, 1
        while True:
            probe = max(g - step, lo)
            if probe == good:
                return good
            if not pred(probe):
                bad = probe
                break
            good = probe
            if probe == lo:
                return lo
            step *= 2
    else:
        bad, step = g, 1
        while True:
            probe = min(g + step, hi)
            if probe == bad:
                raise BracketError(f"predicate false on the whole range [{lo}, {hi}]")
            if pred(probe):
                good = probe
                break
            bad = probe
            step *= 2
    while good - bad > 1:
        mid = (good + bad) // 2
        if pred(mid):
            good = mid
        else:
            bad = mid
    return good


def _l0_seed(n: int, t: int, lo: int) -> int:
    # k ~ n / (mean class size); the optimum sits roughly 2.9 below t + 1
    # when t = alpha - 1, never below n/t.
    return max(lo, int(n / max(1.5, t - 1.9)))


def _l0_guess(n: int, t: int, lo: int) -> int | None:
    # Cheap starting point for the exact search; any value is safe.
    try:
        return first_moment_threshold(n, t, "l0").k_threshold
    except (ValueError, BracketError, NonConvergence):
        return None


def first_moment_threshold(n: int, t: int, method: str = "auto") -> ThresholdResult:
    """k_t(n) = min{k : E_{n,k,t} >= 1}.

    ``exact`` runs the exact DP (default for n <= 3000); ``l0`` finds the
    least k with :func:`L0_corrected` >= 0; ``l0_raw`` uses relaxed L0
    itself, which is within O(log^4 n) of log E and so can land a colour
    or two off.
    """
    if t < 2:
        raise ValueError("threshold needs t >= 2")
    if t > n:
        t = n
    if method == "auto":
        method = "exact" if n <= EXACT_LIMIT else "l0"
    lo = -(-n // t)
    if method == "exact":
        cache: dict[int, ExactE] = {}

        def E(k):
            if k not in cache:
                cache[k] = exact_E_nkt(n, k, t)
            return cache[k]

        guess = _l0_guess(n, t, lo)
        kt = _min_k(lambda k: E(k).value >= 1, lo, n, guess)
        below = E(kt - 1).value if kt - 1 >= lo else LogReal.zero()
        at = E(kt).value
        if not (below < 1 <= at):
            raise BracketError(f"post-hoc check failed at n={n}, t={t}, k={kt}")
        # E must increase across the crossing.
        if kt - 1 >= lo and not below < at:
            raise BracketError(f"E not increasing at the threshold n={n}, t={t}")
        l0a = L0(n, kt, t) if 1 <= n / kt <= t else None
        l0b = L0(n, kt - 1, t) if kt - 1 >= 1 and 1 <= n / (kt - 1) <= t else None
        return ThresholdResult(n, t, kt, l0a, l0b, "exact_dp", at, below)
    if method in ("l0", "l0_raw"):
        f = L0_corrected if method == "l0" else L0
        vals: dict[int, mpf] = {}

        def val(k):
            if k not in vals:
                vals[k] = f(n, k, t)
            return vals[k]

        kt = _min_k(lambda k: val(k) >= 0, lo, n, _l0_seed(n, t, lo))
        below = val(kt - 1) if kt - 1 >= lo else None
        if below is not None and not below < 0 <= val(kt):
            raise BracketError(f"L0 bracket check failed at n={n}, t={t}, k={kt}")
        raw_below = L0(n, kt - 1, t) if below is not None else None
        return ThresholdResult(
            n, t, kt, L0(n, kt, t), raw_below,
            "L0_bisection" if method == "l0" else "L0_raw_bisection",
            L0c_at=val(kt), L0c_below=below,
        )
    raise ValueError(f"unknown method {method!r}")


# -- k*, k_1, k_2 --------------------------------------------------------

@dataclass(frozen=True)
class KStar:
    n: int
    eps: mpf
    k_threshold: int  # k_{alpha-1}
    k_star: int
    k_1: int
    k_2: int
    gap: int
    display: mpf  # n^{1-eps/2} - 2 n^{0.999} - n^{1-0.9eps}
    target: mpf  # n^{1-eps}
    crossover_ln_n: mpf | None  # least log n beyond which display >= target; None if never
    window_holds: bool
    gap_ok: bool | None  # None when n is below the crossover

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "eps": float(self.eps),
            "k_threshold": self.k_threshold,
            "k_star": self.k_star,
            "k_1": self.k_1,
            "k_2": self.k_2,
            "gap": self.gap,
            "display": mpmath.nstr(self.display, 15),
            "target": mpmath.nstr(self.target, 15),
            "crossover_log10_n": None
            if self.crossover_ln_n is None
            else mpmath.nstr(self.crossover_ln_n / mpmath.log(10), 15),
            "window_holds": self.window_holds,
            "gap_ok": self.gap_ok,
        }


def gap_display(ln_n, eps) -> mpf:
    """(n^{1-eps/2} - 2 n^{0.999} - n^{1-0.9eps}) / n^{1-eps} as a function of log n."""
    e = mpf(eps)
    s = mpf(ln_n)
    return (
        mpmath.exp(e / 2 * s)
        - 2 * mpmath.exp((e - mpf("0.001")) * s)
        - mpmath.exp(e / 10 * s)
        - 1
    )


def gap_crossover(eps) -> mpf | None:
    """Least log n from which the gap display stays >= n^{1-eps}, or None
    if the n^{0.999} term dominates forever (eps >= 0.002)."""
    e = mpf(eps)
    if e / 2 >= mpf("0.001"):
        return None
    # Divided by n^{1-eps}: n^{eps/2} - 2 n^{eps-0.001} - n^{eps/10} - 1, which
    # is negative at n = 1 and, for eps < 0.002, stays positive once positive.
    f = lambda s: gap_display(s, e)
    hi = mpf(1)
    while f(hi) < 0:
        hi *= 2
    lo = mpf(0)
    for _ in range(mpmath.mp.prec):
        mid = (lo + hi) / 2
        if f(mid) >= 0:
            hi = mid
        else:
            lo = mid
    return hi


def kstar_and_gap(n: int, eps, threshold: ThresholdResult | None = None) -> KStar:
    """k* = k_{alpha-1} - n^{1-eps/2}, k_1 = k_{alpha-1} - n^{1-0.9eps},
    k_2 = k* + 2 n^{0.999} (all rounded down), gap = k_1 - k_2."""
    e = mpf(eps)
    w = moments.window_condition(n, eps)
    a = w.data.alpha
    if threshold is None:
        threshold = first_moment_threshold(n, a - 1)
    kt = threshold.k_threshold
    nn = mpf(n)
    k_star = int(mpmath.floor(kt - nn ** (1 - e / 2)))
    k_1 = int(mpmath.floor(kt - nn ** (1 - mpf("0.9") * e)))
    k_2 = int(mpmath.floor(k_star + 2 * nn ** mpf("0.999")))
    display = nn ** (1 - e / 2) - 2 * nn ** mpf("0.999") - nn ** (1 - mpf("0.9") * e)
    target = nn ** (1 - e)
    cross = gap_crossover(e)
    gap_ok = None
    if cross is not None and mpmath.log(nn) >= cross:
        gap_ok = bool(display >= target)
        if not gap_ok:
            raise AssertionError(f"gap display below n^(1-eps) beyond crossover at n={n}")
    return KStar(n, e, kt, k_star, k_1, k_2, k_1 - k_2, display, target, cross, w.holds, gap_ok)


# -- integer profiles --------------------------------------------------------

def _objective_delta(counts: list[int], lnd: list[mpf], changes: dict[int, int]) -> mpf:
    out = mpf(0)
    for u, dc in changes.items():
        c0 = counts[u - 1]
        c1 = c0 + dc
        for c, sgn in ((c1, 1), (c0, -1)):
            if c:
                out += sgn * (c - c * (mpmath.log(c) + lnd[u - 1]))
    return out


@dataclass(frozen=True)
class RoundedProfile:
    profile: Profile
    relaxed: LagrangeSolution | None
    repaired_units: int


def round_profile(n: int, k: int, t: int) -> RoundedProfile:
    """Integer complete profile near the relaxed optimiser.

    Each k_u is rounded to the nearest integer; the class count is then
    fixed by adding or removing single classes and the vertex count by
    moving classes between adjacent sizes, each step choosing the move with
    the smallest loss in the L0 objective.
    """
    _check_regime(n, k, t)
    if n > k * t or k > n:
        raise ProfileError(f"no complete {t}-bounded {k}-profile on {n} vertices")
    lnd = [ln_d(u) for u in range(1, t + 1)]
    s = mpf(n) / k
    sol = None
    if t == 1 or s == t or s == 1:
        counts = [0] * t
        counts[(t if s == t else 1) - 1] = k
        return RoundedProfile(Profile(tuple(counts)), None, 0)
    sol = solve_lagrange(n, k, t)
    counts = [int(mpmath.nint(x)) for x in sol.counts()]
    units = 0

    def best(moves):
        scored = [(_objective_delta(counts, lnd, mv), i, mv) for i, mv in enumerate(moves)]
        scored.sort(key=lambda x: (-x[0], x[1]))
        return scored[0][2]

    while sum(counts) != k:
        if sum(counts) < k:
            moves = [{u: 1} for u in range(1, t + 1)]
        else:
            moves = [{u: -1} for u in range(1, t + 1) if counts[u - 1] > 0]
        for u, dc in best(moves).items():
            counts[u - 1] += dc
        units += 1
    mass = sum(u * c for u, c in enumerate(counts, 1))
    while mass != n:
        if mass < n:
            moves = [{u: -1, u + 1: 1} for u in range(1, t) if counts[u - 1] > 0]
            delta = 1
        else:
            moves = [{u: -1, u - 1: 1} for u in range(2, t + 1) if counts[u - 1] > 0]
            delta = -1
        if not moves:
            raise ProfileError(f"profile repair failed at n={n}, k={k}, t={t}")
        for u, dc in best(moves).items():
            counts[u - 1] += dc
        mass += delta
        units += 1
    return RoundedProfile(Profile(tuple(counts)), sol, units)


def optimal_profile(n: int, k: int, t: int) -> Profile:
    return round_profile(n, k, t).profile


# -- tameness ----------------------------------------------------------------

def default_gamma(x) -> float:
    return math.log2(x + 2)


@dataclass(frozen=True)
class TameResult:
    tail_ok: bool
    expectation_ok: bool
    worst_tail_u: int | None  # size where the tail bound is tightest/violated
    ln_expectation: mpf
    expectation_floor: mpf


def is_tame(profile: Profile, n: int, gamma: Callable = default_gamma, c=0.25,
            alpha: int | None = None) -> TameResult:
    """Finite-n check of the two tameness conditions.

    tail: u k_u / n < 2^{-(alpha-u) gamma(alpha-u)} for 1 <= u <= alpha-1;
    expectation: ln E_m[unordered X_k] >= -n^{1-c} (the weakest checkable
    form of ">> -n^{1-c}").
    """
    a = moments.alpha(n) if alpha is None else alpha
    profile.check(n, complete=True)
    if not profile.is_bounded(a - 1):
        raise ProfileError(f"profile {profile} is not ({a}-1)-bounded")
    tail_ok = True
    worst, worst_margin = None, None
    for u in range(1, a):
        lhs = mpf(u * profile[u]) / n
        rhs = mpmath.power(2, -(a - u) * mpf(gamma(a - u)))
        margin = lhs / rhs
        if worst_margin is None or margin > worst_margin:
            worst, worst_margin = u, margin
        if not lhs < rhs:
            tail_ok = False
    ln_e = moments.expected_colourings(n, profile, "gnm", unordered=True)
    ln_e = ln_e.log if ln_e.sign else mpmath.ninf
    floor = -mpmath.power(n, 1 - mpf(c))
    return TameResult(tail_ok, bool(ln_e >= floor), worst, ln_e, floor)


def middle_condition_margin(n: int, k: Profile, ell: Profile) -> mpf:
    """ln E[unordered X_ell] - ln^6 n - 2 sum ln C(k_u, ell_u) for a partial
    profile ell <= k; non-negative when the middle-range condition holds."""
    for u in range(1, max(k.t, ell.t) + 1):
        if ell[u] > k[u]:
            raise ProfileError("ell must satisfy ell_u <= k_u")
    lhs = moments.expected_colourings(n, ell, "half", unordered=True).log
    rhs = mpmath.log(n) ** 6
    for u, c in k.items():
        rhs += 2 * (ln_factorial(c) - ln_factorial(ell[u]) - ln_factorial(c - ell[u]))
    return lhs - rhs
