"""Signed numbers stored as (sign, natural log of magnitude).

Expected counts in G(n, 1/2) range over e^{+-n log n}, far outside float
range, so every moment in the package is returned as a LogReal backed by an
mpmath float at the working precision (default 256 bits).
"""

from __future__ import annotations

import math
from fractions import Fraction
from numbers import Integral

import mpmath
from mpmath import mpf

DEFAULT_PRECISION = 256


def set_precision(bits: int) -> None:
    """Set the mpmath working precision used by all moment computations."""
    if bits < 53:
        raise ValueError(f"precision must be at least 53 bits, got {bits}")
    mpmath.mp.prec = bits


if mpmath.mp.prec < DEFAULT_PRECISION:
    set_precision(DEFAULT_PRECISION)


def log_int(x: int) -> mpf:
    """Natural log of a positive Python integer, exact to working precision."""
    if x <= 0:
        raise ValueError("log of non-positive integer")
    return mpmath.log(mpf(x))


def ln_factorial(x) -> mpf:
    if x < 0:
        raise ValueError("factorial of negative number")
    if isinstance(x, Integral) and x < 2000:
        return mpmath.log(mpf(math.factorial(int(x))))
    return mpmath.loggamma(mpf(x) + 1)


def ln_binomial(a, b) -> mpf:
    """log C(a, b) for 0 <= b <= a."""
    if b < 0 or b > a:
        raise ValueError(f"binomial C({a}, {b}) is zero")
    if isinstance(a, Integral) and isinstance(b, Integral) and min(b, a - b) < 200:
        return log_int(math.comb(int(a), int(b)))
    return ln_factorial(a) - ln_factorial(b) - ln_factorial(a - b)


class LogReal:
    """A real number x represented as sign(x) * exp(log_magnitude)."""

    __slots__ = ("sign", "log_magnitude")

    def __init__(self, sign: int, log_magnitude=None):
        if sign not in (-1, 0, 1):
            raise ValueError(f"sign must be -1, 0 or 1, got {sign}")
        if sign == 0:
            self.sign = 0
            self.log_magnitude = mpmath.ninf
        else:
            if log_magnitude is None or mpmath.isinf(log_magnitude) or mpmath.isnan(log_magnitude):
                raise ValueError("non-zero LogReal needs a finite log magnitude")
            self.sign = sign
            self.log_magnitude = mpf(log_magnitude)

    # -- constructors -----------------------------------------------------
    @classmethod
    def zero(cls) -> LogReal:
        return cls(0)

    @classmethod
    def one(cls) -> LogReal:
        return cls(1, 0)

    @classmethod
    def from_log(cls, log_magnitude, sign: int = 1) -> LogReal:
        return cls(sign, log_magnitude)

    @classmethod
    def from_value(cls, x) -> LogReal:
        if isinstance(x, LogReal):
            return x
        if isinstance(x, Fraction):
            if x == 0:
                return cls(0)
            s = 1 if x > 0 else -1
            return cls(s, log_int(abs(x.numerator)) - log_int(x.denominator))
        if isinstance(x, Integral):
            if x == 0:
                return cls(0)
            return cls(1 if x > 0 else -1, log_int(abs(int(x))))
        x = mpf(x)
        if x == 0:
            return cls(0)
        return cls(1 if x > 0 else -1, mpmath.log(abs(x)))

    # -- arithmetic -------------------------------------------------------
    def __mul__(self, other) -> LogReal:
        other = LogReal.from_value(other)
        if self.sign == 0 or other.sign == 0:
            return LogReal(0)
        return LogReal(self.sign * other.sign, self.log_magnitude + other.log_magnitude)

    __rmul__ = __mul__

    def __truediv__(self, other) -> LogReal:
        other = LogReal.from_value(other)
        if other.sign == 0:
            raise ZeroDivisionError("LogReal division by zero")
        if self.sign == 0:
            return LogReal(0)
        return LogReal(self.sign * other.sign, self.log_magnitude - other.log_magnitude)

    def __rtruediv__(self, other) -> LogReal:
        return LogReal.from_value(other) / self

    def __pow__(self, p) -> LogReal:
        if self.sign == 0:
            if p <= 0:
                raise ZeroDivisionError("0 to a non-positive power")
            return LogReal(0)
        if self.sign < 0 and not (isinstance(p, Integral)):
            raise ValueError("non-integer power of a negative LogReal")
        sign = -1 if (self.sign < 0 and p % 2) else 1
        return LogReal(sign, self.log_magnitude * p)

    def __neg__(self) -> LogReal:
        if self.sign == 0:
            return self
        return LogReal(-self.sign, self.log_magnitude)

    def __add__(self, other) -> LogReal:
        other = LogReal.from_value(other)
        return logsumexp([self, other])

    __radd__ = __add__

    def __sub__(self, other) -> LogReal:
        return self + (-LogReal.from_value(other))

    def __rsub__(self, other) -> LogReal:
        return LogReal.from_value(other) - self

    # -- comparison -------------------------------------------------------
    def _key(self):
        if self.sign == 0:
            return (0, 0)
        return (self.sign, self.sign * self.log_magnitude)

    def __eq__(self, other) -> bool:
        try:
            other = LogReal.from_value(other)
        except (TypeError, ValueError):
            return NotImplemented
        return self._key() == other._key()

    def __lt__(self, other) -> bool:
        return self._key() < LogReal.from_value(other)._key()

    def __le__(self, other) -> bool:
        return self._key() <= LogReal.from_value(other)._key()

    def __gt__(self, other) -> bool:
        return self._key() > LogReal.from_value(other)._key()

    def __ge__(self, other) -> bool:
        return self._key() >= LogReal.from_value(other)._key()

    def __hash__(self):
        return hash(self._key())

    # -- conversion -------------------------------------------------------
    @property
    def log(self) -> mpf:
        """Natural log of the value; only defined for positive values."""
        if self.sign <= 0:
            raise ValueError("log of a non-positive LogReal")
        return self.log_magnitude

    @property
    def log10(self) -> mpf:
        return self.log_magnitude / mpmath.log(10)

    def to_mpf(self) -> mpf:
        if self.sign == 0:
            return mpf(0)
        return self.sign * mpmath.exp(self.log_magnitude)

    def __float__(self) -> float:
        return float(self.to_mpf())

    def isclose(self, other, rel_log: float = 1e-40) -> bool:
        """Same sign and log magnitudes within ``rel_log`` (absolute, in nats)."""
        other = LogReal.from_value(other)
        if self.sign != other.sign:
            return False
        if self.sign == 0:
            return True
        return abs(self.log_magnitude - other.log_magnitude) <= rel_log

    def sci(self, digits: int = 6) -> str:
        """Scientific-notation string that works beyond float range."""
        if self.sign == 0:
            return "0"
        l10 = self.log10
        e = int(mpmath.floor(l10))
        mant = mpmath.power(10, l10 - e)
        s = "-" if self.sign < 0 else ""
        return f"{s}{mpmath.nstr(mant, digits)}e{e:+d}"

    def to_json(self) -> dict:
        if self.sign == 0:
            return {"sign": 0, "log10": None, "sci": "0"}
        return {"sign": self.sign, "log10": mpmath.nstr(self.log10, 30), "sci": self.sci()}

    @classmethod
    def from_json(cls, d: dict) -> LogReal:
        if d["sign"] == 0:
            return cls(0)
        return cls(d["sign"], mpf(d["log10"]) * mpmath.log(10))

    def __repr__(self) -> str:
        if self.sign == 0:
            return "LogReal(0)"
        return f"LogReal({self.sci(12)}, ln={mpmath.nstr(self.log_magnitude, 20)})"


def logsumexp(terms) -> LogReal:
    """Sum of LogReals, computed relative to the largest magnitude."""
    terms = [LogReal.from_value(t) for t in terms]
    nz = [t for t in terms if t.sign != 0]
    if not nz:
        return LogReal(0)
    top = max(t.log_magnitude for t in nz)
    acc = mpf(0)
    for t in nz:
        acc += t.sign * mpmath.exp(t.log_magnitude - top)
    if acc == 0:
        return LogReal(0)
    return LogReal(1 if acc > 0 else -1, top + mpmath.log(abs(acc)))
