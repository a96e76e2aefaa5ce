"""Colouring profiles: k_u classes of size u for u = 1..t."""

from __future__ import annotations

import math
from dataclasses import dataclass
from numbers import Integral, Real
from typing import Mapping

import mpmath
from mpmath import mpf

from chizeta.logreal import ln_factorial


class ProfileError(ValueError):
    pass


def ln_d(u: int) -> mpf:
    """log d_u with d_u = 2^{C(u,2)} u!."""
    return math.comb(u, 2) * mpmath.log(2) + ln_factorial(u)


@dataclass(frozen=True)
class Profile:
    """``counts[u-1]`` is k_u, the number of classes of size u (u <= t).

    Integer profiles describe actual partitions; real profiles (relaxed mode)
    appear only inside the L0 optimisation.
    """

    counts: tuple

    def __post_init__(self):
        counts = tuple(self.counts)
        while counts and counts[-1] == 0:
            counts = counts[:-1]
        for c in counts:
            if c < 0:
                raise ProfileError(f"negative class count in {counts}")
        object.__setattr__(self, "counts", counts)

    @classmethod
    def from_mapping(cls, m: Mapping[int, Real]) -> Profile:
        if not m:
            return cls(())
        if min(m) < 1:
            raise ProfileError("class sizes must be >= 1")
        t = max(m)
        return cls(tuple(m.get(u, 0) for u in range(1, t + 1)))

    @classmethod
    def parse(cls, text: str) -> Profile:
        """Parse ``"u:count,u:count"``, e.g. ``"3:2"`` for two classes of size 3."""
        m: dict[int, int] = {}
        for item in text.replace(" ", "").split(","):
            if not item:
                continue
            try:
                u, c = item.split(":")
                m[int(u)] = m.get(int(u), 0) + int(c)
            except ValueError as exc:
                raise ProfileError(f"bad profile item {item!r}") from exc
        return cls.from_mapping(m)

    def __str__(self) -> str:
        return ",".join(f"{u}:{c}" for u, c in self.items())

    @property
    def t(self) -> int:
        """Largest class size present (the profile is t-bounded for any t >= this)."""
        return len(self.counts)

    def __getitem__(self, u: int):
        if u < 1:
            raise IndexError(u)
        return self.counts[u - 1] if u <= len(self.counts) else 0

    def items(self):
        return [(u, c) for u, c in enumerate(self.counts, 1) if c]

    def as_dict(self) -> dict:
        return dict(self.items())

    @property
    def k(self):
        return sum(self.counts)

    @property
    def mass(self):
        return sum(u * c for u, c in enumerate(self.counts, 1))

    @property
    def f(self):
        """Number of within-class vertex pairs ("forbidden edges")."""
        return sum(math.comb(u, 2) * c for u, c in enumerate(self.counts, 1))

    @property
    def is_integer(self) -> bool:
        return all(isinstance(c, Integral) for c in self.counts)

    def is_bounded(self, t: int) -> bool:
        return self.t <= t

    def is_complete(self, n: int) -> bool:
        return self.mass == n

    def check(self, n: int, complete: bool = False) -> None:
        if self.mass > n:
            raise ProfileError(f"profile {self} has mass {self.mass} > n = {n}")
        if complete and self.mass != n:
            raise ProfileError(f"profile {self} is not complete for n = {n}")

    def sizes(self) -> list[int]:
        """Class sizes in non-increasing order (integer profiles only)."""
        out = []
        for u in range(self.t, 0, -1):
            out += [u] * int(self[u])
        return out

    def multiplicity_factorial(self) -> int:
        """prod_u k_u!"""
        out = 1
        for c in self.counts:
            out *= math.factorial(int(c))
        return out

    def ln_P(self, n: int) -> mpf:
        """log P_k = log n! - log (n - mass)! - sum k_u log u!."""
        self.check(n)
        out = ln_factorial(n) - ln_factorial(n - self.mass)
        for u, c in self.items():
            out -= c * ln_factorial(u)
        return out

    def P(self, n: int) -> int:
        """Exact number of ordered partitions with this profile (integer profiles)."""
        self.check(n)
        out = math.factorial(n) // math.factorial(n - self.mass)
        for u, c in self.items():
            out //= math.factorial(u) ** int(c)
        return out

    def ln_multiplicity_factorial(self) -> mpf:
        return sum((ln_factorial(c) for c in self.counts if c), mpf(0))
