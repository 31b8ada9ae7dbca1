"""Ambient sets: intervals, squares, Bernoulli random sets, and their 3-AP counts."""
from __future__ import annotations

import math
from dataclasses import dataclass
from math import comb, gcd, isqrt

import numpy as np

from .intset import IntSet, load_set, save_set  # noqa: F401  (re-exported)
from .validation import DomainError, check_positive_int


def interval_set(N: int) -> IntSet:
    N = check_positive_int(N, "N")
    return IntSet(range(1, N + 1))


def squares_set(N: int) -> IntSet:
    N = check_positive_int(N, "N")
    return IntSet(i * i for i in range(1, N + 1))


@dataclass(frozen=True)
class RandomSetModel:
    """Each of 1..n is kept independently with probability c * n^(-1/(k-1))."""

    n: int
    c: float
    k: int = 3
    seed: int = 0

    def __post_init__(self):
        check_positive_int(self.n, "n")
        check_positive_int(self.k, "k", minimum=3)
        if self.c <= 0:
            raise DomainError(f"c must be positive, got {self.c}")
        if self.p > 1:
            raise DomainError(f"inclusion probability {self.p:.6g} exceeds 1")

    @property
    def p(self) -> float:
        return self.c * self.n ** (-1.0 / (self.k - 1))

    @property
    def expected_size(self) -> float:
        return self.n * self.p


def random_bernoulli_set(model: RandomSetModel) -> IntSet:
    rng = np.random.default_rng(model.seed)
    keep = rng.random(model.n) < model.p
    return IntSet((np.flatnonzero(keep) + 1).tolist())


def expected_ap_count(n: int, c: float, k: int) -> tuple[float, float]:
    """The pair-count estimate C(n,2) (c n^(-1/(k-1)))^(k-2) and its bound (c^(k-2)/2) n^(k/(k-1)).

    This counts every pair of [n] as a potential start, so it over-counts the
    true expectation by roughly a factor 1/p^2; use it for sizing only.
    """
    bound = c ** (k - 2) / 2 * n ** (k / (k - 1))
    if n <= 1 or c == 0:
        return 0.0, bound
    p = c * n ** (-1.0 / (k - 1))
    return comb(n, 2) * p ** (k - 2), bound


def interval_ap_count(n: int, k: int) -> int:
    """Number of increasing k-term APs inside [n]."""
    return sum(n - (k - 1) * r for r in range(1, (n - 1) // (k - 1) + 1))


def count_aps(values, k: int) -> int:
    """Number of increasing k-term arithmetic progressions inside ``values``."""
    members = values if isinstance(values, IntSet) else IntSet.from_iterable(values)
    total = 0
    for i, a in enumerate(members):
        for b in members[i + 1:]:
            r = b - a
            if all(a + j * r in members for j in range(2, k)):
                total += 1
    return total


def squares_3ap_bruteforce(N: int) -> list[tuple[int, int, int]]:
    """All 0 < a < b < c <= N with a^2 + c^2 = 2 b^2, in lexicographic order."""
    N = check_positive_int(N, "N")
    out = []
    for a in range(1, N + 1):
        # a and c share parity
        for c in range(a + 2, N + 1, 2):
            twice = a * a + c * c
            b = isqrt(twice // 2)
            if 2 * b * b == twice:
                out.append((a, b, c))
    return sorted(out)


def parameter_triples(N: int):
    """Yield (s, t, u) with s, t, u >= 1, gcd(s, t) = 1 and u (s^2 + t^2) <= N."""
    N = check_positive_int(N, "N")
    for s in range(1, isqrt(N) + 1):
        for t in range(1, isqrt(N - s * s) + 1):
            if gcd(s, t) != 1:
                continue
            q = s * s + t * t
            for u in range(1, N // q + 1):
                yield s, t, u


def triple_from_parameters(s: int, t: int, u: int) -> tuple[int, int, int]:
    return u * (2 * s * t - s * s + t * t), u * (s * s + t * t), u * (2 * s * t + s * s - t * t)


def squares_3ap_parameterized(N: int) -> list[tuple[int, int, int]]:
    """3-APs of squares up to N^2 from the (s, t, u) parameterization.

    Only squares matter, so a and c are replaced by absolute values and
    ordered a < c. Triples with a zero or a constant progression are dropped.
    """
    found = set()
    for s, t, u in parameter_triples(N):
        a, b, c = triple_from_parameters(s, t, u)
        a, c = sorted((abs(a), abs(c)))
        if a == 0 or a == c or c > N:
            continue
        found.add((a, b, c))
    return sorted(found)


def squares_type_bound(N: int) -> float:
    """2 pi N log2 N, the stated cap on 3-AP types among the first N squares."""
    return 2 * math.pi * N * math.log2(N) if N > 1 else 0.0
