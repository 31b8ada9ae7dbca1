"""Closed-form lower and upper bounds, evaluated in base 2.

Throughout, ``exp(x) = 2**x`` and ``log = log2``. Constants the theory
leaves unspecified are caller-supplied (default 1) and echoed in reports.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from .constructor import derive_n
from .intset import IntSet
from .validation import DomainError

KSSZ_CONSTANTS = {"standard": 2.0 ** -15, "refined": 1.0 / 34}


@dataclass(frozen=True)
class BoundReport:
    name: str
    value: float
    inputs: dict = field(default_factory=dict)
    constant_C: float = 1.0
    log2_value: float | None = None

    def to_dict(self) -> dict:
        return {
            "name": self.name, "value": self.value, "log2_value": self.log2_value,
            "inputs": dict(self.inputs), "constant_C": self.constant_C,
        }


def _exp2(x: float) -> float:
    try:
        return 2.0 ** x
    except OverflowError:
        return math.inf


def _check_C(C: float) -> float:
    if not C > 0:
        raise DomainError(f"constant C must be positive, got {C}")
    return float(C)


def bound_kssz(r_k_interval_value: float, variant: str = "standard") -> float:
    """C * r_k([N]) with C = 2^-15 (standard) or 1/34 (refined)."""
    if r_k_interval_value < 0:
        raise DomainError("r_k([N]) must be nonnegative")
    try:
        return KSSZ_CONSTANTS[variant] * r_k_interval_value
    except KeyError:
        raise DomainError(f"variant must be one of {sorted(KSSZ_CONSTANTS)}") from None


def _exponent(n: int, D: int, log_x: float) -> float:
    """-n 2^((n-1)/2) D^((n-1)/n) (log x)^(1/n) + (1/2n) log log x."""
    loglog = math.log2(log_x) if log_x > 0 else -math.inf
    return (-n * 2.0 ** ((n - 1) / 2) * D ** ((n - 1) / n) * log_x ** (1.0 / n)
            + loglog / (2 * n))


def log2_bound_interval(k: int, D: int, N, C: float = 1.0) -> float:
    if N < 4:
        raise DomainError("the interval bound needs N >= 4")
    return math.log2(_check_C(C)) + _exponent(derive_n(k, D), D, math.log2(N))


def bound_interval(k: int, D: int, N, C: float = 1.0) -> float:
    """Lower bound on r_{k,D}([N]) / N."""
    return _exp2(log2_bound_interval(k, D, N, C))


def log2_bound_main(k: int, D: int, psi: float, C: float = 1.0) -> float:
    if psi < 2:
        raise DomainError(f"psi must be at least 2, got {psi}")
    return math.log2(_check_C(C)) + _exponent(derive_n(k, D), D, math.log2(psi))


def bound_main(k: int, D: int, psi: float, C: float = 1.0) -> float:
    """Lower bound on r_{k,D}(set) / N for sets with at most N * psi types."""
    return _exp2(log2_bound_main(k, D, psi, C))


def log2_bound_squares(N, C: float = 1.0) -> float:
    if N < 5:
        raise DomainError("the squares bound needs N >= 5")
    loglog = math.log2(math.log2(N))
    return (math.log2(_check_C(C)) + math.log2(N)
            - 2 * math.sqrt(2) * math.sqrt(loglog) + 0.25 * math.log2(loglog))


def bound_squares(N, C: float = 1.0) -> float:
    """Lower bound on the largest 3-AP-free subset of the first N squares.

    ``N`` may be a huge int (math.log2 accepts those); use :func:`log2_bound_squares` when the value
    itself overflows a float.
    """
    return _exp2(log2_bound_squares(N, C))


@dataclass(frozen=True)
class TypeBound:
    unconditional: int
    diameter_term: int

    @property
    def value(self) -> int:
        return min(self.unconditional, self.diameter_term)

    def to_dict(self) -> dict:
        return {"unconditional": self.unconditional, "diameter_term": self.diameter_term,
                "value": self.value}


def type_upper_bound(values, k: int, D: int) -> TypeBound:
    """N^(D+1) and N * diam; the second carries an unknown implied constant (taken as 1)."""
    values = values if isinstance(values, IntSet) else IntSet.from_iterable(values)
    N = len(values)
    return TypeBound(unconditional=N ** (D + 1), diameter_term=N * values.diameter)


def all_bounds(k: int, D: int, *, N=None, psi: float | None = None, C: float = 1.0) -> list[BoundReport]:
    """Every bound applicable to the given (k, D) and N or psi."""
    reports = []
    if psi is not None:
        lv = log2_bound_main(k, D, psi, C)
        reports.append(BoundReport("main", _exp2(lv), {"k": k, "D": D, "psi": psi}, C, lv))
    if N is not None:
        if N >= 4:
            lv = log2_bound_interval(k, D, N, C)
            reports.append(BoundReport("interval", _exp2(lv), {"k": k, "D": D, "N": N}, C, lv))
        if (k, D) == (3, 1) and N >= 5:
            lv = log2_bound_squares(N, C)
            reports.append(BoundReport("squares", _exp2(lv), {"N": N}, C, lv))
    return reports
