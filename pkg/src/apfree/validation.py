"""Argument checks shared by the library, the estimator and the CLI."""
from __future__ import annotations

import numbers
from typing import Iterable

import numpy as np

from .intset import IntSet


class DomainError(ValueError):
    """An argument lies outside the domain of the operation."""


class InvariantViolation(RuntimeError):
    """An internal guarantee failed (e.g. a returned subset was not free)."""


def check_positive_int(value, name: str, minimum: int = 1) -> int:
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        raise DomainError(f"{name} must be an integer, got {value!r}")
    value = int(value)
    if value < minimum:
        raise DomainError(f"{name} must be >= {minimum}, got {value}")
    return value


def check_k_D(k, D) -> tuple[int, int]:
    """Validate a (length, degree) pair for which progressions can exist."""
    D = check_positive_int(D, "D")
    k = check_positive_int(k, "k")
    if k < D + 2:
        raise DomainError(f"need k >= D + 2 for k-term D-progressions, got k={k}, D={D}")
    return k, D


def check_construction_k_D(k, D) -> tuple[int, int]:
    k, D = check_k_D(k, D)
    if k <= 2 * D:
        raise DomainError(f"the construction needs k > 2D, got k={k}, D={D}")
    return k, D


def check_intset(X, *, allow_duplicates: bool = False) -> IntSet:
    """Coerce an integer collection (list, IntSet, 1-D or column array) to IntSet.

    Floats are accepted only when integral. Duplicates are an error unless
    ``allow_duplicates`` is set.
    """
    if isinstance(X, IntSet):
        return X
    if isinstance(X, np.ndarray):
        arr = X
        if arr.ndim == 2 and arr.shape[1] == 1:
            arr = arr[:, 0]
        if arr.ndim != 1:
            raise DomainError(f"expected a 1-D array of integers, got shape {X.shape}")
        if arr.dtype.kind == "f":
            if not np.all(np.isfinite(arr)) or np.any(arr != np.round(arr)):
                raise DomainError("array contains non-integer values")
            values: Iterable = (int(v) for v in arr)
        elif arr.dtype.kind in "iu":
            values = arr.tolist()
        elif arr.dtype.kind == "O":
            values = [_as_int(v) for v in arr]
        else:
            raise DomainError(f"unsupported dtype {arr.dtype}")
    else:
        values = [_as_int(v) for v in X]
    try:
        return IntSet.from_iterable(values, allow_duplicates=allow_duplicates)
    except ValueError as exc:
        raise DomainError(str(exc)) from None


def _as_int(v) -> int:
    if isinstance(v, bool):
        raise DomainError(f"not an integer: {v!r}")
    if isinstance(v, numbers.Integral):
        return int(v)
    if isinstance(v, numbers.Real) and float(v).is_integer():
        return int(v)
    raise DomainError(f"not an integer: {v!r}")
