"""Exact integer arithmetic on progressions.

A k-term D-progression is a nonconstant length-k integer sequence whose
(D+1)-st forward differences vanish, i.e. the values of a nonconstant
polynomial of degree <= D at 1..k. Values may repeat (``4, 1, 0, 1, 4``).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import comb
from typing import Iterable, Iterator, NamedTuple, Sequence

import numpy as np

from .intset import IntSet
from .validation import DomainError, check_k_D, check_positive_int

# Rows of prefix tuples materialized per vectorized chunk.
_CHUNK_ROWS = 1 << 18
_INT64_SAFE = 1 << 62


class ProgressionType(NamedTuple):
    degree: int
    first: int
    difference: int


@dataclass(frozen=True)
class Certificate:
    """Outcome of a free-ness check; ``witness`` is set iff a progression was found."""

    status: str
    witness: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.status not in ("free", "contains"):
            raise ValueError(f"unknown status {self.status!r}")
        if (self.witness is None) != (self.status == "free"):
            raise ValueError("witness must be present exactly when status is 'contains'")

    @property
    def is_free(self) -> bool:
        return self.status == "free"

    def to_dict(self) -> dict:
        return {"status": self.status, "witness": list(self.witness) if self.witness else None}


def _as_sequence(s: Iterable[int]) -> tuple[int, ...]:
    return tuple(int(v) for v in s)


def forward_difference(s: Sequence[int]) -> tuple[int, ...]:
    s = _as_sequence(s)
    if len(s) < 2:
        raise DomainError("forward difference needs at least 2 terms")
    return tuple(b - a for a, b in zip(s, s[1:]))


def repeated_difference(s: Sequence[int], m: int) -> tuple[int, ...]:
    """The m-fold forward difference, computed by iteration."""
    s = _as_sequence(s)
    m = check_positive_int(m, "m")
    if m >= len(s):
        raise DomainError(f"cannot take {m} differences of a {len(s)}-term sequence")
    for _ in range(m):
        s = forward_difference(s)
    return s


def binomial_difference(s: Sequence[int], m: int) -> tuple[int, ...]:
    """The m-fold forward difference from the closed alternating-binomial sum."""
    s = _as_sequence(s)
    m = check_positive_int(m, "m")
    if m >= len(s):
        raise DomainError(f"cannot take {m} differences of a {len(s)}-term sequence")
    weights = [(-1) ** (m - i) * comb(m, i) for i in range(m + 1)]
    return tuple(
        sum(w * s[v + i] for i, w in enumerate(weights)) for v in range(len(s) - m)
    )


def is_progression(s: Sequence[int], D: int) -> bool:
    s = _as_sequence(s)
    D = check_positive_int(D, "D")
    if len(s) < D + 2:
        raise DomainError(f"a D-progression test needs at least D+2={D + 2} terms, got {len(s)}")
    if all(v == s[0] for v in s):
        return False
    return not any(repeated_difference(s, D + 1))


def type_of(s: Sequence[int]) -> ProgressionType:
    """Return (minimal degree, first term, degree! * leading coefficient)."""
    s = _as_sequence(s)
    if not s or all(v == s[0] for v in s):
        raise DomainError("type is undefined for a constant sequence")
    diff = forward_difference(s)
    # diff currently holds the 1st difference; look for the first m with a vanishing (m+1)-st.
    for m in range(1, len(s) - 1):
        nxt = forward_difference(diff)
        if not any(nxt):
            return ProgressionType(m, s[0], diff[0])
        diff = nxt
    raise DomainError(
        f"not polynomial of admissible degree: no degree below {len(s) - 1} fits {s}"
    )


def _recurrence_weights(D: int) -> list[int]:
    # a[v+D+1] = sum_i w[i] * a[v+i], from the vanishing (D+1)-st difference
    return [(-1) ** (D - i) * comb(D + 1, i) for i in range(D + 1)]


def extend_progression(prefix: Sequence[int], D: int, k: int) -> tuple[int, ...]:
    """Extend D+1 initial values to the unique length-k sequence with zero (D+1)-st differences."""
    prefix = _as_sequence(prefix)
    D = check_positive_int(D, "D")
    if len(prefix) != D + 1:
        raise DomainError(f"prefix must have exactly D+1={D + 1} entries, got {len(prefix)}")
    k = check_positive_int(k, "k", minimum=D + 1)
    weights = _recurrence_weights(D)
    out = list(prefix)
    while len(out) < k:
        window = out[-(D + 1):]
        out.append(sum(w * a for w, a in zip(weights, window)))
    return tuple(out)


def _fits_int64(values: IntSet, D: int) -> bool:
    if not values:
        return True
    bound = max(abs(values[0]), abs(values[-1]))
    return bound * (1 << (D + 1)) < _INT64_SAFE


def _enumerate_python(values: IntSet, k: int, D: int) -> Iterator[tuple[int, ...]]:
    weights = _recurrence_weights(D)
    for prefix in itertools.product(values, repeat=D + 1):
        if all(v == prefix[0] for v in prefix):
            continue
        seq = list(prefix)
        while len(seq) < k:
            nxt = sum(w * a for w, a in zip(weights, seq[-(D + 1):]))
            if nxt not in values:
                break
            seq.append(nxt)
        else:
            yield tuple(seq)


def _enumerate_numpy(values: IntSet, k: int, D: int) -> Iterator[tuple[int, ...]]:
    arr = np.asarray(values, dtype=np.int64)
    N = len(arr)
    width = D + 1
    # leading prefix coordinates are looped in Python, the rest vectorized
    vec = width
    while vec > 1 and N ** vec > _CHUNK_ROWS:
        vec -= 1
    lead = width - vec
    grids = np.indices((N,) * vec).reshape(vec, -1)
    tail_cols = [arr[g] for g in grids]
    weights = _recurrence_weights(D)
    for head in itertools.product(range(N), repeat=lead):
        rows = len(tail_cols[0])
        cols = [np.full(rows, arr[i], dtype=np.int64) for i in head] + tail_cols
        nonconst = np.zeros(rows, dtype=bool)
        for c in cols[1:]:
            nonconst |= c != cols[0]
        keep = np.flatnonzero(nonconst)
        cols = [c[keep] for c in cols]
        for _ in range(k - width):
            if not len(cols[0]):
                break
            nxt = sum(w * c for w, c in zip(weights, cols[-width:]))
            pos = np.searchsorted(arr, nxt)
            pos[pos == N] = 0
            ok = arr[pos] == nxt
            cols = [c[ok] for c in cols]
            cols.append(nxt[ok])
        if len(cols[0]):
            yield from map(tuple, np.stack(cols, axis=1).tolist())


def enumerate_progressions(values: Iterable[int], k: int, D: int) -> Iterator[tuple[int, ...]]:
    """Yield every k-term D-progression with all terms in ``values``.

    Iteration is lexicographic in the (D+1)-term prefix; each progression
    appears once (its prefix determines it).
    """
    k, D = check_k_D(k, D)
    values = values if isinstance(values, IntSet) else IntSet.from_iterable(values)
    if len(values) < 2:
        return iter(())
    if _fits_int64(values, D):
        return _enumerate_numpy(values, k, D)
    return _enumerate_python(values, k, D)


def count_types(values: Iterable[int], k: int, D: int) -> int:
    return len({type_of(s) for s in enumerate_progressions(values, k, D)})


def find_starters(values: Iterable[int], k: int, D: int) -> IntSet:
    """First terms of all k-term D-progressions in ``values``.

    Removing them leaves a set with no k-term D-progression.
    """
    return IntSet.from_iterable(s[0] for s in enumerate_progressions(values, k, D))


def verify_free(values: Iterable[int], k: int, D: int) -> Certificate:
    witness = next(enumerate_progressions(values, k, D), None)
    if witness is None:
        return Certificate("free")
    return Certificate("contains", witness)
