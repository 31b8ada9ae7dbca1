"""Base sets: large subsets of [N0] free of k-term progressions of a given degree."""
from __future__ import annotations

import itertools
from collections import defaultdict
from functools import lru_cache

from .intset import IntSet
from .progression import _recurrence_weights, enumerate_progressions
from .validation import DomainError, check_k_D, check_positive_int

EXACT_CAP = 30
STRATEGIES = ("exact", "greedy", "behrend", "auto")


@lru_cache(maxsize=64)
def _forbidden_masks(N0: int, k: int, Dg: int) -> tuple[tuple[int, ...], ...]:
    """Bitmasks of progression supports in [N0], grouped by their largest element.

    Entry x lists the minimal supports whose maximum is x; bit i stands for i+1.
    """
    supports = {frozenset(s) for s in enumerate_progressions(range(1, N0 + 1), k, Dg)}
    minimal = [s for s in supports if not any(o < s for o in supports)]
    by_max: list[list[int]] = [[] for _ in range(N0 + 1)]
    for s in minimal:
        by_max[max(s)].append(sum(1 << (v - 1) for v in s))
    return tuple(tuple(sorted(m)) for m in by_max)


def _completes(mask: int, masks: tuple[int, ...]) -> bool:
    return any(m & mask == m for m in masks)


@lru_cache(maxsize=256)
def _exact_mask(N0: int, k: int, Dg: int) -> int:
    if N0 <= 1:
        return (1 << N0) - 1
    forbidden = _forbidden_masks(N0, k, Dg)
    # {x..N0} is a translate of [N0-x+1], so its optimum bounds what is left
    suffix_best = [0] * (N0 + 2)
    for m in range(1, N0):
        suffix_best[N0 - m + 1] = bin(_exact_mask(m, k, Dg)).count("1")
    suffix_best[1] = N0

    greedy = _greedy_mask(N0, forbidden)
    best_size = bin(greedy).count("1") - 1
    best_mask = greedy

    def search(x: int, mask: int, size: int) -> None:
        nonlocal best_size, best_mask
        if x > N0:
            if size > best_size:
                best_size, best_mask = size, mask
            return
        if size + suffix_best[x] <= best_size:
            return
        bit = 1 << (x - 1)
        # include first: the first optimum reached is lexicographically smallest
        if not _completes(mask | bit, forbidden[x]):
            search(x + 1, mask | bit, size + 1)
        search(x + 1, mask, size)

    search(1, 0, 0)
    return best_mask


def _greedy_mask(N0: int, forbidden) -> int:
    mask = 0
    for x in range(1, N0 + 1):
        bit = 1 << (x - 1)
        if not _completes(mask | bit, forbidden[x]):
            mask |= bit
    return mask


def _mask_to_set(mask: int) -> IntSet:
    return IntSet(i + 1 for i in range(mask.bit_length()) if mask >> i & 1)


def exact_max_free(N0: int, k: int, Dg: int, cap: int = EXACT_CAP) -> IntSet:
    """Lexicographically smallest maximum subset of [N0] without k-term Dg-progressions.

    Branch-and-bound over inclusion decisions; refuses N0 above ``cap``.
    """
    N0 = check_positive_int(N0, "N0")
    k, Dg = check_k_D(k, Dg)
    if N0 > cap:
        raise DomainError(
            f"exact search is limited to N0 <= {cap} (got {N0}); use greedy_free instead"
        )
    return _mask_to_set(_exact_mask(N0, k, Dg))


def _progression_through(members: set[int], x: int, k: int, Dg: int) -> bool:
    """Whether some k-term Dg-progression in ``members`` (which holds x) uses x."""
    weights = _recurrence_weights(Dg)
    width = Dg + 1
    pool = sorted(members)
    for pos in range(k):
        start = min(pos, k - width)
        slot = pos - start
        for others in itertools.product(pool, repeat=Dg):
            window = list(others[:slot]) + [x] + list(others[slot:])
            if all(v == x for v in window):
                continue
            if _extends_inside(window, start, k, weights, members):
                return True
    return False


def _extends_inside(window, start, k, weights, members) -> bool:
    width = len(window)
    fwd = list(window)
    for _ in range(k - start - width):
        nxt = sum(w * a for w, a in zip(weights, fwd[-width:]))
        if nxt not in members:
            return False
        fwd.append(nxt)
    # the recurrence is symmetric under reversal up to sign
    back = window[::-1]
    for _ in range(start):
        nxt = sum(w * a for w, a in zip(weights, back[-width:]))
        if nxt not in members:
            return False
        back.append(nxt)
    return True


def greedy_free(N0: int, k: int, Dg: int) -> IntSet:
    """Scan 1..N0, keeping each element that leaves the set progression-free."""
    N0 = check_positive_int(N0, "N0")
    k, Dg = check_k_D(k, Dg)
    chosen: set[int] = set()
    for x in range(1, N0 + 1):
        chosen.add(x)
        if _progression_through(chosen, x, k, Dg):
            chosen.discard(x)
    return IntSet(sorted(chosen))


def behrend_digits(N: int) -> IntSet:
    """3-AP-free subset of [N] from equal-norm digit vectors.

    For each m >= 2, integers x in [0, N) whose base-2m digits lie in [0, m)
    add without carries, so x + y = 2w forces equal digit vectors inside a
    sphere. The largest norm shell over all m is returned, shifted by +1.
    Ties prefer smaller m, then smaller norm.
    """
    N = check_positive_int(N, "N")
    best: tuple[int, ...] = (0,)
    # once 2m > N every x < N is a single digit and shells are singletons
    for m in range(2, N // 2 + 2):
        base = 2 * m
        shells: dict[int, list[int]] = defaultdict(list)
        for x in range(N):
            norm, y = 0, x
            while y:
                y, digit = divmod(y, base)
                if digit >= m:
                    break
                norm += digit * digit
            else:
                shells[norm].append(x)
        shell = max(sorted(shells.items()), key=lambda item: len(item[1]))[1]
        if len(shell) > len(best):
            best = tuple(shell)
    return IntSet(x + 1 for x in best)


def base_set(N0: int, k: int, D: int, strategy: str = "auto", cap: int = EXACT_CAP) -> IntSet:
    """Subset of [N0] free of k-term 2D-progressions for the annuli radii.

    When k <= 4D the single point {1} suffices.
    """
    N0 = check_positive_int(N0, "N0")
    D = check_positive_int(D, "D")
    k = check_positive_int(k, "k")
    if k <= 2 * D:
        raise DomainError(f"base sets need k > 2D, got k={k}, D={D}")
    if strategy not in STRATEGIES:
        raise DomainError(f"unknown strategy {strategy!r}; choose from {STRATEGIES}")
    if k <= 4 * D:
        return IntSet([1])
    Dg = 2 * D
    if strategy == "behrend":
        if (k, Dg) != (3, 1):
            raise DomainError("the Behrend digit construction only targets 3-term APs")
        return behrend_digits(N0)
    if strategy == "exact" or (strategy == "auto" and N0 <= cap):
        return exact_max_free(N0, k, Dg, cap=cap)
    return greedy_free(N0, k, Dg)
