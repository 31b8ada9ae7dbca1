"""Sorted, duplicate-free integer sets and their text file format."""
from __future__ import annotations

import os
import tempfile
from functools import cached_property
from pathlib import Path
from typing import Iterable


class IntSetFormatError(ValueError):
    """Raised when an IntSet file cannot be parsed."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class IntSet(tuple):
    """A strictly increasing tuple of Python ints.

    Behaves like a tuple (so ``IntSet([1, 2]) == (1, 2)``) with O(1)
    membership through a cached frozenset.
    """

    def __new__(cls, values: Iterable[int] = ()):
        items = tuple(int(v) for v in values)
        for prev, cur in zip(items, items[1:]):
            if cur <= prev:
                raise ValueError(
                    f"IntSet elements must be strictly increasing, got {prev} then {cur}"
                )
        return super().__new__(cls, items)

    @classmethod
    def from_iterable(cls, values: Iterable[int], *, allow_duplicates: bool = True) -> "IntSet":
        """Build from values in any order; duplicates merge unless forbidden."""
        items = [int(v) for v in values]
        unique = sorted(set(items))
        if not allow_duplicates and len(unique) != len(items):
            raise ValueError("duplicate elements")
        return cls(unique)

    @cached_property
    def members(self) -> frozenset:
        return frozenset(self)

    def __contains__(self, value) -> bool:
        return value in self.members

    @property
    def diameter(self) -> int:
        return self[-1] - self[0] if len(self) >= 2 else 0

    def difference(self, other: Iterable[int]) -> "IntSet":
        drop = set(other)
        return IntSet(v for v in self if v not in drop)

    def __repr__(self) -> str:
        return f"IntSet({list(self)!r})"


def parse_set(text: str) -> IntSet:
    values: list[int] = []
    seen: dict[int, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            value = int(line, 10)
        except ValueError:
            raise IntSetFormatError(f"not a base-10 integer: {line!r}", lineno) from None
        if value in seen:
            raise IntSetFormatError(
                f"duplicate value {value} (first seen at line {seen[value]})", lineno
            )
        seen[value] = lineno
        values.append(value)
    return IntSet(sorted(values))


def format_set(values: Iterable[int]) -> str:
    return "".join(f"{v}\n" for v in IntSet.from_iterable(values))


def load_set(path: str | os.PathLike) -> IntSet:
    return parse_set(Path(path).read_text(encoding="utf-8"))


def atomic_write_text(path: str | os.PathLike, text: str) -> None:
    """Write via a temp file in the same directory, then rename over ``path``."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except FileNotFoundError:
            pass
        raise


def save_set(values: Iterable[int], path: str | os.PathLike) -> None:
    atomic_write_text(path, format_set(values))
