"""Ground sets, canonical subsets and the set-function oracle contract."""
from __future__ import annotations

import re
import threading
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import InstanceParseError, InvalidInputError

_SUBSET_RE = re.compile(r"^\{\s*(\d+(\s*,\s*\d+)*)?\s*\}$")


@dataclass(frozen=True)
class GroundSet:
    """Elements ``0 .. size-1``."""

    size: int

    def __post_init__(self):
        if int(self.size) < 1:
            raise InvalidInputError(f"ground set size must be >= 1, got {self.size}")

    def full(self) -> "Subset":
        return Subset(tuple(range(self.size)), self.size)

    def empty(self) -> "Subset":
        return Subset((), self.size)


@dataclass(frozen=True)
class Subset:
    """Canonical subset: strictly increasing member indices below ``parent_size``.

    Construct with :meth:`of` unless the members are already canonical.
    """

    members: tuple[int, ...]
    parent_size: int

    def __post_init__(self):
        prev = -1
        for x in self.members:
            if x <= prev:
                raise InvalidInputError(f"subset members not strictly increasing: {self.members}")
            prev = x
        if self.members and (self.members[0] < 0 or self.members[-1] >= self.parent_size):
            raise InvalidInputError(
                f"subset {self.members} out of range for ground set of size {self.parent_size}")

    @classmethod
    def of(cls, members: Iterable[int], parent_size: int) -> "Subset":
        items = [int(x) for x in members]
        uniq = sorted(set(items))
        if len(uniq) != len(items):
            raise InvalidInputError(f"duplicate elements in {items}")
        return cls(tuple(uniq), int(parent_size))

    @classmethod
    def parse(cls, text: str, parent_size: int) -> "Subset":
        """Parse the ``{0,3,7}`` encoding."""
        text = text.strip()
        if not _SUBSET_RE.match(text):
            raise InstanceParseError(f"malformed subset {text!r}; expected e.g. '{{0,3,7}}'")
        body = text[1:-1].strip()
        items = [int(tok) for tok in body.split(",")] if body else []
        return cls.of(items, parent_size)

    def __str__(self) -> str:
        return "{" + ",".join(map(str, self.members)) + "}"

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def __contains__(self, x) -> bool:
        return x in self.members

    @property
    def mask(self) -> int:
        out = 0
        for x in self.members:
            out |= 1 << x
        return out

    def _check(self, other: "Subset"):
        if not isinstance(other, Subset):
            raise InvalidInputError(f"expected Subset, got {type(other).__name__}")
        if other.parent_size != self.parent_size:
            raise InvalidInputError(
                f"parent_size mismatch: {self.parent_size} vs {other.parent_size}")

    def union(self, other: "Subset") -> "Subset":
        self._check(other)
        return Subset(tuple(sorted(set(self.members) | set(other.members))), self.parent_size)

    def difference(self, other: "Subset") -> "Subset":
        self._check(other)
        drop = set(other.members)
        return Subset(tuple(x for x in self.members if x not in drop), self.parent_size)

    def intersection(self, other: "Subset") -> "Subset":
        self._check(other)
        keep = set(other.members)
        return Subset(tuple(x for x in self.members if x in keep), self.parent_size)

    def complement(self) -> "Subset":
        have = set(self.members)
        return Subset(tuple(x for x in range(self.parent_size) if x not in have), self.parent_size)

    def issubset(self, other: "Subset") -> bool:
        self._check(other)
        return set(self.members) <= set(other.members)

    def add(self, x: int) -> "Subset":
        return Subset.of(self.members + (int(x),), self.parent_size)

    __or__ = union
    __sub__ = difference
    __and__ = intersection


def _as_members(subset, ground_size: int) -> tuple[int, ...]:
    if isinstance(subset, Subset):
        if subset.parent_size != ground_size:
            raise InvalidInputError(
                f"subset over {subset.parent_size} elements passed to oracle over {ground_size}")
        return subset.members
    return Subset.of(subset, ground_size).members


class SetFunction:
    """Oracle contract for a normalised set function over ``0 .. ground_size-1``.

    Subclasses implement :meth:`_value` on a canonical member tuple and may
    override :meth:`_values` with a batched kernel. ``eval_count`` grows by
    exactly one per subset evaluated, whichever entry point is used.
    """

    def __init__(self, ground_size: int):
        self.ground = GroundSet(int(ground_size))
        self._count = 0
        self._lock = threading.Lock()

    @property
    def ground_size(self) -> int:
        return self.ground.size

    @property
    def eval_count(self) -> int:
        return self._count

    def _bump(self, n: int):
        with self._lock:
            self._count += n

    def evaluate(self, subset) -> float:
        members = _as_members(subset, self.ground_size)
        self._bump(1)
        return float(self._value(members))

    def evaluate_many(self, subsets: Sequence) -> np.ndarray:
        rows = [_as_members(s, self.ground_size) for s in subsets]
        self._bump(len(rows))
        if not rows:
            return np.empty(0)
        return np.asarray(self._values(rows), dtype=np.float64)

    def _value(self, members: tuple[int, ...]) -> float:
        raise NotImplementedError

    def _values(self, rows: list[tuple[int, ...]]) -> np.ndarray:
        return np.array([self._value(r) for r in rows], dtype=np.float64)

    def subset(self, members: Iterable[int]) -> Subset:
        return Subset.of(members, self.ground_size)

    def __call__(self, subset) -> float:
        return self.evaluate(subset)


ObjectiveOracle = SetFunction


class MemoizedOracle(SetFunction):
    """Caching wrapper; the inner oracle is only called on misses."""

    def __init__(self, inner: SetFunction):
        super().__init__(inner.ground_size)
        self.inner = inner
        self._cache: dict[int, float] = {}
        self.hits = 0
        self.misses = 0

    def _key(self, members):
        out = 0
        for x in members:
            out |= 1 << x
        return out

    def _value(self, members):
        key = self._key(members)
        with self._lock:
            if key in self._cache:
                self.hits += 1
                return self._cache[key]
        value = self.inner.evaluate(Subset(members, self.ground_size))
        with self._lock:
            self.misses += 1
            self._cache[key] = value
        return value

    def _values(self, rows):
        out = np.empty(len(rows))
        todo = {}
        for i, r in enumerate(rows):
            key = self._key(r)
            if key in self._cache:
                self.hits += 1
                out[i] = self._cache[key]
            else:
                todo.setdefault(key, (r, []))[1].append(i)
        if todo:
            keys = list(todo)
            vals = self.inner.evaluate_many([Subset(todo[k][0], self.ground_size) for k in keys])
            for k, v in zip(keys, vals):
                # repeats of a missed key inside one batch are served from the first call
                self.misses += 1
                self.hits += len(todo[k][1]) - 1
                self._cache[k] = float(v)
                out[todo[k][1]] = v
        return out


def marginal_gain(oracle: SetFunction, x: int, base) -> float:
    """``f(base + x) - f(base)``; two oracle evaluations."""
    base_members = _as_members(base, oracle.ground_size)
    x = int(x)
    if not 0 <= x < oracle.ground_size:
        raise InvalidInputError(f"element {x} out of range for ground set of size {oracle.ground_size}")
    if x in base_members:
        raise InvalidInputError(f"element {x} already in base set {set(base_members)}")
    with_x = Subset.of(base_members + (x,), oracle.ground_size)
    return oracle.evaluate(with_x) - oracle.evaluate(Subset(base_members, oracle.ground_size))
