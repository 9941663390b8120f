"""Worst-case removal of ``beta`` elements from a chosen set."""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import comb

import numpy as np

from .core import SetFunction, Subset
from .errors import CapacityError, InvalidInputError

REMOVAL_CAP = 10 ** 7


@dataclass(frozen=True)
class RemovalResult:
    removed: Subset
    residual_value: float
    exact: bool
    eval_count_used: int


def _prepare(oracle, A, beta):
    A = A if isinstance(A, Subset) else oracle.subset(A)
    if A.parent_size != oracle.ground_size:
        raise InvalidInputError(f"subset {A} is not over the oracle's ground set")
    beta = int(beta)
    if beta < 0:
        raise InvalidInputError(f"beta must be >= 0, got {beta}")
    return A, beta


def exact_removal(oracle: SetFunction, A, beta: int, cap: int = REMOVAL_CAP) -> RemovalResult:
    """Minimise ``f(A - B)`` over every ``B`` of size ``min(beta, |A|)``.

    Smaller removals never do better for a monotone ``f``. Among equal
    residuals the lexicographically smallest ``B`` wins.
    """
    A, beta = _prepare(oracle, A, beta)
    k = min(beta, len(A))
    count = comb(len(A), k)
    if count > cap:
        raise CapacityError(
            f"exact removal would enumerate C({len(A)},{k}) = {count} sets > cap {cap}; "
            "use greedy_removal or raise the cap")
    before = oracle.eval_count
    m = oracle.ground_size
    removals = list(combinations(A.members, k))
    keeps = []
    for b in removals:
        drop = set(b)
        keeps.append(Subset(tuple(x for x in A.members if x not in drop), m))
    values = oracle.evaluate_many(keeps)
    # first minimum in lexicographic order of the removed set
    j = int(np.argmin(values))
    return RemovalResult(Subset(removals[j], m), float(values[j]), True, oracle.eval_count - before)


def greedy_removal(oracle: SetFunction, A, beta: int) -> RemovalResult:
    """Remove, one at a time, the element whose loss hurts ``f`` most."""
    A, beta = _prepare(oracle, A, beta)
    m = oracle.ground_size
    before = oracle.eval_count
    current = list(A.members)
    removed = []
    value = None
    for _ in range(min(beta, len(A))):
        options = [Subset(tuple(current[:i] + current[i + 1:]), m) for i in range(len(current))]
        values = oracle.evaluate_many(options)
        i = int(np.argmin(values))
        removed.append(current.pop(i))
        value = float(values[i])
    if value is None:
        value = oracle.evaluate(A)
    return RemovalResult(Subset.of(removed, m), value, False, oracle.eval_count - before)


def worst_removal(oracle: SetFunction, A, beta: int, method: str = "auto",
                  cap: int = REMOVAL_CAP) -> RemovalResult:
    """Dispatch on ``method``: ``exact``, ``greedy`` or ``auto`` (exact when under ``cap``)."""
    if method == "exact":
        return exact_removal(oracle, A, beta, cap)
    if method == "greedy":
        return greedy_removal(oracle, A, beta)
    if method != "auto":
        raise InvalidInputError(f"unknown removal method {method!r}")
    A, beta = _prepare(oracle, A, beta)
    if comb(len(A), min(beta, len(A))) <= cap:
        return exact_removal(oracle, A, beta, cap)
    return greedy_removal(oracle, A, beta)
