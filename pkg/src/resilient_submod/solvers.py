"""Selection algorithms for the resilient max-min problem."""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from math import comb
from typing import Optional

import numpy as np

from . import kernels
from .adversary import REMOVAL_CAP, RemovalResult, exact_removal, worst_removal
from .analysis import compute_curvature, theorem1_bound
from .core import SetFunction, Subset
from .errors import CapacityError, DegenerateElementError, InvalidInputError, NotSubmodularError

MAXMIN_CAP = 10 ** 8


@dataclass(frozen=True)
class ProblemInstance:
    """Objective plus cardinality budget ``alpha`` and removal budget ``beta``."""

    oracle: SetFunction
    alpha: int
    beta: int

    def __post_init__(self):
        m = self.oracle.ground_size
        a, b = int(self.alpha), int(self.beta)
        if b < 0:
            raise InvalidInputError(f"beta must be >= 0, got beta={b}")
        if b > a:
            raise InvalidInputError(f"beta must be <= alpha, got beta={b} > alpha={a}")
        if a > m:
            raise InvalidInputError(f"alpha must be <= |V|, got alpha={a} > |V|={m}")
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "beta", b)

    @property
    def m(self) -> int:
        return self.oracle.ground_size

    def selection_budget(self) -> int:
        """Upper bound on evaluations spent by :func:`resilient_greedy` before the attack."""
        k = self.alpha - self.beta
        return self.m * k + self.m + k


@dataclass
class SolveResult:
    selected: Subset
    worst_removal: RemovalResult
    solver_name: str
    eval_count: int
    a1: Optional[Subset] = None
    a2: Optional[Subset] = None
    curvature: Optional[float] = None
    bound: Optional[float] = None
    extra: dict = field(default_factory=dict)

    @property
    def residual_value(self) -> float:
        return self.worst_removal.residual_value


def _argmax_first(values) -> int:
    # strict '>' scan: the earliest maximum wins
    best, j = -np.inf, -1
    for i, v in enumerate(values):
        if v > best:
            best, j = v, i
    return j


def plain_greedy(oracle: SetFunction, candidates, k: int) -> Subset:
    """Pick ``k`` candidates one by one, each maximising the gain over the picks so far.

    Each round costs one evaluation of the current set plus one per remaining
    candidate. Ties go to the smallest element index.
    """
    m = oracle.ground_size
    candidates = candidates if isinstance(candidates, Subset) else Subset.of(candidates, m)
    k = int(k)
    if k < 0 or k > len(candidates):
        raise InvalidInputError(f"cannot pick k={k} from {len(candidates)} candidates")
    chosen: list[int] = []
    remaining = list(candidates.members)
    for _ in range(k):
        base_set = Subset.of(chosen, m)
        base = oracle.evaluate(base_set)
        trial = oracle.evaluate_many([Subset.of(chosen + [y], m) for y in remaining])
        j = _argmax_first(trial - base)
        chosen.append(remaining.pop(j))
    return Subset.of(chosen, m)


def _attach_bound(result: SolveResult, instance: ProblemInstance, with_bound: bool):
    if not with_bound:
        return result
    try:
        kappa = compute_curvature(instance.oracle).kappa
    except (DegenerateElementError, NotSubmodularError):
        return result
    result.curvature = kappa
    result.bound = theorem1_bound(kappa, instance.beta).bound
    return result


def top_singletons(oracle: SetFunction, k: int) -> tuple[Subset, np.ndarray]:
    """The ``k`` largest singleton values (ties by index) and all singleton values."""
    m = oracle.ground_size
    singles = oracle.evaluate_many([Subset((v,), m) for v in range(m)])
    order = np.lexsort((np.arange(m), -singles))
    return Subset.of(order[:k].tolist(), m), singles


def resilient_greedy(instance: ProblemInstance, removal: str = "auto",
                     cap: int = REMOVAL_CAP, with_bound: bool = True) -> SolveResult:
    """Two-phase resilient selection.

    ``A1`` takes the ``beta`` elements with the largest singleton values, as
    bait for the attacker. ``A2`` then takes ``alpha - beta`` elements greedily
    from the rest. Its marginal gains are taken relative to ``A2`` alone, as
    if ``A1`` were already removed. ``eval_count`` of the result covers only
    these two phases. The attack and the curvature report are counted
    separately.
    """
    f = instance.oracle
    before = f.eval_count
    a1, _ = top_singletons(f, instance.beta)
    a2 = plain_greedy(f, a1.complement(), instance.alpha - instance.beta)
    selected = a1 | a2
    used = f.eval_count - before
    attack = worst_removal(f, selected, instance.beta, removal, cap)
    result = SolveResult(selected=selected, worst_removal=attack, solver_name="resilient",
                         eval_count=used, a1=a1, a2=a2)
    return _attach_bound(result, instance, with_bound)


def exact_maxmin(instance: ProblemInstance, cap: int = MAXMIN_CAP) -> SolveResult:
    """Optimal value of the max-min problem by exhaustive search.

    Only sets of size exactly ``alpha`` are scanned, which suffices for
    monotone ``f``. The residual of ``A`` is the minimum of ``f`` over its
    subsets of size ``alpha - beta``. ``f`` is tabulated once on every such
    subset of ``V`` and the max-min is reduced in a compiled kernel. Ties go
    to the lexicographically smallest ``A``.
    """
    f, alpha, beta = instance.oracle, instance.alpha, instance.beta
    m = f.ground_size
    work = comb(m, alpha) * comb(alpha, beta)
    if work > cap:
        raise CapacityError(
            f"exact max-min needs C({m},{alpha})*C({alpha},{beta}) = {work} residual checks > cap {cap}")
    keep = alpha - beta
    before = f.eval_count
    binom = kernels.binomial_table(m, max(keep, 1) + 1)
    table = np.empty(comb(m, keep))
    chunk = 1 << 15
    it = combinations(range(m), keep)
    while True:
        rows = [c for _, c in zip(range(chunk), it)]
        if not rows:
            break
        arr = np.array(rows, dtype=np.int64).reshape(len(rows), keep)
        table[kernels.colex_ranks(arr, binom)] = f.evaluate_many([Subset(r, m) for r in rows])
    patterns = kernels.position_patterns(alpha, keep)
    best_a, _ = kernels.maxmin_table(m, alpha, table, binom, patterns)
    selected = Subset.of(np.asarray(best_a).tolist(), m)
    attack = exact_removal(f, selected, beta, cap=max(cap, comb(alpha, beta)))
    return SolveResult(selected=selected, worst_removal=attack, solver_name="exact",
                       eval_count=f.eval_count - before)


def greedy_baseline(instance: ProblemInstance, removal: str = "auto", cap: int = REMOVAL_CAP,
                    with_bound: bool = False) -> SolveResult:
    """Non-resilient greedy on the whole ground set."""
    f = instance.oracle
    before = f.eval_count
    selected = plain_greedy(f, f.ground.full(), instance.alpha)
    used = f.eval_count - before
    attack = worst_removal(f, selected, instance.beta, removal, cap)
    return _attach_bound(SolveResult(selected, attack, "greedy", used), instance, with_bound)


def baseline_top_alpha(instance: ProblemInstance, removal: str = "auto", cap: int = REMOVAL_CAP,
                       with_bound: bool = False) -> SolveResult:
    f = instance.oracle
    before = f.eval_count
    selected, _ = top_singletons(f, instance.alpha)
    used = f.eval_count - before
    attack = worst_removal(f, selected, instance.beta, removal, cap)
    return _attach_bound(SolveResult(selected, attack, "top", used), instance, with_bound)


def baseline_random(instance: ProblemInstance, seed: int, removal: str = "auto",
                    cap: int = REMOVAL_CAP, with_bound: bool = False) -> SolveResult:
    f = instance.oracle
    rng = np.random.default_rng(int(seed))
    pick = rng.choice(f.ground_size, size=instance.alpha, replace=False)
    selected = Subset.of(pick.tolist(), f.ground_size)
    attack = worst_removal(f, selected, instance.beta, removal, cap)
    return _attach_bound(SolveResult(selected, attack, "random", 0), instance, with_bound)


SOLVERS = ("resilient", "exact", "greedy", "top", "random")


def solve(instance: ProblemInstance, solver: str = "resilient", seed: Optional[int] = None,
          cap: Optional[int] = None, removal: str = "auto") -> SolveResult:
    """Run one named solver; the non-exact ones also report curvature and bound when defined."""
    rcap = REMOVAL_CAP if cap is None else cap
    if solver == "resilient":
        return resilient_greedy(instance, removal, rcap)
    if solver == "exact":
        return _attach_bound(exact_maxmin(instance, MAXMIN_CAP if cap is None else cap), instance, True)
    if solver == "greedy":
        return greedy_baseline(instance, removal, rcap, with_bound=True)
    if solver == "top":
        return baseline_top_alpha(instance, removal, rcap, with_bound=True)
    if solver == "random":
        return baseline_random(instance, 0 if seed is None else seed, removal, rcap, with_bound=True)
    raise InvalidInputError(f"unknown solver {solver!r}; choose from {', '.join(SOLVERS)}")
