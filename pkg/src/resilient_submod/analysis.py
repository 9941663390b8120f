"""Curvature, approximation bounds and property checkers for set functions."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import SetFunction, Subset
from .errors import DegenerateElementError, InvalidInputError, NotSubmodularError

SINGLETON_EPS = 1e-12
KAPPA_ZERO = 1e-12
CLAMP_TOL = 1e-6
PROPERTY_TOL = 1e-9


@dataclass(frozen=True)
class CurvatureReport:
    kappa: float
    argmin_element: int
    per_element_ratios: tuple[float, ...]
    eval_count_used: int


@dataclass(frozen=True)
class BoundReport:
    kappa: float
    beta: int
    bound: float
    branch: str  # "one_minus_kappa" or "inv_beta_plus_one"


@dataclass(frozen=True)
class CheckResult:
    holds: bool
    slack: float
    precondition_met: bool = True


def compute_curvature(oracle: SetFunction) -> CurvatureReport:
    """Total curvature ``1 - min_v f(v | V - v) / f(v)``.

    Uses exactly ``2m + 1`` evaluations. Raises
    :class:`DegenerateElementError` if some singleton value is ``<= 1e-12``
    and :class:`NotSubmodularError` if the raw value leaves ``[0, 1]`` by more
    than ``1e-6``.
    """
    m = oracle.ground_size
    before = oracle.eval_count
    full = oracle.ground.full()
    f_full = oracle.evaluate(full)
    singles = oracle.evaluate_many([Subset((v,), m) for v in range(m)])
    for v in range(m):
        if not singles[v] > SINGLETON_EPS:
            raise DegenerateElementError(v, float(singles[v]))
    leave_one_out = oracle.evaluate_many(
        [Subset(tuple(x for x in range(m) if x != v), m) for v in range(m)])
    ratios = (f_full - leave_one_out) / singles
    j = int(np.argmin(ratios))
    raw = 1.0 - float(ratios[j])
    if raw < -CLAMP_TOL or raw > 1.0 + CLAMP_TOL:
        raise NotSubmodularError(
            f"raw curvature {raw!r} outside [0, 1] (element {j}); oracle is not monotone submodular")
    return CurvatureReport(
        kappa=min(max(raw, 0.0), 1.0),
        argmin_element=j,
        per_element_ratios=tuple(float(r) for r in ratios),
        eval_count_used=oracle.eval_count - before,
    )


def _check_kappa(kappa, upper_tol=1e-9):
    kappa = float(kappa)
    if not (-upper_tol <= kappa <= 1.0 + upper_tol):
        raise InvalidInputError(f"kappa must lie in [0, 1], got {kappa}")
    return min(max(kappa, 0.0), 1.0)


def greedy_factor(kappa: float) -> float:
    """``(1 - exp(-kappa)) / kappa``, equal to 1 in the limit ``kappa -> 0``."""
    kappa = _check_kappa(kappa)
    if kappa < KAPPA_ZERO:
        return 1.0
    return -math.expm1(-kappa) / kappa


def theorem1_bound(kappa: float, beta: int) -> BoundReport:
    """Guaranteed fraction of the optimum reached by :func:`resilient_greedy`:
    ``max(1 - kappa, 1/(beta + 1)) * (1 - exp(-kappa)) / kappa``."""
    kappa = _check_kappa(kappa)
    beta = int(beta)
    if beta < 0:
        raise InvalidInputError(f"beta must be >= 0, got {beta}")
    lin = 1.0 - kappa
    inv = 1.0 / (beta + 1)
    if lin >= inv:
        lead, branch = lin, "one_minus_kappa"
    else:
        lead, branch = inv, "inv_beta_plus_one"
    return BoundReport(kappa=kappa, beta=beta, bound=lead * greedy_factor(kappa), branch=branch)


def g_curve(kappa: float) -> float:
    """Worst-case bound ``(1 - kappa)/kappa * (1 - exp(-kappa))`` as ``beta`` grows."""
    kappa = _check_kappa(kappa, upper_tol=0.0)
    return (1.0 - kappa) * greedy_factor(kappa)


# ---------------------------------------------------------------------------
# inequalities behind the approximation bound
# ---------------------------------------------------------------------------

def check_lemma1(oracle: SetFunction, subset, kappa: float) -> CheckResult:
    """``f(A) >= (1 - kappa) * sum_a f(a)``."""
    subset = subset if isinstance(subset, Subset) else oracle.subset(subset)
    value = oracle.evaluate(subset)
    singles = oracle.evaluate_many([Subset((a,), oracle.ground_size) for a in subset])
    # left-to-right sum so results do not depend on numpy's pairwise order
    total = 0.0
    for s in singles:
        total += float(s)
    slack = value - (1.0 - float(kappa)) * total
    return CheckResult(holds=slack >= -PROPERTY_TOL, slack=slack)


def check_lemma2(oracle: SetFunction, P, Y) -> CheckResult:
    """``f(P | Y) <= |P| f(Y)`` whenever every singleton of ``Y`` dominates every singleton of ``P``.

    If the dominance precondition fails the result has
    ``precondition_met=False`` and ``holds=True``: the lemma says nothing then.
    """
    P = P if isinstance(P, Subset) else oracle.subset(P)
    Y = Y if isinstance(Y, Subset) else oracle.subset(Y)
    if not len(P) or not len(Y):
        raise InvalidInputError("the singleton-dominance check needs non-empty P and Y")
    if len(P & Y):
        raise InvalidInputError(f"P={P} and Y={Y} must be disjoint")
    m = oracle.ground_size
    sp = oracle.evaluate_many([Subset((p,), m) for p in P])
    sy = oracle.evaluate_many([Subset((y,), m) for y in Y])
    f_y = oracle.evaluate(Y)
    gain = oracle.evaluate(P | Y) - f_y
    slack = len(P) * f_y - gain
    if sy.min() < sp.max():
        return CheckResult(holds=True, slack=slack, precondition_met=False)
    return CheckResult(holds=slack >= -PROPERTY_TOL, slack=slack)


# ---------------------------------------------------------------------------
# randomised checks of monotonicity / submodularity
# ---------------------------------------------------------------------------

def _random_nested(rng, m):
    # A subset of A' via independent coin flips on a random superset
    outer = rng.random(m) < rng.random()
    inner = outer & (rng.random(m) < rng.random())
    return np.flatnonzero(inner), np.flatnonzero(outer)


@dataclass(frozen=True)
class PropertyReport:
    name: str
    trials: int
    failures: int
    worst_slack: float

    @property
    def passed(self) -> bool:
        return self.failures == 0


def check_monotone(oracle: SetFunction, trials=500, seed=0, tol=PROPERTY_TOL) -> PropertyReport:
    """``f(A) <= f(A')`` on random nested pairs."""
    rng = np.random.default_rng(seed)
    m = oracle.ground_size
    worst, fails = math.inf, 0
    for _ in range(trials):
        a, b = _random_nested(rng, m)
        vals = oracle.evaluate_many([Subset(tuple(a.tolist()), m), Subset(tuple(b.tolist()), m)])
        slack = vals[1] - vals[0]
        worst = min(worst, slack)
        fails += slack < -tol
    return PropertyReport("monotone", trials, int(fails), float(worst))


def check_diminishing_returns(oracle: SetFunction, trials=500, seed=0, tol=PROPERTY_TOL) -> PropertyReport:
    """``f(x | A) >= f(x | A')`` for random ``A <= A'`` and ``x`` outside ``A'``."""
    rng = np.random.default_rng(seed)
    m = oracle.ground_size
    worst, fails, done = math.inf, 0, 0
    while done < trials:
        a, b = _random_nested(rng, m)
        rest = np.setdiff1d(np.arange(m), b)
        if rest.size == 0:
            if m == 1:
                break
            continue
        x = int(rng.choice(rest))
        rows = [tuple(a.tolist()), tuple(sorted(a.tolist() + [x])),
                tuple(b.tolist()), tuple(sorted(b.tolist() + [x]))]
        v = oracle.evaluate_many([Subset(r, m) for r in rows])
        slack = (v[1] - v[0]) - (v[3] - v[2])
        worst = min(worst, slack)
        fails += slack < -tol
        done += 1
    return PropertyReport("diminishing_returns", done, int(fails), float(worst))


def check_union_intersection(oracle: SetFunction, trials=500, seed=0, tol=PROPERTY_TOL) -> PropertyReport:
    """``f(A) + f(B) >= f(A | B) + f(A & B)`` on random pairs."""
    rng = np.random.default_rng(seed)
    m = oracle.ground_size
    worst, fails = math.inf, 0
    for _ in range(trials):
        a = rng.random(m) < rng.random()
        b = rng.random(m) < rng.random()
        rows = [np.flatnonzero(s) for s in (a, b, a | b, a & b)]
        v = oracle.evaluate_many([Subset(tuple(r.tolist()), m) for r in rows])
        slack = (v[0] + v[1]) - (v[2] + v[3])
        worst = min(worst, slack)
        fails += slack < -tol
    return PropertyReport("union_intersection", trials, int(fails), float(worst))


def check_lemma1_random(oracle: SetFunction, kappa: float, trials=100, seed=0) -> PropertyReport:
    rng = np.random.default_rng(seed)
    m = oracle.ground_size
    worst, fails = math.inf, 0
    for _ in range(trials):
        members = np.flatnonzero(rng.random(m) < rng.random())
        res = check_lemma1(oracle, Subset(tuple(members.tolist()), m), kappa)
        worst = min(worst, res.slack)
        fails += not res.holds
    return PropertyReport("lemma1", trials, int(fails), float(worst))


def check_lemma2_random(oracle: SetFunction, trials=200, seed=0, max_attempts=20000) -> PropertyReport:
    """Samples (P, Y) meeting the dominance precondition and checks the gain bound.

    Pairs are built from the singleton ranking: Y is drawn from a prefix of
    the descending order and P from the suffix after it.
    """
    rng = np.random.default_rng(seed)
    m = oracle.ground_size
    if m < 2:
        return PropertyReport("lemma2", 0, 0, math.inf)
    singles = oracle.evaluate_many([Subset((v,), m) for v in range(m)])
    order = np.lexsort((np.arange(m), -singles))
    worst, fails, done, attempts = math.inf, 0, 0, 0
    while done < trials and attempts < max_attempts:
        attempts += 1
        cut = int(rng.integers(1, m))
        head, tail = order[:cut], order[cut:]
        y = head[rng.random(head.size) < rng.random()]
        p = tail[rng.random(tail.size) < rng.random()]
        if not y.size or not p.size:
            continue
        res = check_lemma2(oracle, Subset.of(p.tolist(), m), Subset.of(y.tolist(), m))
        if not res.precondition_met:
            continue
        worst = min(worst, res.slack)
        fails += not res.holds
        done += 1
    return PropertyReport("lemma2", done, int(fails), float(worst))


def run_property_checks(oracle: SetFunction, trials=500, seed=0) -> list[PropertyReport]:
    """All randomised checks; the curvature check is skipped when curvature is undefined."""
    reports = [
        check_monotone(oracle, trials, seed),
        check_diminishing_returns(oracle, trials, seed),
        check_union_intersection(oracle, trials, seed),
    ]
    try:
        kappa = compute_curvature(oracle).kappa
    except DegenerateElementError:
        kappa = None
    except NotSubmodularError:
        kappa = None
        reports.append(PropertyReport("curvature_range", 1, 1, -math.inf))
    if kappa is not None:
        reports.append(check_lemma1_random(oracle, kappa, min(trials, 100), seed))
    reports.append(check_lemma2_random(oracle, min(trials, 200), seed))
    return reports
