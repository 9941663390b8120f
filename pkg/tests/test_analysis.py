import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import FAMILIES, random_coverage, random_logdet, random_modular
from resilient_submod.analysis import (
    check_lemma1,
    check_lemma1_random,
    check_lemma2,
    check_lemma2_random,
    compute_curvature,
    g_curve,
    run_property_checks,
    theorem1_bound,
)
from resilient_submod.core import SetFunction, Subset
from resilient_submod.errors import DegenerateElementError, InvalidInputError, NotSubmodularError
from resilient_submod.functions import ModularFunction, TabularFunction, random_psd_instance

# (1 - exp(-1)) / 2, evaluated independently with mpmath at 50 digits
HALF_ONE_MINUS_INV_E = 0.31606027941427883
ONE_MINUS_INV_E = 0.6321205588285577
# (0.5 / 0.5) * (1 - exp(-0.5)), mpmath at 50 digits
G_AT_HALF = 0.39346934028736658


class Scaled(SetFunction):
    def __init__(self, inner, c):
        super().__init__(inner.ground_size)
        self.inner, self.c = inner, c

    def _value(self, members):
        return self.c * self.inner._value(members)


class TestCurvature:
    def test_modular_is_zero(self):
        rep = compute_curvature(random_modular(np.random.default_rng(0), 9))
        # f(V) - f(V - v) reproduces w_v only up to summation rounding
        assert rep.kappa <= 1e-12

    def test_example1(self, example1):
        rep = compute_curvature(example1)
        assert rep.kappa == 1.0
        # ratios f(v | V - v) / f(v): v1 -> 0.5/2, v2 -> 0/1.5, v3 -> 1/1
        assert rep.per_element_ratios == (0.25, 0.0, 1.0)
        assert rep.argmin_element == 1

    @pytest.mark.parametrize("seed", range(4))
    def test_logdet_m15(self, seed):
        rep = compute_curvature(random_psd_instance(15, 20, seed))
        assert 0.9 < rep.kappa <= 1.0

    @pytest.mark.parametrize("family", sorted(FAMILIES))
    def test_eval_count_exact(self, family):
        f = FAMILIES[family](np.random.default_rng(3))
        before = f.eval_count
        rep = compute_curvature(f)
        assert rep.eval_count_used == f.eval_count - before == 2 * f.ground_size + 1
        assert 0.0 <= rep.kappa <= 1.0

    def test_degenerate_element_named(self):
        with pytest.raises(DegenerateElementError, match="element 2"):
            compute_curvature(ModularFunction([1.0, 2.0, 0.0]))

    def test_non_submodular_surfaces(self):
        # supermodular: f(V) - f(V - v) exceeds f(v), raw curvature < 0
        vals = [bin(mask).count("1") ** 2 for mask in range(8)]
        with pytest.raises(NotSubmodularError):
            compute_curvature(TabularFunction(3, vals, validate=False))

    @settings(max_examples=30, deadline=None)
    @given(st.floats(1e-3, 1e3), st.integers(0, 10 ** 6))
    def test_scale_invariance(self, c, seed):
        f = random_coverage(np.random.default_rng(seed), 7)
        assert abs(compute_curvature(Scaled(f, c)).kappa - compute_curvature(f).kappa) <= 1e-9


class TestBound:
    def test_kappa_zero(self):
        for beta in range(10):
            rep = theorem1_bound(0.0, beta)
            assert rep.bound == 1.0
            assert rep.branch == "one_minus_kappa"

    def test_example1_bound(self):
        rep = theorem1_bound(1.0, 1)
        assert abs(rep.bound - HALF_ONE_MINUS_INV_E) <= 1e-15
        assert rep.branch == "inv_beta_plus_one"

    def test_beta_zero(self):
        assert abs(theorem1_bound(1.0, 0).bound - ONE_MINUS_INV_E) <= 1e-15

    def test_invalid(self):
        with pytest.raises(InvalidInputError):
            theorem1_bound(1.1, 1)
        with pytest.raises(InvalidInputError):
            theorem1_bound(-0.5, 1)
        with pytest.raises(InvalidInputError):
            theorem1_bound(0.5, -1)

    @given(st.floats(0.0, 1.0), st.integers(0, 50))
    def test_monotone_in_beta_and_positive(self, kappa, beta):
        a = theorem1_bound(kappa, beta).bound
        b = theorem1_bound(kappa, beta + 1).bound
        assert b <= a
        assert 0.0 < b <= 1.0

    def test_continuous_at_zero(self):
        assert theorem1_bound(1e-9, 3).bound == pytest.approx(1.0, abs=1e-8)

    def test_matches_formula(self):
        for kappa in (0.1, 0.5, 0.9, 1.0):
            for beta in (0, 1, 3, 6):
                ref = max(1 - kappa, 1 / (beta + 1)) * (1 - math.exp(-kappa)) / kappa
                assert theorem1_bound(kappa, beta).bound == pytest.approx(ref, rel=1e-14)


class TestGCurve:
    def test_at_one(self):
        assert g_curve(1.0) == 0.0

    def test_at_half(self):
        assert g_curve(0.5) == pytest.approx(G_AT_HALF, rel=1e-15)

    def test_limit_is_continuous(self):
        # (1 - k)(1 - e^-k)/k -> 1; the threshold value must agree with the formula nearby
        assert g_curve(1e-13) == pytest.approx(g_curve(1e-6), abs=1e-5)

    @given(st.floats(1e-9, 1.0), st.floats(1e-9, 1.0))
    def test_decreasing(self, a, b):
        lo, hi = sorted((a, b))
        assert g_curve(hi) <= g_curve(lo) + 1e-15

    def test_out_of_range(self):
        with pytest.raises(InvalidInputError):
            g_curve(1.5)


class TestLemma1:
    def test_modular_equality(self):
        f = random_modular(np.random.default_rng(4), 8)
        res = check_lemma1(f, [0, 3, 5], 0.0)
        assert res.holds and abs(res.slack) <= 1e-12

    def test_example1_trivial(self, example1):
        res = check_lemma1(example1, [0, 1], 1.0)
        assert res.holds and res.slack == 2.0

    def test_logdet_sweep(self):
        f = random_psd_instance(10, 20, 8)
        rep = check_lemma1_random(f, compute_curvature(f).kappa, trials=200, seed=1)
        assert rep.passed and rep.trials == 200

    @pytest.mark.parametrize("family", sorted(FAMILIES))
    def test_every_family(self, family):
        f = FAMILIES[family](np.random.default_rng(9))
        assert check_lemma1_random(f, compute_curvature(f).kappa, trials=100, seed=2).passed


class TestLemma2:
    def test_example1(self, example1):
        # f({v3} | {v1}) = 1 <= 1 * f({v1}) = 2
        res = check_lemma2(example1, [2], [0])
        assert res.holds and res.precondition_met and res.slack == 1.0

    def test_modular_equal_weights(self):
        f = ModularFunction([2.0] * 6)
        res = check_lemma2(f, [0, 1], [2, 3, 4])
        assert res.holds and res.slack == 2 * 6.0 - 4.0

    def test_precondition_reported(self, example1):
        res = check_lemma2(example1, [0], [2])
        assert not res.precondition_met

    def test_errors(self, example1):
        with pytest.raises(InvalidInputError):
            check_lemma2(example1, [], [0])
        with pytest.raises(InvalidInputError):
            check_lemma2(example1, [0], [0, 1])

    @pytest.mark.parametrize("seed", range(3))
    def test_coverage_sweep(self, seed):
        f = random_coverage(np.random.default_rng(seed), 10)
        rep = check_lemma2_random(f, trials=200, seed=seed)
        assert rep.trials == 200 and rep.passed


@pytest.mark.parametrize("family", sorted(FAMILIES))
def test_run_property_checks(family):
    f = FAMILIES[family](np.random.default_rng(21))
    reports = run_property_checks(f, trials=200, seed=0)
    assert [r.name for r in reports] == [
        "monotone", "diminishing_returns", "union_intersection", "lemma1", "lemma2"]
    assert all(r.passed for r in reports)


def test_property_checks_catch_violation():
    vals = [bin(mask).count("1") ** 2 for mask in range(16)]
    f = TabularFunction(4, vals, validate=False)
    reports = {r.name: r for r in run_property_checks(f, trials=200)}
    assert not reports["diminishing_returns"].passed
    assert reports["monotone"].passed


def test_logdet_lemmas_d20():
    f = random_logdet(np.random.default_rng(5), 12, 20)
    assert all(r.passed for r in run_property_checks(f, trials=100, seed=4))
