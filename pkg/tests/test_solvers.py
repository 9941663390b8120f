import math
from itertools import combinations

import numpy as np
import pytest

from bruteforce import best_of_size, maxmin_all_sizes
from conftest import FAMILIES, random_coverage, random_logdet, random_modular, random_tabular
from resilient_submod.analysis import compute_curvature, greedy_factor
from resilient_submod.core import Subset
from resilient_submod.errors import CapacityError, DegenerateElementError, InvalidInputError
from resilient_submod.solvers import (
    ProblemInstance,
    baseline_random,
    baseline_top_alpha,
    exact_maxmin,
    greedy_baseline,
    plain_greedy,
    resilient_greedy,
    solve,
)


class TestProblemInstance:
    def test_valid(self, example1):
        inst = ProblemInstance(example1, 2, 1)
        assert inst.m == 3 and inst.selection_budget() == 3 * 1 + 3 + 1

    @pytest.mark.parametrize("alpha,beta,word", [(3, 5, "beta must be <= alpha"),
                                                 (4, 1, "alpha must be <= |V|"),
                                                 (2, -1, "beta must be >= 0")])
    def test_invalid(self, example1, alpha, beta, word):
        with pytest.raises(InvalidInputError, match=word.replace("|", r"\|")):
            ProblemInstance(example1, alpha, beta)


class TestPlainGreedy:
    def test_k_zero(self, example1):
        assert plain_greedy(example1, example1.ground.full(), 0).members == ()

    def test_modular_top_k(self):
        f = random_modular(np.random.default_rng(1), 10)
        got = plain_greedy(f, f.ground.full(), 4)
        assert got.members == tuple(sorted(np.argsort(-f.weights, kind="stable")[:4].tolist()))

    def test_index_tie_break(self):
        f = random_modular(np.random.default_rng(1), 6)
        f.weights[:] = [1, 3, 3, 2, 3, 1]
        assert plain_greedy(f, f.ground.full(), 2).members == (1, 2)

    def test_too_many(self, example1):
        with pytest.raises(InvalidInputError):
            plain_greedy(example1, [0, 1], 3)

    @pytest.mark.parametrize("seed", range(10))
    def test_greedy_guarantee(self, seed):
        f = random_coverage(np.random.default_rng(seed), 9)
        before = f.eval_count
        got = plain_greedy(f, f.ground.full(), 3)
        assert f.eval_count - before <= 9 * 3 + 3
        opt = max(f._value(c) for c in combinations(range(9), 3))
        assert f.evaluate(got) >= (1 - 1 / math.e) * opt


class TestResilientGreedy:
    def test_example1(self, example1):
        res = resilient_greedy(ProblemInstance(example1, 2, 1))
        assert res.a1.members == (0,)
        assert res.a2.members == (1,)
        assert res.selected.members == (0, 1)
        assert res.residual_value == 1.5
        assert res.worst_removal.removed.members == (0,)
        assert res.curvature == 1.0

    def test_beta_zero_is_plain_greedy(self):
        f = random_coverage(np.random.default_rng(3), 10)
        res = resilient_greedy(ProblemInstance(f, 4, 0))
        assert res.a1.members == ()
        assert res.selected == plain_greedy(f, f.ground.full(), 4)

    def test_alpha_equals_beta(self):
        f = random_coverage(np.random.default_rng(3), 10)
        res = resilient_greedy(ProblemInstance(f, 4, 4))
        assert res.a2.members == () and res.selected == res.a1
        assert res.residual_value == 0.0

    @pytest.mark.parametrize("seed", range(10))
    def test_modular_is_exact(self, seed):
        rng = np.random.default_rng(seed)
        f = random_modular(rng, 8)
        alpha = int(rng.integers(1, 8))
        beta = int(rng.integers(0, alpha + 1))
        inst = ProblemInstance(f, alpha, beta)
        assert resilient_greedy(inst).residual_value == pytest.approx(
            maxmin_all_sizes(f, alpha, beta), abs=1e-12)

    @pytest.mark.parametrize("family", sorted(FAMILIES))
    def test_structure_and_budget(self, family):
        rng = np.random.default_rng(31)
        f = FAMILIES[family](rng)
        m = f.ground_size
        for alpha in range(0, min(m, 6) + 1):
            for beta in range(alpha + 1):
                inst = ProblemInstance(f, alpha, beta)
                res = resilient_greedy(inst, with_bound=False)
                assert len(res.selected) == alpha
                assert res.a1 | res.a2 == res.selected
                assert len(res.a1 & res.a2) == 0
                assert res.eval_count <= inst.selection_budget()
                singles = [f._value((v,)) for v in range(m)]
                rest = [singles[v] for v in range(m) if v not in res.a1]
                if res.a1.members and rest:
                    assert min(singles[v] for v in res.a1) >= max(rest)

    def test_a2_marginals_ignore_a1(self, example1):
        # relative to A1 = {v1}, v3 would win (gain 1 vs 0); relative to {} v2 wins
        res = resilient_greedy(ProblemInstance(example1, 2, 1))
        assert 1 in res.a2 and 2 not in res.a2

    def test_deterministic(self):
        f = random_logdet(np.random.default_rng(2), 10, 5)
        a = resilient_greedy(ProblemInstance(f, 5, 2))
        b = resilient_greedy(ProblemInstance(f, 5, 2))
        assert a == b


class TestExactMaxmin:
    def test_example1(self, example1):
        res = exact_maxmin(ProblemInstance(example1, 2, 1))
        assert res.selected.members == (0, 1)
        assert res.residual_value == 1.5

    def test_beta_zero(self):
        f = random_coverage(np.random.default_rng(6), 8)
        res = exact_maxmin(ProblemInstance(f, 3, 0))
        assert res.residual_value == best_of_size(f, range(8), 3)

    def test_modular_closed_form(self):
        # best A keeps the top 4 weights; the attacker drops the top 2 of them
        w = [5.0, 1.0, 7.0, 3.0, 9.0, 2.0, 8.0, 4.0]
        from resilient_submod.functions import ModularFunction
        res = exact_maxmin(ProblemInstance(ModularFunction(w), 4, 2))
        assert res.residual_value == 12.0
        assert res.selected.members == (0, 2, 4, 6)

    @pytest.mark.parametrize("family", sorted(FAMILIES))
    def test_matches_full_enumeration(self, family):
        rng = np.random.default_rng(41)
        f = FAMILIES[family](rng)
        for alpha in range(0, min(f.ground_size, 5) + 1):
            for beta in range(alpha + 1):
                got = exact_maxmin(ProblemInstance(f, alpha, beta)).residual_value
                assert got == pytest.approx(maxmin_all_sizes(f, alpha, beta), abs=1e-12)

    def test_cap(self):
        f = random_modular(np.random.default_rng(0), 12)
        with pytest.raises(CapacityError):
            exact_maxmin(ProblemInstance(f, 6, 3), cap=1000)

    def test_lexicographic_tie(self):
        from resilient_submod.functions import ModularFunction
        res = exact_maxmin(ProblemInstance(ModularFunction([1.0] * 6), 3, 1))
        assert res.selected.members == (0, 1, 2)


class TestChain:
    """f(A2) >= greedy_factor(kappa) * max_{A <= V - A1, |A| <= alpha - beta} f(A) >= greedy_factor * f*."""

    @pytest.mark.parametrize("family", sorted(FAMILIES))
    def test_chain(self, family):
        rng = np.random.default_rng(57)
        f = FAMILIES[family](rng)
        m = f.ground_size
        try:
            kappa = compute_curvature(f).kappa
        except DegenerateElementError:
            pytest.skip("curvature undefined")
        for alpha in range(1, min(m, 6) + 1):
            for beta in range(alpha + 1):
                inst = ProblemInstance(f, alpha, beta)
                res = resilient_greedy(inst, with_bound=False)
                rest = [v for v in range(m) if v not in res.a1]
                restricted = best_of_size(f, rest, alpha - beta)
                f_star = exact_maxmin(inst).residual_value
                assert restricted >= f_star - 1e-9
                assert f.evaluate(res.a2) >= greedy_factor(kappa) * restricted - 1e-9


class TestBaselines:
    def test_top_alpha_example1(self, example1):
        res = baseline_top_alpha(ProblemInstance(example1, 2, 1))
        assert res.selected.members == (0, 1) and res.residual_value == 1.5

    @pytest.mark.parametrize("seed", range(5))
    def test_top_alpha_modular_optimal(self, seed):
        rng = np.random.default_rng(seed)
        f = random_modular(rng, 8)
        inst = ProblemInstance(f, 4, 2)
        assert baseline_top_alpha(inst).residual_value == pytest.approx(
            maxmin_all_sizes(f, 4, 2), abs=1e-12)

    def test_random_reproducible(self):
        f = random_coverage(np.random.default_rng(0), 10)
        inst = ProblemInstance(f, 4, 1)
        a, b = baseline_random(inst, 99), baseline_random(inst, 99)
        assert a.selected == b.selected and a.residual_value == b.residual_value

    def test_greedy_baseline_example1(self, example1):
        # non-resilient greedy takes v1 then v3 and is beaten by the attacker
        res = greedy_baseline(ProblemInstance(example1, 2, 1))
        assert res.selected.members == (0, 2) and res.residual_value == 1.0

    def test_solve_dispatch(self, example1):
        inst = ProblemInstance(example1, 2, 1)
        for name in ("resilient", "exact", "greedy", "top", "random"):
            assert solve(inst, name, seed=1).solver_name == name
        with pytest.raises(InvalidInputError):
            solve(inst, "oracle")


def test_tabular_family_small():
    f = random_tabular(np.random.default_rng(0), 5)
    inst = ProblemInstance(f, 3, 1)
    assert exact_maxmin(inst).residual_value >= resilient_greedy(inst).residual_value
