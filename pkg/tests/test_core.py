"""Dominance primitives: axioms, filter semantics, brute-force equivalence."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pareto_prune import (
    ObjectivePoint,
    ParetoSolution,
    ProblemSpec,
    Realization,
    dominates,
    nondominated_filter,
    weakly_dominates,
)

P = ObjectivePoint

finite = st.floats(min_value=-1e6, max_value=1e6, allow_nan=False, allow_infinity=False)
points = st.builds(P, finite, finite)


def brute_force_filter(pts, eps=0.0):
    """Independent O(n^2) oracle: strict dominance, duplicates survive."""
    out = []
    for i, a in enumerate(pts):
        dominated = False
        for j, b in enumerate(pts):
            if i == j:
                continue
            if (
                b.j1 <= a.j1 + eps
                and b.j2 <= a.j2 + eps
                and (b.j1 < a.j1 - eps or b.j2 < a.j2 - eps)
            ):
                dominated = True
                break
        if not dominated:
            out.append(a)
    return out


class TestDominates:
    def test_weak_le_with_one_strict(self):
        assert dominates(P(1, 1), P(1, 2))

    def test_incomparable_pair(self):
        assert not dominates(P(1, 2), P(2, 1))

    def test_irreflexive_on_example(self):
        assert not dominates(P(1, 1), P(1, 1))

    def test_negative_eps_rejected(self):
        with pytest.raises(ValueError):
            dominates(P(0, 0), P(1, 1), eps=-1e-9)

    @given(points)
    def test_irreflexivity(self, p):
        assert not dominates(p, p, 0.0)

    @given(points, points, st.sampled_from([0.0, 1e-9, 0.1]))
    def test_antisymmetry(self, a, b, eps):
        if dominates(a, b, eps):
            assert not dominates(b, a, eps)

    @given(points, points, points)
    def test_transitivity(self, a, b, c):
        if dominates(a, b) and dominates(b, c):
            assert dominates(a, c)

    @given(points, points, st.integers(-20, 20), st.integers(-20, 20))
    def test_scaling_invariance_powers_of_two(self, a, b, e1, e2):
        # powers of two scale floats exactly, so the boolean outcome is
        # preserved without rounding caveats
        c1, c2 = 2.0 ** e1, 2.0 ** e2
        sa = P(a.j1 * c1, a.j2 * c2)
        sb = P(b.j1 * c1, b.j2 * c2)
        assert dominates(a, b) == dominates(sa, sb)
        assert weakly_dominates(a, b) == weakly_dominates(sa, sb)


class TestWeaklyDominates:
    def test_equal_points(self):
        assert weakly_dominates(P(1, 1), P(1, 1))

    def test_better_in_one(self):
        assert weakly_dominates(P(0, 3), P(1, 3))

    def test_worse_in_one(self):
        assert not weakly_dominates(P(0, 3), P(1, 2))

    def test_negative_eps_rejected(self):
        with pytest.raises(ValueError):
            weakly_dominates(P(0, 0), P(1, 1), eps=-0.5)


class TestObjectivePoint:
    @pytest.mark.parametrize("bad", [float("nan"), float("inf"), float("-inf")])
    def test_nonfinite_rejected(self, bad):
        with pytest.raises(ValueError):
            P(bad, 0.0)
        with pytest.raises(ValueError):
            P(0.0, bad)


class TestNondominatedFilter:
    def test_simple(self):
        pts = [P(1, 2), P(2, 1), P(2, 2)]
        assert nondominated_filter(pts) == [P(1, 2), P(2, 1)]

    def test_duplicates_survive(self):
        pts = [P(1, 1), P(1, 1)]
        assert nondominated_filter(pts) == pts

    def test_empty(self):
        assert nondominated_filter([]) == []

    def test_stable_order(self):
        pts = [P(3, 0), P(0, 3), P(1, 1)]
        assert nondominated_filter(pts) == pts

    def test_tie_in_one_coordinate_is_dominated(self):
        # equal j2, strictly worse j1: strict dominance removes it
        assert nondominated_filter([P(1, 5), P(2, 5)]) == [P(1, 5)]

    @pytest.mark.parametrize("n", [100, 1000])
    @pytest.mark.parametrize("eps", [0.0, 1e-3])
    def test_matches_brute_force(self, n, eps):
        rng = np.random.default_rng(n)
        pts = [P(a, b) for a, b in rng.random((n, 2))]
        assert nondominated_filter(pts, eps) == brute_force_filter(pts, eps)

    def test_matches_brute_force_with_exact_ties(self):
        rng = np.random.default_rng(7)
        vals = rng.integers(0, 8, size=(300, 2)).astype(float)
        pts = [P(a, b) for a, b in vals]
        assert nondominated_filter(pts) == brute_force_filter(pts)

    @given(st.lists(points, max_size=60))
    @settings(max_examples=60)
    def test_idempotent(self, pts):
        once = nondominated_filter(pts)
        assert nondominated_filter(once) == once

    @given(st.lists(points, max_size=40))
    @settings(max_examples=60)
    def test_matches_brute_force_property(self, pts):
        assert nondominated_filter(pts) == brute_force_filter(pts)

    def test_accepts_solutions(self):
        r = Realization(k=1, z=(0.0,))
        sols = [
            ParetoSolution(y=(0.0,), realization=r, point=P(1, 2), provenance="w0"),
            ParetoSolution(y=(1.0,), realization=r, point=P(0, 3), provenance="w1"),
            ParetoSolution(y=(0.5,), realization=r, point=P(2, 3), provenance="w2"),
        ]
        assert nondominated_filter(sols) == sols[:2]


class TestProblemSpecValidation:
    def _objs(self, y, z):
        return (0.0, 0.0)

    def test_bad_bounds(self):
        with pytest.raises(ValueError):
            ProblemSpec("p", 1, ((1.0, 1.0),), ((0.0,),), self._objs)

    def test_bounds_length_mismatch(self):
        with pytest.raises(ValueError):
            ProblemSpec("p", 2, ((0.0, 1.0),), ((0.0,),), self._objs)

    def test_empty_discrete_set(self):
        with pytest.raises(ValueError):
            ProblemSpec("p", 1, ((0.0, 1.0),), ((),), self._objs)

    def test_repeated_discrete_values(self):
        with pytest.raises(ValueError):
            ProblemSpec("p", 1, ((0.0, 1.0),), ((1.0, 1.0),), self._objs)

    def test_equality_constraints_rejected(self):
        with pytest.raises(ValueError):
            ProblemSpec(
                "p", 1, ((0.0, 1.0),), ((0.0,),), self._objs,
                equality_constraints=lambda y, z: 0.0,
            )

    def test_separable_pair_required_together(self):
        with pytest.raises(ValueError):
            ProblemSpec(
                "p", 1, ((0.0, 1.0),), ((0.0,),), self._objs,
                base_objectives=lambda y: (0.0, 0.0),
            )
