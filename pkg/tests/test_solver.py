"""Scalarized solver: pinning, frozen grid-oracle values, counting,
determinism, constraint handling."""

import numpy as np
import pytest

import pareto_prune as pp
from pareto_prune.solver import (
    InfeasibleError,
    ScalarizedObjective,
    SolverConfig,
    _start_points,
    reset_solve_count,
    solve_count,
    solve_scalarized,
)

# minimum of 0.5*J1 + 0.5*J2 over x1 in [-5, 5] for the e1 subproblem with
# z = (0, 0), from a 10^6-point grid search refined to xatol 1e-13
E1_Z00_HALF_SCALAR = -10.916830176953898
E1_Z00_HALF_X = -1.130981400751381


def _first_real(spec):
    return pp.enumerate_realizations(spec)[0]


def _obj(spec, w, r=None, pc=1e6):
    return ScalarizedObjective(
        weight=w, realization=r or _first_real(spec), parent=spec, penalty_coefficient=pc
    )


class TestSolveScalarized:
    def test_e2_j1_anchor_pins_lower_bounds(self, e2_spec, config):
        reals = pp.enumerate_realizations(e2_spec)
        for r in (reals[0], reals[1234], reals[-1]):
            res = solve_scalarized(_obj(e2_spec, 1.0, r), config)
            assert res.y_star == (2.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0)

    def test_e2_j2_anchor_pins_upper_bounds(self, e2_spec, config):
        res = solve_scalarized(_obj(e2_spec, 0.0), config)
        assert res.y_star == (10.0, 10.0, 10.0)

    def test_e1_half_weight_matches_grid_oracle(self, e1_spec, config):
        r = next(r for r in pp.enumerate_realizations(e1_spec) if r.z == (0.0, 0.0))
        res = solve_scalarized(_obj(e1_spec, 0.5, r), config)
        assert res.scalar_value == pytest.approx(E1_Z00_HALF_SCALAR, abs=1e-6)
        assert res.y_star[0] == pytest.approx(E1_Z00_HALF_X, abs=1e-4)

    def test_weight_validation(self, quad_spec):
        with pytest.raises(ValueError):
            _obj(quad_spec, 1.5)
        with pytest.raises(ValueError):
            _obj(quad_spec, -0.1)
        with pytest.raises(ValueError):
            _obj(quad_spec, 0.5, pc=-1.0)

    def test_determinism(self, e1_spec, config):
        r = _first_real(e1_spec)
        a = solve_scalarized(_obj(e1_spec, 0.35, r), config)
        b = solve_scalarized(_obj(e1_spec, 0.35, r), config)
        assert a == b

    def test_box_respected_exactly(self, e1_spec, e2_spec, config):
        for spec, ws in ((e1_spec, (0.0, 0.3, 1.0)), (e2_spec, (0.0, 0.5, 1.0))):
            lo = spec.lower_bounds()
            hi = spec.upper_bounds()
            for w in ws:
                res = solve_scalarized(_obj(spec, w), config)
                y = np.array(res.y_star)
                assert np.all(y >= lo) and np.all(y <= hi)

    def test_best_of_all_starts(self, e1_spec, config):
        r = _first_real(e1_spec)
        obj = _obj(e1_spec, 0.5, r)
        res = solve_scalarized(obj, config)
        starts = _start_points(e1_spec.bounds, config.n_starts, config.seed)
        assert res.scalar_value <= float(obj.value(starts).min()) + 1e-12

    def test_point_is_reevaluation(self, e2_spec, config):
        res = solve_scalarized(_obj(e2_spec, 0.5), config)
        raw = _obj(e2_spec, 0.5).raw_objectives(np.array([res.y_star]))[0]
        assert res.point.j1 == raw[0] and res.point.j2 == raw[1]

    def test_local_optimality_on_smooth_problems(self, e2_spec, quad_spec, config):
        # projected finite-difference gradient is small at the solution,
        # except in coordinates pinned at a bound
        for spec, w in ((e2_spec, 0.5), (e2_spec, 0.25), (quad_spec, 0.5)):
            obj = _obj(spec, w)
            res = solve_scalarized(obj, config)
            y = np.array(res.y_star)
            g = obj._fd_gradient(y[None, :], None, 1e-6)[0]
            lo = spec.lower_bounds()
            hi = spec.upper_bounds()
            proj = y - np.clip(y - g, lo, hi)
            tol = 1e-4 * (1.0 + abs(res.scalar_value))
            for d in range(len(y)):
                at_bound = min(y[d] - lo[d], hi[d] - y[d]) <= config.step_tol
                assert abs(proj[d]) <= tol or at_bound


class TestSolveCounter:
    def test_reset_and_count(self, quad_spec, config):
        reset_solve_count()
        assert solve_count() == 0
        for _ in range(3):
            solve_scalarized(_obj(quad_spec, 0.5), config)
        assert solve_count() == 3

    def test_one_call_counts_one_despite_multistart(self, e2_spec):
        reset_solve_count()
        solve_scalarized(_obj(e2_spec, 0.5), SolverConfig(n_starts=16))
        assert solve_count() == 1

    def test_concurrent_solves_count_and_match_serial(self, e1_spec, config):
        from concurrent.futures import ThreadPoolExecutor

        reals = pp.enumerate_realizations(e1_spec)[:12]
        jobs = [(0.5, r) for r in reals]
        serial = [solve_scalarized(_obj(e1_spec, w, r), config) for w, r in jobs]
        reset_solve_count()
        with ThreadPoolExecutor(max_workers=4) as ex:
            threaded = list(
                ex.map(lambda wr: solve_scalarized(_obj(e1_spec, *wr), config), jobs)
            )
        assert solve_count() == len(jobs)
        assert threaded == serial


class TestStartPoints:
    def test_deterministic_and_capped(self):
        bounds = ((-1.0, 1.0), (0.0, 2.0))
        a = _start_points(bounds, 16, seed=3)
        b = _start_points(bounds, 16, seed=3)
        assert a.shape == (16, 2)
        assert np.array_equal(a, b)
        assert not np.array_equal(a, _start_points(bounds, 16, seed=4))

    def test_corners_present(self):
        pts = _start_points(((-5.0, 5.0),), 16, seed=0)
        assert pts.shape == (16, 1)
        assert -5.0 in pts[:, 0] and 5.0 in pts[:, 0]
        assert np.unique(pts[:, 0]).size == 16

    def test_single_start(self):
        pts = _start_points(((0.0, 1.0),), 1, seed=0)
        assert pts.shape == (1, 1)


class TestConstraintHandling:
    def test_active_constraint_reaches_feasibility(self, toy_spec, config):
        res = solve_scalarized(_obj(toy_spec, 0.0), config)
        assert res.feasible
        assert res.y_star[0] == pytest.approx(0.25, abs=1e-6)
        assert res.point.j1 == pytest.approx(0.5625, abs=1e-5)
        assert res.point.j2 == pytest.approx(1.5625, abs=1e-5)

    def test_inactive_constraint_untouched(self, toy_spec, config):
        res = solve_scalarized(_obj(toy_spec, 1.0), config)
        assert res.feasible
        assert res.y_star[0] == pytest.approx(1.0, abs=1e-7)


class TestNanHandling:
    @staticmethod
    def _make_spec(region):
        def objs(y, z):
            y = np.asarray(y, dtype=float)
            v = y[..., 0]
            j1 = np.where(region(v), np.nan, v ** 2)
            return np.stack([j1, (v - 1.0) ** 2], axis=-1)

        return pp.ProblemSpec(
            name="nanny", n_y=1, bounds=((0.0, 1.0),), discrete_sets=((0.0,),),
            objectives=objs, vectorized=True,
        )

    def test_partial_nan_starts_discarded(self, config):
        spec = self._make_spec(lambda v: v > 0.5)
        r = _first_real(spec)
        res = solve_scalarized(
            ScalarizedObjective(weight=1.0, realization=r, parent=spec), config
        )
        assert res.starts_used < config.n_starts
        assert res.scalar_value == pytest.approx(0.0, abs=1e-9)

    def test_all_nan_raises_and_counts(self, config):
        spec = self._make_spec(lambda v: v >= -1.0)
        r = _first_real(spec)
        reset_solve_count()
        with pytest.raises(InfeasibleError):
            solve_scalarized(
                ScalarizedObjective(weight=1.0, realization=r, parent=spec), config
            )
        assert solve_count() == 1


class TestSolverConfigValidation:
    def test_positive_fields(self):
        with pytest.raises(ValueError):
            SolverConfig(n_starts=0)
        with pytest.raises(ValueError):
            SolverConfig(step_tol=0.0)
        with pytest.raises(ValueError):
            SolverConfig(penalty_coefficient=-1.0)
