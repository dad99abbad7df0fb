import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.optimize import minimize_scalar

from qotto import (
    DomainError,
    OttoCycleSpec,
    Regime,
    carnot_efficiency,
    classical_otto_r_carnot,
    default_mass_ratios,
    efficiency_sweep,
    extraction_condition,
    feasible_mass_bracket,
    golden_section_max,
    optimize_mass_ratio,
    run_cycle,
    two_level_efficiency,
)

R_CARNOT = 3.464101615
OPT_BRACKET = (1.0001, 11.9999)


def two_level_work_extracted(m_c, m_h=1.0, T_h=3.0, T_c=0.25):
    """-W of the r=1 two-level cycle written out by hand."""
    d_h, d_c = 3.0 / m_h, 3.0 / m_c
    d2 = 1 / (1 + math.exp(d_h / T_h)) - 1 / (1 + math.exp(d_c / T_c))
    return (d_h - d_c) * d2


class TestBaselines:
    def test_carnot(self):
        assert carnot_efficiency(1, 12) == pytest.approx(11 / 12, abs=1e-12)
        assert carnot_efficiency(3.3, 3.3) == 0.0
        assert carnot_efficiency(1, 2) == 0.5
        with pytest.raises(DomainError):
            carnot_efficiency(2, 1)

    def test_r_carnot(self):
        assert classical_otto_r_carnot(1, 12, 3) == pytest.approx(R_CARNOT, abs=1e-9)
        assert classical_otto_r_carnot(1, 4, 3) == pytest.approx(2.0, rel=1e-15)
        assert classical_otto_r_carnot(1, 12, 2) == pytest.approx(12.0, rel=1e-15)
        with pytest.raises(DomainError):
            classical_otto_r_carnot(1, 12, 1.0)
        with pytest.raises(DomainError):
            classical_otto_r_carnot(2, 2, 3)

    @given(st.floats(0.1, 10), st.floats(1.01, 100), st.floats(1.1, 5))
    def test_r_carnot_reaches_carnot(self, T_c, ratio, gamma):
        T_h = T_c * ratio
        r = classical_otto_r_carnot(T_c, T_h, gamma)
        assert 1 - r ** (1 - gamma) == pytest.approx(carnot_efficiency(T_c, T_h), rel=1e-12)

    def test_default_ratios(self):
        assert default_mass_ratios(1, 12) == [1 / 12, 0.25, 0.5, 1.0, 2.0]


class TestEfficiencySweep:
    def test_constant_mass_touches_carnot_at_r_carnot(self):
        r_car = classical_otto_r_carnot(1, 12, 3)
        grid = efficiency_sweep([1.0], (1.0, r_car, 2), 1, 12)
        assert grid.column("1", "efficiency_over_carnot")[-1] == pytest.approx(1.0, abs=1e-9)

    def test_incompressible_constant_mass_does_nothing(self):
        grid = efficiency_sweep([1.0], (1.0, 2.0, 2), 0.3, 7.0)
        rec = grid.series[0].records[0]
        assert rec.efficiency == 0.0
        assert rec.regime is Regime.IDLE

    def test_tailored_mass_reaches_carnot_at_r_one(self):
        grid = efficiency_sweep([1 / 12], (1.0, 2.0, 2), 1, 12)
        assert grid.series[0].records[0].efficiency_over_carnot == pytest.approx(1.0, abs=1e-9)

    def test_records_agree_with_closed_form_and_cycle(self):
        ratios = [0.25, 0.5, 1.0, 2.0]
        grid = efficiency_sweep(ratios, (0.5, 4.0, 50), 1, 12)
        assert len(grid.axis_values) == 50
        for s in grid.series:
            for rec in s.records:
                assert rec.efficiency == two_level_efficiency(s.mass_ratio, 1.0, 1.0, rec.axis_value)
                res = run_cycle(OttoCycleSpec(1.0, 1.0 / s.mass_ratio, 1.0, rec.axis_value, 12, 1, 2))
                assert rec.work_extracted == res.work_extracted
                assert rec.regime is res.regime
                if rec.regime is Regime.ENGINE:
                    assert rec.efficiency_over_carnot <= 1 + 1e-12
                    assert res.efficiency == pytest.approx(rec.efficiency, rel=1e-10)

    def test_nonpositive_efficiency_rows_kept(self):
        grid = efficiency_sweep([2.0], (0.5, 1.0, 5), 1, 12)
        assert len(grid.series[0].records) == 5
        assert all(rec.efficiency <= 0 for rec in grid.series[0].records)
        assert all(rec.regime is not Regime.ENGINE for rec in grid.series[0].records)

    @pytest.mark.parametrize("ratio", [0.25, 0.5, 1.0, 2.0])
    def test_carnot_touch_locus(self, ratio):
        grid = efficiency_sweep([ratio], (0.5, 6.0, 400), 1, 12)
        r = np.array(grid.axis_values)
        y = grid.column(grid.series[0].label, "efficiency_over_carnot") - 1.0
        i = int(np.flatnonzero(np.sign(y[:-1]) != np.sign(y[1:]))[0])
        step = r[1] - r[0]
        assert r[i] - step <= math.sqrt(12 * ratio) <= r[i + 1] + step

    def test_deterministic(self):
        a = efficiency_sweep([0.5, 1.0], (0.5, 4.0, 30), 1, 12, n_levels=6)
        b = efficiency_sweep([0.5, 1.0], (0.5, 4.0, 30), 1, 12, n_levels=6)
        assert a == b

    @pytest.mark.parametrize(
        "r_range, T_c, T_h",
        [((0.0, 1.0, 5), 1, 12), ((2.0, 1.0, 5), 1, 12), ((0.5, 4.0, 1), 1, 12), ((0.5, 4.0, 5), 12, 1)],
    )
    def test_bad_grid(self, r_range, T_c, T_h):
        with pytest.raises(DomainError):
            efficiency_sweep([1.0], r_range, T_c, T_h)

    def test_empty_series(self):
        assert efficiency_sweep([], (0.5, 4.0, 10), 1, 12).series == ()


class TestGoldenSection:
    @pytest.mark.parametrize("center", [-2.3, 0.0, 0.77, 4.99])
    def test_quadratic(self, center):
        x, fx, n = golden_section_max(lambda t: -(t - center) ** 2, -5.0, 5.0, 1e-10)
        assert x == pytest.approx(center, abs=1e-9)
        assert n < 60

    def test_against_scipy(self):
        f = lambda t: math.sin(t) * math.exp(-0.1 * t)
        x, fx, _ = golden_section_max(f, 0.0, 3.0, 1e-11)
        ref = minimize_scalar(lambda t: -f(t), bounds=(0, 3), method="bounded", options={"xatol": 1e-12})
        # a smooth maximum is located only to ~sqrt(eps)
        assert x == pytest.approx(ref.x, abs=1e-7)
        assert fx >= -ref.fun - 1e-15


class TestOptimizeMassRatio:
    def test_endpoints_vanish(self):
        assert 0 < two_level_work_extracted(OPT_BRACKET[0]) < 1e-4
        assert 0 < two_level_work_extracted(OPT_BRACKET[1]) < 1e-4

    def test_dense_grid_oracle(self):
        # closed-form scan, 1e4 points: argmax 3.42139810981, max 0.509214194616
        grid = np.linspace(*OPT_BRACKET, 10_000)
        values = [two_level_work_extracted(m) for m in grid]
        i = int(np.argmax(values))
        assert grid[i] == pytest.approx(3.42139810981, abs=1e-10)
        assert values[i] == pytest.approx(0.509214194616, abs=1e-11)

    def test_matches_oracle(self):
        res = optimize_mass_ratio(1.0, 3.0, 0.25, OPT_BRACKET, m_h=1.0, n_levels=2, tol=1e-10)
        assert res.regime is Regime.ENGINE
        assert res.best_work_extracted == pytest.approx(0.509214194616, abs=1e-8)
        assert res.best_m_c == pytest.approx(3.42139810981, abs=1e-3)
        assert res.best_mass_ratio == 1.0 / res.best_m_c
        assert OPT_BRACKET[0] <= res.best_m_c <= OPT_BRACKET[1]
        assert res.bracket == OPT_BRACKET
        assert res.evaluations >= 64
        assert res.best_work_extracted >= max(two_level_work_extracted(b) for b in OPT_BRACKET) - 1e-12

    def test_dominates_random_samples(self):
        res = optimize_mass_ratio(1.0, 3.0, 0.25, OPT_BRACKET, tol=1e-10)
        rng = np.random.default_rng(7)
        samples = rng.uniform(*OPT_BRACKET, 2000)
        best_sample = max(run_cycle(OttoCycleSpec(1, m, 1, 1, 3.0, 0.25, 2)).work_extracted for m in samples)
        assert res.best_work_extracted >= best_sample - 1e-10

    @pytest.mark.parametrize("n_levels", [5, None])
    def test_multilevel(self, n_levels):
        res = optimize_mass_ratio(1.3, 5.0, 0.5, (0.6, 5.0), n_levels=n_levels)
        coarse = np.linspace(0.6, 5.0, 64)
        spec_n = n_levels
        best = max(
            run_cycle(OttoCycleSpec(1, m, 1, 1.3, 5.0, 0.5, spec_n)).work_extracted for m in coarse
        )
        assert res.best_work_extracted >= best

    def test_infeasible_bracket(self):
        res = optimize_mass_ratio(1.0, 1.01, 1.0, (50.0, 60.0))
        assert res.best_work_extracted == 0.0
        assert res.regime is Regime.IDLE
        for m in np.linspace(50, 60, 20):
            assert not extraction_condition(OttoCycleSpec(1, m, 1, 1, 1.01, 1.0, 2))

    def test_feasible_bracket(self):
        lo, hi = feasible_mass_bracket(1.0, 1.0, 3.0, 0.25)
        assert (lo, hi) == (1.0, 12.0)
        lo, hi = feasible_mass_bracket(2.0, 2.0, 12.0, 1.0)
        assert lo == pytest.approx(0.5) and hi == pytest.approx(6.0)

    @pytest.mark.parametrize(
        "kwargs",
        [dict(bracket=(2.0, 1.0)), dict(bracket=(0.0, 1.0)), dict(bracket=(1.0, 2.0), tol=0.0),
         dict(bracket=(1.0, 2.0), grid_points=10)],
    )
    def test_bad_arguments(self, kwargs):
        with pytest.raises(DomainError):
            optimize_mass_ratio(1.0, 3.0, 0.25, **kwargs)

    @given(st.floats(0.5, 2.0), st.floats(2.0, 20.0))
    @settings(max_examples=15, deadline=None)
    def test_result_inside_bracket(self, r, T_h):
        lo, hi = feasible_mass_bracket(1.0, r, T_h, 1.0)
        res = optimize_mass_ratio(r, T_h, 1.0, (lo, hi))
        assert lo <= res.best_m_c <= hi
        assert res.best_work_extracted >= 0
