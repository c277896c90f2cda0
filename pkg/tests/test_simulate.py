import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.stats import norm

import vbkreg.simulate as sim
from vbkreg.estimators import Sample, nw_estimate
from vbkreg.simulate import (
    BUILTIN_SCENARIOS,
    Distribution,
    ScenarioConfig,
    bias_curve,
    builtin_scenario,
    clt_check,
    default_nw_grid,
    draw,
    gen_regression_sample,
    mc_mse_points,
    mc_rmse,
    nw_cv_bandwidth,
    regression_function,
    rep_rng,
    responses,
    rmse,
    scenario_model,
    worker_count,
)
from vbkreg.theory import TrueModel


def _const(v):
    return lambda t: np.full(np.shape(t), float(v))


class TestDistribution:
    def test_draw_uniform_mean(self):
        x = draw(Distribution.uniform(-0.5, 0.5), rep_rng(1, 0), 10**6)
        assert abs(x.mean()) < 0.002
        assert x.min() >= -0.5 and x.max() <= 0.5

    def test_draw_cauchy_median(self):
        x = draw(Distribution.cauchy(3, 4), rep_rng(2, 0), 10**5)
        assert abs(np.median(x) - 3.0) < 0.1

    def test_draw_t4_variance(self):
        x = draw(Distribution.student_t(4), rep_rng(3, 0), 10**6)
        assert abs(x.var() - 2.0) < 0.05

    def test_draw_normal_moments(self):
        x = draw(Distribution.normal(5, 10), rep_rng(4, 0), 10**5)
        assert abs(x.mean() - 5) < 0.2 and abs(x.std() - 10) < 0.2

    @pytest.mark.parametrize(
        "text,kind,params",
        [
            ("U[-0.5,0.5]", "uniform", (-0.5, 0.5)),
            ("normal(0, 1)", "normal", (0.0, 1.0)),
            ("t(4)", "student_t", (4.0,)),
            ("cauchy(3,4)", "cauchy", (3.0, 4.0)),
        ],
    )
    def test_parse(self, text, kind, params):
        d = Distribution.parse(text)
        assert (d.kind, d.params) == (kind, params)
        assert Distribution.parse(str(d)) == d

    @pytest.mark.parametrize("bad", ["uniform(1,0)", "normal(0,-1)", "student_t(2.5)", "beta(1,2)", "t(1,2)", "??"])
    def test_invalid(self, bad):
        with pytest.raises(ValueError):
            Distribution.parse(bad)

    def test_variance(self):
        assert Distribution.uniform(-1, 1).variance == pytest.approx(1 / 3)


class TestRNG:
    def test_rep_streams_reproducible_and_distinct(self):
        a = rep_rng(7, 3).standard_normal(5)
        assert np.array_equal(a, rep_rng(7, 3).standard_normal(5))
        assert not np.array_equal(a, rep_rng(7, 4).standard_normal(5))
        assert not np.array_equal(a, rep_rng(8, 3).standard_normal(5))

    def test_sample_determinism(self):
        cfg = ScenarioConfig(n=200, reps=2, seed=11)
        a, b = gen_regression_sample(cfg, 1), gen_regression_sample(cfg, 1)
        assert np.array_equal(a.x, b.x) and np.array_equal(a.y, b.y)
        assert not np.array_equal(a.x, gen_regression_sample(cfg, 0).x)

    def test_worker_count(self, monkeypatch):
        monkeypatch.setenv("VBKREG_THREADS", "3")
        assert worker_count() == 3
        monkeypatch.setenv("VBKREG_THREADS", "0")
        assert worker_count() >= 1
        assert worker_count(2) == 2


class TestRegressions:
    def test_values_at_zero(self):
        eps = np.array([0.4])
        assert responses(regression_function(2)[0], np.array([0.0]), eps)[0] == pytest.approx(1 + 0.3 * 0.4)
        assert responses(regression_function(1)[0], np.array([0.0]), eps)[0] == pytest.approx(2 + 0.3 * 0.4)

    def test_derivatives(self):
        x = np.array([-1.3, 0.4, 2.2])
        for reg in (1, 2, 3):
            r, rp = regression_function(reg)
            fd = (r(x + 1e-6) - r(x - 1e-6)) / 2e-6
            np.testing.assert_allclose(rp(x), fd, rtol=1e-6)
        with pytest.raises(ValueError):
            regression_function(4)

    def test_reg3_redraws_zero(self, monkeypatch):
        calls = {"n": 0}
        real = sim.draw

        def fake(dist, rng, size=None):
            calls["n"] += 1
            out = real(dist, rng, size)
            if calls["n"] == 1:
                out[:3] = 0.0
            return out

        monkeypatch.setattr(sim, "draw", fake)
        s = gen_regression_sample(ScenarioConfig(reg_id=3, n=20, reps=1), 0)
        assert np.all(s.x != 0.0) and np.all(np.isfinite(s.y))


class TestRMSE:
    def test_examples(self):
        assert rmse([1.0, 2.0], [1.0, 2.0]) == 0.0
        assert rmse([0.0, 0.0], [1.0, -1.0]) == pytest.approx(1.0)
        assert rmse([2.0], [3.5]) == pytest.approx(1.5)

    def test_exclusion(self):
        val, excluded = rmse([0.0, 0.0, 5.0], [1.0, -1.0, np.nan], return_excluded=True)
        assert val == pytest.approx(1.0) and excluded == 1
        with pytest.raises(ValueError):
            rmse([0.0], [np.nan])


class TestCV:
    def test_pure_noise_prefers_large_h(self):
        rng = np.random.default_rng(0)
        s = Sample(rng.normal(size=400), 3.0 * rng.normal(size=400))
        grid = default_nw_grid(s)
        assert nw_cv_bandwidth(s, "gaussian_truncated", grid) >= grid[len(grid) // 2]

    def test_empty_window_grid_point_skipped(self):
        x = np.arange(10.0)
        s = Sample(x, np.sin(x))
        # with tricube and h=0.5 every leave-one-out window is empty
        assert nw_cv_bandwidth(s, "tricube", [0.5, 3.0]) == 3.0
        with pytest.raises(ValueError):
            nw_cv_bandwidth(s, "tricube", [0.5, 0.9])

    def test_interior_minimum_on_smooth_data(self):
        # exactly noiseless data favour interpolation (smallest h); a little noise gives the U shape
        rng = np.random.default_rng(2)
        x = rng.uniform(-3, 3, 600)
        s = Sample(x, np.sin(2 * x) + 0.05 * rng.normal(size=600))
        grid = np.geomspace(0.005, 2.0, 25)
        scores = sim._loo_scores(s, "gaussian_truncated", grid)
        k = int(np.argmin(scores))
        assert 2 < k < grid.size - 3
        assert np.all(np.diff(scores[k:]) > 0)
        assert nw_cv_bandwidth(s, "gaussian_truncated", grid) == grid[k]

    def test_default_grid(self):
        rng = np.random.default_rng(1)
        s = Sample(rng.standard_cauchy(500), rng.normal(size=500))
        g = default_nw_grid(s, 20)
        assert g.size == 20 and np.all(np.diff(g) > 0)
        assert g[-1] / g[0] == pytest.approx(40.0)


class TestScenarioConfig:
    def test_roundtrip(self):
        cfg = ScenarioConfig(reg_id=3, x_dist=Distribution.cauchy(3, 4), n=777, reps=3, seed=5, name="z")
        back = ScenarioConfig.from_dict(cfg.to_dict())
        assert back.to_dict() == cfg.to_dict()

    def test_unknown_key(self):
        with pytest.raises(ValueError, match="unknown"):
            ScenarioConfig.from_dict({"nn": 3})

    def test_n_override_keeps_rule(self):
        cfg = ScenarioConfig.from_dict({"n": 1000})
        assert cfg.bandwidths.h2 == pytest.approx(1000 ** (-1 / 9) / 4)
        cfg = ScenarioConfig.from_dict({"h2": 0.2})
        assert cfg.bandwidths.h2 == 0.2

    def test_invalid(self):
        with pytest.raises(ValueError):
            ScenarioConfig(n=5)
        with pytest.raises(ValueError):
            ScenarioConfig(kernel="box")

    @pytest.mark.parametrize("name", sorted(BUILTIN_SCENARIOS))
    def test_builtins(self, name):
        cfg, extras = builtin_scenario(name, n=300, reps=2)
        assert cfg.name == name and cfg.n == 300

    def test_builtin_details(self):
        cfg, _ = builtin_scenario("table2-row7")
        assert cfg.x_dist == Distribution.normal(5, 10)
        _, extras = builtin_scenario("table6")
        assert extras["reg_ids"] == (2, 3) and len(extras["points"]) == 10
        with pytest.raises(ValueError):
            builtin_scenario("table9")

    def test_model_noise_variance(self):
        cfg, _ = builtin_scenario("table1-row2")
        m = scenario_model(cfg)
        assert float(m.sigma2(0.0)) == pytest.approx(0.09 / 3)


class TestMonteCarlo:
    def test_noiseless_constant_gives_zero(self):
        cfg = ScenarioConfig(n=300, reps=3, noise_scale=0.0, regression=lambda x: np.full(np.shape(x), 1.7))
        rep = mc_rmse(cfg)
        assert rep.nwe_rmse < 1e-6 and rep.vkre_rmse < 1e-6
        pts = mc_mse_points(cfg, [-1.0, 0.0, 0.5])
        np.testing.assert_allclose(pts.per_point_mse["vkre_mse"], 0.0, atol=1e-12)
        np.testing.assert_allclose(pts.per_point_mse["nwe_mse"], 0.0, atol=1e-12)

    def test_thread_count_invariance(self):
        cfg = ScenarioConfig(n=300, reps=6, seed=99)
        a, b = mc_rmse(cfg, threads=1), mc_rmse(cfg, threads=3)
        assert a.to_dict() == b.to_dict()
        assert a.per_rep == b.per_rep

    def test_report_fields(self):
        rep = mc_rmse(ScenarioConfig(n=300, reps=2, seed=1))
        d = rep.to_dict()
        assert d["diagnostics"]["reps_ok"] == 2
        assert 0 < d["vkre_rmse"] < 1 and 0 < d["nwe_rmse"] < 1

    def test_nw_consistency_on_dense_design(self):
        x = np.linspace(-2, 2, 4001)
        r = regression_function(1)[0]
        s = Sample(x, r(x))
        h = 0.1
        t = np.linspace(-1.5, 1.5, 50)
        assert rmse(r(t), nw_estimate(s, t, h).value) < 10 * h**2


class TestBiasAndCLT:
    def test_nw_slope_about_two(self):
        m = TrueModel(norm.pdf, lambda x: 2 + np.sin(0.75 * x), lambda x: 0.75 * np.cos(0.75 * x), _const(0.0))
        curve = bias_curve(
            m, Distribution.normal(0, 1), 1.0, [0.4, 0.3, 0.2, 0.15, 0.1], 20000, 1, 0, "nw", design="quantile"
        )
        assert 1.5 <= curve.slope <= 2.5

    def test_nw_bias_constant_matches_closed_form(self):
        # leading NW bias: mu21/2 (r'' + 2 r' f'/f); for N(0,1), f'/f = -t
        m = TrueModel(norm.pdf, lambda x: 2 + np.sin(0.75 * x), lambda x: 0.75 * np.cos(0.75 * x), _const(0.0))
        t = 1.0
        lead = 35 / 243 / 2 * (-0.5625 * np.sin(0.75 * t) + 2 * 0.75 * np.cos(0.75 * t) * (-t))
        curve = bias_curve(m, Distribution.normal(0, 1), t, [0.12, 0.1, 0.08, 0.05], 20000, 1, 0, "nw", design="quantile")
        np.testing.assert_allclose(curve.bias / curve.h**2, lead, rtol=0.01)

    def test_vb_slope_on_small_bandwidths(self):
        # below h ~ 0.2 the far-field and pre-asymptotic terms fade and the h^4 rate shows
        m = TrueModel(norm.pdf, lambda x: 2 + np.sin(0.75 * x), lambda x: 0.75 * np.cos(0.75 * x), _const(0.0))
        curve = bias_curve(
            m, Distribution.normal(0, 1), 1.0, [0.18, 0.12, 0.08, 0.05], 20000, 1, 0, "ideal_vb", design="quantile"
        )
        assert 3.3 <= curve.slope <= 4.7
        scaled = curve.bias / curve.h**4
        assert np.all(np.diff(scaled) < 0) and scaled[-1] > 0

    def test_zero_bias_flagged(self):
        m = TrueModel(_const(0.5), lambda x: 2 * x, _const(2.0), _const(0.0))
        with pytest.raises(ValueError, match="noise floor"):
            bias_curve(m, Distribution.uniform(-1, 1), 0.0, [0.4, 0.3, 0.2, 0.1], 4001, 1, 0, "nw", design="quantile")

    def test_bias_grid_too_short(self):
        m = TrueModel(_const(0.5), lambda x: 2 * x, _const(2.0), _const(0.0))
        with pytest.raises(ValueError):
            bias_curve(m, Distribution.uniform(-1, 1), 0.0, [0.4, 0.3, 0.2], 100, 1, 0)

    def test_clt_degenerate_model_concentrates(self):
        m = TrueModel(_const(0.5), lambda x: 2 * x, _const(2.0), _const(0.0))
        res = clt_check(
            m, Distribution.uniform(-1, 1), Distribution.uniform(-0.5, 0.5), 0.0, 2000, 0.05, 30, 3, noise_scale=0.0
        )
        assert res["max_abs_z"] < 0.1
        assert res["var_theory"] == 0.0 and math.isnan(res["var_ratio"])

    def test_clt_fields_small(self):
        cfg = ScenarioConfig(n=500)
        res = clt_check(scenario_model(cfg), cfg.x_dist, cfg.eps_dist, 1.0, 500, 0.2, 40, 1)
        assert res["reps"] == 40 and res["ks_crit_1pct"] == pytest.approx(1.628 / math.sqrt(40))
        assert 0.3 < res["var_ratio"] < 3.0


@given(seed=st.integers(0, 2**32 - 1), j=st.integers(0, 10**6))
def test_rep_rng_deterministic(seed, j):
    assert rep_rng(seed, j).integers(0, 2**63) == rep_rng(seed, j).integers(0, 2**63)


@given(
    truth=st.lists(st.floats(-100, 100), min_size=1, max_size=20),
    shift=st.floats(-5, 5),
)
def test_rmse_of_constant_shift(truth, shift):
    truth = np.array(truth)
    assert rmse(truth, truth + shift) == pytest.approx(abs(shift), abs=1e-9)
