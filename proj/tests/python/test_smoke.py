import math

import pytest

import gpbounds as gb


def test_kernel_values():
    se = gb.Kernel.squared_exponential(1.0)
    assert se(0.0, 1.0) == pytest.approx(math.exp(-0.5), rel=1e-15)
    assert se.eval_iso(0.0) == 1.0
    assert se.isotropic and se.decreasing
    assert not gb.Kernel.polynomial().isotropic
    with pytest.raises(gb.ConfigError):
        gb.Kernel.squared_exponential(0.0)


def test_single_point_posterior():
    se = gb.Kernel.squared_exponential(1.0)
    assert gb.posterior_variance(se, [1.0], 1.0, 0.1) == pytest.approx(1.0 / 11.0, rel=1e-14)
    assert gb.posterior_mean(se, [1.0], [1.0], 1.0, 0.1) == pytest.approx(1.0 / 1.1, rel=1e-14)
    pv = gb.prefix_variances(se, [0.9, 1.1, 1.3], 1.0, 0.1)
    assert len(pv) == 4
    assert pv[0] == 1.0
    assert all(b <= a for a, b in zip(pv, pv[1:]))


def test_bounds_dominate_exact_variance():
    se = gb.Kernel.squared_exponential(1.0)
    xs = [0.5 + i / 40.0 for i in range(41)]
    lip, method = gb.lipschitz_constant(se, 0.5, 1.5)
    assert method == "analytic"
    r = gb.bound_report(se, xs, 0.1, lip, 1.0, 0.2)
    assert r["lipschitz_bound"] >= r["exact"]
    assert r["isotropic_bound"] >= r["exact"]
    assert r["two_point_bound"] >= r["exact"]
    assert gb.isotropic_bound(se, 5, 0.1, 0.1) == pytest.approx(1.0 - math.exp(-0.01) / 1.02, rel=1e-12)
    with pytest.raises(gb.PreconditionError):
        gb.isotropic_bound(se, 0, 0.1, 0.1)


def test_learning_curve_bounds():
    se = gb.Kernel.squared_exponential(0.3)
    assert gb.e1_bound(se, 0.05, 1) == pytest.approx(0.629298848525557, rel=1e-12)
    assert gb.e2_bound(se, 0.05, 100) <= gb.e1_bound(se, 0.05, 100)
    n = gb.greedy_select_n(se, 0.05, 1000)
    assert n > 1
    assert gb.section_bound(se, 0.05, 1000, n) < gb.e2_bound(se, 0.05, 1000)
    rows = gb.learning_curve_table(se, 0.05, [1, 10, 100], test_points=20, datasets=3, mc_max_n=10)
    assert rows[0]["e_rho"] == rows[0]["e1"]
    assert math.isnan(rows[2]["e_num"])


def test_convergence_checks():
    s = gb.RadiusSchedule(1.0, 0.5)
    assert gb.check_corollary(1, s)
    assert gb.search_theorem_witness(gb.Density.uniform(0.5, 1.5), 1.0, s, 1, 10000).satisfied
    v = gb.check_theorem(gb.Density.vanishing(1.0), 1.0, s, 1.0, 0.5)
    assert not v.satisfied
    assert v.first_failing_n == 17
    assert gb.ball_probability(gb.Density.vanishing(1.0), 1.0, 0.1) == pytest.approx(0.04, rel=1e-14)


def test_presets_and_runs():
    names = [name for name, _ in gb.presets()]
    assert "fig2-se" in names and "fig4-se-full" in names
    text = gb.config_text("fig2-se", "n_max = 30\ndatasets = 2\n")
    assert "n_max = 30" in text
    csv = gb.run_experiment("fig2-se", "n_max = 30\ndatasets = 2\n")
    assert csv.splitlines()[0] == "idx,sig_m,sig_bm,sig_bm_gen"
    assert csv == gb.run_experiment("fig2-se", "n_max = 30\ndatasets = 2\n")
    with pytest.raises(gb.ConfigError):
        gb.run_experiment("no-such-preset")
    with pytest.raises(gb.ConfigError):
        gb.run_experiment("fig2-se", "bogus = 1\n")
