#include <doctest.h>

#include <cmath>
#include <sstream>

#include "gpbounds/config.hpp"
#include "gpbounds/errors.hpp"
#include "gpbounds/experiments.hpp"

using namespace gpbounds;

namespace {

ExperimentConfig parse(const std::string& text) {
    std::istringstream in(text);
    return parse_config(in);
}

}  // namespace

TEST_CASE("config parsing") {
    const auto c = parse(
        "# comment\n"
        "experiment = learning-curve\n"
        "kernel = rq   # trailing comment\n"
        "lengthscale = 0.3\n"
        "alpha = 2\n"
        "noise_variance = 0.05\n"
        "n_grid = 1, 10, 100\n"
        "span_weight = as-printed\n"
        "subtract_noise = true\n");
    CHECK(c.experiment == ExperimentKind::learning_curve);
    CHECK(c.kernel.kind == KernelKind::rational_quadratic);
    CHECK(c.kernel.extra.at("alpha") == 2.0);
    CHECK(c.grid() == std::vector<std::uint64_t>{1, 10, 100});
    CHECK(c.span_weight == SpanWeight::as_printed);
    CHECK(c.subtract_noise);
    CHECK_NOTHROW(c.validate());
}

TEST_CASE("config errors name the field") {
    auto message = [](const std::string& text) {
        try {
            parse(text).validate();
        } catch (const ConfigError& e) {
            return std::string(e.what());
        }
        return std::string();
    };
    CHECK(message("bogus = 1\n").find("bogus") != std::string::npos);
    CHECK(message("noise_variance = abc\n").find("noise_variance") != std::string::npos);
    CHECK(message("noise_variance = -1\n").find("noise_variance") != std::string::npos);
    CHECK(message("lengthscale = 0\n").find("lengthscale") != std::string::npos);
    CHECK(message("schedule_c = 0\n").find("schedule_c") != std::string::npos);
    CHECK(message("datasets = 0\n").find("datasets") != std::string::npos);
    CHECK(message("n_grid = 5, 3\n").find("n_grid") != std::string::npos);
    CHECK(message("experiment = learning-curve\nkernel = polynomial\n").find("kernel") != std::string::npos);
    CHECK(message("experiment = variance-vanishing\ntest_point = 0.7\n").find("test_point") != std::string::npos);
    CHECK(message("no equals sign\n").find("line 1") != std::string::npos);
}

TEST_CASE("config text round trip") {
    for (const auto& p : preset_list()) {
        const auto c = preset(p.name);
        std::istringstream in(to_text(c));
        const auto back = parse_config(in);
        CHECK(to_text(back) == to_text(c));
    }
}

TEST_CASE("log grid") {
    const auto g = log_grid(1, 1000, 25);
    CHECK(g.front() == 1);
    CHECK(g.back() == 1000);
    for (std::size_t i = 1; i < g.size(); ++i) REQUIRE(g[i] > g[i - 1]);
    CHECK(g.size() > 50);
    CHECK(log_grid(7, 7, 25) == std::vector<std::uint64_t>{7});
}

TEST_CASE("presets encode the stated parameters") {
    for (const char* name : {"fig2-se", "fig2-matern", "fig2-polynomial", "fig2-nn"}) {
        const auto c = preset(name);
        CHECK(c.experiment == ExperimentKind::variance_uniform);
        CHECK(c.noise_variance == 0.1);
        CHECK(c.test_point == 1.0);
        CHECK(c.domain_lo == 0.5);
        CHECK(c.domain_hi == 1.5);
        CHECK(c.datasets == 20);
        CHECK(c.kernel.lengthscale == 1.0);
    }
    CHECK(preset("fig2-se").schedule.exponent == doctest::Approx(1.0 / 3.0));
    CHECK(preset("fig2-matern").schedule.exponent == 0.5);
    CHECK(preset("fig2-nn").schedule.exponent == 0.5);
    CHECK(preset("fig3-se").schedule.exponent == 0.25);
    CHECK(preset("fig3-matern").schedule.exponent == doctest::Approx(1.0 / 3.0));
    CHECK(preset("fig3-se").experiment == ExperimentKind::variance_vanishing);
    for (const char* name : {"fig4-se", "fig4-matern", "fig4-rq", "fig4-periodic"}) {
        const auto c = preset(name);
        CHECK(c.experiment == ExperimentKind::learning_curve);
        CHECK(c.kernel.lengthscale == 0.3);
        CHECK(c.noise_variance == 0.05);
        CHECK(c.test_points == 200);
        CHECK(c.datasets == 20);
    }
    CHECK(preset("fig4-se-full").test_points == 1000);
    CHECK(preset("fig4-se-full").datasets == 50);
    CHECK_THROWS_AS(preset("fig9"), ConfigError);
}

TEST_CASE("variance experiment") {
    auto c = preset("fig2-se");
    c.n_max = 200;
    const auto t = run_variance_experiment(c);
    CHECK(t.header == std::vector<std::string>{"idx", "sig_m", "sig_bm", "sig_bm_gen"});
    REQUIRE(!t.rows.empty());
    CHECK(t.rows.front()[0] == 1.0);
    CHECK(t.rows.front()[1] <= 1.0);
    for (const auto& r : t.rows) {
        CHECK(r[3] >= r[1]);
        CHECK(r[2] >= r[1]);
    }
    CHECK(t.to_csv() == run_variance_experiment(c).to_csv());

    auto nn = preset("fig3-nn");
    nn.n_max = 100;
    nn.exact_max_n = 50;
    const auto u = run_variance_experiment(nn);
    for (const auto& r : u.rows) {
        CHECK(std::isnan(r[2]));
        CHECK(std::isnan(r[1]) == (r[0] > 50));
        if (!std::isnan(r[1])) CHECK(r[3] >= r[1]);
    }
    CHECK(u.to_csv().find("nan") != std::string::npos);

    auto other = c;
    other.seed = 2;
    CHECK(run_variance_experiment(other).to_csv() != t.to_csv());
    CHECK_THROWS_AS(run_variance_experiment(preset("fig4-se")), ConfigError);
}

TEST_CASE("learning-curve experiment") {
    auto c = preset("fig4-se");
    c.n_max = 100;
    c.points_per_decade = 5;
    const auto t = run_learning_curve(c);
    CHECK(t.header == std::vector<std::string>{"idx", "y_exact", "y_bound", "yE1", "yE2"});
    CHECK(t.rows.front()[2] == t.rows.front()[3]);
    c.subtract_noise = true;
    const auto s = run_learning_curve(c);
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        CHECK(s.rows[i][3] == doctest::Approx(t.rows[i][3] - 0.05).epsilon(1e-15));
    }
}

TEST_CASE("convergence experiment") {
    auto c = preset("convergence-uniform");
    c.n_max = 1000;
    auto r = run_convergence_check(c);
    CHECK(r.theorem.satisfied);
    CHECK(r.corollary.satisfied);
    CHECK(r.growth.header == std::vector<std::string>{"N", "mean_count", "min_count", "expected_count"});
    CHECK(r.to_text().find("theorem.satisfied = true") != std::string::npos);

    auto v = preset("convergence-vanishing");
    v.n_max = 1000;
    auto rv = run_convergence_check(v);
    CHECK_FALSE(rv.theorem.satisfied);
    REQUIRE(rv.theorem.first_failing_n);
    CHECK_FALSE(rv.corollary.satisfied);

    auto fixed = c;
    fixed.schedule = {0.3, 0.0};
    CHECK_FALSE(run_convergence_check(fixed).theorem.radius_vanishes);
}

TEST_CASE("plot script references the CSV") {
    const auto s = plot_script(preset("fig4-se"), "out.csv");
    CHECK(s.find("'out.csv'") != std::string::npos);
    CHECK(s.find("logscale") != std::string::npos);
}
