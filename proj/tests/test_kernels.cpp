#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Eigenvalues>

#include "gpbounds/errors.hpp"
#include "gpbounds/gp_core.hpp"
#include "gpbounds/kernels.hpp"

using namespace gpbounds;

namespace {

std::vector<Kernel> catalog() {
    return {Kernel::squared_exponential(1.0), Kernel::matern12(1.0), Kernel::rational_quadratic(1.0, 1.0),
            Kernel::periodic(1.0, 1.0),       Kernel::polynomial(1.0, 3), Kernel::neural_network(1.0, 1.0)};
}

}  // namespace

TEST_CASE("closed-form kernel values") {
    CHECK(Kernel::squared_exponential(1.0).eval(0.3, 0.3) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(Kernel::squared_exponential(1.0).eval(0.0, 1.0) == doctest::Approx(std::exp(-0.5)).epsilon(1e-15));
    CHECK(Kernel::matern12(1.0).eval(0.0, 2.0) == doctest::Approx(std::exp(-2.0)).epsilon(1e-15));
    CHECK(Kernel::rational_quadratic(1.0, 1.0).eval_iso(1.0) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(Kernel::periodic(0.7, 1.0, 2.5).eval_iso(1.0) == doctest::Approx(2.5).epsilon(1e-14));
    CHECK(Kernel::polynomial(1.0, 3).eval(0.5, 2.0) == doctest::Approx(8.0).epsilon(1e-15));

    // arcsine form with augmented input (1, x)
    const double x = 0.4, z = -0.8;
    const double num = 2.0 * (1.0 + x * z);
    const double den = std::sqrt((1.0 + 2.0 * (1.0 + x * x)) * (1.0 + 2.0 * (1.0 + z * z)));
    CHECK(Kernel::neural_network(1.0, 1.0).eval(x, z) ==
          doctest::Approx(2.0 / M_PI * std::asin(num / den)).epsilon(1e-14));
}

TEST_CASE("isotropic kernels at zero distance return the signal variance") {
    for (const auto& k : {Kernel::squared_exponential(0.3, 1.7), Kernel::matern12(2.0, 1.7),
                          Kernel::rational_quadratic(0.5, 3.0, 1.7), Kernel::periodic(0.4, 2.0, 1.7)}) {
        CHECK(k.eval_iso(0.0) == 1.7);
        CHECK(k.isotropic());
    }
}

TEST_CASE("eval_iso agrees with eval and rejects misuse") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (const auto& k : catalog()) {
        if (!k.isotropic()) {
            CHECK_THROWS_AS(k.eval_iso(0.5), PreconditionError);
            continue;
        }
        CHECK_THROWS_AS(k.eval_iso(-0.1), PreconditionError);
        for (int i = 0; i < 100; ++i) {
            const double a = u(rng), b = u(rng);
            CHECK(k.eval_iso(std::abs(a - b)) == doctest::Approx(k.eval(a, b)).epsilon(1e-14));
        }
    }
}

TEST_CASE("invalid parameters are rejected at construction") {
    CHECK_THROWS_AS(Kernel::squared_exponential(0.0), ConfigError);
    CHECK_THROWS_AS(Kernel::matern12(-1.0), ConfigError);
    CHECK_THROWS_AS(Kernel::squared_exponential(1.0, 0.0), ConfigError);
    CHECK_THROWS_AS(Kernel::rational_quadratic(1.0, -2.0), ConfigError);
    CHECK_THROWS_AS(Kernel::periodic(1.0, 0.0), ConfigError);
    CHECK_THROWS_AS(parse_kernel_kind("cosine"), ConfigError);
    CHECK(parse_kernel_kind("se") == KernelKind::squared_exponential);
    CHECK(parse_kernel_kind("matern-1/2") == KernelKind::matern12);
}

TEST_CASE("symmetry is exact") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (const auto& k : catalog()) {
        for (int i = 0; i < 1000; ++i) {
            const double a = u(rng), b = u(rng);
            REQUIRE(k.eval(a, b) == k.eval(b, a));
        }
    }
}

TEST_CASE("analytic Lipschitz constants") {
    const auto se = lipschitz_constant(Kernel::squared_exponential(1.0), Box::interval(0.0, 2.0));
    CHECK(se.method == LipschitzMethod::analytic);
    CHECK(se.value == doctest::Approx(std::exp(-0.5)).epsilon(1e-15));
    const auto m = lipschitz_constant(Kernel::matern12(1.0), Box::interval(0.0, 2.0));
    CHECK(m.value == doctest::Approx(1.0).epsilon(1e-15));
    const auto se2 = lipschitz_constant(Kernel::squared_exponential(0.5, 3.0), Box::interval(0.0, 2.0));
    CHECK(se2.value == doctest::Approx(3.0 * std::exp(-0.5) / 0.5).epsilon(1e-15));
}

TEST_CASE("grid Lipschitz estimates carry the safety factor") {
    const auto rq = lipschitz_constant(Kernel::rational_quadratic(1.0, 1.0), Box::interval(0.5, 1.5));
    CHECK(rq.method == LipschitzMethod::grid_estimate);
    CHECK(rq.safety_factor == kLipschitzSafetyFactor);
    // max tau / (1 + tau^2/2)^2 is at tau = sqrt(2/3)
    CHECK(rq.value == doctest::Approx(1.05 * std::sqrt(2.0 / 3.0) * 9.0 / 16.0).epsilon(1e-6));
}

TEST_CASE("single-point domain") {
    const auto se = lipschitz_constant(Kernel::squared_exponential(1.0), Box::interval(1.0, 1.0));
    CHECK(se.method == LipschitzMethod::analytic);
    const auto poly = lipschitz_constant(Kernel::polynomial(1.0, 3), Box::interval(1.0, 1.0));
    CHECK(poly.method == LipschitzMethod::grid_estimate);
    // d/dx (x z + 1)^3 at x = z = 1 is 3 * 2^2
    CHECK(poly.value == doctest::Approx(12.0 * 1.05).epsilon(1e-6));
}

TEST_CASE("Lipschitz validity on random in-domain triples") {
    std::mt19937_64 rng(3);
    const Box box = Box::interval(0.5, 1.5);
    std::uniform_real_distribution<double> u(0.5, 1.5);
    for (const auto& k : catalog()) {
        const double l = lipschitz_constant(k, box).value;
        for (int i = 0; i < 10000; ++i) {
            const double x = u(rng), xp = u(rng), z = u(rng);
            REQUIRE(std::abs(k.eval(xp, z) - k.eval(x, z)) <= l * std::abs(xp - x) + 1e-12);
        }
    }
}

TEST_CASE("kernel matrices are positive semidefinite") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1.0, 2.0);
    for (const auto& k : catalog()) {
        for (int rep = 0; rep < 20; ++rep) {
            const int n = 2 + rep % 19;
            Eigen::MatrixXd pts(1, n);
            for (int i = 0; i < n; ++i) pts(0, i) = u(rng);
            const Eigen::MatrixXd g = kernel_matrix(k, pts);
            const double lmin = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(g).eigenvalues().minCoeff();
            REQUIRE(lmin >= -1e-8 * g.trace() / n);
        }
    }
}

TEST_CASE("decreasing flag is honest") {
    for (const auto& k : catalog()) {
        if (!k.isotropic() || !k.decreasing()) continue;
        double prev = k.eval_iso(0.0);
        for (int i = 1; i <= 1000; ++i) {
            const double v = k.eval_iso(5.0 * i / 1000.0);
            REQUIRE(v <= prev);
            prev = v;
        }
    }
    CHECK_FALSE(Kernel::periodic(1.0, 1.0).decreasing());
}

TEST_CASE("multi-dimensional inputs") {
    const Kernel k = Kernel::squared_exponential(1.0);
    const std::vector<double> a{0.0, 0.0}, b{3.0, 4.0};
    CHECK(k.eval(a, b) == doctest::Approx(std::exp(-12.5)).epsilon(1e-14));
    Box box{{0.0, 0.0}, {1.0, 1.0}};
    CHECK(box.diameter() == doctest::Approx(std::sqrt(2.0)));
    const auto nn = lipschitz_constant(Kernel::neural_network(), box);
    CHECK(nn.value > 0.0);
}
