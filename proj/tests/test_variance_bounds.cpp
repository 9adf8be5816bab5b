#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "gpbounds/errors.hpp"
#include "gpbounds/gp_core.hpp"
#include "gpbounds/variance_bounds.hpp"

using namespace gpbounds;

namespace {

Point pt(double x) {
    Point p(1);
    p(0) = x;
    return p;
}

}  // namespace

TEST_CASE("ball count uses the closed ball") {
    const std::vector<double> xs{0.9, 1.0, 1.2};
    const auto t = TrainingSet::from_1d(xs, 0.1);
    CHECK(ball_count(t, pt(1.0), 0.1).count == 2);
    CHECK(ball_count(t, pt(1.05), 0.0).count == 0);
    CHECK(ball_count(t, pt(1.0), 0.0).count == 1);
    CHECK(ball_count(t, pt(1.0), 5.0).count == 3);
    // boundary points at exactly representable distances
    const std::vector<double> ys{0.5, 1.5};
    CHECK(ball_count(TrainingSet::from_1d(ys, 0.1), pt(1.0), 0.5).count == 2);
}

TEST_CASE("Lipschitz bound hand values") {
    const Kernel k = Kernel::squared_exponential(1.0);
    const double l = lipschitz_constant(k, Box::interval(0.5, 1.5)).value;
    CHECK(lipschitz_bound(k, l, pt(1.0), 0, 0.3, 0.1) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(lipschitz_bound(k, l, pt(1.0), 10, 0.0, 0.1) == doctest::Approx(0.1 / 10.1).epsilon(1e-14));
    // rho = 0.1, |B| = 4, L = e^{-1/2}
    const double lr = std::exp(-0.5) * 0.1;
    const double proof = (0.1 + 4.0 * (4.0 * lr - lr * lr)) / (4.0 * (1.0 + 2.0 * lr) + 0.1);
    CHECK(lipschitz_bound(k, l, pt(1.0), 4, 0.1, 0.1) == doctest::Approx(proof).epsilon(1e-14));
}

TEST_CASE("proof and printed forms differ only through k(x,x)") {
    const Kernel k1 = Kernel::squared_exponential(1.0);
    const double l1 = lipschitz_constant(k1, Box::interval(0.0, 1.0)).value;
    CHECK(lipschitz_bound(k1, l1, pt(0.5), 7, 0.2, 0.1, LipschitzBoundForm::proof) ==
          doctest::Approx(lipschitz_bound(k1, l1, pt(0.5), 7, 0.2, 0.1, LipschitzBoundForm::as_printed)).epsilon(1e-15));
    const Kernel k2 = Kernel::squared_exponential(1.0, 2.0);
    const double l2 = lipschitz_constant(k2, Box::interval(0.0, 1.0)).value;
    CHECK(lipschitz_bound(k2, l2, pt(0.5), 7, 0.2, 0.1, LipschitzBoundForm::proof) !=
          doctest::Approx(lipschitz_bound(k2, l2, pt(0.5), 7, 0.2, 0.1, LipschitzBoundForm::as_printed)));
}

TEST_CASE("Lipschitz bound precondition is enforced, not clipped") {
    const Kernel k = Kernel::matern12(1.0);
    CHECK_THROWS_AS(lipschitz_bound(k, 1.0, pt(0.0), 3, 1.5, 0.1), PreconditionError);
    CHECK_NOTHROW(lipschitz_bound(k, 1.0, pt(0.0), 3, 1.0, 0.1));
}

TEST_CASE("isotropic bound hand value and identities") {
    const Kernel se = Kernel::squared_exponential(1.0);
    CHECK(isotropic_bound(se, 5, 0.1, 0.1) ==
          doctest::Approx(1.0 - std::exp(-0.01) / 1.02).epsilon(1e-12));
    CHECK(isotropic_bound(se, 5, 0.1, 0.1) == doctest::Approx(0.029363).epsilon(1e-4));
    for (double tau : {0.0, 0.1, 0.7, 2.0}) {
        CHECK(isotropic_bound(se, 1, tau, 0.1) == one_point_bound(se, tau, 0.1));
    }
    CHECK(isotropic_bound(se, 1000000000, 0.0, 0.1) == doctest::Approx(0.0).epsilon(1e-9));
    CHECK_THROWS_AS(isotropic_bound(se, 0, 0.1, 0.1), PreconditionError);
    CHECK_THROWS_AS(isotropic_bound(Kernel::periodic(1.0), 3, 0.1, 0.1), PreconditionError);
}

TEST_CASE("one- and two-point bounds are exact small posteriors") {
    const Kernel k = Kernel::squared_exponential(1.0);
    CHECK(one_point_bound(k, 0.0, 0.1) == doctest::Approx(1.0 / 11.0).epsilon(1e-14));
    CHECK(one_point_bound(k, 50.0, 0.1) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(two_point_bound(k, 0.0, 0.0, 0.0, 0.1) == doctest::Approx(1.0 - 2.0 / 2.1).epsilon(1e-13));
    CHECK(two_point_bound(k, 0.3, 50.0, 50.3, 0.1) == doctest::Approx(one_point_bound(k, 0.3, 0.1)).epsilon(1e-14));
    CHECK_THROWS_AS(two_point_bound(k, 0.1, 0.2, 1.0, 0.1), PreconditionError);

    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (const Kernel& kk : {Kernel::squared_exponential(0.4), Kernel::matern12(0.7),
                             Kernel::rational_quadratic(0.5, 2.0), Kernel::periodic(0.6, 1.3)}) {
        for (int i = 0; i < 200; ++i) {
            const double a = u(rng), b = u(rng);
            const std::vector<double> one{a}, two{a, b};
            CHECK(one_point_bound(kk, std::abs(a), 0.05) ==
                  doctest::Approx(posterior_variance(TrainingSet::from_1d(one, 0.05), kk, pt(0.0))).epsilon(1e-12));
            CHECK(two_point_bound(kk, std::abs(a), std::abs(b), std::abs(a - b), 0.05) ==
                  doctest::Approx(posterior_variance(TrainingSet::from_1d(two, 0.05), kk, pt(0.0))).epsilon(1e-12));
            REQUIRE(two_point_bound(kk, std::abs(a), std::abs(b), std::abs(a - b), 0.05) <=
                    one_point_bound(kk, std::min(std::abs(a), std::abs(b)), 0.05) + 1e-12);
        }
    }
}

TEST_CASE("radius schedule") {
    const Kernel k = Kernel::squared_exponential(1.0);
    const double l = lipschitz_constant(k, Box::interval(0.5, 1.5)).value;
    CHECK(radius_at({1.0, 1.0 / 3.0}, 1000, k, pt(1.0), l) == doctest::Approx(0.1).epsilon(1e-14));
    CHECK(radius_at({1e6, 0.5}, 1, k, pt(1.0), l) == doctest::Approx(1.0 / l).epsilon(1e-15));
    double prev = radius_at({5.0, 0.25}, 1, k, pt(1.0), l);
    for (std::size_t n = 2; n < 5000; ++n) {
        const double r = radius_at({5.0, 0.25}, n, k, pt(1.0), l);
        REQUIRE(r <= prev);
        prev = r;
    }
    CHECK_THROWS_AS((RadiusSchedule{0.0, 0.5}.validate()), ConfigError);
    CHECK_THROWS_AS((RadiusSchedule{1.0, -0.5}.validate()), ConfigError);
}

TEST_CASE("bounds are non-increasing in the ball count") {
    const Kernel k = Kernel::matern12(1.0);
    const double l = 1.0;
    for (double rho : {0.0, 0.05, 0.3}) {
        double p1 = lipschitz_bound(k, l, pt(0.0), 0, rho, 0.1);
        double p2 = k.eval_iso(0.0);
        for (std::size_t b = 1; b < 500; ++b) {
            const double v1 = lipschitz_bound(k, l, pt(0.0), b, rho, 0.1);
            const double v2 = isotropic_bound(k, b, rho, 0.1);
            REQUIRE(v1 <= p1 + 1e-15);
            REQUIRE(v2 <= p2 + 1e-15);
            p1 = v1;
            p2 = v2;
        }
    }
}

TEST_CASE("bound report agrees with the individual bounds") {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(0.5, 1.5);
    std::vector<double> xs(40);
    for (auto& x : xs) x = u(rng);
    const auto t = TrainingSet::from_1d(xs, 0.1);
    const Kernel k = Kernel::squared_exponential(1.0);
    const double l = lipschitz_constant(k, Box::interval(0.5, 1.5)).value;
    const auto r = bound_report(t, k, l, pt(1.0), 0.2);
    CHECK(r.n == 40);
    CHECK(r.exact == doctest::Approx(posterior_variance(t, k, pt(1.0))));
    REQUIRE(r.isotropic_bound);
    REQUIRE(r.one_point_bound);
    REQUIRE(r.two_point_bound);
    CHECK(*r.isotropic_bound == isotropic_bound(k, r.ball_count, 0.2, 0.1));
    CHECK(r.lipschitz_bound >= r.exact);
    CHECK(*r.isotropic_bound >= r.exact);
    CHECK(*r.two_point_bound >= r.exact);
    CHECK(*r.one_point_bound >= *r.two_point_bound - 1e-12);

    const auto nn = bound_report(t, Kernel::neural_network(), 1.0, pt(1.0), 0.2);
    CHECK_FALSE(nn.isotropic_bound);
    CHECK_FALSE(nn.one_point_bound);
}

TEST_CASE("bound sequence vanishes along a shrinking schedule") {
    // rho = N^{-1/3} keeps N rho -> infinity, so the bound with |B| = N rho tends to 0.
    const Kernel k = Kernel::squared_exponential(1.0);
    const double l = lipschitz_constant(k, Box::interval(0.5, 1.5)).value;
    double last = 1.0;
    for (double n : {1e3, 1e5, 1e7, 1e9}) {
        const double rho = std::pow(n, -1.0 / 3.0);
        const auto count = static_cast<std::size_t>(n * rho);
        const double v = lipschitz_bound(k, l, pt(1.0), count, rho, 0.1);
        CHECK(v < last);
        last = v;
    }
    CHECK(last < 0.01);
}
