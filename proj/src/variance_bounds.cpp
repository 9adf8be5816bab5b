#include "gpbounds/variance_bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "gpbounds/errors.hpp"

namespace gpbounds {

std::size_t ball_count_prefix(const Eigen::MatrixXd& inputs, Eigen::Index prefix, const Point& x,
                              double radius) {
    if (radius < 0.0) throw PreconditionError("ball_count: radius must be nonnegative");
    const double r2 = radius * radius;
    std::size_t count = 0;
    for (Eigen::Index i = 0; i < prefix; ++i) {
        if ((inputs.col(i) - x).squaredNorm() <= r2) ++count;
    }
    return count;
}

BallCount ball_count(const TrainingSet& train, const Point& x, double radius) {
    return BallCount{x, radius, ball_count_prefix(train.inputs, train.size(), x, radius)};
}

double lipschitz_bound(const Kernel& kernel, double lipschitz, const Point& x,
                       std::size_t ball_count, double rho, double noise_variance,
                       LipschitzBoundForm form) {
    if (!(noise_variance > 0.0)) throw PreconditionError("lipschitz_bound: noise variance must be positive");
    if (rho < 0.0 || lipschitz < 0.0) {
        throw PreconditionError("lipschitz_bound: rho and L_k must be nonnegative");
    }
    const double k = kernel.prior_variance(as_span(x));
    if (lipschitz * rho > k * (1.0 + 1e-12)) {
        std::ostringstream os;
        os << "lipschitz_bound: rho=" << rho << " exceeds k(x,x)/L_k=" << k / lipschitz;
        throw PreconditionError(os.str());
    }
    const double b = static_cast<double>(ball_count);
    const double lr = lipschitz * rho;
    const double numerator = form == LipschitzBoundForm::proof
                                 ? k * noise_variance + b * (4.0 * k * lr - lr * lr)
                                 : (4.0 * lr - lr * lr) * b * k + noise_variance * k;
    return numerator / (b * (k + 2.0 * lr) + noise_variance);
}

double isotropic_bound(const Kernel& kernel, std::size_t ball_count, double rho,
                       double noise_variance) {
    if (!kernel.isotropic() || !kernel.decreasing()) {
        throw PreconditionError("isotropic_bound: kernel must be isotropic and decreasing");
    }
    if (ball_count == 0) throw PreconditionError("isotropic_bound: empty ball (use k(0))");
    if (rho < 0.0) throw PreconditionError("isotropic_bound: rho must be nonnegative");
    const double k0 = kernel.eval_iso(0.0);
    const double kr = kernel.eval_iso(rho);
    return k0 - kr * kr / (k0 + noise_variance / static_cast<double>(ball_count));
}

double one_point_bound(const Kernel& kernel, double tau, double noise_variance) {
    const double k0 = kernel.eval_iso(0.0);
    const double kt = kernel.eval_iso(tau);
    return k0 - kt * kt / (k0 + noise_variance);
}

double two_point_bound(const Kernel& kernel, double tau1, double tau2, double delta,
                       double noise_variance) {
    const double slack = 1e-9 * std::max({1.0, tau1, tau2, delta});
    if (delta > tau1 + tau2 + slack || delta < std::abs(tau1 - tau2) - slack) {
        std::ostringstream os;
        os << "two_point_bound: distances (" << tau1 << ", " << tau2 << ", " << delta
           << ") are not geometrically consistent";
        throw PreconditionError(os.str());
    }
    const double k0 = kernel.eval_iso(0.0);
    const double k1 = kernel.eval_iso(tau1);
    const double k2 = kernel.eval_iso(tau2);
    const double kd = kernel.eval_iso(delta);
    const double a = k0 + noise_variance;
    const double det = a * a - kd * kd;
    // k^T A^{-1} k with A = [[a, kd], [kd, a]].
    const double explained = (a * (k1 * k1 + k2 * k2) - 2.0 * kd * k1 * k2) / det;
    return k0 - explained;
}

double RadiusSchedule::radius(double n) const { return coefficient * std::pow(n, -exponent); }

void RadiusSchedule::validate() const {
    if (!(coefficient > 0.0) || !std::isfinite(coefficient)) {
        throw ConfigError("radius schedule: coefficient c must be positive");
    }
    if (!(exponent >= 0.0) || !std::isfinite(exponent)) {
        throw ConfigError("radius schedule: exponent alpha must be nonnegative");
    }
}

double radius_at(const RadiusSchedule& schedule, std::size_t n, const Kernel& kernel,
                 const Point& x, double lipschitz) {
    if (n < 1) throw PreconditionError("radius_at: N must be at least 1");
    const double raw = schedule.radius(static_cast<double>(n));
    if (lipschitz <= 0.0) return raw;
    return std::min(raw, kernel.prior_variance(as_span(x)) / lipschitz);
}

BoundReport bound_report(const TrainingSet& train, const Kernel& kernel, double lipschitz,
                         const Point& x, double rho, LipschitzBoundForm form) {
    BoundReport r;
    r.n = static_cast<std::size_t>(train.size());
    r.rho = rho;
    r.exact = posterior_variance(train, kernel, x);
    r.ball_count = ball_count(train, x, rho).count;
    r.lipschitz_bound = lipschitz_bound(kernel, lipschitz, x, r.ball_count, rho,
                                        train.noise_variance, form);
    if (!kernel.isotropic()) return r;

    const double k0 = kernel.eval_iso(0.0);
    if (kernel.decreasing()) {
        r.isotropic_bound = r.ball_count == 0
                                ? k0
                                : isotropic_bound(kernel, r.ball_count, rho, train.noise_variance);
    }
    if (r.n == 0) {
        r.one_point_bound = k0;
        r.two_point_bound = k0;
        return r;
    }

    // Nearest and second-nearest training points.
    Eigen::Index first = 0;
    Eigen::Index second = -1;
    double d1 = std::numeric_limits<double>::infinity();
    double d2 = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < train.size(); ++i) {
        const double d = (train.inputs.col(i) - x).norm();
        if (d < d1) {
            d2 = d1;
            second = first == i ? -1 : first;
            d1 = d;
            first = i;
        } else if (d < d2) {
            d2 = d;
            second = i;
        }
    }
    r.one_point_bound = one_point_bound(kernel, d1, train.noise_variance);
    if (second < 0) {
        r.two_point_bound = r.one_point_bound;
    } else {
        const double delta = (train.inputs.col(first) - train.inputs.col(second)).norm();
        r.two_point_bound = two_point_bound(kernel, d1, d2, delta, train.noise_variance);
    }
    return r;
}

}  // namespace gpbounds
