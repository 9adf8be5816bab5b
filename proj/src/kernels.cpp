#include "gpbounds/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "gpbounds/errors.hpp"

namespace gpbounds {

namespace {

double squared_distance(std::span<const double> x, std::span<const double> z) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - z[i];
        s += d * d;
    }
    return s;
}

double extra_or(const KernelSpec& spec, const std::string& key, double fallback) {
    const auto it = spec.extra.find(key);
    return it == spec.extra.end() ? fallback : it->second;
}

void require_positive(double value, const char* what) {
    if (!(value > 0.0) || !std::isfinite(value)) {
        throw ConfigError(std::string("kernel parameter '") + what + "' must be positive and finite");
    }
}

}  // namespace

std::string_view kernel_kind_name(KernelKind kind) {
    switch (kind) {
        case KernelKind::squared_exponential: return "squared-exponential";
        case KernelKind::matern12: return "matern-1/2";
        case KernelKind::rational_quadratic: return "rational-quadratic";
        case KernelKind::periodic: return "periodic";
        case KernelKind::polynomial: return "polynomial";
        case KernelKind::neural_network: return "neural-network";
    }
    return "unknown";
}

KernelKind parse_kernel_kind(std::string_view name) {
    if (name == "squared-exponential" || name == "se" || name == "rbf") {
        return KernelKind::squared_exponential;
    }
    if (name == "matern-1/2" || name == "matern12" || name == "matern" || name == "exponential") {
        return KernelKind::matern12;
    }
    if (name == "rational-quadratic" || name == "rq") return KernelKind::rational_quadratic;
    if (name == "periodic") return KernelKind::periodic;
    if (name == "polynomial" || name == "poly") return KernelKind::polynomial;
    if (name == "neural-network" || name == "nn") return KernelKind::neural_network;
    throw ConfigError("unknown kernel kind '" + std::string(name) + "'");
}

double Box::diameter() const {
    double s = 0.0;
    for (std::size_t i = 0; i < lo.size(); ++i) s += (hi[i] - lo[i]) * (hi[i] - lo[i]);
    return std::sqrt(s);
}

Kernel::Kernel(const KernelSpec& spec)
    : spec_(spec),
      kind_(spec.kind),
      lengthscale_(spec.lengthscale),
      signal_variance_(spec.signal_variance) {
    require_positive(signal_variance_, "signal_variance");
    switch (kind_) {
        case KernelKind::squared_exponential:
        case KernelKind::matern12:
            require_positive(lengthscale_, "lengthscale");
            break;
        case KernelKind::rational_quadratic:
            require_positive(lengthscale_, "lengthscale");
            alpha_ = extra_or(spec, "alpha", 1.0);
            require_positive(alpha_, "alpha");
            break;
        case KernelKind::periodic:
            require_positive(lengthscale_, "lengthscale");
            period_ = extra_or(spec, "period", 1.0);
            require_positive(period_, "period");
            break;
        case KernelKind::polynomial: {
            offset_ = extra_or(spec, "offset", 1.0);
            const double degree = extra_or(spec, "degree", 3.0);
            if (degree < 1.0 || degree != std::floor(degree)) {
                throw ConfigError("kernel parameter 'degree' must be a positive integer");
            }
            degree_ = static_cast<int>(degree);
            if (offset_ < 0.0) throw ConfigError("kernel parameter 'offset' must be nonnegative");
            break;
        }
        case KernelKind::neural_network:
            bias_variance_ = extra_or(spec, "bias_variance", 1.0);
            weight_variance_ = extra_or(spec, "weight_variance", 1.0);
            require_positive(bias_variance_, "bias_variance");
            require_positive(weight_variance_, "weight_variance");
            break;
    }
}

Kernel Kernel::squared_exponential(double lengthscale, double signal_variance) {
    return Kernel(KernelSpec{KernelKind::squared_exponential, lengthscale, signal_variance, {}});
}

Kernel Kernel::matern12(double lengthscale, double signal_variance) {
    return Kernel(KernelSpec{KernelKind::matern12, lengthscale, signal_variance, {}});
}

Kernel Kernel::rational_quadratic(double lengthscale, double alpha, double signal_variance) {
    return Kernel(KernelSpec{KernelKind::rational_quadratic, lengthscale, signal_variance,
                             {{"alpha", alpha}}});
}

Kernel Kernel::periodic(double lengthscale, double period, double signal_variance) {
    return Kernel(KernelSpec{KernelKind::periodic, lengthscale, signal_variance,
                             {{"period", period}}});
}

Kernel Kernel::polynomial(double offset, int degree, double signal_variance) {
    return Kernel(KernelSpec{KernelKind::polynomial, 1.0, signal_variance,
                             {{"offset", offset}, {"degree", static_cast<double>(degree)}}});
}

Kernel Kernel::neural_network(double bias_variance, double weight_variance,
                              double signal_variance) {
    return Kernel(KernelSpec{KernelKind::neural_network, 1.0, signal_variance,
                             {{"bias_variance", bias_variance},
                              {"weight_variance", weight_variance}}});
}

bool Kernel::isotropic() const {
    return kind_ != KernelKind::polynomial && kind_ != KernelKind::neural_network;
}

bool Kernel::decreasing() const {
    return kind_ == KernelKind::squared_exponential || kind_ == KernelKind::matern12 ||
           kind_ == KernelKind::rational_quadratic;
}

double Kernel::iso_unchecked(double tau) const {
    const double l = lengthscale_;
    switch (kind_) {
        case KernelKind::squared_exponential:
            return signal_variance_ * std::exp(-tau * tau / (2.0 * l * l));
        case KernelKind::matern12:
            return signal_variance_ * std::exp(-tau / l);
        case KernelKind::rational_quadratic:
            return signal_variance_ * std::pow(1.0 + tau * tau / (2.0 * alpha_ * l * l), -alpha_);
        case KernelKind::periodic: {
            const double s = std::sin(std::numbers::pi * tau / period_);
            return signal_variance_ * std::exp(-2.0 * s * s / (l * l));
        }
        default:
            break;
    }
    throw PreconditionError("eval_iso called on a non-isotropic kernel");
}

double Kernel::eval_iso(double tau) const {
    if (!isotropic()) {
        throw PreconditionError(std::string("eval_iso: kernel '") +
                                std::string(kernel_kind_name(kind_)) + "' is not isotropic");
    }
    if (tau < 0.0) throw PreconditionError("eval_iso: tau must be nonnegative");
    return iso_unchecked(tau);
}

double Kernel::eval(std::span<const double> x, std::span<const double> z) const {
    if (isotropic()) return iso_unchecked(std::sqrt(squared_distance(x, z)));

    double dot = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) dot += x[i] * z[i];

    if (kind_ == KernelKind::polynomial) {
        return signal_variance_ * std::pow(dot + offset_, degree_);
    }

    // Arcsine kernel on the augmented input (1, x) with diag(bias, weight) prior.
    double xx = 0.0;
    double zz = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        xx += x[i] * x[i];
        zz += z[i] * z[i];
    }
    const double cross = bias_variance_ + weight_variance_ * dot;
    const double nx = 1.0 + 2.0 * (bias_variance_ + weight_variance_ * xx);
    const double nz = 1.0 + 2.0 * (bias_variance_ + weight_variance_ * zz);
    return signal_variance_ * (2.0 / std::numbers::pi) * std::asin(2.0 * cross / std::sqrt(nx * nz));
}

std::string Kernel::describe() const {
    std::ostringstream os;
    os << kernel_kind_name(kind_) << "(";
    switch (kind_) {
        case KernelKind::squared_exponential:
        case KernelKind::matern12:
            os << "l=" << lengthscale_;
            break;
        case KernelKind::rational_quadratic:
            os << "l=" << lengthscale_ << ", alpha=" << alpha_;
            break;
        case KernelKind::periodic:
            os << "l=" << lengthscale_ << ", period=" << period_;
            break;
        case KernelKind::polynomial:
            os << "offset=" << offset_ << ", degree=" << degree_;
            break;
        case KernelKind::neural_network:
            os << "bias_variance=" << bias_variance_ << ", weight_variance=" << weight_variance_;
            break;
    }
    os << ", signal_variance=" << signal_variance_ << ")";
    return os.str();
}

namespace {

double iso_grid_slope(const Kernel& kernel, double max_tau) {
    if (max_tau <= 0.0) {
        // Degenerate domain: local one-sided slope at tau = 0.
        const double h = 1e-7 * std::max(kernel.lengthscale(), 1.0);
        return std::abs(kernel.eval_iso(h) - kernel.eval_iso(0.0)) / h;
    }
    const int n = kLipschitzGridPoints;
    double best = 0.0;
    double prev = kernel.eval_iso(0.0);
    for (int i = 1; i < n; ++i) {
        const double tau = max_tau * static_cast<double>(i) / (n - 1);
        const double step = max_tau / (n - 1);
        const double cur = kernel.eval_iso(tau);
        best = std::max(best, std::abs(cur - prev) / step);
        prev = cur;
    }
    return best;
}

double interval_grid_slope(const Kernel& kernel, double lo, double hi) {
    if (hi <= lo) {
        const double h = 1e-7 * std::max(std::abs(lo), 1.0);
        return std::abs(kernel.eval(lo + h, lo) - kernel.eval(lo, lo)) / h;
    }
    const int nx = kLipschitzGridPoints;
    const int nz = 201;
    const double step = (hi - lo) / (nx - 1);
    double best = 0.0;
    for (int j = 0; j < nz; ++j) {
        const double z = lo + (hi - lo) * static_cast<double>(j) / (nz - 1);
        double prev = kernel.eval(lo, z);
        for (int i = 1; i < nx; ++i) {
            const double x = lo + step * i;
            const double cur = kernel.eval(x, z);
            best = std::max(best, std::abs(cur - prev) / step);
            prev = cur;
        }
    }
    return best;
}

double box_sampled_slope(const Kernel& kernel, const Box& domain) {
    const std::size_t d = domain.dimension();
    std::mt19937_64 rng(0x9e3779b97f4a7c15ULL);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<double> x(d), z(d), xp(d), xm(d);
    double best = 0.0;
    for (int s = 0; s < kLipschitzGridPoints; ++s) {
        for (std::size_t i = 0; i < d; ++i) {
            x[i] = domain.lo[i] + (domain.hi[i] - domain.lo[i]) * unit(rng);
            z[i] = domain.lo[i] + (domain.hi[i] - domain.lo[i]) * unit(rng);
        }
        double grad2 = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            const double h = 1e-6 * std::max(std::abs(x[i]), 1.0);
            xp = x;
            xm = x;
            xp[i] += h;
            xm[i] -= h;
            const double g = (kernel.eval(xp, z) - kernel.eval(xm, z)) / (2.0 * h);
            grad2 += g * g;
        }
        best = std::max(best, std::sqrt(grad2));
    }
    return best;
}

}  // namespace

LipschitzEstimate lipschitz_constant(const Kernel& kernel, const Box& domain) {
    const double s2 = kernel.signal_variance();
    const double l = kernel.lengthscale();
    switch (kernel.kind()) {
        case KernelKind::squared_exponential:
            return {s2 * std::exp(-0.5) / l, LipschitzMethod::analytic, 1.0};
        case KernelKind::matern12:
            return {s2 / l, LipschitzMethod::analytic, 1.0};
        default:
            break;
    }

    double slope = 0.0;
    if (kernel.isotropic()) {
        slope = iso_grid_slope(kernel, domain.diameter());
    } else if (domain.dimension() == 1) {
        slope = interval_grid_slope(kernel, domain.lo[0], domain.hi[0]);
    } else {
        slope = box_sampled_slope(kernel, domain);
    }
    return {slope * kLipschitzSafetyFactor, LipschitzMethod::grid_estimate, kLipschitzSafetyFactor};
}

}  // namespace gpbounds
