#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gpbounds {

enum class KernelKind {
    squared_exponential,
    matern12,
    rational_quadratic,
    periodic,
    polynomial,
    neural_network,
};

/// Canonical config name of a kernel kind ("squared-exponential", "matern-1/2", ...).
std::string_view kernel_kind_name(KernelKind kind);

/// Parses a kind name; accepts the canonical names plus a few short aliases
/// ("se", "matern", "rq", ...). Throws ConfigError on unknown names.
KernelKind parse_kernel_kind(std::string_view name);

/// Unvalidated description of a kernel as read from a config file.
struct KernelSpec {
    KernelKind kind = KernelKind::squared_exponential;
    double lengthscale = 1.0;
    double signal_variance = 1.0;
    /// Per-kind parameters: "alpha" (rational-quadratic), "period" (periodic),
    /// "offset" and "degree" (polynomial), "bias_variance" and "weight_variance"
    /// (neural-network).
    std::map<std::string, double> extra;
};

/// Axis-aligned box `[lo_i, hi_i]`; the domain over which Lipschitz constants hold.
struct Box {
    std::vector<double> lo;
    std::vector<double> hi;

    static Box interval(double lo, double hi) { return Box{{lo}, {hi}}; }
    std::size_t dimension() const { return lo.size(); }
    double diameter() const;
};

/// Covariance function from a fixed catalog. Immutable after construction.
///
/// Isotropic kinds (squared-exponential, Matern-1/2, rational-quadratic,
/// periodic) depend only on tau = |x - x'|. Of those, all but the periodic
/// kernel are non-increasing in tau. Polynomial and neural-network kernels are
/// non-stationary and only support eval().
class Kernel {
public:
    /// Validates the spec: signal variance and (where used) lengthscale must be
    /// positive, per-kind parameters must be in range. Throws ConfigError.
    explicit Kernel(const KernelSpec& spec);

    static Kernel squared_exponential(double lengthscale, double signal_variance = 1.0);
    static Kernel matern12(double lengthscale, double signal_variance = 1.0);
    static Kernel rational_quadratic(double lengthscale, double alpha = 1.0,
                                     double signal_variance = 1.0);
    static Kernel periodic(double lengthscale, double period = 1.0,
                           double signal_variance = 1.0);
    static Kernel polynomial(double offset = 1.0, int degree = 3,
                             double signal_variance = 1.0);
    static Kernel neural_network(double bias_variance = 1.0, double weight_variance = 1.0,
                                 double signal_variance = 1.0);

    double eval(std::span<const double> x, std::span<const double> z) const;
    double eval(double x, double z) const { return eval(std::span(&x, 1), std::span(&z, 1)); }

    /// k(tau) for isotropic kinds. Throws PreconditionError otherwise.
    double eval_iso(double tau) const;

    /// k(x, x); equals signal variance for isotropic kinds.
    double prior_variance(std::span<const double> x) const { return eval(x, x); }

    KernelKind kind() const { return kind_; }
    bool isotropic() const;
    bool decreasing() const;
    double lengthscale() const { return lengthscale_; }
    double signal_variance() const { return signal_variance_; }
    const KernelSpec& spec() const { return spec_; }
    std::string describe() const;

private:
    double iso_unchecked(double tau) const;

    KernelSpec spec_;
    KernelKind kind_;
    double lengthscale_;
    double signal_variance_;
    double alpha_ = 1.0;
    double period_ = 1.0;
    double offset_ = 1.0;
    int degree_ = 3;
    double bias_variance_ = 1.0;
    double weight_variance_ = 1.0;
};

enum class LipschitzMethod { analytic, grid_estimate };

struct LipschitzEstimate {
    double value = 0.0;
    LipschitzMethod method = LipschitzMethod::analytic;
    double safety_factor = 1.0;
};

inline constexpr double kLipschitzSafetyFactor = 1.05;
inline constexpr int kLipschitzGridPoints = 10000;

/// One-argument Lipschitz constant L with |k(x', z) - k(x, z)| <= L |x' - x|
/// for x, x', z in `domain`.
///
/// Closed forms for the squared-exponential (s^2 e^{-1/2} / l) and Matern-1/2
/// (s^2 / l, the one-sided slope at tau -> 0+) kernels. Every other kind uses
/// the largest difference quotient on a 10^4 point grid times 1.05.
LipschitzEstimate lipschitz_constant(const Kernel& kernel, const Box& domain);

}  // namespace gpbounds
