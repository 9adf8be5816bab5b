#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gpbounds/random.hpp"
#include "gpbounds/variance_bounds.hpp"

namespace gpbounds {

enum class DensityKind { uniform_interval, vanishing_at_point, tabulated };

/// Sampling density of scalar training inputs.
class Density {
public:
    static Density uniform(double lo, double hi);
    /// p(x) = |x - point| / h^2 on [point - h, point + h]; h = 0.5 gives 4|x - point|.
    static Density vanishing(double point, double half_width = 0.5);
    /// Piecewise-linear density through (xs[i], values[i]), rescaled to unit mass.
    static Density tabulated(std::vector<double> xs, std::vector<double> values);

    double pdf(double x) const;
    double cdf(double x) const;
    double sample(Rng& rng) const;

    DensityKind kind() const { return kind_; }
    double support_lo() const { return lo_; }
    double support_hi() const { return hi_; }
    /// The zero of the vanishing density.
    double vanishing_point() const { return point_; }
    const std::vector<double>& table_x() const { return xs_; }
    const std::vector<double>& table_p() const { return ps_; }

    /// Order q of the ball mass near x, p~(rho) ~ C rho^q as rho -> 0, with
    /// C in `leading`; nullopt if the density vanishes at x in an unknown way.
    std::optional<int> local_order(double x, double* leading = nullptr) const;

private:
    DensityKind kind_ = DensityKind::uniform_interval;
    double lo_ = 0.0;
    double hi_ = 1.0;
    double point_ = 0.0;
    std::vector<double> xs_;
    std::vector<double> ps_;
    std::vector<double> cum_;  // cdf at table nodes
};

/// Probability mass of the closed ball [x - rho, x + rho]: closed form for the
/// built-in densities, adaptive quadrature for tabulated ones.
double ball_probability(const Density& density, double x, double rho);

struct ConvergenceVerdict {
    bool satisfied = false;
    std::optional<double> c;
    std::optional<double> epsilon;
    std::optional<std::uint64_t> first_failing_n;
    bool radius_nonincreasing = true;
    bool radius_vanishes = true;
    std::string reason;
};

/// Checks the ball-growth condition: rho(N) non-increasing, rho(N) -> 0 and
/// p~(N) >= c N^{-1+eps} for every integer N in [n_lo, n_hi]. For the built-in
/// densities the asymptotic exponent comparison is also applied; when it fails
/// beyond the probed range the first failing N is located past n_hi.
ConvergenceVerdict check_theorem32(const Density& density, double x, const RadiusSchedule& schedule,
                                   double c, double epsilon, std::uint64_t n_lo,
                                   std::uint64_t n_hi);

/// Searches eps over {0.05, ..., 0.95} plus the analytic slack, fitting c as
/// the minimum of p~(N) N^{1-eps} over the probed range. Reports the largest
/// admissible eps.
ConvergenceVerdict search_theorem32_witness(const Density& density, double x,
                                            const RadiusSchedule& schedule, std::uint64_t n_lo,
                                            std::uint64_t n_hi);

/// Densities positive around x: satisfied iff 0 < alpha < 1/d, with eps = 1/d - alpha.
ConvergenceVerdict check_corollary33(int dimension, const RadiusSchedule& schedule);

/// E[(X - p)^k] for X ~ Bernoulli(p):
///   sum_{i=0}^{k-1} (-1)^i C(k,i) p^{i+1} + (-1)^k p^k.
double bernoulli_central_moment(double p, int k);

/// alpha_m = [sum over compositions i_1+..+i_m = 2k, i_j >= 2 of
///            multinomial(2k; i) prod 2^{i_j}] / m!.
double binomial_moment_coefficient(int k, int m);

/// sum_{m=1}^{k} (N p)^m alpha_m, an upper bound on E[(M - Np)^{2k}] for
/// M ~ Binomial(N, p). Supports 1 <= k <= 8.
double binomial_moment_bound(std::uint64_t n, double p, int k);

struct GrowthRow {
    std::uint64_t n = 0;
    double mean_count = 0.0;
    std::uint64_t min_count = 0;
    double expected_count = 0.0;
};

/// Mean and minimum over `trials` of |B_{rho(N)}(x)| for N i.i.d. draws from
/// `density`. Each (N, trial) cell has its own derived seed.
std::vector<GrowthRow> empirical_ball_growth(const Density& density, double x,
                                             const RadiusSchedule& schedule,
                                             const std::vector<std::uint64_t>& n_list, int trials,
                                             std::uint64_t seed);

}  // namespace gpbounds
