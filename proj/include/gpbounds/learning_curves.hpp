#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gpbounds/kernels.hpp"

namespace gpbounds {

// Average learning curves for scalar inputs with test and training points
// uniform on [0, 1]. All bounds need an isotropic kernel.

/// Density N (1 - delta)^{N-1} of the gap between adjacent order statistics,
/// evaluated in log space.
double spacing_density(std::uint64_t n, double delta);

/// Expected-gap bound using only the nearest training sample:
///   k(0) + s^2 - 2 E[int_0^d k^2] / (k(0) + s^2) - 2 (N-1) E[int_0^{d/2} k^2] / (k(0) + s^2).
/// `quad_tol` is the absolute accuracy target for the returned value.
double e1_bound(const Kernel& kernel, double noise_variance, std::uint64_t n,
                double quad_tol = 1e-9);

/// Expected-gap bound using the two samples bracketing each test point; the
/// inner gap integrand is the exact two-point posterior variance integrated
/// over the gap, (k(0)+s^2) k^2(t) - k(d) k(t) k(d-t) over
/// (k(0)+s^2)^2 - k^2(d). For N = 1 it coincides with e1_bound.
double e2_bound(const Kernel& kernel, double noise_variance, std::uint64_t n,
                double quad_tol = 1e-9);

/// Partition of the ordered sample into m inner sections of n samples each
/// (consecutive sections share an endpoint) and two boundary sections with
/// n_l and n_r samples: n_l + n_r + m (n - 1) - 1 = N.
struct SegmentPlan {
    std::int64_t total = 0;  // N
    std::int64_t n = 0;
    std::int64_t m = 0;
    std::int64_t n_left = 0;
    std::int64_t n_right = 0;
    bool valid = false;
};

SegmentPlan segment_plan(std::uint64_t total, std::uint64_t n);

/// Weight on the span delta of a section holding n consecutive samples.
///
/// `order_statistics` is the exact density of that span, a Beta(n-1, N-n+2)
/// law: (n-1) C(N, n-1) delta^{n-2} (1-delta)^{N-n+1}. With it the section
/// terms partition the unit interval in expectation and the bound tends to
/// s^2. `as_printed` uses C(N, n-1) delta^{n-2} (1-delta)^{N-n-1}, which is
/// short by the factor n-1 and is kept only for comparison.
enum class SpanWeight { order_statistics, as_printed };

/// I_n(delta) = w_n(delta) * int_{delta/2}^{delta} k^2(r) dr. Requires 2 <= n <= N-1
/// and 0 < delta < 1.
double i_n_integral(const Kernel& kernel, std::uint64_t total, std::uint64_t n, double delta,
                    double quad_tol = 1e-9, SpanWeight weight = SpanWeight::order_statistics);

/// k(0) + s^2 - 2m int I_n / (k(0) + s^2/n) - 2 int I_{n_l+1} / (k(0) + s^2/n_l)
///            - 2 int I_{n_r+1} / (k(0) + s^2/n_r).
/// Throws PreconditionError for an invalid segment plan; callers fall back to e1.
double e_rho_bound(const Kernel& kernel, double noise_variance, std::uint64_t total,
                   std::uint64_t n, double quad_tol = 1e-9,
                   SpanWeight weight = SpanWeight::order_statistics);

/// e1 for n = 1 or an invalid plan, e_rho otherwise.
double section_bound(const Kernel& kernel, double noise_variance, std::uint64_t total,
                     std::uint64_t n, double quad_tol = 1e-9,
                     SpanWeight weight = SpanWeight::order_statistics);

/// Warm-started from n_prev, increases n while section_bound strictly
/// decreases and returns the local minimizer. N <= 1 yields 1.
std::uint64_t greedy_select_n(const Kernel& kernel, double noise_variance, std::uint64_t total,
                              std::uint64_t n_prev, double quad_tol = 1e-9,
                              SpanWeight weight = SpanWeight::order_statistics);

struct MonteCarloPoint {
    std::uint64_t n = 0;
    double mean = 0.0;            // e_num(N), includes s^2
    double standard_error = 0.0;  // across datasets
};

/// e_num(N): sigma_N^2 averaged over uniform test points and uniform training
/// sets, plus s^2. Training sets for different N are prefixes of one draw per
/// dataset; every dataset has its own derived seed.
std::vector<MonteCarloPoint> monte_carlo_curve(const Kernel& kernel, double noise_variance,
                                               const std::vector<std::uint64_t>& n_list,
                                               int test_points, int datasets, std::uint64_t seed);

struct LearningCurveRow {
    std::uint64_t n = 0;
    double e_num = 0.0;  // NaN when N exceeds the Monte Carlo cap
    double e_num_se = 0.0;
    double e1 = 0.0;
    double e2 = 0.0;
    double e_rho = 0.0;
    std::uint64_t n_selected = 1;
};

struct LearningCurveTable {
    std::vector<LearningCurveRow> rows;
    std::string kernel;
    double noise_variance = 0.0;
    std::uint64_t seed = 0;
    int test_points = 0;
    int datasets = 0;
};

struct LearningCurveOptions {
    double quad_tol = 1e-9;
    SpanWeight weight = SpanWeight::order_statistics;
    int test_points = 200;
    int datasets = 20;
    std::uint64_t mc_max_n = 2000;  // N above this get bounds only
    std::uint64_t seed = 1;
};

/// Bounds with greedy n over an increasing N grid, plus e_num up to mc_max_n.
LearningCurveTable learning_curve_table(const Kernel& kernel, double noise_variance,
                                        const std::vector<std::uint64_t>& n_grid,
                                        const LearningCurveOptions& options = {});

}  // namespace gpbounds
