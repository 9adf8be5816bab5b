#include "gpbounds/learning_curves.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "gpbounds/errors.hpp"
#include "gpbounds/quadrature.hpp"
#include "gpbounds/random.hpp"

namespace gpbounds {

namespace {

void require_isotropic(const Kernel& kernel, const char* where) {
    if (!kernel.isotropic()) {
        throw PreconditionError(std::string(where) + ": learning-curve bounds need an isotropic kernel");
    }
}

void require_noise(double noise_variance, const char* where) {
    if (!(noise_variance > 0.0)) {
        throw PreconditionError(std::string(where) + ": noise variance must be positive");
    }
}

QuadratureOptions inner_options(double abs_tol) { return {abs_tol, 1e-13, 400}; }
QuadratureOptions outer_options(double abs_tol) { return {abs_tol, 0.0, 4000}; }

// int_lo^hi k^2(tau) dtau
double kernel_sq_integral(const Kernel& kernel, double lo, double hi, double abs_tol) {
    return integrate(
        [&kernel](double t) {
            const double k = kernel.eval_iso(t);
            return k * k;
        },
        lo, hi, inner_options(abs_tol));
}

// int_0^delta k(tau) k(delta - tau) dtau
double kernel_convolution(const Kernel& kernel, double delta, double abs_tol) {
    return integrate(
        [&kernel, delta](double t) {
            return kernel.eval_iso(t) * kernel.eval_iso(std::max(0.0, delta - t));
        },
        0.0, delta, inner_options(abs_tol));
}

// The spacing density is below e^{-40} of its peak past 40/N.
double spacing_support(std::uint64_t n) {
    return std::min(1.0, 40.0 / static_cast<double>(n));
}

struct SpanExponents {
    double log_norm = 0.0;
    double a = 0.0;  // power of delta
    double b = 0.0;  // power of (1 - delta)
};

SpanExponents span_exponents(std::uint64_t total, std::uint64_t n, SpanWeight weight) {
    const double nn = static_cast<double>(n);
    const double tt = static_cast<double>(total);
    SpanExponents e;
    // log C(N, n-1)
    e.log_norm = std::lgamma(tt + 1.0) - std::lgamma(nn) - std::lgamma(tt - nn + 2.0);
    e.a = nn - 2.0;
    if (weight == SpanWeight::order_statistics) {
        e.log_norm += std::log(nn - 1.0);
        e.b = tt - nn + 1.0;
    } else {
        e.b = tt - nn - 1.0;
    }
    return e;
}

double log_span_weight(const SpanExponents& e, double delta) {
    double v = e.log_norm;
    if (e.a != 0.0) v += e.a * std::log(delta);
    if (e.b != 0.0) v += e.b * std::log1p(-delta);
    return v;
}

void check_span_range(std::uint64_t total, std::uint64_t n) {
    if (n < 2 || total < 3 || n > total - 1) {
        std::ostringstream os;
        os << "I_n: n=" << n << " outside [2, N-1] for N=" << total;
        throw PreconditionError(os.str());
    }
}

// int_0^1 I_n(delta) d delta, restricted to where the span weight is non-negligible.
double span_expectation(const Kernel& kernel, std::uint64_t total, std::uint64_t n,
                        double abs_tol, SpanWeight weight) {
    check_span_range(total, n);
    const SpanExponents e = span_exponents(total, n, weight);
    const double inner_tol = 0.25 * abs_tol;

    const double mode = (e.a + e.b) > 0.0 ? e.a / (e.a + e.b) : 0.0;
    auto proxy = [&e](double d) { return log_span_weight(e, d) + std::log(d); };
    const double start = std::max(mode, 1.0 / static_cast<double>(total + 1));
    double upper = 1.0;
    if (start < 1.0) {
        double peak = proxy(start);
        const double step = start;
        for (int j = 0; j < 200; ++j) {
            const double d = start + step * std::ldexp(1.0, j);
            if (d >= 1.0) break;
            const double v = proxy(d);
            peak = std::max(peak, v);
            if (v < peak - 50.0) {
                upper = d;
                break;
            }
        }
    }

    auto integrand = [&](double d) {
        if (d <= 0.0 || d >= 1.0) return 0.0;
        const double lw = log_span_weight(e, d);
        if (lw < -745.0) return 0.0;
        return std::exp(lw) * kernel_sq_integral(kernel, 0.5 * d, d, inner_tol);
    };

    double value = 0.0;
    if (mode > 0.0 && mode < upper) {
        value += integrate(integrand, 0.0, mode, outer_options(0.5 * abs_tol));
        value += integrate(integrand, mode, upper, outer_options(0.5 * abs_tol));
    } else {
        value += integrate(integrand, 0.0, upper, outer_options(abs_tol));
    }
    return value;
}

}  // namespace

double spacing_density(std::uint64_t n, double delta) {
    if (n < 1) throw PreconditionError("spacing_density: N must be >= 1");
    if (delta < 0.0 || delta > 1.0) return 0.0;
    if (n == 1) return 1.0;
    if (delta == 1.0) return 0.0;
    const double nd = static_cast<double>(n);
    return std::exp(std::log(nd) + (nd - 1.0) * std::log1p(-delta));
}

double e1_bound(const Kernel& kernel, double noise_variance, std::uint64_t n, double quad_tol) {
    require_isotropic(kernel, "e1_bound");
    require_noise(noise_variance, "e1_bound");
    if (n < 1) throw PreconditionError("e1_bound: N must be >= 1");
    const double k0 = kernel.eval_iso(0.0);
    const double a = k0 + noise_variance;
    const double nd = static_cast<double>(n);
    const double outer_tol = quad_tol / (4.0 * (nd + 1.0));
    const double inner_tol = 0.5 * outer_tol;
    const double upper = spacing_support(n);

    const double full = integrate(
        [&](double d) { return spacing_density(n, d) * kernel_sq_integral(kernel, 0.0, d, inner_tol); },
        0.0, upper, outer_options(outer_tol));
    double half = 0.0;
    if (n > 1) {
        half = integrate(
            [&](double d) {
                return spacing_density(n, d) * kernel_sq_integral(kernel, 0.0, 0.5 * d, inner_tol);
            },
            0.0, upper, outer_options(outer_tol));
    }
    return a - 2.0 * full / a - 2.0 * (nd - 1.0) * half / a;
}

double e2_bound(const Kernel& kernel, double noise_variance, std::uint64_t n, double quad_tol) {
    require_isotropic(kernel, "e2_bound");
    require_noise(noise_variance, "e2_bound");
    if (n < 1) throw PreconditionError("e2_bound: N must be >= 1");
    const double k0 = kernel.eval_iso(0.0);
    const double a = k0 + noise_variance;
    const double nd = static_cast<double>(n);
    const double outer_tol = quad_tol / (4.0 * (nd + 1.0));
    const double inner_tol = 0.25 * outer_tol;
    const double upper = spacing_support(n);

    const double boundary = integrate(
        [&](double d) { return spacing_density(n, d) * kernel_sq_integral(kernel, 0.0, d, inner_tol); },
        0.0, upper, outer_options(outer_tol));
    double inner = 0.0;
    if (n > 1) {
        inner = integrate(
            [&](double d) {
                const double kd = kernel.eval_iso(d);
                const double gap = a * kernel_sq_integral(kernel, 0.0, d, inner_tol) -
                                   kd * kernel_convolution(kernel, d, inner_tol);
                return spacing_density(n, d) * gap / (a * a - kd * kd);
            },
            0.0, upper, outer_options(outer_tol));
    }
    return a - 2.0 * (nd - 1.0) * inner - 2.0 * boundary / a;
}

SegmentPlan segment_plan(std::uint64_t total, std::uint64_t n) {
    if (n < 2) throw PreconditionError("segment_plan: n must be >= 2");
    SegmentPlan p;
    p.total = static_cast<std::int64_t>(total);
    p.n = static_cast<std::int64_t>(n);
    const std::int64_t num = p.total - 2 * p.n + 1;
    const std::int64_t den = p.n - 1;
    // Ceiling division that is exact for negative numerators.
    p.m = num >= 0 ? (num + den - 1) / den : -((-num) / den);
    const std::int64_t rest = p.total - p.m * (p.n - 1) + 1;
    p.n_left = rest >= 0 ? rest / 2 : -((-rest + 1) / 2);
    p.n_right = rest - p.n_left;
    p.valid = p.m >= 1 && p.n_left >= 1;
    return p;
}

double i_n_integral(const Kernel& kernel, std::uint64_t total, std::uint64_t n, double delta,
                    double quad_tol, SpanWeight weight) {
    require_isotropic(kernel, "i_n_integral");
    check_span_range(total, n);
    if (!(delta > 0.0) || !(delta < 1.0)) {
        throw PreconditionError("i_n_integral: delta must lie in (0, 1)");
    }
    const SpanExponents e = span_exponents(total, n, weight);
    const double lw = log_span_weight(e, delta);
    if (lw < -745.0) return 0.0;
    const double w = std::exp(lw);
    return w * kernel_sq_integral(kernel, 0.5 * delta, delta, quad_tol / std::max(1.0, w));
}

double e_rho_bound(const Kernel& kernel, double noise_variance, std::uint64_t total,
                   std::uint64_t n, double quad_tol, SpanWeight weight) {
    require_isotropic(kernel, "e_rho_bound");
    require_noise(noise_variance, "e_rho_bound");
    const SegmentPlan plan = segment_plan(total, n);
    const auto left = static_cast<std::uint64_t>(std::max<std::int64_t>(plan.n_left, 0));
    const auto right = static_cast<std::uint64_t>(std::max<std::int64_t>(plan.n_right, 0));
    const bool in_range = n + 1 <= total && left + 2 <= total && right + 2 <= total;
    if (!plan.valid || !in_range) {
        std::ostringstream os;
        os << "e_rho_bound: no valid segment plan for N=" << total << ", n=" << n
           << " (m=" << plan.m << ", n_l=" << plan.n_left << "); use e1_bound instead";
        throw PreconditionError(os.str());
    }
    const double k0 = kernel.eval_iso(0.0);
    const double s2 = noise_variance;
    const double tol = quad_tol / (16.0 * (static_cast<double>(total) + 1.0));

    const double inner = span_expectation(kernel, total, n, tol, weight);
    const double left_term = span_expectation(kernel, total, left + 1, tol, weight);
    const double right_term =
        right == left ? left_term : span_expectation(kernel, total, right + 1, tol, weight);

    return k0 + s2 - 2.0 * static_cast<double>(plan.m) * inner / (k0 + s2 / static_cast<double>(n)) -
           2.0 * left_term / (k0 + s2 / static_cast<double>(left)) -
           2.0 * right_term / (k0 + s2 / static_cast<double>(right));
}

double section_bound(const Kernel& kernel, double noise_variance, std::uint64_t total,
                     std::uint64_t n, double quad_tol, SpanWeight weight) {
    if (n >= 2 && total >= 2) {
        const SegmentPlan plan = segment_plan(total, n);
        const bool in_range = n + 1 <= total &&
                              static_cast<std::uint64_t>(plan.n_left) + 2 <= total &&
                              static_cast<std::uint64_t>(plan.n_right) + 2 <= total;
        if (plan.valid && in_range) {
            return e_rho_bound(kernel, noise_variance, total, n, quad_tol, weight);
        }
    }
    return e1_bound(kernel, noise_variance, total, quad_tol);
}

std::uint64_t greedy_select_n(const Kernel& kernel, double noise_variance, std::uint64_t total,
                              std::uint64_t n_prev, double quad_tol, SpanWeight weight) {
    if (n_prev < 1) throw PreconditionError("greedy_select_n: n_prev must be >= 1");
    if (total <= 1) return 1;
    std::uint64_t n = n_prev;
    double current = section_bound(kernel, noise_variance, total, n, quad_tol, weight);
    for (;;) {
        const std::uint64_t next = n + 1;
        const SegmentPlan plan = segment_plan(total, next);
        if (!plan.valid) break;
        const double candidate = section_bound(kernel, noise_variance, total, next, quad_tol, weight);
        if (!(candidate < current)) break;
        n = next;
        current = candidate;
    }
    return n;
}

std::vector<MonteCarloPoint> monte_carlo_curve(const Kernel& kernel, double noise_variance,
                                               const std::vector<std::uint64_t>& n_list,
                                               int test_points, int datasets, std::uint64_t seed) {
    require_isotropic(kernel, "monte_carlo_curve");
    require_noise(noise_variance, "monte_carlo_curve");
    if (test_points < 1 || datasets < 1) {
        throw PreconditionError("monte_carlo_curve: test point and dataset counts must be >= 1");
    }
    const std::uint64_t n_max = n_list.empty() ? 0 : *std::max_element(n_list.begin(), n_list.end());
    const Eigen::Index big = static_cast<Eigen::Index>(n_max);
    const double k0 = kernel.eval_iso(0.0);

    // per_dataset(i, d): mean over test points of sigma^2_{n_list[i]}
    Eigen::MatrixXd per_dataset(static_cast<Eigen::Index>(n_list.size()), datasets);
    for (int d = 0; d < datasets; ++d) {
        const std::uint64_t dseed = derive_seed(seed, {0x6d63ULL, static_cast<std::uint64_t>(d)});
        Rng train_rng(derive_seed(dseed, {1}));
        Rng test_rng(derive_seed(dseed, {2}));
        Eigen::VectorXd x(big);
        for (Eigen::Index i = 0; i < big; ++i) x(i) = train_rng.uniform01();
        Eigen::VectorXd t(test_points);
        for (int j = 0; j < test_points; ++j) t(j) = test_rng.uniform01();

        Eigen::MatrixXd cumulative;  // (N+1) x T prefix variances
        if (big > 0) {
            Eigen::MatrixXd a(big, big);
            for (Eigen::Index c = 0; c < big; ++c) {
                for (Eigen::Index r = c; r < big; ++r) {
                    a(r, c) = kernel.eval_iso(std::abs(x(r) - x(c)));
                    a(c, r) = a(r, c);
                }
            }
            a.diagonal().array() += noise_variance;
            Eigen::LLT<Eigen::MatrixXd> llt(a);
            if (llt.info() != Eigen::Success) {
                std::ostringstream os;
                os << "monte_carlo_curve: factorization failed for dataset " << d << " (seed "
                   << dseed << ", N=" << big << ")";
                throw NumericError(os.str());
            }
            Eigen::MatrixXd v(big, test_points);
            for (int j = 0; j < test_points; ++j) {
                for (Eigen::Index i = 0; i < big; ++i) v(i, j) = kernel.eval_iso(std::abs(t(j) - x(i)));
            }
            llt.matrixL().solveInPlace(v);
            cumulative.resize(big + 1, test_points);
            for (int j = 0; j < test_points; ++j) {
                double explained = 0.0;
                cumulative(0, j) = k0;
                for (Eigen::Index i = 0; i < big; ++i) {
                    explained += v(i, j) * v(i, j);
                    cumulative(i + 1, j) = std::max(0.0, k0 - explained);
                }
            }
        }
        for (std::size_t i = 0; i < n_list.size(); ++i) {
            if (n_list[i] == 0) {
                per_dataset(static_cast<Eigen::Index>(i), d) = k0;
                continue;
            }
            double sum = 0.0;
            for (int j = 0; j < test_points; ++j) {
                sum += cumulative(static_cast<Eigen::Index>(n_list[i]), j);
            }
            per_dataset(static_cast<Eigen::Index>(i), d) = sum / test_points;
        }
    }

    std::vector<MonteCarloPoint> out;
    out.reserve(n_list.size());
    for (std::size_t i = 0; i < n_list.size(); ++i) {
        MonteCarloPoint p;
        p.n = n_list[i];
        if (n_list[i] == 0) {
            p.mean = k0 + noise_variance;
            out.push_back(p);
            continue;
        }
        const auto row = per_dataset.row(static_cast<Eigen::Index>(i));
        double mean = 0.0;
        for (int d = 0; d < datasets; ++d) mean += row(d);
        mean /= datasets;
        double ss = 0.0;
        for (int d = 0; d < datasets; ++d) ss += (row(d) - mean) * (row(d) - mean);
        p.mean = mean + noise_variance;
        p.standard_error = datasets > 1 ? std::sqrt(ss / (datasets - 1) / datasets) : 0.0;
        out.push_back(p);
    }
    return out;
}

LearningCurveTable learning_curve_table(const Kernel& kernel, double noise_variance,
                                        const std::vector<std::uint64_t>& n_grid,
                                        const LearningCurveOptions& options) {
    require_isotropic(kernel, "learning_curve_table");
    LearningCurveTable table;
    table.kernel = kernel.describe();
    table.noise_variance = noise_variance;
    table.seed = options.seed;
    table.test_points = options.test_points;
    table.datasets = options.datasets;

    std::vector<std::uint64_t> mc_grid;
    for (std::uint64_t n : n_grid) {
        if (n <= options.mc_max_n) mc_grid.push_back(n);
    }
    const auto mc = monte_carlo_curve(kernel, noise_variance, mc_grid, options.test_points,
                                      options.datasets, options.seed);

    std::uint64_t n_prev = 1;
    std::size_t mc_index = 0;
    for (std::uint64_t n : n_grid) {
        if (n < 1) throw PreconditionError("learning_curve_table: grid entries must be >= 1");
        LearningCurveRow row;
        row.n = n;
        if (mc_index < mc.size() && mc[mc_index].n == n) {
            row.e_num = mc[mc_index].mean;
            row.e_num_se = mc[mc_index].standard_error;
            ++mc_index;
        } else {
            row.e_num = std::numeric_limits<double>::quiet_NaN();
            row.e_num_se = std::numeric_limits<double>::quiet_NaN();
        }
        row.e1 = e1_bound(kernel, noise_variance, n, options.quad_tol);
        row.e2 = e2_bound(kernel, noise_variance, n, options.quad_tol);
        row.n_selected = greedy_select_n(kernel, noise_variance, n, n_prev, options.quad_tol,
                                         options.weight);
        row.e_rho = row.n_selected == 1
                        ? row.e1
                        : section_bound(kernel, noise_variance, n, row.n_selected,
                                        options.quad_tol, options.weight);
        n_prev = row.n_selected;
        table.rows.push_back(row);
    }
    return table;
}

}  // namespace gpbounds
