#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "gpbounds/kernels.hpp"
#include "gpbounds/learning_curves.hpp"
#include "gpbounds/variance_bounds.hpp"

namespace gpbounds {

enum class ExperimentKind { variance_uniform, variance_vanishing, learning_curve, convergence_check };

std::string_view experiment_kind_name(ExperimentKind kind);
ExperimentKind parse_experiment_kind(std::string_view name);

/// Everything one experiment run needs. Flat `key = value` text, one entry
/// per line, `#` starts a comment. Keys:
///
///   experiment        variance-uniform | variance-vanishing | learning-curve | convergence-check
///   kernel            kernel kind name
///   lengthscale, signal_variance, alpha, period, offset, degree,
///   bias_variance, weight_variance
///   noise_variance
///   domain_lo, domain_hi       sampling interval (vanishing: centred on test_point)
///   test_point
///   density           uniform | vanishing (convergence checks)
///   schedule_c, schedule_alpha rho(N) = c N^-alpha
///   n_min, n_max, points_per_decade
///   n_grid            explicit comma-separated list, overrides the log grid
///   exact_max_n       largest N with an exact GP solve (variance experiments)
///   mc_max_n          largest N with a Monte Carlo estimate (learning curves)
///   datasets, test_points, trials
///   seed, output
///   theorem_c, theorem_eps     ball-growth constants; eps <= 0 searches for a witness
///   quad_tol
///   theorem_form      proof | as-printed
///   span_weight       order-statistics | as-printed
///   subtract_noise    true | false
struct ExperimentConfig {
    std::string name = "custom";
    ExperimentKind experiment = ExperimentKind::variance_uniform;
    KernelSpec kernel;
    double noise_variance = 0.1;
    double domain_lo = 0.5;
    double domain_hi = 1.5;
    double test_point = 1.0;
    std::string density = "uniform";
    RadiusSchedule schedule;
    std::uint64_t n_min = 1;
    std::uint64_t n_max = 1000;
    int points_per_decade = 25;
    std::vector<std::uint64_t> n_grid;  // explicit grid; empty means log-spaced
    std::uint64_t exact_max_n = 2000;
    std::uint64_t mc_max_n = 2000;
    int datasets = 20;
    int test_points = 200;
    int trials = 50;
    std::uint64_t seed = 1;
    std::string output;
    double theorem_c = 0.5;
    double theorem_eps = 0.0;
    double quad_tol = 1e-9;
    LipschitzBoundForm theorem_form = LipschitzBoundForm::proof;
    SpanWeight span_weight = SpanWeight::order_statistics;
    bool subtract_noise = false;

    /// Throws ConfigError naming the offending field.
    void validate() const;
    /// The N values to run: n_grid if given, else the log-spaced grid.
    std::vector<std::uint64_t> grid() const;
};

/// Integers spaced evenly in log10 between lo and hi (both included), rounded
/// and deduplicated.
std::vector<std::uint64_t> log_grid(std::uint64_t lo, std::uint64_t hi, int points_per_decade);

/// Applies `key = value` lines onto `base`. Unknown keys and malformed values
/// throw ConfigError with the line number.
ExperimentConfig parse_config(std::istream& in, ExperimentConfig base = {});
ExperimentConfig load_config(const std::string& path, ExperimentConfig base = {});

/// Canonical text form; parse_config(to_text(c)) reproduces c.
std::string to_text(const ExperimentConfig& config);

struct PresetInfo {
    std::string name;
    std::string description;
};

std::vector<PresetInfo> preset_list();
/// Throws ConfigError for unknown names.
ExperimentConfig preset(std::string_view name);

}  // namespace gpbounds
