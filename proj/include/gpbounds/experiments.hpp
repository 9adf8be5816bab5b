#pragma once

#include <string>
#include <vector>

#include "gpbounds/config.hpp"
#include "gpbounds/convergence.hpp"

namespace gpbounds {

/// Header plus numeric rows; written with 17 significant digits.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    std::string to_csv() const;
};

/// idx, sig_m, sig_bm, sig_bm_gen: dataset averages of the exact variance at
/// the test point, the isotropic-kernel bound and the Lipschitz bound. sig_m is
/// NaN above exact_max_n, sig_bm is NaN for kernels that are not isotropic and
/// decreasing.
CsvTable run_variance_experiment(const ExperimentConfig& config);

/// idx, y_exact, y_bound, yE1, yE2. y_exact is NaN above mc_max_n. With
/// subtract_noise the noise variance is removed from every column.
CsvTable run_learning_curve(const ExperimentConfig& config);

struct ConvergenceReport {
    ConvergenceVerdict theorem;
    ConvergenceVerdict corollary;
    CsvTable growth;  // N, mean_count, min_count, expected_count

    std::string to_text() const;
};

ConvergenceReport run_convergence_check(const ExperimentConfig& config);

/// The sampling density described by a variance or convergence config.
Density config_density(const ExperimentConfig& config);

/// gnuplot script drawing the CSV the config produces (log-log axes).
std::string plot_script(const ExperimentConfig& config, const std::string& csv_path);

/// Writes `content` to `path`, throwing ConfigError if the file cannot be opened.
void write_text_file(const std::string& path, const std::string& content);

}  // namespace gpbounds
