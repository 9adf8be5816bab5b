#include "gpbounds/experiments.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "gpbounds/errors.hpp"
#include "gpbounds/gp_core.hpp"
#include "gpbounds/learning_curves.hpp"
#include "gpbounds/random.hpp"
#include "gpbounds/variance_bounds.hpp"

namespace gpbounds {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr std::uint64_t kVarianceStream = 0x7661726961ULL;

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void require_kind(const ExperimentConfig& c, bool ok, const char* what) {
    if (!ok) {
        throw ConfigError("experiment: '" + std::string(experiment_kind_name(c.experiment)) +
                          "' cannot run as " + what);
    }
}

std::string verdict_text(const std::string& prefix, const ConvergenceVerdict& v) {
    std::ostringstream os;
    os << prefix << ".satisfied = " << (v.satisfied ? "true" : "false") << "\n";
    if (v.c) os << prefix << ".c = " << fmt(*v.c) << "\n";
    if (v.epsilon) os << prefix << ".epsilon = " << fmt(*v.epsilon) << "\n";
    if (v.first_failing_n) os << prefix << ".first_failing_n = " << *v.first_failing_n << "\n";
    os << prefix << ".radius_nonincreasing = " << (v.radius_nonincreasing ? "true" : "false") << "\n";
    os << prefix << ".radius_vanishes = " << (v.radius_vanishes ? "true" : "false") << "\n";
    os << prefix << ".reason = " << v.reason << "\n";
    return os.str();
}

}  // namespace

std::string CsvTable::to_csv() const {
    std::string out;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i) out += ',';
        out += header[i];
    }
    out += '\n';
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            out += fmt(row[i]);
        }
        out += '\n';
    }
    return out;
}

std::string ConvergenceReport::to_text() const {
    return verdict_text("theorem", theorem) + verdict_text("corollary", corollary);
}

Density config_density(const ExperimentConfig& c) {
    const bool vanishing = c.experiment == ExperimentKind::variance_vanishing ||
                           (c.experiment == ExperimentKind::convergence_check && c.density == "vanishing");
    if (vanishing) return Density::vanishing(c.test_point, 0.5 * (c.domain_hi - c.domain_lo));
    return Density::uniform(c.domain_lo, c.domain_hi);
}

CsvTable run_variance_experiment(const ExperimentConfig& config) {
    require_kind(config,
                 config.experiment == ExperimentKind::variance_uniform ||
                     config.experiment == ExperimentKind::variance_vanishing,
                 "a variance experiment");
    config.validate();
    const Kernel kernel(config.kernel);
    const Density density = config_density(config);
    const std::vector<std::uint64_t> grid = config.grid();
    const std::uint64_t n_max = grid.back();
    const std::uint64_t n_exact = std::min(n_max, config.exact_max_n);
    const auto big = static_cast<Eigen::Index>(n_max);

    const Box box = Box::interval(config.domain_lo, config.domain_hi);
    const double lipschitz = lipschitz_constant(kernel, box).value;
    Point x(1);
    x(0) = config.test_point;
    const bool isotropic = kernel.isotropic() && kernel.decreasing();
    const double kxx = kernel.prior_variance(as_span(x));

    std::vector<double> radius(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        radius[i] = radius_at(config.schedule, grid[i], kernel, x, lipschitz);
    }

    std::vector<double> sum_exact(grid.size(), 0.0);
    std::vector<double> sum_iso(grid.size(), 0.0);
    std::vector<double> sum_gen(grid.size(), 0.0);
    for (int d = 0; d < config.datasets; ++d) {
        const std::uint64_t dseed = derive_seed(config.seed, {kVarianceStream, static_cast<std::uint64_t>(d)});
        Rng rng(dseed);
        Eigen::MatrixXd inputs(1, big);
        for (Eigen::Index i = 0; i < big; ++i) inputs(0, i) = density.sample(rng);

        Eigen::VectorXd prefix;
        if (n_exact > 0) {
            TrainingSet train;
            train.inputs = inputs.leftCols(static_cast<Eigen::Index>(n_exact));
            train.noise_variance = config.noise_variance;
            try {
                prefix = FactoredPosterior(std::move(train), kernel).prefix_variances(x);
            } catch (const NumericError& e) {
                throw NumericError(std::string(e.what()) + " (dataset " + std::to_string(d) + ", seed " +
                                   std::to_string(dseed) + ")");
            }
        }
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const std::uint64_t n = grid[i];
            if (n <= n_exact) sum_exact[i] += prefix(static_cast<Eigen::Index>(n));
            const std::size_t count =
                ball_count_prefix(inputs, static_cast<Eigen::Index>(n), x, radius[i]);
            sum_gen[i] += lipschitz_bound(kernel, lipschitz, x, count, radius[i], config.noise_variance,
                                          config.theorem_form);
            if (isotropic) {
                sum_iso[i] += count == 0 ? kxx
                                         : isotropic_bound(kernel, count, radius[i], config.noise_variance);
            }
        }
    }

    CsvTable table;
    table.header = {"idx", "sig_m", "sig_bm", "sig_bm_gen"};
    const double m = config.datasets;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        table.rows.push_back({static_cast<double>(grid[i]), grid[i] <= n_exact ? sum_exact[i] / m : kNaN,
                              isotropic ? sum_iso[i] / m : kNaN, sum_gen[i] / m});
    }
    return table;
}

CsvTable run_learning_curve(const ExperimentConfig& config) {
    require_kind(config, config.experiment == ExperimentKind::learning_curve, "a learning curve");
    config.validate();
    const Kernel kernel(config.kernel);
    LearningCurveOptions options;
    options.quad_tol = config.quad_tol;
    options.weight = config.span_weight;
    options.test_points = config.test_points;
    options.datasets = config.datasets;
    options.mc_max_n = config.mc_max_n;
    options.seed = config.seed;
    const LearningCurveTable lc = learning_curve_table(kernel, config.noise_variance, config.grid(), options);

    const double shift = config.subtract_noise ? config.noise_variance : 0.0;
    CsvTable table;
    table.header = {"idx", "y_exact", "y_bound", "yE1", "yE2"};
    for (const auto& r : lc.rows) {
        table.rows.push_back({static_cast<double>(r.n), r.e_num - shift, r.e_rho - shift, r.e1 - shift,
                              r.e2 - shift});
    }
    return table;
}

ConvergenceReport run_convergence_check(const ExperimentConfig& config) {
    require_kind(config, config.experiment == ExperimentKind::convergence_check, "a convergence check");
    config.validate();
    const Density density = config_density(config);
    ConvergenceReport report;
    report.theorem = config.theorem_eps > 0.0
                         ? check_theorem32(density, config.test_point, config.schedule, config.theorem_c,
                                           config.theorem_eps, config.n_min, config.n_max)
                         : search_theorem32_witness(density, config.test_point, config.schedule,
                                                    config.n_min, config.n_max);
    report.corollary = check_corollary33(1, config.schedule);
    if (density.pdf(config.test_point) <= 0.0) {
        report.corollary.satisfied = false;
        report.corollary.reason = "density vanishes at the test point; " + report.corollary.reason;
    }

    const auto rows = empirical_ball_growth(density, config.test_point, config.schedule, config.grid(),
                                            config.trials, config.seed);
    report.growth.header = {"N", "mean_count", "min_count", "expected_count"};
    for (const auto& r : rows) {
        report.growth.rows.push_back({static_cast<double>(r.n), r.mean_count, static_cast<double>(r.min_count),
                                      r.expected_count});
    }
    return report;
}

std::string plot_script(const ExperimentConfig& config, const std::string& csv_path) {
    std::ostringstream os;
    os << "# gnuplot script for " << config.name << "\n";
    os << "set datafile separator ','\n";
    os << "set key autotitle columnhead\n";
    os << "set logscale xy\n";
    os << "set xlabel 'N'\n";
    switch (config.experiment) {
        case ExperimentKind::variance_uniform:
        case ExperimentKind::variance_vanishing:
            os << "set ylabel 'posterior variance at x = " << fmt(config.test_point) << "'\n";
            os << "plot '" << csv_path << "' using 1:2 with lines, \\\n";
            os << "     '' using 1:3 with lines, \\\n";
            os << "     '' using 1:4 with lines\n";
            break;
        case ExperimentKind::learning_curve:
            os << "set ylabel 'average learning curve" << (config.subtract_noise ? " minus noise" : "") << "'\n";
            os << "plot '" << csv_path << "' using 1:2 with lines, \\\n";
            os << "     '' using 1:3 with lines, \\\n";
            os << "     '' using 1:4 with lines, \\\n";
            os << "     '' using 1:5 with lines\n";
            break;
        case ExperimentKind::convergence_check:
            os << "set ylabel 'points in the information ball'\n";
            os << "plot '" << csv_path << "' using 1:2 with lines, \\\n";
            os << "     '' using 1:3 with lines, \\\n";
            os << "     '' using 1:4 with lines\n";
            break;
    }
    return os.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("output: cannot open '" + path + "' for writing");
    out << content;
    if (!out) throw ConfigError("output: write to '" + path + "' failed");
}

}  // namespace gpbounds
