// gpbounds: run variance, learning-curve and ball-growth experiments from
// presets or flat config files and write CSV.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "gpbounds/config.hpp"
#include "gpbounds/errors.hpp"
#include "gpbounds/experiments.hpp"

namespace {

struct CommonFlags {
    std::string config_path;
    std::string preset_name;
    std::string out;
    std::optional<std::uint64_t> seed;
    bool subtract_noise = false;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--config", f.config_path, "flat key = value config file");
    cmd->add_option("--preset", f.preset_name, "start from a shipped preset (see `presets list`)");
    cmd->add_option("--seed", f.seed, "master seed, overrides the config");
    cmd->add_option("--out", f.out, "output CSV path (default: config `output`, else stdout)");
}

gpbounds::ExperimentConfig resolve(const CommonFlags& f, gpbounds::ExperimentKind kind) {
    gpbounds::ExperimentConfig c;
    c.experiment = kind;
    if (!f.preset_name.empty()) c = gpbounds::preset(f.preset_name);
    if (!f.config_path.empty()) c = gpbounds::load_config(f.config_path, c);
    if (f.seed) c.seed = *f.seed;
    if (f.subtract_noise) c.subtract_noise = true;
    if (!f.out.empty()) c.output = f.out;
    return c;
}

void emit(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
    } else {
        gpbounds::write_text_file(path, text);
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Posterior variance bounds and learning curves for GP regression"};
    app.require_subcommand(1);

    CommonFlags variance_flags, curve_flags, conv_flags, plot_flags;
    auto* variance = app.add_subcommand("variance", "exact posterior variance against its bounds");
    add_common(variance, variance_flags);
    auto* curve = app.add_subcommand("learning-curve", "average learning curve and its bounds");
    add_common(curve, curve_flags);
    curve->add_flag("--subtract-noise", curve_flags.subtract_noise, "subtract the noise variance from all columns");
    auto* conv = app.add_subcommand("convergence", "ball-growth condition and empirical ball counts");
    add_common(conv, conv_flags);
    auto* presets = app.add_subcommand("presets", "shipped experiment presets");
    presets->require_subcommand(1);
    auto* presets_list = presets->add_subcommand("list", "print preset names");
    bool show_config = false;
    presets_list->add_flag("--show", show_config, "print each preset's full config");
    auto* plot = app.add_subcommand("plot-script", "gnuplot script for an experiment's CSV");
    add_common(plot, plot_flags);
    std::string csv_path;
    plot->add_option("--csv", csv_path, "CSV the script reads (default: the config output path)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (variance->parsed()) {
            auto c = resolve(variance_flags, gpbounds::ExperimentKind::variance_uniform);
            emit(c.output, gpbounds::run_variance_experiment(c).to_csv());
        } else if (curve->parsed()) {
            auto c = resolve(curve_flags, gpbounds::ExperimentKind::learning_curve);
            emit(c.output, gpbounds::run_learning_curve(c).to_csv());
        } else if (conv->parsed()) {
            auto c = resolve(conv_flags, gpbounds::ExperimentKind::convergence_check);
            const auto report = gpbounds::run_convergence_check(c);
            if (c.output.empty() || c.output == "-") {
                std::cout << report.to_text() << "\n" << report.growth.to_csv();
            } else {
                emit(c.output, report.growth.to_csv());
                emit(c.output + ".report", report.to_text());
                std::cout << report.to_text();
            }
        } else if (presets_list->parsed()) {
            for (const auto& p : gpbounds::preset_list()) {
                if (show_config) {
                    std::cout << "# " << p.name << ": " << p.description << "\n"
                              << gpbounds::to_text(gpbounds::preset(p.name)) << "\n";
                } else {
                    std::cout << p.name << "\t" << p.description << "\n";
                }
            }
        } else if (plot->parsed()) {
            auto c = resolve(plot_flags, gpbounds::ExperimentKind::variance_uniform);
            const std::string data = !csv_path.empty() ? csv_path : (c.output.empty() ? c.name + ".csv" : c.output);
            std::cout << gpbounds::plot_script(c, data);
        }
    } catch (const gpbounds::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const gpbounds::NumericError& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return 3;
    } catch (const gpbounds::PreconditionError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
