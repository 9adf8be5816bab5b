#include "gpbounds/config.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>

#include "gpbounds/errors.hpp"

namespace gpbounds {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double to_double(const std::string& key, const std::string& value) {
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(value.c_str(), &end);
    if (value.empty() || end != value.c_str() + value.size() || errno == ERANGE || !std::isfinite(v)) {
        throw ConfigError(key + ": expected a finite number, got '" + value + "'");
    }
    return v;
}

std::uint64_t to_u64(const std::string& key, const std::string& value) {
    errno = 0;
    char* end = nullptr;
    if (value.empty() || value[0] == '-') {
        throw ConfigError(key + ": expected a non-negative integer, got '" + value + "'");
    }
    const unsigned long long v = std::strtoull(value.c_str(), &end, 10);
    if (end != value.c_str() + value.size() || errno == ERANGE) {
        throw ConfigError(key + ": expected a non-negative integer, got '" + value + "'");
    }
    return static_cast<std::uint64_t>(v);
}

int to_int(const std::string& key, const std::string& value) {
    const std::uint64_t v = to_u64(key, value);
    if (v > 1000000000ULL) throw ConfigError(key + ": value too large");
    return static_cast<int>(v);
}

bool to_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
    if (value == "false" || value == "0" || value == "no" || value == "off") return false;
    throw ConfigError(key + ": expected true or false, got '" + value + "'");
}

std::vector<std::uint64_t> to_grid(const std::string& key, const std::string& value) {
    std::vector<std::uint64_t> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(to_u64(key, trim(item)));
    return out;
}

using Setter = std::function<void(ExperimentConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = [] {
        std::map<std::string, Setter> t;
        auto extra = [](const char* name) {
            return [name](ExperimentConfig& c, const std::string& k, const std::string& v) {
                c.kernel.extra[name] = to_double(k, v);
            };
        };
        t["name"] = [](ExperimentConfig& c, const std::string&, const std::string& v) { c.name = v; };
        t["experiment"] = [](ExperimentConfig& c, const std::string&, const std::string& v) {
            c.experiment = parse_experiment_kind(v);
        };
        t["kernel"] = [](ExperimentConfig& c, const std::string&, const std::string& v) {
            c.kernel.kind = parse_kernel_kind(v);
        };
        t["lengthscale"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
            c.kernel.lengthscale = to_double(k, v);
        };
        t["signal_variance"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
            c.kernel.signal_variance = to_double(k, v);
        };
        for (const char* name : {"alpha", "period", "offset", "degree", "bias_variance", "weight_variance"}) {
            t[name] = extra(name);
        }
        t["noise_variance"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
            c.noise_variance = to_double(k, v);
        };
        t["domain_lo"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
            c.domain_lo = to_double(k, v);
        };
        t["domain_hi"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
            c.domain_hi = to_double(k, v);
        };
        t["test_point"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
            c.test_point = to_double(k, v);
        };
        t["density"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
            if (v != "uniform" && v != "vanishing") {
                throw ConfigError(k + ": expected uniform or vanishing, got '" + v + "'");
            }
            c.density = v;
        };
        t["schedule_c"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
            c.schedule.coefficient = to_double(k, v);
        };
        t["schedule_alpha"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
            c.schedule.exponent = to_double(k, v);
        };
        t["n_min"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.n_min = to_u64(k, v); };
        t["n_max"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.n_max = to_u64(k, v); };
        t["points_per_decade"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
            c.points_per_decade = to_int(k, v);
        };
        t["n_grid"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
            c.n_grid = to_grid(k, v);
        };
        t["exact_max_n"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
            c.exact_max_n = to_u64(k, v);
        };
        t["mc_max_n"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
            c.mc_max_n = to_u64(k, v);
        };
        t["datasets"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
            c.datasets = to_int(k, v);
        };
        t["test_points"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
            c.test_points = to_int(k, v);
        };
        t["trials"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.trials = to_int(k, v); };
        t["seed"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.seed = to_u64(k, v); };
        t["output"] = [](ExperimentConfig& c, const std::string&, const std::string& v) { c.output = v; };
        t["theorem_c"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
            c.theorem_c = to_double(k, v);
        };
        t["theorem_eps"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
            c.theorem_eps = to_double(k, v);
        };
        t["quad_tol"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
            c.quad_tol = to_double(k, v);
        };
        t["theorem_form"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
            if (v == "proof") c.theorem_form = LipschitzBoundForm::proof;
            else if (v == "as-printed") c.theorem_form = LipschitzBoundForm::as_printed;
            else throw ConfigError(k + ": expected proof or as-printed, got '" + v + "'");
        };
        t["span_weight"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
            if (v == "order-statistics") c.span_weight = SpanWeight::order_statistics;
            else if (v == "as-printed") c.span_weight = SpanWeight::as_printed;
            else throw ConfigError(k + ": expected order-statistics or as-printed, got '" + v + "'");
        };
        t["subtract_noise"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
            c.subtract_noise = to_bool(k, v);
        };
        return t;
    }();
    return table;
}

void need(bool ok, const std::string& field, const std::string& what) {
    if (!ok) throw ConfigError(field + ": " + what);
}

}  // namespace

std::string_view experiment_kind_name(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::variance_uniform: return "variance-uniform";
        case ExperimentKind::variance_vanishing: return "variance-vanishing";
        case ExperimentKind::learning_curve: return "learning-curve";
        case ExperimentKind::convergence_check: return "convergence-check";
    }
    return "unknown";
}

ExperimentKind parse_experiment_kind(std::string_view name) {
    for (auto k : {ExperimentKind::variance_uniform, ExperimentKind::variance_vanishing,
                   ExperimentKind::learning_curve, ExperimentKind::convergence_check}) {
        if (experiment_kind_name(k) == name) return k;
    }
    throw ConfigError("experiment: unknown kind '" + std::string(name) + "'");
}

void ExperimentConfig::validate() const {
    try {
        Kernel k(kernel);
        (void)k;
    } catch (const ConfigError& e) {
        throw ConfigError(std::string("kernel: ") + e.what());
    }
    need(noise_variance > 0.0, "noise_variance", "must be positive");
    need(domain_lo < domain_hi, "domain_lo", "must be below domain_hi");
    need(schedule.coefficient > 0.0, "schedule_c", "must be positive");
    need(schedule.exponent >= 0.0, "schedule_alpha", "must be non-negative");
    need(n_min >= 1, "n_min", "must be at least 1");
    need(n_max >= n_min, "n_max", "must be at least n_min");
    need(points_per_decade >= 1, "points_per_decade", "must be at least 1");
    for (std::uint64_t n : n_grid) need(n >= 1, "n_grid", "entries must be at least 1");
    need(std::is_sorted(n_grid.begin(), n_grid.end()) &&
             std::adjacent_find(n_grid.begin(), n_grid.end()) == n_grid.end(),
         "n_grid", "entries must be strictly increasing");
    need(datasets >= 1, "datasets", "must be at least 1");
    need(test_points >= 1, "test_points", "must be at least 1");
    need(trials >= 1, "trials", "must be at least 1");
    need(quad_tol > 0.0, "quad_tol", "must be positive");

    switch (experiment) {
        case ExperimentKind::variance_uniform:
            need(test_point >= domain_lo && test_point <= domain_hi, "test_point",
                 "must lie inside [domain_lo, domain_hi]");
            break;
        case ExperimentKind::variance_vanishing:
        case ExperimentKind::convergence_check:
            need(test_point >= domain_lo && test_point <= domain_hi, "test_point",
                 "must lie inside [domain_lo, domain_hi]");
            if (experiment == ExperimentKind::variance_vanishing ||
                (experiment == ExperimentKind::convergence_check && density == "vanishing")) {
                need(std::abs(test_point - 0.5 * (domain_lo + domain_hi)) <=
                         1e-12 * std::max(1.0, std::abs(test_point)),
                     "test_point", "must be the midpoint of the domain for a vanishing density");
            }
            need(theorem_c > 0.0, "theorem_c", "must be positive");
            need(theorem_eps < 1.0, "theorem_eps", "must be below 1");
            break;
        case ExperimentKind::learning_curve: {
            Kernel k(kernel);
            need(k.isotropic(), "kernel", "learning curves need an isotropic kernel");
            break;
        }
    }
}

std::vector<std::uint64_t> ExperimentConfig::grid() const {
    if (!n_grid.empty()) return n_grid;
    return log_grid(n_min, n_max, points_per_decade);
}

std::vector<std::uint64_t> log_grid(std::uint64_t lo, std::uint64_t hi, int points_per_decade) {
    if (lo < 1 || hi < lo || points_per_decade < 1) {
        throw ConfigError("n_grid: need 1 <= n_min <= n_max and points_per_decade >= 1");
    }
    const double a = std::log10(static_cast<double>(lo));
    const double b = std::log10(static_cast<double>(hi));
    const auto steps = static_cast<std::uint64_t>(std::ceil((b - a) * points_per_decade - 1e-9));
    std::vector<std::uint64_t> out;
    out.push_back(lo);
    for (std::uint64_t i = 1; i <= steps; ++i) {
        const double e = std::min(b, a + static_cast<double>(i) / points_per_decade);
        const auto n = static_cast<std::uint64_t>(std::llround(std::pow(10.0, e)));
        if (n > out.back() && n <= hi) out.push_back(n);
    }
    if (out.back() != hi) out.push_back(hi);
    return out;
}

ExperimentConfig parse_config(std::istream& in, ExperimentConfig base) {
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string body = trim(line);
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        }
        const std::string key = trim(std::string_view(body).substr(0, eq));
        const std::string value = trim(std::string_view(body).substr(eq + 1));
        const auto it = setters().find(key);
        if (it == setters().end()) {
            throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
        }
        try {
            it->second(base, key, value);
        } catch (const ConfigError& e) {
            throw ConfigError("line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return base;
}

ExperimentConfig load_config(const std::string& path, ExperimentConfig base) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    return parse_config(in, std::move(base));
}

std::string to_text(const ExperimentConfig& c) {
    std::ostringstream os;
    os << "name = " << c.name << "\n";
    os << "experiment = " << experiment_kind_name(c.experiment) << "\n";
    os << "kernel = " << kernel_kind_name(c.kernel.kind) << "\n";
    os << "lengthscale = " << fmt(c.kernel.lengthscale) << "\n";
    os << "signal_variance = " << fmt(c.kernel.signal_variance) << "\n";
    for (const auto& [k, v] : c.kernel.extra) os << k << " = " << fmt(v) << "\n";
    os << "noise_variance = " << fmt(c.noise_variance) << "\n";
    os << "domain_lo = " << fmt(c.domain_lo) << "\n";
    os << "domain_hi = " << fmt(c.domain_hi) << "\n";
    os << "test_point = " << fmt(c.test_point) << "\n";
    os << "density = " << c.density << "\n";
    os << "schedule_c = " << fmt(c.schedule.coefficient) << "\n";
    os << "schedule_alpha = " << fmt(c.schedule.exponent) << "\n";
    os << "n_min = " << c.n_min << "\n";
    os << "n_max = " << c.n_max << "\n";
    os << "points_per_decade = " << c.points_per_decade << "\n";
    if (!c.n_grid.empty()) {
        os << "n_grid = ";
        for (std::size_t i = 0; i < c.n_grid.size(); ++i) os << (i ? "," : "") << c.n_grid[i];
        os << "\n";
    }
    os << "exact_max_n = " << c.exact_max_n << "\n";
    os << "mc_max_n = " << c.mc_max_n << "\n";
    os << "datasets = " << c.datasets << "\n";
    os << "test_points = " << c.test_points << "\n";
    os << "trials = " << c.trials << "\n";
    os << "seed = " << c.seed << "\n";
    if (!c.output.empty()) os << "output = " << c.output << "\n";
    os << "theorem_c = " << fmt(c.theorem_c) << "\n";
    os << "theorem_eps = " << fmt(c.theorem_eps) << "\n";
    os << "quad_tol = " << fmt(c.quad_tol) << "\n";
    os << "theorem_form = " << (c.theorem_form == LipschitzBoundForm::proof ? "proof" : "as-printed") << "\n";
    os << "span_weight = "
       << (c.span_weight == SpanWeight::order_statistics ? "order-statistics" : "as-printed") << "\n";
    os << "subtract_noise = " << (c.subtract_noise ? "true" : "false") << "\n";
    return os.str();
}

namespace {

struct PresetEntry {
    std::string name;
    std::string description;
    std::function<ExperimentConfig()> make;
};

ExperimentConfig variance_preset(const std::string& name, ExperimentKind kind, KernelSpec spec,
                                 double alpha) {
    ExperimentConfig c;
    c.name = name;
    c.experiment = kind;
    c.kernel = std::move(spec);
    c.noise_variance = 0.1;
    c.domain_lo = 0.5;
    c.domain_hi = 1.5;
    c.test_point = 1.0;
    c.schedule = {1.0, alpha};
    c.n_min = 1;
    c.n_max = 1220;
    c.datasets = 20;
    return c;
}

ExperimentConfig curve_preset(const std::string& name, KernelSpec spec) {
    ExperimentConfig c;
    c.name = name;
    c.experiment = ExperimentKind::learning_curve;
    c.kernel = std::move(spec);
    c.noise_variance = 0.05;
    c.domain_lo = 0.0;
    c.domain_hi = 1.0;
    c.n_min = 1;
    c.n_max = 12200;
    c.mc_max_n = 2000;
    c.test_points = 200;
    c.datasets = 20;
    return c;
}

KernelSpec spec_of(KernelKind kind, double lengthscale) {
    KernelSpec s;
    s.kind = kind;
    s.lengthscale = lengthscale;
    s.signal_variance = 1.0;
    return s;
}

const std::vector<PresetEntry>& presets() {
    static const std::vector<PresetEntry> table = [] {
        std::vector<PresetEntry> t;
        const struct {
            const char* tag;
            KernelKind kind;
            double uniform_alpha;
            double vanishing_alpha;
        } kernels[] = {
            {"se", KernelKind::squared_exponential, 1.0 / 3.0, 1.0 / 4.0},
            {"matern", KernelKind::matern12, 1.0 / 2.0, 1.0 / 3.0},
            {"polynomial", KernelKind::polynomial, 1.0 / 2.0, 1.0 / 3.0},
            {"nn", KernelKind::neural_network, 1.0 / 2.0, 1.0 / 3.0},
        };
        for (const auto& k : kernels) {
            const std::string u = std::string("fig2-") + k.tag;
            const std::string v = std::string("fig3-") + k.tag;
            const KernelKind kind = k.kind;
            const double ua = k.uniform_alpha;
            const double va = k.vanishing_alpha;
            t.push_back({u, "exact variance and bounds at x=1, uniform inputs on [0.5, 1.5]",
                         [=] { return variance_preset(u, ExperimentKind::variance_uniform, spec_of(kind, 1.0), ua); }});
            t.push_back({v, "exact variance and bounds at x=1, input density 4|1-x| on [0.5, 1.5]",
                         [=] { return variance_preset(v, ExperimentKind::variance_vanishing, spec_of(kind, 1.0), va); }});
        }
        const struct {
            const char* tag;
            KernelKind kind;
        } curves[] = {
            {"se", KernelKind::squared_exponential},
            {"matern", KernelKind::matern12},
            {"rq", KernelKind::rational_quadratic},
            {"periodic", KernelKind::periodic},
        };
        for (const auto& k : curves) {
            const std::string n = std::string("fig4-") + k.tag;
            const KernelKind kind = k.kind;
            t.push_back({n, "average learning curve and bounds, inputs uniform on [0, 1]",
                         [=] { return curve_preset(n, spec_of(kind, 0.3)); }});
        }
        t.push_back({"fig4-se-full", "fig4-se with 1000 test points and 50 datasets", [] {
                         ExperimentConfig c = curve_preset("fig4-se-full", spec_of(KernelKind::squared_exponential, 0.3));
                         c.test_points = 1000;
                         c.datasets = 50;
                         return c;
                     }});
        t.push_back({"convergence-uniform", "ball growth at x=1, uniform inputs, rho(N) = N^-1/2", [] {
                         ExperimentConfig c;
                         c.name = "convergence-uniform";
                         c.experiment = ExperimentKind::convergence_check;
                         c.schedule = {1.0, 0.5};
                         c.n_min = 1;
                         c.n_max = 100000;
                         c.points_per_decade = 5;
                         c.trials = 50;
                         return c;
                     }});
        t.push_back({"convergence-vanishing",
                     "ball growth at x=1, input density 4|1-x|, rho(N) = N^-1/2, eps = 0.1", [] {
                         ExperimentConfig c;
                         c.name = "convergence-vanishing";
                         c.density = "vanishing";
                         c.experiment = ExperimentKind::convergence_check;
                         c.kernel.kind = KernelKind::squared_exponential;
                         c.schedule = {1.0, 0.5};
                         c.n_min = 1;
                         c.n_max = 100000;
                         c.points_per_decade = 5;
                         c.trials = 50;
                         c.theorem_eps = 0.1;
                         return c;
                     }});
        return t;
    }();
    return table;
}

}  // namespace

std::vector<PresetInfo> preset_list() {
    std::vector<PresetInfo> out;
    for (const auto& p : presets()) out.push_back({p.name, p.description});
    return out;
}

ExperimentConfig preset(std::string_view name) {
    for (const auto& p : presets()) {
        if (p.name == name) return p.make();
    }
    throw ConfigError("preset: unknown name '" + std::string(name) + "'");
}

}  // namespace gpbounds
