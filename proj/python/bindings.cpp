#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>
#include <string>
#include <vector>

#include "gpbounds/config.hpp"
#include "gpbounds/convergence.hpp"
#include "gpbounds/errors.hpp"
#include "gpbounds/experiments.hpp"
#include "gpbounds/gp_core.hpp"
#include "gpbounds/kernels.hpp"
#include "gpbounds/learning_curves.hpp"
#include "gpbounds/variance_bounds.hpp"

namespace py = pybind11;
using namespace gpbounds;

namespace {

TrainingSet make_training(const std::vector<double>& xs, double noise,
                          const std::optional<std::vector<double>>& ys) {
    TrainingSet t = ys ? TrainingSet::from_1d(xs, noise, std::span<const double>(*ys))
                       : TrainingSet::from_1d(xs, noise);
    t.validate();
    return t;
}

Point point(double x) {
    Point p(1);
    p(0) = x;
    return p;
}

SpanWeight span_weight(const std::string& name) {
    if (name == "order-statistics") return SpanWeight::order_statistics;
    if (name == "as-printed") return SpanWeight::as_printed;
    throw ConfigError("span_weight: expected order-statistics or as-printed, got '" + name + "'");
}

LipschitzBoundForm bound_form(const std::string& name) {
    if (name == "proof") return LipschitzBoundForm::proof;
    if (name == "as-printed") return LipschitzBoundForm::as_printed;
    throw ConfigError("form: expected proof or as-printed, got '" + name + "'");
}

ExperimentConfig resolve(const std::string& preset_name, const std::string& text) {
    ExperimentConfig base = preset_name.empty() ? ExperimentConfig{} : preset(preset_name);
    std::istringstream in(text);
    ExperimentConfig c = parse_config(in, base);
    c.validate();
    return c;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Posterior variance bounds and learning curves for GP regression";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);
    py::register_exception<PreconditionError>(m, "PreconditionError", PyExc_ValueError);

    py::class_<Kernel>(m, "Kernel")
        .def_static("squared_exponential", &Kernel::squared_exponential, py::arg("lengthscale"),
                    py::arg("signal_variance") = 1.0)
        .def_static("matern12", &Kernel::matern12, py::arg("lengthscale"), py::arg("signal_variance") = 1.0)
        .def_static("rational_quadratic", &Kernel::rational_quadratic, py::arg("lengthscale"),
                    py::arg("alpha") = 1.0, py::arg("signal_variance") = 1.0)
        .def_static("periodic", &Kernel::periodic, py::arg("lengthscale"), py::arg("period") = 1.0,
                    py::arg("signal_variance") = 1.0)
        .def_static("polynomial", &Kernel::polynomial, py::arg("offset") = 1.0, py::arg("degree") = 3,
                    py::arg("signal_variance") = 1.0)
        .def_static("neural_network", &Kernel::neural_network, py::arg("bias_variance") = 1.0,
                    py::arg("weight_variance") = 1.0, py::arg("signal_variance") = 1.0)
        .def("__call__", [](const Kernel& k, double x, double z) { return k.eval(x, z); })
        .def("eval", [](const Kernel& k, const std::vector<double>& x, const std::vector<double>& z) {
            if (x.size() != z.size()) throw PreconditionError("eval: inputs differ in dimension");
            return k.eval(x, z);
        })
        .def("eval_iso", &Kernel::eval_iso, py::arg("tau"))
        .def_property_readonly("isotropic", &Kernel::isotropic)
        .def_property_readonly("decreasing", &Kernel::decreasing)
        .def_property_readonly("lengthscale", &Kernel::lengthscale)
        .def_property_readonly("signal_variance", &Kernel::signal_variance)
        .def("__repr__", &Kernel::describe);

    m.def(
        "lipschitz_constant",
        [](const Kernel& k, double lo, double hi) {
            const auto e = lipschitz_constant(k, Box::interval(lo, hi));
            return py::make_tuple(e.value, e.method == LipschitzMethod::analytic ? "analytic" : "grid");
        },
        py::arg("kernel"), py::arg("lo"), py::arg("hi"),
        "(value, method) for inputs in [lo, hi]; grid estimates include the safety factor");

    m.def(
        "posterior_variance",
        [](const Kernel& k, const std::vector<double>& xs, double x, double noise) {
            return posterior_variance(make_training(xs, noise, std::nullopt), k, point(x));
        },
        py::arg("kernel"), py::arg("xs"), py::arg("x"), py::arg("noise_variance"));
    m.def(
        "posterior_mean",
        [](const Kernel& k, const std::vector<double>& xs, const std::vector<double>& ys, double x,
           double noise) { return posterior_mean(make_training(xs, noise, ys), k, point(x)); },
        py::arg("kernel"), py::arg("xs"), py::arg("ys"), py::arg("x"), py::arg("noise_variance"));
    m.def(
        "prefix_variances",
        [](const Kernel& k, const std::vector<double>& xs, double x, double noise) {
            return Eigen::VectorXd(FactoredPosterior(make_training(xs, noise, std::nullopt), k).prefix_variances(point(x)));
        },
        py::arg("kernel"), py::arg("xs"), py::arg("x"), py::arg("noise_variance"),
        "variance after the first n inputs, n = 0..len(xs)");

    m.def(
        "ball_count",
        [](const std::vector<double>& xs, double x, double radius) {
            return ball_count(TrainingSet::from_1d(xs, 1.0), point(x), radius).count;
        },
        py::arg("xs"), py::arg("x"), py::arg("radius"));
    m.def(
        "lipschitz_bound",
        [](const Kernel& k, double lipschitz, double x, std::size_t count, double rho, double noise,
           const std::string& form) { return lipschitz_bound(k, lipschitz, point(x), count, rho, noise, bound_form(form)); },
        py::arg("kernel"), py::arg("lipschitz"), py::arg("x"), py::arg("ball_count"), py::arg("rho"),
        py::arg("noise_variance"), py::arg("form") = "proof");
    m.def("isotropic_bound", &isotropic_bound, py::arg("kernel"), py::arg("ball_count"), py::arg("rho"),
          py::arg("noise_variance"));
    m.def("one_point_bound", &one_point_bound, py::arg("kernel"), py::arg("tau"), py::arg("noise_variance"));
    m.def("two_point_bound", &two_point_bound, py::arg("kernel"), py::arg("tau1"), py::arg("tau2"),
          py::arg("delta"), py::arg("noise_variance"));
    m.def(
        "bound_report",
        [](const Kernel& k, const std::vector<double>& xs, double noise, double lipschitz, double x, double rho,
           const std::string& form) {
            const auto r = bound_report(make_training(xs, noise, std::nullopt), k, lipschitz, point(x), rho,
                                        bound_form(form));
            py::dict d;
            d["n"] = r.n;
            d["exact"] = r.exact;
            d["lipschitz_bound"] = r.lipschitz_bound;
            d["isotropic_bound"] = r.isotropic_bound ? py::cast(*r.isotropic_bound) : py::none();
            d["one_point_bound"] = r.one_point_bound ? py::cast(*r.one_point_bound) : py::none();
            d["two_point_bound"] = r.two_point_bound ? py::cast(*r.two_point_bound) : py::none();
            d["rho"] = r.rho;
            d["ball_count"] = r.ball_count;
            return d;
        },
        py::arg("kernel"), py::arg("xs"), py::arg("noise_variance"), py::arg("lipschitz"), py::arg("x"),
        py::arg("rho"), py::arg("form") = "proof");

    py::class_<RadiusSchedule>(m, "RadiusSchedule")
        .def(py::init([](double c, double alpha) {
                 RadiusSchedule s{c, alpha};
                 s.validate();
                 return s;
             }),
             py::arg("coefficient"), py::arg("exponent"))
        .def_readonly("coefficient", &RadiusSchedule::coefficient)
        .def_readonly("exponent", &RadiusSchedule::exponent)
        .def("__call__", &RadiusSchedule::radius, py::arg("n"));

    py::class_<Density>(m, "Density")
        .def_static("uniform", &Density::uniform, py::arg("lo"), py::arg("hi"))
        .def_static("vanishing", &Density::vanishing, py::arg("point"), py::arg("half_width") = 0.5)
        .def_static("tabulated", &Density::tabulated, py::arg("xs"), py::arg("values"))
        .def("pdf", &Density::pdf)
        .def("cdf", &Density::cdf)
        .def_property_readonly("support", [](const Density& d) { return py::make_tuple(d.support_lo(), d.support_hi()); });

    py::class_<ConvergenceVerdict>(m, "ConvergenceVerdict")
        .def_readonly("satisfied", &ConvergenceVerdict::satisfied)
        .def_readonly("c", &ConvergenceVerdict::c)
        .def_readonly("epsilon", &ConvergenceVerdict::epsilon)
        .def_readonly("first_failing_n", &ConvergenceVerdict::first_failing_n)
        .def_readonly("radius_nonincreasing", &ConvergenceVerdict::radius_nonincreasing)
        .def_readonly("radius_vanishes", &ConvergenceVerdict::radius_vanishes)
        .def_readonly("reason", &ConvergenceVerdict::reason)
        .def("__bool__", [](const ConvergenceVerdict& v) { return v.satisfied; });

    m.def("ball_probability", &ball_probability, py::arg("density"), py::arg("x"), py::arg("rho"));
    m.def("check_theorem", &check_theorem32, py::arg("density"), py::arg("x"), py::arg("schedule"), py::arg("c"),
          py::arg("epsilon"), py::arg("n_lo") = 1, py::arg("n_hi") = 100000);
    m.def("search_theorem_witness", &search_theorem32_witness, py::arg("density"), py::arg("x"),
          py::arg("schedule"), py::arg("n_lo") = 1, py::arg("n_hi") = 100000);
    m.def("check_corollary", &check_corollary33, py::arg("dimension"), py::arg("schedule"));
    m.def(
        "empirical_ball_growth",
        [](const Density& d, double x, const RadiusSchedule& s, const std::vector<std::uint64_t>& ns, int trials,
           std::uint64_t seed) {
            std::vector<py::tuple> out;
            for (const auto& r : empirical_ball_growth(d, x, s, ns, trials, seed)) {
                out.push_back(py::make_tuple(r.n, r.mean_count, r.min_count, r.expected_count));
            }
            return out;
        },
        py::arg("density"), py::arg("x"), py::arg("schedule"), py::arg("n_list"), py::arg("trials"),
        py::arg("seed"), "list of (N, mean_count, min_count, expected_count)");

    m.def("e1_bound", &e1_bound, py::arg("kernel"), py::arg("noise_variance"), py::arg("n"),
          py::arg("quad_tol") = 1e-9);
    m.def("e2_bound", &e2_bound, py::arg("kernel"), py::arg("noise_variance"), py::arg("n"),
          py::arg("quad_tol") = 1e-9);
    m.def(
        "e_rho_bound",
        [](const Kernel& k, double noise, std::uint64_t total, std::uint64_t n, double tol, const std::string& w) {
            return e_rho_bound(k, noise, total, n, tol, span_weight(w));
        },
        py::arg("kernel"), py::arg("noise_variance"), py::arg("total"), py::arg("n"), py::arg("quad_tol") = 1e-9,
        py::arg("span_weight") = "order-statistics");
    m.def(
        "section_bound",
        [](const Kernel& k, double noise, std::uint64_t total, std::uint64_t n, double tol, const std::string& w) {
            return section_bound(k, noise, total, n, tol, span_weight(w));
        },
        py::arg("kernel"), py::arg("noise_variance"), py::arg("total"), py::arg("n"), py::arg("quad_tol") = 1e-9,
        py::arg("span_weight") = "order-statistics");
    m.def(
        "greedy_select_n",
        [](const Kernel& k, double noise, std::uint64_t total, std::uint64_t prev, double tol, const std::string& w) {
            return greedy_select_n(k, noise, total, prev, tol, span_weight(w));
        },
        py::arg("kernel"), py::arg("noise_variance"), py::arg("total"), py::arg("n_prev") = 1,
        py::arg("quad_tol") = 1e-9, py::arg("span_weight") = "order-statistics");
    m.def(
        "monte_carlo_curve",
        [](const Kernel& k, double noise, const std::vector<std::uint64_t>& ns, int test_points, int datasets,
           std::uint64_t seed) {
            std::vector<py::tuple> out;
            for (const auto& p : monte_carlo_curve(k, noise, ns, test_points, datasets, seed)) {
                out.push_back(py::make_tuple(p.n, p.mean, p.standard_error));
            }
            return out;
        },
        py::arg("kernel"), py::arg("noise_variance"), py::arg("n_list"), py::arg("test_points") = 200,
        py::arg("datasets") = 20, py::arg("seed") = 1, "list of (N, mean, standard_error)");
    m.def(
        "learning_curve_table",
        [](const Kernel& k, double noise, const std::vector<std::uint64_t>& grid, double tol, const std::string& w,
           int test_points, int datasets, std::uint64_t mc_max_n, std::uint64_t seed) {
            const auto t = learning_curve_table(k, noise, grid,
                                                {tol, span_weight(w), test_points, datasets, mc_max_n, seed});
            std::vector<py::dict> rows;
            for (const auto& r : t.rows) {
                py::dict d;
                d["n"] = r.n;
                d["e_num"] = r.e_num;
                d["e_num_se"] = r.e_num_se;
                d["e1"] = r.e1;
                d["e2"] = r.e2;
                d["e_rho"] = r.e_rho;
                d["n_selected"] = r.n_selected;
                rows.push_back(std::move(d));
            }
            return rows;
        },
        py::arg("kernel"), py::arg("noise_variance"), py::arg("n_grid"), py::arg("quad_tol") = 1e-9,
        py::arg("span_weight") = "order-statistics", py::arg("test_points") = 200, py::arg("datasets") = 20,
        py::arg("mc_max_n") = 2000, py::arg("seed") = 1);

    m.def("presets", [] {
        std::vector<py::tuple> out;
        for (const auto& p : preset_list()) out.push_back(py::make_tuple(p.name, p.description));
        return out;
    });
    m.def(
        "config_text", [](const std::string& preset_name, const std::string& text) { return to_text(resolve(preset_name, text)); },
        py::arg("preset") = "", py::arg("overrides") = "", "canonical config text for a preset plus overrides");
    m.def(
        "run_experiment",
        [](const std::string& preset_name, const std::string& text) {
            const ExperimentConfig c = resolve(preset_name, text);
            py::gil_scoped_release release;
            switch (c.experiment) {
                case ExperimentKind::variance_uniform:
                case ExperimentKind::variance_vanishing:
                    return run_variance_experiment(c).to_csv();
                case ExperimentKind::learning_curve:
                    return run_learning_curve(c).to_csv();
                case ExperimentKind::convergence_check: {
                    const auto r = run_convergence_check(c);
                    return r.to_text() + "\n" + r.growth.to_csv();
                }
            }
            return std::string();
        },
        py::arg("preset") = "", py::arg("overrides") = "",
        "run a preset with `key = value` overrides and return its CSV text");
}
