#pragma once

#include <functional>

namespace gpbounds {

struct QuadratureOptions {
    double abs_tol = 1e-9;
    double rel_tol = 0.0;
    int max_intervals = 2000;
};

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;  // Kronrod-Gauss error estimate, summed over panels
    int intervals = 0;
    bool converged = false;
};

/// Globally adaptive 15-point Gauss-Kronrod quadrature (QAG-style bisection
/// of the panel with the largest error estimate). Stops when the summed error
/// estimate is below max(abs_tol, rel_tol * |value|).
QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                    const QuadratureOptions& options = {});

/// As integrate_adaptive, but throws NumericError carrying the achieved error
/// estimate when the tolerance is not met within max_intervals panels.
double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureOptions& options = {});

}  // namespace gpbounds
