#include "gpbounds/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <sstream>
#include <vector>

#include "gpbounds/errors.hpp"

namespace gpbounds {

namespace {

// Kronrod abscissae on [-1, 1] (positive half, descending); odd indices are the
// 7-point Gauss nodes.
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000,
};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714,
};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327,
};

struct Panel {
    double a;
    double b;
    double value;
    double error;
    bool operator<(const Panel& other) const { return error < other.error; }
};

Panel gauss_kronrod15(const std::function<double(double)>& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(center);
    double kronrod = fc * kWgk[7];
    double gauss = fc * kWg[3];
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kXgk[j];
        const double sum = f(center - dx) + f(center + dx);
        kronrod += kWgk[j] * sum;
        if (j % 2 == 1) gauss += kWg[j / 2] * sum;
    }
    return Panel{a, b, kronrod * half, std::abs((kronrod - gauss) * half)};
}

}  // namespace

QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                    const QuadratureOptions& options) {
    QuadratureResult result;
    if (a == b) {
        result.converged = true;
        return result;
    }
    std::priority_queue<Panel> panels;
    const Panel first = gauss_kronrod15(f, a, b);
    panels.push(first);
    double value = first.value;
    double error = first.error;
    int count = 1;
    auto target = [&] { return std::max(options.abs_tol, options.rel_tol * std::abs(value)); };

    while (error > target() && count < options.max_intervals) {
        const Panel worst = panels.top();
        const double mid = 0.5 * (worst.a + worst.b);
        if (mid <= worst.a || mid >= worst.b) break;  // panel no longer divisible
        panels.pop();
        const Panel left = gauss_kronrod15(f, worst.a, mid);
        const Panel right = gauss_kronrod15(f, mid, worst.b);
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        panels.push(left);
        panels.push(right);
        ++count;
    }

    // Re-sum to shed the drift accumulated by incremental updates.
    value = 0.0;
    error = 0.0;
    std::vector<Panel> all;
    all.reserve(panels.size());
    while (!panels.empty()) {
        all.push_back(panels.top());
        panels.pop();
    }
    std::sort(all.begin(), all.end(), [](const Panel& l, const Panel& r) { return l.a < r.a; });
    for (const Panel& p : all) {
        value += p.value;
        error += p.error;
    }
    result.value = value;
    result.error = error;
    result.intervals = count;
    result.converged = error <= target();
    return result;
}

double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureOptions& options) {
    const QuadratureResult r = integrate_adaptive(f, a, b, options);
    if (!r.converged) {
        std::ostringstream os;
        os << "quadrature on [" << a << ", " << b << "] did not converge: achieved error "
           << r.error << " with " << r.intervals << " panels, requested "
           << std::max(options.abs_tol, options.rel_tol * std::abs(r.value));
        throw NumericError(os.str());
    }
    return r.value;
}

}  // namespace gpbounds
