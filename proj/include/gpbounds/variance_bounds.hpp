#pragma once

#include <cstddef>
#include <optional>

#include "gpbounds/gp_core.hpp"
#include "gpbounds/kernels.hpp"

namespace gpbounds {

/// Number of training inputs in the closed ball of radius `radius` around `center`.
struct BallCount {
    Point center;
    double radius = 0.0;
    std::size_t count = 0;
};

BallCount ball_count(const TrainingSet& train, const Point& x, double radius);

/// Same count restricted to the first `prefix` columns of `inputs`.
std::size_t ball_count_prefix(const Eigen::MatrixXd& inputs, Eigen::Index prefix, const Point& x,
                              double radius);

/// The Lipschitz-kernel bound exists in two algebraic forms that differ in
/// whether k(x,x) multiplies the L^2 rho^2 term. `proof` is the one that
/// follows from the derivation and is the default; `as_printed` reproduces the
/// theorem's displayed numerator for comparison.
enum class LipschitzBoundForm { proof, as_printed };

/// Posterior-variance bound from the number of training points inside the
/// ball of radius rho around x, for any kernel with one-argument Lipschitz
/// constant `lipschitz`:
///
///   [k s^2 + |B| (4 k L rho - L^2 rho^2)] / [|B| (k + 2 L rho) + s^2],  k = k(x,x).
///
/// Requires rho <= k(x,x) / L; violating it throws PreconditionError (no clipping).
double lipschitz_bound(const Kernel& kernel, double lipschitz, const Point& x,
                       std::size_t ball_count, double rho, double noise_variance,
                       LipschitzBoundForm form = LipschitzBoundForm::proof);

/// k(0) - k(rho)^2 / (k(0) + s^2 / |B|) for isotropic, decreasing kernels.
/// An empty ball is rejected; the caller falls back to k(0).
double isotropic_bound(const Kernel& kernel, std::size_t ball_count, double rho,
                       double noise_variance);

/// Exact posterior variance given a single training point at distance tau.
double one_point_bound(const Kernel& kernel, double tau, double noise_variance);

/// Exact posterior variance given two training points at distances tau1, tau2
/// from the test point and delta from each other, by explicit 2x2 inversion.
/// Throws PreconditionError if (tau1, tau2, delta) violate the triangle inequality.
double two_point_bound(const Kernel& kernel, double tau1, double tau2, double delta,
                       double noise_variance);

/// rho(N) = c N^{-alpha}. The Lipschitz-bound precondition clip is applied by radius_at().
struct RadiusSchedule {
    double coefficient = 1.0;
    double exponent = 0.5;

    double radius(double n) const;
    void validate() const;
};

/// min(c N^{-alpha}, k(x,x) / L). Non-increasing in N.
double radius_at(const RadiusSchedule& schedule, std::size_t n, const Kernel& kernel,
                 const Point& x, double lipschitz);

/// Exact variance alongside every applicable bound for one (training set, x, rho).
struct BoundReport {
    std::size_t n = 0;
    double exact = 0.0;
    double lipschitz_bound = 0.0;
    std::optional<double> isotropic_bound;  // isotropic, decreasing kernels only
    std::optional<double> one_point_bound;  // isotropic kernels only
    std::optional<double> two_point_bound;  // isotropic kernels only
    double rho = 0.0;
    std::size_t ball_count = 0;
};

BoundReport bound_report(const TrainingSet& train, const Kernel& kernel, double lipschitz,
                         const Point& x, double rho,
                         LipschitzBoundForm form = LipschitzBoundForm::proof);

}  // namespace gpbounds
