#include "gpbounds/gp_core.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gpbounds/errors.hpp"

namespace gpbounds {

TrainingSet TrainingSet::from_1d(std::span<const double> xs, double noise_variance,
                                 std::optional<std::span<const double>> ys) {
    TrainingSet t;
    t.inputs.resize(1, static_cast<Eigen::Index>(xs.size()));
    for (std::size_t i = 0; i < xs.size(); ++i) t.inputs(0, static_cast<Eigen::Index>(i)) = xs[i];
    if (ys) {
        t.outputs = Eigen::VectorXd(static_cast<Eigen::Index>(ys->size()));
        for (std::size_t i = 0; i < ys->size(); ++i) (*t.outputs)(static_cast<Eigen::Index>(i)) = (*ys)[i];
    }
    t.noise_variance = noise_variance;
    return t;
}

void TrainingSet::validate() const {
    if (!(noise_variance > 0.0) || !std::isfinite(noise_variance)) {
        throw PreconditionError("training set: noise variance must be positive");
    }
    if (!inputs.allFinite()) throw PreconditionError("training set: inputs must be finite");
    if (outputs && outputs->size() != inputs.cols()) {
        throw PreconditionError("training set: " + std::to_string(outputs->size()) +
                                " outputs for " + std::to_string(inputs.cols()) + " inputs");
    }
}

Eigen::MatrixXd kernel_matrix(const Kernel& kernel, const Eigen::MatrixXd& inputs) {
    const Eigen::Index n = inputs.cols();
    Eigen::MatrixXd k(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = j; i < n; ++i) {
            k(i, j) = kernel.eval(as_span(inputs.col(i)), as_span(inputs.col(j)));
            k(j, i) = k(i, j);
        }
    }
    return k;
}

Eigen::VectorXd kernel_vector(const Kernel& kernel, const Eigen::MatrixXd& inputs,
                              const Eigen::Ref<const Eigen::VectorXd>& x) {
    Eigen::VectorXd v(inputs.cols());
    for (Eigen::Index i = 0; i < inputs.cols(); ++i) {
        v(i) = kernel.eval(as_span(x), as_span(inputs.col(i)));
    }
    return v;
}

FactoredPosterior::FactoredPosterior(TrainingSet train, Kernel kernel)
    : train_(std::move(train)), kernel_(std::move(kernel)) {
    train_.validate();
    if (train_.size() == 0) return;

    Eigen::MatrixXd a = kernel_matrix(kernel_, train_.inputs);
    a.diagonal().array() += train_.noise_variance;
    llt_.compute(a);
    if (llt_.info() != Eigen::Success) {
        throw NumericError("Cholesky factorization of the data covariance failed (N=" +
                           std::to_string(train_.size()) +
                           "); inputs are ill-conditioned for this noise variance");
    }
    if (train_.outputs) alpha_ = llt_.solve(*train_.outputs);
}

double FactoredPosterior::variance(const Eigen::Ref<const Eigen::VectorXd>& x) const {
    const double prior = kernel_.eval(as_span(x), as_span(x));
    if (train_.size() == 0) return prior;
    Eigen::VectorXd v = kernel_vector(kernel_, train_.inputs, x);
    llt_.matrixL().solveInPlace(v);
    // Roundoff can push the difference a few ulps below zero.
    return std::max(0.0, prior - v.squaredNorm());
}

double FactoredPosterior::mean(const Eigen::Ref<const Eigen::VectorXd>& x) const {
    if (train_.size() == 0) return 0.0;
    if (!train_.outputs) throw PreconditionError("posterior mean requires training outputs");
    return kernel_vector(kernel_, train_.inputs, x).dot(alpha_);
}

Eigen::VectorXd FactoredPosterior::variances(const Eigen::MatrixXd& test_points) const {
    Eigen::VectorXd out(test_points.cols());
    for (Eigen::Index j = 0; j < test_points.cols(); ++j) out(j) = variance(test_points.col(j));
    return out;
}

Eigen::VectorXd FactoredPosterior::prefix_variances(const Eigen::Ref<const Eigen::VectorXd>& x) const {
    const Eigen::Index n = train_.size();
    Eigen::VectorXd out(n + 1);
    const double prior = kernel_.eval(as_span(x), as_span(x));
    out(0) = prior;
    if (n == 0) return out;
    Eigen::VectorXd v = kernel_vector(kernel_, train_.inputs, x);
    llt_.matrixL().solveInPlace(v);
    double explained = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        explained += v(i) * v(i);
        out(i + 1) = std::max(0.0, prior - explained);
    }
    return out;
}

double posterior_variance(const TrainingSet& train, const Kernel& kernel,
                          const Eigen::Ref<const Eigen::VectorXd>& x) {
    return FactoredPosterior(train, kernel).variance(x);
}

double posterior_mean(const TrainingSet& train, const Kernel& kernel,
                      const Eigen::Ref<const Eigen::VectorXd>& x) {
    if (train.size() > 0 && !train.outputs) {
        throw PreconditionError("posterior mean requires training outputs");
    }
    return FactoredPosterior(train, kernel).mean(x);
}

}  // namespace gpbounds
