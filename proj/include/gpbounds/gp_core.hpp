#pragma once

#include <optional>
#include <span>

#include <Eigen/Core>
#include <Eigen/Cholesky>

#include "gpbounds/kernels.hpp"

namespace gpbounds {

using Point = Eigen::VectorXd;

inline std::span<const double> as_span(const Eigen::Ref<const Eigen::VectorXd>& v) {
    return {v.data(), static_cast<std::size_t>(v.size())};
}

/// Training inputs stored column-wise (d x N), optional outputs, noise variance.
struct TrainingSet {
    Eigen::MatrixXd inputs;
    std::optional<Eigen::VectorXd> outputs;
    double noise_variance = 0.1;

    /// Scalar inputs, d = 1.
    static TrainingSet from_1d(std::span<const double> xs, double noise_variance,
                               std::optional<std::span<const double>> ys = std::nullopt);

    Eigen::Index size() const { return inputs.cols(); }
    Eigen::Index dimension() const { return inputs.rows(); }

    /// Throws PreconditionError for nonpositive noise, non-finite inputs or an
    /// output count that differs from the input count.
    void validate() const;
};

Eigen::MatrixXd kernel_matrix(const Kernel& kernel, const Eigen::MatrixXd& inputs);
Eigen::VectorXd kernel_vector(const Kernel& kernel, const Eigen::MatrixXd& inputs,
                              const Eigen::Ref<const Eigen::VectorXd>& x);

/// A training set with its data covariance A_N = K_N + s_n^2 I factored once.
///
/// Reused for every query point. Read-only after construction, so a single
/// instance may be shared by concurrent query workers.
class FactoredPosterior {
public:
    /// Throws NumericError when the Cholesky factorization of A_N breaks down.
    FactoredPosterior(TrainingSet train, Kernel kernel);

    double variance(const Eigen::Ref<const Eigen::VectorXd>& x) const;
    double mean(const Eigen::Ref<const Eigen::VectorXd>& x) const;
    Eigen::VectorXd variances(const Eigen::MatrixXd& test_points) const;

    /// Posterior variances at x conditioned on the first n training points, for
    /// n = 0..N. The Cholesky factor of a leading principal block is the leading
    /// block of the full factor, so one forward solve serves every prefix.
    Eigen::VectorXd prefix_variances(const Eigen::Ref<const Eigen::VectorXd>& x) const;

    const TrainingSet& training_set() const { return train_; }
    const Kernel& kernel() const { return kernel_; }

private:
    TrainingSet train_;
    Kernel kernel_;
    Eigen::LLT<Eigen::MatrixXd> llt_;
    Eigen::VectorXd alpha_;  // A_N^{-1} y_N when outputs are present
};

/// sigma_N^2(x) = k(x,x) - k_N(x)^T A_N^{-1} k_N(x); k(x,x) for N = 0.
double posterior_variance(const TrainingSet& train, const Kernel& kernel,
                          const Eigen::Ref<const Eigen::VectorXd>& x);

/// mu_N(x) = k_N(x)^T A_N^{-1} y_N; 0 for N = 0 (zero prior mean).
double posterior_mean(const TrainingSet& train, const Kernel& kernel,
                      const Eigen::Ref<const Eigen::VectorXd>& x);

}  // namespace gpbounds
