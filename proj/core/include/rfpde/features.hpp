#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>

namespace rfpde {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

enum class DistributionKind { gaussian, laplace, uniform };

std::string to_string(DistributionKind kind);
DistributionKind distribution_kind_from_string(const std::string& name);

/// Law of each weight coordinate.
///
/// `parameter` is the per-coordinate variance sigma^2 for gaussian, the Cauchy
/// scale gamma for laplace, and the half-width R for uniform. Gaussian weights
/// with variance sigma^2 match the kernel exp(-sigma^2 |x - x'|^2 / 2).
struct FeatureDistribution {
  DistributionKind kind = DistributionKind::gaussian;
  double parameter = 1.0;
  Index dim = 1;

  static FeatureDistribution gaussian(double variance, Index dim) {
    return {DistributionKind::gaussian, variance, dim};
  }
  static FeatureDistribution laplace(double scale, Index dim) {
    return {DistributionKind::laplace, scale, dim};
  }
  static FeatureDistribution uniform(double half_width, Index dim) {
    return {DistributionKind::uniform, half_width, dim};
  }

  /// Throws ParameterError on a non-positive parameter or dimension.
  void validate() const;
};

/// N random cosine features cos(<w_k, x> + b_k). Rows of `weights` are w_k.
struct FeatureSet {
  MatrixXd weights;  // N x d
  VectorXd biases;   // N, each in [-pi, pi]
  FeatureDistribution distribution;
  std::uint64_t seed = 0;
  bool with_bias = true;

  Index size() const { return weights.rows(); }
  Index dim() const { return weights.cols(); }
};

/// Feature values and analytic derivatives at one point.
struct FeatureEval {
  VectorXd values;              // N
  MatrixXd gradients;           // N x d, d phi_k / d x_i
  MatrixXd second_pure_partials;  // N x d, d^2 phi_k / d x_i^2
};

/// cos and sin of the feature phases at a batch of points (rows).
/// Feature derivatives at those points are column scalings of these two
/// arrays, so solvers evaluate them once per point set.
struct FeatureBlock {
  MatrixXd cos;  // M x N
  MatrixXd sin;  // M x N
};

/// Draws N weight rows i.i.d. from `dist`, then biases uniform on [-pi, pi]
/// (zero when `with_bias` is false). Deterministic in `seed`.
FeatureSet sample_features(const FeatureDistribution& dist, Index n_features,
                           std::uint64_t seed, bool with_bias = true);

FeatureEval eval_features(const FeatureSet& fs, const Eigen::Ref<const VectorXd>& x);

/// Batched phases for points stored as rows of `points` (M x d).
FeatureBlock eval_feature_block(const FeatureSet& fs, const Eigen::Ref<const MatrixXd>& points);

/// Shift-invariant kernel matched to the sampling law: E[cos <w, x - x'>].
/// Throws UnsupportedError for the uniform law.
double exact_kernel(const FeatureDistribution& dist, const Eigen::Ref<const VectorXd>& x,
                    const Eigen::Ref<const VectorXd>& y);

/// Monte-Carlo kernel estimate (2/N) sum_k phi_k(x) phi_k(x'), unbiased for
/// exact_kernel when biases are sampled.
double approx_kernel(const FeatureSet& fs, const Eigen::Ref<const VectorXd>& x,
                     const Eigen::Ref<const VectorXd>& y);

}  // namespace rfpde
