#include "rfpde/features.hpp"

#include <cmath>
#include <numbers>

#include "rfpde/errors.hpp"
#include "rfpde/rng.hpp"

namespace rfpde {

std::string to_string(DistributionKind kind) {
  switch (kind) {
    case DistributionKind::gaussian:
      return "gaussian";
    case DistributionKind::laplace:
      return "laplace";
    case DistributionKind::uniform:
      return "uniform";
  }
  return "unknown";
}

DistributionKind distribution_kind_from_string(const std::string& name) {
  if (name == "gaussian") return DistributionKind::gaussian;
  if (name == "laplace") return DistributionKind::laplace;
  if (name == "uniform") return DistributionKind::uniform;
  throw ParameterError("unknown feature distribution '" + name + "'");
}

void FeatureDistribution::validate() const {
  if (dim < 1) throw ParameterError("feature distribution: dimension must be >= 1");
  if (!(parameter > 0.0) || !std::isfinite(parameter)) {
    throw ParameterError("feature distribution: " + to_string(kind) +
                         " parameter must be positive and finite");
  }
}

namespace {

double draw_weight(const FeatureDistribution& dist, Rng& rng, double gaussian_scale) {
  switch (dist.kind) {
    case DistributionKind::gaussian:
      return gaussian_scale * rng.normal();
    case DistributionKind::laplace:
      return rng.cauchy(dist.parameter);
    case DistributionKind::uniform:
      return dist.parameter * (2.0 * rng.uniform() - 1.0);
  }
  return 0.0;
}

void check_point(const FeatureSet& fs, Index n, const char* where) {
  if (n != fs.dim()) {
    throw ShapeError(std::string(where) + ": point dimension " + std::to_string(n) +
                     " does not match feature dimension " + std::to_string(fs.dim()));
  }
}

}  // namespace

FeatureSet sample_features(const FeatureDistribution& dist, Index n_features,
                           std::uint64_t seed, bool with_bias) {
  dist.validate();
  if (n_features < 1) throw ParameterError("sample_features: n_features must be >= 1");

  FeatureSet fs;
  fs.weights.resize(n_features, dist.dim);
  fs.biases.resize(n_features);
  fs.distribution = dist;
  fs.seed = seed;
  fs.with_bias = with_bias;

  Rng rng(seed);
  const double gaussian_scale = std::sqrt(dist.parameter);
  for (Index k = 0; k < n_features; ++k) {
    for (Index i = 0; i < dist.dim; ++i) fs.weights(k, i) = draw_weight(dist, rng, gaussian_scale);
    fs.biases(k) = with_bias ? rng.uniform(-std::numbers::pi, std::numbers::pi) : 0.0;
  }
  return fs;
}

FeatureEval eval_features(const FeatureSet& fs, const Eigen::Ref<const VectorXd>& x) {
  check_point(fs, x.size(), "eval_features");
  const VectorXd phase = fs.weights * x + fs.biases;
  const Eigen::ArrayXd c = phase.array().cos();
  const Eigen::ArrayXd s = phase.array().sin();

  FeatureEval out;
  out.values = c.matrix();
  out.gradients = -(fs.weights.array().colwise() * s).matrix();
  out.second_pure_partials = -(fs.weights.array().square().colwise() * c).matrix();
  return out;
}

FeatureBlock eval_feature_block(const FeatureSet& fs, const Eigen::Ref<const MatrixXd>& points) {
  if (points.rows() > 0) check_point(fs, points.cols(), "eval_feature_block");
  MatrixXd phase = points * fs.weights.transpose();
  phase.rowwise() += fs.biases.transpose();
  return FeatureBlock{phase.array().cos().matrix(), phase.array().sin().matrix()};
}

double exact_kernel(const FeatureDistribution& dist, const Eigen::Ref<const VectorXd>& x,
                    const Eigen::Ref<const VectorXd>& y) {
  dist.validate();
  if (x.size() != dist.dim || y.size() != dist.dim) {
    throw ShapeError("exact_kernel: point dimension does not match distribution");
  }
  const VectorXd delta = x - y;
  switch (dist.kind) {
    case DistributionKind::gaussian:
      return std::exp(-0.5 * dist.parameter * delta.squaredNorm());
    case DistributionKind::laplace:
      return std::exp(-dist.parameter * delta.lpNorm<1>());
    case DistributionKind::uniform:
      break;
  }
  throw UnsupportedError("exact_kernel: the uniform law has no matched closed-form kernel");
}

double approx_kernel(const FeatureSet& fs, const Eigen::Ref<const VectorXd>& x,
                     const Eigen::Ref<const VectorXd>& y) {
  if (fs.size() == 0) throw EmptySetError("approx_kernel: empty feature set");
  check_point(fs, x.size(), "approx_kernel");
  check_point(fs, y.size(), "approx_kernel");
  const Eigen::ArrayXd px = (fs.weights * x + fs.biases).array().cos();
  const Eigen::ArrayXd py = (fs.weights * y + fs.biases).array().cos();
  return 2.0 * (px * py).sum() / static_cast<double>(fs.size());
}

}  // namespace rfpde
