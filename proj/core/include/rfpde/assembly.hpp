#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rfpde/features.hpp"
#include "rfpde/problems.hpp"
#include "rfpde/rng.hpp"

namespace rfpde {

using Eigen::MatrixXd;

enum class SamplingScheme { uniform_random, grid };

struct BoundaryPoints {
  std::string name;
  MatrixXd points;  // rows are points
};

/// Interior and per-group boundary collocation points. Boundary entries are
/// in the same order as ProblemSpec::boundary_groups.
struct CollocationSet {
  MatrixXd interior;
  std::vector<BoundaryPoints> boundary;
  std::uint64_t seed = 0;
  SamplingScheme scheme = SamplingScheme::uniform_random;

  Index boundary_size() const;
  Index total_size() const { return interior.rows() + boundary_size(); }
};

/// I.i.d. uniform interior points on the open box, plus `boundary_counts[g]`
/// points for group g spread round-robin over the group's faces (remainder to
/// the first faces) and uniform on each face. Throws EmptySetError when the
/// total is zero.
CollocationSet sample_collocation(const ProblemSpec& problem, Index m_interior,
                                  std::span<const Index> boundary_counts, std::uint64_t seed);

/// Same, using each problem's default counts.
CollocationSet sample_collocation(const ProblemSpec& problem, std::uint64_t seed);

/// Uniform points on the open box.
MatrixXd sample_box_uniform(const DomainBox& box, Index n, Rng& rng);

/// Tensor grid with n points per axis covering the closed box (n^d rows,
/// corners included, first axis varying slowest).
MatrixXd box_grid(const DomainBox& box, Index n_per_axis);

/// Coefficients paired with the features they weight.
struct Model {
  FeatureSet features;
  VectorXd coefficients;

  void validate() const;
};

OperatorPoint model_eval(const Model& model, const Eigen::Ref<const VectorXd>& x);

/// Model values at the rows of `points`.
VectorXd model_values(const Model& model, const Eigen::Ref<const MatrixXd>& points);

/// Unweighted residuals, interior first then one vector per boundary group.
struct Residuals {
  VectorXd interior;
  std::vector<VectorXd> boundary;
};

struct Jacobians {
  MatrixXd interior;
  std::vector<MatrixXd> boundary;
};

Residuals residual_vector(const Model& model, const ProblemSpec& problem, const CollocationSet& pts);
Jacobians residual_jacobian(const Model& model, const ProblemSpec& problem, const CollocationSet& pts);

/// Stacked [A; B] c = [f; g] for a linear problem. Rows are ordered
/// interior first, then boundary groups in problem order.
struct LinearSystem {
  MatrixXd matrix;
  VectorXd rhs;
  std::vector<Index> block_rows;  // interior, then each boundary group
};

/// Throws LinearityError when any operator of `problem` is nonlinear.
LinearSystem assemble_linear_system(const ProblemSpec& problem, const FeatureSet& fs,
                                    const CollocationSet& pts);

/// Residual and Jacobian evaluator for a fixed (problem, features, points)
/// triple. Feature phases at every collocation point are computed once; each
/// evaluation then costs a few matrix-vector products plus the pointwise
/// operator calls.
class CollocationSystem {
 public:
  CollocationSystem(const ProblemSpec& problem, const FeatureSet& fs, const CollocationSet& pts);

  Index n_features() const { return features_.size(); }
  /// Number of residual blocks: interior plus each boundary group.
  std::size_t n_blocks() const { return blocks_.size(); }
  Index block_rows(std::size_t b) const { return blocks_[b].points.rows(); }
  Index total_rows() const;

  /// Residuals of block b at coefficients c.
  VectorXd residual(std::size_t b, const VectorXd& c) const;
  /// Jacobian of block b at coefficients c.
  MatrixXd jacobian(std::size_t b, const VectorXd& c) const;

  /// Affine part of a linear block: residual(c) = matrix * c - rhs.
  LinearSystem linear_block(std::size_t b) const;

 private:
  struct Block {
    MatrixXd points;
    FeatureBlock phases;
  };

  const PointOperator& op(std::size_t b) const;
  // Model u, grad, second_pure at every point of block b.
  std::vector<OperatorPoint> states(std::size_t b, const VectorXd& c) const;
  MatrixXd combine(const Block& block, const VectorXd& pu, const MatrixXd& pg,
                   const MatrixXd& ps) const;

  ProblemSpec problem_;
  FeatureSet features_;
  MatrixXd weights_squared_;
  std::vector<Block> blocks_;
};

struct FillDistances {
  double interior = 0.0;
  double boundary = 0.0;
};

/// Fill distances approximated on a probe grid: probe_density^d points over
/// the closed box for the interior, probe_density^(d-1) per boundary face.
/// Boundary distances are Euclidean within the faces of the problem's
/// boundary groups, measured to the union of all boundary points.
FillDistances fill_distance(const ProblemSpec& problem, const CollocationSet& pts, Index probe_density);

/// sup over probes of the distance to the nearest point in `points`.
double fill_distance(const Eigen::Ref<const MatrixXd>& points, const Eigen::Ref<const MatrixXd>& probes);

}  // namespace rfpde
