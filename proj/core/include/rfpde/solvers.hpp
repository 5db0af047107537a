#pragma once

#include <Eigen/Dense>

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rfpde/assembly.hpp"

namespace rfpde {

enum class SolverMethod { linear_ls, linear_minnorm, ridge, gauss_newton, gradient_descent };

std::string to_string(SolverMethod method);
/// Accepts the CLI spellings: linear-ls, linear-minnorm, ridge, gauss-newton,
/// gd (or gradient-descent).
SolverMethod solver_method_from_string(const std::string& name);

/// How each Levenberg-Marquardt trial step is computed.
enum class StepSolver {
  qr,                // least squares on the stacked damped Jacobian
  normal_equations,  // Cholesky on J^T J + (mu + damping) I
};

/// Training configuration. The nonlinear objective is
///
///   F(c) = reg_weight * |c|^2 + sum_g weight_g * |r_g(c)|^2
///
/// where g runs over the interior block and every boundary group. For the
/// linear methods the same weights scale the rows of the stacked system and
/// `reg_weight` is the ridge penalty.
struct SolverConfig {
  SolverMethod method = SolverMethod::gauss_newton;
  double reg_weight = 1e-8;
  double interior_weight = 1.0;
  /// Overrides BoundaryGroup::weight for every group when set.
  std::optional<double> boundary_weight;
  int max_iterations = 100;
  double step_size = 1e-3;
  double tol_residual = 1e-12;
  double tol_step = 1e-10;
  double lm_damping_init = 1e-3;
  int lm_max_rejections = 20;
  StepSolver step_solver = StepSolver::qr;

  void validate() const;
};

struct FitReport {
  double final_objective = 0.0;
  int iterations_used = 0;
  bool converged = false;
  /// Unweighted residual 2-norms, interior first then boundary groups.
  std::vector<double> residual_norms;
  /// Objective after each accepted iteration (gradient descent: each epoch),
  /// starting with the value at the initial iterate.
  std::vector<double> objective_history;
};

struct FitResult {
  Model model;
  FitReport report;
};

/// Raised when the objective overflows. Carries the last finite iterate.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& what, VectorXd last_finite)
      : std::runtime_error(what), last_finite_(std::move(last_finite)) {}
  const VectorXd& last_finite() const { return last_finite_; }

 private:
  VectorXd last_finite_;
};

struct LinearSolution {
  VectorXd coefficients;
  Index rank = 0;
  double residual_norm = 0.0;
  /// False for a numerically zero matrix (coefficients are then zero).
  bool ok = true;
};

/// Rank threshold shared by the dense solvers: singular values (or pivots)
/// below max(rows, cols) * eps * largest are treated as zero.
double rank_tolerance(Index rows, Index cols);

/// argmin |M c - y| via complete orthogonal decomposition. Systems with fewer
/// rows than columns go to solve_min_norm.
LinearSolution solve_least_squares(const Eigen::Ref<const MatrixXd>& matrix,
                                   const Eigen::Ref<const VectorXd>& rhs);

/// Pseudo-inverse solution pinv(M) y via SVD. For an inconsistent system this
/// is the minimum-norm least-squares solution; residual_norm reports the misfit.
LinearSolution solve_min_norm(const Eigen::Ref<const MatrixXd>& matrix,
                              const Eigen::Ref<const VectorXd>& rhs);

/// argmin |M c - y|^2 + lambda |c|^2 through QR of [M; sqrt(lambda) I].
LinearSolution solve_ridge(const Eigen::Ref<const MatrixXd>& matrix,
                           const Eigen::Ref<const VectorXd>& rhs, double lambda);

/// Weights of every residual block (interior first) under `cfg`.
std::vector<double> block_weights(const ProblemSpec& problem, const SolverConfig& cfg);

/// F(c) for the given configuration.
double objective(const CollocationSystem& sys, const std::vector<double>& weights, double reg_weight,
                 const VectorXd& c);
/// Gradient of F: 2 mu c + sum_g 2 w_g J_g^T r_g.
VectorXd objective_gradient(const CollocationSystem& sys, const std::vector<double>& weights,
                            double reg_weight, const VectorXd& c);

/// Assembles the linear system (rows scaled by sqrt(weight)) and solves it by
/// least squares, min-norm or ridge according to cfg.method.
FitResult solve_linear(const ProblemSpec& problem, const FeatureSet& fs, const CollocationSet& pts,
                       const SolverConfig& cfg);

/// Levenberg-Marquardt on the stacked residual [sqrt(w_g) r_g; sqrt(mu) c]
/// from c = 0. Each iteration first tries the undamped Gauss-Newton step,
/// then damped steps with damping multiplied by 4 per rejection; an accepted
/// damped step halves the damping. Stops when |step| <= tol_step (1 + |c|),
/// the weighted residual norm drops below tol_residual, or after
/// max_iterations.
FitResult solve_gauss_newton(const ProblemSpec& problem, const FeatureSet& fs, const CollocationSet& pts,
                             const SolverConfig& cfg);

/// Full-batch gradient descent from c = 0 with a fixed step. Fifty
/// consecutive objective increases stop the run with converged = false.
FitResult solve_gradient_descent(const ProblemSpec& problem, const FeatureSet& fs,
                                 const CollocationSet& pts, const SolverConfig& cfg);

/// Dispatches on cfg.method.
FitResult fit(const ProblemSpec& problem, const FeatureSet& fs, const CollocationSet& pts,
              const SolverConfig& cfg);

struct RegressionMode {
  enum class Kind { ridge, min_norm } kind = Kind::min_norm;
  double lambda = 0.0;

  static RegressionMode ridge(double lambda) { return {Kind::ridge, lambda}; }
  static RegressionMode min_norm() { return {Kind::min_norm, 0.0}; }
};

/// Fits targets at `points` (rows) with the feature matrix A_jk = phi_k(x_j).
Model fit_regression(const Eigen::Ref<const MatrixXd>& points, const Eigen::Ref<const VectorXd>& targets,
                     const FeatureSet& fs, RegressionMode mode);

}  // namespace rfpde
