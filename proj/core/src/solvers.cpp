#include "rfpde/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rfpde/errors.hpp"

namespace rfpde {

std::string to_string(SolverMethod method) {
  switch (method) {
    case SolverMethod::linear_ls:
      return "linear-ls";
    case SolverMethod::linear_minnorm:
      return "linear-minnorm";
    case SolverMethod::ridge:
      return "ridge";
    case SolverMethod::gauss_newton:
      return "gauss-newton";
    case SolverMethod::gradient_descent:
      return "gd";
  }
  return "unknown";
}

SolverMethod solver_method_from_string(const std::string& name) {
  if (name == "linear-ls") return SolverMethod::linear_ls;
  if (name == "linear-minnorm") return SolverMethod::linear_minnorm;
  if (name == "ridge") return SolverMethod::ridge;
  if (name == "gauss-newton") return SolverMethod::gauss_newton;
  if (name == "gd" || name == "gradient-descent") return SolverMethod::gradient_descent;
  throw ParameterError("unknown solver '" + name + "'");
}

void SolverConfig::validate() const {
  auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
  if (!(reg_weight >= 0.0) || !std::isfinite(reg_weight)) {
    throw ParameterError("solver: reg_weight must be nonnegative");
  }
  if (method == SolverMethod::ridge && !positive(reg_weight)) {
    throw ParameterError("solver: ridge requires a positive penalty");
  }
  if (!positive(interior_weight)) throw ParameterError("solver: interior weight must be positive");
  if (boundary_weight && !positive(*boundary_weight)) {
    throw ParameterError("solver: boundary weight must be positive");
  }
  if (max_iterations < 1) throw ParameterError("solver: max_iterations must be >= 1");
  if (!positive(step_size)) throw ParameterError("solver: step size must be positive");
  if (!positive(tol_residual) || !positive(tol_step)) {
    throw ParameterError("solver: tolerances must be positive");
  }
  if (!positive(lm_damping_init)) throw ParameterError("solver: initial damping must be positive");
  if (lm_max_rejections < 0) throw ParameterError("solver: lm_max_rejections must be >= 0");
}

// ---------------------------------------------------------------------------
// Dense linear solves

double rank_tolerance(Index rows, Index cols) {
  return static_cast<double>(std::max(rows, cols)) * std::numeric_limits<double>::epsilon();
}

namespace {

void check_system(const Eigen::Ref<const MatrixXd>& matrix, const Eigen::Ref<const VectorXd>& rhs,
                  const char* where) {
  if (matrix.rows() != rhs.size()) {
    throw ShapeError(std::string(where) + ": matrix has " + std::to_string(matrix.rows()) +
                     " rows but rhs has " + std::to_string(rhs.size()));
  }
  if (matrix.cols() == 0) throw ShapeError(std::string(where) + ": matrix has no columns");
}

LinearSolution finish(const Eigen::Ref<const MatrixXd>& matrix, const Eigen::Ref<const VectorXd>& rhs,
                      VectorXd c, Index rank) {
  LinearSolution out;
  out.ok = rank > 0;
  if (!out.ok) c.setZero();
  out.residual_norm = (matrix * c - rhs).norm();
  out.coefficients = std::move(c);
  out.rank = rank;
  return out;
}

}  // namespace

LinearSolution solve_least_squares(const Eigen::Ref<const MatrixXd>& matrix,
                                   const Eigen::Ref<const VectorXd>& rhs) {
  check_system(matrix, rhs, "solve_least_squares");
  if (matrix.rows() < matrix.cols()) return solve_min_norm(matrix, rhs);
  if (matrix.isZero(0.0)) return finish(matrix, rhs, VectorXd::Zero(matrix.cols()), 0);

  Eigen::CompleteOrthogonalDecomposition<MatrixXd> cod;
  cod.setThreshold(rank_tolerance(matrix.rows(), matrix.cols()));
  cod.compute(matrix);
  return finish(matrix, rhs, cod.solve(rhs), cod.rank());
}

LinearSolution solve_min_norm(const Eigen::Ref<const MatrixXd>& matrix,
                              const Eigen::Ref<const VectorXd>& rhs) {
  check_system(matrix, rhs, "solve_min_norm");
  if (matrix.isZero(0.0)) return finish(matrix, rhs, VectorXd::Zero(matrix.cols()), 0);

  Eigen::BDCSVD<MatrixXd> svd(matrix, Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd.setThreshold(rank_tolerance(matrix.rows(), matrix.cols()));
  return finish(matrix, rhs, svd.solve(rhs), svd.rank());
}

LinearSolution solve_ridge(const Eigen::Ref<const MatrixXd>& matrix, const Eigen::Ref<const VectorXd>& rhs,
                           double lambda) {
  check_system(matrix, rhs, "solve_ridge");
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw ParameterError("solve_ridge: lambda must be positive");

  const Index m = matrix.rows();
  const Index n = matrix.cols();
  MatrixXd stacked(m + n, n);
  stacked.topRows(m) = matrix;
  stacked.bottomRows(n) = std::sqrt(lambda) * MatrixXd::Identity(n, n);
  VectorXd target = VectorXd::Zero(m + n);
  target.head(m) = rhs;

  const VectorXd c = Eigen::HouseholderQR<MatrixXd>(stacked).solve(target);
  LinearSolution out = finish(matrix, rhs, c, n);
  out.ok = true;
  return out;
}

// ---------------------------------------------------------------------------
// Objective

std::vector<double> block_weights(const ProblemSpec& problem, const SolverConfig& cfg) {
  std::vector<double> w{cfg.interior_weight};
  for (const auto& g : problem.boundary_groups) w.push_back(cfg.boundary_weight.value_or(g.weight));
  return w;
}

namespace {

double weighted_sum(const std::vector<VectorXd>& residuals, const std::vector<double>& weights) {
  double total = 0.0;
  for (std::size_t b = 0; b < residuals.size(); ++b) total += weights[b] * residuals[b].squaredNorm();
  return total;
}

std::vector<VectorXd> all_residuals(const CollocationSystem& sys, const VectorXd& c) {
  std::vector<VectorXd> r;
  for (std::size_t b = 0; b < sys.n_blocks(); ++b) r.push_back(sys.residual(b, c));
  return r;
}

std::vector<double> norms(const std::vector<VectorXd>& residuals) {
  std::vector<double> out;
  for (const auto& r : residuals) out.push_back(r.norm());
  return out;
}

void check_method(const SolverConfig& cfg, SolverMethod expected, const char* where) {
  cfg.validate();
  if (cfg.method != expected) {
    throw ParameterError(std::string(where) + ": configuration selects solver '" + to_string(cfg.method) + "'");
  }
}

}  // namespace

double objective(const CollocationSystem& sys, const std::vector<double>& weights, double reg_weight,
                 const VectorXd& c) {
  return reg_weight * c.squaredNorm() + weighted_sum(all_residuals(sys, c), weights);
}

VectorXd objective_gradient(const CollocationSystem& sys, const std::vector<double>& weights,
                            double reg_weight, const VectorXd& c) {
  VectorXd grad = 2.0 * reg_weight * c;
  for (std::size_t b = 0; b < sys.n_blocks(); ++b) {
    if (sys.block_rows(b) == 0) continue;
    grad.noalias() += 2.0 * weights[b] * (sys.jacobian(b, c).transpose() * sys.residual(b, c));
  }
  return grad;
}

// ---------------------------------------------------------------------------
// Linear PDEs

FitResult solve_linear(const ProblemSpec& problem, const FeatureSet& fs, const CollocationSet& pts,
                       const SolverConfig& cfg) {
  cfg.validate();
  const LinearSystem sys = assemble_linear_system(problem, fs, pts);
  const auto weights = block_weights(problem, cfg);

  MatrixXd scaled = sys.matrix;
  VectorXd target = sys.rhs;
  Index row = 0;
  for (std::size_t b = 0; b < sys.block_rows.size(); ++b) {
    const double s = std::sqrt(weights[b]);
    scaled.middleRows(row, sys.block_rows[b]) *= s;
    target.segment(row, sys.block_rows[b]) *= s;
    row += sys.block_rows[b];
  }

  LinearSolution sol;
  switch (cfg.method) {
    case SolverMethod::linear_ls:
      sol = solve_least_squares(scaled, target);
      break;
    case SolverMethod::linear_minnorm:
      sol = solve_min_norm(scaled, target);
      break;
    case SolverMethod::ridge:
      sol = solve_ridge(scaled, target, cfg.reg_weight);
      break;
    default:
      throw ParameterError("solve_linear: '" + to_string(cfg.method) + "' is not a linear method");
  }

  FitResult out{Model{fs, sol.coefficients}, {}};
  const VectorXd misfit = sys.matrix * sol.coefficients - sys.rhs;
  row = 0;
  double weighted = 0.0;
  for (std::size_t b = 0; b < sys.block_rows.size(); ++b) {
    const auto seg = misfit.segment(row, sys.block_rows[b]);
    out.report.residual_norms.push_back(seg.norm());
    weighted += weights[b] * seg.squaredNorm();
    row += sys.block_rows[b];
  }
  const double penalty = cfg.method == SolverMethod::ridge ? cfg.reg_weight : 0.0;
  out.report.final_objective = weighted + penalty * sol.coefficients.squaredNorm();
  out.report.objective_history = {out.report.final_objective};
  out.report.iterations_used = 1;
  out.report.converged = sol.ok;
  return out;
}

// ---------------------------------------------------------------------------
// Levenberg-Marquardt

namespace {

// Solves the damped subproblem
//   min |J d + r|^2 + mu |c + d|^2 + nu |d|^2
// for successive damping values nu at a fixed linearization point.
class DampedStep {
 public:
  DampedStep(MatrixXd jacobian, VectorXd residual, const VectorXd& c, double mu, StepSolver solver)
      : jac_(std::move(jacobian)), res_(std::move(residual)), c_(c), mu_(mu), solver_(solver) {
    if (solver_ == StepSolver::normal_equations) {
      const Index n = jac_.cols();
      normal_ = MatrixXd::Zero(n, n);
      normal_.selfadjointView<Eigen::Lower>().rankUpdate(jac_.transpose());
      gradient_ = jac_.transpose() * res_ + mu_ * c_;
    }
  }

  VectorXd solve(double nu) const {
    const Index n = jac_.cols();
    const double shift = mu_ + nu;
    if (solver_ == StepSolver::normal_equations) {
      MatrixXd h = normal_;
      h.diagonal().array() += shift;
      Eigen::LLT<MatrixXd> llt(h.selfadjointView<Eigen::Lower>());
      if (llt.info() != Eigen::Success) return VectorXd::Constant(n, std::numeric_limits<double>::quiet_NaN());
      return llt.solve(-gradient_);
    }
    // [J; sqrt(mu + nu) I] d = -[r; mu / sqrt(mu + nu) c] has the same normal
    // equations as the subproblem above.
    const Index m = jac_.rows();
    MatrixXd stacked(m + (shift > 0.0 ? n : 0), n);
    VectorXd target(stacked.rows());
    stacked.topRows(m) = jac_;
    target.head(m) = -res_;
    if (shift > 0.0) {
      const double s = std::sqrt(shift);
      stacked.bottomRows(n) = s * MatrixXd::Identity(n, n);
      target.tail(n) = -(mu_ / s) * c_;
    }
    return Eigen::HouseholderQR<MatrixXd>(stacked).solve(target);
  }

 private:
  MatrixXd jac_;
  VectorXd res_;
  VectorXd c_;
  double mu_;
  StepSolver solver_;
  MatrixXd normal_;
  VectorXd gradient_;
};

}  // namespace

FitResult solve_gauss_newton(const ProblemSpec& problem, const FeatureSet& fs, const CollocationSet& pts,
                             const SolverConfig& cfg) {
  check_method(cfg, SolverMethod::gauss_newton, "solve_gauss_newton");
  const CollocationSystem sys(problem, fs, pts);
  const auto weights = block_weights(problem, cfg);
  const double mu = cfg.reg_weight;
  const Index n = fs.size();

  VectorXd c = VectorXd::Zero(n);
  auto residuals = all_residuals(sys, c);
  double f = mu * c.squaredNorm() + weighted_sum(residuals, weights);
  if (!std::isfinite(f)) throw DivergenceError("gauss-newton: initial objective is not finite", c);

  FitReport report;
  report.objective_history.push_back(f);
  double damping = cfg.lm_damping_init;

  for (int iter = 1; iter <= cfg.max_iterations; ++iter) {
    report.iterations_used = iter;

    MatrixXd jac(sys.total_rows(), n);
    VectorXd res(sys.total_rows());
    Index row = 0;
    for (std::size_t b = 0; b < sys.n_blocks(); ++b) {
      const Index m = sys.block_rows(b);
      if (m == 0) continue;
      const double s = std::sqrt(weights[b]);
      jac.middleRows(row, m) = s * sys.jacobian(b, c);
      res.segment(row, m) = s * residuals[b];
      row += m;
    }
    const DampedStep step(std::move(jac), std::move(res), c, mu, cfg.step_solver);

    bool accepted = false;
    bool small_step = false;
    double step_norm = 0.0;
    for (int attempt = 0; attempt <= cfg.lm_max_rejections; ++attempt) {
      const bool damped = attempt > 0;
      const VectorXd delta = step.solve(damped ? damping : 0.0);
      if (delta.allFinite()) {
        step_norm = delta.norm();
        if (step_norm <= cfg.tol_step * (1.0 + c.norm())) {
          small_step = true;
          break;
        }
        VectorXd trial = c + delta;
        auto trial_res = all_residuals(sys, trial);
        const double trial_f = mu * trial.squaredNorm() + weighted_sum(trial_res, weights);
        if (std::isfinite(trial_f) && trial_f < f) {
          c = std::move(trial);
          residuals = std::move(trial_res);
          f = trial_f;
          if (damped) damping *= 0.5;
          accepted = true;
          break;
        }
      }
      if (damped) damping *= 4.0;
    }

    if (small_step) {
      report.converged = true;
      break;
    }
    if (!accepted) break;
    report.objective_history.push_back(f);
    if (std::sqrt(weighted_sum(residuals, weights)) <= cfg.tol_residual ||
        step_norm <= cfg.tol_step * (1.0 + c.norm())) {
      report.converged = true;
      break;
    }
  }

  report.final_objective = f;
  report.residual_norms = norms(residuals);
  return {Model{fs, std::move(c)}, std::move(report)};
}

// ---------------------------------------------------------------------------
// Gradient descent

FitResult solve_gradient_descent(const ProblemSpec& problem, const FeatureSet& fs,
                                 const CollocationSet& pts, const SolverConfig& cfg) {
  check_method(cfg, SolverMethod::gradient_descent, "solve_gradient_descent");
  constexpr int kMaxIncreases = 50;
  const CollocationSystem sys(problem, fs, pts);
  const auto weights = block_weights(problem, cfg);
  const double mu = cfg.reg_weight;

  VectorXd c = VectorXd::Zero(fs.size());
  auto residuals = all_residuals(sys, c);
  double f = mu * c.squaredNorm() + weighted_sum(residuals, weights);
  if (!std::isfinite(f)) throw DivergenceError("gradient descent: initial objective is not finite", c);

  FitReport report;
  report.objective_history.push_back(f);
  int increases = 0;

  for (int epoch = 1; epoch <= cfg.max_iterations; ++epoch) {
    report.iterations_used = epoch;
    VectorXd grad = 2.0 * mu * c;
    for (std::size_t b = 0; b < sys.n_blocks(); ++b) {
      if (sys.block_rows(b) == 0) continue;
      grad.noalias() += 2.0 * weights[b] * (sys.jacobian(b, c).transpose() * residuals[b]);
    }
    const VectorXd delta = -cfg.step_size * grad;
    VectorXd next = c + delta;
    auto next_res = all_residuals(sys, next);
    const double next_f = mu * next.squaredNorm() + weighted_sum(next_res, weights);
    if (!std::isfinite(next_f) || !next.allFinite()) {
      throw DivergenceError("gradient descent: objective overflowed at epoch " + std::to_string(epoch), c);
    }
    increases = next_f > f ? increases + 1 : 0;
    c = std::move(next);
    residuals = std::move(next_res);
    f = next_f;
    report.objective_history.push_back(f);

    if (increases >= kMaxIncreases) break;
    if (std::sqrt(weighted_sum(residuals, weights)) <= cfg.tol_residual ||
        delta.norm() <= cfg.tol_step * (1.0 + c.norm())) {
      report.converged = true;
      break;
    }
  }

  report.final_objective = f;
  report.residual_norms = norms(residuals);
  return {Model{fs, std::move(c)}, std::move(report)};
}

FitResult fit(const ProblemSpec& problem, const FeatureSet& fs, const CollocationSet& pts,
              const SolverConfig& cfg) {
  switch (cfg.method) {
    case SolverMethod::gauss_newton:
      return solve_gauss_newton(problem, fs, pts, cfg);
    case SolverMethod::gradient_descent:
      return solve_gradient_descent(problem, fs, pts, cfg);
    default:
      return solve_linear(problem, fs, pts, cfg);
  }
}

Model fit_regression(const Eigen::Ref<const MatrixXd>& points, const Eigen::Ref<const VectorXd>& targets,
                     const FeatureSet& fs, RegressionMode mode) {
  if (points.rows() < 1) throw EmptySetError("fit_regression: no samples");
  if (points.rows() != targets.size()) throw ShapeError("fit_regression: point and target counts differ");
  const MatrixXd a = eval_feature_block(fs, points).cos;
  const LinearSolution sol = mode.kind == RegressionMode::Kind::ridge ? solve_ridge(a, targets, mode.lambda)
                                                                      : solve_min_norm(a, targets);
  return Model{fs, sol.coefficients};
}

}  // namespace rfpde
