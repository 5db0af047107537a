#pragma once

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace rfpde {

using Eigen::Index;
using Eigen::VectorXd;

/// Local solution data that a second-order operator without mixed partials
/// depends on.
struct OperatorPoint {
  double u = 0.0;
  VectorXd grad;         // du/dx_i
  VectorXd second_pure;  // d^2u/dx_i^2
  VectorXd x;

  static OperatorPoint zero(const VectorXd& x) {
    return {0.0, VectorXd::Zero(x.size()), VectorXd::Zero(x.size()), x};
  }
};

using ScalarField = std::function<double(const VectorXd&)>;
using VectorField = std::function<VectorXd(const VectorXd&)>;

/// Pointwise residual R(u, grad u, diag Hess u; x) with its exact partials.
///
/// The residual includes the data term, so a solution satisfies R = 0. For
/// linear operators R is affine in (u, grad, second_pure) and the partials are
/// independent of the point data.
struct PointOperator {
  std::function<double(const OperatorPoint&)> residual;
  std::function<double(const OperatorPoint&)> partial_u;
  std::function<VectorXd(const OperatorPoint&)> partial_grad;
  std::function<VectorXd(const OperatorPoint&)> partial_second;
  bool is_linear = false;
};

/// Dirichlet operator u - g(x).
PointOperator dirichlet_operator(ScalarField data);

struct DomainBox {
  VectorXd lower;
  VectorXd upper;

  Index dim() const { return lower.size(); }
  void validate() const;
};

enum class Side { lower, upper };

/// Face of a box where coordinate `axis` equals its lower or upper bound.
struct Face {
  Index axis = 0;
  Side side = Side::lower;

  friend bool operator==(const Face&, const Face&) = default;
};

/// All 2d faces in lexicographic order (axis, then lower before upper).
std::vector<Face> all_faces(Index dim);

struct BoundaryGroup {
  std::string name;
  PointOperator op;
  ScalarField data;          // g on this group
  std::vector<Face> faces;
  double weight = 1.0;       // residual weight in the regularized objective
  Index default_points = 0;  // default collocation count
};

struct TrueSolution {
  ScalarField value;
  VectorField grad;
  VectorField second_pure;
};

struct ProblemSpec {
  std::string name;
  DomainBox domain;
  PointOperator interior;
  ScalarField source;
  std::vector<BoundaryGroup> boundary_groups;
  std::optional<TrueSolution> true_solution;
  Index default_interior_points = 0;

  Index dim() const { return domain.dim(); }
  bool is_linear() const;
  /// OperatorPoint built from the manufactured solution at x.
  /// Throws UnsupportedError when no true solution is attached.
  OperatorPoint true_point(const VectorXd& x) const;
};

/// -Laplace(u) + u^3 = f on [0,1]^2, u = 0 on the boundary.
ProblemSpec builtin_nonlinear_elliptic();
/// -div((u^2 - u) grad u) = f on [-1,1]^d, Dirichlet data from the true solution.
ProblemSpec builtin_nonlinear_poisson(Index dim);
/// Laplace(u) + u^3 - u = f on [0,1]^2 with solution sin(2 pi a x1) cos(2 pi a x2).
ProblemSpec builtin_allen_cahn(double frequency);
/// u_t - u_xx + u_x = f on (x, t) in [-1,1] x [0,1]; two groups: spatial
/// boundary and initial slice.
ProblemSpec builtin_advection_diffusion();
/// -Laplace(u) + u = f on [0,1]^2 with solution sin(pi x1) sin(pi x2).
ProblemSpec builtin_linear_elliptic();

/// Names accepted by make_problem.
const std::vector<std::string>& builtin_problem_names();

struct ProblemParams {
  Index dim = 2;           // nonlinear-poisson only
  double frequency = 1.0;  // allen-cahn only
};

/// Looks up a builtin by its CLI name; throws ParameterError when unknown.
ProblemSpec make_problem(const std::string& name, const ProblemParams& params = {});

}  // namespace rfpde
