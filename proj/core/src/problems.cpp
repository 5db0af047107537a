#include "rfpde/problems.hpp"

#include <cmath>
#include <numbers>

#include "rfpde/errors.hpp"

namespace rfpde {

namespace {

constexpr double pi = std::numbers::pi;

DomainBox unit_square() { return {VectorXd::Zero(2), VectorXd::Ones(2)}; }

PointOperator with_source(PointOperator op, ScalarField source) {
  // residual(p) = operator part - f(x)
  auto part = std::move(op.residual);
  op.residual = [part = std::move(part), source = std::move(source)](const OperatorPoint& p) {
    return part(p) - source(p.x);
  };
  return op;
}

VectorXd zeros_like(const OperatorPoint& p) { return VectorXd::Zero(p.x.size()); }

}  // namespace

PointOperator dirichlet_operator(ScalarField data) {
  PointOperator op;
  op.residual = [data = std::move(data)](const OperatorPoint& p) { return p.u - data(p.x); };
  op.partial_u = [](const OperatorPoint&) { return 1.0; };
  op.partial_grad = zeros_like;
  op.partial_second = zeros_like;
  op.is_linear = true;
  return op;
}

void DomainBox::validate() const {
  if (lower.size() < 1 || lower.size() != upper.size()) {
    throw ShapeError("domain box: bounds must have equal positive dimension");
  }
  for (Index i = 0; i < lower.size(); ++i) {
    if (!(lower(i) < upper(i))) throw ParameterError("domain box: lower must be < upper");
  }
}

std::vector<Face> all_faces(Index dim) {
  std::vector<Face> faces;
  for (Index axis = 0; axis < dim; ++axis) {
    faces.push_back({axis, Side::lower});
    faces.push_back({axis, Side::upper});
  }
  return faces;
}

bool ProblemSpec::is_linear() const {
  if (!interior.is_linear) return false;
  for (const auto& g : boundary_groups) {
    if (!g.op.is_linear) return false;
  }
  return true;
}

OperatorPoint ProblemSpec::true_point(const VectorXd& x) const {
  if (!true_solution) throw UnsupportedError(name + ": no manufactured solution attached");
  return {true_solution->value(x), true_solution->grad(x), true_solution->second_pure(x), x};
}

ProblemSpec builtin_nonlinear_elliptic() {
  // u = sin(pi x) sin(pi y) + 4 sin(4 pi x) sin(4 pi y)
  TrueSolution sol;
  sol.value = [](const VectorXd& x) {
    return std::sin(pi * x(0)) * std::sin(pi * x(1)) +
           4.0 * std::sin(4 * pi * x(0)) * std::sin(4 * pi * x(1));
  };
  sol.grad = [](const VectorXd& x) {
    VectorXd g(2);
    g(0) = pi * std::cos(pi * x(0)) * std::sin(pi * x(1)) +
           16.0 * pi * std::cos(4 * pi * x(0)) * std::sin(4 * pi * x(1));
    g(1) = pi * std::sin(pi * x(0)) * std::cos(pi * x(1)) +
           16.0 * pi * std::sin(4 * pi * x(0)) * std::cos(4 * pi * x(1));
    return g;
  };
  sol.second_pure = [](const VectorXd& x) {
    const double low = std::sin(pi * x(0)) * std::sin(pi * x(1));
    const double high = std::sin(4 * pi * x(0)) * std::sin(4 * pi * x(1));
    const double each = -pi * pi * low - 64.0 * pi * pi * high;
    return VectorXd::Constant(2, each);
  };

  ScalarField source = [](const VectorXd& x) {
    const double low = std::sin(pi * x(0)) * std::sin(pi * x(1));
    const double high = std::sin(4 * pi * x(0)) * std::sin(4 * pi * x(1));
    const double u = low + 4.0 * high;
    return 2.0 * pi * pi * low + 128.0 * pi * pi * high + u * u * u;
  };

  PointOperator op;
  op.residual = [](const OperatorPoint& p) { return -p.second_pure.sum() + p.u * p.u * p.u; };
  op.partial_u = [](const OperatorPoint& p) { return 3.0 * p.u * p.u; };
  op.partial_grad = zeros_like;
  op.partial_second = [](const OperatorPoint& p) { return VectorXd::Constant(p.x.size(), -1.0); };
  op.is_linear = false;

  ProblemSpec spec;
  spec.name = "nonlinear-elliptic";
  spec.domain = unit_square();
  spec.interior = with_source(std::move(op), source);
  spec.source = source;
  ScalarField zero = [](const VectorXd&) { return 0.0; };
  spec.boundary_groups.push_back({"boundary", dirichlet_operator(zero), zero, all_faces(2), 1.0, 124});
  spec.true_solution = std::move(sol);
  spec.default_interior_points = 900;
  return spec;
}

ProblemSpec builtin_nonlinear_poisson(Index dim) {
  if (dim < 1) throw ParameterError("nonlinear-poisson: dimension must be >= 1");
  const double d = static_cast<double>(dim);

  // u = exp(-(1/d) sum x_i)
  auto value = [d](const VectorXd& x) { return std::exp(-x.sum() / d); };
  TrueSolution sol;
  sol.value = value;
  sol.grad = [d, value](const VectorXd& x) { return VectorXd::Constant(x.size(), -value(x) / d); };
  sol.second_pure = [d, value](const VectorXd& x) {
    return VectorXd::Constant(x.size(), value(x) / (d * d));
  };

  ScalarField source = [d](const VectorXd& x) {
    const double s = x.sum();
    return (-3.0 * std::exp(-3.0 * s / d) + 2.0 * std::exp(-2.0 * s / d)) / d;
  };

  // -div(a(u) grad u) = -a'(u) |grad u|^2 - a(u) lap(u), a(u) = u^2 - u
  PointOperator op;
  op.residual = [](const OperatorPoint& p) {
    return -((2.0 * p.u - 1.0) * p.grad.squaredNorm() + (p.u * p.u - p.u) * p.second_pure.sum());
  };
  op.partial_u = [](const OperatorPoint& p) {
    return -(2.0 * p.grad.squaredNorm() + (2.0 * p.u - 1.0) * p.second_pure.sum());
  };
  op.partial_grad = [](const OperatorPoint& p) {
    return VectorXd(-2.0 * (2.0 * p.u - 1.0) * p.grad);
  };
  op.partial_second = [](const OperatorPoint& p) {
    return VectorXd::Constant(p.x.size(), -(p.u * p.u - p.u));
  };
  op.is_linear = false;

  ProblemSpec spec;
  spec.name = "nonlinear-poisson";
  spec.domain = {VectorXd::Constant(dim, -1.0), VectorXd::Constant(dim, 1.0)};
  spec.interior = with_source(std::move(op), source);
  spec.source = source;
  spec.boundary_groups.push_back({"boundary", dirichlet_operator(value), value, all_faces(dim), 1.0, 124});
  spec.true_solution = std::move(sol);
  spec.default_interior_points = 900;
  return spec;
}

ProblemSpec builtin_allen_cahn(double frequency) {
  if (!(frequency > 0.0)) throw ParameterError("allen-cahn: frequency must be positive");
  const double w = 2.0 * pi * frequency;

  auto value = [w](const VectorXd& x) { return std::sin(w * x(0)) * std::cos(w * x(1)); };
  TrueSolution sol;
  sol.value = value;
  sol.grad = [w](const VectorXd& x) {
    VectorXd g(2);
    g(0) = w * std::cos(w * x(0)) * std::cos(w * x(1));
    g(1) = -w * std::sin(w * x(0)) * std::sin(w * x(1));
    return g;
  };
  sol.second_pure = [w, value](const VectorXd& x) {
    return VectorXd::Constant(2, -w * w * value(x));
  };

  ScalarField source = [w, value](const VectorXd& x) {
    const double u = value(x);
    return -2.0 * w * w * u + u * u * u - u;
  };

  PointOperator op;
  op.residual = [](const OperatorPoint& p) {
    return p.second_pure.sum() + p.u * p.u * p.u - p.u;
  };
  op.partial_u = [](const OperatorPoint& p) { return 3.0 * p.u * p.u - 1.0; };
  op.partial_grad = zeros_like;
  op.partial_second = [](const OperatorPoint& p) { return VectorXd::Constant(p.x.size(), 1.0); };
  op.is_linear = false;

  ProblemSpec spec;
  spec.name = "allen-cahn";
  spec.domain = unit_square();
  spec.interior = with_source(std::move(op), source);
  spec.source = source;
  spec.boundary_groups.push_back({"boundary", dirichlet_operator(value), value, all_faces(2), 1.0, 124});
  spec.true_solution = std::move(sol);
  spec.default_interior_points = 900;
  return spec;
}

ProblemSpec builtin_advection_diffusion() {
  // coordinates (x, t); u = sin(x) exp(-t)
  auto value = [](const VectorXd& x) { return std::sin(x(0)) * std::exp(-x(1)); };
  TrueSolution sol;
  sol.value = value;
  sol.grad = [](const VectorXd& x) {
    VectorXd g(2);
    g(0) = std::cos(x(0)) * std::exp(-x(1));
    g(1) = -std::sin(x(0)) * std::exp(-x(1));
    return g;
  };
  sol.second_pure = [value](const VectorXd& x) {
    VectorXd s(2);
    s(0) = -value(x);
    s(1) = value(x);
    return s;
  };

  ScalarField source = [](const VectorXd& x) { return std::cos(x(0)) * std::exp(-x(1)); };

  PointOperator op;
  op.residual = [](const OperatorPoint& p) { return p.grad(1) - p.second_pure(0) + p.grad(0); };
  op.partial_u = [](const OperatorPoint&) { return 0.0; };
  op.partial_grad = [](const OperatorPoint&) { return VectorXd::Ones(2).eval(); };
  op.partial_second = [](const OperatorPoint&) {
    VectorXd s(2);
    s << -1.0, 0.0;
    return s;
  };
  op.is_linear = true;

  ProblemSpec spec;
  spec.name = "advection-diffusion";
  VectorXd lower(2), upper(2);
  lower << -1.0, 0.0;
  upper << 1.0, 1.0;
  spec.domain = {lower, upper};
  spec.interior = with_source(std::move(op), source);
  spec.source = source;
  ScalarField initial = [](const VectorXd& x) { return std::sin(x(0)); };
  spec.boundary_groups.push_back({"boundary", dirichlet_operator(value), value,
                                  {{0, Side::lower}, {0, Side::upper}}, 1.0, 100});
  spec.boundary_groups.push_back({"initial", dirichlet_operator(initial), initial,
                                  {{1, Side::lower}}, 1.0, 200});
  spec.true_solution = std::move(sol);
  spec.default_interior_points = 1000;
  return spec;
}

ProblemSpec builtin_linear_elliptic() {
  auto value = [](const VectorXd& x) { return std::sin(pi * x(0)) * std::sin(pi * x(1)); };
  TrueSolution sol;
  sol.value = value;
  sol.grad = [](const VectorXd& x) {
    VectorXd g(2);
    g(0) = pi * std::cos(pi * x(0)) * std::sin(pi * x(1));
    g(1) = pi * std::sin(pi * x(0)) * std::cos(pi * x(1));
    return g;
  };
  sol.second_pure = [value](const VectorXd& x) { return VectorXd::Constant(2, -pi * pi * value(x)); };

  ScalarField source = [value](const VectorXd& x) { return (2.0 * pi * pi + 1.0) * value(x); };

  PointOperator op;
  op.residual = [](const OperatorPoint& p) { return -p.second_pure.sum() + p.u; };
  op.partial_u = [](const OperatorPoint&) { return 1.0; };
  op.partial_grad = zeros_like;
  op.partial_second = [](const OperatorPoint& p) { return VectorXd::Constant(p.x.size(), -1.0); };
  op.is_linear = true;

  ProblemSpec spec;
  spec.name = "linear-elliptic";
  spec.domain = unit_square();
  spec.interior = with_source(std::move(op), source);
  spec.source = source;
  ScalarField zero = [](const VectorXd&) { return 0.0; };
  spec.boundary_groups.push_back({"boundary", dirichlet_operator(zero), zero, all_faces(2), 1.0, 124});
  spec.true_solution = std::move(sol);
  spec.default_interior_points = 900;
  return spec;
}

const std::vector<std::string>& builtin_problem_names() {
  static const std::vector<std::string> names = {
      "nonlinear-elliptic", "nonlinear-poisson", "allen-cahn", "advection-diffusion",
      "linear-elliptic"};
  return names;
}

ProblemSpec make_problem(const std::string& name, const ProblemParams& params) {
  if (name == "nonlinear-elliptic") return builtin_nonlinear_elliptic();
  if (name == "nonlinear-poisson") return builtin_nonlinear_poisson(params.dim);
  if (name == "allen-cahn") return builtin_allen_cahn(params.frequency);
  if (name == "advection-diffusion") return builtin_advection_diffusion();
  if (name == "linear-elliptic") return builtin_linear_elliptic();
  throw ParameterError("unknown problem '" + name + "'");
}

}  // namespace rfpde
