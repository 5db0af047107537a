#include "rfpde/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rfpde/errors.hpp"

namespace rfpde {

Index CollocationSet::boundary_size() const {
  Index n = 0;
  for (const auto& b : boundary) n += b.points.rows();
  return n;
}

MatrixXd sample_box_uniform(const DomainBox& box, Index n, Rng& rng) {
  MatrixXd pts(n, box.dim());
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < box.dim(); ++i) {
      pts(j, i) = box.lower(i) + (box.upper(i) - box.lower(i)) * rng.uniform_open();
    }
  }
  return pts;
}

namespace {

// Row-major enumeration of an n^k tensor grid over selected axes.
MatrixXd tensor_grid(const DomainBox& box, Index n, const std::vector<Index>& axes, Index fixed_axis,
                     double fixed_value) {
  const Index d = box.dim();
  Index count = 1;
  for (std::size_t a = 0; a < axes.size(); ++a) count *= n;
  MatrixXd pts(count, d);
  for (Index row = 0; row < count; ++row) {
    Index rem = row;
    for (auto it = axes.rbegin(); it != axes.rend(); ++it) {
      const Index axis = *it;
      const Index idx = rem % n;
      rem /= n;
      const double t = n == 1 ? 0.5 : static_cast<double>(idx) / static_cast<double>(n - 1);
      pts(row, axis) = box.lower(axis) + t * (box.upper(axis) - box.lower(axis));
    }
    if (fixed_axis >= 0) pts(row, fixed_axis) = fixed_value;
  }
  return pts;
}

double face_value(const DomainBox& box, const Face& face) {
  return face.side == Side::lower ? box.lower(face.axis) : box.upper(face.axis);
}

MatrixXd face_probes(const DomainBox& box, const Face& face, Index n) {
  std::vector<Index> axes;
  for (Index i = 0; i < box.dim(); ++i) {
    if (i != face.axis) axes.push_back(i);
  }
  return tensor_grid(box, n, axes, face.axis, face_value(box, face));
}

}  // namespace

MatrixXd box_grid(const DomainBox& box, Index n_per_axis) {
  if (n_per_axis < 1) throw ParameterError("box_grid: need at least one point per axis");
  std::vector<Index> axes(static_cast<std::size_t>(box.dim()));
  for (Index i = 0; i < box.dim(); ++i) axes[static_cast<std::size_t>(i)] = i;
  return tensor_grid(box, n_per_axis, axes, -1, 0.0);
}

CollocationSet sample_collocation(const ProblemSpec& problem, Index m_interior,
                                  std::span<const Index> boundary_counts, std::uint64_t seed) {
  problem.domain.validate();
  if (boundary_counts.size() != problem.boundary_groups.size()) {
    throw ShapeError("sample_collocation: expected " + std::to_string(problem.boundary_groups.size()) +
                     " boundary counts, got " + std::to_string(boundary_counts.size()));
  }
  if (m_interior < 0) throw ParameterError("sample_collocation: negative interior count");
  Index total = m_interior;
  for (Index n : boundary_counts) {
    if (n < 0) throw ParameterError("sample_collocation: negative boundary count");
    total += n;
  }
  if (total == 0) throw EmptySetError("sample_collocation: no collocation points requested");

  const DomainBox& box = problem.domain;
  Rng rng(seed);
  CollocationSet set;
  set.seed = seed;
  set.scheme = SamplingScheme::uniform_random;
  set.interior = sample_box_uniform(box, m_interior, rng);

  for (std::size_t g = 0; g < problem.boundary_groups.size(); ++g) {
    const auto& group = problem.boundary_groups[g];
    const Index n = boundary_counts[g];
    const auto n_faces = static_cast<Index>(group.faces.size());
    if (n > 0 && n_faces == 0) throw ParameterError("sample_collocation: group '" + group.name + "' has no faces");

    MatrixXd pts(n, box.dim());
    Index row = 0;
    for (Index f = 0; f < n_faces; ++f) {
      const Face& face = group.faces[static_cast<std::size_t>(f)];
      const Index on_face = n / n_faces + (f < n % n_faces ? 1 : 0);
      for (Index j = 0; j < on_face; ++j, ++row) {
        for (Index i = 0; i < box.dim(); ++i) {
          pts(row, i) = i == face.axis ? face_value(box, face) : rng.uniform(box.lower(i), box.upper(i));
        }
      }
    }
    set.boundary.push_back({group.name, std::move(pts)});
  }
  return set;
}

CollocationSet sample_collocation(const ProblemSpec& problem, std::uint64_t seed) {
  std::vector<Index> counts;
  for (const auto& g : problem.boundary_groups) counts.push_back(g.default_points);
  return sample_collocation(problem, problem.default_interior_points, counts, seed);
}

void Model::validate() const {
  if (coefficients.size() != features.size()) {
    throw ShapeError("model: coefficient count does not match feature count");
  }
}

OperatorPoint model_eval(const Model& model, const Eigen::Ref<const VectorXd>& x) {
  model.validate();
  const FeatureEval fe = eval_features(model.features, x);
  OperatorPoint p;
  p.u = fe.values.dot(model.coefficients);
  p.grad = fe.gradients.transpose() * model.coefficients;
  p.second_pure = fe.second_pure_partials.transpose() * model.coefficients;
  p.x = x;
  return p;
}

VectorXd model_values(const Model& model, const Eigen::Ref<const MatrixXd>& points) {
  model.validate();
  return eval_feature_block(model.features, points).cos * model.coefficients;
}

// ---------------------------------------------------------------------------

CollocationSystem::CollocationSystem(const ProblemSpec& problem, const FeatureSet& fs,
                                     const CollocationSet& pts)
    : problem_(problem), features_(fs), weights_squared_(fs.weights.array().square().matrix()) {
  if (fs.dim() != problem.dim()) {
    throw ShapeError("collocation system: feature dimension " + std::to_string(fs.dim()) +
                     " does not match problem dimension " + std::to_string(problem.dim()));
  }
  if (pts.boundary.size() != problem.boundary_groups.size()) {
    throw ShapeError("collocation system: boundary point groups do not match problem groups");
  }
  auto add = [&](const MatrixXd& points) {
    if (points.rows() > 0 && points.cols() != problem.dim()) {
      throw ShapeError("collocation system: point dimension does not match problem dimension");
    }
    blocks_.push_back({points, eval_feature_block(features_, points)});
  };
  add(pts.interior);
  for (const auto& b : pts.boundary) add(b.points);
}

Index CollocationSystem::total_rows() const {
  Index n = 0;
  for (const auto& b : blocks_) n += b.points.rows();
  return n;
}

const PointOperator& CollocationSystem::op(std::size_t b) const {
  return b == 0 ? problem_.interior : problem_.boundary_groups[b - 1].op;
}

std::vector<OperatorPoint> CollocationSystem::states(std::size_t b, const VectorXd& c) const {
  if (c.size() != n_features()) throw ShapeError("collocation system: coefficient length mismatch");
  const Block& block = blocks_[b];
  const VectorXd u = block.phases.cos * c;
  const MatrixXd grad = -block.phases.sin * (c.asDiagonal() * features_.weights);
  const MatrixXd second = -block.phases.cos * (c.asDiagonal() * weights_squared_);

  std::vector<OperatorPoint> out(static_cast<std::size_t>(block.points.rows()));
  for (Index j = 0; j < block.points.rows(); ++j) {
    auto& p = out[static_cast<std::size_t>(j)];
    p.u = u(j);
    p.grad = grad.row(j).transpose();
    p.second_pure = second.row(j).transpose();
    p.x = block.points.row(j).transpose();
  }
  return out;
}

VectorXd CollocationSystem::residual(std::size_t b, const VectorXd& c) const {
  const auto& oper = op(b);
  const auto pts = states(b, c);
  VectorXd r(static_cast<Index>(pts.size()));
  for (std::size_t j = 0; j < pts.size(); ++j) r(static_cast<Index>(j)) = oper.residual(pts[j]);
  return r;
}

// J = C o (pu 1^T - PS W2^T) - S o (PG W^T), the chain rule through
// phi_k = cos, d_i phi_k = -w_ki sin, d_ii phi_k = -w_ki^2 cos.
MatrixXd CollocationSystem::combine(const Block& block, const VectorXd& pu, const MatrixXd& pg,
                                    const MatrixXd& ps) const {
  MatrixXd cos_factor = -ps * weights_squared_.transpose();
  cos_factor.colwise() += pu;
  const MatrixXd sin_factor = pg * features_.weights.transpose();
  return (block.phases.cos.array() * cos_factor.array() - block.phases.sin.array() * sin_factor.array())
      .matrix();
}

MatrixXd CollocationSystem::jacobian(std::size_t b, const VectorXd& c) const {
  const auto& oper = op(b);
  const Block& block = blocks_[b];
  const auto pts = states(b, c);
  const Index m = block.points.rows();
  const Index d = features_.dim();
  VectorXd pu(m);
  MatrixXd pg(m, d), ps(m, d);
  for (Index j = 0; j < m; ++j) {
    const auto& p = pts[static_cast<std::size_t>(j)];
    pu(j) = oper.partial_u(p);
    pg.row(j) = oper.partial_grad(p).transpose();
    ps.row(j) = oper.partial_second(p).transpose();
  }
  return combine(block, pu, pg, ps);
}

LinearSystem CollocationSystem::linear_block(std::size_t b) const {
  const auto& oper = op(b);
  if (!oper.is_linear) throw LinearityError("linear assembly: operator is nonlinear");
  const Block& block = blocks_[b];
  const Index m = block.points.rows();
  const Index d = features_.dim();
  VectorXd pu(m), rhs(m);
  MatrixXd pg(m, d), ps(m, d);
  for (Index j = 0; j < m; ++j) {
    const OperatorPoint zero = OperatorPoint::zero(block.points.row(j).transpose());
    pu(j) = oper.partial_u(zero);
    pg.row(j) = oper.partial_grad(zero).transpose();
    ps.row(j) = oper.partial_second(zero).transpose();
    rhs(j) = -oper.residual(zero);
  }
  return {combine(block, pu, pg, ps), rhs, {m}};
}

// ---------------------------------------------------------------------------

Residuals residual_vector(const Model& model, const ProblemSpec& problem, const CollocationSet& pts) {
  model.validate();
  const CollocationSystem sys(problem, model.features, pts);
  Residuals out;
  out.interior = sys.residual(0, model.coefficients);
  for (std::size_t b = 1; b < sys.n_blocks(); ++b) out.boundary.push_back(sys.residual(b, model.coefficients));
  return out;
}

Jacobians residual_jacobian(const Model& model, const ProblemSpec& problem, const CollocationSet& pts) {
  model.validate();
  const CollocationSystem sys(problem, model.features, pts);
  Jacobians out;
  out.interior = sys.jacobian(0, model.coefficients);
  for (std::size_t b = 1; b < sys.n_blocks(); ++b) out.boundary.push_back(sys.jacobian(b, model.coefficients));
  return out;
}

LinearSystem assemble_linear_system(const ProblemSpec& problem, const FeatureSet& fs,
                                    const CollocationSet& pts) {
  if (!problem.is_linear()) {
    throw LinearityError("assemble_linear_system: problem '" + problem.name + "' is nonlinear");
  }
  const CollocationSystem sys(problem, fs, pts);
  LinearSystem out;
  out.matrix.resize(sys.total_rows(), fs.size());
  out.rhs.resize(sys.total_rows());
  Index row = 0;
  for (std::size_t b = 0; b < sys.n_blocks(); ++b) {
    LinearSystem blk = sys.linear_block(b);
    const Index m = blk.matrix.rows();
    out.matrix.middleRows(row, m) = blk.matrix;
    out.rhs.segment(row, m) = blk.rhs;
    out.block_rows.push_back(m);
    row += m;
  }
  return out;
}

// ---------------------------------------------------------------------------

double fill_distance(const Eigen::Ref<const MatrixXd>& points, const Eigen::Ref<const MatrixXd>& probes) {
  if (points.rows() == 0) throw EmptySetError("fill_distance: empty point set");
  double worst = 0.0;
  for (Index p = 0; p < probes.rows(); ++p) {
    const double nearest = (points.rowwise() - probes.row(p)).rowwise().squaredNorm().minCoeff();
    worst = std::max(worst, nearest);
  }
  return std::sqrt(worst);
}

FillDistances fill_distance(const ProblemSpec& problem, const CollocationSet& pts, Index probe_density) {
  if (probe_density < 1) throw ParameterError("fill_distance: probe density must be >= 1");
  const DomainBox& box = problem.domain;
  FillDistances out;
  out.interior = fill_distance(pts.interior, box_grid(box, probe_density));

  MatrixXd boundary(pts.boundary_size(), box.dim());
  Index row = 0;
  for (const auto& b : pts.boundary) {
    boundary.middleRows(row, b.points.rows()) = b.points;
    row += b.points.rows();
  }
  std::vector<Face> faces;
  for (const auto& g : problem.boundary_groups) {
    for (const auto& f : g.faces) {
      if (std::find(faces.begin(), faces.end(), f) == faces.end()) faces.push_back(f);
    }
  }
  if (faces.empty()) {
    out.boundary = 0.0;
    return out;
  }
  for (const auto& f : faces) {
    out.boundary = std::max(out.boundary, fill_distance(boundary, face_probes(box, f, probe_density)));
  }
  return out;
}

}  // namespace rfpde
