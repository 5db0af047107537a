#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "rfpde/assembly.hpp"
#include "rfpde/errors.hpp"

namespace rfpde {
namespace {

constexpr double pi = std::numbers::pi;

FeatureSet fixed_features(const MatrixXd& w, const VectorXd& b) {
  FeatureSet fs;
  fs.weights = w;
  fs.biases = b;
  fs.distribution = FeatureDistribution::gaussian(1.0, w.cols());
  return fs;
}

// -u'' = 0 on [0,1] with u = 0 at both ends.
ProblemSpec interval_problem() {
  ProblemSpec p;
  p.name = "interval";
  p.domain = {VectorXd::Zero(1), VectorXd::Ones(1)};
  p.interior.residual = [](const OperatorPoint& q) { return -q.second_pure(0); };
  p.interior.partial_u = [](const OperatorPoint&) { return 0.0; };
  p.interior.partial_grad = [](const OperatorPoint&) { return VectorXd::Zero(1).eval(); };
  p.interior.partial_second = [](const OperatorPoint&) { return VectorXd::Constant(1, -1.0).eval(); };
  p.interior.is_linear = true;
  p.source = [](const VectorXd&) { return 0.0; };
  ScalarField zero = [](const VectorXd&) { return 0.0; };
  p.boundary_groups.push_back({"boundary", dirichlet_operator(zero), zero, all_faces(1), 1.0, 2});
  return p;
}

TEST(SampleCollocation, IntervalEndpoints) {
  const std::vector<Index> counts{2};
  const auto set = sample_collocation(interval_problem(), 0, counts, 5);
  EXPECT_EQ(set.interior.rows(), 0);
  ASSERT_EQ(set.boundary.size(), 1u);
  ASSERT_EQ(set.boundary[0].points.rows(), 2);
  EXPECT_EQ(set.boundary[0].points(0, 0), 0.0);
  EXPECT_EQ(set.boundary[0].points(1, 0), 1.0);
}

TEST(SampleCollocation, DefaultCountsRoundRobin) {
  const auto p = builtin_nonlinear_elliptic();
  const std::vector<Index> counts{124};
  const auto set = sample_collocation(p, 900, counts, 11);
  EXPECT_EQ(set.interior.rows(), 900);
  EXPECT_EQ(set.boundary_size(), 124);
  EXPECT_EQ(set.total_size(), 1024);
  const MatrixXd& b = set.boundary[0].points;
  int per_face[4] = {0, 0, 0, 0};
  for (Index j = 0; j < b.rows(); ++j) {
    if (b(j, 0) == 0.0) ++per_face[0];
    else if (b(j, 0) == 1.0) ++per_face[1];
    else if (b(j, 1) == 0.0) ++per_face[2];
    else if (b(j, 1) == 1.0) ++per_face[3];
  }
  for (int f : per_face) EXPECT_EQ(f, 31);
  EXPECT_GT(set.interior.minCoeff(), 0.0);
  EXPECT_LT(set.interior.maxCoeff(), 1.0);
}

TEST(SampleCollocation, RemainderGoesToFirstFaces) {
  const auto p = builtin_linear_elliptic();
  const std::vector<Index> counts{6};
  const auto set = sample_collocation(p, 0, counts, 1);
  const MatrixXd& b = set.boundary[0].points;
  // faces in order x=0, x=1, y=0, y=1 get 2, 2, 1, 1
  EXPECT_EQ(b(0, 0), 0.0);
  EXPECT_EQ(b(1, 0), 0.0);
  EXPECT_EQ(b(2, 0), 1.0);
  EXPECT_EQ(b(3, 0), 1.0);
  EXPECT_EQ(b(4, 1), 0.0);
  EXPECT_EQ(b(5, 1), 1.0);
}

TEST(SampleCollocation, AdvectionGroups) {
  const auto p = builtin_advection_diffusion();
  const auto set = sample_collocation(p, 3);
  EXPECT_EQ(set.interior.rows(), 1000);
  EXPECT_EQ(set.boundary[0].points.rows(), 100);
  EXPECT_EQ(set.boundary[1].points.rows(), 200);
  EXPECT_TRUE((set.boundary[1].points.col(1).array() == 0.0).all());
  EXPECT_TRUE((set.boundary[0].points.col(0).array().abs() == 1.0).all());
}

TEST(SampleCollocation, DeterministicAndErrors) {
  const auto p = builtin_nonlinear_elliptic();
  const auto a = sample_collocation(p, 7);
  const auto b = sample_collocation(p, 7);
  EXPECT_TRUE((a.interior.array() == b.interior.array()).all());
  EXPECT_TRUE((a.boundary[0].points.array() == b.boundary[0].points.array()).all());
  const std::vector<Index> none{0};
  EXPECT_THROW(sample_collocation(p, 0, none, 1), EmptySetError);
  const std::vector<Index> wrong{1, 2};
  EXPECT_THROW(sample_collocation(p, 10, wrong, 1), ShapeError);
}

TEST(BoxGrid, CornersAndOrder) {
  const DomainBox box{VectorXd::Zero(2), VectorXd::Ones(2)};
  const MatrixXd g = box_grid(box, 3);
  ASSERT_EQ(g.rows(), 9);
  EXPECT_EQ(g(0, 0), 0.0);
  EXPECT_EQ(g(0, 1), 0.0);
  EXPECT_EQ(g(1, 0), 0.0);
  EXPECT_EQ(g(1, 1), 0.5);
  EXPECT_EQ(g(8, 0), 1.0);
  EXPECT_EQ(g(8, 1), 1.0);
  EXPECT_EQ(box_grid(box, 1).row(0), (Eigen::RowVector2d(0.5, 0.5)));
}

TEST(ModelEval, ZeroModel) {
  Model m{sample_features(FeatureDistribution::gaussian(1.0, 2), 10, 1), VectorXd::Zero(10)};
  const auto q = model_eval(m, VectorXd::Constant(2, 0.3));
  EXPECT_EQ(q.u, 0.0);
  EXPECT_TRUE(q.grad.isZero(0.0));
  EXPECT_TRUE(q.second_pure.isZero(0.0));
}

TEST(ModelEval, SingleFeature) {
  Model m{fixed_features(Eigen::RowVector2d(1.0, 0.0), VectorXd::Zero(1)), VectorXd::Constant(1, 2.0)};
  const auto q = model_eval(m, VectorXd::Zero(2));
  EXPECT_DOUBLE_EQ(q.u, 2.0);
  EXPECT_DOUBLE_EQ(q.grad(0), 0.0);
  EXPECT_DOUBLE_EQ(q.grad(1), 0.0);
  EXPECT_DOUBLE_EQ(q.second_pure(0), -2.0);
  EXPECT_DOUBLE_EQ(q.second_pure(1), 0.0);
  EXPECT_THROW(model_eval(m, VectorXd::Zero(3)), ShapeError);
}

TEST(ModelValues, MatchesPointwise) {
  Model m{sample_features(FeatureDistribution::gaussian(9.0, 2), 40, 3), VectorXd::LinSpaced(40, -1, 1)};
  const MatrixXd pts = box_grid({VectorXd::Zero(2), VectorXd::Ones(2)}, 4);
  const VectorXd v = model_values(m, pts);
  for (Index j = 0; j < pts.rows(); ++j) EXPECT_NEAR(v(j), model_eval(m, pts.row(j).transpose()).u, 1e-13);
}

TEST(Residuals, ZeroModelExamples) {
  const auto le = builtin_linear_elliptic();
  CollocationSet pts;
  pts.interior = Eigen::RowVector2d(0.5, 0.5);
  pts.boundary.push_back({"boundary", Eigen::RowVector2d(0.0, 0.4)});
  Model m{sample_features(FeatureDistribution::gaussian(1.0, 2), 5, 2), VectorXd::Zero(5)};
  const auto r = residual_vector(m, le, pts);
  EXPECT_NEAR(r.interior(0), -(2 * pi * pi + 1), 1e-12);
  EXPECT_EQ(r.boundary[0](0), 0.0);

  const auto ad = builtin_advection_diffusion();
  CollocationSet apts;
  apts.interior = Eigen::RowVector2d(0.0, 0.0);
  apts.boundary.push_back({"boundary", MatrixXd(0, 2)});
  apts.boundary.push_back({"initial", MatrixXd(0, 2)});
  EXPECT_NEAR(residual_vector(m, ad, apts).interior(0), -1.0, 1e-15);
}

// Each residual recomputed point by point from model_eval and the operator.
TEST(Residuals, AgreeWithPointwiseOperator) {
  const auto p = builtin_nonlinear_poisson(3);
  const auto pts = sample_collocation(p, 40, std::vector<Index>{12}, 4);
  Model m{sample_features(FeatureDistribution::gaussian(0.5, 3), 30, 5), VectorXd::Zero(30)};
  std::mt19937_64 gen(1);
  std::normal_distribution<double> normal(0.0, 0.3);
  for (Index k = 0; k < 30; ++k) m.coefficients(k) = normal(gen);
  const auto r = residual_vector(m, p, pts);
  for (Index j = 0; j < pts.interior.rows(); ++j) {
    const double expected = p.interior.residual(model_eval(m, pts.interior.row(j).transpose()));
    EXPECT_NEAR(r.interior(j), expected, 1e-12);
  }
  const auto& b = pts.boundary[0].points;
  for (Index j = 0; j < b.rows(); ++j) {
    const double expected = p.boundary_groups[0].op.residual(model_eval(m, b.row(j).transpose()));
    EXPECT_NEAR(r.boundary[0](j), expected, 1e-12);
  }
}

VectorXd stacked(const Residuals& r) {
  Index n = r.interior.size();
  for (const auto& b : r.boundary) n += b.size();
  VectorXd out(n);
  out.head(r.interior.size()) = r.interior;
  Index row = r.interior.size();
  for (const auto& b : r.boundary) {
    out.segment(row, b.size()) = b;
    row += b.size();
  }
  return out;
}

MatrixXd stacked(const Jacobians& j) {
  Index n = j.interior.rows();
  for (const auto& b : j.boundary) n += b.rows();
  MatrixXd out(n, j.interior.cols());
  out.topRows(j.interior.rows()) = j.interior;
  Index row = j.interior.rows();
  for (const auto& b : j.boundary) {
    out.middleRows(row, b.rows()) = b;
    row += b.rows();
  }
  return out;
}

TEST(Jacobian, MatchesFiniteDifferences) {
  std::mt19937_64 gen(8);
  std::normal_distribution<double> normal(0.0, 0.1);
  for (const auto& p : {builtin_nonlinear_elliptic(), builtin_nonlinear_poisson(2), builtin_allen_cahn(1.0),
                        builtin_advection_diffusion()}) {
    std::vector<Index> counts(p.boundary_groups.size(), 8);
    const auto pts = sample_collocation(p, 30, counts, 2);
    Model m{sample_features(FeatureDistribution::gaussian(4.0, p.dim()), 25, 3), VectorXd(25)};
    for (Index k = 0; k < 25; ++k) m.coefficients(k) = normal(gen);
    const MatrixXd jac = stacked(residual_jacobian(m, p, pts));
    std::uniform_int_distribution<Index> pick(0, 24);
    for (int col = 0; col < 10; ++col) {
      const Index k = pick(gen);
      const double h = 1e-6;
      Model plus = m, minus = m;
      plus.coefficients(k) += h;
      minus.coefficients(k) -= h;
      const VectorXd fd = (stacked(residual_vector(plus, p, pts)) - stacked(residual_vector(minus, p, pts))) / (2 * h);
      for (Index j = 0; j < fd.size(); ++j) EXPECT_LE(testing::rel_err(jac(j, k), fd(j)), 1e-5) << p.name;
    }
  }
}

TEST(Jacobian, IndependentOfCoefficientsForLinearProblems) {
  const auto p = builtin_advection_diffusion();
  const auto pts = sample_collocation(p, 50, std::vector<Index>{10, 10}, 1);
  const auto fs = sample_features(FeatureDistribution::gaussian(1.0, 2), 20, 4);
  const MatrixXd a = stacked(residual_jacobian({fs, VectorXd::LinSpaced(20, -3, 3)}, p, pts));
  const MatrixXd b = stacked(residual_jacobian({fs, VectorXd::Constant(20, 0.7)}, p, pts));
  EXPECT_LE((a - b).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Jacobian, NonlinearEllipticAtZeroModel) {
  const auto p = builtin_nonlinear_elliptic();
  const auto pts = sample_collocation(p, 10, std::vector<Index>{4}, 6);
  const auto fs = sample_features(FeatureDistribution::gaussian(4.0, 2), 7, 4);
  const MatrixXd jac = residual_jacobian({fs, VectorXd::Zero(7)}, p, pts).interior;
  for (Index j = 0; j < 10; ++j) {
    const auto fe = eval_features(fs, pts.interior.row(j).transpose());
    const VectorXd expected = -fe.second_pure_partials.rowwise().sum();
    EXPECT_LE((jac.row(j).transpose() - expected).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(LinearSystem, EntryExample) {
  const auto p = builtin_linear_elliptic();
  CollocationSet pts;
  pts.interior = Eigen::RowVector2d(0.0, 0.0);
  pts.boundary.push_back({"boundary", Eigen::RowVector2d(0.0, 0.5)});
  const auto fs = fixed_features(Eigen::RowVector2d(1.0, 1.0), VectorXd::Zero(1));
  const auto sys = assemble_linear_system(p, fs, pts);
  EXPECT_NEAR(sys.matrix(0, 0), 3.0, 1e-15);
  EXPECT_NEAR(sys.matrix(1, 0), std::cos(0.5), 1e-15);
  EXPECT_EQ(sys.rhs(1), 0.0);
  EXPECT_EQ(sys.block_rows, (std::vector<Index>{1, 1}));
}

TEST(LinearSystem, AgreesWithGenericResidual) {
  const auto p = builtin_advection_diffusion();
  const auto pts = sample_collocation(p, 100, std::vector<Index>{20, 30}, 9);
  const auto fs = sample_features(FeatureDistribution::gaussian(1.0, 2), 40, 10);
  const auto sys = assemble_linear_system(p, fs, pts);
  std::mt19937_64 gen(3);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int trial = 0; trial < 5; ++trial) {
    VectorXd c(40);
    for (Index k = 0; k < 40; ++k) c(k) = normal(gen);
    const VectorXd generic = stacked(residual_vector({fs, c}, p, pts));
    EXPECT_LE((sys.matrix * c - sys.rhs - generic).cwiseAbs().maxCoeff(), 1e-10);
  }
  // Dirichlet rows are feature values, right-hand side is the data
  const auto& ini = pts.boundary[1].points;
  for (Index j = 0; j < ini.rows(); ++j) {
    const Index row = 120 + j;
    const auto fe = eval_features(fs, ini.row(j).transpose());
    EXPECT_LE((sys.matrix.row(row).transpose() - fe.values).cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_NEAR(sys.rhs(row), std::sin(ini(j, 0)), 1e-15);
  }
}

TEST(LinearSystem, RejectsNonlinear) {
  const auto p = builtin_nonlinear_elliptic();
  const auto pts = sample_collocation(p, 10, std::vector<Index>{4}, 1);
  EXPECT_THROW(assemble_linear_system(p, sample_features(FeatureDistribution::gaussian(1.0, 2), 5, 1), pts),
               LinearityError);
}

TEST(FillDistance, IntervalMidpoint) {
  MatrixXd pts(2, 1);
  pts << 0.0, 1.0;
  const DomainBox unit{VectorXd::Zero(1), VectorXd::Ones(1)};
  EXPECT_NEAR(fill_distance(pts, box_grid(unit, 1001)), 0.5, 1e-12);
}

TEST(FillDistance, GridCellCenters) {
  const DomainBox unit{VectorXd::Zero(2), VectorXd::Ones(2)};
  CollocationSet set;
  set.interior = box_grid(unit, 5);
  set.boundary.push_back({"boundary", box_grid(unit, 5)});
  // probe grid of 9 per axis hits every cell centre
  const auto h = fill_distance(builtin_linear_elliptic(), set, 9);
  EXPECT_NEAR(h.interior, std::sqrt(2.0) * 0.125, 1e-12);
  EXPECT_NEAR(h.boundary, 0.125, 1e-12);
  // approaches sqrt(2) / (2 (n - 1)) as probes densify
  EXPECT_NEAR(fill_distance(set.interior, box_grid(unit, 201)), std::sqrt(2.0) / 8.0, 1e-12);
}

TEST(FillDistance, ShrinksWithMorePoints) {
  const auto p = builtin_nonlinear_elliptic();
  double prev = 1e300;
  for (Index m : {25, 100, 400, 1600}) {
    const auto pts = sample_collocation(p, m, std::vector<Index>{4 * m / 10}, 12);
    const auto h = fill_distance(p, pts, 41);
    EXPECT_LT(h.interior, prev);
    prev = h.interior;
  }
  EXPECT_THROW(fill_distance(MatrixXd(0, 2), box_grid(p.domain, 3)), EmptySetError);
}

}  // namespace
}  // namespace rfpde
