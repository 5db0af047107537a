#include "cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <type_traits>

#include "rfpde/errors.hpp"

namespace rfpde::cli {

namespace {

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string join(const std::vector<Index>& v, char sep) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += sep;
    s += std::to_string(v[i]);
  }
  return s;
}

// Writes after all computation has finished so failed runs leave no files.
void write_file(const std::string& path, const std::string& body) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
  f << body;
  if (!f) throw std::runtime_error("write to '" + path + "' failed");
}

void emit(const std::string& path, const std::string& body, std::ostream& out) {
  if (path.empty()) {
    out << body;
  } else {
    write_file(path, body);
  }
}

bool is_integral(double v) { return std::isfinite(v) && v == std::floor(v); }

Index to_count(double v, const char* what) {
  if (!is_integral(v) || v < 1) throw ParameterError(std::string(what) + " must be positive integers");
  return static_cast<Index>(v);
}

template <class T>
std::string toml_list(const std::vector<T>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    if constexpr (std::is_floating_point_v<T>) {
      s += num(v[i]);
    } else {
      s += std::to_string(v[i]);
    }
  }
  return s + "]";
}

// Effective configuration in the format accepted by --config.
std::string config_text(const std::string& command, const RunConfig& cfg, const ResolvedRun* r) {
  std::ostringstream s;
  s << "# rfpde " << command << "\n";
  auto str = [&](const char* key, const std::string& v) {
    if (!v.empty()) s << key << " = \"" << v << "\"\n";
  };
  auto val = [&](const char* key, const std::string& v) { s << key << " = " << v << '\n'; };
  str("problem", cfg.problem);
  val("dim", std::to_string(cfg.dim));
  val("frequency", num(cfg.frequency));
  str("dist", cfg.dist);
  val("sigma2", num(cfg.sigma2));
  val("gamma", num(cfg.gamma));
  val("uniform-r", num(cfg.uniform_r));
  val("n-features", std::to_string(cfg.n_features));
  val("with-bias", cfg.with_bias ? "true" : "false");
  if (r) {
    val("m-interior", std::to_string(r->counts.interior));
    val("m-boundary", toml_list(r->counts.boundary));
  }
  str("solver", cfg.solver);
  val("mu", num(cfg.mu));
  val("lambda-interior", num(cfg.lambda_interior));
  if (cfg.lambda_boundary) val("lambda-boundary", num(*cfg.lambda_boundary));
  val("epochs", std::to_string(cfg.epochs));
  val("step", num(cfg.step));
  val("tol", num(cfg.tol));
  if (r) {
    str("test-scheme", r->scheme == TestScheme::grid ? "grid" : "random");
    val("n-test", std::to_string(r->n_test));
  }
  val("seed", std::to_string(cfg.seed));
  str("out", cfg.out);
  str("points-out", cfg.points_out);
  str("sweep", cfg.sweep);
  if (!cfg.values.empty()) val("values", toml_list(cfg.values));
  if (!cfg.boundary_values.empty()) val("boundary-values", toml_list(cfg.boundary_values));
  val("reps", std::to_string(cfg.reps));
  val("threads", std::to_string(cfg.threads));
  val("n-list", toml_list(cfg.n_list));
  val("n-pairs", std::to_string(cfg.n_pairs));
  return s.str();
}

std::string summary_csv(const RunConfig& cfg, const ResolvedRun& r, const ExperimentResult& res) {
  std::ostringstream s;
  s << "problem,method,N,sigma2,m_interior,m_boundary,seed,mse,max_abs,iterations,wall_time_seconds\n";
  const bool gaussian = r.features.distribution.kind == DistributionKind::gaussian;
  s << r.problem.name << ',' << to_string(r.solver.method) << ',' << r.features.n_features << ','
    << (gaussian ? num(r.features.distribution.parameter) : "") << ',' << r.counts.interior << ','
    << r.counts.boundary_total() << ',' << cfg.seed << ',' << num(res.error.mse) << ','
    << num(res.error.max_abs) << ',' << res.fit.report.iterations_used << ',' << num(res.wall_time_seconds)
    << '\n';
  return s.str();
}

std::string points_csv(const ResolvedRun& r, const RunConfig& cfg, const Model& model) {
  const MatrixXd pts = test_points(r.problem, r.scheme, r.n_test, derive_seed(cfg.seed, kTestStream));
  const VectorXd pred = model_values(model, pts);
  std::ostringstream s;
  for (Index i = 0; i < pts.cols(); ++i) s << 'x' << i + 1 << ',';
  s << "u_true,u_pred,abs_err\n";
  for (Index j = 0; j < pts.rows(); ++j) {
    const double truth = r.problem.true_solution->value(pts.row(j).transpose());
    for (Index i = 0; i < pts.cols(); ++i) s << num(pts(j, i)) << ',';
    s << num(truth) << ',' << num(pred(j)) << ',' << num(std::abs(truth - pred(j))) << '\n';
  }
  return s.str();
}

std::string study_csv(const StudyResult& st) {
  std::ostringstream s;
  const std::string kind = to_string(st.kind);
  s << "sweep_kind,swept_value,repetition,seed,mse\n";
  for (const auto& row : st.rows) {
    s << kind << ',' << num(row.swept_value) << ',' << row.repetition << ',' << row.seed << ','
      << (row.ok ? num(row.mse) : "nan") << '\n';
  }
  for (std::size_t i = 0; i < st.values.size(); ++i) {
    s << "mean," << num(st.values[i]) << ",,," << num(st.mean_mse[i]) << '\n';
  }
  for (std::size_t i = 0; i < st.values.size(); ++i) {
    s << "median," << num(st.values[i]) << ",,," << num(st.median_mse[i]) << '\n';
  }
  s << "fit,slope,,," << (st.fit.defined ? num(st.fit.slope) : "undefined") << '\n';
  s << "fit,intercept,,," << (st.fit.defined ? num(st.fit.intercept) : "undefined") << '\n';
  return s.str();
}

std::string kernel_csv(const KernelCheckResult& kc) {
  std::ostringstream s;
  s << "N,rms_error\n";
  for (const auto& row : kc.rows) s << row.n_features << ',' << num(row.rms_error) << '\n';
  s << "slope," << (kc.fit.defined ? num(kc.fit.slope) : "undefined") << '\n';
  s << "intercept," << (kc.fit.defined ? num(kc.fit.intercept) : "undefined") << '\n';
  return s.str();
}

int cmd_solve(const RunConfig& cfg, std::ostream& out) {
  const ResolvedRun r = resolve(cfg, false);
  const ExperimentResult res =
      run_experiment(r.problem, r.features, r.counts, r.solver, cfg.seed, r.scheme, r.n_test);
  const std::string summary = summary_csv(cfg, r, res);
  const std::string cloud = cfg.points_out.empty() ? "" : points_csv(r, cfg, res.fit.model);
  emit(cfg.out, summary, out);
  if (!cfg.points_out.empty()) write_file(cfg.points_out, cloud);
  if (!cfg.out.empty()) write_file(cfg.out + ".config.toml", config_text("solve", cfg, &r));
  return kOk;
}

int cmd_study(const RunConfig& cfg, std::ostream& out) {
  if (cfg.values.empty()) throw CLI::ValidationError("--values", "study needs at least one swept value");
  const ResolvedRun r = resolve(cfg, true);
  const SweepKind kind = sweep_kind_from_string(cfg.sweep);

  StudyOptions opt;
  opt.repetitions = cfg.reps;
  opt.base_seed = cfg.seed;
  opt.solver = r.solver;
  opt.scheme = r.scheme;
  opt.n_test = r.n_test;
  opt.threads = cfg.threads;
  if (cfg.reps < 1) throw ParameterError("--reps must be >= 1");

  StudyResult st;
  switch (kind) {
    case SweepKind::collocation: {
      if (!cfg.boundary_values.empty()) {
        if (cfg.boundary_values.size() != cfg.values.size()) {
          throw ParameterError("--boundary-values needs one entry per swept value");
        }
        if (r.problem.boundary_groups.size() != 1) {
          throw ParameterError("--boundary-values applies to problems with one boundary group");
        }
      }
      std::vector<CollocationCounts> counts;
      for (std::size_t i = 0; i < cfg.values.size(); ++i) {
        CollocationCounts c = r.counts;
        c.interior = to_count(cfg.values[i], "--values");
        if (!cfg.boundary_values.empty()) c.boundary = {cfg.boundary_values[i]};
        counts.push_back(std::move(c));
      }
      st = study_collocation(r.problem, r.features, counts, opt);
      break;
    }
    case SweepKind::features: {
      std::vector<Index> ns;
      for (double v : cfg.values) ns.push_back(to_count(v, "--values"));
      st = study_features(r.problem, r.features, ns, r.counts, opt);
      break;
    }
    case SweepKind::variance:
      st = study_variance(r.problem, r.features, cfg.values, r.counts, opt);
      break;
  }
  emit(cfg.out, study_csv(st), out);
  if (!cfg.out.empty()) write_file(cfg.out + ".config.toml", config_text("study", cfg, &r));
  return kOk;
}

int cmd_kernel_check(const RunConfig& cfg, std::ostream& out) {
  if (cfg.n_list.empty()) throw CLI::ValidationError("--n-list", "needs at least one feature count");
  if (cfg.n_pairs < 1) throw CLI::ValidationError("--n-pairs", "must be >= 1");
  const KernelCheckResult kc = kernel_check(resolve_distribution(cfg, cfg.dim), cfg.n_list, cfg.n_pairs, cfg.seed);
  emit(cfg.out, kernel_csv(kc), out);
  if (!cfg.out.empty()) write_file(cfg.out + ".config.toml", config_text("kernel-check", cfg, nullptr));
  return kOk;
}

void add_shared_options(CLI::App& app, RunConfig& cfg) {
  app.add_option("--problem", cfg.problem, "Problem name")
      ->check(CLI::IsMember(builtin_problem_names()));
  app.add_option("--dim", cfg.dim, "Dimension (nonlinear-poisson, kernel-check)")->capture_default_str();
  app.add_option("--frequency", cfg.frequency, "Allen-Cahn frequency a")->capture_default_str();

  app.add_option("--dist", cfg.dist, "Feature distribution")
      ->check(CLI::IsMember({"gaussian", "laplace", "uniform"}))
      ->capture_default_str();
  app.add_option("--sigma2", cfg.sigma2, "Gaussian variance")->capture_default_str();
  app.add_option("--gamma", cfg.gamma, "Laplace kernel rate (Cauchy scale)")->capture_default_str();
  app.add_option("--uniform-r", cfg.uniform_r, "Uniform half-width R")->capture_default_str();
  app.add_option("--n-features", cfg.n_features, "Number of random features N")->capture_default_str();
  app.add_option("--with-bias", cfg.with_bias, "Sample phase offsets (true|false)")->capture_default_str();

  app.add_option("--m-interior", cfg.m_interior, "Interior collocation points");
  app.add_option("--m-boundary", cfg.m_boundary, "Boundary points, one per boundary group")->delimiter(',');

  app.add_option("--solver", cfg.solver, "Training method")
      ->check(CLI::IsMember({"linear-ls", "linear-minnorm", "ridge", "gauss-newton", "gd", "gradient-descent"}))
      ->capture_default_str();
  app.add_option("--mu", cfg.mu, "Coefficient penalty (ridge lambda for --solver ridge)")->capture_default_str();
  app.add_option("--lambda-interior", cfg.lambda_interior, "Interior residual weight")->capture_default_str();
  app.add_option("--lambda-boundary", cfg.lambda_boundary, "Weight of every boundary group");
  app.add_option("--epochs", cfg.epochs, "Maximum iterations or epochs")->capture_default_str();
  app.add_option("--step", cfg.step, "Gradient descent step size")->capture_default_str();
  app.add_option("--tol", cfg.tol, "Relative step tolerance")->capture_default_str();

  app.add_option("--test-scheme", cfg.test_scheme, "Test points (grid|random)")
      ->check(CLI::IsMember({"grid", "random"}));
  app.add_option("--n-test", cfg.n_test, "Test points (per axis for grid)");
  app.add_option("--seed", cfg.seed, "Base seed")->capture_default_str();
  app.add_option("--out", cfg.out, "Output CSV (stdout when omitted)");
  app.add_option("--points-out", cfg.points_out, "solve: point-cloud CSV of test predictions");

  app.add_option("--sweep", cfg.sweep, "study: collocation|features|variance")
      ->check(CLI::IsMember({"collocation", "features", "variance"}));
  app.add_option("--values", cfg.values, "study: swept values")->delimiter(',');
  app.add_option("--boundary-values", cfg.boundary_values, "study: boundary counts per swept value")
      ->delimiter(',');
  app.add_option("--reps", cfg.reps, "study: repetitions per value")->capture_default_str();
  app.add_option("--threads", cfg.threads, "study: worker threads (0 = all cores)")->capture_default_str();

  app.add_option("--n-list", cfg.n_list, "kernel-check: feature counts")->delimiter(',')->capture_default_str();
  app.add_option("--n-pairs", cfg.n_pairs, "kernel-check: random point pairs")->capture_default_str();
}

}  // namespace

FeatureDistribution resolve_distribution(const RunConfig& cfg, Index dim) {
  FeatureDistribution d;
  switch (distribution_kind_from_string(cfg.dist)) {
    case DistributionKind::gaussian:
      d = FeatureDistribution::gaussian(cfg.sigma2, dim);
      break;
    case DistributionKind::laplace:
      d = FeatureDistribution::laplace(cfg.gamma, dim);
      break;
    case DistributionKind::uniform:
      d = FeatureDistribution::uniform(cfg.uniform_r, dim);
      break;
  }
  d.validate();
  return d;
}

ResolvedRun resolve(const RunConfig& cfg, bool study) {
  if (cfg.problem.empty()) throw ParameterError("--problem is required");
  ResolvedRun r;
  r.problem = make_problem(cfg.problem, {cfg.dim, cfg.frequency});

  r.features.distribution = resolve_distribution(cfg, r.problem.dim());
  if (cfg.n_features < 1) throw ParameterError("--n-features must be >= 1");
  r.features.n_features = cfg.n_features;
  r.features.with_bias = cfg.with_bias;

  r.counts = CollocationCounts::defaults(r.problem);
  if (cfg.m_interior) {
    if (*cfg.m_interior < 0) throw ParameterError("--m-interior must be >= 0");
    r.counts.interior = *cfg.m_interior;
  }
  if (!cfg.m_boundary.empty()) {
    if (cfg.m_boundary.size() != r.problem.boundary_groups.size()) {
      std::string names;
      for (const auto& g : r.problem.boundary_groups) names += (names.empty() ? "" : ",") + g.name;
      throw ParameterError("--m-boundary needs " + std::to_string(r.problem.boundary_groups.size()) +
                           " entries (" + names + "), got '" + join(cfg.m_boundary, ',') + "'");
    }
    for (Index n : cfg.m_boundary) {
      if (n < 0) throw ParameterError("--m-boundary entries must be >= 0");
    }
    r.counts.boundary = cfg.m_boundary;
  }
  if (r.counts.interior + r.counts.boundary_total() == 0) throw ParameterError("no collocation points requested");

  r.solver.method = solver_method_from_string(cfg.solver);
  r.solver.reg_weight = cfg.mu;
  r.solver.interior_weight = cfg.lambda_interior;
  r.solver.boundary_weight = cfg.lambda_boundary;
  r.solver.max_iterations = cfg.epochs;
  r.solver.step_size = cfg.step;
  r.solver.tol_step = cfg.tol;
  r.solver.validate();
  const bool linear_method = r.solver.method != SolverMethod::gauss_newton &&
                             r.solver.method != SolverMethod::gradient_descent;
  if (linear_method && !r.problem.is_linear()) {
    throw ParameterError("--solver " + cfg.solver + " requires a linear problem; '" + r.problem.name +
                         "' is nonlinear");
  }

  if (cfg.test_scheme.empty()) {
    r.scheme = study ? TestScheme::uniform_random : default_test_scheme(r.problem);
  } else {
    r.scheme = test_scheme_from_string(cfg.test_scheme);
  }
  r.n_test = cfg.n_test ? *cfg.n_test : (r.scheme == TestScheme::grid ? 100 : (study ? 100 : 500));
  if (r.n_test < 1) throw ParameterError("--n-test must be >= 1");
  if (r.scheme == TestScheme::grid &&
      std::pow(static_cast<double>(r.n_test), static_cast<double>(r.problem.dim())) > 1e7) {
    throw ParameterError("grid test set too large; use --test-scheme random for this dimension");
  }
  return r;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Random-feature collocation solver for PDEs", "rfpde"};
  app.set_config("--config", "", "Read flags from a key = value file (flags override it)");
  add_shared_options(app, cfg);
  app.require_subcommand(1, 1);
  auto* solve = app.add_subcommand("solve", "Train one model and report its test error");
  auto* study = app.add_subcommand("study", "Convergence study over a swept parameter");
  auto* kernel = app.add_subcommand("kernel-check", "Monte-Carlo kernel approximation error against N");
  for (auto* sub : {solve, study, kernel}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kOk : kUsageError;
  }

  try {
    if (study->parsed() && cfg.sweep.empty()) throw CLI::RequiredError("--sweep");
    if (solve->parsed()) return cmd_solve(cfg, out);
    if (study->parsed()) return cmd_study(cfg, out);
    return cmd_kernel_check(cfg, out);
  } catch (const CLI::Error& e) {
    err << "rfpde: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::invalid_argument& e) {
    err << "rfpde: " << e.what() << '\n';
    return kUsageError;
  } catch (const UnsupportedError& e) {
    err << "rfpde: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    err << "rfpde: " << e.what() << '\n';
    return kRuntimeFailure;
  }
}

}  // namespace rfpde::cli
