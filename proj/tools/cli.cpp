#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "oneshot/experiment_harness.hpp"
#include "oneshot/problem_io.hpp"
#include "oneshot/step_bounds.hpp"

namespace oneshot::cli {

namespace {

using nlohmann::ordered_json;

// Exit-code carrying errors raised while preparing a command.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string problem_file;
  std::vector<double> scalar;   // b,h,m
  std::vector<double> random;   // n_u,n_sigma,n_f,norm
  int helmholtz = 0;            // grid cells per side
  double contrast = HelmholtzOptions{}.contrast;
  std::uint64_t seed = 1;

  std::vector<std::string> methods;
  std::vector<int> ks{1};
  std::vector<double> taus;
  std::string out;
  bool line_search_first = false;
  int max_outer = SolverConfig{}.max_outer;
  bool serial = false;
  bool skip_bounds = false;

  std::optional<double> theta0;
  std::optional<double> delta0;
  bool sufficient = false;

  std::vector<double> b_values;
  std::vector<double> b_range{-0.99, 0.99, 199};
};

struct Source {
  LinearProblem problem;
  std::optional<Vector> sigma_exact;
  std::optional<Vector> sigma0;
};

ordered_json number(double x) {
  if (std::isfinite(x)) return x;
  return format_double(x);
}

LinearProblem scalar_problem(const std::vector<double>& bhm) {
  scalar::ScalarProblem sp{bhm[0], bhm[1], bhm[2]};
  sp.check();
  return LinearProblem(Matrix::Constant(1, 1, sp.b), Matrix::Constant(1, 1, sp.m),
                       Matrix::Constant(1, 1, sp.h), Vector::Zero(1));
}

Source load_source(const Options& o) {
  const int given = !o.problem_file.empty() + !o.scalar.empty() + !o.random.empty() + (o.helmholtz > 0);
  if (given != 1) throw UsageError("give exactly one of --problem, --scalar, --random, --helmholtz");
  if (!o.problem_file.empty()) {
    ProblemFile file = load_problem(o.problem_file);
    return {std::move(file.problem), std::move(file.sigma_exact), std::move(file.sigma_initial)};
  }
  if (!o.scalar.empty()) return {scalar_problem(o.scalar), std::nullopt, std::nullopt};
  if (!o.random.empty()) {
    const auto dim = [](double x) {
      if (!(x >= 1.0) || x != std::floor(x)) throw UsageError("--random dimensions must be positive integers");
      return static_cast<Index>(x);
    };
    return {random_contraction(dim(o.random[0]), dim(o.random[1]), dim(o.random[2]), o.random[3], o.seed),
            std::nullopt, std::nullopt};
  }
  HelmholtzOptions h;
  h.grid = o.helmholtz;
  h.contrast = o.contrast;
  h.seed = o.seed;
  return {helmholtz_toy(h), std::nullopt, std::nullopt};
}

std::vector<MethodKind> parse_methods(const std::vector<std::string>& names) {
  std::vector<MethodKind> kinds;
  for (const std::string& name : names) {
    const auto kind = parse_method(name);
    if (!kind) throw UsageError("unknown method '" + name + "' (gd, sgd, kshot, skshot)");
    kinds.push_back(*kind);
  }
  return kinds;
}

void check_ks(const std::vector<int>& ks) {
  if (ks.empty()) throw UsageError("--k needs at least one value");
  for (int k : ks)
    if (k < 1) throw UsageError("--k values must be at least 1");
}

void check_taus(const std::vector<double>& taus) {
  if (taus.empty()) throw UsageError("--tau needs at least one value");
  for (double t : taus)
    if (!(t > 0.0) || !std::isfinite(t)) throw UsageError("--tau values must be positive");
}

std::optional<bounds::Params> bound_params(const Options& o, MethodSpec method) {
  if (!o.theta0 && !o.delta0) return std::nullopt;
  const bounds::Family family = bounds::family_of(method.kind);
  bounds::Params p = bounds::Params::defaults(family, method.k);
  if (o.theta0) p.theta0 = *o.theta0;
  if (o.delta0) p.delta0 = *o.delta0;
  p.check(family, method.k);
  return p;
}

int cmd_check(const Options& o, std::ostream& out) {
  const Source src = load_source(o);
  const AssumptionReport r = validate(src.problem);
  ordered_json j;
  j["valid"] = r.valid;
  j["spectral_radius"] = number(r.spectral_radius);
  j["min_singular_value"] = number(r.min_singular_value);
  j["max_singular_value"] = number(r.max_singular_value);
  j["diagnostics"] = r.diagnostics;
  out << j.dump(2) << '\n';
  return r.valid ? 0 : 1;
}

int cmd_bound(const Options& o, std::ostream& out) {
  if (o.methods.size() != 1) throw UsageError("bound takes a single --method");
  const MethodKind kind = parse_methods(o.methods).front();
  if (o.ks.size() != 1) throw UsageError("bound takes a single --k");
  check_ks(o.ks);
  const MethodSpec method{kind, o.ks.front()};

  if (!o.scalar.empty() && !o.sufficient) {
    const scalar::ScalarProblem sp{o.scalar[0], o.scalar[1], o.scalar[2]};
    sp.check();
    scalar::ScalarThreshold t;
    switch (kind) {
      case MethodKind::UsualGD: t = {1, sp.b, scalar::usual_gd_threshold(sp.b), "usual-gd"}; break;
      case MethodKind::ShiftedGD: t = {1, sp.b, scalar::shifted_gd_threshold(sp.b), "shifted-gd"}; break;
      case MethodKind::KStepOneShot: t = scalar::k_step_threshold(method.k, sp.b); break;
      case MethodKind::ShiftedKStepOneShot: t = scalar::shifted_k_step_threshold(method.k, sp.b); break;
    }
    const double scale = sp.h * sp.h * sp.m * sp.m;
    ordered_json j;
    j["formula_id"] = "scalar-exact";
    j["value"] = number(t.value / scale);
    j["branch"] = t.branch;
    j["method"] = method_name(kind);
    j["k"] = method.k;
    j["b"] = sp.b;
    j["h"] = sp.h;
    j["m"] = sp.m;
    out << j.dump(2) << '\n';
    return 0;
  }

  const Source src = load_source(o);
  bounds::StepBound bound;
  if (kind == MethodKind::UsualGD) {
    bound = bounds::gd_bound(src.problem);
  } else if (kind == MethodKind::ShiftedGD) {
    bound = bounds::shifted_gd_bound(src.problem);
  } else {
    bound = bounds::matrix_bound(src.problem, method, bound_params(o, method));
  }
  ordered_json j;
  j["formula_id"] = bound.formula_id;
  j["value"] = number(bound.value);
  if (bound.params) {
    j["params"] = {{"theta0", bound.params->theta0}, {"delta0", bound.params->delta0}};
  } else {
    j["params"] = nullptr;
  }
  ordered_json n;
  n["norm_B"] = number(bound.norms.norm_B);
  n["norm_H"] = number(bound.norms.norm_H);
  n["norm_M"] = number(bound.norms.norm_M);
  n["reduced_norm"] = number(bound.norms.reduced_norm);
  const auto opt = [&](const char* key, const std::optional<double>& v) {
    if (v) n[key] = number(*v);
  };
  opt("norm_power", bound.norms.norm_power);
  opt("resolvent", bound.norms.resolvent);
  opt("norm_geometric", bound.norms.norm_geometric);
  opt("norm_cumulative", bound.norms.norm_cumulative);
  j["norm_inputs"] = n;
  out << j.dump(2) << '\n';
  return 0;
}

SolverConfig solver_config(const Options& o) {
  if (o.max_outer < 1) throw UsageError("--max-outer must be positive");
  SolverConfig c;
  c.max_outer = o.max_outer;
  return c;
}

int cmd_solve(const Options& o, std::ostream& out) {
  if (o.methods.size() != 1) throw UsageError("solve takes a single --method");
  if (o.ks.size() != 1 || o.taus.size() != 1) throw UsageError("solve takes a single --k and --tau");
  check_ks(o.ks);
  check_taus(o.taus);
  const Source src = load_source(o);
  const MethodSpec method{parse_methods(o.methods).front(), o.ks.front()};
  const RunSetup setup = default_setup(src.problem, src.sigma_exact, src.sigma0);
  SolverConfig config = solver_config(o);
  config.tau = o.line_search_first ? first_step_line_search(src.problem, setup, o.taus.front())
                                   : o.taus.front();
  const ConvergenceTrace trace = solve(src.problem, method, setup, config);
  if (o.out.empty()) {
    write_trace_csv(out, trace);
    return 0;
  }
  std::filesystem::create_directories(o.out);
  const auto path = std::filesystem::path(o.out) / trace_file_name({method, config.tau});
  std::ofstream file(path);
  if (!file) throw std::runtime_error("cannot write " + path.string());
  write_trace_csv(file, trace);
  out << path.string() << '\n';
  return 0;
}

int cmd_sweep(const Options& o, std::ostream& out) {
  check_ks(o.ks);
  check_taus(o.taus);
  const Source src = load_source(o);
  const std::vector<std::string> names =
      o.methods.empty() ? std::vector<std::string>{"gd", "sgd", "kshot", "skshot"} : o.methods;
  const RunSetup setup = default_setup(src.problem, src.sigma_exact, src.sigma0);

  std::vector<double> taus = o.taus;
  if (o.line_search_first)
    for (double& t : taus) t = first_step_line_search(src.problem, setup, t);

  SweepOptions options;
  options.solver = solver_config(o);
  options.execution = o.serial ? Execution::Serial : Execution::Parallel;
  const auto cells = sweep_grid(parse_methods(names), o.ks, taus);
  const auto results = run_sweep(src.problem, setup, cells, options);
  if (o.out.empty()) {
    write_summary_csv(out, results);
    return 0;
  }
  write_sweep(o.out, results);
  const auto dir = std::filesystem::path(o.out);
  if (!o.skip_bounds) {
    std::ofstream file(dir / "bounds.csv");
    if (!file) throw std::runtime_error("cannot write " + (dir / "bounds.csv").string());
    write_bounds_csv(file, sweep_bounds(src.problem, cells));
  }
  out << (dir / "summary.csv").string() << '\n';
  return 0;
}

int cmd_scalar_region(const Options& o, std::ostream& out) {
  check_ks(o.ks);
  std::vector<double> grid = o.b_values;
  if (grid.empty()) {
    const double lo = o.b_range[0], hi = o.b_range[1];
    const double count = o.b_range[2];
    if (!(count >= 1.0) || count != std::floor(count)) throw UsageError("--b-range count must be a positive integer");
    const int n = static_cast<int>(count);
    for (int i = 0; i < n; ++i) grid.push_back(n == 1 ? lo : lo + (hi - lo) * i / (n - 1));
  }
  for (double b : grid)
    if (!(std::abs(b) < 1.0)) throw UsageError("b values must lie in (-1, 1)");
  auto rows = scalar_region(grid, o.ks, o.serial ? Execution::Serial : Execution::Parallel);
  if (!o.methods.empty()) {
    const auto keep = parse_methods(o.methods);
    std::erase_if(rows, [&](const RegionRow& r) {
      return std::find(keep.begin(), keep.end(), r.method) == keep.end();
    });
  }
  if (o.out.empty()) {
    write_region_csv(out, rows);
    return 0;
  }
  std::ofstream file(o.out);
  if (!file) throw std::runtime_error("cannot write " + o.out);
  write_region_csv(file, rows);
  return 0;
}

void add_source_options(CLI::App* cmd, Options& o) {
  cmd->add_option("--problem", o.problem_file, "JSON problem file");
  cmd->add_option("--scalar", o.scalar, "scalar problem b,h,m")->delimiter(',')->expected(3);
  cmd->add_option("--random", o.random, "random contraction n_u,n_sigma,n_f,norm")->delimiter(',')->expected(4);
  cmd->add_option("--helmholtz", o.helmholtz, "Helmholtz toy model with this many cells per side");
  cmd->add_option("--contrast", o.contrast, "background perturbation of the Helmholtz model");
  cmd->add_option("--seed", o.seed, "seed for generated problems");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multi-step one-shot inversion toolkit"};
  app.require_subcommand(1);
  Options o;

  auto* check = app.add_subcommand("check", "validate the problem assumptions");
  add_source_options(check, o);

  auto* bound = app.add_subcommand("bound", "print a descent-step bound as JSON");
  add_source_options(bound, o);
  bound->add_option("--method", o.methods)->delimiter(',')->required();
  bound->add_option("--k", o.ks)->delimiter(',');
  bound->add_option("--theta0", o.theta0, "sector angle");
  bound->add_option("--delta0", o.delta0, "sector offset");
  bound->add_flag("--sufficient", o.sufficient, "with --scalar, use the general sufficient bound");

  auto* solve_cmd = app.add_subcommand("solve", "run one method and print its trace CSV");
  add_source_options(solve_cmd, o);
  solve_cmd->add_option("--method", o.methods)->delimiter(',')->required();
  solve_cmd->add_option("--k", o.ks)->delimiter(',');
  solve_cmd->add_option("--tau", o.taus)->delimiter(',')->required();
  solve_cmd->add_option("--out", o.out, "directory for the trace file");
  solve_cmd->add_flag("--line-search-first", o.line_search_first);
  solve_cmd->add_option("--max-outer", o.max_outer);

  auto* sweep = app.add_subcommand("sweep", "run a method x k x tau grid");
  add_source_options(sweep, o);
  sweep->add_option("--method", o.methods)->delimiter(',');
  sweep->add_option("--k", o.ks)->delimiter(',');
  sweep->add_option("--tau", o.taus)->delimiter(',')->required();
  sweep->add_option("--out", o.out, "directory for summary.csv and traces");
  sweep->add_flag("--line-search-first", o.line_search_first);
  sweep->add_option("--max-outer", o.max_outer);
  sweep->add_flag("--serial", o.serial, "evaluate cells on one thread");
  sweep->add_flag("--skip-bounds", o.skip_bounds, "do not write bounds.csv next to the summary");

  auto* region = app.add_subcommand("scalar-region", "exact scalar thresholds over a b grid");
  region->add_option("--k", o.ks)->delimiter(',');
  region->add_option("--b", o.b_values, "explicit b values")->delimiter(',');
  region->add_option("--b-range", o.b_range, "lo,hi,count")->delimiter(',')->expected(3);
  region->add_option("--method", o.methods, "keep only these methods")->delimiter(',');
  region->add_option("--out", o.out, "CSV file");
  region->add_flag("--serial", o.serial);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(std::move(reversed));
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (check->parsed()) return cmd_check(o, out);
    if (bound->parsed()) return cmd_bound(o, out);
    if (solve_cmd->parsed()) return cmd_solve(o, out);
    if (sweep->parsed()) return cmd_sweep(o, out);
    return cmd_scalar_region(o, out);
  } catch (const ProblemParseError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace oneshot::cli
