#include "oneshot/experiment_harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace oneshot {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

RunSetup default_setup(const LinearProblem& problem, const std::optional<Vector>& sigma_exact,
                       const std::optional<Vector>& sigma0) {
  const Index ns = problem.param_dim();
  RunSetup setup;
  setup.sigma_exact = sigma_exact.value_or(Vector::Constant(ns, 10.0));
  setup.sigma0 = sigma0.value_or(Vector::Constant(ns, 12.0));
  const DirectSolver direct(problem);
  setup.data = problem.H() * direct.state(*setup.sigma_exact);
  setup.state0 = direct.state(setup.sigma0);
  setup.adjoint0 = direct.adjoint(*setup.state0, setup.data);
  return setup;
}

double first_step_line_search(const LinearProblem& problem, const RunSetup& setup, double tau0,
                              int max_halvings) {
  if (!(tau0 > 0.0)) throw std::invalid_argument("line search needs a positive initial step");
  const DirectSolver direct(problem);
  const auto cost = [&](const Vector& sigma) { return misfit(problem, direct.state(sigma), setup.data); };
  const Vector u0 = direct.state(setup.sigma0);
  const Vector grad = problem.M().transpose() * direct.adjoint(u0, setup.data);
  const double j0 = misfit(problem, u0, setup.data);
  const double slope = grad.squaredNorm();
  double tau = tau0;
  for (int i = 0; i < max_halvings; ++i) {
    const double j = cost(setup.sigma0 - tau * grad);
    if (std::isfinite(j) && j <= j0 - 1e-4 * tau * slope) break;
    tau *= 0.5;
  }
  return tau;
}

std::vector<SweepCell> sweep_grid(const std::vector<MethodKind>& methods, const std::vector<int>& ks,
                                  const std::vector<double>& taus) {
  std::vector<SweepCell> cells;
  for (MethodKind kind : methods) {
    const bool inner = kind == MethodKind::KStepOneShot || kind == MethodKind::ShiftedKStepOneShot;
    const std::vector<int> kk = inner ? ks : std::vector<int>{1};
    for (int k : kk)
      for (double tau : taus) cells.push_back({{kind, k}, tau});
  }
  return cells;
}

namespace {

SweepCellResult run_cell(const LinearProblem& problem, const RunSetup& setup, const SweepCell& cell,
                         const SweepOptions& options) {
  SweepCellResult result;
  result.cell = cell;
  result.oracle_radius = std::numeric_limits<double>::quiet_NaN();
  try {
    SolverConfig config = options.solver;
    config.tau = cell.tau;
    result.trace = solve(problem, cell.method, setup, config);
    if (options.compute_oracle) {
      result.oracle_radius = predict_convergence(problem, cell.method, cell.tau).radius;
      result.near_threshold = std::abs(result.oracle_radius - 1.0) < options.near_band;
    }
  } catch (const std::exception& e) {
    result.trace.reset();
    result.error = e.what();
  }
  return result;
}

}  // namespace

std::vector<SweepCellResult> run_sweep(const LinearProblem& problem, const RunSetup& setup,
                                       const std::vector<SweepCell>& cells,
                                       const SweepOptions& options) {
  std::vector<SweepCellResult> results(cells.size());
  const long n = static_cast<long>(cells.size());
  if (options.execution == Execution::Parallel) {
#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < n; ++i)
      results[static_cast<std::size_t>(i)] = run_cell(problem, setup, cells[static_cast<std::size_t>(i)], options);
  } else {
    for (long i = 0; i < n; ++i)
      results[static_cast<std::size_t>(i)] = run_cell(problem, setup, cells[static_cast<std::size_t>(i)], options);
  }
  return results;
}

Verdict empirical_verdict(const ConvergenceTrace& trace) {
  if (trace.status == RunStatus::Converged) return Verdict::Converges;
  if (trace.status == RunStatus::Diverged) return Verdict::Diverges;
  const auto& recs = trace.records;
  const std::size_t n = recs.size();
  if (n < 8) return Verdict::Diverges;
  const auto measure = [&](std::size_t i) {
    return std::isnan(recs[i].err_sigma) ? recs[i].cost : recs[i].err_sigma;
  };
  // Window maxima smooth out oscillating modes.
  const auto window_max = [&](std::size_t from, std::size_t to) {
    double m = 0.0;
    for (std::size_t i = from; i < to; ++i) m = std::max(m, measure(i));
    return m;
  };
  const double earlier = window_max(n / 2, 5 * n / 8);
  const double later = window_max(7 * n / 8, n);
  return later < earlier ? Verdict::Converges : Verdict::Diverges;
}

std::string trace_file_name(const SweepCell& cell) {
  char tau[40];
  std::snprintf(tau, sizeof tau, "%.10g", cell.tau);
  return "trace_" + std::string(method_name(cell.method.kind)) + "_k" + std::to_string(cell.method.k) +
         "_tau" + tau + ".csv";
}

void write_summary_csv(std::ostream& out, const std::vector<SweepCellResult>& results) {
  out << "method,k,tau,status,outer_iters,final_cost,rho\n";
  for (const SweepCellResult& r : results) {
    out << method_name(r.cell.method.kind) << ',' << r.cell.method.k << ',' << format_double(r.cell.tau)
        << ',';
    if (r.trace) {
      out << status_name(r.trace->status) << ',' << r.trace->outer_iterations() << ','
          << format_double(r.trace->last().cost);
    } else {
      out << "error,0,nan";
    }
    out << ',' << format_double(r.oracle_radius) << '\n';
  }
}

void write_sweep(const std::filesystem::path& dir, const std::vector<SweepCellResult>& results) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream summary(dir / "summary.csv");
    if (!summary) throw std::runtime_error("cannot write " + (dir / "summary.csv").string());
    write_summary_csv(summary, results);
  }
  for (const SweepCellResult& r : results) {
    if (!r.trace) continue;
    std::ofstream out(dir / trace_file_name(r.cell));
    if (!out) throw std::runtime_error("cannot write trace in " + dir.string());
    write_trace_csv(out, *r.trace);
  }
}

std::vector<BoundRow> sweep_bounds(const LinearProblem& problem, const std::vector<SweepCell>& cells) {
  std::vector<BoundRow> rows;
  for (const SweepCell& cell : cells) {
    MethodSpec m = cell.method;
    if (!m.uses_inner_iterations()) m.k = 1;
    if (std::any_of(rows.begin(), rows.end(), [&](const BoundRow& r) { return r.method == m; })) continue;
    BoundRow row;
    row.method = m;
    try {
      const bounds::StepBound b = bounds::matrix_bound(problem, m);
      row.formula_id = b.formula_id;
      row.value = b.value;
    } catch (const std::exception& e) {
      row.formula_id = "error";
      row.value = std::numeric_limits<double>::quiet_NaN();
      row.error = e.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_bounds_csv(std::ostream& out, const std::vector<BoundRow>& rows) {
  out << "method,k,formula_id,bound\n";
  for (const BoundRow& r : rows)
    out << method_name(r.method.kind) << ',' << r.method.k << ',' << r.formula_id << ','
        << format_double(r.value) << '\n';
}

namespace {

std::vector<RegionRow> region_block(double b, const std::vector<int>& ks) {
  std::vector<RegionRow> rows;
  for (int k : ks) {
    rows.push_back({b, k, MethodKind::UsualGD, scalar::usual_gd_threshold(b), "usual-gd"});
    rows.push_back({b, k, MethodKind::ShiftedGD, scalar::shifted_gd_threshold(b), "shifted-gd"});
    const scalar::ScalarThreshold eta = scalar::k_step_threshold(k, b);
    rows.push_back({b, k, MethodKind::KStepOneShot, eta.value, eta.branch});
    const scalar::ScalarThreshold kappa = scalar::shifted_k_step_threshold(k, b);
    rows.push_back({b, k, MethodKind::ShiftedKStepOneShot, kappa.value, kappa.branch});
  }
  return rows;
}

}  // namespace

std::vector<RegionRow> scalar_region(const std::vector<double>& b_grid, const std::vector<int>& ks,
                                     Execution execution) {
  for (double b : b_grid)
    if (!(std::abs(b) < 1.0)) throw std::invalid_argument("b grid must lie in (-1, 1)");
  for (int k : ks)
    if (k < 1) throw std::invalid_argument("k must be at least 1");

  std::vector<std::vector<RegionRow>> blocks(b_grid.size());
  const long n = static_cast<long>(b_grid.size());
  if (execution == Execution::Parallel) {
#pragma omp parallel for schedule(static)
    for (long i = 0; i < n; ++i)
      blocks[static_cast<std::size_t>(i)] = region_block(b_grid[static_cast<std::size_t>(i)], ks);
  } else {
    for (long i = 0; i < n; ++i)
      blocks[static_cast<std::size_t>(i)] = region_block(b_grid[static_cast<std::size_t>(i)], ks);
  }
  std::vector<RegionRow> rows;
  for (auto& block : blocks) rows.insert(rows.end(), block.begin(), block.end());
  return rows;
}

void write_region_csv(std::ostream& out, const std::vector<RegionRow>& rows) {
  out << "b,k,method,threshold,branch\n";
  for (const RegionRow& r : rows) {
    out << format_double(r.b) << ',' << r.k << ',' << method_name(r.method) << ','
        << format_double(r.threshold) << ',' << r.branch << '\n';
  }
}

}  // namespace oneshot
