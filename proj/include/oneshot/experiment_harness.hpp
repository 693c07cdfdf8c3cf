#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "oneshot/linear_model.hpp"
#include "oneshot/one_shot_solvers.hpp"
#include "oneshot/scalar_stability.hpp"
#include "oneshot/spectral_analysis.hpp"
#include "oneshot/step_bounds.hpp"

namespace oneshot {

/// Reference parameter 10, initial guess 12 in every component, noise-free
/// data from the reference. Values from the file take precedence. The
/// one-shot kinds start from the direct state and adjoint at the initial
/// guess, like the gradient-descent kinds.
RunSetup default_setup(const LinearProblem& problem, const std::optional<Vector>& sigma_exact = {},
                       const std::optional<Vector>& sigma0 = {});

/// Backtracking (factor 0.5, sufficient decrease 1e-4) on the first
/// gradient step with direct solves. Returns the accepted step.
double first_step_line_search(const LinearProblem& problem, const RunSetup& setup, double tau0,
                              int max_halvings = 60);

struct SweepCell {
  MethodSpec method;
  double tau = 0.0;
};

/// Cartesian product methods x ks x taus. Gradient-descent kinds appear
/// once per tau regardless of the ks.
std::vector<SweepCell> sweep_grid(const std::vector<MethodKind>& methods, const std::vector<int>& ks,
                                  const std::vector<double>& taus);

enum class Verdict { Converges, Diverges };

struct SweepCellResult {
  SweepCell cell;
  std::optional<ConvergenceTrace> trace;
  std::string error;
  double oracle_radius = 0.0;
  /// |rho - 1| < near_band, where the finite run cannot be trusted to agree.
  bool near_threshold = false;
};

struct SweepOptions {
  SolverConfig solver;   ///< tau is taken from each cell
  double near_band = 1e-3;
  bool compute_oracle = true;
  Execution execution = Execution::Parallel;
};

std::vector<SweepCellResult> run_sweep(const LinearProblem& problem, const RunSetup& setup,
                                       const std::vector<SweepCell>& cells,
                                       const SweepOptions& options);

/// Finite-run verdict: explicit convergence or divergence, otherwise the
/// trend of the error over the last quarter of the run.
Verdict empirical_verdict(const ConvergenceTrace& trace);

std::string trace_file_name(const SweepCell& cell);

/// Header method,k,tau,status,outer_iters,final_cost,rho. Failed cells
/// carry status "error".
void write_summary_csv(std::ostream& out, const std::vector<SweepCellResult>& results);

/// Writes summary.csv and one trace file per successful cell.
void write_sweep(const std::filesystem::path& dir, const std::vector<SweepCellResult>& results);

struct BoundRow {
  MethodSpec method;
  std::string formula_id;
  double value = 0.0;
  std::string error;
};

/// Sufficient step bound for every distinct (method, k) of the cells, in
/// first-appearance order.
std::vector<BoundRow> sweep_bounds(const LinearProblem& problem, const std::vector<SweepCell>& cells);

/// Header method,k,formula_id,bound. Failed rows carry formula_id "error".
void write_bounds_csv(std::ostream& out, const std::vector<BoundRow>& rows);

struct RegionRow {
  double b = 0.0;
  int k = 1;
  MethodKind method = MethodKind::UsualGD;
  double threshold = 0.0;
  std::string branch;
};

/// Exact scalar thresholds (h = m = 1) for all four schemes on a b grid.
std::vector<RegionRow> scalar_region(const std::vector<double>& b_grid, const std::vector<int>& ks,
                                     Execution execution = Execution::Parallel);

/// Header b,k,method,threshold,branch; infinity prints as "inf".
void write_region_csv(std::ostream& out, const std::vector<RegionRow>& rows);

/// printf("%.17g") with inf/nan spelled out.
std::string format_double(double x);

}  // namespace oneshot
