#pragma once

#include <iosfwd>
#include <optional>
#include <string_view>
#include <vector>

#include "oneshot/linear_model.hpp"

namespace oneshot {

enum class MethodKind { UsualGD, ShiftedGD, KStepOneShot, ShiftedKStepOneShot };

/// Iteration scheme and its number of inner fixed-point steps. k is
/// ignored by the gradient-descent kinds, which solve the state and
/// adjoint equations directly.
struct MethodSpec {
  MethodKind kind = MethodKind::UsualGD;
  int k = 1;

  bool uses_inner_iterations() const noexcept {
    return kind == MethodKind::KStepOneShot || kind == MethodKind::ShiftedKStepOneShot;
  }
  bool is_shifted() const noexcept {
    return kind == MethodKind::ShiftedGD || kind == MethodKind::ShiftedKStepOneShot;
  }
  friend bool operator==(const MethodSpec&, const MethodSpec&) = default;
};

/// Short CLI names: gd, sgd, kshot, skshot.
std::string_view method_name(MethodKind kind);
std::optional<MethodKind> parse_method(std::string_view name);

enum class RunStatus { Converged, MaxIterations, Diverged };
std::string_view status_name(RunStatus status);

struct SolverConfig {
  double tau = 0.0;
  int max_outer = 2000;
  /// Relative to the first nonzero cost and gradient norm of the run.
  double cost_tol = 1e-5;
  double grad_tol = 1e-5;
  /// Divergence when ||sigma^n - sigma^0|| exceeds this or any iterate is not finite.
  double divergence_threshold = 1e12;
  /// Store u^n and p^n in every record.
  bool keep_states = false;
};

/// Inputs of one inversion run.
struct RunSetup {
  Vector data;
  Vector sigma0;
  std::optional<Vector> sigma_exact;
  /// Warm start of the one-shot kinds, zero when absent.
  std::optional<Vector> state0;
  std::optional<Vector> adjoint0;
};

struct IterationRecord {
  int n = 0;
  long accumulated_inner = 0;
  /// 0.5 ||H u^n - f||^2 with the current state iterate.
  double cost = 0.0;
  /// ||M^T p^n|| with the current adjoint iterate.
  double grad_norm = 0.0;
  /// ||sigma^n - sigma_exact||, NaN without a reference parameter.
  double err_sigma = 0.0;
  Vector sigma;
  Vector state;
  Vector adjoint;
};

struct ConvergenceTrace {
  MethodSpec method;
  double tau = 0.0;
  RunStatus status = RunStatus::MaxIterations;
  std::vector<IterationRecord> records;

  const IterationRecord& last() const { return records.back(); }
  int outer_iterations() const { return records.empty() ? 0 : records.back().n; }
};

/// Accumulated inner-iteration count after n outer iterations: 0, then 1,
/// then k more per outer step.
long accumulated_inner(int n, int k);

ConvergenceTrace solve(const LinearProblem& problem, MethodSpec method, const RunSetup& setup,
                       const SolverConfig& config);

ConvergenceTrace usual_gd(const LinearProblem& problem, const RunSetup& setup,
                          const SolverConfig& config);
ConvergenceTrace shifted_gd(const LinearProblem& problem, const RunSetup& setup,
                            const SolverConfig& config);
ConvergenceTrace k_step_one_shot(const LinearProblem& problem, int k, const RunSetup& setup,
                                 const SolverConfig& config);
ConvergenceTrace shifted_k_step_one_shot(const LinearProblem& problem, int k,
                                         const RunSetup& setup, const SolverConfig& config);

/// Header n,accumulated_inner,cost,grad_norm,err_sigma,status with 17
/// significant digits. Rows before the last carry status "running".
void write_trace_csv(std::ostream& out, const ConvergenceTrace& trace);

}  // namespace oneshot
