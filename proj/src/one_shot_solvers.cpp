#include "oneshot/one_shot_solvers.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

namespace oneshot {

std::string_view method_name(MethodKind kind) {
  switch (kind) {
    case MethodKind::UsualGD: return "gd";
    case MethodKind::ShiftedGD: return "sgd";
    case MethodKind::KStepOneShot: return "kshot";
    case MethodKind::ShiftedKStepOneShot: return "skshot";
  }
  return "?";
}

std::optional<MethodKind> parse_method(std::string_view name) {
  if (name == "gd") return MethodKind::UsualGD;
  if (name == "sgd") return MethodKind::ShiftedGD;
  if (name == "kshot") return MethodKind::KStepOneShot;
  if (name == "skshot") return MethodKind::ShiftedKStepOneShot;
  return std::nullopt;
}

std::string_view status_name(RunStatus status) {
  switch (status) {
    case RunStatus::Converged: return "converged";
    case RunStatus::MaxIterations: return "max_iter";
    case RunStatus::Diverged: return "diverged";
  }
  return "?";
}

long accumulated_inner(int n, int k) {
  if (n <= 0) return 0;
  return 1 + static_cast<long>(n - 1) * k;
}

namespace {

void check_inputs(const LinearProblem& problem, MethodSpec method, const RunSetup& setup,
                  const SolverConfig& config) {
  if (!(config.tau > 0.0) || !std::isfinite(config.tau))
    throw std::invalid_argument("descent step must be positive and finite");
  if (method.uses_inner_iterations() && method.k < 1)
    throw std::invalid_argument("inner iteration count k must be at least 1");
  if (config.max_outer < 0) throw std::invalid_argument("max_outer must be non-negative");
  if (setup.data.size() != problem.measurement_dim())
    throw std::invalid_argument("data length does not match the number of measurements");
  if (setup.sigma0.size() != problem.param_dim())
    throw std::invalid_argument("initial parameter has wrong length");
  if (setup.sigma_exact && setup.sigma_exact->size() != problem.param_dim())
    throw std::invalid_argument("reference parameter has wrong length");
  if (setup.state0 && setup.state0->size() != problem.state_dim())
    throw std::invalid_argument("initial state has wrong length");
  if (setup.adjoint0 && setup.adjoint0->size() != problem.state_dim())
    throw std::invalid_argument("initial adjoint has wrong length");
}

// Tracks the stopping rule. References are the first nonzero values seen,
// and a quantity that is exactly zero counts as converged.
class StoppingRule {
 public:
  explicit StoppingRule(const SolverConfig& config) : config_(config) {}

  bool satisfied(double cost, double grad) {
    if (cost_ref_ == 0.0) cost_ref_ = cost;
    if (grad_ref_ == 0.0) grad_ref_ = grad;
    const double rc = cost == 0.0 ? 0.0 : cost / cost_ref_;
    const double rg = grad == 0.0 ? 0.0 : grad / grad_ref_;
    return rc <= config_.cost_tol && rg <= config_.grad_tol;
  }

 private:
  const SolverConfig& config_;
  double cost_ref_ = 0.0;
  double grad_ref_ = 0.0;
};

ConvergenceTrace run(const LinearProblem& problem, MethodSpec method, const RunSetup& setup,
                     const SolverConfig& config) {
  check_inputs(problem, method, setup, config);
  const int k = method.uses_inner_iterations() ? method.k : 1;

  const Matrix& B = problem.B();
  const Matrix& M = problem.M();
  const Matrix& H = problem.H();
  const Vector& F = problem.F();
  const Vector& f = setup.data;
  const Matrix Bt = B.transpose();
  const Matrix Mt = M.transpose();
  const Matrix Ht = H.transpose();

  std::optional<DirectSolver> direct;
  Vector sigma = setup.sigma0;
  Vector u;
  Vector p;
  if (method.uses_inner_iterations()) {
    u = setup.state0.value_or(Vector::Zero(problem.state_dim()));
    p = setup.adjoint0.value_or(Vector::Zero(problem.state_dim()));
  } else {
    direct.emplace(problem);
    u = direct->state(sigma);
    p = direct->adjoint(u, f);
  }

  ConvergenceTrace trace;
  trace.method = method;
  trace.tau = config.tau;
  trace.records.reserve(static_cast<std::size_t>(std::min(config.max_outer, 100000)) + 1);

  StoppingRule stop(config);
  const auto record = [&](int n) -> const IterationRecord& {
    IterationRecord r;
    r.n = n;
    r.accumulated_inner = method.uses_inner_iterations() ? accumulated_inner(n, k) : n;
    r.cost = 0.5 * (H * u - f).squaredNorm();
    r.grad_norm = (Mt * p).norm();
    r.err_sigma = setup.sigma_exact ? (sigma - *setup.sigma_exact).norm()
                                    : std::numeric_limits<double>::quiet_NaN();
    r.sigma = sigma;
    if (config.keep_states) {
      r.state = u;
      r.adjoint = p;
    }
    trace.records.push_back(std::move(r));
    return trace.records.back();
  };

  const auto diverged = [&](const IterationRecord& r) {
    if (!sigma.allFinite() || !u.allFinite() || !p.allFinite()) return true;
    if (!std::isfinite(r.cost) || !std::isfinite(r.grad_norm)) return true;
    return (sigma - setup.sigma0).norm() > config.divergence_threshold;
  };

  {
    const IterationRecord& r0 = record(0);
    if (stop.satisfied(r0.cost, r0.grad_norm)) {
      trace.status = RunStatus::Converged;
      return trace;
    }
  }

  Vector u_next(u.size());
  Vector p_next(p.size());
  for (int n = 1; n <= config.max_outer; ++n) {
    const Vector sigma_next = sigma - config.tau * (Mt * p);
    switch (method.kind) {
      case MethodKind::UsualGD:
        u = direct->state(sigma_next);
        p = direct->adjoint(u, f);
        break;
      case MethodKind::ShiftedGD:
        u = direct->state(sigma);
        p = direct->adjoint(u, f);
        break;
      case MethodKind::KStepOneShot:
      case MethodKind::ShiftedKStepOneShot: {
        const Vector drive = M * (method.kind == MethodKind::KStepOneShot ? sigma_next : sigma) + F;
        for (int l = 0; l < k; ++l) {
          // Both updates read the previous inner iterate.
          u_next.noalias() = B * u + drive;
          p_next.noalias() = Bt * p + Ht * (H * u - f);
          u.swap(u_next);
          p.swap(p_next);
        }
        break;
      }
    }
    sigma = sigma_next;

    const IterationRecord& r = record(n);
    if (diverged(r)) {
      trace.status = RunStatus::Diverged;
      return trace;
    }
    if (stop.satisfied(r.cost, r.grad_norm)) {
      trace.status = RunStatus::Converged;
      return trace;
    }
  }
  trace.status = RunStatus::MaxIterations;
  return trace;
}

void append_number(std::string& line, double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  line += buf;
}

}  // namespace

ConvergenceTrace solve(const LinearProblem& problem, MethodSpec method, const RunSetup& setup,
                       const SolverConfig& config) {
  return run(problem, method, setup, config);
}

ConvergenceTrace usual_gd(const LinearProblem& problem, const RunSetup& setup,
                          const SolverConfig& config) {
  return run(problem, {MethodKind::UsualGD, 1}, setup, config);
}

ConvergenceTrace shifted_gd(const LinearProblem& problem, const RunSetup& setup,
                            const SolverConfig& config) {
  return run(problem, {MethodKind::ShiftedGD, 1}, setup, config);
}

ConvergenceTrace k_step_one_shot(const LinearProblem& problem, int k, const RunSetup& setup,
                                 const SolverConfig& config) {
  return run(problem, {MethodKind::KStepOneShot, k}, setup, config);
}

ConvergenceTrace shifted_k_step_one_shot(const LinearProblem& problem, int k,
                                         const RunSetup& setup, const SolverConfig& config) {
  return run(problem, {MethodKind::ShiftedKStepOneShot, k}, setup, config);
}

void write_trace_csv(std::ostream& out, const ConvergenceTrace& trace) {
  out << "n,accumulated_inner,cost,grad_norm,err_sigma,status\n";
  std::string line;
  for (std::size_t i = 0; i < trace.records.size(); ++i) {
    const IterationRecord& r = trace.records[i];
    line.clear();
    line += std::to_string(r.n);
    line += ',';
    line += std::to_string(r.accumulated_inner);
    line += ',';
    append_number(line, r.cost);
    line += ',';
    append_number(line, r.grad_norm);
    line += ',';
    append_number(line, r.err_sigma);
    line += ',';
    line += i + 1 == trace.records.size() ? status_name(trace.status) : std::string_view("running");
    line += '\n';
    out << line;
  }
}

}  // namespace oneshot
