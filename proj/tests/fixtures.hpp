#pragma once

#include <algorithm>

#include "oneshot/linear_model.hpp"
#include "oneshot/one_shot_solvers.hpp"
#include "oneshot/spectral_analysis.hpp"

namespace fixtures {

using namespace oneshot;

/// Noise-free setup with reference parameter ones and a shifted start.
inline RunSetup reference_setup(const LinearProblem& p) {
  RunSetup s;
  s.sigma_exact = Vector::Ones(p.param_dim());
  s.sigma0 = Vector::LinSpaced(p.param_dim(), 2.0, -1.0);
  s.data = p.H() * exact_state(p, *s.sigma_exact);
  return s;
}

/// Stacked error (p, u, sigma) of a record kept with keep_states.
inline Vector stacked_error(const LinearProblem& p, const RunSetup& s, const IterationRecord& r) {
  const Vector u_star = exact_state(p, *s.sigma_exact);
  Vector e(2 * p.state_dim() + p.param_dim());
  e << r.adjoint, r.state - u_star, r.sigma - *s.sigma_exact;
  return e;
}

/// Largest per-step deviation between solver errors and iteration-matrix
/// powers applied to the initial error, relative to the initial error.
inline double matrix_equivalence_gap(const LinearProblem& p, MethodSpec method, double tau, int steps) {
  const RunSetup s = reference_setup(p);
  SolverConfig c;
  c.tau = tau;
  c.max_outer = steps;
  c.cost_tol = -1.0;
  c.grad_tol = -1.0;
  c.keep_states = true;
  const ConvergenceTrace t = solve(p, method, s, c);
  const Matrix T = iteration_matrix(p, method, tau);
  Vector predicted = stacked_error(p, s, t.records.front());
  const double scale = std::max(1.0, predicted.norm());
  double gap = 0.0;
  for (std::size_t n = 1; n < t.records.size(); ++n) {
    predicted = T * predicted;
    gap = std::max(gap, (stacked_error(p, s, t.records[n]) - predicted).norm() / scale);
  }
  if (t.records.size() != static_cast<std::size_t>(steps) + 1) return 1e300;
  return gap;
}

}  // namespace fixtures
