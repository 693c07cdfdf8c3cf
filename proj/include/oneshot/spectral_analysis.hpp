#pragma once

#include "oneshot/linalg.hpp"
#include "oneshot/linear_model.hpp"
#include "oneshot/one_shot_solvers.hpp"

namespace oneshot {

/// Operators accumulated over k warm-started inner steps:
///   geometric       = sum_{j<k} B^j
///   cross           = sum_{i+j=k-1} (B^T)^i H^T H B^j
///   cumulative_cross = sum_{l=1}^{k-1} cross_l   (zero for k = 1)
struct AccumulatedOperators {
  int k = 0;
  Matrix geometric;
  Matrix cross;
  Matrix cumulative_cross;
};

AccumulatedOperators accumulated_operators(const Matrix& B, const Matrix& H, int k);

/// Error propagation matrix acting on the stacked error (p, u, sigma).
Matrix iteration_matrix(const LinearProblem& problem, MethodSpec method, double tau);

struct ConvergenceVerdict {
  bool converges = false;
  double radius = 0.0;
};

inline constexpr double kRadiusMargin = 1e-10;

ConvergenceVerdict predict_convergence(const LinearProblem& problem, MethodSpec method, double tau);

/// Smallest distance from an eigenvalue to 1.
double distance_to_one(const Matrix& a);

enum class Execution { Serial, Parallel };

struct ResolventOptions {
  int samples = 720;
  Execution execution = Execution::Parallel;
};

/// sup over |z| >= 1 of ||(I - T/z)^{-1}||_2, never below 1. The norm is
/// subharmonic outside the spectrum so the unit circle carries the
/// supremum; it is sampled and the best sample refined by golden section.
/// Throws std::domain_error when rho(T) >= 1.
double resolvent_constant(const Matrix& T, ResolventOptions options = {});

/// ||(I - T/z)^{-1}||_2 at z = exp(i theta).
double resolvent_norm_on_circle(const Matrix& T, double theta);

}  // namespace oneshot
