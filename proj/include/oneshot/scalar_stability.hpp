#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "oneshot/one_shot_solvers.hpp"

namespace oneshot::scalar {

/// One-dimensional problem: B = b, H = h, M = m.
struct ScalarProblem {
  double b = 0.0;
  double h = 1.0;
  double m = 1.0;

  /// Throws std::invalid_argument unless |b| < 1 and h, m are nonzero.
  void check() const;
};

/// Monic cubic a0 + a1 z + a2 z^2 + z^3 has all roots strictly inside the
/// unit circle.
bool jury_marden_cubic(double a0, double a1, double a2);

enum class RootLocation { Inside, NotInside, Indeterminate };

struct MardenTable {
  /// rows[j] holds the coefficients of the j-th reduced polynomial,
  /// lowest degree first.
  std::vector<std::vector<double>> rows;
  RootLocation verdict = RootLocation::Indeterminate;
};

/// General criterion on coefficients a_0..a_n (lowest degree first,
/// a_n != 0). A vanishing leading entry makes the verdict indeterminate.
MardenTable jury_marden(std::span<const double> coefficients);

/// 1 - 2k b^{k-1} + 2k b^k - b^{2k}
double sign_polynomial(int k, double b);

/// Roots of sign_polynomial in (-1, 1), ascending. None for k = 1, one in
/// (0, 1) for even k, one in (-1, 0) and one in (0, 1) for odd k >= 3.
std::vector<double> sign_polynomial_roots(int k);

struct ScalarThreshold {
  int k = 1;
  double b = 0.0;
  /// Convergence iff tau * h^2 * m^2 < value. +inf when unconstrained.
  double value = 0.0;
  /// Name of the active formula.
  std::string branch;
};

/// Exact threshold of the k-step scheme.
ScalarThreshold k_step_threshold(int k, double b);

enum class RootForm { Stable, Naive };

/// Exact threshold of the shifted k-step scheme. The naive root form is
/// kept for cross-checking at moderate k.
ScalarThreshold shifted_k_step_threshold(int k, double b, RootForm form = RootForm::Stable);

/// Individual formulas, valid where the corresponding denominators do not vanish.
namespace formulas {
double eta21(int k, double b);
double eta22(int k, double b);
double eta3(int k, double b);
double kappa11(int k, double b);
double kappa12(int k, double b);
double kappa21(int k, double b, RootForm form = RootForm::Stable);
double kappa22(int k, double b);
double kappa3(int k, double b);
}  // namespace formulas

/// 2 (1-b)^2 and (1-b)^2.
double usual_gd_threshold(double b);
double shifted_gd_threshold(double b);

/// Error propagation matrix on (p, u, sigma). k is ignored for the
/// gradient-descent kinds.
Eigen::Matrix3d scalar_iteration_matrix(MethodSpec method, const ScalarProblem& sp, double tau);

}  // namespace oneshot::scalar
