#pragma once

#include <optional>
#include <string>

#include "oneshot/linear_model.hpp"
#include "oneshot/one_shot_solvers.hpp"

namespace oneshot {

/// Sufficient descent-step bounds. Every bound is a value such that any
/// 0 < tau < value makes the chosen iteration converge.
namespace bounds {

enum class Family { Shifted, NonShifted };

Family family_of(MethodKind kind);

/// Angular sector and sector offset used to cover complex eigenvalues.
/// Shifted: 0 < theta0 <= pi/6; non-shifted: 0 < theta0 <= pi/4. Both
/// limits are strict when k >= 2. delta0 > 0.
struct Params {
  double theta0 = 0.0;
  double delta0 = 1.0;

  static Params defaults(Family family, int k);
  /// Throws std::invalid_argument when the invariants are violated.
  void check(Family family, int k) const;
};

/// Individual cases of a bound factor. Entries that do not apply are +inf.
struct Cases {
  double real = 0.0;        ///< real eigenvalues
  double complex1 = 0.0;
  double complex2 = 0.0;
  double complex3 = 0.0;
  double complex4 = 0.0;    ///< shifted family only
  double value = 0.0;       ///< minimum over the cases
};

/// Bound factors in terms of b = ||B|| < 1. Multiply by 1/(||H||^2 ||M||^2)
/// to get the step bound. b = 0 gives the exact zero-operator bounds.
Cases shifted_factor_cases(int k, double b, Params params);
Cases nonshifted_factor_cases(int k, double b, Params params);
double shifted_factor(int k, double b, std::optional<Params> params = std::nullopt);
double nonshifted_factor(int k, double b, std::optional<Params> params = std::nullopt);

/// Simplified one-step factors with fixed sector parameters.
double practical_shifted_one_step(double b);
double practical_nonshifted_one_step(double b);

/// Operator norms that enter a bound.
struct NormInputs {
  double norm_B = 0.0;
  double norm_H = 0.0;
  double norm_M = 0.0;
  double reduced_norm = 0.0;           ///< ||H (I - B)^{-1} M||
  std::optional<double> norm_power;    ///< ||B^k||
  std::optional<double> resolvent;     ///< s(B^k)
  std::optional<double> norm_geometric;
  std::optional<double> norm_cumulative;
};

struct StepBound {
  double value = 0.0;
  std::string formula_id;
  std::optional<Params> params;
  NormInputs norms;
};

StepBound gd_bound(const LinearProblem& problem);
StepBound shifted_gd_bound(const LinearProblem& problem);

/// Bound for a general problem. Uses resolvent-based estimates that hold
/// whenever rho(B) < 1, and when ||B|| < 1 also the closed-form factors;
/// the larger of the two is returned.
StepBound matrix_bound(const LinearProblem& problem, MethodSpec method,
                       std::optional<Params> params = std::nullopt);

/// Resolvent-based cases alone, exposed for testing.
Cases resolvent_cases(MethodSpec method, const NormInputs& norms, Params params);

}  // namespace bounds
}  // namespace oneshot
