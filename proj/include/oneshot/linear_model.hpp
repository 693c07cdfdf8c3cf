#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "oneshot/linalg.hpp"

namespace oneshot {

/// Linear inverse problem in fixed-point form.
///
/// The state u solves u = B u + M sigma + F and is observed through H.
/// Dimensions are checked on construction and the operators are immutable
/// afterwards.
class LinearProblem {
 public:
  LinearProblem(Matrix B, Matrix M, Matrix H, Vector F);

  const Matrix& B() const noexcept { return B_; }
  const Matrix& M() const noexcept { return M_; }
  const Matrix& H() const noexcept { return H_; }
  const Vector& F() const noexcept { return F_; }

  Index state_dim() const noexcept { return B_.rows(); }
  Index param_dim() const noexcept { return M_.cols(); }
  Index measurement_dim() const noexcept { return H_.rows(); }

 private:
  Matrix B_;
  Matrix M_;
  Matrix H_;
  Vector F_;
};

/// Same structure over complex states and observations. The parameter
/// remains real, so M maps real vectors into the complex state space.
class ComplexLinearProblem {
 public:
  ComplexLinearProblem(ComplexMatrix B, ComplexMatrix M, ComplexMatrix H, ComplexVector F);

  const ComplexMatrix& B() const noexcept { return B_; }
  const ComplexMatrix& M() const noexcept { return M_; }
  const ComplexMatrix& H() const noexcept { return H_; }
  const ComplexVector& F() const noexcept { return F_; }

  Index state_dim() const noexcept { return B_.rows(); }
  Index param_dim() const noexcept { return M_.cols(); }
  Index measurement_dim() const noexcept { return H_.rows(); }

 private:
  ComplexMatrix B_;
  ComplexMatrix M_;
  ComplexMatrix H_;
  ComplexVector F_;
};

struct AssumptionReport {
  double spectral_radius = 0.0;
  /// Extreme singular values of H (I - B)^{-1} M; zero when I - B is singular.
  double min_singular_value = 0.0;
  double max_singular_value = 0.0;
  bool valid = false;
  std::vector<std::string> diagnostics;
};

struct ValidationTolerances {
  double radius_margin = 1e-8;
  double injectivity = 1e-10;
};

AssumptionReport validate(const LinearProblem& problem, ValidationTolerances tol = {});
AssumptionReport validate(const ComplexLinearProblem& problem, ValidationTolerances tol = {});

/// Factorizes I - B once and reuses it for state and adjoint solves.
class DirectSolver {
 public:
  explicit DirectSolver(const LinearProblem& problem);

  /// Solves u = B u + M sigma + F.
  Vector state(const Vector& sigma) const;
  /// Solves p = B^T p + H^T (H u - data).
  Vector adjoint(const Vector& state, const Vector& data) const;
  /// Solves (I - B) x = rhs for a block of right-hand sides.
  Matrix solve(const Matrix& rhs) const;

 private:
  Matrix M_;
  Matrix H_;
  Vector F_;
  Eigen::FullPivLU<Matrix> lu_;
};

Vector exact_state(const LinearProblem& problem, const Vector& sigma);
Vector exact_adjoint(const LinearProblem& problem, const Vector& sigma, const Vector& data);

/// 0.5 * ||H u - data||^2
double misfit(const LinearProblem& problem, const Vector& state, const Vector& data);

/// H (I - B)^{-1} M, the map from parameters to noise-free data.
Matrix reduced_operator(const LinearProblem& problem);

/// Equivalent real problem of doubled state dimension.
LinearProblem realify(const ComplexLinearProblem& problem);
Vector realify(const ComplexVector& v);

/// Random problem with ||B||_2 == target_norm. Gaussian entries, redrawn
/// until the reduced operator is injective. target_norm must lie in [0, 1).
LinearProblem random_contraction(Index state_dim, Index param_dim, Index measurement_dim,
                                 double target_norm, std::uint64_t seed);

struct HelmholtzOptions {
  int grid = 16;              ///< cells per side on the unit square
  double wavenumber = 6.283185307179586;
  double contrast = 0.05;     ///< amplitude of the random background perturbation
  std::uint64_t seed = 1;
};

/// Finite-difference Helmholtz scattering model with a random background
/// and a 2x2 layout of piecewise-constant parameter patches. Measurements
/// are weighted boundary fluxes.
LinearProblem helmholtz_toy(const HelmholtzOptions& options);

}  // namespace oneshot
