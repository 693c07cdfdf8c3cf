#include "oneshot/spectral_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace oneshot {

AccumulatedOperators accumulated_operators(const Matrix& B, const Matrix& H, int k) {
  if (k < 1) throw std::invalid_argument("accumulated_operators: k must be at least 1");
  if (B.rows() != B.cols() || H.cols() != B.rows())
    throw std::invalid_argument("accumulated_operators: dimension mismatch");
  const Index n = B.rows();
  const Matrix HtH = H.transpose() * H;

  AccumulatedOperators out;
  out.k = 1;
  out.geometric = Matrix::Identity(n, n);
  out.cross = HtH;
  out.cumulative_cross = Matrix::Zero(n, n);
  Matrix power = B;  // B^j for the step being added
  for (int j = 1; j < k; ++j) {
    out.cumulative_cross += out.cross;
    out.cross = B.transpose() * out.cross + HtH * power;
    out.geometric += power;
    power = power * B;
    out.k = j + 1;
  }
  return out;
}

Matrix iteration_matrix(const LinearProblem& problem, MethodSpec method, double tau) {
  if (!std::isfinite(tau)) throw std::invalid_argument("iteration_matrix: tau must be finite");
  const Index nu = problem.state_dim();
  const Index ns = problem.param_dim();
  const Matrix& B = problem.B();
  const Matrix& M = problem.M();
  const Matrix Mt = M.transpose();

  Matrix T = Matrix::Zero(2 * nu + ns, 2 * nu + ns);
  // Blocks: rows/cols 0 = adjoint, 1 = state, 2 = parameter.
  auto blk = [&](int r, int c) {
    const Index r0 = r * nu;
    const Index c0 = c * nu;
    const Index rows = r == 2 ? ns : nu;
    const Index cols = c == 2 ? ns : nu;
    return T.block(r0, c0, rows, cols);
  };
  blk(2, 0) = -tau * Mt;
  blk(2, 2) = Matrix::Identity(ns, ns);

  switch (method.kind) {
    case MethodKind::UsualGD:
    case MethodKind::ShiftedGD: {
      const DirectSolver direct(problem);
      const Matrix stateMap = direct.solve(M);  // (I - B)^{-1} M
      const Matrix HtH = problem.H().transpose() * problem.H();
      const Matrix adjointMap = direct.solve(Matrix::Identity(nu, nu)).transpose() * HtH * stateMap;
      blk(0, 2) = adjointMap;
      blk(1, 2) = stateMap;
      if (method.kind == MethodKind::UsualGD) {
        blk(0, 0) = -tau * adjointMap * Mt;
        blk(1, 0) = -tau * stateMap * Mt;
      }
      break;
    }
    case MethodKind::KStepOneShot:
    case MethodKind::ShiftedKStepOneShot: {
      if (method.k < 1) throw std::invalid_argument("iteration_matrix: k must be at least 1");
      const AccumulatedOperators ops = accumulated_operators(B, problem.H(), method.k);
      const Matrix Bk = matrix_power(B, method.k);
      blk(0, 0) = Bk.transpose();
      blk(0, 1) = ops.cross;
      blk(0, 2) = ops.cumulative_cross * M;
      blk(1, 1) = Bk;
      blk(1, 2) = ops.geometric * M;
      if (method.kind == MethodKind::KStepOneShot) {
        const Matrix MMt = M * Mt;
        blk(0, 0) -= tau * ops.cumulative_cross * MMt;
        blk(1, 0) = -tau * ops.geometric * MMt;
      }
      break;
    }
  }
  return T;
}

ConvergenceVerdict predict_convergence(const LinearProblem& problem, MethodSpec method, double tau) {
  const double radius = spectral_radius(iteration_matrix(problem, method, tau));
  return {radius < 1.0 - kRadiusMargin, radius};
}

double distance_to_one(const Matrix& a) {
  const ComplexVector ev = eigenvalues(a);
  double best = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < ev.size(); ++i) best = std::min(best, std::abs(ev(i) - 1.0));
  return best;
}

double resolvent_norm_on_circle(const Matrix& T, double theta) {
  const Index n = T.rows();
  const std::complex<double> w = std::polar(1.0, -theta);
  const ComplexMatrix shifted = ComplexMatrix::Identity(n, n) - w * T.cast<std::complex<double>>();
  Eigen::BDCSVD<ComplexMatrix> svd(shifted);
  const double smin = svd.singularValues()(n - 1);
  return smin > 0.0 ? 1.0 / smin : std::numeric_limits<double>::infinity();
}

double resolvent_constant(const Matrix& T, ResolventOptions options) {
  if (T.rows() != T.cols()) throw std::invalid_argument("resolvent_constant: matrix is not square");
  if (options.samples < 3) throw std::invalid_argument("resolvent_constant: need at least 3 samples");
  if (T.size() == 0) return 1.0;
  const double radius = spectral_radius(T);
  if (!(radius < 1.0)) throw std::domain_error("resolvent_constant: spectral radius is not below 1");

  const int n = options.samples;
  const double step = 2.0 * std::numbers::pi / n;
  std::vector<double> values(static_cast<std::size_t>(n));
  if (options.execution == Execution::Parallel) {
#pragma omp parallel for schedule(static)
    for (int j = 0; j < n; ++j) values[static_cast<std::size_t>(j)] = resolvent_norm_on_circle(T, j * step);
  } else {
    for (int j = 0; j < n; ++j) values[static_cast<std::size_t>(j)] = resolvent_norm_on_circle(T, j * step);
  }

  int best = 0;
  for (int j = 1; j < n; ++j)
    if (values[static_cast<std::size_t>(j)] > values[static_cast<std::size_t>(best)]) best = j;
  double estimate = values[static_cast<std::size_t>(best)];

  // Golden-section refinement on the bracket around the best sample.
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = (best - 1) * step;
  double hi = (best + 1) * step;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = resolvent_norm_on_circle(T, x1);
  double f2 = resolvent_norm_on_circle(T, x2);
  for (int it = 0; it < 60 && hi - lo > 1e-12; ++it) {
    if (f1 > f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = resolvent_norm_on_circle(T, x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = resolvent_norm_on_circle(T, x2);
    }
  }
  estimate = std::max({estimate, f1, f2});
  return std::max(estimate, 1.0);
}

}  // namespace oneshot
