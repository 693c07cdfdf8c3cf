#include "oneshot/linear_model.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

namespace oneshot {

namespace {

template <typename Mat, typename Vec>
void check_dimensions(const Mat& B, const Mat& M, const Mat& H, const Vec& F) {
  std::ostringstream msg;
  if (B.rows() == 0 || B.rows() != B.cols()) {
    msg << "B must be square and non-empty, got " << B.rows() << "x" << B.cols();
  } else if (M.rows() != B.rows() || M.cols() == 0) {
    msg << "M must have " << B.rows() << " rows and at least one column, got " << M.rows()
        << "x" << M.cols();
  } else if (H.cols() != B.rows() || H.rows() == 0) {
    msg << "H must have " << B.rows() << " columns and at least one row, got " << H.rows()
        << "x" << H.cols();
  } else if (F.size() != B.rows()) {
    msg << "F must have length " << B.rows() << ", got " << F.size();
  } else {
    return;
  }
  throw std::invalid_argument(msg.str());
}

AssumptionReport assess(double radius, const Eigen::FullPivLU<Matrix>& lu,
                        const std::function<Matrix()>& reduced, ValidationTolerances tol) {
  AssumptionReport report;
  report.spectral_radius = radius;
  bool ok = true;
  if (!(radius < 1.0 - tol.radius_margin)) {
    std::ostringstream msg;
    msg << "spectral radius of B is " << radius << ", needs to be below 1";
    report.diagnostics.push_back(msg.str());
    ok = false;
  }
  if (!lu.isInvertible()) {
    report.diagnostics.push_back("I - B is singular");
    report.valid = false;
    return report;
  }
  const Matrix r = reduced();
  report.max_singular_value = operator_norm(r);
  report.min_singular_value = min_singular_value(r);
  if (r.cols() > r.rows()) {
    report.diagnostics.push_back("more parameters than independent measurements, reduced operator cannot be injective");
    ok = false;
  } else if (!(report.min_singular_value > tol.injectivity)) {
    std::ostringstream msg;
    msg << "reduced operator H (I - B)^-1 M is not injective (smallest singular value "
        << report.min_singular_value << ")";
    report.diagnostics.push_back(msg.str());
    ok = false;
  }
  report.valid = ok;
  return report;
}

}  // namespace

LinearProblem::LinearProblem(Matrix B, Matrix M, Matrix H, Vector F)
    : B_(std::move(B)), M_(std::move(M)), H_(std::move(H)), F_(std::move(F)) {
  check_dimensions(B_, M_, H_, F_);
  if (!B_.allFinite() || !M_.allFinite() || !H_.allFinite() || !F_.allFinite())
    throw std::invalid_argument("problem operators contain non-finite entries");
}

ComplexLinearProblem::ComplexLinearProblem(ComplexMatrix B, ComplexMatrix M, ComplexMatrix H,
                                           ComplexVector F)
    : B_(std::move(B)), M_(std::move(M)), H_(std::move(H)), F_(std::move(F)) {
  check_dimensions(B_, M_, H_, F_);
  if (!B_.allFinite() || !M_.allFinite() || !H_.allFinite() || !F_.allFinite())
    throw std::invalid_argument("problem operators contain non-finite entries");
}

AssumptionReport validate(const LinearProblem& problem, ValidationTolerances tol) {
  const Index n = problem.state_dim();
  Eigen::FullPivLU<Matrix> lu(Matrix::Identity(n, n) - problem.B());
  return assess(spectral_radius(problem.B()), lu,
                [&] { return Matrix(problem.H() * lu.solve(problem.M())); }, tol);
}

AssumptionReport validate(const ComplexLinearProblem& problem, ValidationTolerances tol) {
  // Injectivity is over real parameters, so test the stacked real and
  // imaginary parts of the complex reduced operator.
  const LinearProblem real = realify(problem);
  const Index n = real.state_dim();
  Eigen::FullPivLU<Matrix> lu(Matrix::Identity(n, n) - real.B());
  return assess(spectral_radius(problem.B()), lu,
                [&] { return Matrix(real.H() * lu.solve(real.M())); }, tol);
}

DirectSolver::DirectSolver(const LinearProblem& problem)
    : M_(problem.M()),
      H_(problem.H()),
      F_(problem.F()),
      lu_(Matrix::Identity(problem.state_dim(), problem.state_dim()) - problem.B()) {
  if (!lu_.isInvertible()) throw std::runtime_error("I - B is singular");
}

Vector DirectSolver::state(const Vector& sigma) const {
  if (sigma.size() != M_.cols()) throw std::invalid_argument("parameter has wrong length");
  return lu_.solve(M_ * sigma + F_);
}

Vector DirectSolver::adjoint(const Vector& state, const Vector& data) const {
  if (state.size() != H_.cols()) throw std::invalid_argument("state has wrong length");
  if (data.size() != H_.rows()) throw std::invalid_argument("data has wrong length");
  return lu_.transpose().solve(H_.transpose() * (H_ * state - data));
}

Matrix DirectSolver::solve(const Matrix& rhs) const { return lu_.solve(rhs); }

Vector exact_state(const LinearProblem& problem, const Vector& sigma) {
  return DirectSolver(problem).state(sigma);
}

Vector exact_adjoint(const LinearProblem& problem, const Vector& sigma, const Vector& data) {
  const DirectSolver solver(problem);
  return solver.adjoint(solver.state(sigma), data);
}

double misfit(const LinearProblem& problem, const Vector& state, const Vector& data) {
  return 0.5 * (problem.H() * state - data).squaredNorm();
}

Matrix reduced_operator(const LinearProblem& problem) {
  return problem.H() * DirectSolver(problem).solve(problem.M());
}

LinearProblem realify(const ComplexLinearProblem& problem) {
  const auto block = [](const ComplexMatrix& a) {
    Matrix out(2 * a.rows(), 2 * a.cols());
    out << a.real(), -a.imag(), a.imag(), a.real();
    return out;
  };
  const auto stack = [](const ComplexMatrix& a) {
    Matrix out(2 * a.rows(), a.cols());
    out << a.real(), a.imag();
    return out;
  };
  return LinearProblem(block(problem.B()), stack(problem.M()), block(problem.H()),
                       realify(problem.F()));
}

Vector realify(const ComplexVector& v) {
  Vector out(2 * v.size());
  out << v.real(), v.imag();
  return out;
}

LinearProblem random_contraction(Index state_dim, Index param_dim, Index measurement_dim,
                                 double target_norm, std::uint64_t seed) {
  if (!(target_norm >= 0.0 && target_norm < 1.0))
    throw std::invalid_argument("target_norm must lie in [0, 1)");
  if (state_dim < 1 || param_dim < 1 || measurement_dim < 1)
    throw std::invalid_argument("dimensions must be positive");
  if (param_dim > measurement_dim)
    throw std::invalid_argument("reduced operator cannot be injective with more parameters than measurements");

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const auto draw = [&](Index rows, Index cols) {
    Matrix a(rows, cols);
    for (Index j = 0; j < cols; ++j)
      for (Index i = 0; i < rows; ++i) a(i, j) = normal(rng);
    return a;
  };

  constexpr int kMaxAttempts = 100;
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    Matrix B = draw(state_dim, state_dim);
    Matrix M = draw(state_dim, param_dim);
    Matrix H = draw(measurement_dim, state_dim);
    Vector F = draw(state_dim, 1);
    if (target_norm == 0.0) {
      B.setZero();
    } else {
      B *= target_norm / operator_norm(B);
    }
    LinearProblem problem(std::move(B), std::move(M), std::move(H), std::move(F));
    if (validate(problem).valid) return problem;
  }
  throw std::runtime_error("random_contraction: no injective draw found");
}

LinearProblem helmholtz_toy(const HelmholtzOptions& options) {
  const int n = options.grid;
  if (n < 4) throw std::invalid_argument("helmholtz_toy: grid must be at least 4");
  if (!(options.contrast >= 0.0)) throw std::invalid_argument("helmholtz_toy: contrast must be >= 0");

  const double h = 1.0 / n;
  const int side = n - 1;  // interior nodes per side
  const Index dofs = static_cast<Index>(side) * side;
  const auto node = [side](int i, int j) { return static_cast<Index>(j - 1) * side + (i - 1); };
  const auto interior = [n](int i, int j) { return i > 0 && i < n && j > 0 && j < n; };

  // Cell fields are indexed (a, b) for the cell [a h, (a+1) h] x [b h, (b+1) h].
  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> uniform(1.0, 2.0);
  Matrix background(n, n);
  for (int b = 0; b < n; ++b)
    for (int a = 0; a < n; ++a) background(a, b) = uniform(rng);

  const auto cell_or_zero = [n](const Matrix& field, int a, int b) {
    return (a >= 0 && a < n && b >= 0 && b < n) ? field(a, b) : 0.0;
  };
  // Coefficient on the edge between node (i, j) and its neighbour in
  // direction (di, dj): the mean of the two cells sharing that edge.
  const auto edge = [&](const Matrix& field, int i, int j, int di, int dj) {
    if (di != 0) {
      const int a = di > 0 ? i : i - 1;
      return 0.5 * (cell_or_zero(field, a, j - 1) + cell_or_zero(field, a, j));
    }
    const int b = dj > 0 ? j : j - 1;
    return 0.5 * (cell_or_zero(field, i - 1, b) + cell_or_zero(field, i, b));
  };

  constexpr int kDirs[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
  const double inv_h2 = 1.0 / (h * h);
  const auto stiffness = [&](const Matrix& field) {
    Matrix K = Matrix::Zero(dofs, dofs);
    for (int j = 1; j < n; ++j) {
      for (int i = 1; i < n; ++i) {
        for (const auto& d : kDirs) {
          const double c = edge(field, i, j, d[0], d[1]) * inv_h2;
          K(node(i, j), node(i, j)) += c;
          if (interior(i + d[0], j + d[1])) K(node(i, j), node(i + d[0], j + d[1])) -= c;
        }
      }
    }
    return K;
  };

  const Matrix ones = Matrix::Ones(n, n);
  const double k2 = options.wavenumber * options.wavenumber;
  const Matrix reference = stiffness(ones) - k2 * Matrix::Identity(dofs, dofs);
  Eigen::FullPivLU<Matrix> lu(reference);
  if (!lu.isInvertible()) throw std::runtime_error("helmholtz_toy: resonant wavenumber");

  Matrix B = Matrix::Zero(dofs, dofs);
  if (options.contrast > 0.0) B = -options.contrast * lu.solve(stiffness(background));

  // Incident plane wave, known on every node including the boundary.
  const double angle = std::numbers::pi / 6.0;
  const auto incident = [&](int i, int j) {
    return std::cos(options.wavenumber * (i * h * std::cos(angle) + j * h * std::sin(angle)));
  };

  constexpr int kPatches = 2;
  Matrix source(dofs, kPatches * kPatches);
  for (int qy = 0; qy < kPatches; ++qy) {
    for (int qx = 0; qx < kPatches; ++qx) {
      Matrix patch = Matrix::Zero(n, n);
      for (int b = 0; b < n; ++b) {
        for (int a = 0; a < n; ++a) {
          const double x = (a + 0.5) * h;
          const double y = (b + 0.5) * h;
          const double x0 = 0.15 + 0.4 * qx;
          const double y0 = 0.15 + 0.4 * qy;
          if (x >= x0 && x <= x0 + 0.3 && y >= y0 && y <= y0 + 0.3) patch(a, b) = 1.0;
        }
      }
      const Index col = qy * kPatches + qx;
      for (int j = 1; j < n; ++j) {
        for (int i = 1; i < n; ++i) {
          double acc = 0.0;
          for (const auto& d : kDirs)
            acc += edge(patch, i, j, d[0], d[1]) * (incident(i, j) - incident(i + d[0], j + d[1]));
          source(node(i, j), col) = acc * inv_h2;
        }
      }
    }
  }
  Matrix M = lu.solve(source);

  // Outward flux of the total coefficient through each boundary edge,
  // weighted by sqrt(h) so the Euclidean norm approximates the L2 boundary norm.
  const Matrix total = ones + options.contrast * background;
  Matrix H = Matrix::Zero(4 * side, dofs);
  const double weight = std::sqrt(h) / h;
  Index row = 0;
  for (int i = 1; i < n; ++i) H(row++, node(i, 1)) = -edge(total, i, 1, 0, -1) * weight;
  for (int i = 1; i < n; ++i) H(row++, node(i, n - 1)) = -edge(total, i, n - 1, 0, 1) * weight;
  for (int j = 1; j < n; ++j) H(row++, node(1, j)) = -edge(total, 1, j, -1, 0) * weight;
  for (int j = 1; j < n; ++j) H(row++, node(n - 1, j)) = -edge(total, n - 1, j, 1, 0) * weight;

  return LinearProblem(std::move(B), std::move(M), std::move(H), Vector::Zero(dofs));
}

}  // namespace oneshot
