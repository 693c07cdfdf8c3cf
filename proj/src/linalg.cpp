#include "oneshot/linalg.hpp"

#include <stdexcept>

namespace oneshot {

double operator_norm(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(a);
  return svd.singularValues()(0);
}

double min_singular_value(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  if (a.cols() > a.rows()) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(a);
  return svd.singularValues()(svd.singularValues().size() - 1);
}

ComplexVector eigenvalues(const Matrix& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("eigenvalues: matrix is not square");
  if (a.size() == 0) return {};
  Eigen::EigenSolver<Matrix> es(a, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success) throw std::runtime_error("eigenvalues: QR iteration failed");
  return es.eigenvalues();
}

ComplexVector eigenvalues(const ComplexMatrix& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("eigenvalues: matrix is not square");
  if (a.size() == 0) return {};
  Eigen::ComplexEigenSolver<ComplexMatrix> es(a, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success) throw std::runtime_error("eigenvalues: QR iteration failed");
  return es.eigenvalues();
}

double spectral_radius(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  return eigenvalues(a).cwiseAbs().maxCoeff();
}

double spectral_radius(const ComplexMatrix& a) {
  if (a.size() == 0) return 0.0;
  return eigenvalues(a).cwiseAbs().maxCoeff();
}

Matrix matrix_power(const Matrix& a, int exponent) {
  if (a.rows() != a.cols()) throw std::invalid_argument("matrix_power: matrix is not square");
  if (exponent < 0) throw std::invalid_argument("matrix_power: negative exponent");
  Matrix result = Matrix::Identity(a.rows(), a.cols());
  Matrix base = a;
  while (exponent > 0) {
    if (exponent & 1) result = result * base;
    exponent >>= 1;
    if (exponent > 0) base = base * base;
  }
  return result;
}

}  // namespace oneshot
