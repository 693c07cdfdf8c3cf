#pragma once

#include <Eigen/Dense>

namespace oneshot {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using Index = Eigen::Index;

/// Largest singular value. Zero for empty matrices.
double operator_norm(const Matrix& a);

/// Smallest singular value of a tall or square matrix. A wide matrix
/// has a nontrivial kernel, so its value is reported as 0.
double min_singular_value(const Matrix& a);

ComplexVector eigenvalues(const Matrix& a);
ComplexVector eigenvalues(const ComplexMatrix& a);

double spectral_radius(const Matrix& a);
double spectral_radius(const ComplexMatrix& a);

/// Integer power by repeated squaring.
Matrix matrix_power(const Matrix& a, int exponent);

}  // namespace oneshot
