#pragma once

#include <optional>
#include <stdexcept>
#include <utility>

#include "cmpgeo/types.hpp"

namespace cmpgeo {

/// Symmetric linear map B on the perpendicular space at t = 0.
/// Eigenvalues are computed once on construction and kept sorted ascending.
class InitialOperator {
 public:
  explicit InitialOperator(Matrix m) {
    if (m.rows() != m.cols() || m.rows() < 1)
      throw std::invalid_argument("InitialOperator: matrix must be square and non-empty");
    if (!m.allFinite()) throw std::invalid_argument("InitialOperator: non-finite entry");
    if (detail::max_abs_asymmetry(m) > 1e-12)
      throw std::invalid_argument("InitialOperator: matrix is not symmetric");
    matrix_ = detail::symmetrize(m);
    Eigen::SelfAdjointEigenSolver<Matrix> es(matrix_, Eigen::EigenvaluesOnly);
    eigenvalues_ = es.eigenvalues();
    if ((matrix_ - eigenvalues_(0) * Matrix::Identity(dim(), dim())).cwiseAbs().maxCoeff() == 0.0)
      scalar_ = eigenvalues_(0);
  }

  static InitialOperator scalar(int dim, double lambda) {
    return InitialOperator(lambda * Matrix::Identity(dim, dim));
  }

  static InitialOperator zero(int dim) { return scalar(dim, 0.0); }

  static InitialOperator diagonal(const Vector& d) { return InitialOperator(Matrix(d.asDiagonal())); }

  int dim() const noexcept { return static_cast<int>(matrix_.rows()); }
  const Matrix& matrix() const noexcept { return matrix_; }
  const Vector& eigenvalues() const noexcept { return eigenvalues_; }
  double min_eigenvalue() const noexcept { return eigenvalues_(0); }
  double max_eigenvalue() const noexcept { return eigenvalues_(eigenvalues_.size() - 1); }

  /// Set when B = lambda * id.
  std::optional<double> scalar_value() const noexcept { return scalar_; }

  Vector apply(const Vector& x) const { return matrix_ * x; }

  /// <Bx, x>
  double quadratic(const Vector& x) const { return x.dot(matrix_ * x); }

 private:
  Matrix matrix_;
  Vector eigenvalues_;
  std::optional<double> scalar_;
};

}  // namespace cmpgeo
