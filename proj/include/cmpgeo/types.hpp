#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace cmpgeo {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Raised when an operation needs a focal-point-free geodesic and one is found.
class FocalPointError : public std::runtime_error {
 public:
  FocalPointError(const std::string& what, double t_star)
      : std::runtime_error(what), t_star_(t_star) {}

  /// Parameter of the offending focal point (NaN when only numerical evidence exists).
  double t_star() const noexcept { return t_star_; }

 private:
  double t_star_;
};

/// Non-finite state during ODE integration.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& what, double t_bad)
      : std::runtime_error(what), t_bad_(t_bad) {}

  double t_bad() const noexcept { return t_bad_; }

 private:
  double t_bad_;
};

namespace detail {

inline double max_abs_asymmetry(const Matrix& m) {
  return (m - m.transpose()).cwiseAbs().maxCoeff();
}

inline Matrix symmetrize(const Matrix& m) { return 0.5 * (m + m.transpose()); }

}  // namespace detail
}  // namespace cmpgeo
