#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>

namespace cmpgeo {

/// Generalized sine/cosine of the constant-curvature Jacobi equation y'' + k y = 0.
struct SpaceFormPair {
  double sn;  ///< solution with y(0)=0, y'(0)=1
  double cs;  ///< solution with y(0)=1, y'(0)=0; equals d(sn)/dt
};

/// Below this |k| the Taylor branch is used.
inline constexpr double kFlatThreshold = 1e-12;

inline SpaceFormPair space_form_functions(double k, double t) {
  if (!std::isfinite(k) || !std::isfinite(t)) throw std::invalid_argument("space_form_functions: k and t must be finite");
  if (t < 0.0) throw std::domain_error("space_form_functions: t must be >= 0");
  if (std::abs(k) < kFlatThreshold) {
    const double t2 = t * t;
    const double kt2 = k * t2;
    const double sn = t * (1.0 - kt2 / 6.0 + kt2 * kt2 / 120.0 - kt2 * kt2 * kt2 / 5040.0);
    const double cs = 1.0 - kt2 / 2.0 + kt2 * kt2 / 24.0 - kt2 * kt2 * kt2 / 720.0;
    return {sn, cs};
  }
  if (k > 0.0) {
    const double s = std::sqrt(k);
    return {std::sin(s * t) / s, std::cos(s * t)};
  }
  const double s = std::sqrt(-k);
  return {std::sinh(s * t) / s, std::cosh(s * t)};
}

/// Scalar Jacobi solution j = cs_k + lambda sn_k, i.e. j(0)=1, j'(0)=lambda.
struct ScalarJacobi {
  double j;
  double jprime;
};

inline ScalarJacobi closed_form_space_form_jacobi(double k, double lambda, double t) {
  if (t < 0.0) throw std::domain_error("closed_form_space_form_jacobi: t must be >= 0");
  const auto [sn, cs] = space_form_functions(k, t);
  return {cs + lambda * sn, -k * sn + lambda * cs};
}

/// First positive zero of cs_k + lambda sn_k, if any.
inline std::optional<double> space_form_focal_time(double k, double lambda) {
  if (std::abs(k) < kFlatThreshold) {
    if (lambda < 0.0) return -1.0 / lambda;
    return std::nullopt;
  }
  if (k > 0.0) {
    const double s = std::sqrt(k);
    return (std::numbers::pi / 2.0 + std::atan(lambda / s)) / s;
  }
  const double s = std::sqrt(-k);
  if (lambda < -s) return std::atanh(-s / lambda) / s;
  return std::nullopt;
}

/// Area of the unit m-sphere in R^{m+1}: omega_0 = 2, omega_1 = 2 pi, omega_m = 2 pi/(m-1) omega_{m-2}.
inline double unit_sphere_area(int m) {
  if (m < 0) throw std::invalid_argument("unit_sphere_area: negative dimension");
  double w = (m % 2 == 0) ? 2.0 : 2.0 * std::numbers::pi;
  for (int j = (m % 2 == 0) ? 2 : 3; j <= m; j += 2) w *= 2.0 * std::numbers::pi / (j - 1);
  return w;
}

}  // namespace cmpgeo
