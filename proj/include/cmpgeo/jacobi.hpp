#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cmpgeo/curvature.hpp"
#include "cmpgeo/initial_operator.hpp"
#include "cmpgeo/space_form.hpp"
#include "cmpgeo/types.hpp"

namespace cmpgeo {

inline constexpr int kDefaultSteps = 4096;

/// Sampled solution of A'' + R(t) A = 0, A(0) = I, A'(0) = B on a uniform grid.
/// Column i of A is the Jacobi field starting at e_i with initial derivative B e_i.
struct JacobiTrajectory {
  CurvatureProfile profile;
  InitialOperator B;
  double h = 0.0;
  std::vector<double> t;
  std::vector<Matrix> A;
  std::vector<Matrix> Aprime;

  std::size_t steps() const noexcept { return t.empty() ? 0 : t.size() - 1; }

  /// max_i || A'^T A - A^T A' ||_inf, a constant of motion (zero) for symmetric R and B.
  double wronskian_residual() const {
    double worst = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
      const Matrix w = Aprime[i].transpose() * A[i] - A[i].transpose() * Aprime[i];
      worst = std::max(worst, w.cwiseAbs().maxCoeff());
    }
    return worst;
  }
};

namespace detail {

struct JacobiState {
  Matrix A;
  Matrix Ap;
};

inline void rk4_step(const CurvatureProfile& p, double t, double h, JacobiState& s) {
  const Matrix R0 = p.eval(t);
  const Matrix Rm = p.eval(t + 0.5 * h);
  const Matrix R1 = p.eval(t + h);

  const Matrix k1a = s.Ap;
  const Matrix k1v = -R0 * s.A;
  const Matrix k2a = s.Ap + 0.5 * h * k1v;
  const Matrix k2v = -Rm * (s.A + 0.5 * h * k1a);
  const Matrix k3a = s.Ap + 0.5 * h * k2v;
  const Matrix k3v = -Rm * (s.A + 0.5 * h * k2a);
  const Matrix k4a = s.Ap + h * k3v;
  const Matrix k4v = -R1 * (s.A + h * k3a);

  s.A += h / 6.0 * (k1a + 2.0 * k2a + 2.0 * k3a + k4a);
  s.Ap += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
}

inline void check_finite(const JacobiState& s, double t) {
  if (!s.A.allFinite() || !s.Ap.allFinite())
    throw DivergenceError("Jacobi integration produced non-finite values at t = " + std::to_string(t), t);
}

/// State at time t_end from a fresh integration using n uniform steps.
inline JacobiState integrate_to(const CurvatureProfile& p, const InitialOperator& B, double t_end, int n) {
  const int d = p.dim();
  JacobiState s{Matrix::Identity(d, d), B.matrix()};
  if (t_end <= 0.0) return s;
  const double h = t_end / n;
  for (int i = 0; i < n; ++i) {
    rk4_step(p, h * i, (i + 1 == n) ? t_end - h * i : h, s);
    check_finite(s, h * (i + 1));
  }
  return s;
}

/// Re-integrates from 0 with a step close to h_base.
inline JacobiState state_at(const CurvatureProfile& p, const InitialOperator& B, double t, double h_base) {
  const int n = std::max(1, static_cast<int>(std::ceil(t / h_base - 1e-9)));
  return integrate_to(p, B, t, n);
}

inline double smallest_singular_value(const Matrix& a) {
  Eigen::JacobiSVD<Matrix> svd(a);
  return svd.singularValues().minCoeff();
}

inline double determinant(const Matrix& a) { return Eigen::PartialPivLU<Matrix>(a).determinant(); }

}  // namespace detail

/// Classical fixed-step RK4 for (A, A')' = (A', -R(t) A), A(0) = I, A'(0) = B.
inline JacobiTrajectory integrate_jacobi(const CurvatureProfile& p, const InitialOperator& B,
                                         int steps = kDefaultSteps) {
  if (steps < 2 || steps % 2 != 0)
    throw std::invalid_argument("integrate_jacobi: steps must be even and >= 2");
  if (B.dim() != p.dim())
    throw std::invalid_argument("integrate_jacobi: operator dimension must be n - 1");

  const int d = p.dim();
  const double l = p.length();
  JacobiTrajectory traj{p, B, l / steps, {}, {}, {}};
  traj.t.reserve(steps + 1);
  traj.A.reserve(steps + 1);
  traj.Aprime.reserve(steps + 1);

  detail::JacobiState s{Matrix::Identity(d, d), B.matrix()};
  traj.t.push_back(0.0);
  traj.A.push_back(s.A);
  traj.Aprime.push_back(s.Ap);
  for (int i = 0; i < steps; ++i) {
    const double t0 = traj.h * i;
    const double t1 = (i + 1 == steps) ? l : traj.h * (i + 1);
    detail::rk4_step(p, t0, t1 - t0, s);
    detail::check_finite(s, t1);
    traj.t.push_back(t1);
    traj.A.push_back(s.A);
    traj.Aprime.push_back(s.Ap);
  }
  return traj;
}

/// Outcome of a focal point search on (0, l].
struct FocalSearch {
  std::optional<double> t_star;
  /// A near-zero determinant was seen that the grid could not bracket.
  bool resolution_warning = false;
  std::string note;
};

/// Smallest t* in (0, l] with det A(t*) = 0.
///
/// Grid scan of det A(t_i) for sign changes (refined by bisection) together with
/// local minima of the smallest singular value of A (refined by golden section),
/// which catches even-multiplicity zeros such as A = cos(t) I_2 where det does not
/// change sign. Each refinement point is re-integrated from t = 0; brackets are
/// shrunk to 1e-10.
inline FocalSearch first_focal_point(const CurvatureProfile& p, const InitialOperator& B,
                                     int steps = kDefaultSteps) {
  constexpr double kBracket = 1e-10;
  constexpr double kNearZeroDet = 1e-12;

  const JacobiTrajectory traj = integrate_jacobi(p, B, steps);
  const double h = traj.h;
  const std::size_t N = traj.steps();

  std::vector<double> det(N + 1), sigma(N + 1), slope(N + 1);
  for (std::size_t i = 0; i <= N; ++i) {
    det[i] = detail::determinant(traj.A[i]);
    sigma[i] = detail::smallest_singular_value(traj.A[i]);
    slope[i] = traj.Aprime[i].norm();
  }

  auto sigma_at = [&](double t) { return detail::smallest_singular_value(detail::state_at(p, B, t, h).A); };
  auto det_at = [&](double t) { return detail::determinant(detail::state_at(p, B, t, h).A); };

  // Golden-section search for the minimum of sigma on [a, b]; returns the root if it reaches ~0.
  auto refine_minimum = [&](double a, double b) -> std::optional<double> {
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - g * (b - a), d = a + g * (b - a);
    double fc = sigma_at(c), fd = sigma_at(d);
    while (b - a > kBracket) {
      if (fc <= fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - g * (b - a);
        fc = sigma_at(c);
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + g * (b - a);
        fd = sigma_at(d);
      }
    }
    const double tm = 0.5 * (a + b);
    const detail::JacobiState s = detail::state_at(p, B, tm, h);
    const double smin = detail::smallest_singular_value(s.A);
    if (smin <= 1e-8 * (1.0 + s.Ap.norm())) return tm;
    return std::nullopt;
  };

  auto bisect_sign = [&](double a, double b, double det_a) {
    while (b - a > kBracket) {
      const double m = 0.5 * (a + b);
      const double dm = det_at(m);
      if (dm == 0.0) return m;
      if ((dm > 0.0) == (det_a > 0.0)) {
        a = m;
        det_a = dm;
      } else {
        b = m;
      }
    }
    return 0.5 * (a + b);
  };

  auto is_candidate_min = [&](std::size_t j) {
    const bool left = j == 0 || sigma[j] <= sigma[j - 1];
    const bool right = j == N || sigma[j] <= sigma[j + 1];
    return j > 0 && left && right && sigma[j] <= 2.0 * h * (1.0 + slope[j]);
  };

  FocalSearch out;
  for (std::size_t i = 1; i <= N; ++i) {
    if (i >= 2 && is_candidate_min(i - 1)) {
      if (auto root = refine_minimum(traj.t[i - 2], traj.t[i])) {
        out.t_star = *root;
        return out;
      }
    }
    if (det[i] == 0.0 || (det[i] > 0.0) != (det[i - 1] > 0.0)) {
      out.t_star = det[i] == 0.0 ? traj.t[i] : bisect_sign(traj.t[i - 1], traj.t[i], det[i - 1]);
      return out;
    }
    if (std::abs(det[i]) < kNearZeroDet) {
      out.resolution_warning = true;
      out.note = "near-zero determinant at t = " + std::to_string(traj.t[i]) + " without a sign change";
    }
  }
  if (is_candidate_min(N)) {
    if (auto root = refine_minimum(traj.t[N - 1], traj.t[N])) {
      out.t_star = *root;
      out.resolution_warning = false;
      out.note.clear();
    }
  }
  return out;
}

/// trace(A'(t) A(t)^{-1}) = (det A)'/det A at grid index t_index.
inline double logdet_derivative(const JacobiTrajectory& traj, std::size_t t_index) {
  if (t_index >= traj.t.size()) throw std::out_of_range("logdet_derivative: index out of range");
  const Eigen::PartialPivLU<Matrix> lu(traj.A[t_index]);
  if (!(lu.rcond() > 1e-14))
    throw FocalPointError("logdet_derivative: A(t) is singular (focal point)", traj.t[t_index]);
  return lu.solve(traj.Aprime[t_index]).trace();
}

}  // namespace cmpgeo
