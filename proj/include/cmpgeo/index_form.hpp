#pragma once

// Index form
//   I_B(Z, Z) = <B Z(0), Z(0)> + int_0^l ( |Z'|^2 - <R Z, Z> ) dt
// on the perpendicular part of a field, its Jacobi minimizer with a pinned
// endpoint, and a piecewise-linear discretization of the minimization.

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Sparse>

#include "cmpgeo/curvature.hpp"
#include "cmpgeo/initial_operator.hpp"
#include "cmpgeo/jacobi.hpp"
#include "cmpgeo/types.hpp"

namespace cmpgeo {

/// Continuous piecewise-linear field on a uniform grid of [0, l]. The last node is the
/// pinned endpoint W(l); (a, b) are the coefficients of the tangential part (a t + b) gamma'.
struct PiecewiseField {
  double l = 0.0;
  std::vector<Vector> values;
  double a = 0.0;
  double b = 0.0;

  std::size_t steps() const noexcept { return values.empty() ? 0 : values.size() - 1; }
  double h() const { return l / static_cast<double>(steps()); }
  const Vector& endpoint() const { return values.back(); }
  int dim() const { return static_cast<int>(values.front().size()); }

  Vector at(double t) const {
    const double s = std::clamp(t / h(), 0.0, static_cast<double>(steps()));
    auto i = static_cast<std::size_t>(s);
    if (i >= steps()) i = steps() - 1;
    const double u = s - static_cast<double>(i);
    return (1.0 - u) * values[i] + u * values[i + 1];
  }

  /// Max-norm distance between node values.
  double distance(const PiecewiseField& other) const {
    double worst = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i)
      worst = std::max(worst, (values[i] - other.values[i]).cwiseAbs().maxCoeff());
    return worst;
  }
};

/// Smooth field given by node values and derivatives on a uniform grid of [0, l].
struct SampledField {
  double l = 0.0;
  std::vector<Vector> values;
  std::vector<Vector> derivatives;

  std::size_t steps() const noexcept { return values.empty() ? 0 : values.size() - 1; }
  double h() const { return l / static_cast<double>(steps()); }
};

struct IndexFormReport {
  double total = 0.0;
  double boundary_term = 0.0;  ///< <B Z(0), Z(0)>
  double integral_term = 0.0;
  std::size_t grid_steps = 0;
};

namespace detail {

inline void check_grid(const CurvatureProfile& p, const InitialOperator& B, double l, std::size_t steps,
                       int dim) {
  if (steps < 1) throw std::invalid_argument("index_form: field has no elements");
  if (std::abs(l - p.length()) > 1e-12 * std::max(1.0, p.length()))
    throw std::invalid_argument("index_form: field grid does not match the profile length");
  if (dim != p.dim() || B.dim() != p.dim())
    throw std::invalid_argument("index_form: dimension mismatch between field, operator and profile");
}

inline double node_t(double l, std::size_t steps, std::size_t i) {
  return i == steps ? l : l * static_cast<double>(i) / static_cast<double>(steps);
}

}  // namespace detail

/// Derivative term exact per element; curvature term by Simpson on each element
/// (nodes and midpoint), which is exact for the quadratic-in-t integrand when R is constant.
inline IndexFormReport index_form(const CurvatureProfile& p, const InitialOperator& B, const PiecewiseField& z) {
  const std::size_t N = z.steps();
  detail::check_grid(p, B, z.l, N, z.dim());
  const double h = z.h();

  double integral = 0.0;
  Matrix R_left = p.eval(0.0);
  for (std::size_t i = 0; i < N; ++i) {
    const double t0 = detail::node_t(z.l, N, i);
    const double t1 = detail::node_t(z.l, N, i + 1);
    const Matrix Rm = p.eval(0.5 * (t0 + t1));
    const Matrix R_right = p.eval(t1);
    const Vector& z0 = z.values[i];
    const Vector& z1 = z.values[i + 1];
    const Vector zm = 0.5 * (z0 + z1);
    const double stiffness = (z1 - z0).squaredNorm() / h;
    const double curvature = h / 6.0 * (z0.dot(R_left * z0) + 4.0 * zm.dot(Rm * zm) + z1.dot(R_right * z1));
    integral += stiffness - curvature;
    R_left = R_right;
  }
  const double boundary = B.quadratic(z.values.front());
  return {boundary + integral, boundary, integral, N};
}

/// Composite Simpson over node samples of |Z'|^2 - <R Z, Z>; needs an even number of steps.
inline IndexFormReport index_form(const CurvatureProfile& p, const InitialOperator& B, const SampledField& z) {
  const std::size_t N = z.steps();
  detail::check_grid(p, B, z.l, N, static_cast<int>(z.values.front().size()));
  if (N % 2 != 0) throw std::invalid_argument("index_form: Simpson quadrature needs an even step count");
  if (z.derivatives.size() != z.values.size())
    throw std::invalid_argument("index_form: derivative samples do not match value samples");

  double sum = 0.0;
  for (std::size_t i = 0; i <= N; ++i) {
    const double t = detail::node_t(z.l, N, i);
    const double g = z.derivatives[i].squaredNorm() - z.values[i].dot(p.eval(t) * z.values[i]);
    const double w = (i == 0 || i == N) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    sum += w * g;
  }
  const double integral = sum * z.h() / 3.0;
  const double boundary = B.quadratic(z.values.front());
  return {boundary + integral, boundary, integral, N};
}

/// The unique Jacobi field V with V(l) = w and V'(0) = B V(0): V(t) = A(t) A(l)^{-1} w.
/// Throws FocalPointError when B has a focal point on (0, l].
inline SampledField jacobi_through_endpoint(const CurvatureProfile& p, const InitialOperator& B, const Vector& w,
                                           int steps = kDefaultSteps) {
  if (w.size() != p.dim()) throw std::invalid_argument("jacobi_through_endpoint: endpoint dimension mismatch");
  const FocalSearch focal = first_focal_point(p, B, steps);
  if (focal.t_star)
    throw FocalPointError("jacobi_through_endpoint: focal point at t = " + std::to_string(*focal.t_star),
                          *focal.t_star);

  const JacobiTrajectory traj = integrate_jacobi(p, B, steps);
  const Vector c = Eigen::PartialPivLU<Matrix>(traj.A.back()).solve(w);
  SampledField v{p.length(), {}, {}};
  v.values.reserve(traj.t.size());
  v.derivatives.reserve(traj.t.size());
  for (std::size_t i = 0; i < traj.t.size(); ++i) {
    v.values.push_back(traj.A[i] * c);
    v.derivatives.push_back(traj.Aprime[i] * c);
  }
  v.values.back() = w;
  return v;
}

struct IndexMinimizer {
  PiecewiseField minimizer;
  double value = 0.0;
};

/// Minimizes the discrete index form over piecewise-linear fields with node N pinned to w
/// and nodes 0..N-1 free. A stiffness matrix that is not positive definite is numerical
/// evidence of a focal point and raises FocalPointError.
inline IndexMinimizer minimize_index(const CurvatureProfile& p, const InitialOperator& B, const Vector& w,
                                     int n_nodes) {
  if (n_nodes < 3 || (n_nodes - 1) % 2 != 0)
    throw std::invalid_argument("minimize_index: n_nodes must be odd and >= 3");
  const int d = p.dim();
  if (w.size() != d || B.dim() != d) throw std::invalid_argument("minimize_index: dimension mismatch");

  const auto N = static_cast<std::size_t>(n_nodes - 1);
  const double l = p.length();
  const double h = l / static_cast<double>(N);
  const auto n_free = static_cast<Eigen::Index>(N) * d;

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(N * 4 * static_cast<std::size_t>(d * d) + static_cast<std::size_t>(d * d));
  Vector g = Vector::Zero(n_free);
  double c = 0.0;

  // Adds block m at node pair (a, b); node N is pinned.
  auto add_block = [&](std::size_t a, std::size_t b, const Matrix& m) {
    if (a < N && b < N) {
      for (int r = 0; r < d; ++r)
        for (int s = 0; s < d; ++s)
          if (m(r, s) != 0.0)
            triplets.emplace_back(static_cast<Eigen::Index>(a) * d + r, static_cast<Eigen::Index>(b) * d + s,
                                  m(r, s));
    } else if (a < N) {
      g.segment(static_cast<Eigen::Index>(a) * d, d) += m * w;
    } else if (b == N) {
      c += w.dot(m * w);
    }
  };

  const Matrix I = Matrix::Identity(d, d);
  add_block(0, 0, B.matrix());
  Matrix R_left = p.eval(0.0);
  for (std::size_t i = 0; i < N; ++i) {
    const double t0 = detail::node_t(l, N, i);
    const double t1 = detail::node_t(l, N, i + 1);
    const Matrix Rm = p.eval(0.5 * (t0 + t1));
    const Matrix R_right = p.eval(t1);
    add_block(i, i, I / h - h / 6.0 * (R_left + Rm));
    add_block(i, i + 1, -I / h - h / 6.0 * Rm);
    add_block(i + 1, i, -I / h - h / 6.0 * Rm);
    add_block(i + 1, i + 1, I / h - h / 6.0 * (Rm + R_right));
    R_left = R_right;
  }

  Eigen::SparseMatrix<double> H(n_free, n_free);
  H.setFromTriplets(triplets.begin(), triplets.end());
  Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt(H);
  if (llt.info() != Eigen::Success)
    throw FocalPointError("minimize_index: index form is not positive definite (focal point evidence)",
                          std::numeric_limits<double>::quiet_NaN());
  const Vector x = llt.solve(-g);

  IndexMinimizer out;
  out.minimizer.l = l;
  out.minimizer.values.reserve(N + 1);
  for (std::size_t i = 0; i < N; ++i) out.minimizer.values.push_back(x.segment(static_cast<Eigen::Index>(i) * d, d));
  out.minimizer.values.push_back(w);
  // Direct evaluation is second-order in the solve error, unlike c + g.x.
  out.value = x.dot(H * x) + 2.0 * g.dot(x) + c;
  return out;
}

/// |I_B(V, V) - <V'(l), V(l)>| for the Jacobi field through w.
inline double boundary_identity_residual(const CurvatureProfile& p, const InitialOperator& B, const Vector& w,
                                         int steps = kDefaultSteps) {
  const SampledField v = jacobi_through_endpoint(p, B, w, steps);
  const double lhs = index_form(p, B, v).total;
  const double rhs = v.derivatives.back().dot(v.values.back());
  return std::abs(lhs - rhs);
}

}  // namespace cmpgeo
