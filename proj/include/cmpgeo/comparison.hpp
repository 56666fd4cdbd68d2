#pragma once

// Norm comparison of Jacobi fields under a sectional curvature bound with
// ordered initial operators, determinant comparison under a Ricci lower
// bound against a space form, and the associated monotone ratios.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cmpgeo/curvature.hpp"
#include "cmpgeo/index_form.hpp"
#include "cmpgeo/initial_operator.hpp"
#include "cmpgeo/jacobi.hpp"
#include "cmpgeo/space_form.hpp"
#include "cmpgeo/types.hpp"

namespace cmpgeo {

inline constexpr double kDefaultTol = 1e-7;

/// Data of the norm comparison. V = V_hat + (a t + b) gamma' on M with V_hat(0) = v_hat,
/// V_hat'(0) = B v_hat; likewise on M0 with v_hat0 and B0. The tangential part is shared.
struct RauchInstance {
  CurvatureProfile pM;
  CurvatureProfile pM0;
  InitialOperator B;
  InitialOperator B0;
  Vector v_hat;
  Vector v_hat0;
  double a = 0.0;
  double b = 0.0;
};

enum class ComparisonStatus { holds, violated, hypothesis_failed };

inline const char* to_string(ComparisonStatus s) {
  switch (s) {
    case ComparisonStatus::holds: return "holds";
    case ComparisonStatus::violated: return "violated";
    case ComparisonStatus::hypothesis_failed: return "hypothesis_failed";
  }
  return "unknown";
}

struct RigidityDiagnostics {
  double t0 = 0.0;
  double norm_gap = 0.0;
  /// sup |(V_hat/|V_hat|)'| over both sides; empty when V_hat vanishes on (0, t0].
  std::optional<double> parallelism_residual;
  std::optional<double> curvature_gap;
  std::optional<double> eigen_residual_M;
  std::optional<double> eigen_residual_M0;

  double worst() const {
    double w = norm_gap;
    for (const auto& r : {parallelism_residual, curvature_gap, eigen_residual_M, eigen_residual_M0})
      if (r) w = std::max(w, *r);
    return w;
  }
};

/// Equality signature of the determinant comparison.
struct DeterminantDiagnostics {
  double parallelism_residual = 0.0;  ///< sup over columns J_i of |(J_i/|J_i|)'|
  double sectional_gap = 0.0;         ///< sup |<R e_i, e_i> - k|
  double lambda_gap = 0.0;            ///< lambda_tilde - lambda
};

/// Sampled comparison of two sides. min_margin is the minimum over the grid of
/// (side asserted larger) - (side asserted smaller): lhs - rhs for the norm
/// comparison, rhs - lhs for the determinant comparison.
struct ComparisonReport {
  std::vector<double> grid;
  std::vector<double> lhs;
  std::vector<double> rhs;
  std::vector<double> ratio;
  double min_margin = std::numeric_limits<double>::infinity();
  double worst_t = 0.0;
  double tol = kDefaultTol;
  ComparisonStatus status = ComparisonStatus::holds;
  HypothesisReport hypothesis;
  std::vector<std::string> warnings;

  // Norm comparison only: perpendicular parts and their derivatives.
  std::optional<RauchInstance> instance;
  std::vector<double> hat_lhs, hat_rhs;
  std::vector<Vector> field_M, deriv_M, field_M0, deriv_M0;

  std::optional<RigidityDiagnostics> rigidity;
  std::optional<DeterminantDiagnostics> determinant;
};

namespace detail {

// Max over the grid of |d/dt (v/|v|)| by finite differences; nullopt if some |v| = 0.
inline std::optional<double> direction_derivative_sup(const std::vector<double>& t, const std::vector<Vector>& v,
                                                      std::size_t last) {
  if (last == 0) return 0.0;
  std::vector<Vector> u;
  u.reserve(last + 1);
  for (std::size_t i = 0; i <= last; ++i) {
    const double n = v[i].norm();
    if (!(n > 0.0)) return std::nullopt;
    u.push_back(v[i] / n);
  }
  double worst = 0.0;
  for (std::size_t i = 0; i <= last; ++i) {
    const std::size_t lo = i == 0 ? 0 : i - 1;
    const std::size_t hi = i == last ? last : i + 1;
    worst = std::max(worst, (u[hi] - u[lo]).norm() / (t[hi] - t[lo]));
  }
  return worst;
}

inline void finalize_status(ComparisonReport& r) {
  if (!r.hypothesis.all_passed())
    r.status = ComparisonStatus::hypothesis_failed;
  else
    r.status = r.min_margin >= -r.tol ? ComparisonStatus::holds : ComparisonStatus::violated;
}

inline HypothesisCheck margin_check(std::string name, double margin, double tol, double t = 0.0) {
  HypothesisCheck c{std::move(name)};
  c.worst_margin = margin;
  c.worst_t = t;
  c.passed = margin >= -tol;
  return c;
}

}  // namespace detail

/// Samples |V(t)| and |V0(t)| on the RK4 grid and checks |V| >= |V0| - tol.
/// Throws FocalPointError if B0 has a focal point on M0.
inline ComparisonReport rauch3_verify(const RauchInstance& in, int steps = kDefaultSteps, double tol = kDefaultTol) {
  if (in.v_hat.size() != in.pM.dim() || in.v_hat0.size() != in.pM0.dim())
    throw std::invalid_argument("rauch3_verify: initial vector dimension mismatch");

  ComparisonReport r;
  r.tol = tol;
  r.instance = in;
  r.hypothesis = validate_sectional(in.pM, in.pM0, in.B, in.B0, steps + 1);
  const double n0 = std::hypot(in.v_hat.norm(), in.b);
  const double n00 = std::hypot(in.v_hat0.norm(), in.b);
  r.hypothesis.checks.push_back(detail::margin_check("initial_norm_order", n0 - n00, tol));
  r.hypothesis.checks.push_back(detail::margin_check("initial_norm_positive", n00 > 0.0 ? n00 : -1.0, 0.0));

  const FocalSearch focal = first_focal_point(in.pM0, in.B0, steps);
  if (focal.t_star)
    throw FocalPointError("rauch3_verify: B0 has a focal point at t = " + std::to_string(*focal.t_star),
                          *focal.t_star);
  if (focal.resolution_warning) r.warnings.push_back(focal.note);

  const JacobiTrajectory tM = integrate_jacobi(in.pM, in.B, steps);
  const JacobiTrajectory tM0 = integrate_jacobi(in.pM0, in.B0, steps);

  const std::size_t N = tM.steps();
  r.grid = tM.t;
  for (std::size_t i = 0; i <= N; ++i) {
    r.field_M.push_back(tM.A[i] * in.v_hat);
    r.deriv_M.push_back(tM.Aprime[i] * in.v_hat);
    r.field_M0.push_back(tM0.A[i] * in.v_hat0);
    r.deriv_M0.push_back(tM0.Aprime[i] * in.v_hat0);
    const double tang = in.a * r.grid[i] + in.b;
    const double hM = r.field_M.back().norm();
    const double hM0 = r.field_M0.back().norm();
    r.hat_lhs.push_back(hM);
    r.hat_rhs.push_back(hM0);
    r.lhs.push_back(std::hypot(hM, tang));
    r.rhs.push_back(std::hypot(hM0, tang));
    r.ratio.push_back(r.rhs.back() > 0.0 ? r.lhs.back() / r.rhs.back() : std::numeric_limits<double>::quiet_NaN());
    const double margin = r.lhs.back() - r.rhs.back();
    if (margin < r.min_margin) {
      r.min_margin = margin;
      r.worst_t = r.grid[i];
    }
  }
  detail::finalize_status(r);
  return r;
}

/// Most negative forward-difference slope of |V_hat|^2 / |V0_hat|^2 (zero for a vanishing V0_hat).
inline double monotonicity_check(const ComparisonReport& r) {
  if (r.hat_lhs.empty()) throw std::invalid_argument("monotonicity_check: report has no perpendicular samples");
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < r.grid.size(); ++i) {
    if (!(r.hat_rhs[i] > 0.0) || !(r.hat_rhs[i + 1] > 0.0)) return 0.0;
    const double q0 = (r.hat_lhs[i] * r.hat_lhs[i]) / (r.hat_rhs[i] * r.hat_rhs[i]);
    const double q1 = (r.hat_lhs[i + 1] * r.hat_lhs[i + 1]) / (r.hat_rhs[i + 1] * r.hat_rhs[i + 1]);
    worst = std::min(worst, (q1 - q0) / (r.grid[i + 1] - r.grid[i]));
  }
  return worst;
}

/// Residuals measuring how close the instance is to the equality case on [0, t0].
inline RigidityDiagnostics rigidity_diagnostics(const ComparisonReport& r, double t0) {
  if (!r.instance) throw std::invalid_argument("rigidity_diagnostics: report is not a norm comparison");
  if (!(t0 > 0.0 && t0 <= r.grid.back() * (1.0 + 1e-12)))
    throw std::invalid_argument("rigidity_diagnostics: t0 must lie in (0, l]");
  const RauchInstance& in = *r.instance;

  std::size_t last = 0;
  while (last + 1 < r.grid.size() && r.grid[last + 1] <= t0 * (1.0 + 1e-12)) ++last;

  RigidityDiagnostics d;
  d.t0 = t0;
  for (std::size_t i = 0; i <= last; ++i) d.norm_gap = std::max(d.norm_gap, std::abs(r.lhs[i] - r.rhs[i]));

  const auto pM = detail::direction_derivative_sup(r.grid, r.field_M, last);
  const auto pM0 = detail::direction_derivative_sup(r.grid, r.field_M0, last);
  if (pM && pM0) {
    d.parallelism_residual = std::max(*pM, *pM0);
    double gap = 0.0;
    for (std::size_t i = 0; i <= last; ++i) {
      const Vector u = r.field_M[i].normalized();
      const Vector u0 = r.field_M0[i].normalized();
      gap = std::max(gap, std::abs(u.dot(in.pM.eval(r.grid[i]) * u) - u0.dot(in.pM0.eval(r.grid[i]) * u0)));
    }
    d.curvature_gap = gap;
  }

  const double n = r.field_M[0].norm();
  const double n0 = r.field_M0[0].norm();
  if (n > 0.0 && n0 > 0.0) {
    const double mu = r.deriv_M[0].dot(r.field_M[0]) / (n * n);
    const Vector u = r.field_M[0] / n;
    const Vector u0 = r.field_M0[0] / n0;
    d.eigen_residual_M = (in.B.apply(u) - mu * u).norm();
    d.eigen_residual_M0 = (in.B0.apply(u0) - mu * u0).norm();
  }
  return d;
}

/// The three index values of the domination chain at t1:
/// I_B(W) >= I_B0(W_bar) >= I_B0(W0), where W = V_hat/|V_hat(t1)|, W0 = V0_hat/|V0_hat(t1)|
/// and W_bar(t) = |W(t)| e0 with e0 the parallel unit field equal to W0(t1) at t1.
struct TrickChain {
  double t1 = 0.0;
  double index_W = 0.0;
  double index_trick = 0.0;
  double index_W0 = 0.0;
  double boundary_value_W = 0.0;  ///< <W'(t1), W(t1)>
};

inline TrickChain trick_chain(const RauchInstance& in, double t1, int steps = kDefaultSteps) {
  if (!(t1 > 0.0 && t1 <= in.pM.length())) throw std::invalid_argument("trick_chain: t1 must lie in (0, l]");
  if (!(in.v_hat0.norm() > 0.0)) throw std::invalid_argument("trick_chain: V0_hat(0) must be nonzero");

  const CurvatureProfile pM = in.pM.restricted(t1);
  const CurvatureProfile pM0 = in.pM0.restricted(t1);
  const JacobiTrajectory tM = integrate_jacobi(pM, in.B, steps);
  const JacobiTrajectory tM0 = integrate_jacobi(pM0, in.B0, steps);

  const double sM = (tM.A.back() * in.v_hat).norm();
  const double sM0 = (tM0.A.back() * in.v_hat0).norm();
  if (!(sM > 0.0)) throw std::domain_error("trick_chain: V_hat vanishes at t1");
  const Vector e0 = tM0.A.back() * in.v_hat0 / sM0;

  SampledField W{t1, {}, {}}, Wbar{t1, {}, {}}, W0{t1, {}, {}};
  for (std::size_t i = 0; i < tM.t.size(); ++i) {
    const Vector w = tM.A[i] * in.v_hat / sM;
    const Vector wp = tM.Aprime[i] * in.v_hat / sM;
    const double nw = w.norm();
    W.values.push_back(w);
    W.derivatives.push_back(wp);
    Wbar.values.push_back(nw * e0);
    Wbar.derivatives.push_back((nw > 0.0 ? wp.dot(w) / nw : wp.norm()) * e0);
    W0.values.push_back(tM0.A[i] * in.v_hat0 / sM0);
    W0.derivatives.push_back(tM0.Aprime[i] * in.v_hat0 / sM0);
  }

  TrickChain c;
  c.t1 = t1;
  c.index_W = index_form(pM, in.B, W).total;
  c.index_trick = index_form(pM0, in.B0, Wbar).total;
  c.index_W0 = index_form(pM0, in.B0, W0).total;
  c.boundary_value_W = W.derivatives.back().dot(W.values.back());
  return c;
}

/// Determinant comparison against the space form S^n_k.
/// lhs = init_wedge * det A(t) with A'(0) = lambda I; rhs = init_wedge_tilde * (cs_k + lambda_tilde sn_k)^{n-1}.
inline ComparisonReport thmD_verify(const CurvatureProfile& p, double k, double lambda, double lambda_tilde,
                                    double init_wedge, double init_wedge_tilde, int steps = kDefaultSteps,
                                    double tol = kDefaultTol) {
  const int d = p.dim();
  ComparisonReport r;
  r.tol = tol;
  r.hypothesis = validate_ricci(p, k, steps + 1);
  r.hypothesis.checks.push_back(detail::margin_check("lambda_order", lambda_tilde - lambda, tol));
  r.hypothesis.checks.push_back(detail::margin_check("initial_wedge_order", init_wedge_tilde - init_wedge, tol));
  r.hypothesis.checks.push_back(detail::margin_check("initial_wedge_positive", init_wedge > 0.0 ? init_wedge : -1.0, 0.0));

  const InitialOperator B = InitialOperator::scalar(d, lambda);
  const FocalSearch focal = first_focal_point(p, B, steps);
  if (focal.t_star)
    throw FocalPointError("thmD_verify: lambda has a focal point at t = " + std::to_string(*focal.t_star),
                          *focal.t_star);
  if (focal.resolution_warning) r.warnings.push_back(focal.note);

  const JacobiTrajectory traj = integrate_jacobi(p, B, steps);
  DeterminantDiagnostics diag;
  diag.lambda_gap = lambda_tilde - lambda;

  std::size_t last = traj.steps();
  for (std::size_t i = 0; i <= traj.steps(); ++i) {
    const double t = traj.t[i];
    const double j = closed_form_space_form_jacobi(k, lambda_tilde, t).j;
    if (!(j > 0.0)) {
      r.warnings.push_back("model focal point before t = " + std::to_string(t) + "; comparison truncated");
      last = i == 0 ? 0 : i - 1;
      break;
    }
    const double lhs = init_wedge * detail::determinant(traj.A[i]);
    const double rhs = init_wedge_tilde * std::pow(j, d);
    r.grid.push_back(t);
    r.lhs.push_back(lhs);
    r.rhs.push_back(rhs);
    r.ratio.push_back(lhs / rhs);
    if (rhs - lhs < r.min_margin) {
      r.min_margin = rhs - lhs;
      r.worst_t = t;
    }
    const Matrix R = p.eval(t);
    for (int c = 0; c < d; ++c) diag.sectional_gap = std::max(diag.sectional_gap, std::abs(R(c, c) - k));
  }

  for (int c = 0; c < d; ++c) {
    std::vector<Vector> col;
    col.reserve(last + 1);
    for (std::size_t i = 0; i <= last; ++i) col.push_back(traj.A[i].col(c));
    if (auto res = detail::direction_derivative_sup(traj.t, col, last))
      diag.parallelism_residual = std::max(diag.parallelism_residual, *res);
    else
      diag.parallelism_residual = std::numeric_limits<double>::infinity();
  }
  r.determinant = diag;
  detail::finalize_status(r);
  return r;
}

/// Most positive forward-difference slope of det A(t) / (cs_k + lambda_tilde sn_k)^{n-1}.
inline double ratio_monotonicity(const CurvatureProfile& p, double k, double lambda, double lambda_tilde,
                                 int steps = kDefaultSteps) {
  const ComparisonReport r = thmD_verify(p, k, lambda, lambda_tilde, 1.0, 1.0, steps);
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < r.grid.size(); ++i)
    worst = std::max(worst, (r.ratio[i + 1] - r.ratio[i]) / (r.grid[i + 1] - r.grid[i]));
  return worst;
}

}  // namespace cmpgeo
