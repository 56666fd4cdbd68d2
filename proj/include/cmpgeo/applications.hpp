#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cmpgeo/comparison.hpp"
#include "cmpgeo/curvature.hpp"
#include "cmpgeo/space_form.hpp"

namespace cmpgeo {

// ---------------------------------------------------------------------------
// Quadrilateral on the plane versus the unit sphere
// ---------------------------------------------------------------------------

/// Base [pq] with legs [pr], [qs] on the same side of it.
struct QuadInstance {
  double pq = 1.0;
  double pr = 0.0;
  double qs = 0.0;
  double angle_rpq = std::numbers::pi / 2;
  double angle_pqs = std::numbers::pi / 2;
};

struct QuadResult {
  double rs_flat = 0.0;
  double rs_sphere = 0.0;
  double margin = 0.0;  ///< rs_flat - rs_sphere
};

inline QuadResult quad_compare(const QuadInstance& q) {
  if (q.pq < 0.0 || q.pr < 0.0 || q.qs < 0.0) throw std::invalid_argument("quad_compare: lengths must be >= 0");
  if (!(q.angle_rpq > 0.0 && q.angle_rpq < std::numbers::pi) || !(q.angle_pqs > 0.0 && q.angle_pqs < std::numbers::pi))
    throw std::invalid_argument("quad_compare: angles must lie in (0, pi)");
  if (!(q.pq < std::numbers::pi) || !(q.pr < std::numbers::pi) || !(q.qs < std::numbers::pi))
    throw std::domain_error("quad_compare: spherical arcs must be shorter than pi");

  // Plane: p at the origin, q on the positive x axis, legs in the upper half plane.
  const double rx = q.pr * std::cos(q.angle_rpq), ry = q.pr * std::sin(q.angle_rpq);
  const double sx = q.pq - q.qs * std::cos(q.angle_pqs), sy = q.qs * std::sin(q.angle_pqs);
  const double rs_flat = std::hypot(sx - rx, sy - ry);

  // Unit sphere: [pq] along the equator, legs leave towards the +z hemisphere.
  using V3 = Eigen::Vector3d;
  const V3 p(1.0, 0.0, 0.0);
  const V3 qv(std::cos(q.pq), std::sin(q.pq), 0.0);
  const V3 up(0.0, 0.0, 1.0);
  const V3 tp(0.0, 1.0, 0.0);                                // at p, towards q
  const V3 tq(std::sin(q.pq), -std::cos(q.pq), 0.0);         // at q, towards p
  const V3 dir_r = std::cos(q.angle_rpq) * tp + std::sin(q.angle_rpq) * up;
  const V3 dir_s = std::cos(q.angle_pqs) * tq + std::sin(q.angle_pqs) * up;
  const V3 r = std::cos(q.pr) * p + std::sin(q.pr) * dir_r;
  const V3 s = std::cos(q.qs) * qv + std::sin(q.qs) * dir_s;
  if ((r + s).norm() < 1e-12) throw std::domain_error("quad_compare: r and s are antipodal");
  const double rs_sphere = std::atan2(r.cross(s).norm(), r.dot(s));

  return {rs_flat, rs_sphere, rs_flat - rs_sphere};
}

struct QuadSweep {
  std::vector<double> legs;
  std::vector<QuadResult> results;
  /// First swept leg length with a negative margin (below -1e-12), if any.
  std::optional<double> threshold;
};

/// Sweeps pr = qs over [0, leg_max] to locate where |rs| >= |r0 s0| stops holding.
inline QuadSweep quad_threshold_sweep(double pq, double angle_rpq, double angle_pqs, double leg_max, int samples) {
  if (samples < 2) throw std::invalid_argument("quad_threshold_sweep: need at least 2 samples");
  QuadSweep out;
  for (int i = 0; i < samples; ++i) {
    const double leg = leg_max * i / (samples - 1);
    const QuadResult res = quad_compare({pq, leg, leg, angle_rpq, angle_pqs});
    out.legs.push_back(leg);
    out.results.push_back(res);
    if (!out.threshold && res.margin < -1e-12) out.threshold = leg;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Curve speed comparison on constant-curvature surfaces
// ---------------------------------------------------------------------------

/// Data at a fixed parameter t0 of c(t) = exp_{gamma(t)}(f(t) E(t)), with E' = lambda gamma'.
struct CurveData {
  double f = 0.0;
  double fprime = 0.0;
  double lambda = 0.0;
  double E_norm = 1.0;
  double E_dot_gamma = 0.0;
};

struct CurveSpeeds {
  double speed_M = 1.0;
  double speed_M0 = 1.0;
  double margin = 0.0;  ///< speed_M - speed_M0
};

/// |c'(t0)| on the space forms of curvature kM and kM0. The variation field along the
/// transversal geodesic of length L = f |E| is V = V_hat + (a s + b) T with
/// |V_hat(s)| = sqrt(1 - b^2) (cs_k(s) + mu sn_k(s)), mu = lambda/|E|, b = <E, gamma'>/|E|,
/// a = f'/f + mu b.
inline CurveSpeeds corollaryC_speed(double kM, double kM0, const CurveData& c) {
  if (c.f < 0.0) throw std::invalid_argument("corollaryC_speed: f must be non-negative");
  if (!(c.E_norm > 0.0)) throw std::invalid_argument("corollaryC_speed: |E| must be positive");
  if (!(std::abs(c.E_dot_gamma) < c.E_norm))
    throw std::invalid_argument("corollaryC_speed: <E, gamma'> must differ from +-|E|");

  const double L = c.f * c.E_norm;
  if (L == 0.0) return {1.0, 1.0, 0.0};

  const double b = c.E_dot_gamma / c.E_norm;
  const double mu = c.lambda / c.E_norm;
  if (const auto tf = space_form_focal_time(kM0, mu); tf && *tf <= L)
    throw FocalPointError("corollaryC_speed: focal point on the transversal geodesic of the model", *tf);

  const double aL = c.fprime * c.E_norm + mu * b * L;
  const double perp0 = std::sqrt(1.0 - b * b);
  auto speed = [&](double k) {
    const double j = closed_form_space_form_jacobi(k, mu, L).j;
    return std::hypot(perp0 * j, aL + b);
  };
  const double sM = speed(kM), sM0 = speed(kM0);
  return {sM, sM0, sM - sM0};
}

// ---------------------------------------------------------------------------
// Volume comparison on rotationally symmetric models
// ---------------------------------------------------------------------------

struct RTildeSolution {
  double r_tilde = 0.0;
  /// r >= r_tilde (expected whenever k' >= k).
  bool r_ge_r_tilde = true;
};

/// Solves sn_k(r_tilde)^{n-1} = sn_{k'}(r)^{n-1} on the increasing branch of sn_k.
inline RTildeSolution corollaryE_solve_rtilde(int n, double k_prime, double r, double k) {
  if (n < 2) throw std::invalid_argument("corollaryE_solve_rtilde: n must be >= 2");
  if (!(r > 0.0)) throw std::invalid_argument("corollaryE_solve_rtilde: r must be positive");
  const double target = space_form_functions(k_prime, r).sn;
  if (!(target > 0.0)) throw std::domain_error("corollaryE_solve_rtilde: cap radius beyond the cap pole");
  if (k == k_prime && (k <= 0.0 || r <= std::numbers::pi / (2.0 * std::sqrt(k)))) return {r, true};

  double rt = target;
  if (k > kFlatThreshold) {
    const double s = std::sqrt(k);
    if (target * s > 1.0 + 1e-15)
      throw std::domain_error(
          "corollaryE_solve_rtilde: boundary area exceeds the largest model sphere with r_tilde <= pi/(2 sqrt k)");
    rt = std::asin(std::min(1.0, target * s)) / s;
  } else if (k < -kFlatThreshold) {
    const double s = std::sqrt(-k);
    rt = std::asinh(target * s) / s;
  }
  return {rt, r >= rt - 1e-12};
}

/// Rotationally symmetric model: a cap of curvature k' and radius r extended by f,
/// compared with the space form of curvature k about a ball of radius r_tilde.
struct VolumeModel {
  int n = 2;
  WarpingFunction f;
  double k = 0.0;
  double r = 0.0;
  double r_tilde = 0.0;
  double omega = 2.0 * std::numbers::pi;  ///< area of the unit (n-1)-sphere
};

/// Equal-boundary-area model: r_tilde solved from the cap.
inline VolumeModel make_volume_model(int n, WarpingFunction f, double k) {
  if (!f.cap()) throw std::invalid_argument("make_volume_model: warping function has no cap");
  const auto [k_prime, r] = *f.cap();
  const RTildeSolution sol = corollaryE_solve_rtilde(n, k_prime, r, k);
  return VolumeModel{n, std::move(f), k, r, sol.r_tilde, unit_sphere_area(n - 1)};
}

/// Model with a prescribed comparison radius (relaxed boundary condition).
inline VolumeModel make_volume_model(int n, WarpingFunction f, double k, double r_tilde) {
  if (!f.cap()) throw std::invalid_argument("make_volume_model: warping function has no cap");
  const double r = f.cap()->r;
  return VolumeModel{n, std::move(f), k, r, r_tilde, unit_sphere_area(n - 1)};
}

enum class VolumeMode {
  equal_area,    ///< Vol(dB(p, r)) = Vol(dB(p~, r~))
  relaxed_area,  ///< Vol(dB(p, r)) <= Vol(dB(p~, r~)) with r >= r~
};

struct VolumeReport {
  /// grid = R values, lhs = area on M at r + R, rhs = model area at r~ + R; margin rhs - lhs.
  ComparisonReport area;
  std::vector<double> annulus_M;
  std::vector<double> annulus_model;
  double annulus_min_margin = std::numeric_limits<double>::infinity();
};

namespace detail {

inline double simpson(const std::function<double(double)>& g, double a, double b, int steps) {
  if (steps < 2 || steps % 2 != 0) throw std::invalid_argument("simpson: steps must be even and >= 2");
  const double h = (b - a) / steps;
  double s = g(a) + g(b);
  for (int i = 1; i < steps; ++i) s += (i % 2 == 1 ? 4.0 : 2.0) * g(a + h * i);
  return s * h / 3.0;
}

}  // namespace detail

inline double sphere_area(const VolumeModel& m, double rho) {
  return m.omega * std::pow(m.f.value(rho), m.n - 1);
}

inline double model_sphere_area(const VolumeModel& m, double rho) {
  return m.omega * std::pow(space_form_functions(m.k, rho).sn, m.n - 1);
}

/// Vol(dB(p, r+R)) <= Vol(dB(p~, r~+R)) and the annulus volumes, for each R in R_grid.
inline VolumeReport corollaryE_verify(const VolumeModel& m, const std::vector<double>& R_grid,
                                      int steps = kDefaultSteps, VolumeMode mode = VolumeMode::equal_area,
                                      double tol = 1e-8) {
  if (R_grid.empty()) throw std::invalid_argument("corollaryE_verify: empty R grid");
  VolumeReport out;
  ComparisonReport& rep = out.area;
  rep.tol = tol;

  const double R_max = *std::max_element(R_grid.begin(), R_grid.end());
  const double k_prime = m.f.cap()->k_prime;

  HypothesisCheck curv{"radial_curvature_lower_bound"};
  const double rho_top = std::min(m.r + R_max, m.f.rho_max());
  for (int j = 0; j <= steps; ++j) {
    const double rho = rho_top * j / steps;
    const double margin = m.f.gauss_curvature(rho) - m.k;
    if (margin < curv.worst_margin) {
      curv.worst_margin = margin;
      curv.worst_t = rho;
    }
  }
  curv.passed = curv.worst_margin >= -tol;
  rep.hypothesis.checks.push_back(curv);
  rep.hypothesis.checks.push_back(detail::margin_check("cap_curvature_order", k_prime - m.k, 0.0));
  if (m.k > 0.0)
    rep.hypothesis.checks.push_back(
        detail::margin_check("r_tilde_bound", std::numbers::pi / (2.0 * std::sqrt(m.k)) - m.r_tilde, 1e-12));

  const double fr = m.f.value(m.r);
  const double sr = space_form_functions(m.k, m.r_tilde).sn;
  if (mode == VolumeMode::equal_area) {
    rep.hypothesis.checks.push_back(
        detail::margin_check("boundary_area_match", -std::abs(fr - sr) / std::max(1.0, sr), 1e-10));
  } else {
    rep.hypothesis.checks.push_back(detail::margin_check("boundary_area_order", sr - fr, 1e-12));
    rep.hypothesis.checks.push_back(detail::margin_check("radius_order", m.r - m.r_tilde, 1e-12));
  }

  for (double R : R_grid) {
    if (!(R > 0.0)) throw std::invalid_argument("corollaryE_verify: R values must be positive");
    if (m.r + R > m.f.rho_max() * (1.0 + 1e-12)) {
      rep.warnings.push_back("R = " + std::to_string(R) + " leaves the model domain; skipped");
      continue;
    }
    if (m.k > 0.0 && !(m.r_tilde + R < std::numbers::pi / std::sqrt(m.k))) {
      rep.warnings.push_back("R = " + std::to_string(R) + " reaches the space form focal radius; skipped");
      continue;
    }
    const double aM = sphere_area(m, m.r + R);
    const double aS = model_sphere_area(m, m.r_tilde + R);
    rep.grid.push_back(R);
    rep.lhs.push_back(aM);
    rep.rhs.push_back(aS);
    rep.ratio.push_back(aM / aS);
    if (aS - aM < rep.min_margin) {
      rep.min_margin = aS - aM;
      rep.worst_t = R;
    }
    const double vM = detail::simpson([&](double x) { return sphere_area(m, x); }, m.r, m.r + R, steps);
    const double vS =
        detail::simpson([&](double x) { return model_sphere_area(m, x); }, m.r_tilde, m.r_tilde + R, steps);
    out.annulus_M.push_back(vM);
    out.annulus_model.push_back(vS);
    out.annulus_min_margin = std::min(out.annulus_min_margin, vS - vM);
  }
  detail::finalize_status(rep);
  if (rep.status == ComparisonStatus::holds && out.annulus_min_margin < -tol) rep.status = ComparisonStatus::violated;
  return out;
}

}  // namespace cmpgeo
