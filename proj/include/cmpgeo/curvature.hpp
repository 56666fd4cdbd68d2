#pragma once

// Geodesics are represented only through the curvature operator R(t) in a
// parallel orthonormal frame of the normal space: the Jacobi equation reads
// J'' + R(t) J = 0 and the eigenvalues of R(t) are the sectional curvatures
// of the planes containing the geodesic direction.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "cmpgeo/initial_operator.hpp"
#include "cmpgeo/space_form.hpp"
#include "cmpgeo/types.hpp"

namespace cmpgeo {

using ScalarFunction = std::function<double(double)>;

namespace detail {

// Uniformly sampled (f, f', f'') with quintic Hermite interpolation.
struct HermiteTable {
  double x0 = 0.0;
  double h = 0.0;
  std::vector<double> f, fp, fpp;

  std::size_t intervals() const { return f.size() - 1; }
  double x_end() const { return x0 + h * static_cast<double>(intervals()); }

  // Returns {p, p', p''} at x, x clamped into the table range.
  std::array<double, 3> eval(double x) const {
    const double s = std::clamp((x - x0) / h, 0.0, static_cast<double>(intervals()));
    auto i = static_cast<std::size_t>(s);
    if (i >= intervals()) i = intervals() - 1;
    const double u = s - static_cast<double>(i);
    const double u2 = u * u, u3 = u2 * u, u4 = u3 * u, u5 = u4 * u;

    const double y0 = f[i], d0 = h * fp[i], c0 = h * h * fpp[i];
    const double y1 = f[i + 1], d1 = h * fp[i + 1], c1 = h * h * fpp[i + 1];

    const double H0 = 1 - 10 * u3 + 15 * u4 - 6 * u5;
    const double H1 = u - 6 * u3 + 8 * u4 - 3 * u5;
    const double H2 = 0.5 * (u2 - 3 * u3 + 3 * u4 - u5);
    const double H3 = 0.5 * (u3 - 2 * u4 + u5);
    const double H4 = -4 * u3 + 7 * u4 - 3 * u5;
    const double H5 = 10 * u3 - 15 * u4 + 6 * u5;

    const double D0 = -30 * u2 + 60 * u3 - 30 * u4;
    const double D1 = 1 - 18 * u2 + 32 * u3 - 15 * u4;
    const double D2 = 0.5 * (2 * u - 9 * u2 + 12 * u3 - 5 * u4);
    const double D3 = 0.5 * (3 * u2 - 8 * u3 + 5 * u4);
    const double D4 = -12 * u2 + 28 * u3 - 15 * u4;
    const double D5 = -D0;

    const double S0 = -60 * u + 180 * u2 - 120 * u3;
    const double S1 = -36 * u + 96 * u2 - 60 * u3;
    const double S2 = 0.5 * (2 - 18 * u + 36 * u2 - 20 * u3);
    const double S3 = 0.5 * (6 * u - 24 * u2 + 20 * u3);
    const double S4 = -24 * u + 84 * u2 - 60 * u3;
    const double S5 = -S0;

    const double p = y0 * H0 + d0 * H1 + c0 * H2 + y1 * H5 + d1 * H4 + c1 * H3;
    const double dp = y0 * D0 + d0 * D1 + c0 * D2 + y1 * D5 + d1 * D4 + c1 * D3;
    const double ddp = y0 * S0 + d0 * S1 + c0 * S2 + y1 * S5 + d1 * S4 + c1 * S3;
    return {p, dp / h, ddp / (h * h)};
  }
};

}  // namespace detail

/// Warping function f of a rotationally symmetric metric d rho^2 + f(rho)^2 g_sphere.
class WarpingFunction {
 public:
  struct Cap {
    double k_prime;  ///< f = sn_{k'} on [0, r]
    double r;
  };

  /// Analytic f with derivative callbacks.
  static WarpingFunction analytic(ScalarFunction f, ScalarFunction fp, ScalarFunction fpp,
                                  double rho_max) {
    check_rho_max(rho_max);
    return WarpingFunction(std::make_shared<const Data>(
        Data{std::move(f), std::move(fp), std::move(fpp), rho_max, std::nullopt, {}}));
  }

  /// Derivatives by centered differences with h_fd = 1e-5 * rho_max.
  static WarpingFunction finite_difference(ScalarFunction f, double rho_max) {
    check_rho_max(rho_max);
    const double h = 1e-5 * rho_max;
    auto fp = [f, h](double x) { return (f(x + h) - f(x - h)) / (2.0 * h); };
    auto fpp = [f, h](double x) { return (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h); };
    return WarpingFunction(
        std::make_shared<const Data>(Data{f, std::move(fp), std::move(fpp), rho_max, std::nullopt, {}}));
  }

  /// f = sn_k on [0, rho_max], recorded as a cap of curvature k and radius cap_r
  /// (the whole domain when cap_r is omitted).
  static WarpingFunction space_form(double k, double rho_max, std::optional<double> cap_r = std::nullopt) {
    check_rho_max(rho_max);
    auto f = [k](double x) { return space_form_functions(k, x).sn; };
    auto fp = [k](double x) { return space_form_functions(k, x).cs; };
    auto fpp = [k](double x) { return -k * space_form_functions(k, x).sn; };
    return WarpingFunction(std::make_shared<const Data>(
        Data{std::move(f), std::move(fp), std::move(fpp), rho_max, Cap{k, cap_r.value_or(rho_max)}, {}}));
  }

  double value(double rho) const { return data_->f(rho); }
  double derivative(double rho) const { return data_->fp(rho); }
  double second_derivative(double rho) const { return data_->fpp(rho); }
  double rho_max() const noexcept { return data_->rho_max; }
  const std::optional<Cap>& cap() const noexcept { return data_->cap; }

  /// K(rho) = -f''/f, the radial sectional curvature. Exact inside the cap.
  double gauss_curvature(double rho) const {
    if (data_->cap && rho <= data_->cap->r) return data_->cap->k_prime;
    double x = rho;
    // f(0) = 0 at a smooth pole: evaluate just off the pole.
    if (x < 1e-6 * std::max(1.0, rho_max())) x = 1e-6 * std::max(1.0, rho_max());
    return -second_derivative(x) / value(x);
  }

  // Used by build_cap_extension. f'' = -kappa f on the tail; differentiating the table
  // twice would lose about 1e-7 to cancellation at the table spacing.
  static WarpingFunction capped_table(double k_prime, double r, detail::HermiteTable tail, ScalarFunction kappa) {
    const double rho_max = tail.x_end();
    auto table = std::make_shared<const detail::HermiteTable>(std::move(tail));
    auto f = [k_prime, r, table](double x) {
      return x <= r ? space_form_functions(k_prime, x).sn : table->eval(x)[0];
    };
    auto fp = [k_prime, r, table](double x) {
      return x <= r ? space_form_functions(k_prime, x).cs : table->eval(x)[1];
    };
    auto fpp = [k_prime, r, table, kappa = std::move(kappa)](double x) {
      return x <= r ? -k_prime * space_form_functions(k_prime, x).sn : -kappa(x) * table->eval(x)[0];
    };
    return WarpingFunction(std::make_shared<const Data>(
        Data{std::move(f), std::move(fp), std::move(fpp), rho_max, Cap{k_prime, r}, table}));
  }

 private:
  struct Data {
    ScalarFunction f, fp, fpp;
    double rho_max;
    std::optional<Cap> cap;
    std::shared_ptr<const detail::HermiteTable> table;
  };

  explicit WarpingFunction(std::shared_ptr<const Data> d) : data_(std::move(d)) {}

  static void check_rho_max(double rho_max) {
    if (!(rho_max > 0.0) || !std::isfinite(rho_max))
      throw std::invalid_argument("WarpingFunction: rho_max must be positive and finite");
  }

  std::shared_ptr<const Data> data_;
};

/// Result of extending a constant-curvature cap by a curvature-prescribed tail.
struct CapExtension {
  WarpingFunction f;
  bool truncated = false;  ///< f reached zero before the requested rho_max
  double domain_end = 0.0;
};

/// f = sn_{k'} on [0, r]; on [r, rho_max] f'' = -kappa_tail(rho) f with f, f' continuous at r.
/// The tail is integrated by classical RK4 on a sample grid of spacing <= 1e-4.
inline CapExtension build_cap_extension(double k_prime, double r, const ScalarFunction& kappa_tail,
                                        double rho_max) {
  if (!(r > 0.0)) throw std::invalid_argument("build_cap_extension: r must be positive");
  if (!(rho_max > r)) throw std::invalid_argument("build_cap_extension: rho_max must exceed r");
  if (k_prime > 0.0 && !(r < std::numbers::pi / std::sqrt(k_prime)))
    throw std::invalid_argument("build_cap_extension: r must lie inside the focal radius of the cap");

  const auto intervals =
      std::max<std::size_t>(1000, static_cast<std::size_t>(std::ceil((rho_max - r) / 1e-4)));
  detail::HermiteTable tab;
  tab.x0 = r;
  tab.h = (rho_max - r) / static_cast<double>(intervals);

  const auto [sn, cs] = space_form_functions(k_prime, r);
  double y = sn, yp = cs;
  tab.f.push_back(y);
  tab.fp.push_back(yp);
  tab.fpp.push_back(-kappa_tail(r) * y);

  bool truncated = false;
  const double h = tab.h;
  for (std::size_t i = 0; i < intervals; ++i) {
    const double x = r + h * static_cast<double>(i);
    const double xm = x + 0.5 * h;
    const double x1 = (i + 1 == intervals) ? rho_max : x + h;
    const double km = kappa_tail(xm);
    const double k1y = yp, k1v = -kappa_tail(x) * y;
    const double k2y = yp + 0.5 * h * k1v, k2v = -km * (y + 0.5 * h * k1y);
    const double k3y = yp + 0.5 * h * k2v, k3v = -km * (y + 0.5 * h * k2y);
    const double k4y = yp + h * k3v, k4v = -kappa_tail(x1) * (y + h * k3y);
    const double y_next = y + h / 6.0 * (k1y + 2 * k2y + 2 * k3y + k4y);
    const double yp_next = yp + h / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v);
    if (!(y_next > 0.0)) {
      truncated = true;
      break;
    }
    y = y_next;
    yp = yp_next;
    tab.f.push_back(y);
    tab.fp.push_back(yp);
    tab.fpp.push_back(-kappa_tail(x1) * y);
  }
  if (tab.f.size() < 2)
    throw std::domain_error("build_cap_extension: warping function vanishes immediately after the cap");

  const double end = tab.x_end();
  return CapExtension{WarpingFunction::capped_table(k_prime, r, std::move(tab), kappa_tail), truncated, end};
}

struct ConstantCurvature {
  double k;
};

struct DiagonalCurvature {
  std::vector<ScalarFunction> entries;
};

/// Radial geodesic of a warped product: t maps to rho = rho_start + t.
struct WarpedCurvature {
  WarpingFunction f;
  double rho_start = 0.0;
};

struct CustomCurvature {
  std::function<Matrix(double)> eval;
};

/// Curvature operator t -> R(t) along a normal geodesic of length l in an n-manifold.
/// R(t) is a symmetric (n-1)x(n-1) matrix. Immutable; copies share the underlying callbacks.
class CurvatureProfile {
 public:
  using Kind = std::variant<ConstantCurvature, DiagonalCurvature, WarpedCurvature, CustomCurvature>;

  static CurvatureProfile constant(int n, double l, double k) {
    if (!std::isfinite(k)) throw std::invalid_argument("CurvatureProfile::constant: k must be finite");
    return CurvatureProfile(n, l, ConstantCurvature{k});
  }

  static CurvatureProfile diagonal(double l, std::vector<ScalarFunction> entries) {
    const int n = static_cast<int>(entries.size()) + 1;
    return CurvatureProfile(n, l, DiagonalCurvature{std::move(entries)});
  }

  static CurvatureProfile diagonal_constant(double l, const std::vector<double>& values) {
    std::vector<ScalarFunction> entries;
    for (double v : values) entries.emplace_back([v](double) { return v; });
    return diagonal(l, std::move(entries));
  }

  static CurvatureProfile warped(int n, double l, WarpingFunction f, double rho_start = 0.0) {
    if (rho_start + l > f.rho_max() * (1.0 + 1e-12))
      throw std::invalid_argument("CurvatureProfile: geodesic leaves the warping function domain");
    return CurvatureProfile(n, l, WarpedCurvature{std::move(f), rho_start});
  }

  static CurvatureProfile custom(int n, double l, std::function<Matrix(double)> eval) {
    return CurvatureProfile(n, l, CustomCurvature{std::move(eval)});
  }

  int n() const noexcept { return n_; }
  /// Dimension of the normal space, n - 1.
  int dim() const noexcept { return n_ - 1; }
  double length() const noexcept { return l_; }
  const Kind& kind() const noexcept { return *kind_; }

  std::optional<double> constant_value() const {
    if (const auto* c = std::get_if<ConstantCurvature>(kind_.get())) return c->k;
    return std::nullopt;
  }

  /// R(t), symmetrized. Throws std::domain_error outside [0, l].
  Matrix eval(double t) const {
    if (!(t >= -1e-12 * l_ && t <= l_ * (1.0 + 1e-12)))
      throw std::domain_error("CurvatureProfile::eval: t = " + std::to_string(t) + " outside [0, " +
                              std::to_string(l_) + "]");
    t = std::clamp(t, 0.0, l_);
    const int d = dim();
    return std::visit(
        [&](const auto& kind) -> Matrix {
          using K = std::decay_t<decltype(kind)>;
          if constexpr (std::is_same_v<K, ConstantCurvature>) {
            return kind.k * Matrix::Identity(d, d);
          } else if constexpr (std::is_same_v<K, DiagonalCurvature>) {
            Matrix m = Matrix::Zero(d, d);
            for (int i = 0; i < d; ++i) m(i, i) = kind.entries[static_cast<std::size_t>(i)](t);
            return m;
          } else if constexpr (std::is_same_v<K, WarpedCurvature>) {
            return kind.f.gauss_curvature(kind.rho_start + t) * Matrix::Identity(d, d);
          } else {
            Matrix m = kind.eval(t);
            if (m.rows() != d || m.cols() != d)
              throw std::invalid_argument("CurvatureProfile: custom matrix has wrong shape");
            return detail::symmetrize(m);
          }
        },
        *kind_);
  }

  /// Same curvature data on the shorter geodesic [0, new_l].
  CurvatureProfile restricted(double new_l) const {
    if (!(new_l > 0.0 && new_l <= l_ * (1.0 + 1e-12)))
      throw std::invalid_argument("CurvatureProfile::restricted: length out of range");
    CurvatureProfile p = *this;
    p.l_ = std::min(new_l, l_);
    return p;
  }

 private:
  CurvatureProfile(int n, double l, Kind kind)
      : n_(n), l_(l), kind_(std::make_shared<const Kind>(std::move(kind))) {
    if (n < 2) throw std::invalid_argument("CurvatureProfile: dimension n must be >= 2");
    if (!(l > 0.0) || !std::isfinite(l))
      throw std::invalid_argument("CurvatureProfile: length must be positive and finite");
    if (const auto* dgl = std::get_if<DiagonalCurvature>(kind_.get()); dgl && dgl->entries.empty())
      throw std::invalid_argument("CurvatureProfile: diagonal profile needs at least one entry");
  }

  int n_;
  double l_;
  std::shared_ptr<const Kind> kind_;
};

/// One hypothesis check; passed iff worst_margin >= -tol.
struct HypothesisCheck {
  std::string name;
  bool passed = true;
  double worst_margin = std::numeric_limits<double>::infinity();
  double worst_t = std::numeric_limits<double>::quiet_NaN();
};

struct HypothesisReport {
  std::vector<HypothesisCheck> checks;

  bool all_passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
  }

  const HypothesisCheck* find(const std::string& name) const {
    for (const auto& c : checks)
      if (c.name == name) return &c;
    return nullptr;
  }

  /// Names of failed checks, in order.
  std::vector<std::string> failures() const {
    std::vector<std::string> out;
    for (const auto& c : checks)
      if (!c.passed) out.push_back(c.name);
    return out;
  }
};

inline constexpr double kDefaultHypothesisTol = 1e-10;

namespace detail {

inline double grid_t(double l, int grid_points, int j) {
  return j + 1 == grid_points ? l : l * static_cast<double>(j) / static_cast<double>(grid_points - 1);
}

inline Vector sym_eigenvalues(const Matrix& m) {
  return Eigen::SelfAdjointEigenSolver<Matrix>(m, Eigen::EigenvaluesOnly).eigenvalues();
}

}  // namespace detail

/// Sectional comparison: max eig R_M(t) <= min eig R_M0(t) on the grid, and min eig B >= max eig B0.
inline HypothesisReport validate_sectional(const CurvatureProfile& pM, const CurvatureProfile& pM0,
                                           const InitialOperator& B, const InitialOperator& B0,
                                           int grid_points, double tol = kDefaultHypothesisTol) {
  if (std::abs(pM.length() - pM0.length()) > 1e-12 * std::max(1.0, pM.length()))
    throw std::invalid_argument("validate_sectional: profiles must share the geodesic length");
  if (B.dim() != pM.dim() || B0.dim() != pM0.dim())
    throw std::invalid_argument("validate_sectional: operator dimension does not match profile");
  if (grid_points < 2) throw std::invalid_argument("validate_sectional: need at least 2 grid points");

  HypothesisCheck curv{"sectional_curvature"};
  for (int j = 0; j < grid_points; ++j) {
    const double t = detail::grid_t(pM.length(), grid_points, j);
    const double upper = detail::sym_eigenvalues(pM.eval(t)).maxCoeff();
    const double lower = detail::sym_eigenvalues(pM0.eval(t)).minCoeff();
    if (lower - upper < curv.worst_margin) {
      curv.worst_margin = lower - upper;
      curv.worst_t = t;
    }
  }
  curv.passed = curv.worst_margin >= -tol;

  HypothesisCheck eig{"initial_operator_eigenvalues"};
  eig.worst_margin = B.min_eigenvalue() - B0.max_eigenvalue();
  eig.worst_t = 0.0;
  eig.passed = eig.worst_margin >= -tol;

  return HypothesisReport{{curv, eig}};
}

/// Ricci lower bound trace R(t) >= (n-1) k on the grid.
inline HypothesisReport validate_ricci(const CurvatureProfile& p, double k, int grid_points,
                                       double tol = kDefaultHypothesisTol) {
  if (grid_points < 2) throw std::invalid_argument("validate_ricci: need at least 2 grid points");
  HypothesisCheck ric{"ricci_lower_bound"};
  const double bound = static_cast<double>(p.n() - 1) * k;
  for (int j = 0; j < grid_points; ++j) {
    const double t = detail::grid_t(p.length(), grid_points, j);
    const double margin = p.eval(t).trace() - bound;
    if (margin < ric.worst_margin) {
      ric.worst_margin = margin;
      ric.worst_t = t;
    }
  }
  ric.passed = ric.worst_margin >= -tol;
  return HypothesisReport{{ric}};
}

struct HypothesisMode {
  enum class Kind { sectional, ricci } kind = Kind::sectional;
  double k = 0.0;

  static HypothesisMode sectional() { return {Kind::sectional, 0.0}; }
  static HypothesisMode ricci(double k) { return {Kind::ricci, k}; }
};

/// Dispatches on the mode; in Ricci mode only pM is inspected.
inline HypothesisReport validate_hypotheses(const CurvatureProfile& pM, const CurvatureProfile& pM0,
                                            const InitialOperator& B, const InitialOperator& B0,
                                            HypothesisMode mode, int grid_points,
                                            double tol = kDefaultHypothesisTol) {
  if (mode.kind == HypothesisMode::Kind::ricci) return validate_ricci(pM, mode.k, grid_points, tol);
  return validate_sectional(pM, pM0, B, B0, grid_points, tol);
}

/// Evaluate the profile (convenience wrapper matching the free-function style of the other modules).
inline Matrix eval_profile(const CurvatureProfile& p, double t) { return p.eval(t); }

}  // namespace cmpgeo
