#pragma once

// Config-driven experiment runner behind the cmpgeo command line tool.
// A config is a JSON document {"experiment", "params", "output", "format", "seed"};
// see README.md for the per-experiment parameter schema.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "cmpgeo/applications.hpp"
#include "cmpgeo/comparison.hpp"
#include "cmpgeo/curvature.hpp"
#include "cmpgeo/index_form.hpp"
#include "cmpgeo/initial_operator.hpp"
#include "cmpgeo/jacobi.hpp"
#include "cmpgeo/random.hpp"
#include "cmpgeo/space_form.hpp"

namespace cmpgeo::cli {

using nlohmann::json;

enum ExitCode : int {
  kExitHolds = 0,
  kExitViolation = 1,
  kExitHypothesisFailed = 2,
  kExitInputError = 3,
};

enum class OutputFormat { csv, json };

inline const std::vector<std::string>& experiment_tags() {
  static const std::vector<std::string> tags{"focal", "index", "lemma-a", "rauch3", "thm-d",
                                             "ratio", "quad",  "cor-c",   "cor-e"};
  return tags;
}

struct ExperimentConfig {
  std::string experiment;
  json params = json::object();
  std::string output = "-";  ///< "-" is standard output
  OutputFormat format = OutputFormat::csv;
  std::uint64_t seed = 0;

  bool operator==(const ExperimentConfig&) const = default;
};

/// Schema violations, one human-readable line per offending key.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(std::vector<std::string> issues)
      : std::invalid_argument(join(issues)), issues_(std::move(issues)) {}

  const std::vector<std::string>& issues() const noexcept { return issues_; }

 private:
  static std::string join(const std::vector<std::string>& v) {
    std::string s = "invalid config";
    for (const auto& i : v) s += "\n  " + i;
    return s;
  }
  std::vector<std::string> issues_;
};

struct ExperimentResult {
  int exit_code = kExitHolds;
  std::string csv;
  json summary;
};

namespace detail {

using Issues = std::vector<std::string>;

inline std::string fmt(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

inline json num(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

inline json opt_num(const std::optional<double>& x) { return x ? num(*x) : json(nullptr); }

/// Typed access to one JSON object with key-path error messages.
class Reader {
 public:
  Reader(const json& obj, std::string path, Issues& issues) : obj_(obj), path_(std::move(path)), issues_(issues) {}

  std::string key_path(const std::string& k) const { return path_.empty() ? k : path_ + "." + k; }
  void issue(const std::string& k, const std::string& msg) { issues_.push_back(key_path(k) + ": " + msg); }

  bool has(const std::string& k) {
    used_.insert(k);
    return obj_.contains(k);
  }

  const json* get(const std::string& k) { return has(k) ? &obj_.at(k) : nullptr; }

  std::optional<double> number(const std::string& k) {
    if (!has(k)) {
      issue(k, "missing required key");
      return std::nullopt;
    }
    return as_number(k);
  }

  double number_or(const std::string& k, double def) {
    if (!has(k)) return def;
    return as_number(k).value_or(def);
  }

  std::optional<long long> integer(const std::string& k) {
    if (!has(k)) {
      issue(k, "missing required key");
      return std::nullopt;
    }
    return as_integer(k);
  }

  long long integer_or(const std::string& k, long long def) {
    if (!has(k)) return def;
    return as_integer(k).value_or(def);
  }

  bool boolean_or(const std::string& k, bool def) {
    if (!has(k)) return def;
    if (!obj_.at(k).is_boolean()) {
      issue(k, "expected a boolean");
      return def;
    }
    return obj_.at(k).get<bool>();
  }

  std::string string_or(const std::string& k, std::string def) {
    if (!has(k)) return def;
    if (!obj_.at(k).is_string()) {
      issue(k, "expected a string");
      return def;
    }
    return obj_.at(k).get<std::string>();
  }

  void check_unknown() {
    for (const auto& item : obj_.items())
      if (!used_.count(item.key())) issue(item.key(), "unknown key");
  }

 private:
  std::optional<double> as_number(const std::string& k) {
    const json& v = obj_.at(k);
    if (!v.is_number()) {
      issue(k, "expected a number");
      return std::nullopt;
    }
    const double x = v.get<double>();
    if (!std::isfinite(x)) {
      issue(k, "expected a finite number");
      return std::nullopt;
    }
    return x;
  }

  std::optional<long long> as_integer(const std::string& k) {
    const json& v = obj_.at(k);
    if (!v.is_number_integer()) {
      issue(k, "expected an integer");
      return std::nullopt;
    }
    return v.get<long long>();
  }

  const json& obj_;
  std::string path_;
  Issues& issues_;
  std::set<std::string> used_;
};

/// number c, or {"constant", "slope", "amplitude", "frequency", "phase"}:
/// x -> c + slope x + amplitude sin(frequency x + phase).
inline std::optional<ScalarFunction> read_function(const json& j, const std::string& path, Issues& issues) {
  if (j.is_number()) {
    const double c = j.get<double>();
    if (!std::isfinite(c)) {
      issues.push_back(path + ": expected a finite number");
      return std::nullopt;
    }
    return ScalarFunction([c](double) { return c; });
  }
  if (!j.is_object()) {
    issues.push_back(path + ": expected a number or a function object");
    return std::nullopt;
  }
  const std::size_t before = issues.size();
  Reader r(j, path, issues);
  const double c = r.number_or("constant", 0.0);
  const double s = r.number_or("slope", 0.0);
  const double a = r.number_or("amplitude", 0.0);
  const double w = r.number_or("frequency", 1.0);
  const double ph = r.number_or("phase", 0.0);
  r.check_unknown();
  if (issues.size() != before) return std::nullopt;
  return ScalarFunction([=](double x) { return c + s * x + a * std::sin(w * x + ph); });
}

inline std::optional<int> read_dimension(Reader& r, const std::string& key, long long def) {
  const long long n = r.integer_or(key, def);
  if (n < 2 || n > 64) {
    r.issue(key, "dimension n must lie in [2, 64]");
    return std::nullopt;
  }
  return static_cast<int>(n);
}

/// Profile object: {"type": "constant"|"diagonal"|"warped_space_form"|"cap_extension", ...}.
inline std::optional<CurvatureProfile> read_profile_object(const json& j, const std::string& path, double l,
                                                           Issues& issues) {
  if (!j.is_object()) {
    issues.push_back(path + ": expected a profile object");
    return std::nullopt;
  }
  const std::size_t before = issues.size();
  Reader r(j, path, issues);
  const std::string type = r.string_or("type", "");
  std::optional<CurvatureProfile> out;
  try {
    if (type == "constant") {
      const auto k = r.number("k");
      const auto n = read_dimension(r, "n", 2);
      r.check_unknown();
      if (issues.size() == before) out = CurvatureProfile::constant(*n, l, *k);
    } else if (type == "diagonal") {
      const json* e = r.get("entries");
      std::vector<ScalarFunction> entries;
      if (!e) {
        r.issue("entries", "missing required key");
      } else if (!e->is_array() || e->empty()) {
        r.issue("entries", "expected a non-empty array");
      } else {
        for (std::size_t i = 0; i < e->size(); ++i)
          if (auto f = read_function((*e)[i], r.key_path("entries") + "[" + std::to_string(i) + "]", issues))
            entries.push_back(*f);
      }
      r.check_unknown();
      if (issues.size() == before) out = CurvatureProfile::diagonal(l, std::move(entries));
    } else if (type == "warped_space_form") {
      const auto k = r.number("k");
      const auto n = read_dimension(r, "n", 2);
      const double rho0 = r.number_or("rho_start", 0.0);
      r.check_unknown();
      if (issues.size() == before)
        out = CurvatureProfile::warped(*n, l, WarpingFunction::space_form(*k, rho0 + l), rho0);
    } else if (type == "cap_extension") {
      const auto kp = r.number("k_prime");
      const auto rad = r.number("r");
      const auto n = read_dimension(r, "n", 2);
      const double rho0 = r.number_or("rho_start", 0.0);
      std::optional<ScalarFunction> tail;
      if (const json* t = r.get("tail")) tail = read_function(*t, r.key_path("tail"), issues);
      r.check_unknown();
      if (issues.size() == before) {
        const double rho_max = rho0 + l;
        if (!tail) {
          out = CurvatureProfile::warped(*n, l, WarpingFunction::space_form(*kp, rho_max, *rad), rho0);
        } else {
          CapExtension ext = build_cap_extension(*kp, *rad, *tail, rho_max);
          if (ext.truncated)
            issues.push_back(path + ": warping function vanishes at rho = " + fmt(ext.domain_end) +
                             " inside the profile");
          else
            out = CurvatureProfile::warped(*n, l, ext.f, rho0);
        }
      }
    } else {
      r.issue("type", type.empty() ? "missing required key"
                                   : "unknown profile type '" + type +
                                         "' (constant, diagonal, warped_space_form, cap_extension)");
    }
  } catch (const std::exception& e) {
    issues.push_back(path + ": " + e.what());
    out.reset();
  }
  return out;
}

/// Either an explicit profile object under `object_key` or a constant curvature under `k_key`.
inline std::optional<CurvatureProfile> read_profile(Reader& r, const std::string& object_key, const std::string& k_key,
                                                    std::optional<double> l, Issues& issues,
                                                    const std::string& n_key = "n") {
  if (r.has(object_key)) {
    if (r.has(k_key)) r.issue(k_key, "conflicts with " + r.key_path(object_key));
    if (!l) return std::nullopt;
    return read_profile_object(*r.get(object_key), r.key_path(object_key), *l, issues);
  }
  const auto n = read_dimension(r, n_key, 2);
  if (!r.has(k_key)) {
    r.issue(k_key, "missing required key (or give " + r.key_path(object_key) + ")");
    return std::nullopt;
  }
  const auto k = r.number(k_key);
  if (!k || !n || !l) return std::nullopt;
  try {
    return CurvatureProfile::constant(*n, *l, *k);
  } catch (const std::exception& e) {
    r.issue(k_key, e.what());
    return std::nullopt;
  }
}

/// Symmetric operator: number (scalar), array of numbers (diagonal) or array of rows.
inline std::optional<InitialOperator> read_operator(Reader& r, const std::string& matrix_key,
                                                    const std::string& scalar_key, int dim) {
  if (r.has(matrix_key)) {
    if (r.has(scalar_key)) r.issue(scalar_key, "conflicts with " + r.key_path(matrix_key));
    const json& j = *r.get(matrix_key);
    try {
      if (j.is_number()) return InitialOperator::scalar(dim, j.get<double>());
      if (j.is_array() && !j.empty() && j[0].is_number()) {
        Vector d(static_cast<Eigen::Index>(j.size()));
        for (std::size_t i = 0; i < j.size(); ++i) {
          if (!j[i].is_number()) throw std::invalid_argument("expected numbers");
          d(static_cast<Eigen::Index>(i)) = j[i].get<double>();
        }
        if (d.size() != dim) throw std::invalid_argument("operator size must be n - 1 = " + std::to_string(dim));
        return InitialOperator::diagonal(d);
      }
      if (j.is_array() && !j.empty()) {
        const auto rows = static_cast<Eigen::Index>(j.size());
        Matrix m(rows, rows);
        for (Eigen::Index i = 0; i < rows; ++i) {
          const json& row = j[static_cast<std::size_t>(i)];
          if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != rows)
            throw std::invalid_argument("expected a square array of rows");
          for (Eigen::Index c = 0; c < rows; ++c) {
            if (!row[static_cast<std::size_t>(c)].is_number()) throw std::invalid_argument("expected numbers");
            m(i, c) = row[static_cast<std::size_t>(c)].get<double>();
          }
        }
        if (rows != dim) throw std::invalid_argument("operator size must be n - 1 = " + std::to_string(dim));
        return InitialOperator(m);
      }
      throw std::invalid_argument("expected a number, a diagonal or a matrix");
    } catch (const std::exception& e) {
      r.issue(matrix_key, e.what());
      return std::nullopt;
    }
  }
  if (!r.has(scalar_key)) return InitialOperator::zero(dim);
  const auto lambda = r.number(scalar_key);
  if (!lambda) return std::nullopt;
  return InitialOperator::scalar(dim, *lambda);
}

inline std::optional<Vector> read_vector(Reader& r, const std::string& key, int dim) {
  const json* j = r.get(key);
  if (!j) {
    r.issue(key, "missing required key");
    return std::nullopt;
  }
  Vector v(dim);
  if (j->is_number() && dim == 1) {
    v(0) = j->get<double>();
    return v;
  }
  if (!j->is_array() || static_cast<int>(j->size()) != dim) {
    r.issue(key, "expected an array of " + std::to_string(dim) + " numbers");
    return std::nullopt;
  }
  for (int i = 0; i < dim; ++i) {
    if (!(*j)[static_cast<std::size_t>(i)].is_number()) {
      r.issue(key, "expected numbers");
      return std::nullopt;
    }
    v(i) = (*j)[static_cast<std::size_t>(i)].get<double>();
  }
  return v;
}

inline std::optional<double> read_length(Reader& r, const std::string& key = "l") {
  auto l = r.number(key);
  if (l && !(*l > 0.0)) {
    r.issue(key, "must be positive");
    return std::nullopt;
  }
  return l;
}

inline int read_steps(Reader& r) {
  const long long s = r.integer_or("steps", kDefaultSteps);
  if (s < 2 || s % 2 != 0 || s > (1LL << 24)) {
    r.issue("steps", "must be even, >= 2 and <= 2^24");
    return kDefaultSteps;
  }
  return static_cast<int>(s);
}

inline double read_tol(Reader& r, double def) {
  const double t = r.number_or("tol", def);
  if (!(t >= 0.0)) {
    r.issue("tol", "must be non-negative");
    return def;
  }
  return t;
}

inline int read_output_points(Reader& r) {
  const long long p = r.integer_or("output_points", 65);
  if (p < 2) {
    r.issue("output_points", "must be >= 2");
    return 65;
  }
  return static_cast<int>(p);
}

inline void check_dim(Reader& r, const std::optional<CurvatureProfile>& a, const std::optional<CurvatureProfile>& b,
                      const std::string& key) {
  if (a && b && a->n() != b->n()) r.issue(key, "profiles must have the same dimension");
}

// ---------------------------------------------------------------------------
// Per-experiment setups
// ---------------------------------------------------------------------------

struct FocalSetup {
  CurvatureProfile p;
  InitialOperator B;
  int steps;
};

struct IndexSetup {
  CurvatureProfile p;
  InitialOperator B;
  Vector w;
  int steps;
  double tol;
  int output_points;
};

struct LemmaSetup {
  CurvatureProfile p;
  InitialOperator B;
  Vector w;
  int steps;
  int nodes;
  int random_fields;
  double perturbation;
  double tol;
  double identity_tol;
  int output_points;
};

struct RauchSetup {
  RauchInstance in;
  int steps;
  double tol;
  std::optional<double> t0;
  int output_points;
};

struct DeterminantSetup {
  CurvatureProfile p;
  double k, lambda, lambda_tilde, wedge, wedge_tilde;
  int steps;
  double tol;
  double slope_tol;
  int output_points;
};

struct QuadSetup {
  std::optional<QuadInstance> single;
  std::optional<double> leg_max;
  int samples;
  double pq, angle_rpq, angle_pqs;
  double tol;
};

struct CurveSetup {
  double kM, kM0;
  std::optional<CurveData> single;
  int random_instances;
  double tol;
};

struct VolumeSetup {
  VolumeModel model;
  std::vector<double> R_grid;
  VolumeMode mode;
  int steps;
  double tol;
  bool truncated;
};

template <class T>
std::optional<T> finish(Reader& r, const Issues& issues, std::size_t before, auto&& make) {
  r.check_unknown();
  if (issues.size() != before) return std::nullopt;
  return make();
}

inline std::optional<FocalSetup> build_focal(const json& params, Issues& issues) {
  const std::size_t before = issues.size();
  Reader r(params, "params", issues);
  const auto l = read_length(r);
  const auto p = read_profile(r, "profile", "k", l, issues);
  std::optional<InitialOperator> B;
  if (p) B = read_operator(r, "B", "lambda", p->dim());
  else { r.has("B"); r.has("lambda"); }
  const int steps = read_steps(r);
  return finish<FocalSetup>(r, issues, before, [&] { return FocalSetup{*p, *B, steps}; });
}

inline std::optional<IndexSetup> build_index(const json& params, Issues& issues) {
  const std::size_t before = issues.size();
  Reader r(params, "params", issues);
  const auto l = read_length(r);
  const auto p = read_profile(r, "profile", "k", l, issues);
  std::optional<InitialOperator> B;
  std::optional<Vector> w;
  if (p) {
    B = read_operator(r, "B", "lambda", p->dim());
    w = read_vector(r, "w", p->dim());
  } else {
    r.has("B"); r.has("lambda"); r.has("w");
  }
  const int steps = read_steps(r);
  const double tol = read_tol(r, 1e-7);
  const int pts = read_output_points(r);
  return finish<IndexSetup>(r, issues, before, [&] { return IndexSetup{*p, *B, *w, steps, tol, pts}; });
}

inline std::optional<LemmaSetup> build_lemma(const json& params, Issues& issues) {
  const std::size_t before = issues.size();
  Reader r(params, "params", issues);
  const auto l = read_length(r);
  const auto p = read_profile(r, "profile", "k", l, issues);
  std::optional<InitialOperator> B;
  std::optional<Vector> w;
  if (p) {
    B = read_operator(r, "B", "lambda", p->dim());
    w = read_vector(r, "w", p->dim());
  } else {
    r.has("B"); r.has("lambda"); r.has("w");
  }
  const int steps = read_steps(r);
  const long long nodes = r.integer_or("nodes", 257);
  if (nodes < 3 || nodes % 2 == 0 || nodes > 1'000'001) r.issue("nodes", "must be odd, >= 3 and <= 1000001");
  const long long fields = r.integer_or("random_fields", 20);
  if (fields < 0 || fields > 100000) r.issue("random_fields", "must lie in [0, 100000]");
  const double pert = r.number_or("perturbation", 0.5);
  const double tol = read_tol(r, 1e-9);
  const double id_tol = r.number_or("identity_tol", 1e-7);
  const int pts = read_output_points(r);
  return finish<LemmaSetup>(r, issues, before, [&] {
    return LemmaSetup{*p, *B, *w, steps, static_cast<int>(nodes), static_cast<int>(fields), pert, tol, id_tol, pts};
  });
}

inline std::optional<RauchSetup> build_rauch(const json& params, Issues& issues) {
  const std::size_t before = issues.size();
  Reader r(params, "params", issues);
  const auto l = read_length(r);
  const auto pM = read_profile(r, "profile_M", "k_M", l, issues);
  const auto pM0 = read_profile(r, "profile_M0", "k_M0", l, issues, "n");
  check_dim(r, pM, pM0, "profile_M0");
  std::optional<InitialOperator> B, B0;
  std::optional<Vector> v, v0;
  if (pM) {
    B = read_operator(r, "B", "lambda", pM->dim());
    v = read_vector(r, "v", pM->dim());
  } else {
    r.has("B"); r.has("lambda"); r.has("v");
  }
  if (pM0) {
    B0 = read_operator(r, "B0", "lambda0", pM0->dim());
    v0 = read_vector(r, "v0", pM0->dim());
  } else {
    r.has("B0"); r.has("lambda0"); r.has("v0");
  }
  const double a = r.number_or("a", 0.0);
  const double b = r.number_or("b", 0.0);
  std::optional<double> t0;
  if (r.has("t0")) {
    t0 = r.number("t0");
    if (t0 && l && !(*t0 > 0.0 && *t0 <= *l)) r.issue("t0", "must lie in (0, l]");
  }
  const int steps = read_steps(r);
  const double tol = read_tol(r, kDefaultTol);
  const int pts = read_output_points(r);
  return finish<RauchSetup>(r, issues, before, [&] {
    return RauchSetup{RauchInstance{*pM, *pM0, *B, *B0, *v, *v0, a, b}, steps, tol, t0, pts};
  });
}

inline std::optional<DeterminantSetup> build_determinant(const json& params, Issues& issues) {
  const std::size_t before = issues.size();
  Reader r(params, "params", issues);
  const auto l = read_length(r);
  const auto p = read_profile(r, "profile", "k_M", l, issues);
  const auto k = r.number("k");
  const auto lambda = r.number("lambda");
  const double lambda_tilde = r.number_or("lambda_tilde", lambda.value_or(0.0));
  const double wedge = r.number_or("wedge", 1.0);
  const double wedge_tilde = r.number_or("wedge_tilde", 1.0);
  const int steps = read_steps(r);
  const double tol = read_tol(r, kDefaultTol);
  const double slope_tol = r.number_or("slope_tol", 1e-6);
  const int pts = read_output_points(r);
  return finish<DeterminantSetup>(r, issues, before, [&] {
    return DeterminantSetup{*p, *k, *lambda, lambda_tilde, wedge, wedge_tilde, steps, tol, slope_tol, pts};
  });
}

inline std::optional<QuadSetup> build_quad(const json& params, Issues& issues) {
  const std::size_t before = issues.size();
  Reader r(params, "params", issues);
  const auto pq = r.number("pq");
  const double arpq = r.number_or("angle_rpq", std::numbers::pi / 2);
  const double apqs = r.number_or("angle_pqs", std::numbers::pi / 2);
  QuadSetup s{std::nullopt, std::nullopt, 0, pq.value_or(1.0), arpq, apqs, 1e-10};
  const bool has_sweep = r.has("sweep");
  if (r.has("pr") || r.has("qs") || !has_sweep) {
    const auto pr = r.number("pr");
    const auto qs = r.number("qs");
    if (pq && pr && qs) s.single = QuadInstance{*pq, *pr, *qs, arpq, apqs};
  }
  if (has_sweep) {
    const json& sw = *r.get("sweep");
    if (!sw.is_object()) {
      r.issue("sweep", "expected an object {\"leg_max\", \"samples\"}");
    } else {
      Reader rs(sw, r.key_path("sweep"), issues);
      s.leg_max = rs.number("leg_max");
      const long long n = rs.integer_or("samples", 121);
      if (n < 2 || n > 1'000'000) rs.issue("samples", "must lie in [2, 1000000]");
      s.samples = static_cast<int>(n);
      rs.check_unknown();
    }
  }
  s.tol = read_tol(r, 1e-10);
  return finish<QuadSetup>(r, issues, before, [&] { return s; });
}

inline std::optional<CurveSetup> build_curve(const json& params, Issues& issues) {
  const std::size_t before = issues.size();
  Reader r(params, "params", issues);
  const auto kM = r.number("k_M");
  const auto kM0 = r.number("k_M0");
  CurveSetup s{kM.value_or(0.0), kM0.value_or(0.0), std::nullopt, 0, 1e-9};
  s.random_instances = static_cast<int>(r.integer_or("random_instances", 0));
  if (s.random_instances < 0 || s.random_instances > 1'000'000)
    r.issue("random_instances", "must lie in [0, 1000000]");
  if (r.has("f") || s.random_instances == 0) {
    CurveData c;
    const auto f = r.number("f");
    c.fprime = r.number_or("fprime", 0.0);
    c.lambda = r.number_or("lambda", 0.0);
    c.E_norm = r.number_or("E_norm", 1.0);
    c.E_dot_gamma = r.number_or("E_dot_gamma", 0.0);
    if (f) {
      c.f = *f;
      s.single = c;
    }
  }
  s.tol = read_tol(r, 1e-9);
  return finish<CurveSetup>(r, issues, before, [&] { return s; });
}

inline std::optional<VolumeSetup> build_volume(const json& params, Issues& issues) {
  const std::size_t before = issues.size();
  Reader r(params, "params", issues);
  const auto n = read_dimension(r, "n", 2);
  const auto kp = r.number("k_prime");
  const auto rad = r.number("r");
  const auto k = r.number("k");
  std::optional<ScalarFunction> tail;
  if (const json* t = r.get("tail")) tail = read_function(*t, r.key_path("tail"), issues);

  std::vector<double> grid;
  if (const json* g = r.get("R_grid"); !g) {
    r.issue("R_grid", "missing required key");
  } else if (!g->is_array() || g->empty()) {
    r.issue("R_grid", "expected a non-empty array of positive numbers");
  } else {
    for (const auto& x : *g) {
      if (!x.is_number() || !(x.get<double>() > 0.0)) {
        r.issue("R_grid", "expected a non-empty array of positive numbers");
        break;
      }
      grid.push_back(x.get<double>());
    }
  }
  const std::string mode_s = r.string_or("mode", "equal-area");
  VolumeMode mode = VolumeMode::equal_area;
  if (mode_s == "relaxed") mode = VolumeMode::relaxed_area;
  else if (mode_s != "equal-area") r.issue("mode", "expected \"equal-area\" or \"relaxed\"");
  std::optional<double> r_tilde;
  if (r.has("r_tilde")) {
    if (mode != VolumeMode::relaxed_area) r.issue("r_tilde", "only valid with mode \"relaxed\"");
    r_tilde = r.number("r_tilde");
  } else if (mode == VolumeMode::relaxed_area) {
    r.issue("r_tilde", "missing required key (mode \"relaxed\")");
  }
  double R_max = 0.0;
  for (double x : grid) R_max = std::max(R_max, x);
  const double rho_max = r.number_or("rho_max", rad.value_or(0.0) + R_max);
  const int steps = read_steps(r);
  const double tol = read_tol(r, 1e-8);
  r.check_unknown();
  if (issues.size() != before) return std::nullopt;

  try {
    WarpingFunction f = WarpingFunction::space_form(*kp, rho_max, *rad);
    bool truncated = false;
    if (tail) {
      CapExtension ext = build_cap_extension(*kp, *rad, *tail, rho_max);
      truncated = ext.truncated;
      f = ext.f;
    }
    VolumeModel m = r_tilde ? make_volume_model(*n, f, *k, *r_tilde) : make_volume_model(*n, f, *k);
    return VolumeSetup{std::move(m), grid, mode, steps, tol, truncated};
  } catch (const std::exception& e) {
    issues.push_back(std::string("params: ") + e.what());
    return std::nullopt;
  }
}

inline void validate_params(const std::string& tag, const json& params, Issues& issues) {
  if (tag == "focal") build_focal(params, issues);
  else if (tag == "index") build_index(params, issues);
  else if (tag == "lemma-a") build_lemma(params, issues);
  else if (tag == "rauch3") build_rauch(params, issues);
  else if (tag == "thm-d" || tag == "ratio") build_determinant(params, issues);
  else if (tag == "quad") build_quad(params, issues);
  else if (tag == "cor-c") build_curve(params, issues);
  else if (tag == "cor-e") build_volume(params, issues);
}

// ---------------------------------------------------------------------------
// Reporting helpers
// ---------------------------------------------------------------------------

struct Table {
  std::string header;
  std::vector<std::vector<std::string>> rows;

  std::string str() const {
    std::string s = header + "\n";
    for (const auto& row : rows) {
      for (std::size_t i = 0; i < row.size(); ++i) {
        if (i) s += ',';
        s += row[i];
      }
      s += '\n';
    }
    return s;
  }
};

/// Indices 0 = i_0 < ... < i_{P-1} = N spread evenly over a grid with N steps.
inline std::vector<std::size_t> sample_indices(std::size_t N, int points) {
  const std::size_t P = std::min<std::size_t>(static_cast<std::size_t>(points), N + 1);
  std::vector<std::size_t> idx;
  for (std::size_t j = 0; j < P; ++j) idx.push_back(P == 1 ? 0 : j * N / (P - 1));
  return idx;
}

inline json hypothesis_json(const HypothesisReport& h) {
  json checks = json::array();
  for (const auto& c : h.checks)
    checks.push_back({{"name", c.name}, {"passed", c.passed}, {"worst_margin", num(c.worst_margin)},
                      {"worst_t", num(c.worst_t)}});
  return {{"passed", h.all_passed()}, {"checks", checks}};
}

inline void set_status(json& s, int code) {
  static const char* names[] = {"holds", "violated", "hypothesis_failed", "input_error"};
  s["exit_code"] = code;
  s["status"] = names[code];
}

inline int comparison_code(const ComparisonReport& r) {
  switch (r.status) {
    case ComparisonStatus::hypothesis_failed: return kExitHypothesisFailed;
    case ComparisonStatus::violated: return kExitViolation;
    default: return kExitHolds;
  }
}

inline void attach_comparison(json& s, const ComparisonReport& r) {
  s["hypothesis"] = hypothesis_json(r.hypothesis);
  s["failed_checks"] = r.hypothesis.failures();
  s["warnings"] = r.warnings;
}

/// Linear interpolation of a sampled field at t.
inline Vector field_at(const SampledField& v, double t) {
  const double s = std::clamp(t / v.h(), 0.0, static_cast<double>(v.steps()));
  auto i = static_cast<std::size_t>(s);
  if (i >= v.steps()) i = v.steps() - 1;
  const double u = s - static_cast<double>(i);
  return (1.0 - u) * v.values[i] + u * v.values[i + 1];
}

// ---------------------------------------------------------------------------
// Runners
// ---------------------------------------------------------------------------

inline ExperimentResult run_focal(const FocalSetup& s) {
  ExperimentResult out;
  const FocalSearch f = first_focal_point(s.p, s.B, s.steps);
  const JacobiTrajectory traj = integrate_jacobi(s.p, s.B, s.steps);

  std::optional<double> analytic;
  bool analytic_known = false;
  if (auto k = s.p.constant_value(); k && s.B.scalar_value()) {
    analytic_known = true;
    analytic = space_form_focal_time(*k, *s.B.scalar_value());
    if (analytic && *analytic > s.p.length() * (1.0 + 1e-12)) analytic.reset();
  }

  Table t{"quantity,value", {}};
  t.rows.push_back({"t_star", f.t_star ? fmt(*f.t_star) : "none"});
  if (analytic_known) t.rows.push_back({"analytic_t_star", analytic ? fmt(*analytic) : "none"});
  out.csv = t.str();

  json& s_ = out.summary;
  s_["results"] = {{"t_star", opt_num(f.t_star)},
                   {"resolution_warning", f.resolution_warning},
                   {"wronskian_residual", num(traj.wronskian_residual())}};
  s_["focal_points"] = f.t_star ? json::array({*f.t_star}) : json::array();
  s_["warnings"] = f.note.empty() ? json::array() : json::array({f.note});
  int code = kExitHolds;
  if (analytic_known) {
    s_["results"]["analytic_t_star"] = opt_num(analytic);
    const bool agree = (analytic.has_value() == f.t_star.has_value()) &&
                       (!analytic || std::abs(analytic.value_or(0.0) - f.t_star.value_or(0.0)) <= 1e-8);
    s_["results"]["matches_closed_form"] = agree;
    if (!agree) code = kExitViolation;
  }
  set_status(s_, code);
  out.exit_code = code;
  return out;
}

inline ExperimentResult run_index(const IndexSetup& s) {
  ExperimentResult out;
  const SampledField v = jacobi_through_endpoint(s.p, s.B, s.w, s.steps);
  const IndexFormReport rep = index_form(s.p, s.B, v);
  const double boundary = v.derivatives.back().dot(v.values.back());
  const double residual = std::abs(rep.total - boundary);

  Table t{"t,norm_V,norm_Vprime", {}};
  for (std::size_t i : sample_indices(v.steps(), s.output_points)) {
    const double ti = i == v.steps() ? v.l : v.h() * static_cast<double>(i);
    t.rows.push_back({fmt(ti), fmt(v.values[i].norm()), fmt(v.derivatives[i].norm())});
  }
  out.csv = t.str();

  const int code = residual <= s.tol ? kExitHolds : kExitViolation;
  out.summary["results"] = {{"index_value", num(rep.total)},         {"boundary_term", num(rep.boundary_term)},
                            {"integral_term", num(rep.integral_term)}, {"endpoint_value", num(boundary)},
                            {"identity_residual", num(residual)},      {"tol", s.tol}};
  out.summary["focal_points"] = json::array();
  set_status(out.summary, code);
  out.exit_code = code;
  return out;
}

inline ExperimentResult run_lemma(const LemmaSetup& s, std::uint64_t seed) {
  ExperimentResult out;
  const IndexMinimizer min = minimize_index(s.p, s.B, s.w, s.nodes);
  const SampledField v = jacobi_through_endpoint(s.p, s.B, s.w, s.steps);
  const double jacobi_value = v.derivatives.back().dot(v.values.back());
  const double residual = std::abs(index_form(s.p, s.B, v).total - jacobi_value);

  double distance = 0.0;
  const PiecewiseField& W = min.minimizer;
  for (std::size_t i = 0; i < W.values.size(); ++i) {
    const double ti = i + 1 == W.values.size() ? W.l : W.h() * static_cast<double>(i);
    distance = std::max(distance, (W.values[i] - field_at(v, ti)).norm());
  }

  CounterRng rng(seed);
  double worst_gap = std::numeric_limits<double>::infinity();
  const int d = s.p.dim();
  for (int f = 0; f < s.random_fields; ++f) {
    PiecewiseField Z = W;
    for (std::size_t i = 0; i + 1 < Z.values.size(); ++i)
      for (int c = 0; c < d; ++c) Z.values[i](c) += s.perturbation * rng.uniform(-1.0, 1.0);
    worst_gap = std::min(worst_gap, index_form(s.p, s.B, Z).total - min.value);
  }

  Table t{"t,norm_W_min,norm_V", {}};
  for (std::size_t i : sample_indices(W.steps(), s.output_points)) {
    const double ti = i == W.steps() ? W.l : W.h() * static_cast<double>(i);
    t.rows.push_back({fmt(ti), fmt(W.values[i].norm()), fmt(field_at(v, ti).norm())});
  }
  out.csv = t.str();

  int code = kExitHolds;
  if (residual > s.identity_tol || (s.random_fields > 0 && worst_gap < -s.tol)) code = kExitViolation;
  out.summary["results"] = {{"min_value", num(min.value)},
                            {"jacobi_value", num(jacobi_value)},
                            {"identity_residual", num(residual)},
                            {"minimizer_distance", num(distance)},
                            {"nodes", s.nodes},
                            {"random_fields_checked", s.random_fields},
                            {"worst_random_gap", s.random_fields > 0 ? num(worst_gap) : json(nullptr)},
                            {"tol", s.tol}};
  out.summary["min_value"] = num(min.value);
  out.summary["identity_residual"] = num(residual);
  out.summary["focal_points"] = json::array();
  set_status(out.summary, code);
  out.exit_code = code;
  return out;
}

inline ExperimentResult run_rauch(const RauchSetup& s) {
  ExperimentResult out;
  const ComparisonReport r = rauch3_verify(s.in, s.steps, s.tol);

  Table t{"t,norm_V,norm_V0,ratio,margin", {}};
  for (std::size_t i : sample_indices(r.grid.size() - 1, s.output_points))
    t.rows.push_back({fmt(r.grid[i]), fmt(r.lhs[i]), fmt(r.rhs[i]), fmt(r.ratio[i]), fmt(r.lhs[i] - r.rhs[i])});
  out.csv = t.str();

  int code = comparison_code(r);
  const double slope = monotonicity_check(r);
  if (code == kExitHolds && slope < -s.tol) code = kExitViolation;

  json res = {{"min_margin", num(r.min_margin)},
              {"worst_t", num(r.worst_t)},
              {"ratio_min_slope", num(slope)},
              {"tol", s.tol}};
  if (s.t0) {
    const RigidityDiagnostics g = rigidity_diagnostics(r, *s.t0);
    res["rigidity"] = {{"t0", g.t0},
                       {"norm_gap", num(g.norm_gap)},
                       {"parallelism_residual", opt_num(g.parallelism_residual)},
                       {"curvature_gap", opt_num(g.curvature_gap)},
                       {"eigen_residual_M", opt_num(g.eigen_residual_M)},
                       {"eigen_residual_M0", opt_num(g.eigen_residual_M0)}};
  }
  out.summary["results"] = res;
  out.summary["focal_points"] = json::array();
  attach_comparison(out.summary, r);
  set_status(out.summary, code);
  out.exit_code = code;
  return out;
}

inline double logdet_identity_residual(const CurvatureProfile& p, double lambda, int steps, std::size_t last) {
  const JacobiTrajectory traj = integrate_jacobi(p, InitialOperator::scalar(p.dim(), lambda), steps);
  double worst = 0.0;
  for (std::size_t i = 1; i + 1 <= last && i + 1 < traj.t.size(); ++i) {
    const double dm = cmpgeo::detail::determinant(traj.A[i - 1]);
    const double dp = cmpgeo::detail::determinant(traj.A[i + 1]);
    if (!(dm > 0.0 && dp > 0.0)) continue;
    const double fd = (std::log(dp) - std::log(dm)) / (traj.t[i + 1] - traj.t[i - 1]);
    worst = std::max(worst, std::abs(logdet_derivative(traj, i) - fd));
  }
  return worst;
}

inline json determinant_results(const DeterminantSetup& s, const ComparisonReport& r, double slope) {
  const DeterminantDiagnostics& d = *r.determinant;
  return {{"min_margin", num(r.min_margin)},
          {"worst_t", num(r.worst_t)},
          {"ratio_max_slope", num(slope)},
          {"logdet_identity_residual", num(logdet_identity_residual(s.p, s.lambda, s.steps, r.grid.size() - 1))},
          {"parallelism_residual", num(d.parallelism_residual)},
          {"sectional_gap", num(d.sectional_gap)},
          {"lambda_gap", num(d.lambda_gap)},
          {"tol", s.tol},
          {"slope_tol", s.slope_tol}};
}

inline double max_ratio_slope(const ComparisonReport& r) {
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < r.grid.size(); ++i)
    worst = std::max(worst, (r.ratio[i + 1] - r.ratio[i]) / (r.grid[i + 1] - r.grid[i]));
  return worst;
}

inline ExperimentResult run_determinant(const DeterminantSetup& s, bool ratio_only) {
  ExperimentResult out;
  const ComparisonReport r =
      thmD_verify(s.p, s.k, s.lambda, s.lambda_tilde, s.wedge, s.wedge_tilde, s.steps, s.tol);
  const double slope = max_ratio_slope(r);

  Table t{ratio_only ? "t,ratio,slope" : "t,det_A,det_model,ratio", {}};
  if (!r.grid.empty()) {
    const std::size_t N = r.grid.size() - 1;
    for (std::size_t i : sample_indices(N, s.output_points)) {
      if (ratio_only) {
        const std::size_t j = i == N ? (N == 0 ? 0 : N - 1) : i;
        const double sl = N == 0 ? 0.0 : (r.ratio[j + 1] - r.ratio[j]) / (r.grid[j + 1] - r.grid[j]);
        t.rows.push_back({fmt(r.grid[i]), fmt(r.ratio[i]), fmt(sl)});
      } else {
        t.rows.push_back({fmt(r.grid[i]), fmt(r.lhs[i]), fmt(r.rhs[i]), fmt(r.ratio[i])});
      }
    }
  }
  out.csv = t.str();

  int code = comparison_code(r);
  if (ratio_only && code == kExitViolation && slope <= s.slope_tol) code = kExitHolds;
  if (code == kExitHolds && slope > s.slope_tol) code = kExitViolation;
  out.summary["results"] = determinant_results(s, r, slope);
  out.summary["focal_points"] = json::array();
  attach_comparison(out.summary, r);
  set_status(out.summary, code);
  out.exit_code = code;
  return out;
}

inline ExperimentResult run_quad(const QuadSetup& s) {
  ExperimentResult out;
  Table t{"pr,qs,rs_flat,rs_sphere,margin", {}};
  json res = json::object();
  int code = kExitHolds;
  if (s.single) {
    const QuadResult q = quad_compare(*s.single);
    t.rows.push_back({fmt(s.single->pr), fmt(s.single->qs), fmt(q.rs_flat), fmt(q.rs_sphere), fmt(q.margin)});
    res["rs_flat"] = num(q.rs_flat);
    res["rs_sphere"] = num(q.rs_sphere);
    res["margin"] = num(q.margin);
    if (q.margin < -s.tol) code = kExitViolation;
  }
  if (s.leg_max) {
    const QuadSweep sw = quad_threshold_sweep(s.pq, s.angle_rpq, s.angle_pqs, *s.leg_max, s.samples);
    for (std::size_t i = 0; i < sw.legs.size(); ++i)
      t.rows.push_back({fmt(sw.legs[i]), fmt(sw.legs[i]), fmt(sw.results[i].rs_flat), fmt(sw.results[i].rs_sphere),
                        fmt(sw.results[i].margin)});
    res["sweep_threshold"] = opt_num(sw.threshold);
    res["sweep_samples"] = sw.legs.size();
  }
  res["tol"] = s.tol;
  out.csv = t.str();
  out.summary["results"] = res;
  set_status(out.summary, code);
  out.exit_code = code;
  return out;
}

/// Valid random curve data for the constant-curvature speed comparison (no focal point
/// on the transversal geodesic of the kM0 model).
inline CurveData random_curve_data(CounterRng& rng, double kM0) {
  for (;;) {
    CurveData c;
    c.f = rng.uniform(0.0, 1.0);
    c.fprime = rng.uniform(-1.0, 1.0);
    c.lambda = rng.uniform(-0.5, 0.5);
    c.E_norm = rng.uniform(0.5, 1.5);
    c.E_dot_gamma = rng.uniform(-0.9, 0.9) * c.E_norm;
    const auto tf = space_form_focal_time(kM0, c.lambda / c.E_norm);
    if (!tf || *tf > 1.05 * c.f * c.E_norm) return c;
  }
}

inline ExperimentResult run_curve(const CurveSetup& s, std::uint64_t seed) {
  ExperimentResult out;
  Table t{"instance,speed_M,speed_M0,margin", {}};
  int code = s.kM <= s.kM0 ? kExitHolds : kExitHypothesisFailed;
  double worst = std::numeric_limits<double>::infinity();
  std::vector<CurveData> data;
  if (s.single) data.push_back(*s.single);
  CounterRng rng(seed);
  for (int i = 0; i < s.random_instances; ++i) data.push_back(random_curve_data(rng, s.kM0));
  for (std::size_t i = 0; i < data.size(); ++i) {
    const CurveSpeeds v = corollaryC_speed(s.kM, s.kM0, data[i]);
    t.rows.push_back({std::to_string(i), fmt(v.speed_M), fmt(v.speed_M0), fmt(v.margin)});
    worst = std::min(worst, v.margin);
  }
  if (code == kExitHolds && worst < -s.tol) code = kExitViolation;
  out.csv = t.str();
  json checks = json::array({{{"name", "curvature_order"}, {"passed", s.kM <= s.kM0}, {"worst_margin", s.kM0 - s.kM}}});
  out.summary["hypothesis"] = {{"passed", s.kM <= s.kM0}, {"checks", checks}};
  out.summary["failed_checks"] = s.kM <= s.kM0 ? json::array() : json::array({"curvature_order"});
  out.summary["results"] = {{"instances", data.size()}, {"min_margin", num(worst)}, {"tol", s.tol}};
  set_status(out.summary, code);
  out.exit_code = code;
  return out;
}

inline ExperimentResult run_volume(const VolumeSetup& s) {
  ExperimentResult out;
  const VolumeReport v = corollaryE_verify(s.model, s.R_grid, s.steps, s.mode, s.tol);
  const ComparisonReport& r = v.area;
  Table t{"R,area_M,area_model,area_margin,annulus_M,annulus_model,annulus_margin", {}};
  for (std::size_t i = 0; i < r.grid.size(); ++i)
    t.rows.push_back({fmt(r.grid[i]), fmt(r.lhs[i]), fmt(r.rhs[i]), fmt(r.rhs[i] - r.lhs[i]), fmt(v.annulus_M[i]),
                      fmt(v.annulus_model[i]), fmt(v.annulus_model[i] - v.annulus_M[i])});
  out.csv = t.str();
  const int code = comparison_code(r);
  const RTildeSolution side = corollaryE_solve_rtilde(s.model.n, s.model.f.cap()->k_prime, s.model.r, s.model.k);
  out.summary["results"] = {{"r", s.model.r},
                            {"r_tilde", s.model.r_tilde},
                            {"r_ge_r_tilde", side.r_ge_r_tilde},
                            {"min_area_margin", num(r.min_margin)},
                            {"worst_R", num(r.worst_t)},
                            {"min_annulus_margin", num(v.annulus_min_margin)},
                            {"tail_truncated", s.truncated},
                            {"tol", s.tol}};
  attach_comparison(out.summary, r);
  set_status(out.summary, code);
  out.exit_code = code;
  return out;
}

inline ExperimentConfig parse_config_object(const json& doc) {
  Issues issues;
  if (!doc.is_object()) throw ConfigError({"config: expected a JSON object"});
  Reader top(doc, "", issues);
  ExperimentConfig cfg;

  if (!top.has("experiment")) {
    top.issue("experiment", "missing required key");
  } else if (!doc.at("experiment").is_string()) {
    top.issue("experiment", "expected a string");
  } else {
    cfg.experiment = doc.at("experiment").get<std::string>();
    const auto& tags = experiment_tags();
    if (std::find(tags.begin(), tags.end(), cfg.experiment) == tags.end()) {
      std::string known;
      for (const auto& t : tags) known += (known.empty() ? "" : ", ") + t;
      top.issue("experiment", "unknown experiment '" + cfg.experiment + "' (expected one of: " + known + ")");
    }
  }
  if (top.has("params")) {
    if (!doc.at("params").is_object()) top.issue("params", "expected an object");
    else cfg.params = doc.at("params");
  }
  cfg.output = top.string_or("output", "-");
  const std::string format = top.string_or("format", "csv");
  if (format == "json") cfg.format = OutputFormat::json;
  else if (format != "csv") top.issue("format", "expected \"csv\" or \"json\"");
  if (top.has("seed")) {
    const json& s = doc.at("seed");
    if (s.is_number_unsigned()) cfg.seed = s.get<std::uint64_t>();
    else if (s.is_number_integer() && s.get<long long>() >= 0) cfg.seed = static_cast<std::uint64_t>(s.get<long long>());
    else top.issue("seed", "expected a non-negative integer");
  }
  top.check_unknown();
  if (issues.empty()) validate_params(cfg.experiment, cfg.params, issues);
  if (!issues.empty()) throw ConfigError(std::move(issues));
  return cfg;
}

}  // namespace detail

/// Parses and fully validates a config document. Throws ConfigError listing every violation.
inline ExperimentConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError({std::string("config: malformed JSON: ") + e.what()});
  }
  return detail::parse_config_object(doc);
}

inline ExperimentConfig parse_config(const json& doc) { return detail::parse_config_object(doc); }

inline ExperimentConfig parse_config(const char* text) { return parse_config(std::string(text)); }

inline json to_json(const ExperimentConfig& cfg) {
  return {{"experiment", cfg.experiment},
          {"params", cfg.params},
          {"output", cfg.output},
          {"format", cfg.format == OutputFormat::json ? "json" : "csv"},
          {"seed", cfg.seed}};
}

/// Command-line overrides; steps only applies to experiments that integrate, tol to those that compare.
inline void apply_overrides(ExperimentConfig& cfg, std::optional<long long> steps, std::optional<double> tol,
                            std::optional<std::uint64_t> seed) {
  if (steps && cfg.experiment != "quad" && cfg.experiment != "cor-c") cfg.params["steps"] = *steps;
  if (tol && cfg.experiment != "focal") cfg.params["tol"] = *tol;
  if (seed) cfg.seed = *seed;
  detail::Issues issues;
  detail::validate_params(cfg.experiment, cfg.params, issues);
  if (!issues.empty()) throw ConfigError(std::move(issues));
}

/// Runs a validated config. Input errors (including numerical domain errors) give exit 3,
/// a focal point that invalidates the no-focal-point hypothesis gives exit 2.
inline ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  using namespace detail;
  ExperimentResult out;
  Issues issues;
  try {
    const json& p = cfg.params;
    const std::string& e = cfg.experiment;
    if (e == "focal") {
      auto s = build_focal(p, issues);
      if (s) out = run_focal(*s);
    } else if (e == "index") {
      auto s = build_index(p, issues);
      if (s) out = run_index(*s);
    } else if (e == "lemma-a") {
      auto s = build_lemma(p, issues);
      if (s) out = run_lemma(*s, cfg.seed);
    } else if (e == "rauch3") {
      auto s = build_rauch(p, issues);
      if (s) out = run_rauch(*s);
    } else if (e == "thm-d" || e == "ratio") {
      auto s = build_determinant(p, issues);
      if (s) out = run_determinant(*s, e == "ratio");
    } else if (e == "quad") {
      auto s = build_quad(p, issues);
      if (s) out = run_quad(*s);
    } else if (e == "cor-c") {
      auto s = build_curve(p, issues);
      if (s) out = run_curve(*s, cfg.seed);
    } else if (e == "cor-e") {
      auto s = build_volume(p, issues);
      if (s) out = run_volume(*s);
    } else {
      issues.push_back("experiment: unknown experiment '" + e + "'");
    }
    if (!issues.empty()) throw ConfigError(issues);
  } catch (const FocalPointError& ex) {
    out = {};
    out.summary["focal_points"] = std::isfinite(ex.t_star()) ? json::array({ex.t_star()}) : json::array();
    out.summary["failed_checks"] = json::array({"no_focal_point"});
    out.summary["error"] = ex.what();
    set_status(out.summary, kExitHypothesisFailed);
    out.exit_code = kExitHypothesisFailed;
  } catch (const std::exception& ex) {
    out = {};
    out.summary["error"] = ex.what();
    set_status(out.summary, kExitInputError);
    out.exit_code = kExitInputError;
  }
  out.summary["experiment"] = cfg.experiment;
  out.summary["seed"] = cfg.seed;
  out.summary["config"] = to_json(cfg);
  return out;
}

}  // namespace cmpgeo::cli
