// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "cmpgeo/cmpgeo.hpp"
#include "cmpgeo/experiment.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace cmpgeo;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond && ok) detail = what;
    ok = ok && cond;
  }
};

std::string fmt(const char* f, double a, double b = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

Vector vec1(double x) { return Vector::Constant(1, x); }

// 1. Boundary identity over focal-free random instances.
Outcome identity() {
  Outcome o;
  CounterRng rng(1001);
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    const int n = rng.uniform_int(2, 4);
    const auto inst = gen::focal_free_instance(rng, n, rng.uniform(0.5, 2.0));
    worst = std::max(worst, boundary_identity_residual(inst.p, inst.B, gen::random_vector(rng, n - 1), 4096));
  }
  o.require(worst <= 1e-7, fmt("worst residual %.3g", worst));
  o.detail = o.ok ? fmt("200 instances, worst residual %.3g", worst) : o.detail;
  return o;
}

// 2. Minimality of the discrete minimizer and its convergence to the Jacobi field.
Outcome lemma_minimality() {
  Outcome o;
  CounterRng rng(1002);
  double worst_gap = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 100; ++i) {
    const int n = rng.uniform_int(2, 4);
    const auto inst = gen::focal_free_instance(rng, n, rng.uniform(0.5, 2.0));
    const Vector w = gen::random_vector(rng, n - 1);
    const auto m = minimize_index(inst.p, inst.B, w, 129);
    for (int j = 0; j < 20; ++j) {
      PiecewiseField W = m.minimizer;
      const double scale = std::pow(10.0, rng.uniform(-4.0, 0.0));
      for (std::size_t k = 0; k + 1 < W.values.size(); ++k) W.values[k] += scale * gen::random_vector(rng, n - 1);
      worst_gap = std::min(worst_gap, index_form(inst.p, inst.B, W).total - m.value);
    }
  }
  o.require(worst_gap >= -1e-9, fmt("index(W) - min = %.3g", worst_gap));

  double worst_order = std::numeric_limits<double>::infinity();
  CounterRng rng2(1102);
  for (int i = 0; i < 5; ++i) {
    const int n = rng2.uniform_int(2, 4);
    const auto inst = gen::focal_free_instance(rng2, n, 1.0);
    const Vector w = gen::random_unit(rng2, n - 1);
    const auto v = jacobi_through_endpoint(inst.p, inst.B, w, 4096);
    std::vector<double> err;
    for (int nodes : {33, 65, 129, 257}) {
      const auto m = minimize_index(inst.p, inst.B, w, nodes);
      const std::size_t stride = 4096 / (nodes - 1);
      double e = 0.0;
      for (std::size_t k = 0; k < m.minimizer.values.size(); ++k)
        e = std::max(e, (m.minimizer.values[k] - v.values[k * stride]).cwiseAbs().maxCoeff());
      err.push_back(e);
    }
    for (std::size_t k = 0; k + 1 < err.size(); ++k) worst_order = std::min(worst_order, std::log2(err[k] / err[k + 1]));
  }
  o.require(worst_order >= 1.8, fmt("observed order %.3f", worst_order));
  if (o.ok) o.detail = fmt("worst gap %.3g, observed order %.3f", worst_gap, worst_order);
  return o;
}

// 3. Norm comparison on random valid instances and the closed-form instance.
Outcome rauch() {
  Outcome o;
  CounterRng rng(1003);
  double worst_margin = std::numeric_limits<double>::infinity(), worst_slope = worst_margin;
  for (int i = 0; i < 100; ++i) {
    const auto in = gen::rauch_instance(rng, rng.uniform_int(2, 4), rng.uniform(0.5, 1.5));
    const auto r = rauch3_verify(in);
    o.require(r.hypothesis.all_passed(), "generated instance violates a hypothesis");
    worst_margin = std::min(worst_margin, r.min_margin);
    worst_slope = std::min(worst_slope, monotonicity_check(r));
  }
  o.require(worst_margin >= -1e-7, fmt("min margin %.3g", worst_margin));
  o.require(worst_slope >= -1e-7, fmt("ratio slope %.3g", worst_slope));

  const RauchInstance fs{CurvatureProfile::constant(2, 1.5, 0.0), CurvatureProfile::constant(2, 1.5, 1.0),
                         InitialOperator::zero(1), InitialOperator::zero(1), vec1(1.0), vec1(1.0), 0.0, 0.0};
  const auto r = rauch3_verify(fs);
  double dev = 0.0;
  for (std::size_t i = 0; i < r.grid.size(); ++i)
    dev = std::max(dev, std::abs(r.lhs[i] - r.rhs[i] - (1.0 - std::cos(r.grid[i]))));
  o.require(dev <= 1e-9, fmt("closed-form deviation %.3g", dev));
  if (o.ok) o.detail = fmt("worst margin %.3g, closed-form deviation %.3g", worst_margin, dev);
  return o;
}

// 4. Index inequality chain with random t1.
Outcome chain() {
  Outcome o;
  CounterRng rng(1004);
  double worst = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 50; ++i) {
    const double l = rng.uniform(0.5, 1.5);
    const auto in = gen::rauch_instance(rng, rng.uniform_int(2, 4), l);
    const auto c = trick_chain(in, rng.uniform(0.05, 1.0) * l);
    worst = std::min({worst, c.index_W - c.index_trick, c.index_trick - c.index_W0});
  }
  o.require(worst >= -1e-7, fmt("worst step %.3g", worst));
  if (o.ok) o.detail = fmt("50 instances, worst step %.3g", worst);
  return o;
}

// 5. Determinant comparison, equality instance, ratio slopes and the log-det identity.
Outcome determinant() {
  Outcome o;
  CounterRng rng(1005);
  double worst_margin = std::numeric_limits<double>::infinity(), worst_slope = -worst_margin;
  int used = 0;
  while (used < 30) {
    const int n = rng.uniform_int(3, 4);
    const double k = rng.uniform(-0.5, 1.0);
    const auto p = gen::ricci_bounded_diagonal(rng, n, 1.0, k);
    const double lam = rng.uniform(-0.3, 0.3);
    if (!gen::focal_free(p, InitialOperator::scalar(n - 1, lam))) continue;
    ++used;
    const auto r = thmD_verify(p, k, lam, lam + rng.uniform(0.0, 0.3), 1.0, 1.0);
    o.require(r.hypothesis.all_passed(), "generated profile violates the Ricci bound");
    worst_margin = std::min(worst_margin, r.min_margin);
    worst_slope = std::max(worst_slope, ratio_monotonicity(p, k, lam, lam));
  }
  o.require(worst_margin >= -1e-7, fmt("det margin %.3g", worst_margin));
  o.require(worst_slope <= 1e-6, fmt("ratio slope %.3g", worst_slope));

  const auto eq = thmD_verify(CurvatureProfile::constant(4, 1.0, 0.7), 0.7, 0.2, 0.2, 1.0, 1.0);
  double dev = 0.0;
  for (std::size_t i = 0; i < eq.grid.size(); ++i) dev = std::max(dev, std::abs(eq.lhs[i] - eq.rhs[i]));
  o.require(dev <= 1e-9, fmt("equality deviation %.3g", dev));

  double logdet = 0.0;
  CounterRng rng2(1105);
  for (int i = 0; i < 10; ++i) {
    const auto inst = gen::focal_free_instance(rng2, rng2.uniform_int(2, 4), 1.0);
    const auto tr = integrate_jacobi(inst.p, inst.B, 4096);
    for (std::size_t j = 2; j + 2 <= tr.steps(); j += 7) {
      auto ld = [&](std::size_t m) { return std::log(std::abs(cmpgeo::detail::determinant(tr.A[m]))); };
      const double fd = (ld(j - 2) - 8.0 * ld(j - 1) + 8.0 * ld(j + 1) - ld(j + 2)) / (12.0 * tr.h);
      logdet = std::max(logdet, std::abs(logdet_derivative(tr, j) - fd));
    }
  }
  o.require(logdet <= 1e-5, fmt("log-det residual %.3g", logdet));
  if (o.ok)
    o.detail = fmt("worst margin %.3g, worst slope %.3g", worst_margin, worst_slope) +
               fmt(", log-det residual %.3g", logdet);
  return o;
}

// 6. Focal detection sweep, Wronskian and RK4 order.
Outcome focal() {
  Outcome o;
  CounterRng rng(1006);
  const double l = 3.0;
  double worst = 0.0, wr = 0.0;
  int found = 0;
  for (int i = 0; i < 400; ++i) {
    const double k = rng.uniform(-2.0, 2.0), lam = rng.uniform(-2.0, 2.0);
    const auto p = CurvatureProfile::constant(2, l, k);
    const auto B = InitialOperator::scalar(1, lam);
    const auto f = first_focal_point(p, B);
    auto a = space_form_focal_time(k, lam);
    if (a && *a > l) a.reset();
    if (f.t_star.has_value() != a.has_value()) {
      o.require(false, fmt("detection mismatch at k=%.6g lambda=%.6g", k, lam));
      continue;
    }
    if (a) {
      ++found;
      worst = std::max(worst, std::abs(*f.t_star - *a));
      wr = std::max(wr, integrate_jacobi(p.restricted(*a * 0.999), B).wronskian_residual());
    } else {
      wr = std::max(wr, integrate_jacobi(p, B).wronskian_residual());
    }
  }
  for (int i = 0; i < 50; ++i) {
    const int n = rng.uniform_int(2, 5);
    const auto p = gen::random_profile(rng, n, rng.uniform(0.5, 2.0));
    wr = std::max(wr, integrate_jacobi(p, InitialOperator(gen::random_symmetric(rng, n - 1))).wronskian_residual());
  }
  o.require(worst <= 1e-8, fmt("focal deviation %.3g", worst));
  o.require(wr <= 1e-8, fmt("Wronskian residual %.3g", wr));

  std::vector<double> err;
  for (int steps : {64, 128, 256}) {
    const auto tr = integrate_jacobi(CurvatureProfile::constant(2, 1.5, 1.3), InitialOperator::scalar(1, 0.4), steps);
    double e = 0.0;
    for (std::size_t i = 0; i < tr.t.size(); ++i) e = std::max(e, std::abs(tr.A[i](0, 0) - oracle::jacobi(1.3, 0.4, tr.t[i])));
    err.push_back(e);
  }
  const double order = std::min(std::log2(err[0] / err[1]), std::log2(err[1] / err[2]));
  o.require(order >= 3.8, fmt("RK4 order %.3f", order));
  if (o.ok)
    o.detail = fmt("%g roots, worst deviation %.3g", found, worst) + fmt(", Wronskian %.3g, order %.3f", wr, order);
  return o;
}

// 7. Quadrilateral sweep and worked instance.
Outcome quad() {
  Outcome o;
  double worst = std::numeric_limits<double>::infinity();
  const double h = std::numbers::pi / 2;
  for (double pq : {0.5, 1.0, 2.0})
    for (int i = 0; i < 50; ++i)
      for (int j = 0; j < 50; ++j)
        worst = std::min(worst, quad_compare({pq, 0.5 * i / 49.0, 0.5 * j / 49.0, h, h}).margin);
  o.require(worst >= -1e-10, fmt("sweep margin %.3g", worst));
  const auto q = quad_compare({1.0, 0.3, 0.3, h, h});
  const double ref = oracle::quad_sphere(1.0, 0.3, 0.3, h, h);
  o.require(std::abs(q.rs_flat - 1.0) <= 1e-12, fmt("rs_flat %.12g", q.rs_flat));
  o.require(std::abs(q.rs_sphere - ref) <= 1e-9, fmt("rs_sphere deviation %.3g", q.rs_sphere - ref));
  if (o.ok) o.detail = fmt("sweep min margin %.3g, rs_sphere %.10f", worst, q.rs_sphere);
  return o;
}

// 8. Curve speed comparison.
Outcome curve() {
  Outcome o;
  CounterRng rng(1008);
  double worst = std::numeric_limits<double>::infinity();
  int used = 0;
  while (used < 100) {
    const double kM0 = rng.uniform(-1.0, 1.5), kM = kM0 - rng.uniform(0.0, 1.5);
    CurveData c{rng.uniform(0.0, 1.0), rng.uniform(-1.0, 1.0), rng.uniform(-0.5, 0.5), rng.uniform(0.5, 1.5), 0.0};
    c.E_dot_gamma = (used % 2 == 0 ? 0.0 : rng.uniform(-0.9, 0.9)) * c.E_norm;
    const auto tf = space_form_focal_time(kM0, c.lambda / c.E_norm);
    if (tf && *tf <= c.f * c.E_norm) continue;
    ++used;
    worst = std::min(worst, corollaryC_speed(kM, kM0, c).margin);
  }
  o.require(worst >= -1e-9, fmt("speed margin %.3g", worst));
  const auto eq = corollaryC_speed(0.0, 1.0, {0.3, 0.0, 0.0, 1.0, 0.0});
  o.require(std::abs(eq.speed_M0 - std::cos(0.3)) <= 1e-10, fmt("equidistant speed %.12g", eq.speed_M0));
  if (o.ok) o.detail = fmt("worst margin %.3g, equidistant speed %.10f", worst, eq.speed_M0);
  return o;
}

// 9. Volume comparison on random cap extensions, equality models and the relaxed mode.
Outcome volume() {
  Outcome o;
  CounterRng rng(1009);
  double worst = std::numeric_limits<double>::infinity(), relaxed = worst;
  for (int i = 0; i < 20; ++i) {
    const int n = rng.uniform_int(2, 4);
    const double k = rng.uniform(-0.5, 0.5), kp = k + rng.uniform(0.0, 1.0), r = rng.uniform(0.2, 0.8);
    const double a = rng.uniform(0.0, 0.5), w = rng.uniform(0.5, 3.0), ph = rng.uniform(0.0, 6.0);
    const auto ext = build_cap_extension(kp, r, [=](double x) { return k + a * (1.0 + std::sin(w * x + ph)); }, r + 1.5);
    const std::vector<double> grid{0.1, 0.4, 0.8, 1.2, 1.5};
    const auto v = corollaryE_verify(make_volume_model(n, ext.f, k), grid);
    o.require(v.area.status == ComparisonStatus::holds, fmt("random model %g: status failed (n=%g)", i, n));
    worst = std::min({worst, v.area.min_margin, v.annulus_min_margin});

    const auto sol = corollaryE_solve_rtilde(n, kp, r, k);
    const double rt = sol.r_tilde + rng.uniform(0.0, 1.0) * (r - sol.r_tilde);
    const auto vr = corollaryE_verify(make_volume_model(n, ext.f, k, rt), grid, kDefaultSteps, VolumeMode::relaxed_area);
    o.require(vr.area.status == ComparisonStatus::holds, fmt("relaxed model %g failed (n=%g)", i, n));
    relaxed = std::min({relaxed, vr.area.min_margin, vr.annulus_min_margin});
  }
  o.require(worst >= -1e-8, fmt("area/annulus margin %.3g", worst));
  o.require(relaxed >= -1e-8, fmt("relaxed margin %.3g", relaxed));

  double dev = 0.0;
  for (double k : {-0.7, 0.0, 0.4, 1.0})
    for (int n : {2, 3, 4}) {
      const auto v = corollaryE_verify(make_volume_model(n, WarpingFunction::space_form(k, 1.5, 0.5), k), {0.3, 0.6, 1.0});
      for (std::size_t i = 0; i < v.area.grid.size(); ++i)
        dev = std::max({dev, std::abs(v.area.lhs[i] - v.area.rhs[i]), std::abs(v.annulus_M[i] - v.annulus_model[i])});
    }
  o.require(dev <= 1e-10, fmt("equality deviation %.3g", dev));
  if (o.ok) o.detail = fmt("worst margin %.3g, relaxed %.3g", worst, relaxed) + fmt(", equality deviation %.3g", dev);
  return o;
}

// 10. CLI goldens, exit codes and reruns.
Outcome cli_goldens() {
  namespace fs = std::filesystem;
  using namespace cmpgeo::cli;
  Outcome o;
  const fs::path root = CMPGEO_SOURCE_DIR;
  const std::vector<std::pair<std::string, int>> cases{
      {"focal", 0},  {"index", 0}, {"lemma-a", 0}, {"rauch3", 0}, {"rauch3-bad-hypothesis", 2}, {"thm-d", 0},
      {"ratio", 0},  {"quad", 0},  {"cor-c", 0},   {"cor-e", 0},  {"cor-e-relaxed", 0}};
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  std::vector<std::string> tags;
  for (const auto& [name, code] : cases) {
    const auto cfg = parse_config(slurp(root / "configs" / (name + ".json")));
    tags.push_back(cfg.experiment);
    const auto a = run_experiment(cfg), b = run_experiment(cfg);
    o.require(a.exit_code == code, name + ": exit " + std::to_string(a.exit_code));
    o.require(a.csv == b.csv && a.summary.dump() == b.summary.dump(), name + ": rerun differs");
    o.require(a.csv == slurp(root / "tests" / "golden" / (name + ".csv")), name + ": golden mismatch");
  }
  for (const auto& t : experiment_tags())
    o.require(std::find(tags.begin(), tags.end(), t) != tags.end(), "no golden for " + t);
  bool config_error = false;
  try {
    parse_config(R"({"experiment": "focal", "params": {"k": 1.0}})");
  } catch (const ConfigError&) {
    config_error = true;
  }
  o.require(config_error, "missing key accepted");
  const auto fail = run_experiment(parse_config(R"({"experiment": "quad", "params": {"pq": 1.0, "pr": 0.8, "qs": 0.8, "angle_rpq": 0.5, "angle_pqs": 0.5}})"));
  o.require(fail.exit_code == kExitViolation, "quad violation exit " + std::to_string(fail.exit_code));
  if (o.ok) o.detail = std::to_string(cases.size()) + " goldens, exit codes 0/1/2/3 exercised";
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double limit_s;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "boundary identity", 30, identity},         {2, "index minimality", 60, lemma_minimality},
      {3, "norm comparison", 60, rauch},              {4, "index inequality chain", 30, chain},
      {5, "determinant comparison", 60, determinant}, {6, "focal detection", 30, focal},
      {7, "quadrilateral", 10, quad},                 {8, "curve speed", 10, curve},
      {9, "volume comparison", 30, volume},           {10, "cli", 60, cli_goldens},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.ok = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > c.limit_s) {
      o.ok = false;
      o.detail += fmt(" (runtime %.1f s over %.0f s)", secs, c.limit_s);
    }
    std::printf("[%s] criterion %2d %-24s %6.2f s  %s\n", o.ok ? "PASS" : "FAIL", c.id, c.name, secs, o.detail.c_str());
    std::fflush(stdout);
    failed += o.ok ? 0 : 1;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
