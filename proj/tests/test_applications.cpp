#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "cmpgeo/cmpgeo.hpp"
#include "support/oracles.hpp"

using namespace cmpgeo;

constexpr double kHalfPi = std::numbers::pi / 2;

TEST(Quad, DegenerateLegs) {
  const auto q = quad_compare({1.0, 0.0, 0.0, kHalfPi, kHalfPi});
  EXPECT_NEAR(q.rs_flat, 1.0, 1e-15);
  EXPECT_NEAR(q.rs_sphere, 1.0, 1e-15);
  EXPECT_NEAR(q.margin, 0.0, 1e-15);
}

TEST(Quad, WorkedInstance) {
  const auto q = quad_compare({1.0, 0.3, 0.3, kHalfPi, kHalfPi});
  const double c = std::cos(0.3), s = std::sin(0.3);
  const double ref = std::acos(c * c * std::cos(1.0) + s * s);
  EXPECT_NEAR(q.rs_flat, 1.0, 1e-15);
  EXPECT_NEAR(q.rs_sphere, ref, 1e-9);
  EXPECT_NEAR(q.rs_sphere, oracle::quad_sphere(1.0, 0.3, 0.3, kHalfPi, kHalfPi), 1e-9);
  EXPECT_NEAR(q.rs_sphere, 0.9516, 1e-4);
  EXPECT_NEAR(q.margin, 0.0484, 1e-4);
}

TEST(Quad, MatchesTrigOracles) {
  CounterRng rng(5);
  for (int i = 0; i < 500; ++i) {
    const double pq = rng.uniform(0.1, 2.0), pr = rng.uniform(0.0, 1.0), qs = rng.uniform(0.0, 1.0);
    const double a = rng.uniform(0.2, 2.9), b = rng.uniform(0.2, 2.9);
    const auto q = quad_compare({pq, pr, qs, a, b});
    EXPECT_NEAR(q.rs_flat, oracle::quad_flat(pq, pr, qs, a, b), 1e-12);
    EXPECT_NEAR(q.rs_sphere, oracle::quad_sphere(pq, pr, qs, a, b), 1e-8);
  }
}

TEST(Quad, SmallLegSweep) {
  for (double pq : {0.5, 1.0, 2.0})
    for (int i = 0; i < 50; ++i)
      for (int j = 0; j < 50; ++j) {
        const double pr = 0.5 * i / 49.0, qs = 0.5 * j / 49.0;
        EXPECT_GE(quad_compare({pq, pr, qs, kHalfPi, kHalfPi}).margin, -1e-10) << pq << " " << pr << " " << qs;
      }
}

TEST(Quad, ReflectionSymmetry) {
  CounterRng rng(6);
  for (int i = 0; i < 200; ++i) {
    const double pq = rng.uniform(0.1, 2.0), pr = rng.uniform(0.0, 1.0), qs = rng.uniform(0.0, 1.0);
    const double a = rng.uniform(0.2, 2.9), b = rng.uniform(0.2, 2.9);
    EXPECT_NEAR(quad_compare({pq, pr, qs, a, b}).margin, quad_compare({pq, qs, pr, b, a}).margin, 1e-12);
  }
}

TEST(Quad, Errors) {
  EXPECT_THROW(quad_compare({3.5, 0.1, 0.1, kHalfPi, kHalfPi}), std::domain_error);
  EXPECT_THROW(quad_compare({1.0, -0.1, 0.1, kHalfPi, kHalfPi}), std::invalid_argument);
  EXPECT_THROW(quad_compare({1.0, 0.1, 0.1, 0.0, kHalfPi}), std::invalid_argument);
  EXPECT_THROW(quad_compare({1.0, 0.1, 0.1, kHalfPi, std::numbers::pi}), std::invalid_argument);
}

TEST(Quad, ThresholdSweep) {
  const auto s = quad_threshold_sweep(1.0, kHalfPi, kHalfPi, 1.2, 121);
  ASSERT_EQ(s.legs.size(), 121u);
  EXPECT_DOUBLE_EQ(s.legs.front(), 0.0);
  EXPECT_DOUBLE_EQ(s.legs.back(), 1.2);
  for (std::size_t i = 0; i < s.legs.size(); ++i) {
    if (s.threshold && s.legs[i] > *s.threshold) break;
    EXPECT_GE(s.results[i].margin, -1e-10);
  }
}

TEST(CurveSpeed, Equidistant) {
  const auto v = corollaryC_speed(0.0, 1.0, {0.3, 0.0, 0.0, 1.0, 0.0});
  EXPECT_NEAR(v.speed_M, 1.0, 1e-15);
  EXPECT_NEAR(v.speed_M0, std::cos(0.3), 1e-10);
  EXPECT_NEAR(v.speed_M0, 0.9553, 1e-4);
}

TEST(CurveSpeed, ZeroTransversal) {
  const auto v = corollaryC_speed(-1.0, 1.0, {0.0, 0.4, 0.2, 1.0, 0.3});
  EXPECT_DOUBLE_EQ(v.speed_M, 1.0);
  EXPECT_DOUBLE_EQ(v.speed_M0, 1.0);
}

TEST(CurveSpeed, SameCurvature) {
  const auto v = corollaryC_speed(0.5, 0.5, {0.4, 0.2, -0.1, 1.2, 0.3});
  EXPECT_NEAR(v.speed_M, v.speed_M0, 1e-10);
}

TEST(CurveSpeed, Hyperbolic) {
  // Equidistant to a geodesic in the hyperbolic plane: speed cosh d.
  const auto v = corollaryC_speed(-1.0, 0.0, {0.3, 0.0, 0.0, 1.0, 0.0});
  EXPECT_NEAR(v.speed_M, std::cosh(0.3), 1e-14);
  EXPECT_NEAR(v.speed_M0, 1.0, 1e-14);
}

TEST(CurveSpeed, RandomDraws) {
  CounterRng rng(7);
  for (int i = 0; i < 100; ++i) {
    const double kM0 = rng.uniform(-1.0, 1.5), kM = kM0 - rng.uniform(0.0, 1.5);
    CurveData c{rng.uniform(0.0, 1.0), rng.uniform(-1.0, 1.0), rng.uniform(-0.5, 0.5), rng.uniform(0.5, 1.5), 0.0};
    c.E_dot_gamma = rng.uniform(-0.9, 0.9) * c.E_norm;
    const auto tf = space_form_focal_time(kM0, c.lambda / c.E_norm);
    if (tf && *tf <= c.f * c.E_norm) continue;
    EXPECT_GE(corollaryC_speed(kM, kM0, c).margin, -1e-9);
  }
}

TEST(CurveSpeed, Preconditions) {
  EXPECT_THROW(corollaryC_speed(0.0, 1.0, {0.3, 0.0, 0.0, 1.0, 1.0}), std::invalid_argument);
  EXPECT_THROW(corollaryC_speed(0.0, 1.0, {0.3, 0.0, 0.0, 0.0, 0.0}), std::invalid_argument);
  EXPECT_THROW(corollaryC_speed(0.0, 1.0, {-0.3, 0.0, 0.0, 1.0, 0.0}), std::invalid_argument);
  EXPECT_THROW(corollaryC_speed(0.0, 1.0, {2.0, 0.0, 0.0, 1.0, 0.0}), FocalPointError);
}

TEST(RTilde, FlatModel) {
  EXPECT_NEAR(corollaryE_solve_rtilde(2, 1.0, 0.5, 0.0).r_tilde, std::sin(0.5), 1e-12);
  EXPECT_TRUE(corollaryE_solve_rtilde(2, 1.0, 0.5, 0.0).r_ge_r_tilde);
}

TEST(RTilde, SameCurvature) {
  for (double k : {-1.0, 0.0, 0.5})
    EXPECT_NEAR(corollaryE_solve_rtilde(3, k, 0.7, k).r_tilde, 0.7, 1e-12);
}

TEST(RTilde, AnalyticInverse) {
  EXPECT_NEAR(corollaryE_solve_rtilde(2, 1.0, 0.8, 0.25).r_tilde, 2.0 * std::asin(std::sin(0.8) / 2.0), 1e-12);
}

TEST(RTilde, ForwardEvaluation) {
  CounterRng rng(8);
  for (int i = 0; i < 200; ++i) {
    const double k = rng.uniform(-2.0, 1.0), kp = k + rng.uniform(0.0, 1.0), r = rng.uniform(0.05, 1.2);
    const auto sol = corollaryE_solve_rtilde(3, kp, r, k);
    EXPECT_NEAR(oracle::sn(k, sol.r_tilde), oracle::sn(kp, r), 1e-13);
    EXPECT_TRUE(sol.r_ge_r_tilde);
  }
}

TEST(RTilde, Errors) {
  EXPECT_THROW(corollaryE_solve_rtilde(2, 1.0, 1.4, 4.0), std::domain_error);
  EXPECT_THROW(corollaryE_solve_rtilde(1, 1.0, 0.5, 0.0), std::invalid_argument);
  EXPECT_THROW(corollaryE_solve_rtilde(2, 1.0, 0.0, 0.0), std::invalid_argument);
}

TEST(Volume, CapAgainstPlane) {
  const auto m = make_volume_model(2, WarpingFunction::space_form(1.0, 1.5, 0.5), 0.0);
  const auto v = corollaryE_verify(m, {0.7});
  EXPECT_NEAR(v.area.lhs[0], 2 * std::numbers::pi * std::sin(1.2), 1e-12);
  EXPECT_NEAR(v.area.rhs[0], 2 * std::numbers::pi * (std::sin(0.5) + 0.7), 1e-11);
  EXPECT_NEAR(v.area.lhs[0], 5.8561, 1e-4);
  EXPECT_NEAR(v.area.rhs[0], 7.4106, 1e-4);
  EXPECT_EQ(v.area.status, ComparisonStatus::holds);
  EXPECT_NEAR(v.annulus_M[0], 2 * std::numbers::pi * (std::cos(0.5) - std::cos(1.2)), 1e-12);
}

TEST(Volume, EqualityForSpaceForm) {
  for (double k : {-0.5, 0.0, 0.8}) {
    const auto m = make_volume_model(3, WarpingFunction::space_form(k, 2.0, 0.6), k);
    const auto v = corollaryE_verify(m, {0.2, 0.6, 1.0, 1.4});
    EXPECT_EQ(v.area.status, ComparisonStatus::holds);
    for (std::size_t i = 0; i < v.area.grid.size(); ++i) {
      EXPECT_NEAR(v.area.lhs[i], v.area.rhs[i], 1e-10);
      EXPECT_NEAR(v.annulus_M[i], v.annulus_model[i], 1e-10);
    }
  }
}

TEST(Volume, CapExtensionTail) {
  const auto ext = build_cap_extension(1.0, 0.5, [](double) { return 0.25; }, 1.5);
  const auto m = make_volume_model(2, ext.f, 0.25);
  const auto v = corollaryE_verify(m, {0.2, 0.5, 1.0});
  EXPECT_EQ(v.area.status, ComparisonStatus::holds);
  EXPECT_EQ(v.area.grid.size(), 3u);
  EXPECT_GE(v.area.min_margin, -1e-8);
  EXPECT_GE(v.annulus_min_margin, -1e-8);
}

TEST(Volume, AnnulusMatchesQuadratureOrder) {
  // Simpson on the area curve converges at fourth order to the exact annulus volume.
  const auto m = make_volume_model(2, WarpingFunction::space_form(1.0, 1.5, 0.5), 0.0);
  const double exact = 2 * std::numbers::pi * (std::cos(0.5) - std::cos(1.5));
  const double e1 = std::abs(corollaryE_verify(m, {1.0}, 8).annulus_M[0] - exact);
  const double e2 = std::abs(corollaryE_verify(m, {1.0}, 16).annulus_M[0] - exact);
  EXPECT_GE(std::log2(e1 / e2), 3.8);
}

TEST(Volume, RelaxedMode) {
  const auto f = WarpingFunction::space_form(1.0, 1.5, 0.5);
  const auto m = make_volume_model(2, f, 0.0, 0.49);
  const auto v = corollaryE_verify(m, {0.3, 0.9}, 4096, VolumeMode::relaxed_area);
  EXPECT_EQ(v.area.status, ComparisonStatus::holds);
  const auto bad = corollaryE_verify(make_volume_model(2, f, 0.0, 0.47), {0.3}, 4096, VolumeMode::relaxed_area);
  EXPECT_EQ(bad.area.status, ComparisonStatus::hypothesis_failed);
  EXPECT_FALSE(bad.area.hypothesis.find("boundary_area_order")->passed);
}

TEST(Volume, CurvatureHypothesisFails) {
  const auto ext = build_cap_extension(1.0, 0.5, [](double) { return -0.2; }, 1.5);
  const auto v = corollaryE_verify(make_volume_model(2, ext.f, 0.0), {0.5});
  EXPECT_EQ(v.area.status, ComparisonStatus::hypothesis_failed);
  EXPECT_FALSE(v.area.hypothesis.find("radial_curvature_lower_bound")->passed);
}

TEST(Volume, DomainWarnings) {
  const auto m = make_volume_model(2, WarpingFunction::space_form(1.0, 1.0, 0.5), 0.0);
  const auto v = corollaryE_verify(m, {0.2, 0.8});
  EXPECT_EQ(v.area.grid.size(), 1u);
  EXPECT_FALSE(v.area.warnings.empty());
  EXPECT_THROW(corollaryE_verify(m, {}), std::invalid_argument);
  EXPECT_THROW(corollaryE_verify(m, {-0.1}), std::invalid_argument);
}
