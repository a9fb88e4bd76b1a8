#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "elastcert/convexity.hpp"
#include "suite_models.hpp"

using namespace elastcert;
using elastcert::testing::suite_models;

TEST(DetConvexity, NegLogIsConvex) {
  const auto grid = log_grid();
  const ConvexityReport rep = det_convexity_check(neg_log_function(), 3, grid);
  EXPECT_EQ(rep.verdict, Verdict::Convex);
  EXPECT_EQ(rep.samples_used, 61);
  EXPECT_FALSE(rep.witness.has_value());
}

TEST(DetConvexity, LinearIsNotConvex) {
  const auto grid = log_grid();
  const ConvexityReport rep = det_convexity_check(power_function(1.0), 3, grid);
  ASSERT_EQ(rep.verdict, Verdict::NotConvex);
  ASSERT_TRUE(rep.witness.has_value());
  // slope condition fails: -f' = -1 at every grid point
  EXPECT_NEAR(rep.witness->value, -1.0, 1e-15);
  ASSERT_TRUE(rep.witness->grid_point.has_value());
}

TEST(DetConvexity, ReciprocalIsConvex) {
  // f = 1/s: f' = -1/s^2 <= 0 and f'' + (2/(3s)) f' = (4/3) s^-3 >= 0
  const auto grid = log_grid();
  const ConvexityReport rep = det_convexity_check(power_function(-1.0), 3, grid);
  EXPECT_EQ(rep.verdict, Verdict::Convex);
}

TEST(DetConvexity, EmptyGridInconclusive) {
  const std::vector<double> grid;
  const ConvexityReport rep = det_convexity_check(neg_log_function(), 3, grid);
  EXPECT_EQ(rep.verdict, Verdict::Inconclusive);
}

TEST(HessianScan, NegLogDetConvex) {
  DetFunctionModel m(neg_log_function());
  const ConvexityReport rep = hessian_psd_scan(m, 1000, 7);
  EXPECT_EQ(rep.verdict, Verdict::Convex);
  EXPECT_GE(rep.min_value, -1e-10);
}

TEST(HessianScan, SvkDichotomy) {
  SaintVenantKirchhoffModel convex(1.0, 1.0);
  const ConvexityReport ok = hessian_psd_scan(convex, 1000, 7);
  EXPECT_EQ(ok.verdict, Verdict::Convex);

  SaintVenantKirchhoffModel bad(1.0, -1.0);  // 3 lambda + 2 mu = -1 < 0
  const ConvexityReport nc = hessian_psd_scan(bad, 1000, 7);
  ASSERT_EQ(nc.verdict, Verdict::NotConvex);
  ASSERT_TRUE(nc.witness.has_value());
  // constant Hessian: lambda_min = mu/2 + 3 lambda/4 = -0.25 on the spherical axis
  EXPECT_NEAR(nc.witness->value, -0.25, 1e-12);
  const double replay =
      hessian_witness_value(bad, *nc.witness->point_c, *nc.witness->direction_h);
  EXPECT_NEAR(replay, nc.witness->value, 1e-10);
}

TEST(MonotonicityScan, ExplicitSvkPair) {
  // S2 = mu (C - I) for lambda = 0, so the pair (diag(4,1,1), I) gives
  // <S2(C1) - S2(C2), C1 - C2> = ||C1 - C2||^2 = 9.
  SaintVenantKirchhoffModel svk(1.0, 0.0);
  const SymMat3 c1 = SymMat3::diag(4, 1, 1);
  const SymMat3 c2 = SymMat3::identity();
  EXPECT_NEAR(monotonicity_witness_value(svk, c1, c2), 9.0, 1e-13);
  EXPECT_DOUBLE_EQ(monotonicity_witness_value(svk, c1, c1), 0.0);
}

TEST(MonotonicityScan, NegLogDetMonotone) {
  DetFunctionModel m(neg_log_function());
  const ConvexityReport rep = s2_monotonicity_scan(m, 1000, 11);
  EXPECT_EQ(rep.verdict, Verdict::Convex);
  EXPECT_GE(rep.min_value, -1e-10);
}

TEST(MonotonicityScan, MatchesHessianVerdictAcrossSuite) {
  for (const auto& nm : suite_models()) {
    const ConvexityReport hess = hessian_psd_scan(*nm.model, 1000, 21);
    const ConvexityReport mono = s2_monotonicity_scan(*nm.model, 1000, 21);
    EXPECT_EQ(hess.verdict == Verdict::Convex, nm.convex_in_c) << nm.label;
    EXPECT_EQ(mono.min_value >= -1e-8, hess.verdict == Verdict::Convex) << nm.label;
    if (mono.verdict == Verdict::NotConvex) {
      const double replay = monotonicity_witness_value(*nm.model, *mono.witness->point_c,
                                                       *mono.witness->point_c2);
      EXPECT_NEAR(replay, mono.witness->value, 1e-10) << nm.label;
    }
  }
}

TEST(LegendreHadamard, SvkAxialWitnessValue) {
  // restriction w(t) = W(diag(t,1,1)) = (1/4)(t^2-1)^2 has w''(t) = 3t^2 - 1
  SaintVenantKirchhoffModel svk(1.0, 0.0);
  const Mat3 f = Mat3::diag(0.1, 1, 1);
  const double q = legendre_hadamard_value(svk, f, Vec3::unit(0), Vec3::unit(0));
  EXPECT_NEAR(q, -0.97, 1e-12);

  // independent scalar oracle: central second difference of t -> W(diag(t,1,1))
  const double h = 1e-4;
  auto w = [&](double t) { return energy_from_gradient(svk, Mat3::diag(t, 1, 1)); };
  const double fd = (w(0.1 + h) - 2.0 * w(0.1) + w(0.1 - h)) / (h * h);
  EXPECT_NEAR(fd, -0.97, 1e-5);
}

TEST(LegendreHadamard, ScanFindsSvkWitness) {
  SaintVenantKirchhoffModel svk(1.0, 0.0);
  const auto fs = lh_default_f_samples(20, 31);
  const auto dirs = default_direction_samples(16);
  const ConvexityReport rep = legendre_hadamard_scan(svk, fs, dirs);
  ASSERT_EQ(rep.verdict, Verdict::NotConvex);
  ASSERT_TRUE(rep.witness.has_value());
  EXPECT_LE(rep.witness->value, -0.9);
  const double replay = legendre_hadamard_value(svk, *rep.witness->point_f,
                                                *rep.witness->dir_a, *rep.witness->dir_b);
  EXPECT_NEAR(replay, rep.witness->value, 1e-10);
}

TEST(LegendreHadamard, NegLogDetNearIdentityNoWitness) {
  DetFunctionModel m(neg_log_function());
  std::vector<Mat3> fs;
  Rng rng(37);
  fs.push_back(Mat3::identity());
  for (int i = 0; i < 50; ++i) {
    Mat3 f = Mat3::identity();
    for (int k = 0; k < 9; ++k) f.m[static_cast<std::size_t>(k)] += 0.05 * rng.uniform(-1.0, 1.0);
    fs.push_back(f);
  }
  const auto dirs = default_direction_samples(16);
  const ConvexityReport rep = legendre_hadamard_scan(m, fs, dirs);
  EXPECT_EQ(rep.verdict, Verdict::Inconclusive);
  EXPECT_FALSE(rep.witness.has_value());
  // along rank-one lines det(F + t a b^T) is affine in t, so the form is
  // 2 (b^T F^-1 a)^2 >= 0 with equality exactly at orthogonal dyads
  EXPECT_GE(rep.min_value, -1e-12);
}

TEST(LegendreHadamard, ZeroDirectionsSkipped) {
  SaintVenantKirchhoffModel svk(1.0, 0.0);
  const std::vector<Mat3> fs = {Mat3::identity()};
  const std::vector<DirectionPair> dirs = {{Vec3::zero(), Vec3::unit(0)}};
  const ConvexityReport rep = legendre_hadamard_scan(svk, fs, dirs);
  EXPECT_EQ(rep.samples_used, 0);
  EXPECT_EQ(rep.verdict, Verdict::Inconclusive);
}

TEST(LegendreHadamard, IndependenceFromConvexityInC) {
  // (a) convex in C yet rank-one violated
  SaintVenantKirchhoffModel svk(1.0, 1.0);
  EXPECT_EQ(hessian_psd_scan(svk, 500, 3).verdict, Verdict::Convex);
  const auto fs = lh_default_f_samples(20, 31);
  const auto dirs = default_direction_samples(16);
  const ConvexityReport lh = legendre_hadamard_scan(svk, fs, dirs);
  ASSERT_EQ(lh.verdict, Verdict::NotConvex);
  EXPECT_LE(lh.witness->value, -0.9);

  // (b) not convex in C yet rank-one convex near the identity:
  // mu = 1, lambda = -0.7 has 3 lambda + 2 mu < 0 but 2 mu + lambda > 0.
  SaintVenantKirchhoffModel semi(1.0, -0.7);
  EXPECT_EQ(hessian_psd_scan(semi, 500, 3).verdict, Verdict::NotConvex);
  std::vector<Mat3> near_identity;
  Rng rng(41);
  near_identity.push_back(Mat3::identity());
  for (int i = 0; i < 40; ++i) {
    Mat3 f = Mat3::identity();
    for (int k = 0; k < 9; ++k)
      f.m[static_cast<std::size_t>(k)] += 0.02 * rng.uniform(-1.0, 1.0);
    near_identity.push_back(f);
  }
  const ConvexityReport lh2 = legendre_hadamard_scan(semi, near_identity, dirs);
  EXPECT_EQ(lh2.verdict, Verdict::Inconclusive);
  EXPECT_FALSE(lh2.witness.has_value());
}

TEST(Davis, ScalarVerdicts) {
  const auto grid = log_grid();
  EXPECT_EQ(davis_check(power_function(2.0), grid).verdict, Verdict::Convex);
  EXPECT_EQ(davis_check(power_function(1.0), grid).verdict, Verdict::Convex);
  const ConvexityReport sqrt_rep = davis_check(power_function(0.5), grid);
  ASSERT_EQ(sqrt_rep.verdict, Verdict::NotConvex);
  ASSERT_TRUE(sqrt_rep.witness.has_value());
  EXPECT_LT(sqrt_rep.witness->value, 0.0);
}

TEST(Davis, AgreesWithHessianScan) {
  const auto grid = log_grid(1e-2, 1e2, 41);
  for (double p : {0.5, 1.0, 2.0, 3.0}) {
    const ConvexityReport davis = davis_check(power_function(p), grid);
    ValanisLandelModel vl(power_function(p));
    const ConvexityReport hess = hessian_psd_scan(vl, 400, 13);
    EXPECT_EQ(davis.verdict, hess.verdict) << "p=" << p;
  }
}

TEST(DetConvexityCrossValidation, PowerFamily) {
  const auto grid = log_grid();
  for (double p : {-2.0, -1.0, -0.5, 0.5, 1.0}) {
    const ScalarC2Function f = power_function(p);
    const ConvexityReport det_rep = det_convexity_check(f, 3, grid);
    DetFunctionModel model(f);
    const ConvexityReport hess_rep = hessian_psd_scan(model, 1000, 17);
    EXPECT_EQ(det_rep.verdict, hess_rep.verdict) << "p=" << p;
    EXPECT_EQ(det_rep.verdict == Verdict::Convex, p <= 0.0) << "p=" << p;
  }
}
