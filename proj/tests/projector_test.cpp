#include <gtest/gtest.h>

#include <cmath>

#include "esoc/harness.hpp"
#include "esoc/projector.hpp"
#include "oracles.hpp"

namespace esoc {
namespace {

using testing::Rng;

void expect_point_near(const AmbientPoint& got, const AmbientPoint& want, double tol) {
  ASSERT_EQ(got.z().size(), want.z().size());
  ASSERT_EQ(got.w().size(), want.w().size());
  for (std::size_t i = 0; i < got.z().size(); ++i) EXPECT_NEAR(got.z()[i], want.z()[i], tol) << "z" << i;
  for (std::size_t j = 0; j < got.w().size(); ++j) EXPECT_NEAR(got.w()[j], want.w()[j], tol) << "w" << j;
}

double distance(const AmbientPoint& a, const AmbientPoint& b) { return (a - b).norm(); }

AmbientPoint draw_case(harness::InstanceSampler& sampler, std::size_t p, std::size_t q,
                       ProjectionCase c) {
  for (;;) {
    if (auto a = sampler.draw(ConeDims(p, q), c)) return *a;
  }
}

TEST(Classify, Examples) {
  EXPECT_EQ(classify(AmbientPoint({2.0, 3.0}, {1.0})), ProjectionCase::dual_w_zero);
  EXPECT_EQ(classify(AmbientPoint({-1.0, -2.0}, {2.5})), ProjectionCase::primal_w_zero);
  EXPECT_EQ(classify(AmbientPoint({1.0, -0.5}, {0.0, 2.0})), ProjectionCase::general);
}

TEST(Classify, ZeroNormBlockOverlapPicksCase1) {
  EXPECT_EQ(classify(AmbientPoint({-1.0, 2.0}, {0.0})), ProjectionCase::dual_w_zero);
}

TEST(ProjectL, PointInLIsFixed) {
  const auto r = project_L(AmbientPoint({2.0, 3.0}, {1.0}));
  EXPECT_EQ(r.case_tag, ProjectionCase::dual_w_zero);
  expect_point_near(r.proj_L, AmbientPoint({2.0, 3.0}, {1.0}), 0.0);
  expect_point_near(r.proj_M_neg, AmbientPoint({0.0, 0.0}, {0.0}), 0.0);
  EXPECT_EQ(r.lambda, 0.0);
}

TEST(ProjectL, SecondOrderConeValue) {
  const auto r = project_L(AmbientPoint({0.0}, {3.0, 4.0}));
  EXPECT_EQ(r.case_tag, ProjectionCase::general);
  expect_point_near(r.proj_L, AmbientPoint({2.5}, {1.5, 2.0}), 1e-15);
  EXPECT_NEAR(r.lambda, 1.0, 1e-15);
}

TEST(ProjectL, GeneralCaseExample) {
  // lambda = 5/3, shift ||w||/(lambda+1) = 3/4
  const AmbientPoint a({1.0, -0.5}, {0.0, 2.0});
  const auto r = project_L(a);
  EXPECT_EQ(r.case_tag, ProjectionCase::general);
  EXPECT_NEAR(r.lambda, 5.0 / 3.0, 1e-14);
  expect_point_near(r.proj_L, AmbientPoint({1.0, 0.75}, {0.0, 0.75}), 1e-14);
  expect_point_near(r.proj_M_neg, AmbientPoint({0.0, 1.25}, {0.0, -1.25}), 1e-14);
  EXPECT_TRUE(r.certificate.passes(1e-14));

  // nearest point among 10^5 random points of L
  Rng rng(31);
  const double best = distance(a, r.proj_L);
  for (int k = 0; k < 100000; ++k) {
    const AmbientPoint s = rng.sample_L(2, 2, 3.0);
    ASSERT_LE(best, distance(a, s) + 1e-12);
  }
}

TEST(ProjectL, EveryMethodGivesTheSameProjection) {
  const AmbientPoint a({0.3, -0.2, 0.1}, {0.5, -0.4});
  const auto reference = project_L(a);
  for (auto m : {SolveMethod::newton, SolveMethod::picard, SolveMethod::bisection,
                 SolveMethod::enumeration}) {
    SolverConfig cfg;
    cfg.method = m;
    const auto r = project_L(a, cfg);
    expect_point_near(r.proj_L, reference.proj_L, 1e-11);
    ASSERT_TRUE(r.trace.has_value());
    EXPECT_EQ(r.trace->method, m);
  }
}

TEST(ProjectL, SolverFailurePropagates) {
  SolverConfig cfg;
  cfg.method = SolveMethod::picard;
  // general case, but <e,|z|> = 1.5 >= ||w|| = 1
  try {
    project_L(AmbientPoint({0.9, -0.6}, {1.0}), cfg);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::solver_failure);
  }
}

TEST(ProjectM, Examples) {
  const AmbientPoint in_m({1.0, 1.0}, {1.5});
  expect_point_near(project_M(in_m).proj_M, in_m, 0.0);

  const auto r = project_M(AmbientPoint({-2.0, -3.0}, {-1.0}));
  expect_point_near(r.of_negated.proj_L, AmbientPoint({2.0, 3.0}, {1.0}), 0.0);
  expect_point_near(r.proj_M, AmbientPoint({0.0, 0.0}, {0.0}), 0.0);
}

TEST(ProjectM, NearestPointAmongRandomPointsOfM) {
  Rng rng(32);
  for (int trial = 0; trial < 5; ++trial) {
    const AmbientPoint a = rng.point(3, 2);
    const AmbientPoint pm = project_M(a).proj_M;
    EXPECT_TRUE(in_M(pm, 1e-12).member);
    const double best = distance(a, pm);
    for (int k = 0; k < 100000; ++k) {
      ASSERT_LE(best, distance(a, rng.sample_M(3, 2)) + 1e-12);
    }
  }
}

TEST(ProjectSoc, Examples) {
  auto r = project_soc(AmbientPoint({0.0}, {3.0, 4.0}));
  expect_point_near(r.proj_L, AmbientPoint({2.5}, {1.5, 2.0}), 1e-15);
  EXPECT_DOUBLE_EQ(r.lambda, 1.0);

  r = project_soc(AmbientPoint({5.0}, {0.0, 0.0}));
  expect_point_near(r.proj_L, AmbientPoint({5.0}, {0.0, 0.0}), 0.0);

  r = project_soc(AmbientPoint({-1.0}, {1.0, 0.0}));
  EXPECT_EQ(r.case_tag, ProjectionCase::primal_w_zero);
  expect_point_near(r.proj_L, AmbientPoint({0.0}, {0.0, 0.0}), 0.0);

  EXPECT_THROW(project_soc(AmbientPoint({1.0, 2.0}, {1.0})), Error);
}

TEST(ProjectSoc, LambdaMatchesClosedForm) {
  const auto r = project_soc(AmbientPoint({0.25}, {1.0}));
  EXPECT_DOUBLE_EQ(r.lambda, 0.75 / 1.25);
  EXPECT_NEAR(project_L(AmbientPoint({0.25}, {1.0})).lambda, r.lambda, 1e-15);
}

TEST(ProjectorProperties, CertificatesPassAcrossCases) {
  harness::InstanceSampler sampler(33);
  Rng rng(34);
  for (auto c : {ProjectionCase::dual_w_zero, ProjectionCase::primal_w_zero, ProjectionCase::general}) {
    for (int trial = 0; trial < 1000; ++trial) {
      const AmbientPoint a = draw_case(sampler, rng.integer(1, 8), rng.integer(1, 8), c);
      const auto r = project_L(a);
      EXPECT_EQ(r.case_tag, c);
      EXPECT_TRUE(r.certificate.passes(1e-10));
      if (c == ProjectionCase::dual_w_zero) {
        for (double v : r.proj_M_neg.w()) EXPECT_EQ(v, 0.0);
      } else if (c == ProjectionCase::primal_w_zero) {
        for (double v : r.proj_L.w()) EXPECT_EQ(v, 0.0);
      } else {
        EXPECT_GT(r.lambda, 0.0);
      }
    }
  }
}

TEST(ProjectorProperties, IdempotentNonexpansiveHomogeneous) {
  Rng rng(35);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t p = rng.integer(1, 8);
    const std::size_t q = rng.integer(1, 8);
    const AmbientPoint a = rng.point(p, q);
    const AmbientPoint b = rng.point(p, q);
    const AmbientPoint pa = project_L(a).proj_L;
    const AmbientPoint pb = project_L(b).proj_L;

    EXPECT_LE(distance(project_L(pa).proj_L, pa), 1e-10 * (1.0 + pa.norm()));
    EXPECT_LE(distance(pa, pb), distance(a, b) * (1.0 + 1e-12));
    for (double t : {1e-3, 1.0, 1e3}) {
      const AmbientPoint scaled = project_L(t * a).proj_L;
      EXPECT_LE(distance(scaled, t * pa), 1e-10 * t * (1.0 + pa.norm()));
    }
    const auto r = project_L(a);
    EXPECT_LE(std::abs(dot(r.proj_L, r.proj_M_neg)), 1e-10 * (1.0 + a.norm() * a.norm()));
  }
}

TEST(ProjectorProperties, TinyNormBlockStillCertified) {
  Rng rng(36);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> w = rng.ball(3, 1.0);
    const double len = stable_norm(w);
    for (double& x : w) x *= 1e-15 / len;
    const AmbientPoint a(rng.uniform_vector(rng.integer(1, 5), -1.0, 1.0), w);
    const auto r = project_L(a);
    EXPECT_TRUE(r.certificate.passes(1e-10));
  }
  // exactly at the overlap the two boundary formulas coincide
  const auto r = project_L(AmbientPoint({0.0, 0.0}, {0.0}));
  EXPECT_EQ(r.certificate.max_residual(), 0.0);
}

TEST(ProjectorProperties, SocAgreesWithGeneralFormula) {
  Rng rng(37);
  for (int trial = 0; trial < 2000; ++trial) {
    const AmbientPoint a = rng.point(1, rng.integer(1, 8));
    const auto general = project_L(a);
    const auto soc = project_soc(a);
    EXPECT_EQ(general.case_tag, soc.case_tag);
    EXPECT_LE(distance(general.proj_L, soc.proj_L), 1e-12 * std::max(1.0, a.norm()));
  }
}

}  // namespace
}  // namespace esoc
