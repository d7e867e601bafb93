#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "lct/reconstruct.hpp"

using namespace lct;

namespace {

Box prior_box() { return Box{{-0.36, -0.36}, {0.36, 0.36}, 0.85, 1.65, false}; }

ReconstructionJob direct_job(const CoefficientPair& bg, const CoefficientPair& u) {
  ReconstructionJob job;
  job.background = &bg;
  job.unknown = &u;
  job.source = LightRaySource::Direct;
  job.prior = prior_box();
  return job;
}

}  // namespace

TEST(TheoreticalBound, ArithmeticOracles) {
  BoundParams p;
  EXPECT_NEAR(theoretical_bound(BoundKind::Thm1, 1e-4, p), std::sqrt(0.01 + 1.0 / std::log(1e4)), 1e-12);
  EXPECT_NEAR(theoretical_bound(BoundKind::Thm1, 1e-4, p), 0.34434, 5e-5);
  EXPECT_NEAR(theoretical_bound(BoundKind::Thm2, 1e-4, p), 0.4504, 5e-5);
  EXPECT_THROW(theoretical_bound(BoundKind::Thm1, 0.0, p), Rejected);
  EXPECT_THROW(theoretical_bound(BoundKind::Thm1, 1.0, p), Rejected);
}

TEST(TheoreticalBound, VanishesSlowlyAndMonotonically) {
  BoundParams p;
  double prev = 0.0;
  for (double e = 1e-300; e < std::exp(-1.0); e *= 10.0) {
    const double b = theoretical_bound(BoundKind::Thm1, e, p);
    EXPECT_GT(b, prev);
    prev = b;
  }
  EXPECT_LT(theoretical_bound(BoundKind::Thm1, 1e-300, p), 0.1);
  EXPECT_GT(theoretical_bound(BoundKind::Thm1, 1e-300, p), 0.01);  // logarithmic, not Hölder
}

TEST(FitBound, EnvelopeDominatesEveryPoint) {
  const std::vector<double> eps{1e-5, 3e-5, 1e-4, 3e-4, 1e-3};
  const std::vector<double> err{0.011, 0.02, 0.05, 0.09, 0.21};
  for (auto kind : {BoundKind::Thm1, BoundKind::Thm2}) {
    const BoundFit fit = fit_bound(kind, eps, err);
    EXPECT_GE(fit.shift, 1.0);
    for (std::size_t i = 0; i < eps.size(); ++i) EXPECT_GE(theoretical_bound(kind, eps[i], fit.params), err[i]);
  }
  EXPECT_DOUBLE_EQ(fit_bound(BoundKind::Thm2, eps, err).params.mu, 1.0);
}

TEST(JobRegion, OperatorMapping) {
  EXPECT_EQ(job_region(OperatorTag::Lambda), RegionId::QrStar);
  EXPECT_EQ(job_region(OperatorTag::Response), RegionId::QrSharp);
  EXPECT_EQ(job_region(OperatorTag::FullData), RegionId::Q);
}

TEST(BoxField, TrilinearReproducesAffineAndVanishesOutside) {
  ReconBox B;
  B.nx = 8;
  B.nt = 6;
  B.t0 = 0.5;
  B.T = 1.5;
  std::vector<double> v(B.size());
  auto affine = [](const Vec2& x, double t) { return 0.3 + 1.5 * x[0] - 0.7 * x[1] + 2.0 * t; };
  for (int k = 0; k < B.nt; ++k)
    for (int j = 0; j < B.nx; ++j)
      for (int i = 0; i < B.nx; ++i) v[(static_cast<std::size_t>(k) * B.nx + j) * B.nx + i] = affine(B.node(i, j), B.time(k));
  const BoxField f(B, v);
  for (const Vec2 x : {Vec2{-0.3, 0.1}, Vec2{0.2, 0.25}, Vec2{-0.45, -0.4}})
    for (double t : {0.6, 1.0, 1.7}) EXPECT_NEAR(f(x, t), affine(x, t), 1e-12);
  EXPECT_EQ(f({0.9, 0.0}, 1.0), 0.0);
  EXPECT_EQ(f({0.0, 0.0}, 2.5), 0.0);
}

TEST(ReconstructA, ZeroPerturbationHasNoSignal) {
  const SpaceTimeGrid g{GridParams{}};
  const auto bg = CoefficientPair::zero(g);
  const auto r = reconstruct_a(direct_job(bg, bg));
  EXPECT_TRUE(r.no_signal);
  EXPECT_EQ(r.flag, "no recoverable signal");
  double m = 0.0;
  for (double v : r.field) m = std::max(m, std::abs(v));
  EXPECT_LE(m, 1e-9);
}

TEST(ReconstructA, DirectSourceInversion) {
  const SpaceTimeGrid g{GridParams{}};
  const auto bg = CoefficientPair::zero(g);
  auto u = bg;
  u.a += make_bump(g, {{0.0, 0.0}, 1.25, 0.3, 0.35, 0.05}, RegionId::QrStar);
  const auto r = reconstruct_a(direct_job(bg, u));
  EXPECT_EQ(r.flag, "ok");
  EXPECT_LT(r.rel_l2(), 0.2);
  EXPECT_GT(r.linf_truth, 0.04);
  // nothing is reported outside the job region
  for (std::size_t i = 0; i < r.field.size(); ++i)
    if (!r.region_mask[i]) ASSERT_EQ(r.field[i], 0.0);
}

TEST(ReconstructB, DirectSourceInversionAndZeroCase) {
  const SpaceTimeGrid g{GridParams{}};
  const auto bg = CoefficientPair::zero(g);
  EXPECT_TRUE(reconstruct_b(direct_job(bg, bg), nullptr).no_signal);
  auto u = bg;
  u.b += make_bump(g, {{0.0, 0.0}, 1.25, 0.3, 0.35, 0.5}, RegionId::QrStar);
  const auto r = reconstruct_b(direct_job(bg, u), nullptr);
  EXPECT_LT(r.rel_hm1(), 0.25);
}

TEST(ReconstructA, RejectsLagrangeBackendInPipeline) {
  const SpaceTimeGrid g{GridParams{}};
  const auto bg = CoefficientPair::zero(g);
  auto u = bg;
  u.a += make_bump(g, {{0.0, 0.0}, 1.25, 0.3, 0.35, 0.05}, RegionId::QrStar);
  auto job = direct_job(bg, u);
  job.backend = FillBackend::Lagrange;
  EXPECT_THROW(reconstruct_a(job), Rejected);
}
