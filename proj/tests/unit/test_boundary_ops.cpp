#include <gtest/gtest.h>

#include <cmath>

#include "lct/boundary_ops.hpp"
#include "lct/error.hpp"
#include "lct/go_probes.hpp"

using namespace lct;

namespace {

SpaceTimeGrid grid(int nx) {
  GridParams p;
  p.nx = nx;
  return SpaceTimeGrid(p);
}

OperatorInput boundary_bump(const SpaceTimeGrid& g) {
  const BumpField b({{g.half_side(), 0.1}, 0.8, 0.15, 0.25, 1.0});
  BoundarySignal f(g, SignalKind::Dirichlet);
  for (int k = 0; k <= g.nt(); ++k)
    for (int id = 0; id < f.node_count(); ++id) f.re(k, id) = b(f.position(id), g.time(k));
  return {std::move(f), {}, {}, "bump"};
}

ProbeDictionarySpec small_dictionary() {
  ProbeDictionarySpec d;
  d.lambdas = {10.0};
  d.omega_count = 4;
  d.y_count = 1;
  d.h = 0.3;
  d.random_bumps = 2;
  return d;
}

}  // namespace

TEST(ApplyOperator, ZeroInputGivesZeroRecord) {
  const auto g = grid(17);
  const auto pair = CoefficientPair::zero(g);
  for (auto tag : {OperatorTag::Lambda, OperatorTag::Response, OperatorTag::FullData}) {
    const auto rec = apply_operator(tag, pair, {BoundarySignal(g, SignalKind::Dirichlet), {}, {}, "zero"});
    EXPECT_EQ(rec.dn.l2_norm(), 0.0);
    if (tag != OperatorTag::Lambda) {
      EXPECT_EQ(rec.uT.l2_norm(), 0.0);
      EXPECT_EQ(rec.utT.l2_norm(), 0.0);
    }
  }
}

TEST(ApplyOperator, DeterministicRecords) {
  const auto g = grid(33);
  auto pair = CoefficientPair::zero(g);
  pair.a = make_bump(g, {{0.0, 0.0}, 1.25, 0.2, 0.3, 0.5}, RegionId::QrStar);
  const auto in = boundary_bump(g);
  const auto r1 = apply_operator(OperatorTag::Response, pair, in);
  const auto r2 = apply_operator(OperatorTag::Response, pair, in);
  EXPECT_EQ(r1.dn.re_data(), r2.dn.re_data());
  EXPECT_EQ(r1.uT.data(), r2.uT.data());
}

TEST(ApplyOperator, RejectsNonzeroInitialTraceAndInitialData) {
  const auto g = grid(17);
  const auto pair = CoefficientPair::zero(g);
  BoundarySignal f(g, SignalKind::Dirichlet);
  for (int id = 0; id < f.node_count(); ++id) f.re(0, id) = 1.0;
  EXPECT_THROW(apply_operator(OperatorTag::Lambda, pair, {f, {}, {}, "bad"}), Rejected);
  OperatorInput with_u0{BoundarySignal(g, SignalKind::Dirichlet), SpaceField(g), {}, "u0"};
  EXPECT_THROW(apply_operator(OperatorTag::Lambda, pair, with_u0), Rejected);
  EXPECT_NO_THROW(apply_operator(OperatorTag::FullData, pair, with_u0));
}

TEST(ApplyOperator, GoProbeRecordNorm) {
  const auto g = grid(33);
  ProbeSpec p;
  p.lambda = 10.0;
  p.phi = Mollifier({1.25, 0.0}, 0.3);
  const BoundarySignal f = probe_dirichlet_trace(g, p, nullptr);
  const auto rec = apply_operator(OperatorTag::Lambda, CoefficientPair::zero(g), {f.real_part(), {}, {}, "go"});
  // regression pin from a reference run of this exact configuration
  const double pinned = 16.83613523485;
  EXPECT_NEAR(rec.dn.l2_norm(), pinned, 1e-6 * pinned);
}

TEST(EstimateDiffNorm, IdenticalPairsAndEmptyProbes) {
  const auto g = grid(17);
  auto pair = CoefficientPair::zero(g);
  const std::vector<OperatorInput> probes{boundary_bump(g)};
  EXPECT_LE(estimate_diff_norm(OperatorTag::Lambda, pair, pair, probes).eps, 1e-12);
  EXPECT_THROW(estimate_diff_norm(OperatorTag::Lambda, pair, pair, {}), Rejected);
}

TEST(EstimateDiffNorm, LinearInSmallPerturbation) {
  const auto g = grid(33);
  const auto bg = CoefficientPair::zero(g);
  const auto probes = make_probe_dictionary(g, small_dictionary());
  ASSERT_FALSE(probes.empty());
  double eps[2];
  for (int i = 0; i < 2; ++i) {
    auto p = bg;
    p.a = make_bump(g, {{0.0, 0.0}, 1.25, 0.2, 0.3, 0.01 * (i + 1)}, RegionId::QrStar);
    eps[i] = estimate_diff_norm(OperatorTag::Lambda, bg, p, probes).eps;
  }
  ASSERT_GT(eps[0], 0.0);
  EXPECT_GE(eps[1] / eps[0], 1.5);
  EXPECT_LE(eps[1] / eps[0], 2.5);
}

TEST(CloakingDemo, ZeroAmplitude) {
  const auto g = grid(17);
  const auto r = cloaking_demo(CoefficientPair::zero(g), 0.0);
  EXPECT_EQ(r.eps_cloak, 0.0);
  EXPECT_EQ(r.eps_visible, 0.0);
}

TEST(CloakingDemo, CloakInvisibleAndNonincreasingUnderRefinement) {
  CloakDemoSpec spec;
  spec.probes = small_dictionary();
  double cloak[2];
  int i = 0;
  for (int nx : {33, 65}) {
    const auto g = grid(nx);
    const auto r = cloaking_demo(CoefficientPair::zero(g), 0.1, spec);
    ASSERT_GT(r.eps_visible, 0.0);
    EXPECT_LE(r.eps_cloak, 1e-2 * r.eps_visible);
    cloak[i++] = r.eps_cloak;
  }
  EXPECT_LE(cloak[1], cloak[0]);
}
