#include <gtest/gtest.h>

#include <cmath>

#include "lct/error.hpp"
#include "lct/go_probes.hpp"

using namespace lct;

namespace {

// Midpoint-rule ∫ g(x) dx over the square [y−h, y+h]², M² cells.
template <class G>
double square_quad(const Vec2& y, double h, int M, G g) {
  const double d = 2.0 * h / M;
  double s = 0.0;
  for (int i = 0; i < M; ++i)
    for (int j = 0; j < M; ++j) s += g(Vec2{y[0] - h + (i + 0.5) * d, y[1] - h + (j + 0.5) * d});
  return s * d * d;
}

struct ConstField final : ScalarField {
  double c;
  explicit ConstField(double v) : c(v) {}
  double operator()(const Vec2&, double) const override { return c; }
  Box support() const override { return Box{{-10.0, -10.0}, {10.0, 10.0}, -10.0, 10.0, false}; }
};

// Σ_{|α|≤3} ‖∂^α φ‖² by central differences, step d.
double h3_norm(const Mollifier& phi) {
  const double h = phi.width(), d = h / 60.0;
  const Vec2 y = phi.center();
  const int M = 140;
  const double lo = -1.1 * h;
  const double step = 2.2 * h / M;
  double acc = 0.0;
  auto D = [&](const Vec2& x, int ax, int ay) {
    // tensor central differences of orders ax, ay
    static const double c1[] = {-0.5, 0.0, 0.5}, c2[] = {1.0, -2.0, 1.0}, c3[] = {-0.5, 1.0, 0.0, -1.0, 0.5};
    auto w = [&](int ord, int k) -> double {
      if (ord == 0) return k == 0 ? 1.0 : 0.0;
      if (ord == 1) return (k >= -1 && k <= 1) ? c1[k + 1] : 0.0;
      if (ord == 2) return (k >= -1 && k <= 1) ? c2[k + 1] : 0.0;
      return (k >= -2 && k <= 2) ? c3[k + 2] : 0.0;
    };
    double s = 0.0;
    for (int i = -2; i <= 2; ++i)
      for (int j = -2; j <= 2; ++j) {
        const double wt = w(ax, i) * w(ay, j);
        if (wt != 0.0) s += wt * phi({x[0] + i * d, x[1] + j * d});
      }
    return s / std::pow(d, ax + ay);
  };
  for (int p = 0; p < M; ++p)
    for (int q = 0; q < M; ++q) {
      const Vec2 x{y[0] + lo + (p + 0.5) * step, y[1] + lo + (q + 0.5) * step};
      for (int ax = 0; ax <= 3; ++ax)
        for (int ay = 0; ax + ay <= 3; ++ay) {
          // multinomial count of distinct mixed partials
          const double mult = std::tgamma(ax + ay + 1.0) / (std::tgamma(ax + 1.0) * std::tgamma(ay + 1.0));
          const double v = D(x, ax, ay);
          acc += mult * v * v;
        }
    }
  return std::sqrt(acc * step * step);
}

SpaceTimeGrid grid(int nx = 33) {
  GridParams p;
  p.nx = nx;
  return SpaceTimeGrid(p);
}

}  // namespace

TEST(Mollifier, UnitL2ForAnyWidth) {
  for (double h : {0.05, 0.2, 0.7}) {
    const Mollifier phi({0.3, -0.2}, h);
    const double n2 = square_quad(phi.center(), h, 400, [&](const Vec2& x) { return phi(x) * phi(x); });
    EXPECT_NEAR(n2, 1.0, 1e-6) << "h=" << h;
  }
}

TEST(Mollifier, FirstMomentScalesWithWidth) {
  // ∫φ_h²|y−x| = h·∫ψ²|z|, and the unit-ball moment is below 1
  const Vec2 y{0.0, 0.0};
  auto moment = [&](double h) {
    const Mollifier phi(y, h);
    return square_quad(y, h, 400, [&](const Vec2& x) { return phi(x) * phi(x) * norm(x - y); });
  };
  const double C = moment(1.0);
  EXPECT_LT(C, 1.0);
  for (double h : {0.1, 0.25}) EXPECT_LE(moment(h), C * h * (1 + 1e-6));
}

TEST(Mollifier, H3NormGrowsLikeInverseCube) {
  const double a = h3_norm(Mollifier({0.0, 0.0}, 0.2));
  const double b = h3_norm(Mollifier({0.0, 0.0}, 0.1));
  EXPECT_GE(b / a, 6.0);
  EXPECT_LE(b / a, 10.0);
}

TEST(Mollifier, GradientMatchesDifferences) {
  const Mollifier phi({0.1, 0.2}, 0.3);
  const Vec2 x{0.2, 0.15};
  const double e = 1e-6;
  const Vec2 g = phi.gradient(x);
  EXPECT_NEAR(g[0], (phi({x[0] + e, x[1]}) - phi({x[0] - e, x[1]})) / (2 * e), 1e-5);
  EXPECT_NEAR(g[1], (phi({x[0], x[1] + e}) - phi({x[0], x[1] - e})) / (2 * e), 1e-5);
}

TEST(MollifierSquareFt, ZeroFrequencyIsOneAndMatchesQuadrature) {
  EXPECT_NEAR(mollifier_square_ft(0.2, 0.0), 1.0, 1e-9);
  const double h = 0.2, k = 17.0;
  const Mollifier phi({0.0, 0.0}, h);
  const double direct =
      square_quad({0.0, 0.0}, h, 400, [&](const Vec2& x) { return phi(x) * phi(x) * std::cos(k * x[0]); });
  EXPECT_NEAR(mollifier_square_ft(h, k), direct, 1e-6);
}

TEST(Amplitude, TransportOfConstantDamping) {
  const ConstField a(0.8);
  const Vec2 x{0.1, 0.0}, w{0.6, 0.8};
  EXPECT_EQ(amplitude(ProbeSide::Plus, nullptr, x, 1.0, w, 0.01), 1.0);
  EXPECT_NEAR(amplitude(ProbeSide::Plus, &a, x, 1.5, w, 0.01), std::exp(-0.4 * 1.5), 1e-12);
  EXPECT_NEAR(amplitude(ProbeSide::Minus, &a, x, 1.5, w, 0.01), std::exp(0.4 * 1.5), 1e-12);
}

TEST(GoLeadingTerm, UndampedIsPhaseTimesTransportedBump) {
  ProbeSpec s;
  s.omega = {0.6, 0.8};
  s.lambda = 12.0;
  s.phi = Mollifier({-0.5, 0.9}, 0.3);
  const GoLeadingTerm lead(s, nullptr, 0.01);
  for (double t : {0.4, 0.9, 1.3}) {
    const Vec2 x{0.05, -0.1};
    const cplx v = lead(x, t);
    const double th = s.lambda * (dot(x, s.omega) + t);
    const cplx expect = s.phi(x + t * s.omega) * cplx(std::cos(th), std::sin(th));
    EXPECT_NEAR(std::abs(v - expect), 0.0, 1e-14);
  }
}

TEST(ProbeTrace, ZeroWhenNoCharacteristicMeetsOmega) {
  const auto g = grid();
  ProbeSpec s;
  s.omega = {1.0, 0.0};
  s.lambda = 10.0;
  s.phi = Mollifier({0.0, 1.0}, 0.3);
  const auto f = probe_dirichlet_trace(g, s, nullptr);
  EXPECT_EQ(f.l2_norm(), 0.0);
  const auto rep = remainder(s, CoefficientPair::zero(g));
  EXPECT_EQ(rep.sup_r, 0.0);
  EXPECT_EQ(rep.sup_rt, 0.0);
}

TEST(ProbeTrace, ValidationRejections) {
  const auto g = grid();
  ProbeSpec s;
  s.omega = {1.0, 0.0};
  s.lambda = 10.0;
  s.phi = Mollifier({0.4, 0.0}, 0.2);
  EXPECT_TRUE(probe_violation(g, s, ProbeMode::QrStar).has_value());
  EXPECT_THROW(validate_probe(g, s, ProbeMode::Sharp), Rejected);
  EXPECT_FALSE(probe_violation(g, s, ProbeMode::Full).has_value());
  s.phi = Mollifier({1.25, 0.0}, 0.2);
  EXPECT_FALSE(probe_violation(g, s, ProbeMode::QrStar).has_value());
  s.lambda = 2.0 * g.lambda_max();
  EXPECT_THROW(validate_probe(g, s, ProbeMode::QrStar), Rejected);
  s.lambda = 10.0;
  s.omega = {1.0, 0.01};
  EXPECT_THROW(validate_probe(g, s, ProbeMode::QrStar), Rejected);
}

TEST(MatchedWavenumber, SatisfiesDiscreteDispersion) {
  const auto g = grid(65);
  const Vec2 w{0.6, 0.8};
  const double lam = 30.0;
  const double k = matched_wavenumber(g, lam, w);
  const double lhs = std::pow(2.0 / g.dt() * std::sin(0.5 * lam * g.dt()), 2);
  double rhs = 0.0;
  for (int c = 0; c < 2; ++c) rhs += std::pow(std::sin(0.5 * k * w[c] * g.dx()), 2);
  rhs *= 4.0 / (g.dx() * g.dx());
  EXPECT_NEAR(lhs, rhs, 1e-9 * lhs);
  EXPECT_GT(k, lam);  // leapfrog at CFL < 1 lags the continuum
}
