// Acceptance harness: `lct_acceptance N` runs criterion N (1..10) and prints one
// PASS/FAIL line. Tolerances are pinned below and are not configurable.

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_complex.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "lct/boundary_ops.hpp"
#include "lct/continuation.hpp"
#include "lct/error.hpp"
#include "lct/lightray.hpp"
#include "lct/reconstruct.hpp"
#include "oracles.hpp"

using namespace lct;

namespace {

// pinned tolerances
constexpr double kOrderLo = 3.0, kOrderHi = 5.0;
constexpr double kEnergyChange = 0.20;
constexpr double kRemainderLo = 0.4, kRemainderHi = 0.7;
constexpr double kRemainderDtLo = 0.7, kRemainderDtHi = 1.4;
constexpr double kCloakRatio = 1e-2;
constexpr double kCloakFieldFactor = 10.0;
constexpr double kSliceTol = 1e-3;
constexpr double kRayATol = 0.05, kRayBTol = 0.10;
constexpr double kReconATol = 0.20, kReconBTol = 0.25;
constexpr double kHm1Tol = 1e-10;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

SpaceTimeGrid grid(int nx) {
  GridParams p;
  p.nx = nx;
  return SpaceTimeGrid(p);
}

double plane_wave_error(const SpaceTimeGrid& g, const oracles::PlaneWave& w) {
  const auto d = oracles::plane_wave_data(g, w);
  const CoefficientPair p = CoefficientPair::zero(g);
  const auto tr = solve_forward(p, {&d.f, &d.u0, &d.u1, nullptr}, {.keep_field = false, .track_norms = false});
  return oracles::interior_error(tr, w);
}

Outcome solver_order() {
  const oracles::PlaneWave w;
  std::vector<double> err;
  for (int nx : {33, 65, 129}) err.push_back(plane_wave_error(grid(nx), w));
  const double r1 = err[0] / err[1], r2 = err[1] / err[2];
  const bool ok = r1 >= kOrderLo && r1 <= kOrderHi && r2 >= kOrderLo && r2 <= kOrderHi;
  return {ok, fmt("errors %.3e %.3e %.3e, ratios %.3f %.3f", err[0], err[1], err[2], r1, r2)};
}

// Plane wave with full Cauchy data, and a damped potential problem driven by a boundary bump.
double energy_ratio(int nx, bool damped) {
  const SpaceTimeGrid g = grid(nx);
  const SolveOptions o{.keep_field = false, .track_norms = true};
  if (!damped) {
    const auto d = oracles::plane_wave_data(g, oracles::PlaneWave{});
    const CoefficientPair p = CoefficientPair::zero(g);
    return energy_report(solve_forward(p, {&d.f, &d.u0, &d.u1, nullptr}, o), &d.f, &d.u0, &d.u1).ratio;
  }
  CoefficientPair p = CoefficientPair::zero(g);
  p.a = make_bump(g, {{0.0, 0.0}, 1.25, 0.3, 0.6, 0.8}, RegionId::Q);
  p.b = make_bump(g, {{0.05, -0.05}, 1.0, 0.25, 0.5, 2.0}, RegionId::Q);
  BoundarySignal f(g, SignalKind::Dirichlet);
  const BumpField src({{g.half_side(), 0.1}, 0.6, 0.2, 0.4, 1.0});
  for (int k = 0; k <= g.nt(); ++k)
    for (int id = 0; id < f.node_count(); ++id) f.re(k, id) = src(f.position(id), g.time(k));
  return energy_report(solve_forward(p, {&f, nullptr, nullptr, nullptr}, o), &f, nullptr, nullptr).ratio;
}

Outcome energy_stability() {
  bool ok = true;
  std::string detail;
  for (bool damped : {false, true}) {
    const double coarse = energy_ratio(65, damped), fine = energy_ratio(129, damped);
    const double change = std::abs(fine - coarse) / coarse;
    ok = ok && change < kEnergyChange;
    detail += fmt("%s %.4f -> %.4f (change %.1f%%) ", damped ? "damped" : "plane", coarse, fine, 100.0 * change);
  }
  return {ok, detail};
}

Outcome remainder_decay() {
  // φ fixed across λ so the ratio isolates the λ dependence.
  const SpaceTimeGrid g = grid(129);
  CoefficientPair p = CoefficientPair::zero(g);
  p.a = make_bump(g, {{0.0, 0.0}, 1.25, 0.3, 0.35, 0.05}, RegionId::QrStar);
  bool ok = true;
  std::string detail;
  for (auto side : {ProbeSide::Plus, ProbeSide::Minus}) {
    RemainderReport r[2];
    const double lams[2] = {10.0, 20.0};
    for (int i = 0; i < 2; ++i) {
      ProbeSpec s;
      s.omega = {1.0, 0.0};
      s.lambda = lams[i];
      s.phi = Mollifier({1.25, 0.0}, 0.7, 2);
      s.side = side;
      r[i] = remainder(s, p);
    }
    const double q = r[1].sup_r / r[0].sup_r, qt = r[1].sup_rt / r[0].sup_rt;
    ok = ok && q >= kRemainderLo && q <= kRemainderHi && qt >= kRemainderDtLo && qt <= kRemainderDtHi;
    detail += fmt("%s: r %.3f rt %.3f ", side == ProbeSide::Plus ? "plus" : "minus", q, qt);
  }
  return {ok, detail};
}

Outcome cloaking() {
  const SpaceTimeGrid g = grid(129);
  const CoefficientPair bg = CoefficientPair::zero(g);
  CloakDemoSpec cs;
  const auto ra = cloaking_demo(bg, 0.1, cs);
  cs.perturb_b = true;
  const auto rb = cloaking_demo(bg, 0.1, cs);
  const double qa = ra.eps_cloak / ra.eps_visible, qb = rb.eps_cloak / rb.eps_visible;

  // Solver tolerance: relative interior L² error of the plane-wave oracle on this grid.
  const oracles::PlaneWave w;
  double ref = 0.0;
  for (std::size_t q = 0; q < g.slice_size(); ++q)
    if (!g.is_boundary(q)) ref += std::pow(w(g.node(q), g.T()), 2);
  const double tol = plane_wave_error(g, w) / std::sqrt(ref * g.dx() * g.dx());

  // Boundary inputs: the default probe dictionary plus bumps switched on right after t = 0.
  std::vector<BoundarySignal> inputs;
  for (auto& in : make_probe_dictionary(g, ProbeDictionarySpec{})) inputs.push_back(std::move(in.f));
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int j = 0; j < 4; ++j) {
    BoundarySignal f(g, SignalKind::Dirichlet);
    const double rt = 0.05 + 0.05 * j;
    const BumpField src({{g.half_side() * (j % 2 ? -1.0 : 1.0), 0.3 * u(rng)}, 0.02 + rt, 0.15, rt, 1.0});
    for (int k = 0; k <= g.nt(); ++k)
      for (int id = 0; id < f.node_count(); ++id) f.re(k, id) = src(f.position(id), g.time(k));
    inputs.push_back(std::move(f));
  }
  const auto omega_mask = region_mask(g, RegionId::CloakOmega);
  const auto cone_mask = region_mask(g, RegionId::Cloak);
  double worst = 0.0, worst_cone = 0.0;
  for (const auto& f : inputs) {
    const auto tr = solve_forward(bg, {&f, nullptr, nullptr, nullptr});
    const double m = tr.field().max_abs();
    if (m == 0.0) continue;
    const auto& v = tr.field().data();
    double c = 0.0, cc = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (omega_mask[i]) c = std::max(c, std::abs(v[i]));
      if (cone_mask[i]) cc = std::max(cc, std::abs(v[i]));
    }
    worst = std::max(worst, c / m);
    worst_cone = std::max(worst_cone, cc / m);
  }
  const bool ok = qa <= kCloakRatio && qb <= kCloakRatio && worst <= kCloakFieldFactor * tol;
  return {ok, fmt("a %.2e/%.2e b %.2e/%.2e; cloak field %.2e vs 10x tol %.2e over %zu inputs "
                  "(uncut cone, informational: %.2e)",
                  ra.eps_cloak, ra.eps_visible, rb.eps_cloak, rb.eps_visible, worst, kCloakFieldFactor * tol,
                  inputs.size(), worst_cone)};
}

Outcome fourier_slice_identity() {
  // two overlapping bumps, not radially symmetric
  const SpaceTimeGrid g = grid(129);
  SumField f;
  f.add({{0.08, -0.05}, 1.2, 0.25, 0.35, 1.0});
  f.add({{-0.1, 0.12}, 1.4, 0.2, 0.3, -0.6});
  const Box box{{-0.5, -0.5}, {0.5, 0.5}, 0.0, g.T(), false};
  const DirectTransform oracle(f, box, 96, 192);
  double worst = 0.0;
  int count = 0;
  for (int k = 0; k < 8; ++k) {
    const double th = 2.0 * M_PI * k / 8;
    RayGrid R = make_ray_grid({std::cos(th), std::sin(th)}, g.r() / 2.0 + g.T(), 0.05);
    fill_ray_grid(R, f, g.T(), 0.005);
    for (int q = 1; q <= 8; ++q) {
      const double rad = 0.5 * q, phi = th + 0.7;
      const SpectralSample s = fourier_slice(R, {rad * std::cos(phi), rad * std::sin(phi)}, g.r(), g.T());
      if (!s.in_E) return {false, "lattice point outside E"};
      const cplx ref = oracle(s.xi, s.tau);
      worst = std::max(worst, std::abs(s.value - ref) / std::abs(ref));
      ++count;
    }
  }
  return {worst < kSliceTol, fmt("max relative error %.3e over %d points", worst, count)};
}

Outcome continuation_bounds() {
  using MpReal = boost::multiprecision::cpp_bin_float_100;
  using MpComplex = boost::multiprecision::cpp_complex_100;
  const std::vector<std::function<MpComplex(const MpComplex&)>> fns{
      [](const MpComplex& z) { return exp(z - MpComplex(1)); },
      [](const MpComplex& z) { return MpComplex(1) / (MpComplex(2) - z); },
      [](const MpComplex& z) { return cos(z) / MpComplex(cosh(MpReal(1))); },
      [](const MpComplex& z) { return MpComplex(MpReal(0.5)) / (MpComplex(MpReal(1.5)) - z); }};
  const MpReal jlo(-0.1), jhi(0.1);
  int violations = 0, checks = 0;
  double tightest = 0.0;
  for (const auto& g : fns)
    for (int n : {5, 10, 20, 40}) {
      const auto p = make_equispaced<MpReal, MpComplex>(jlo, jhi, n, [&](const MpReal& x) { return g(MpComplex(x)); });
      double supJ = 0.0;
      for (int i = 0; i <= 400; ++i)
        supJ = std::max(supJ, static_cast<double>(abs(g(MpComplex(jlo + (jhi - jlo) * i / 400)))));
      double worst = 0.0, pmax = 0.0;
      for (int k = 0; k < 128; ++k)
        for (double rad : {0.5, 0.375, 0.25, 0.0}) {
          const double th = 2.0 * M_PI * k / 128;
          const MpComplex z(MpReal(rad * std::cos(th)), MpReal(rad * std::sin(th)));
          const MpComplex P = lagrange_extend(p, z);
          worst = std::max(worst, static_cast<double>(abs(P - g(z))));
          pmax = std::max(pmax, static_cast<double>(abs(P)));
        }
      violations += worst > residue_bound(n);
      violations += pmax > growth_bound(0.2, n) * supJ;
      checks += 2;
      tightest = std::max(tightest, worst / residue_bound(n));
    }
  return {violations == 0, fmt("%d violations in %d checks, max residue/bound %.3e", violations, checks, tightest)};
}

Outcome lightray_extraction() {
  // a: calibrated λ = 220 on the 257 grid; b: a ≡ 0 on the default grid
  double worst_a = 0.0, worst_b = 0.0;
  {
    const SpaceTimeGrid g = grid(257);
    const BumpSpec bs{{0.0, 0.0}, 1.25, 0.3, 0.35, 0.05};
    const CoefficientPair p1 = CoefficientPair::zero(g);
    CoefficientPair p2 = p1;
    p2.a = make_bump(g, bs, RegionId::QrStar);
    const BumpField bf(bs);
    for (double y2 : {0.0, 0.08, 0.15}) {
      const Vec2 y{1.25, y2}, om{1.0, 0.0};
      const auto s = recover_lightray_a({&p1, &p2}, y, om, 220.0, 0.18);
      const auto d = lightray_direct(bf, y, om, g.T(), g.dt() / 4);
      worst_a = std::max(worst_a, std::abs(s.value - d.value) / std::abs(d.value));
    }
  }
  {
    const SpaceTimeGrid g = grid(129);
    const BumpSpec bs{{0.0, 0.0}, 1.25, 0.3, 0.35, 0.5};
    const CoefficientPair p1 = CoefficientPair::zero(g);
    CoefficientPair p2 = p1;
    p2.b = make_bump(g, bs, RegionId::QrStar);
    const BumpField bf(bs);
    for (double y2 : {0.0, 0.1}) {
      const Vec2 y{1.25, y2}, om{1.0, 0.0};
      const auto s = recover_lightray_b({&p1, &p2}, nullptr, y, om, 110.0, 0.2);
      const auto d = lightray_direct(bf, y, om, g.T(), g.dt() / 4);
      worst_b = std::max(worst_b, std::abs(s.value - d.value) / std::abs(d.value));
    }
  }
  return {worst_a < kRayATol && worst_b < kRayBTol, fmt("a rel %.4f, b rel %.4f", worst_a, worst_b)};
}

ReconstructionJob pipeline_job(const CoefficientPair& bg, const CoefficientPair& u, int nx) {
  ReconstructionJob job;
  job.background = &bg;
  job.unknown = &u;
  job.source = LightRaySource::Extracted;
  job.alpha = 30.0;
  job.reg = job.reg_grad = 1e-3;
  job.probes.directions = 6;
  if (nx == 129) {
    job.probes.lambda = 110.0;
    job.probes.h = 0.2;
    job.probes.dy = 0.12;
  } else {
    job.probes.lambda = 55.0;
    job.probes.h = 0.3;
    job.probes.dy = 0.15;
  }
  job.prior = Box{{-0.36, -0.36}, {0.36, 0.36}, 0.85, 1.65, false};
  return job;
}

Outcome end_to_end() {
  const SpaceTimeGrid g = grid(129);
  const CoefficientPair bg = CoefficientPair::zero(g);
  BumpSpec bs{{0.0, 0.0}, 1.25, 0.3, 0.35, 0.05};
  CoefficientPair ua = bg;
  ua.a += make_bump(g, bs, RegionId::QrStar);
  const auto ra = reconstruct_a(pipeline_job(bg, ua, 129));
  bs.amplitude = 0.5;
  CoefficientPair ub = bg;
  ub.b += make_bump(g, bs, RegionId::QrStar);
  const auto rb = reconstruct_b(pipeline_job(bg, ub, 129), nullptr);
  const bool ok = ra.flag == "ok" && rb.flag == "ok" && ra.rel_l2() < kReconATol && rb.rel_hm1() < kReconBTol;
  return {ok, fmt("a rel L2 %.4f (%zu rays), b rel H-1 %.4f (%zu rays)", ra.rel_l2(), ra.rays.size(), rb.rel_hm1(),
                  rb.rays.size())};
}

Outcome stability_shape() {
  const SpaceTimeGrid g = grid(65);
  const CoefficientPair bg = CoefficientPair::zero(g);
  SweepSpec s;
  s.job = pipeline_job(bg, bg, 65);
  s.job.unknown = nullptr;
  s.a_bump = {{0.0, 0.0}, 1.25, 0.3, 0.35, 0.5};
  s.b_bump = {{0.0, 0.0}, 1.25, 0.3, 0.35, 5.0};
  s.ladder = {1e-3, 3e-3, 1e-2, 3e-2, 1e-1};
  s.dictionary.lambdas = {10.0, 30.0};
  s.dictionary.h = 0.3;
  const StabilityReport rep = stability_sweep(s);
  std::string detail;
  for (const auto& r : rep.rows) detail += fmt("[%.0e: eps %.3e a %.3e b %.3e] ", r.delta, r.eps, r.a_linf, r.b_hm1);
  const bool dom = rep.envelope_dominates();
  detail += fmt("monotone eps/a/b %d/%d/%d, envelope dominates %d", rep.eps_monotone, rep.a_monotone,
                rep.b_monotone, dom);
  return {rep.eps_monotone && rep.a_monotone && rep.b_monotone && dom, detail};
}

Outcome hminus1_oracle() {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> nd;
  const std::vector<std::vector<std::size_t>> shapes{{16}, {16, 12}, {16, 16}, {10, 12, 14}, {16, 16, 16}};
  double worst = 0.0;
  for (const auto& dims : shapes) {
    std::size_t total = 1;
    for (auto d : dims) total *= d;
    std::vector<double> f(total), h(dims.size());
    for (auto& v : f) v = nd(rng);
    for (std::size_t a = 0; a < h.size(); ++a) h[a] = 0.04 + 0.02 * a;
    for (int pad : {1, 2}) {
      const double fast = h_minus1_norm(f, dims, h, pad);
      const double slow = oracles::h_minus1_brute(f, dims, h, pad);
      worst = std::max(worst, std::abs(fast - slow) / slow);
    }
  }
  return {worst <= kHm1Tol, fmt("max relative deviation %.2e on grids up to 16^3", worst)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> table{
      {"solver order", solver_order},
      {"energy bound stability", energy_stability},
      {"GO remainder decay", remainder_decay},
      {"cloaking", cloaking},
      {"Fourier-slice identity", fourier_slice_identity},
      {"continuation residue bound", continuation_bounds},
      {"light-ray extraction", lightray_extraction},
      {"end-to-end reconstruction", end_to_end},
      {"stability shape", stability_shape},
      {"H-1 norm oracle", hminus1_oracle},
  };
  std::vector<int> which;
  if (argc < 2 || std::string(argv[1]) == "all") {
    for (int i = 1; i <= 10; ++i) which.push_back(i);
  } else {
    const int c = std::atoi(argv[1]);
    if (c < 1 || c > 10) {
      std::fprintf(stderr, "usage: lct_acceptance [1..10|all]\n");
      return 2;
    }
    which.push_back(c);
  }
  int failed = 0;
  for (int c : which) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = table[c - 1].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("criterion %d (%s): %s  %s [%.1fs]\n", c, table[c - 1].first, o.pass ? "PASS" : "FAIL",
                o.detail.c_str(), secs);
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed == 0 ? 0 : 1;
}
