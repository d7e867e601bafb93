#include "lct/lightray.hpp"

#include <algorithm>
#include <cmath>

#include "lct/csv.hpp"
#include "lct/error.hpp"
#include "lct/fft.hpp"

namespace lct {

LightRaySample lightray_direct(const ScalarField& f, const Vec2& y, const Vec2& omega, double T, double max_step) {
  require_unit(omega, "lightray");
  LightRaySample s;
  s.y = y;
  s.omega = omega;
  const int M = std::max(1, static_cast<int>(std::ceil(T / max_step - 1e-12)));
  s.value = characteristic_integral(f, y - T * omega, T, omega, M);
  return s;
}

bool in_E(const Vec2& xi, double tau) {
  const double nx = norm(xi);
  return nx > 0.0 && std::abs(tau) < nx;
}

ProbeMode probe_mode(OperatorTag tag) {
  switch (tag) {
    case OperatorTag::Lambda: return ProbeMode::QrStar;
    case OperatorTag::Response: return ProbeMode::Sharp;
    case OperatorTag::FullData: return ProbeMode::Full;
  }
  return ProbeMode::QrStar;
}

namespace {

const ScalarField* nonzero(const SpaceTimeField& f) { return f.is_zero() ? nullptr : &f; }

struct PartResult {
  BoundarySignal dn;
  SpaceField uT, utT;
};

PartResult solve_part(const CoefficientPair& p, const BoundarySignal& f, const SpaceField* u0, const SpaceField* u1) {
  SolveOptions opts;
  opts.keep_field = false;
  WaveTrajectory tr = solve_forward(p, {&f, u0, u1, nullptr}, opts);
  return {tr.neumann(), tr.u_final(), tr.ut_final()};
}

// Trapezoid weight of grid node q on Ω.
double omega_weight(const SpaceTimeGrid& g, std::size_t q) {
  const int nx = g.nx();
  const int i = static_cast<int>(q % nx);
  double w = (i == 0 || i == nx - 1) ? 0.5 * g.dx() : g.dx();
  if (g.n() == 2) {
    const int j = static_cast<int>(q / nx);
    w *= (j == 0 || j == nx - 1) ? 0.5 * g.dx() : g.dx();
  }
  return w;
}

}  // namespace

BoundaryFunctional extract_exp_functional(const DtnPair& pair, const ProbeSpec& spec, const ExtractionOptions& opts) {
  if (!pair.background || !pair.unknown) throw Rejected("lightray", "both coefficient pairs are required");
  const SpaceTimeGrid& g = pair.background->grid();
  if (!(pair.unknown->grid() == g)) throw Rejected("lightray", "coefficient pairs live on different grids");
  const ProbeMode mode = probe_mode(opts.tag);

  ProbeSpec plus = spec;
  plus.side = ProbeSide::Plus;
  validate_probe(g, plus, mode);
  if (opts.match_dispersion) plus.k_phase = matched_wavenumber(g, spec.lambda, spec.omega);
  ProbeSpec minus = plus;
  minus.side = ProbeSide::Minus;

  const ScalarField* a1 = nonzero(pair.background->a);
  const BoundarySignal f = probe_dirichlet_trace(g, plus, a1, mode);
  const BoundarySignal fr = f.real_part(), fi = f.imag_part();

  // Full-data probes carry the leading term's Cauchy data at t = 0.
  SpaceField u0r, u0i, u1r, u1i;
  const bool full = opts.tag == OperatorTag::FullData;
  if (full) {
    const GoLeadingTerm lp(plus, a1, g.dt());
    std::tie(u0r, u0i) = leading_term_slice(g, lp, 0);
    std::tie(u1r, u1i) = leading_term_dt_slice(g, lp, 0);
  }
  const PartResult r1 = solve_part(*pair.background, fr, full ? &u0r : nullptr, full ? &u1r : nullptr);
  const PartResult i1 = solve_part(*pair.background, fi, full ? &u0i : nullptr, full ? &u1i : nullptr);
  const PartResult r2 = solve_part(*pair.unknown, fr, full ? &u0r : nullptr, full ? &u1r : nullptr);
  const PartResult i2 = solve_part(*pair.unknown, fi, full ? &u0i : nullptr, full ? &u1i : nullptr);

  const GoLeadingTerm w(minus, a1, g.dt());
  const int nt = g.nt(), N = f.node_count();
  cplx B(0.0, 0.0);
  for (int k = 0; k <= nt; ++k) {
    const double t = g.time(k);
    const double wt = (k == 0 || k == nt) ? 0.5 * g.dt() : g.dt();
    for (int id = 0; id < N; ++id) {
      const Vec2 x = f.position(id);
      if (w.vanishes(x, t)) continue;
      const cplx d(r2.dn.re(k, id) - r1.dn.re(k, id), i2.dn.re(k, id) - i1.dn.re(k, id));
      B += wt * f.surface_weight(id) * d * w(x, t);
    }
  }
  if (opts.tag != OperatorTag::Lambda) {
    const auto [wr, wi] = leading_term_slice(g, w, nt);
    const auto [vr, vi] = leading_term_dt_slice(g, w, nt);
    const double* a1T = pair.background->a.is_zero() ? nullptr : pair.background->a.level(nt);
    for (std::size_t q = 0; q < g.slice_size(); ++q) {
      const cplx wq(wr[q], wi[q]);
      const cplx wtq(vr[q], vi[q]);
      if (wq == 0.0 && wtq == 0.0) continue;
      const cplx du(r2.uT[q] - r1.uT[q], i2.uT[q] - i1.uT[q]);
      const cplx dut(r2.utT[q] - r1.utT[q], i2.utT[q] - i1.utT[q]);
      const double aT = a1T ? a1T[q] : 0.0;
      B -= omega_weight(g, q) * (dut * wq + du * (aT * wq - wtq));
    }
  }
  BoundaryFunctional out;
  out.B = B;
  out.lambda_eff = std::sin(spec.lambda * g.dt()) / g.dt();
  out.v = -B / (cplx(0.0, 2.0) * out.lambda_eff);
  return out;
}

namespace {

double default_h(double lambda, double h) { return h > 0.0 ? h : std::pow(lambda, -1.0 / 7.0); }

}  // namespace

LightRaySample recover_lightray_a(const DtnPair& pair, const Vec2& y, const Vec2& omega, double lambda, double h,
                                  const ExtractionOptions& opts) {
  require_unit(omega, "lightray");
  if (!pair.background) throw Rejected("lightray", "missing background pair");
  const SpaceTimeGrid& g = pair.background->grid();
  LightRaySample s;
  s.y = y;
  s.omega = omega;
  s.lambda = lambda;
  s.h = default_h(lambda, h);
  s.extracted = true;
  if (opts.tag == OperatorTag::Lambda && !region_contains(g, RegionId::AnnulusAr, y, 0.0)) {
    // Lines through such y never meet QrStar, where the difference lives.
    s.flag = "outside_annulus";
    return s;
  }
  ProbeSpec spec;
  spec.omega = omega;
  spec.lambda = lambda;
  spec.phi = Mollifier(y, s.h, g.n());
  const BoundaryFunctional bf = extract_exp_functional(pair, spec, opts);
  s.functional = bf.B;
  s.lambda_eff = bf.lambda_eff;
  s.im_diagnostic = std::abs(bf.v.imag());
  double m = 1.0 + bf.v.real();
  if (m <= opts.clamp_floor) {
    m = opts.clamp_floor;
    s.flag = "clamped";
  }
  s.value = -2.0 * std::log(m);
  return s;
}

DampingCorrection damping_correction(const ScalarField* recovered_a, const Mollifier& phi, const Vec2& omega,
                                     double T, double max_step) {
  DampingCorrection c;
  if (!recovered_a || recovered_a->support().empty) return c;
  const int M = std::max(1, static_cast<int>(std::ceil(T / max_step - 1e-12)));
  auto R = [&](const Vec2& y) { return characteristic_integral(*recovered_a, y - T * omega, T, omega, M); };
  // Midpoint rule over the square circumscribing supp φ.
  const int q = 24;
  const double h = phi.width();
  const double d = 2.0 * h / q;
  const Vec2 y0 = phi.center();
  double V = 0.0;
  const int qy = phi.dim() == 2 ? q : 1;
  for (int j = 0; j < qy; ++j)
    for (int i = 0; i < q; ++i) {
      const Vec2 yp{y0[0] - h + (i + 0.5) * d, phi.dim() == 2 ? y0[1] - h + (j + 0.5) * d : y0[1]};
      const double p = phi(yp);
      if (p == 0.0) continue;
      V += p * p * (std::exp(-0.5 * R(yp)) - 1.0);
    }
  c.v_a = V * std::pow(d, phi.dim());
  c.amplitude = std::exp(-0.25 * R(y0));
  return c;
}

LightRaySample lightray_b_from_functional(const LightRaySample& raw, const DampingCorrection& corr) {
  LightRaySample s = raw;
  if (raw.flag == "outside_annulus" || raw.flag == "unprobed") {
    s.value = 0.0;
    return s;
  }
  const cplx Bb = raw.functional + cplx(0.0, 2.0 * raw.lambda_eff) * corr.v_a;
  s.value = Bb.real() / corr.amplitude;
  s.im_diagnostic = std::abs(Bb.imag());
  s.flag.clear();
  return s;
}

LightRaySample recover_lightray_b(const DtnPair& pair, const ScalarField* recovered_a, const Vec2& y,
                                  const Vec2& omega, double lambda, double h, const ExtractionOptions& opts) {
  const LightRaySample raw = recover_lightray_a(pair, y, omega, lambda, h, opts);
  if (raw.flag == "outside_annulus") {
    LightRaySample s = raw;
    s.value = 0.0;
    return s;
  }
  const SpaceTimeGrid& g = pair.background->grid();
  const DampingCorrection c = damping_correction(recovered_a, Mollifier(y, raw.h, g.n()), omega, g.T(), g.dt());
  return lightray_b_from_functional(raw, c);
}

Vec2 omega_from_frequency(const Vec2& xi, double tau, const Vec2& zeta) {
  if (!in_E(xi, tau)) throw Rejected("lightray", "(xi, tau) lies outside E: need |tau| < |xi| and xi != 0");
  require_unit(zeta, "lightray");
  const double n2 = dot(xi, xi);
  if (std::abs(dot(zeta, xi)) > 1e-12 * std::sqrt(n2)) throw Rejected("lightray", "zeta is not orthogonal to xi");
  const double c = std::sqrt(std::max(0.0, 1.0 - tau * tau / n2));
  return (tau / n2) * xi + c * zeta;
}

RayGrid make_ray_grid(const Vec2& omega, double radius, double dy) {
  if (!(dy > 0.0) || !(radius > 0.0)) throw Rejected("lightray", "ray grid needs positive radius and spacing");
  RayGrid R;
  R.omega = omega;
  const int half = static_cast<int>(std::ceil(radius / dy - 1e-12));
  R.ny = 2 * half + 1;
  R.dy = dy;
  R.origin = {-half * dy, -half * dy};
  R.values.assign(static_cast<std::size_t>(R.ny) * R.ny, 0.0);
  return R;
}

void fill_ray_grid(RayGrid& grid, const ScalarField& f, double T, double max_step) {
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 0; i < grid.ny; ++i)
      grid.values[static_cast<std::size_t>(j) * grid.ny + i] =
          lightray_direct(f, grid.node(i, j), grid.omega, T, max_step).value;
}

namespace {

void check_coverage(const RayGrid& R, double r, double T) {
  const double need = r / 2 + T;
  const double tol = 1e-9 * need;
  for (int c = 0; c < 2; ++c) {
    const double lo = R.origin[c], hi = R.origin[c] + (R.ny - 1) * R.dy;
    if (lo > -need + tol || hi < need - tol)
      throw Rejected("lightray", "y-grid does not cover B(0, r/2+T) = B(0, " + std::to_string(need) + ")");
  }
}

}  // namespace

SpectralSample fourier_slice(const RayGrid& R, const Vec2& xi, double r, double T) {
  check_coverage(R, r, T);
  SpectralSample s;
  s.xi = xi;
  s.tau = dot(R.omega, xi);
  s.in_E = in_E(xi, s.tau);
  // separable phases: e^{−iy·ξ} = e^{−iy₁ξ₁} e^{−iy₂ξ₂}
  std::vector<cplx> e1(R.ny), e2(R.ny);
  for (int i = 0; i < R.ny; ++i) {
    const double p1 = -(R.origin[0] + i * R.dy) * xi[0];
    const double p2 = -(R.origin[1] + i * R.dy) * xi[1];
    e1[i] = {std::cos(p1), std::sin(p1)};
    e2[i] = {std::cos(p2), std::sin(p2)};
  }
  cplx sum(0.0, 0.0);
  for (int j = 0; j < R.ny; ++j) {
    cplx row(0.0, 0.0);
    const double* v = R.values.data() + static_cast<std::size_t>(j) * R.ny;
    for (int i = 0; i < R.ny; ++i)
      if (v[i] != 0.0) row += v[i] * e1[i];
    sum += row * e2[j];
  }
  s.value = sum * R.dy * R.dy;
  return s;
}

std::vector<SpectralSample> fourier_slice_lattice(const RayGrid& R, double alpha, double r, double T) {
  check_coverage(R, r, T);
  const int N = R.ny;
  std::vector<cplx> data(R.values.begin(), R.values.end());
  const int dims[2] = {N, N};
  fft::dft(data, dims);
  const double dk = 2.0 * M_PI / (N * R.dy);
  std::vector<SpectralSample> out;
  const int mmax = N / 2;
  for (int m2 = -mmax; m2 <= mmax; ++m2)
    for (int m1 = -mmax; m1 <= mmax; ++m1) {
      if (m1 == 0 && m2 == 0) continue;
      if (2 * m1 == N || 2 * m2 == N) continue;
      const Vec2 xi{m1 * dk, m2 * dk};
      if (norm(xi) > alpha) continue;
      const int i1 = (m1 + N) % N, i2 = (m2 + N) % N;
      const double ph = -dot(R.origin, xi);
      SpectralSample s;
      s.xi = xi;
      s.tau = dot(R.omega, xi);
      s.in_E = in_E(xi, s.tau);
      s.value = data[static_cast<std::size_t>(i2) * N + i1] * cplx(std::cos(ph), std::sin(ph)) * (R.dy * R.dy);
      out.push_back(s);
    }
  return out;
}

cplx direct_space_time_ft(const SpaceTimeField& f, const Vec2& xi, double tau) {
  const SpaceTimeGrid& g = f.grid();
  const int nx = g.nx(), nt = g.nt();
  const bool two = g.n() == 2;
  std::vector<cplx> e1(nx), e2(two ? nx : 1, cplx(1.0, 0.0));
  for (int i = 0; i < nx; ++i) {
    const double w = (i == 0 || i == nx - 1) ? 0.5 : 1.0;
    const double p1 = -g.coord(i) * xi[0];
    e1[i] = w * cplx(std::cos(p1), std::sin(p1));
    if (two) {
      const double p2 = -g.coord(i) * xi[1];
      e2[i] = w * cplx(std::cos(p2), std::sin(p2));
    }
  }
  cplx sum(0.0, 0.0);
  for (int k = 0; k <= nt; ++k) {
    const double w = (k == 0 || k == nt) ? 0.5 : 1.0;
    const double pt = -g.time(k) * tau;
    const double* u = f.level(k);
    cplx lv(0.0, 0.0);
    for (int j = 0; j < static_cast<int>(e2.size()); ++j) {
      cplx row(0.0, 0.0);
      for (int i = 0; i < nx; ++i) row += u[static_cast<std::size_t>(j) * nx + i] * e1[i];
      lv += row * e2[j];
    }
    sum += w * lv * cplx(std::cos(pt), std::sin(pt));
  }
  return sum * std::pow(g.dx(), g.n()) * g.dt();
}

DirectTransform::DirectTransform(const ScalarField& f, const Box& box, int nx, int nt)
    : box_(box), nx_(nx), nt_(nt) {
  if (nx < 2 || nt < 2) throw Rejected("lightray", "direct transform needs at least two samples per axis");
  hx_ = (box.hi[0] - box.lo[0]) / (nx - 1);
  ht_ = (box.t1 - box.t0) / (nt - 1);
  if (std::abs((box.hi[1] - box.lo[1]) - (box.hi[0] - box.lo[0])) > 1e-12)
    throw Rejected("lightray", "direct transform box must be square in space");
  samples_.assign(static_cast<std::size_t>(nt) * nx * nx, 0.0);
  if (box.empty) return;
  for (int k = 0; k < nt; ++k)
    for (int j = 0; j < nx; ++j)
      for (int i = 0; i < nx; ++i)
        samples_[(static_cast<std::size_t>(k) * nx + j) * nx + i] =
            f({box.lo[0] + i * hx_, box.lo[1] + j * hx_}, box.t0 + k * ht_);
}

cplx DirectTransform::operator()(const Vec2& xi, double tau) const {
  if (box_.empty) return {0.0, 0.0};
  auto phases = [](int n, double lo, double h, double freq) {
    std::vector<cplx> e(n);
    for (int i = 0; i < n; ++i) {
      const double w = (i == 0 || i == n - 1) ? 0.5 : 1.0;
      const double p = -(lo + i * h) * freq;
      e[i] = w * cplx(std::cos(p), std::sin(p));
    }
    return e;
  };
  const auto e1 = phases(nx_, box_.lo[0], hx_, xi[0]);
  const auto e2 = phases(nx_, box_.lo[1], hx_, xi[1]);
  const auto et = phases(nt_, box_.t0, ht_, tau);
  cplx sum(0.0, 0.0);
  for (int k = 0; k < nt_; ++k) {
    cplx lv(0.0, 0.0);
    for (int j = 0; j < nx_; ++j) {
      const double* s = samples_.data() + (static_cast<std::size_t>(k) * nx_ + j) * nx_;
      cplx row(0.0, 0.0);
      for (int i = 0; i < nx_; ++i) row += s[i] * e1[i];
      lv += row * e2[j];
    }
    sum += lv * et[k];
  }
  return sum * (hx_ * hx_ * ht_);
}

void write_lightray_csv(const std::filesystem::path& path, const std::vector<LightRaySample>& rows) {
  CsvWriter w(path, {"y1", "y2", "omega1", "omega2", "lambda", "h", "value", "flag"});
  for (const auto& s : rows) {
    w << s.y[0] << s.y[1] << s.omega[0] << s.omega[1] << s.lambda << s.h << s.value
      << (s.extracted ? (s.flag.empty() ? std::string("ok") : s.flag) : std::string("direct"));
    w.end_row();
  }
}

void write_spectral_csv(const std::filesystem::path& path, const std::vector<SpectralSample>& rows) {
  CsvWriter w(path, {"xi1", "xi2", "tau", "re", "im", "in_E", "confidence"});
  for (const auto& s : rows) {
    w << s.xi[0] << s.xi[1] << s.tau << s.value.real() << s.value.imag() << s.in_E << s.confidence;
    w.end_row();
  }
}

}  // namespace lct
