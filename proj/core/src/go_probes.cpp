#include "lct/go_probes.hpp"

#include <algorithm>
#include <cmath>

#include "lct/error.hpp"

namespace lct {

namespace {

// ∫_{|z|<1} exp(−2/(1−|z|²)) dz by Simpson's rule after the substitution u = |z|².
double psi_square_integral(int n) {
  const int N = 20000;
  auto f = [n](double u) {
    if (u >= 1.0) return 0.0;
    const double e = std::exp(-2.0 / (1.0 - u));
    // n = 2: dz = π du ; n = 1: dz = du / √u over both signs
    return n == 2 ? M_PI * e : (u > 0 ? e / std::sqrt(u) : 0.0);
  };
  if (n == 1) {
    // integrate 2∫₀¹ e^{−2/(1−x²)} dx directly to avoid the 1/√u endpoint
    double s = 0.0;
    for (int i = 0; i <= N; ++i) {
      const double x = static_cast<double>(i) / N;
      const double w = (i == 0 || i == N) ? 1.0 : (i % 2 ? 4.0 : 2.0);
      s += w * (x < 1.0 ? std::exp(-2.0 / (1.0 - x * x)) : 0.0);
    }
    return 2.0 * s / (3.0 * N);
  }
  double s = 0.0;
  for (int i = 0; i <= N; ++i) {
    const double u = static_cast<double>(i) / N;
    const double w = (i == 0 || i == N) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    s += w * f(u);
  }
  return s / (3.0 * N);
}

double sq_dist_to_square(const Vec2& y, double L, int n) {
  double d2 = 0.0;
  for (int c = 0; c < n; ++c) {
    const double e = std::max(0.0, std::abs(y[c]) - L);
    d2 += e * e;
  }
  return d2;
}

}  // namespace

double Mollifier::psi_constant(int n) {
  static const double c1 = 1.0 / std::sqrt(psi_square_integral(1));
  static const double c2 = 1.0 / std::sqrt(psi_square_integral(2));
  return n == 1 ? c1 : c2;
}

Mollifier::Mollifier(const Vec2& y, double h, int n) : y_(y), h_(h), n_(n) {
  if (!(h > 0.0)) throw Rejected("go_probes", "mollifier width must be positive");
  scale_ = psi_constant(n) * std::pow(h, -0.5 * n);
}

double Mollifier::operator()(const Vec2& x) const {
  const double z0 = (x[0] - y_[0]) / h_;
  const double z1 = n_ == 2 ? (x[1] - y_[1]) / h_ : 0.0;
  const double s2 = z0 * z0 + z1 * z1;
  if (s2 >= 1.0) return 0.0;
  return scale_ * std::exp(-1.0 / (1.0 - s2));
}

Vec2 Mollifier::gradient(const Vec2& x) const {
  const double z0 = (x[0] - y_[0]) / h_;
  const double z1 = n_ == 2 ? (x[1] - y_[1]) / h_ : 0.0;
  const double s2 = z0 * z0 + z1 * z1;
  if (s2 >= 1.0) return {0.0, 0.0};
  const double d = 1.0 - s2;
  const double v = scale_ * std::exp(-1.0 / d);
  const double f = -2.0 * v / (d * d * h_);
  return {f * z0, f * z1};
}

Mollifier mollifier_profile(const Vec2& y, double h, int n) { return Mollifier(y, h, n); }

double mollifier_square_ft(double h, double k, int n) {
  const double c = Mollifier::psi_constant(n);
  const double q = h * k;
  // n = 2: 2π∫₀¹ ψ²(ρ) J₀(qρ) ρ dρ ; n = 1: 2∫₀¹ ψ²(ρ) cos(qρ) dρ
  const int N = 400;
  double s = 0.0;
  for (int i = 0; i <= N; ++i) {
    const double r = static_cast<double>(i) / N;
    const double w = (i == 0 || i == N) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    const double p2 = r < 1.0 ? c * c * std::exp(-2.0 / (1.0 - r * r)) : 0.0;
    s += w * p2 * (n == 2 ? std::cyl_bessel_j(0.0, q * r) * r : std::cos(q * r));
  }
  s /= 3.0 * N;
  return n == 2 ? 2.0 * M_PI * s : 2.0 * s;
}

std::optional<std::string> probe_violation(const SpaceTimeGrid& g, const ProbeSpec& spec, ProbeMode mode) {
  require_unit(spec.omega, "go_probes");
  if (!(spec.lambda > 0.0)) return "lambda must be positive";
  if (spec.lambda > g.lambda_max() * (1.0 + 1e-12))
    return "lambda=" + std::to_string(spec.lambda) + " exceeds the resolution limit " +
           std::to_string(g.lambda_max()) + " (10 points per wavelength)";
  const double h = spec.phi.width();
  const double L = g.half_side();
  const double h2 = h * h;
  if (mode == ProbeMode::Full) return std::nullopt;
  if (sq_dist_to_square(spec.phi.center(), L, g.n()) <= h2) return "supp phi meets Omega";
  if (mode == ProbeMode::QrStar) {
    const Vec2 ym = spec.phi.center() - g.T() * spec.omega;
    const Vec2 yp = spec.phi.center() + g.T() * spec.omega;
    if (sq_dist_to_square(ym, L, g.n()) <= h2 || sq_dist_to_square(yp, L, g.n()) <= h2)
      return "supp phi shifted by T*omega meets Omega";
  }
  return std::nullopt;
}

void validate_probe(const SpaceTimeGrid& g, const ProbeSpec& spec, ProbeMode mode) {
  if (auto why = probe_violation(g, spec, mode)) throw Rejected("go_probes", *why);
}

namespace {

// Parameter range [s0,s1] ⊂ [0,t] on which (x+(t−s)ω, s) lies in the box.
bool path_window(const Box& b, const Vec2& x, double t, const Vec2& w, double& s0, double& s1) {
  s0 = std::max(0.0, b.t0);
  s1 = std::min(t, b.t1);
  for (int c = 0; c < 2; ++c) {
    // lo ≤ x_c + (t−s)ω_c ≤ hi
    if (std::abs(w[c]) < 1e-15) {
      if (x[c] < b.lo[c] || x[c] > b.hi[c]) return false;
      continue;
    }
    double a1 = t - (b.lo[c] - x[c]) / w[c];
    double a2 = t - (b.hi[c] - x[c]) / w[c];
    if (a1 > a2) std::swap(a1, a2);
    s0 = std::max(s0, a1);
    s1 = std::min(s1, a2);
  }
  return s0 <= s1;
}

double path_integral(const ScalarField& a, const Box& box, const Vec2& x, double t, const Vec2& w, int M) {
  if (t <= 0.0 || M <= 0) return 0.0;
  double s0, s1;
  if (!path_window(box, x, t, w, s0, s1)) return 0.0;
  const double ds = t / M;
  const int m0 = std::max(0, static_cast<int>(std::floor(s0 / ds)));
  const int m1 = std::min(M, static_cast<int>(std::ceil(s1 / ds)));
  double sum = 0.0;
  for (int m = m0; m <= m1; ++m) {
    const double s = m * ds;
    const double wt = (m == 0 || m == M) ? 0.5 : 1.0;
    sum += wt * a(x + (t - s) * w, s);
  }
  return sum * ds;
}

}  // namespace

double characteristic_integral(const ScalarField& a, const Vec2& x, double t, const Vec2& omega, int M) {
  const Box box = a.support();
  if (box.empty) return 0.0;
  return path_integral(a, box, x, t, omega, M);
}

double amplitude(ProbeSide side, const ScalarField* a, const Vec2& x, double t, const Vec2& omega,
                 double max_step) {
  if (!a || t <= 0.0) return 1.0;
  const Box box = a->support();
  if (box.empty) return 1.0;
  const int M = std::max(1, static_cast<int>(std::ceil(t / max_step - 1e-12)));
  const double I = path_integral(*a, box, x, t, omega, M);
  return std::exp((side == ProbeSide::Plus ? -0.5 : 0.5) * I);
}

double matched_wavenumber(const SpaceTimeGrid& g, double lambda, const Vec2& omega) {
  const double dt = g.dt(), dx = g.dx();
  const double lhs = std::pow(2.0 / dt * std::sin(0.5 * lambda * dt), 2);
  auto rhs = [&](double k) {
    double s = 0.0;
    for (int c = 0; c < g.n(); ++c) s += std::pow(std::sin(0.5 * k * omega[c] * dx), 2);
    return 4.0 / (dx * dx) * s;
  };
  double lo = 0.0, hi = M_PI / dx;
  if (rhs(hi) < lhs) throw Rejected("go_probes", "no discrete wavenumber matches lambda");
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (rhs(mid) < lhs ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

GoLeadingTerm::GoLeadingTerm(const ProbeSpec& spec, const ScalarField* a, double max_step)
    : spec_(spec), a_(a), step_(max_step) {
  if (a_) {
    abox_ = a_->support();
    if (abox_.empty) a_ = nullptr;
  }
}

bool GoLeadingTerm::vanishes(const Vec2& x, double t) const {
  const Vec2 p = x + t * spec_.omega - spec_.phi.center();
  return dot(p, p) >= spec_.phi.width() * spec_.phi.width();
}

int GoLeadingTerm::node_count(double t) const {
  return std::max(1, static_cast<int>(std::ceil(t / step_ - 1e-12)));
}

double GoLeadingTerm::amp(const Vec2& x, double t, int M) const {
  if (!a_ || t <= 0.0) return 1.0;
  const double I = path_integral(*a_, abox_, x, t, spec_.omega, M);
  return std::exp((spec_.side == ProbeSide::Plus ? -0.5 : 0.5) * I);
}

cplx GoLeadingTerm::operator()(const Vec2& x, double t) const {
  const double p = spec_.phi(x + t * spec_.omega);
  if (p == 0.0) return {0.0, 0.0};
  const double A = amp(x, t, node_count(t));
  const double sgn = spec_.side == ProbeSide::Plus ? 1.0 : -1.0;
  const double th = sgn * (spec_.wavenumber() * dot(x, spec_.omega) + spec_.lambda * t);
  return p * A * cplx(std::cos(th), std::sin(th));
}

cplx GoLeadingTerm::dt(const Vec2& x, double t) const {
  const Vec2 z = x + t * spec_.omega;
  const double p = spec_.phi(z);
  const double dp = dot(spec_.phi.gradient(z), spec_.omega);
  if (p == 0.0 && dp == 0.0) return {0.0, 0.0};
  double A = 1.0, dA = 0.0;
  if (a_) {
    const int M = node_count(t + step_);
    A = amp(x, t, M);
    const double d = 1e-4;
    dA = (amp(x, t + d, M) - amp(x, std::max(0.0, t - d), M)) / (t + d - std::max(0.0, t - d));
  }
  const double sgn = spec_.side == ProbeSide::Plus ? 1.0 : -1.0;
  const double th = sgn * (spec_.wavenumber() * dot(x, spec_.omega) + spec_.lambda * t);
  const cplx e(std::cos(th), std::sin(th));
  return (dp * A + p * dA + cplx(0.0, sgn * spec_.lambda) * p * A) * e;
}

BoundarySignal probe_dirichlet_trace(const SpaceTimeGrid& g, const ProbeSpec& spec, const ScalarField* a,
                                     ProbeMode mode) {
  validate_probe(g, spec, mode);
  BoundarySignal f(g, SignalKind::Dirichlet, true);
  const GoLeadingTerm lead(spec, a, g.dt());
  for (int k = 0; k <= g.nt(); ++k) {
    const double t = g.time(k);
    for (int id = 0; id < f.node_count(); ++id) {
      const Vec2 x = f.position(id);
      if (lead.vanishes(x, t)) continue;
      const cplx v = lead(x, t);
      f.re(k, id) = v.real();
      f.im(k, id) = v.imag();
    }
  }
  return f;
}

namespace {

template <class Fn>
std::pair<SpaceField, SpaceField> slice_eval(const SpaceTimeGrid& g, const GoLeadingTerm& lead, int k, Fn fn) {
  SpaceField re(g), im(g);
  const double t = g.time(k);
  // only nodes inside the disc |x + tω − y| < h can be nonzero (the dt variant too)
  const Vec2 c = lead.spec().phi.center() - t * lead.spec().omega;
  const double h = lead.spec().phi.width();
  const double L = g.half_side(), dx = g.dx();
  const int nx = g.nx();
  auto range = [&](double center, int& lo, int& hi) {
    lo = std::max(0, static_cast<int>(std::floor((center - h + L) / dx)));
    hi = std::min(nx - 1, static_cast<int>(std::ceil((center + h + L) / dx)));
  };
  int i0, i1, j0 = 0, j1 = 0;
  range(c[0], i0, i1);
  if (g.n() == 2) range(c[1], j0, j1);
  for (int j = j0; j <= j1; ++j)
    for (int i = i0; i <= i1; ++i) {
      const std::size_t q = g.flat(i, j);
      const cplx v = fn(g.node(q), t);
      re[q] = v.real();
      im[q] = v.imag();
    }
  return {std::move(re), std::move(im)};
}

}  // namespace

std::pair<SpaceField, SpaceField> leading_term_slice(const SpaceTimeGrid& g, const GoLeadingTerm& lead, int k) {
  return slice_eval(g, lead, k, [&](const Vec2& x, double t) { return lead(x, t); });
}

std::pair<SpaceField, SpaceField> leading_term_dt_slice(const SpaceTimeGrid& g, const GoLeadingTerm& lead, int k) {
  return slice_eval(g, lead, k, [&](const Vec2& x, double t) { return lead.dt(x, t); });
}

RemainderReport remainder(const ProbeSpec& spec, const CoefficientPair& pair, ProbeMode mode) {
  const SpaceTimeGrid& g = pair.grid();
  validate_probe(g, spec, mode);
  const int nt = g.nt();
  const std::size_t S = g.slice_size();
  const double w = std::pow(g.dx(), g.n());
  const ScalarField* a = pair.a.is_zero() ? nullptr : &pair.a;
  const GoLeadingTerm lead(spec, a, g.dt());
  const bool plus = spec.side == ProbeSide::Plus;

  std::vector<double> r2(nt + 1, 0.0), rt2(nt + 1, 0.0);
  // Each real solve contributes its part of |r|² and |∂t r|² per level.
  auto run_part = [&](bool real_part) {
    std::vector<std::vector<double>> ring(3, std::vector<double>(S, 0.0));
    auto observer = [&](int ks, const double* u) {
      const int k = plus ? ks : nt - ks;
      auto [lr, li] = leading_term_slice(g, lead, k);
      const auto& l = real_part ? lr : li;
      auto& cur = ring[ks % 3];
      double s = 0.0;
      for (std::size_t q = 0; q < S; ++q) {
        cur[q] = u[q] - l[q];
        s += cur[q] * cur[q];
      }
      r2[k] += s * w;
      if (ks >= 2) {
        // centered difference at solver level ks−1
        const auto& rp = ring[ks % 3];
        const auto& rm = ring[(ks - 2) % 3];
        double st = 0.0;
        for (std::size_t q = 0; q < S; ++q) {
          const double d = (rp[q] - rm[q]) / (2.0 * g.dt());
          st += d * d;
        }
        rt2[plus ? ks - 1 : nt - (ks - 1)] += st * w;
      }
    };
    SolveOptions opts;
    opts.keep_field = false;
    opts.observer = observer;
    if (plus) {
      BoundarySignal f = probe_dirichlet_trace(g, spec, a, mode);
      const BoundarySignal part = real_part ? f.real_part() : f.imag_part();
      solve_forward(pair, {&part, nullptr, nullptr, nullptr}, opts);
    } else {
      BoundarySignal f = probe_dirichlet_trace(g, spec, a, mode);
      const BoundarySignal part = real_part ? f.real_part() : f.imag_part();
      auto [ur, ui] = leading_term_slice(g, lead, nt);
      auto [vr, vi] = leading_term_dt_slice(g, lead, nt);
      solve_backward(pair, real_part ? ur : ui, real_part ? vr : vi, &part, nullptr, opts);
    }
  };
  run_part(true);
  run_part(false);

  RemainderReport rep;
  rep.r_series.resize(nt + 1);
  rep.rt_series.resize(nt + 1);
  for (int k = 0; k <= nt; ++k) {
    rep.r_series[k] = std::sqrt(r2[k]);
    rep.rt_series[k] = std::sqrt(rt2[k]);
    rep.sup_r = std::max(rep.sup_r, rep.r_series[k]);
    rep.sup_rt = std::max(rep.sup_rt, rep.rt_series[k]);
  }
  rep.r_at_T = rep.r_series[nt];
  rep.rt_at_T = rep.rt_series[nt - 1];
  return rep;
}

}  // namespace lct
