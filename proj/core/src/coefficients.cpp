#include "lct/coefficients.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "lct/error.hpp"
#include "lct/fft.hpp"

namespace lct {

double BumpField::operator()(const Vec2& x, double t) const {
  if (spec_.amplitude == 0.0) return 0.0;
  const double dx0 = (x[0] - spec_.center[0]) / spec_.radius_x;
  const double dx1 = n_ == 2 ? (x[1] - spec_.center[1]) / spec_.radius_x : 0.0;
  const double dtt = (t - spec_.tc) / spec_.radius_t;
  const double s2 = dx0 * dx0 + dx1 * dx1 + dtt * dtt;
  if (s2 >= 1.0) return 0.0;
  return spec_.amplitude * std::exp(1.0 - 1.0 / (1.0 - s2));
}

Box BumpField::support() const {
  Box b;
  if (spec_.amplitude == 0.0) return b;
  b.empty = false;
  const double ry = n_ == 2 ? spec_.radius_x : 0.0;
  b.lo = {spec_.center[0] - spec_.radius_x, spec_.center[1] - ry};
  b.hi = {spec_.center[0] + spec_.radius_x, spec_.center[1] + ry};
  b.t0 = spec_.tc - spec_.radius_t;
  b.t1 = spec_.tc + spec_.radius_t;
  return b;
}

double SumField::operator()(const Vec2& x, double t) const {
  double s = 0.0;
  for (const auto& p : parts_) s += p(x, t);
  return s;
}

Box SumField::support() const {
  Box b;
  for (const auto& p : parts_) {
    const Box q = p.support();
    if (q.empty) continue;
    if (b.empty) {
      b = q;
      continue;
    }
    for (int c = 0; c < 2; ++c) {
      b.lo[c] = std::min(b.lo[c], q.lo[c]);
      b.hi[c] = std::max(b.hi[c], q.hi[c]);
    }
    b.t0 = std::min(b.t0, q.t0);
    b.t1 = std::max(b.t1, q.t1);
  }
  return b;
}

SpaceTimeField make_bump(const SpaceTimeGrid& g, const BumpSpec& spec, RegionId constraint) {
  SpaceTimeField f(g);
  if (spec.amplitude == 0.0) return f;
  if (!(spec.radius_x > 0.0 && spec.radius_t > 0.0)) throw Rejected("coefficients", "bump radii must be positive");
  const BumpField bump(spec, g.n());
  const std::size_t S = g.slice_size();
  for (int k = 0; k <= g.nt(); ++k) {
    const double t = g.time(k);
    if (std::abs(t - spec.tc) >= spec.radius_t) continue;
    for (std::size_t q = 0; q < S; ++q) {
      const Vec2 x = g.node(q);
      const double v = bump(x, t);
      if (v == 0.0) continue;
      if (!region_contains(g, constraint, x, t)) {
        std::ostringstream os;
        os << "bump support leaves region " << region_name(constraint) << " at node (k=" << k << ", flat=" << q
           << ") = (" << x[0] << ", " << x[1] << ", t=" << t << ")";
        throw Rejected("coefficients", os.str());
      }
      f.at(k, q) = v;
    }
  }
  // closed support: probe the ellipsoid surface as well
  const int na = 48, nb = 24;
  for (int ib = 0; ib <= nb; ++ib) {
    const double beta = M_PI * ib / nb;
    for (int ia = 0; ia < (g.n() == 2 ? na : 2); ++ia) {
      const double alpha = g.n() == 2 ? 2.0 * M_PI * ia / na : M_PI * ia;
      const double sx = std::sin(beta);
      const Vec2 x = {spec.center[0] + spec.radius_x * sx * std::cos(alpha),
                      g.n() == 2 ? spec.center[1] + spec.radius_x * sx * std::sin(alpha) : 0.0};
      const double t = spec.tc + spec.radius_t * std::cos(beta);
      if (!region_contains(g, constraint, x, t)) {
        std::ostringstream os;
        os << "bump support leaves region " << region_name(constraint) << " at surface point (" << x[0] << ", "
           << x[1] << ", t=" << t << ")";
        throw Rejected("coefficients", os.str());
      }
    }
  }
  return f;
}

CoefficientPair CoefficientPair::zero(const SpaceTimeGrid& g) {
  CoefficientPair p;
  p.a = SpaceTimeField(g);
  p.b = SpaceTimeField(g);
  return p;
}

AdmissibilityReport CoefficientPair::admissibility() const {
  AdmissibilityReport r;
  const auto& g = grid();
  const int nx = g.nx(), nt = g.nt();
  const std::size_t S = g.slice_size();
  const double dx = g.dx(), dt = g.dt();
  auto scan = [&](const SpaceTimeField& f, double& sup, double& d1, double* d2) {
    for (int k = 0; k <= nt; ++k)
      for (std::size_t q = 0; q < S; ++q) {
        const double v = f.at(k, q);
        sup = std::max(sup, std::abs(v));
        const int i = static_cast<int>(g.n() == 2 ? q % nx : q);
        const int j = static_cast<int>(g.n() == 2 ? q / nx : 0);
        if (k + 1 <= nt) d1 = std::max(d1, std::abs(f.at(k + 1, q) - v) / dt);
        if (i + 1 < nx) d1 = std::max(d1, std::abs(f.at(k, q + 1) - v) / dx);
        if (g.n() == 2 && j + 1 < nx) d1 = std::max(d1, std::abs(f.at(k, q + nx) - v) / dx);
        if (!d2) continue;
        if (k >= 1 && k + 1 <= nt)
          *d2 = std::max(*d2, std::abs(f.at(k + 1, q) - 2 * v + f.at(k - 1, q)) / (dt * dt));
        if (i >= 1 && i + 1 < nx)
          *d2 = std::max(*d2, std::abs(f.at(k, q + 1) - 2 * v + f.at(k, q - 1)) / (dx * dx));
        if (g.n() == 2 && j >= 1 && j + 1 < nx)
          *d2 = std::max(*d2, std::abs(f.at(k, q + nx) - 2 * v + f.at(k, q - nx)) / (dx * dx));
      }
  };
  scan(a, r.a_sup, r.a_d1, &r.a_d2);
  scan(b, r.b_sup, r.b_d1, nullptr);
  r.ok = std::max({r.a_sup, r.a_d1, r.a_d2}) <= M1 && std::max(r.b_sup, r.b_d1) <= M2;
  return r;
}

CoefficientPair difference(const CoefficientPair& p2, const CoefficientPair& p1) {
  if (!(p2.grid() == p1.grid())) throw Rejected("coefficients", "pairs live on different grids");
  CoefficientPair d = p2;
  for (std::size_t i = 0; i < d.a.data().size(); ++i) d.a.data()[i] -= p1.a.data()[i];
  for (std::size_t i = 0; i < d.b.data().size(); ++i) d.b.data()[i] -= p1.b.data()[i];
  return d;
}

std::vector<char> region_mask(const SpaceTimeGrid& g, RegionId region) {
  std::vector<char> m(g.size(), 0);
  const std::size_t S = g.slice_size();
  for (int k = 0; k <= g.nt(); ++k)
    for (std::size_t q = 0; q < S; ++q) m[k * S + q] = region_contains(g, region, g.node(q), g.time(k));
  return m;
}

double sup_norm_region(const SpaceTimeField& f, RegionId region) {
  const auto m = region_mask(f.grid(), region);
  bool any = false;
  double s = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i)
    if (m[i]) {
      any = true;
      s = std::max(s, std::abs(f.data()[i]));
    }
  if (!any) throw Rejected("coefficients", "region has no grid nodes");
  return s;
}

double l2_norm_region(const SpaceTimeField& f, RegionId region) {
  const auto& g = f.grid();
  const auto m = region_mask(g, region);
  const std::size_t S = g.slice_size();
  const int nx = g.nx();
  auto w1 = [](int i, int N) { return (i == 0 || i == N - 1) ? 0.5 : 1.0; };
  double s = 0.0;
  bool any = false;
  for (int k = 0; k <= g.nt(); ++k)
    for (std::size_t q = 0; q < S; ++q) {
      const std::size_t id = k * S + q;
      if (!m[id]) continue;
      any = true;
      double w = w1(k, g.nt() + 1) * w1(static_cast<int>(g.n() == 2 ? q % nx : q), nx);
      if (g.n() == 2) w *= w1(static_cast<int>(q / nx), nx);
      s += w * f.data()[id] * f.data()[id];
    }
  if (!any) throw Rejected("coefficients", "region has no grid nodes");
  return std::sqrt(s * g.dt() * std::pow(g.dx(), g.n()));
}

double l2_norm_box(std::span<const double> data, std::span<const double> spacing) {
  double dv = 1.0;
  for (double h : spacing) dv *= h;
  double s = 0.0;
  for (double v : data) s += v * v;
  return std::sqrt(s * dv);
}

double h_minus1_norm(std::span<const double> data, std::span<const std::size_t> dims,
                     std::span<const double> spacing, int pad) {
  if (dims.size() != spacing.size() || dims.empty()) throw Rejected("coefficients", "shape mismatch");
  if (pad < 1) throw Rejected("coefficients", "pad factor must be >= 1");
  std::size_t total = 1;
  for (auto d : dims) total *= d;
  if (total != data.size()) throw Rejected("coefficients", "shape mismatch");
  const std::size_t D = dims.size();
  std::vector<int> P(D);
  double dv = 1.0, vol = 1.0;
  for (std::size_t d = 0; d < D; ++d) {
    P[d] = static_cast<int>(dims[d]) * pad;
    dv *= spacing[d];
    vol *= P[d] * spacing[d];
  }
  std::size_t ptotal = 1;
  for (int p : P) ptotal *= static_cast<std::size_t>(p);
  std::vector<double> padded(ptotal, 0.0);
  // copy with the original block in the low corner
  std::vector<std::size_t> idx(D, 0);
  for (std::size_t lin = 0; lin < total; ++lin) {
    std::size_t rem = lin, plin = 0;
    for (std::size_t d = D; d-- > 0;) {
      idx[d] = rem % dims[d];
      rem /= dims[d];
    }
    for (std::size_t d = 0; d < D; ++d) plin = plin * P[d] + idx[d];
    padded[plin] = data[lin];
  }
  const auto spec = fft::rdft(padded, P);
  const int last = P[D - 1] / 2 + 1;
  double sum = 0.0;
  std::vector<int> m(D, 0);
  for (std::size_t lin = 0; lin < spec.size(); ++lin) {
    std::size_t rem = lin;
    for (std::size_t d = D; d-- > 0;) {
      const int sz = d + 1 == D ? last : P[d];
      m[d] = static_cast<int>(rem % sz);
      rem /= sz;
    }
    double z2 = 0.0;
    for (std::size_t d = 0; d < D; ++d) {
      const int mm = m[d] < (P[d] + 1) / 2 ? m[d] : m[d] - P[d];
      const double z = 2.0 * M_PI * mm / (P[d] * spacing[d]);
      z2 += z * z;
    }
    const int ml = m[D - 1];
    const double mult = (ml == 0 || (P[D - 1] % 2 == 0 && ml == P[D - 1] / 2)) ? 1.0 : 2.0;
    sum += mult * std::norm(spec[lin]) / (1.0 + z2);
  }
  return std::sqrt(sum * dv * dv / vol);
}

double h_minus1_norm(const SpaceTimeField& f, int pad) {
  const auto& g = f.grid();
  std::vector<std::size_t> dims{static_cast<std::size_t>(g.nt() + 1)};
  std::vector<double> sp{g.dt()};
  for (int d = 0; d < g.n(); ++d) {
    dims.push_back(static_cast<std::size_t>(g.nx()));
    sp.push_back(g.dx());
  }
  return h_minus1_norm(f.data(), dims, sp, pad);
}

}  // namespace lct
