#pragma once

// Closed-form and brute-force references shared by the unit and acceptance tests.

#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include "lct/coefficients.hpp"
#include "lct/wavesolver.hpp"

namespace lct::oracles {

/// u*(x,t) = sin(k(x·ω − t)) solves the undamped equation; boundary and initial data match it.
struct PlaneWave {
  double k = 4.0 * M_PI;
  Vec2 omega{0.8, 0.6};
  double operator()(const Vec2& x, double t) const { return std::sin(k * (dot(x, omega) - t)); }
  double dt(const Vec2& x, double t) const { return -k * std::cos(k * (dot(x, omega) - t)); }
};

struct PlaneWaveData {
  BoundarySignal f;
  SpaceField u0, u1;
};

inline PlaneWaveData plane_wave_data(const SpaceTimeGrid& g, const PlaneWave& w) {
  PlaneWaveData d{BoundarySignal(g, SignalKind::Dirichlet), SpaceField(g), SpaceField(g)};
  for (int k = 0; k <= g.nt(); ++k)
    for (int id = 0; id < d.f.node_count(); ++id) d.f.re(k, id) = w(d.f.position(id), g.time(k));
  for (std::size_t q = 0; q < g.slice_size(); ++q) {
    d.u0[q] = w(g.node(q), 0.0);
    d.u1[q] = w.dt(g.node(q), 0.0);
  }
  return d;
}

/// Discrete L² norm over interior nodes of (u − exact) at the final time.
inline double interior_error(const WaveTrajectory& tr, const PlaneWave& w) {
  const SpaceTimeGrid& g = tr.grid();
  double s = 0.0;
  for (std::size_t q = 0; q < g.slice_size(); ++q) {
    if (g.is_boundary(q)) continue;
    const double e = tr.u_final()[q] - w(g.node(q), g.T());
    s += e * e;
  }
  return std::sqrt(s * std::pow(g.dx(), g.n()));
}

/// H⁻¹ norm by explicit double loops: DFT of the zero-padded box at every frequency,
/// weighted by (1 + |k|²)⁻¹, with the same Parseval scaling as h_minus1_norm.
inline double h_minus1_brute(const std::vector<double>& f, const std::vector<std::size_t>& dims,
                             const std::vector<double>& h, int pad) {
  const std::size_t d = dims.size();
  std::vector<std::size_t> N(d);
  std::size_t total = 1, ptotal = 1;
  for (std::size_t a = 0; a < d; ++a) {
    N[a] = dims[a] * static_cast<std::size_t>(pad);
    total *= dims[a];
    ptotal *= N[a];
  }
  double vol = 1.0;
  for (std::size_t a = 0; a < d; ++a) vol *= h[a];
  double acc = 0.0;
  std::vector<std::size_t> kk(d, 0), xx(d, 0);
  for (std::size_t K = 0; K < ptotal; ++K) {
    std::size_t rem = K;
    double k2 = 0.0;
    for (std::size_t a = d; a-- > 0;) {
      kk[a] = rem % N[a];
      rem /= N[a];
      const double m = kk[a] <= N[a] / 2 ? double(kk[a]) : double(kk[a]) - double(N[a]);
      const double wa = 2.0 * M_PI * m / (N[a] * h[a]);
      k2 += wa * wa;
    }
    std::complex<double> F(0.0, 0.0);
    for (std::size_t X = 0; X < total; ++X) {
      std::size_t r2 = X;
      double ph = 0.0;
      for (std::size_t a = d; a-- > 0;) {
        xx[a] = r2 % dims[a];
        r2 /= dims[a];
        ph += 2.0 * M_PI * double(kk[a]) * double(xx[a]) / double(N[a]);
      }
      F += f[X] * std::complex<double>(std::cos(ph), -std::sin(ph));
    }
    acc += std::norm(F * vol) / (1.0 + k2);
  }
  double dual = 1.0;
  for (std::size_t a = 0; a < d; ++a) dual *= 1.0 / (N[a] * h[a]);
  return std::sqrt(acc * dual);
}

}  // namespace lct::oracles
