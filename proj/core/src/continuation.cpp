#include "lct/continuation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>

#include "lct/csv.hpp"
#include "lct/fft.hpp"

namespace lct {

using cplx = std::complex<double>;

double growth_bound(double J, int n) { return M_E * std::pow(6.0 / J, n); }
double residue_bound(int n) { return 2.0 * std::pow(7.0 / 8.0, n); }

NodeCount optimal_node_count(double J, double sup_g) {
  if (!(J > 0.0) || J > 0.4 + 1e-12) throw Rejected("continuation", "optimal_node_count needs 0 < |J| <= 2/5");
  if (!(sup_g > 0.0) || sup_g > 1.0) throw Rejected("continuation", "optimal_node_count needs 0 < sup|g| <= 1");
  NodeCount c;
  c.x0 = std::log(std::log(8.0 / 7.0) / (M_E * sup_g * std::log(6.0 / J))) / std::log(48.0 / (7.0 * J));
  if (c.x0 < 0.0) {
    c.useless = true;
    return c;
  }
  c.n = static_cast<int>(std::lround(c.x0));
  return c;
}

namespace {

double theta_of(double J) { return std::log(8.0 / 7.0) / std::log(48.0 / (7.0 * J)); }

cplx eval(const LagrangeProblem& p, double z) { return lagrange_extend(p, cplx(z, 0.0)); }

// Node count for a data error `eps` against the disc bound M.
int node_count_for(double J, double eps, double M, int cap) {
  const double ratio = M > 0.0 ? std::min(1.0, std::max(eps / M, 1e-300)) : 1.0;
  const NodeCount c = optimal_node_count(std::min(J, 0.4), ratio);
  return std::min(cap, c.useless ? 0 : c.n);
}

LagrangeProblem subsample(const std::vector<double>& z, const std::vector<cplx>& g, std::size_t first,
                          std::size_t avail, int n, double d) {
  const std::size_t stride = std::max<std::size_t>(1, avail / static_cast<std::size_t>(n + 1));
  LagrangeProblem p;
  p.j_lo = z[first];
  p.j_hi = z[first] + static_cast<double>((n + 1) * stride) * d;
  for (int q = 0; q <= n; ++q) {
    p.nodes.push_back(z[first + q * stride]);
    p.values.push_back(g[first + q * stride]);
  }
  return p;
}

void check_certificate(const std::vector<double>& s, const std::vector<cplx>& g, const ChainOptions& o) {
  const double ds = s[1] - s[0];
  const double slack = 1.05;
  const double M = o.M;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (std::abs(g[i]) > M * (1.0 + 1e-9) + o.noise)
      throw Rejected("continuation", "certificate violated: |g| > M at s=" + std::to_string(s[i]));
    if (i == 0 || i + 1 == g.size()) continue;
    const double d1 = std::abs(g[i + 1] - g[i - 1]) / (2.0 * ds);
    if (d1 > slack * M / (2.0 * o.rho) + o.noise / ds)
      throw Rejected("continuation", "certificate violated: |g'| > M/(2rho) at s=" + std::to_string(s[i]));
    const double d2 = std::abs(g[i + 1] - 2.0 * g[i] + g[i - 1]) / (ds * ds);
    if (d2 > slack * 2.0 * M / std::pow(2.0 * o.rho, 2) + 4.0 * o.noise / (ds * ds))
      throw Rejected("continuation", "certificate violated: |g''| > 2M/(2rho)^2 at s=" + std::to_string(s[i]));
  }
}

}  // namespace

ChainResult three_circle_chain(const std::vector<double>& s, const std::vector<cplx>& g, const ChainOptions& o) {
  if (s.size() < 2 || s.size() != g.size()) throw Rejected("continuation", "chain needs at least two matching samples");
  if (!(o.rho > 0.0) || !(o.M >= 0.0)) throw Rejected("continuation", "chain needs rho > 0 and M >= 0");
  const double ds = s[1] - s[0];
  if (!(ds > 0.0)) throw Rejected("continuation", "empty known interval");
  for (std::size_t i = 1; i < s.size(); ++i)
    if (std::abs(s[i] - s[i - 1] - ds) > 1e-9 * ds) throw Rejected("continuation", "chain samples must be equispaced");
  if (o.check_certificate) check_certificate(s, g, o);

  const double I_lo = s.front(), I_hi = s.back() + ds;
  const double rho = o.rho;
  ChainResult res;
  res.n0 = static_cast<int>(std::ceil(5.0 / rho - 1e-9));
  std::vector<double> centers(res.n0);
  for (int j = 0; j < res.n0; ++j) centers[j] = -1.0 + (2.0 * (j + 1) - 1.0) * rho / 5.0;

  // Seed: the window whose J-range [c − ρ/5, c + ρ/5] overlaps I the most.
  int seed = -1;
  double best = 0.0;
  for (int j = 0; j < res.n0; ++j) {
    const double ov = std::min(I_hi, centers[j] + rho / 5.0) - std::max(I_lo, centers[j] - rho / 5.0);
    if (ov > best) {
      best = ov;
      seed = j;
    }
  }
  if (seed < 0) throw Rejected("continuation", "known interval misses every window of the chain");
  res.seed = seed;
  res.windows.resize(res.n0);

  const double eps0 = o.noise + 1e-15 * o.M;
  {
    const double c = centers[seed];
    const double tol = 1e-12 * ds;
    std::vector<double> z(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) z[i] = (s[i] - c) / rho;
    std::size_t first = s.size(), avail = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] < c - rho / 5.0 - tol || s[i] + ds > c + rho / 5.0 + tol) continue;
      if (first == s.size()) first = i;
      ++avail;
    }
    if (avail == 0) throw Rejected("continuation", "no seed sample fits inside the seed window");
    const double Jfull = static_cast<double>(avail) * ds / rho;
    const int n = node_count_for(Jfull, eps0, o.M, o.n_cap);
    if (static_cast<int>(avail) < n + 1)
      throw Rejected("continuation", "insufficient node density: seed window holds " + std::to_string(avail) +
                                         " samples, " + std::to_string(n + 1) + " required");
    ChainWindow& w = res.windows[seed];
    w.index = seed + 1;
    w.center = c;
    w.seed = true;
    w.n = n;
    w.problem = subsample(z, g, first, avail, n, ds / rho);
    w.problem_lower = subsample(z, g, first, avail, std::max(0, n - 1), ds / rho);
    w.J = w.problem.length();
  }

  auto finish = [&](ChainWindow& w, double eps_in) {
    w.eps_in = eps_in;
    w.bound_A47 = growth_bound(w.J, w.n) * eps_in;
    w.bound_A48 = residue_bound(w.n) * o.M;
    w.theta = theta_of(w.J);
  };
  finish(res.windows[seed], eps0);

  auto step = [&](int from, int to) {
    const ChainWindow& prev = res.windows[from];
    ChainWindow& w = res.windows[to];
    w.index = to + 1;
    w.center = centers[to];
    // Known part in local coordinates: the slice of the previous window's
    // extension disc closest to it.
    const double lo = to > from ? -0.2 : 0.1;
    const double hi = to > from ? -0.1 : 0.2;
    const double eps_in = prev.bound_A47 + prev.bound_A48;
    w.n = std::max(o.n_min, node_count_for(hi - lo, eps_in, o.M, o.n_cap));
    const double shift = (w.center - prev.center) / rho;
    w.problem = make_equispaced(lo, hi, w.n, [&](double z) { return eval(prev.problem, z + shift); });
    w.problem_lower =
        make_equispaced(lo, hi, std::max(0, w.n - 1), [&](double z) { return eval(prev.problem_lower, z + shift); });
    w.J = hi - lo;
    finish(w, eps_in);
  };
  for (int j = seed + 1; j < res.n0; ++j) step(j - 1, j);
  for (int j = seed - 1; j >= 0; --j) step(j + 1, j);

  res.gamma = 1.0;
  for (const auto& w : res.windows) res.gamma *= w.theta;
  return res;
}

ChainResult three_circle_chain(const std::function<cplx(double)>& g, double i_lo, double i_hi, int samples,
                               const ChainOptions& opts) {
  if (!(i_hi > i_lo) || samples < 2) throw Rejected("continuation", "empty known interval");
  std::vector<double> s(samples);
  std::vector<cplx> v(samples);
  for (int i = 0; i < samples; ++i) {
    s[i] = i_lo + i * (i_hi - i_lo) / samples;
    v[i] = g(s[i]);
  }
  return three_circle_chain(s, v, opts);
}

namespace {

const ChainWindow& window_for(const ChainResult& r, double s) {
  if (r.windows.empty()) throw Rejected("continuation", "empty chain");
  const double c0 = r.windows.front().center;
  const double step = r.windows.size() > 1 ? r.windows[1].center - c0 : 1.0;
  int j = static_cast<int>(std::lround((s - c0) / step));
  j = std::clamp(j, 0, static_cast<int>(r.windows.size()) - 1);
  return r.windows[j];
}

double chain_rho(const ChainResult& r) {
  // centre spacing is 2ρ/5
  return r.windows.size() > 1 ? 2.5 * (r.windows[1].center - r.windows[0].center)
                              : 5.0 * (r.windows[0].center + 1.0);
}

}  // namespace

cplx ChainResult::operator()(double s) const {
  const ChainWindow& w = window_for(*this, s);
  return eval(w.problem, (s - w.center) / chain_rho(*this));
}

double ChainResult::confidence(double s, double floor) const {
  const ChainWindow& w = window_for(*this, s);
  const double z = (s - w.center) / chain_rho(*this);
  const cplx a = eval(w.problem, z), b = eval(w.problem_lower, z);
  const double den = std::max(std::abs(a), floor);
  if (!(den > 0.0)) return 1.0;
  return std::clamp(1.0 - std::abs(a - b) / den, 0.0, 1.0);
}

double ChainResult::bound(double s) const {
  const ChainWindow& w = window_for(*this, s);
  return w.bound_A47 + w.bound_A48;
}

std::size_t MultiDimResult::index(const std::vector<int>& idx) const {
  std::size_t q = 0;
  for (int j = 0; j < d; ++j) q = q * grid.size() + static_cast<std::size_t>(idx[j]);
  return q;
}

MultiDimResult multidim_extend(const MultiDimProblem& p) {
  const int d = p.d;
  if (d < 1) throw Rejected("continuation", "dimension must be positive");
  if (static_cast<int>(p.lo.size()) != d || static_cast<int>(p.hi.size()) != d)
    throw Rejected("continuation", "one known interval per axis is required");
  for (int j = 0; j < d; ++j)
    if (!(p.hi[j] > p.lo[j])) throw Rejected("continuation", "axis " + std::to_string(j) + " has an empty interval");
  if (!(p.axis.size() == 1 || static_cast<int>(p.axis.size()) == d))
    throw Rejected("continuation", "per-axis certificates must have size 1 or d");
  if (!p.F) throw Rejected("continuation", "missing function");
  const int S = p.samples, G = p.target;
  if (S < 2 || G < 2) throw Rejected("continuation", "need at least two samples and targets per axis");

  MultiDimResult r;
  r.d = d;
  r.grid.resize(G);
  for (int q = 0; q < G; ++q) r.grid[q] = -1.0 + 2.0 * q / (G - 1);

  std::vector<std::vector<double>> coords(d);
  std::vector<std::vector<double>> samp(d);
  for (int j = 0; j < d; ++j) {
    samp[j].resize(S);
    for (int q = 0; q < S; ++q) samp[j][q] = p.lo[j] + q * (p.hi[j] - p.lo[j]) / S;
    coords[j] = samp[j];
  }
  auto sizes = [&]() {
    std::vector<std::size_t> n(d);
    for (int j = 0; j < d; ++j) n[j] = coords[j].size();
    return n;
  };
  std::vector<std::size_t> dims = sizes();
  std::size_t total = 1;
  for (auto n : dims) total *= n;
  std::vector<cplx> data(total);
  std::vector<double> x(d);
  for (std::size_t q = 0; q < total; ++q) {
    std::size_t rem = q;
    for (int j = d - 1; j >= 0; --j) {
      x[j] = coords[j][rem % dims[j]];
      rem /= dims[j];
    }
    data[q] = p.F(x);
  }

  r.axis_gamma.assign(d, 1.0);
  for (int j = 0; j < d; ++j) {
    const ChainOptions& opt = p.axis.size() == 1 ? p.axis[0] : p.axis[j];
    std::vector<std::size_t> nd = dims;
    nd[j] = G;
    std::size_t ntot = 1;
    for (auto n : nd) ntot *= n;
    std::vector<cplx> out(ntot);
    // stride of axis j (row-major, last axis fastest) before and after the update
    std::size_t inner = 1;
    for (int k = j + 1; k < d; ++k) inner *= dims[k];
    std::size_t outer = 1;
    for (int k = 0; k < j; ++k) outer *= dims[k];
    std::vector<cplx> line(dims[j]);
    bool first = true;
    for (std::size_t a = 0; a < outer; ++a)
      for (std::size_t b = 0; b < inner; ++b) {
        for (std::size_t q = 0; q < dims[j]; ++q) line[q] = data[(a * dims[j] + q) * inner + b];
        const ChainResult ch = three_circle_chain(coords[j], line, opt);
        if (first) {
          r.axis_gamma[j] = ch.gamma;
          first = false;
        }
        for (int q = 0; q < G; ++q) out[(a * G + q) * inner + b] = ch(r.grid[q]);
      }
    data.swap(out);
    dims = nd;
    coords[j] = r.grid;
  }
  r.values = std::move(data);
  r.in_ball.resize(r.values.size());
  for (std::size_t q = 0; q < r.values.size(); ++q) {
    std::size_t rem = q;
    double s2 = 0.0;
    for (int j = d - 1; j >= 0; --j) {
      const double c = r.grid[rem % G];
      s2 += c * c;
      rem /= G;
    }
    r.in_ball[q] = s2 <= 1.0 + 1e-12;
  }
  r.gamma = 1.0;
  for (double g : r.axis_gamma) r.gamma *= g;
  return r;
}

namespace {

struct LatticeKey {
  int m1, m2, mt;
  bool operator<(const LatticeKey& o) const {
    return std::tie(m1, m2, mt) < std::tie(o.m1, o.m2, o.mt);
  }
};

int lattice_round(double v, double step, const char* what) {
  const double q = v / step;
  const double r = std::round(q);
  if (std::abs(q - r) > 1e-6) throw Rejected("continuation", std::string(what) + " sample off the lattice");
  return static_cast<int>(r);
}

FilledSpectrum fill_lagrange(const std::vector<SpectralSample>& samples, const FillOptions& o) {
  const ReconBox& B = o.box;
  const double dxi = B.dxi(), dtau = B.dtau(), alpha = o.alpha;
  std::map<LatticeKey, cplx> known;
  double vmax = 0.0;
  for (const auto& s : samples) {
    if (!in_E(s.xi, s.tau)) throw Rejected("continuation", "lagrange backend takes samples inside E only");
    const LatticeKey k{lattice_round(s.xi[0], dxi, "xi1"), lattice_round(s.xi[1], dxi, "xi2"),
                       lattice_round(s.tau, dtau, "tau")};
    known[k] = s.value;
    vmax = std::max(vmax, std::abs(s.value));
  }
  const double L1 = o.l1_bound > 0.0 ? o.l1_bound : 2.0 * vmax;
  const double tc = 0.5 * (o.t_lo + o.t_hi), Rt = 0.5 * (o.t_hi - o.t_lo);
  const double Rx = B.L;
  ChainOptions co;
  co.rho = o.rho;
  co.noise = o.noise;
  co.n_cap = o.n_cap;
  co.check_certificate = false;

  FilledSpectrum out;
  out.box = B;
  out.alpha = alpha;
  const int K1 = static_cast<int>(std::floor(alpha / dxi)), KT = static_cast<int>(std::floor(alpha / dtau));
  std::map<LatticeKey, std::pair<cplx, double>> filled;
  int required = 0;

  // Pass 1: lines along τ at fixed ξ ≠ 0, s = τ/α, demodulated about the temporal centre.
  for (int m2 = -K1; m2 <= K1; ++m2)
    for (int m1 = -K1; m1 <= K1; ++m1) {
      if (m1 == 0 && m2 == 0) continue;
      const Vec2 xi{m1 * dxi, m2 * dxi};
      const double nx = norm(xi);
      if (nx > alpha) continue;
      std::vector<double> s;
      std::vector<cplx> g;
      for (int mt = -KT; mt <= KT; ++mt) {
        auto it = known.find({m1, m2, mt});
        if (it == known.end()) continue;
        const double tau = mt * dtau;
        s.push_back(tau / alpha);
        g.push_back(it->second * cplx(std::cos(tau * tc), std::sin(tau * tc)));
      }
      for (int mt = -KT; mt <= KT; ++mt) {
        auto it = known.find({m1, m2, mt});
        if (it != known.end()) filled[{m1, m2, mt}] = {it->second, 1.0};
      }
      if (s.size() < 2) continue;
      co.M = L1 * std::exp(2.0 * o.rho * alpha * Rt);
      ChainResult ch;
      try {
        ch = three_circle_chain(s, g, co);
      } catch (const Rejected& e) {
        const std::string msg = e.what();
        const auto pos = msg.find(", ");
        if (pos != std::string::npos) required = std::max(required, std::atoi(msg.c_str() + pos + 2));
        continue;
      }
      ++out.lines;
      out.gamma_min = std::min(out.gamma_min, ch.gamma);
      for (int mt = -KT; mt <= KT; ++mt) {
        const double tau = mt * dtau;
        if (nx * nx + tau * tau > alpha * alpha) continue;
        if (filled.count({m1, m2, mt})) continue;
        const double sv = tau / alpha;
        const cplx ph(std::cos(tau * tc), -std::sin(tau * tc));
        filled[{m1, m2, mt}] = {ch(sv) * ph, ch.confidence(sv, 1e-3 * vmax)};
      }
    }
  // Pass 2: ξ = 0 from lines along ξ₁ at ξ₂ = 0, seeded on the E part ξ₁ > |τ|.
  for (int mt = -KT; mt <= KT; ++mt) {
    const double tau = mt * dtau;
    if (std::abs(tau) > alpha) continue;
    std::vector<double> s;
    std::vector<cplx> g;
    for (int m1 = 1; m1 <= K1; ++m1) {
      auto it = known.find({m1, 0, mt});
      if (it == known.end()) continue;
      if (!s.empty() && std::abs(m1 * dxi / alpha - s.back() - dxi / alpha) > 1e-9) break;
      s.push_back(m1 * dxi / alpha);
      g.push_back(it->second);
    }
    if (s.size() < 2) continue;
    co.M = L1 * std::exp(2.0 * o.rho * alpha * Rx);
    try {
      const ChainResult ch = three_circle_chain(s, g, co);
      ++out.lines;
      out.gamma_min = std::min(out.gamma_min, ch.gamma);
      filled[{0, 0, mt}] = {ch(0.0), ch.confidence(0.0, 1e-3 * vmax)};
    } catch (const Rejected&) {
    }
  }
  if (out.lines == 0 && !samples.empty())
    throw Rejected("continuation", required > 0 ? "insufficient node density on every line: " +
                                                      std::to_string(required) + " samples per seed window required"
                                                : "insufficient node density: no line has samples in its seed window");
  for (const auto& [k, v] : filled) {
    SpectralSample s;
    s.xi = {k.m1 * dxi, k.m2 * dxi};
    s.tau = k.mt * dtau;
    s.value = v.first;
    s.in_E = in_E(s.xi, s.tau);
    s.confidence = v.second;
    out.samples.push_back(s);
    out.index.push_back({k.m1, k.m2, k.mt});
  }
  return out;
}

// Normal-equation operator of the regularized fit. Unknowns are the box nodes
// allowed by the support mask; data are samples grouped by ξ-lattice point.
class SpectralModel {
 public:
  SpectralModel(const std::vector<SpectralSample>& samples, const FillOptions& o, double sample_dxi)
      : box_(o.box), n_(o.box.nx) {
    const ReconBox& B = box_;
    if (!(sample_dxi > 0.0)) throw Rejected("continuation", "regularized backend needs the sample xi spacing");
    mask_ = o.support.empty() ? std::vector<char>(B.size(), 1) : o.support;
    if (mask_.size() != B.size()) throw Rejected("continuation", "support mask does not match the box");
    for (int k = 0; k < B.nt; ++k)
      for (int q = 0; q < n_ * n_; ++q)
        if (mask_[static_cast<std::size_t>(k) * n_ * n_ + q]) {
          levels_.push_back(k);
          break;
        }
    // ξ lattice covering the samples
    int kmax = 0;
    for (const auto& s : samples) {
      const int m1 = lattice_round(s.xi[0], sample_dxi, "xi1"), m2 = lattice_round(s.xi[1], sample_dxi, "xi2");
      kmax = std::max({kmax, std::abs(m1), std::abs(m2)});
    }
    K_ = kmax;
    const int W = 2 * K_ + 1;
    e1_.assign(static_cast<std::size_t>(W) * n_, cplx(0.0));
    for (int m = -K_; m <= K_; ++m)
      for (int i = 0; i < n_; ++i) {
        const double ph = -(-B.L + i * B.hx()) * m * sample_dxi;
        e1_[static_cast<std::size_t>(m + K_) * n_ + i] = {std::cos(ph), std::sin(ph)};
      }
    const double dV = B.hx() * B.hx() * B.ht();
    for (const auto& s : samples) {
      Row r;
      r.m1 = lattice_round(s.xi[0], sample_dxi, "xi1") + K_;
      r.m2 = lattice_round(s.xi[1], sample_dxi, "xi2") + K_;
      r.tau = s.tau;
      r.c = dV * (o.transfer ? o.transfer(s.xi) : 1.0);
      r.d = s.value;
      rows_.push_back(r);
    }
    et_.resize(rows_.size() * levels_.size());
    for (std::size_t q = 0; q < rows_.size(); ++q)
      for (std::size_t l = 0; l < levels_.size(); ++l) {
        const double ph = -B.time(levels_[l]) * rows_[q].tau;
        et_[q * levels_.size() + l] = {std::cos(ph), std::sin(ph)};
      }
  }

  std::size_t unknowns() const { return mask_.size(); }
  const std::vector<char>& mask() const { return mask_; }

  // y = A u (complex, one per row)
  void forward(const std::vector<double>& u, std::vector<cplx>& y) const {
    const int W = 2 * K_ + 1;
    y.assign(rows_.size(), cplx(0.0));
    std::vector<cplx> P(static_cast<std::size_t>(W) * n_), F(static_cast<std::size_t>(W) * W);
    for (std::size_t l = 0; l < levels_.size(); ++l) {
      const double* U = u.data() + static_cast<std::size_t>(levels_[l]) * n_ * n_;
      // P[m1][j] = Σ_i U[j][i] e1[m1][i]
      for (int m1 = 0; m1 < W; ++m1) {
        const cplx* e = e1_.data() + static_cast<std::size_t>(m1) * n_;
        for (int j = 0; j < n_; ++j) {
          cplx acc(0.0);
          const double* row = U + static_cast<std::size_t>(j) * n_;
          for (int i = 0; i < n_; ++i) acc += row[i] * e[i];
          P[static_cast<std::size_t>(m1) * n_ + j] = acc;
        }
      }
      // F[m2][m1] = Σ_j P[m1][j] e1[m2][j]
      for (int m2 = 0; m2 < W; ++m2) {
        const cplx* e = e1_.data() + static_cast<std::size_t>(m2) * n_;
        for (int m1 = 0; m1 < W; ++m1) {
          cplx acc(0.0);
          const cplx* p = P.data() + static_cast<std::size_t>(m1) * n_;
          for (int j = 0; j < n_; ++j) acc += p[j] * e[j];
          F[static_cast<std::size_t>(m2) * W + m1] = acc;
        }
      }
      for (std::size_t q = 0; q < rows_.size(); ++q)
        y[q] += F[static_cast<std::size_t>(rows_[q].m2) * W + rows_[q].m1] * et_[q * levels_.size() + l];
    }
    for (std::size_t q = 0; q < rows_.size(); ++q) y[q] *= rows_[q].c;
  }

  // u = Re A^H y, masked
  void adjoint(const std::vector<cplx>& y, std::vector<double>& u) const {
    const int W = 2 * K_ + 1;
    u.assign(mask_.size(), 0.0);
    std::vector<cplx> G(static_cast<std::size_t>(W) * W), Q(static_cast<std::size_t>(W) * n_);
    for (std::size_t l = 0; l < levels_.size(); ++l) {
      std::fill(G.begin(), G.end(), cplx(0.0));
      for (std::size_t q = 0; q < rows_.size(); ++q)
        G[static_cast<std::size_t>(rows_[q].m2) * W + rows_[q].m1] +=
            rows_[q].c * y[q] * std::conj(et_[q * levels_.size() + l]);
      // Q[m2][i] = Σ_m1 G[m2][m1] conj(e1[m1][i])
      for (int m2 = 0; m2 < W; ++m2)
        for (int i = 0; i < n_; ++i) {
          cplx acc(0.0);
          for (int m1 = 0; m1 < W; ++m1)
            acc += G[static_cast<std::size_t>(m2) * W + m1] * std::conj(e1_[static_cast<std::size_t>(m1) * n_ + i]);
          Q[static_cast<std::size_t>(m2) * n_ + i] = acc;
        }
      double* U = u.data() + static_cast<std::size_t>(levels_[l]) * n_ * n_;
      for (int j = 0; j < n_; ++j)
        for (int i = 0; i < n_; ++i) {
          cplx acc(0.0);
          for (int m2 = 0; m2 < W; ++m2)
            acc += Q[static_cast<std::size_t>(m2) * n_ + i] * std::conj(e1_[static_cast<std::size_t>(m2) * n_ + j]);
          U[static_cast<std::size_t>(j) * n_ + i] = acc.real();
        }
    }
    for (std::size_t p = 0; p < u.size(); ++p)
      if (!mask_[p]) u[p] = 0.0;
  }

  // Graph Laplacian of the box grid restricted to the mask (zero outside),
  // scaled so that its spectrum lies in [0, 1].
  void laplacian(const std::vector<double>& u, std::vector<double>& out) const {
    const ReconBox& B = box_;
    out.assign(u.size(), 0.0);
    const std::size_t S = static_cast<std::size_t>(n_) * n_;
    for (int k = 0; k < B.nt; ++k)
      for (int j = 0; j < n_; ++j)
        for (int i = 0; i < n_; ++i) {
          const std::size_t p = k * S + static_cast<std::size_t>(j) * n_ + i;
          if (!mask_[p]) continue;
          double acc = 0.0;
          auto nb = [&](bool ok, std::size_t q) { acc += u[p] - (ok ? u[q] : 0.0); };
          nb(i > 0, p - 1);
          nb(i + 1 < n_, p + 1);
          nb(j > 0, p - n_);
          nb(j + 1 < n_, p + n_);
          nb(k > 0, p - S);
          nb(k + 1 < B.nt, p + S);
          out[p] = acc / 12.0;
        }
  }

  std::vector<double> rhs() const {
    std::vector<cplx> d(rows_.size());
    for (std::size_t q = 0; q < rows_.size(); ++q) d[q] = rows_[q].d;
    std::vector<double> b;
    adjoint(d, b);
    return b;
  }

 private:
  struct Row {
    int m1, m2;
    double tau, c;
    cplx d;
  };
  ReconBox box_;
  int n_;
  int K_ = 0;
  std::vector<char> mask_;
  std::vector<int> levels_;
  std::vector<cplx> e1_;
  std::vector<Row> rows_;
  std::vector<cplx> et_;
};

double dotv(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

std::vector<cplx> box_spectrum(const ReconBox& B, const std::vector<double>& u) {
  std::vector<cplx> data(u.begin(), u.end());
  const int dims[3] = {B.nt, B.nx, B.nx};
  fft::dft(data, dims);
  return data;
}

void lattice_table(const ReconBox& B, double alpha, const std::vector<cplx>& spec, FilledSpectrum& out,
                   const std::function<double(const Vec2&, double)>& confidence) {
  const double dxi = B.dxi(), dtau = B.dtau();
  const double dV = B.hx() * B.hx() * B.ht();
  for (int kt = 0; kt < B.nt; ++kt)
    for (int k2 = 0; k2 < B.nx; ++k2)
      for (int k1 = 0; k1 < B.nx; ++k1) {
        const int m1 = k1 <= B.nx / 2 ? k1 : k1 - B.nx;
        const int m2 = k2 <= B.nx / 2 ? k2 : k2 - B.nx;
        const int mt = kt <= B.nt / 2 ? kt : kt - B.nt;
        const Vec2 xi{m1 * dxi, m2 * dxi};
        const double tau = mt * dtau;
        if (dot(xi, xi) + tau * tau > alpha * alpha) continue;
        // shift from the box origin (−L, −L, t0)
        const double ph = B.L * (xi[0] + xi[1]) - B.t0 * tau;
        SpectralSample s;
        s.xi = xi;
        s.tau = tau;
        s.value = spec[(static_cast<std::size_t>(kt) * B.nx + k2) * B.nx + k1] * cplx(std::cos(ph), std::sin(ph)) * dV;
        s.in_E = in_E(xi, tau);
        s.confidence = confidence(xi, tau);
        out.samples.push_back(s);
        out.index.push_back({m1, m2, mt});
      }
}

FilledSpectrum fill_regularized(const std::vector<SpectralSample>& samples, const FillOptions& o, double sample_dxi) {
  FilledSpectrum out;
  out.box = o.box;
  out.alpha = o.alpha;
  const SpectralModel model(samples, o, sample_dxi);
  const std::size_t N = model.unknowns();
  std::vector<cplx> tmp;
  std::vector<double> t1, t2;
  auto AtA = [&](const std::vector<double>& u, std::vector<double>& y) {
    model.forward(u, tmp);
    model.adjoint(tmp, y);
  };
  // Largest eigenvalue of A*A by power iteration, for scale-free penalties.
  std::vector<double> v(N, 0.0);
  for (std::size_t p = 0; p < N; ++p) v[p] = model.mask()[p] ? 1.0 + 0.01 * static_cast<double>(p % 7) : 0.0;
  double lmax = 0.0;
  for (int it = 0; it < 20; ++it) {
    const double nv = std::sqrt(dotv(v, v));
    if (!(nv > 0.0)) break;
    for (auto& x : v) x /= nv;
    AtA(v, t1);
    lmax = dotv(v, t1);
    v.swap(t1);
  }
  if (!(lmax > 0.0)) lmax = 1.0;
  const double mu = o.reg * lmax, nu = o.reg_grad * lmax;
  auto normal = [&](const std::vector<double>& u, std::vector<double>& y) {
    AtA(u, y);
    model.laplacian(u, t2);
    for (std::size_t p = 0; p < N; ++p) y[p] += model.mask()[p] ? mu * u[p] + nu * t2[p] : 0.0;
  };
  // Conjugate gradients on the normal equations.
  const std::vector<double> b = model.rhs();
  std::vector<double> x(N, 0.0), r = b, p = b, Ap;
  double rr = dotv(r, r);
  const double bb = rr;
  int it = 0;
  if (bb > 0.0)
    for (; it < o.max_iter; ++it) {
      normal(p, Ap);
      const double pAp = dotv(p, Ap);
      if (!(pAp > 0.0)) break;
      const double a = rr / pAp;
      for (std::size_t q = 0; q < N; ++q) {
        x[q] += a * p[q];
        r[q] -= a * Ap[q];
      }
      const double rr2 = dotv(r, r);
      if (std::sqrt(rr2 / bb) < o.tol) {
        rr = rr2;
        ++it;
        break;
      }
      const double beta = rr2 / rr;
      rr = rr2;
      for (std::size_t q = 0; q < N; ++q) p[q] = r[q] + beta * p[q];
    }
  out.iterations = it;
  out.residual = bb > 0.0 ? std::sqrt(rr / bb) : 0.0;
  out.field = x;
  const double step = std::max(o.box.dxi(), o.box.dtau());
  lattice_table(o.box, o.alpha, box_spectrum(o.box, x), out, [&](const Vec2& xi, double tau) {
    // decays with the distance from E in lattice units
    const double gap = std::abs(tau) - norm(xi);
    return gap < 0.0 ? 1.0 : std::exp(-gap / step);
  });
  return out;
}

}  // namespace

FilledSpectrum fill_spectrum(const std::vector<SpectralSample>& samples, const FillOptions& opts, double sample_dxi) {
  if (!(opts.alpha > 0.0)) throw Rejected("continuation", "alpha must be positive");
  if (opts.box.nx < 2 || opts.box.nt < 2) throw Rejected("continuation", "reconstruction box too small");
  return opts.backend == FillBackend::Lagrange ? fill_lagrange(samples, opts)
                                               : fill_regularized(samples, opts, sample_dxi);
}

std::vector<double> spectrum_to_field(const FilledSpectrum& s) {
  const ReconBox& B = s.box;
  std::vector<cplx> data(B.size(), cplx(0.0));
  const double dV = B.hx() * B.hx() * B.ht();
  for (std::size_t q = 0; q < s.samples.size(); ++q) {
    const auto& m = s.index[q];
    const int k1 = (m[0] + B.nx) % B.nx, k2 = (m[1] + B.nx) % B.nx, kt = (m[2] + B.nt) % B.nt;
    const auto& smp = s.samples[q];
    const double ph = -(B.L * (smp.xi[0] + smp.xi[1]) - B.t0 * smp.tau);
    data[(static_cast<std::size_t>(kt) * B.nx + k2) * B.nx + k1] = smp.value * cplx(std::cos(ph), std::sin(ph)) / dV;
  }
  const int dims[3] = {B.nt, B.nx, B.nx};
  fft::dft(data, dims, true);
  std::vector<double> u(B.size());
  const double norm = 1.0 / static_cast<double>(B.size());
  for (std::size_t p = 0; p < u.size(); ++p) u[p] = data[p].real() * norm;
  return u;
}

void write_continuation_csv(const std::filesystem::path& path, const std::vector<ContinuationRow>& rows) {
  CsvWriter w(path, {"line", "n", "bound_A47", "bound_A48", "empirical_error", "gamma"});
  for (const auto& r : rows) {
    w << r.line << r.n << r.bound_A47 << r.bound_A48 << r.empirical_error << r.gamma;
    w.end_row();
  }
}

}  // namespace lct
