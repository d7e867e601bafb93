#include "lct/wavesolver.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>

#include "lct/error.hpp"

namespace lct {

// ---------------------------------------------------------------- signals

BoundarySignal::BoundarySignal(const SpaceTimeGrid& g, SignalKind kind, bool complex)
    : grid_(g), kind_(kind) {
  const std::size_t sz = static_cast<std::size_t>(g.nt() + 1) * node_count();
  re_.assign(sz, 0.0);
  if (complex) im_.assign(sz, 0.0);
}

Vec2 BoundarySignal::position(int id) const {
  const double L = grid_.half_side();
  if (grid_.n() == 1) return {id == 0 ? -L : L, 0.0};
  const int face = id / grid_.nx();
  const double s = grid_.coord(id % grid_.nx());
  switch (face) {
    case 0: return {-L, s};
    case 1: return {L, s};
    case 2: return {s, -L};
    default: return {s, L};
  }
}

Vec2 BoundarySignal::normal(int id) const {
  if (grid_.n() == 1) return {id == 0 ? -1.0 : 1.0, 0.0};
  switch (id / grid_.nx()) {
    case 0: return {-1.0, 0.0};
    case 1: return {1.0, 0.0};
    case 2: return {0.0, -1.0};
    default: return {0.0, 1.0};
  }
}

std::size_t BoundarySignal::grid_flat(int id) const {
  const int nx = grid_.nx();
  if (grid_.n() == 1) return id == 0 ? 0 : static_cast<std::size_t>(nx - 1);
  const int face = id / nx, s = id % nx;
  switch (face) {
    case 0: return grid_.flat(0, s);
    case 1: return grid_.flat(nx - 1, s);
    case 2: return grid_.flat(s, 0);
    default: return grid_.flat(s, nx - 1);
  }
}

double BoundarySignal::surface_weight(int id) const {
  if (grid_.n() == 1) return 1.0;
  const int s = id % grid_.nx();
  return (s == 0 || s == grid_.nx() - 1) ? 0.5 * grid_.dx() : grid_.dx();
}

BoundarySignal BoundarySignal::real_part() const {
  BoundarySignal s(grid_, kind_, false);
  s.re_ = re_;
  return s;
}

BoundarySignal BoundarySignal::imag_part() const {
  BoundarySignal s(grid_, kind_, false);
  if (!im_.empty()) s.re_ = im_;
  return s;
}

double BoundarySignal::initial_defect() const {
  double m = 0.0;
  for (int id = 0; id < node_count(); ++id) {
    m = std::max(m, std::abs(re(0, id)));
    if (is_complex()) m = std::max(m, std::abs(im(0, id)));
  }
  return m;
}

double BoundarySignal::l2_norm() const {
  const int N = node_count(), nt = grid_.nt();
  double s = 0.0;
  for (int k = 0; k <= nt; ++k) {
    const double wt = (k == 0 || k == nt) ? 0.5 : 1.0;
    for (int id = 0; id < N; ++id) {
      double v = re(k, id) * re(k, id);
      if (is_complex()) v += im(k, id) * im(k, id);
      s += wt * surface_weight(id) * v;
    }
  }
  return std::sqrt(s * grid_.dt());
}

double BoundarySignal::h1_norm() const {
  const int N = node_count(), nt = grid_.nt(), npf = nodes_per_face();
  const double dt = grid_.dt(), dx = grid_.dx();
  double s = 0.0;
  auto sq = [&](int k, int id, int k2, int id2) {
    double d = re(k, id) - re(k2, id2);
    double v = d * d;
    if (is_complex()) {
      d = im(k, id) - im(k2, id2);
      v += d * d;
    }
    return v;
  };
  for (int k = 0; k + 1 <= nt; ++k)
    for (int id = 0; id < N; ++id) s += surface_weight(id) * dt * sq(k + 1, id, k, id) / (dt * dt);
  if (grid_.n() == 2)
    for (int k = 0; k <= nt; ++k) {
      const double wt = (k == 0 || k == nt) ? 0.5 * dt : dt;
      for (int id = 0; id < N; ++id)
        if (id % npf + 1 < npf) s += wt * dx * sq(k, id + 1, k, id) / (dx * dx);
    }
  const double l2 = l2_norm();
  return std::sqrt(l2 * l2 + s);
}

BoundarySignal& BoundarySignal::operator-=(const BoundarySignal& o) {
  if (o.re_.size() != re_.size()) throw Rejected("solver", "signal shape mismatch");
  for (std::size_t i = 0; i < re_.size(); ++i) re_[i] -= o.re_[i];
  if (!o.im_.empty()) {
    if (im_.empty()) im_.assign(re_.size(), 0.0);
    for (std::size_t i = 0; i < im_.size(); ++i) im_[i] -= o.im_[i];
  }
  return *this;
}

void write_signal_csv(const std::filesystem::path& path, const BoundarySignal& s) {
  std::ofstream os(path);
  if (!os) throw Rejected("io", "cannot open " + path.string());
  os << std::setprecision(17);
  os << (s.is_complex() ? "node_id,t,value,value_im\n" : "node_id,t,value\n");
  for (int k = 0; k <= s.grid().nt(); ++k)
    for (int id = 0; id < s.node_count(); ++id) {
      os << id << ',' << s.grid().time(k) << ',' << s.re(k, id);
      if (s.is_complex()) os << ',' << s.im(k, id);
      os << '\n';
    }
}

// ---------------------------------------------------------------- solver

class SolverAccess {
 public:
  static WaveTrajectory run(const CoefficientPair& pair, const SolveData& d, const SolveOptions& opts, bool reverse);
  static void flip(WaveTrajectory& t);
};

namespace {

template <bool HasA, bool HasB, bool HasF>
double step_row(int i0, int i1, int nx, bool two_d, const double* __restrict um, const double* __restrict u,
                double* __restrict up, const double* __restrict a, const double* __restrict b,
                const double* __restrict F, double dt, double inv_dx2) {
  const double dt2 = dt * dt;
  const double hdt = 0.5 * dt;
  double acc = 0.0;
  for (int q = i0; q < i1; ++q) {
    double lap = u[q - 1] + u[q + 1] - 2.0 * u[q];
    if (two_d) lap += u[q - nx] + u[q + nx] - 2.0 * u[q];
    double rhs = lap * inv_dx2;
    if constexpr (HasB) rhs -= b[q] * u[q];
    if constexpr (HasF) rhs += F[q];
    double v;
    if constexpr (HasA) {
      const double ha = hdt * a[q];
      v = (2.0 * u[q] - (1.0 - ha) * um[q] + dt2 * rhs) / (1.0 + ha);
    } else {
      v = 2.0 * u[q] - um[q] + dt2 * rhs;
    }
    up[q] = v;
    acc += v;
  }
  return acc;
}

using StepFn = double (*)(int, int, int, bool, const double*, const double*, double*, const double*, const double*,
                          const double*, double, double);

StepFn pick_step(bool ha, bool hb, bool hf) {
  static const StepFn table[8] = {step_row<false, false, false>, step_row<false, false, true>,
                                  step_row<false, true, false>,  step_row<false, true, true>,
                                  step_row<true, false, false>,  step_row<true, false, true>,
                                  step_row<true, true, false>,   step_row<true, true, true>};
  return table[(ha ? 4 : 0) + (hb ? 2 : 0) + (hf ? 1 : 0)];
}

void laplacian(const SpaceTimeGrid& g, const double* u, double* out) {
  const int nx = g.nx();
  const double inv = 1.0 / (g.dx() * g.dx());
  std::fill(out, out + g.slice_size(), 0.0);
  if (g.n() == 1) {
    for (int i = 1; i + 1 < nx; ++i) out[i] = (u[i - 1] - 2 * u[i] + u[i + 1]) * inv;
    return;
  }
  for (int j = 1; j + 1 < nx; ++j)
    for (int i = 1; i + 1 < nx; ++i) {
      const std::size_t q = static_cast<std::size_t>(j) * nx + i;
      out[q] = (u[q - 1] + u[q + 1] + u[q - nx] + u[q + nx] - 4 * u[q]) * inv;
    }
}

double h1_of(const SpaceTimeGrid& g, const double* u) {
  SpaceField f(g);
  std::copy(u, u + g.slice_size(), f.data().begin());
  return f.h1_norm();
}

double l2_of(const SpaceTimeGrid& g, const double* u) {
  double s = 0.0;
  for (std::size_t q = 0; q < g.slice_size(); ++q) s += u[q] * u[q];
  return std::sqrt(s * std::pow(g.dx(), g.n()));
}

void neumann_level(const SpaceTimeGrid& g, const double* u, BoundarySignal& dn, int k) {
  const int nx = g.nx();
  const double inv = 1.0 / (2.0 * g.dx());
  if (g.n() == 1) {
    dn.re(k, 0) = (3 * u[0] - 4 * u[1] + u[2]) * inv;
    dn.re(k, 1) = (3 * u[nx - 1] - 4 * u[nx - 2] + u[nx - 3]) * inv;
    return;
  }
  for (int s = 0; s < nx; ++s) {
    const std::size_t w = g.flat(0, s), e = g.flat(nx - 1, s), so = g.flat(s, 0), no = g.flat(s, nx - 1);
    dn.re(k, s) = (3 * u[w] - 4 * u[w + 1] + u[w + 2]) * inv;
    dn.re(k, nx + s) = (3 * u[e] - 4 * u[e - 1] + u[e - 2]) * inv;
    dn.re(k, 2 * nx + s) = (3 * u[so] - 4 * u[so + nx] + u[so + 2 * nx]) * inv;
    dn.re(k, 3 * nx + s) = (3 * u[no] - 4 * u[no - nx] + u[no - 2 * nx]) * inv;
  }
}

}  // namespace

WaveTrajectory SolverAccess::run(const CoefficientPair& pair, const SolveData& d, const SolveOptions& opts,
                                 bool reverse) {
  const SpaceTimeGrid& g = pair.grid();
  const int nt = g.nt(), nx = g.nx();
  const std::size_t S = g.slice_size();
  const double dt = g.dt(), dx = g.dx();
  if (dt > dx / std::sqrt(static_cast<double>(g.n())) * (1.0 + 1e-12)) throw Rejected("solver", "CFL violated");
  if (!(pair.b.grid() == g)) throw Rejected("solver", "coefficient grids differ");
  if (d.f && !(d.f->grid() == g)) throw Rejected("solver", "boundary signal grid differs");
  if (d.F && !(d.F->grid() == g)) throw Rejected("solver", "source grid differs");
  if (d.f && d.f->is_complex()) throw Rejected("solver", "complex data must be split into real solves");

  const bool has_a = !pair.a.is_zero();
  const bool has_b = !pair.b.is_zero();
  const bool has_F = d.F && !d.F->is_zero();
  const StepFn step = pick_step(has_a, has_b, has_F);
  auto lvl = [&](int k) { return reverse ? nt - k : k; };

  WaveTrajectory tr;
  tr.grid_ = g;
  tr.dn_ = BoundarySignal(g, SignalKind::Neumann);
  std::vector<double> ring;
  if (opts.keep_field) {
    tr.field_ = SpaceTimeField(g);
  } else {
    ring.assign(3 * S, 0.0);
  }
  auto level_ptr = [&](int k) -> double* {
    return opts.keep_field ? tr.field_.level(k) : ring.data() + static_cast<std::size_t>(k % 3) * S;
  };
  auto apply_dirichlet = [&](double* u, int k) {
    if (!d.f) {
      if (g.n() == 1) {
        u[0] = 0.0;
        u[nx - 1] = 0.0;
      } else {
        for (int s = 0; s < nx; ++s) u[g.flat(0, s)] = u[g.flat(nx - 1, s)] = u[g.flat(s, 0)] = u[g.flat(s, nx - 1)] = 0;
      }
      return;
    }
    const int kk = lvl(k);
    for (int id = 0; id < d.f->node_count(); ++id) u[d.f->grid_flat(id)] = d.f->re(kk, id);
  };

  // level 0
  double* u0 = level_ptr(0);
  std::vector<double> v0(S, 0.0);
  if (d.u0) std::copy(d.u0->data().begin(), d.u0->data().end(), u0);
  else std::fill(u0, u0 + S, 0.0);
  if (d.u1) {
    v0 = d.u1->data();
    if (reverse)
      for (double& v : v0) v = -v;
  }
  if (d.f) {
    double scale = 1.0, defect = 0.0;
    const int kk = lvl(0);
    for (int id = 0; id < d.f->node_count(); ++id) {
      scale = std::max(scale, std::abs(d.f->re(kk, id)));
      defect = std::max(defect, std::abs(d.f->re(kk, id) - u0[d.f->grid_flat(id)]));
    }
    if (defect > 1e-9 * scale) throw Rejected("solver", "boundary data incompatible with initial data at t=0");
  }
  apply_dirichlet(u0, 0);
  neumann_level(g, u0, tr.dn_, 0);
  if (opts.observer) opts.observer(0, u0);

  double sup_h1 = 0.0, sup_ut = 0.0;
  if (opts.track_norms) {
    sup_h1 = h1_of(g, u0);
    sup_ut = l2_of(g, v0.data());
  }

  // level 1 by Taylor expansion
  {
    double* u1 = level_ptr(1);
    std::vector<double> lap(S);
    laplacian(g, u0, lap.data());
    const int k0 = lvl(0);
    const double* a = has_a ? pair.a.level(k0) : nullptr;
    const double* b = has_b ? pair.b.level(k0) : nullptr;
    const double* F = has_F ? d.F->level(k0) : nullptr;
    for (std::size_t q = 0; q < S; ++q) {
      if (g.is_boundary(q)) continue;
      double acc = lap[q];
      if (a) acc -= a[q] * v0[q];
      if (b) acc -= b[q] * u0[q];
      if (F) acc += F[q];
      u1[q] = u0[q] + dt * v0[q] + 0.5 * dt * dt * acc;
    }
    apply_dirichlet(u1, 1);
    neumann_level(g, u1, tr.dn_, 1);
    if (opts.observer) opts.observer(1, u1);
    if (opts.track_norms) sup_h1 = std::max(sup_h1, h1_of(g, u1));
  }

  const double inv_dx2 = 1.0 / (dx * dx);
  std::vector<double> vel(opts.track_norms ? S : 0);
  for (int k = 1; k < nt; ++k) {
    const double* um = level_ptr(k - 1);
    const double* u = level_ptr(k);
    double* up = level_ptr(k + 1);
    const int kk = lvl(k);
    const double* a = has_a ? pair.a.level(kk) : nullptr;
    const double* b = has_b ? pair.b.level(kk) : nullptr;
    const double* F = has_F ? d.F->level(kk) : nullptr;
    double acc = 0.0;
    if (g.n() == 1) {
      acc = step(1, nx - 1, nx, false, um, u, up, a, b, F, dt, inv_dx2);
    } else {
      for (int j = 1; j + 1 < nx; ++j) {
        const int base = j * nx;
        acc += step(base + 1, base + nx - 1, nx, true, um, u, up, a, b, F, dt, inv_dx2);
      }
    }
    if (!std::isfinite(acc)) throw Rejected("solver", "non-finite value at step " + std::to_string(k + 1));
    apply_dirichlet(up, k + 1);
    neumann_level(g, up, tr.dn_, k + 1);
    if (opts.observer) opts.observer(k + 1, up);
    if (opts.track_norms) {
      sup_h1 = std::max(sup_h1, h1_of(g, up));
      for (std::size_t q = 0; q < S; ++q) vel[q] = (up[q] - um[q]) / (2 * dt);
      sup_ut = std::max(sup_ut, l2_of(g, vel.data()));
    }
  }

  // snapshots
  tr.u0_ = SpaceField(g);
  tr.ut0_ = SpaceField(g);
  tr.uT_ = SpaceField(g);
  tr.utT_ = SpaceField(g);
  std::copy(u0, u0 + S, tr.u0_.data().begin());
  tr.ut0_.data() = v0;
  {
    const double* uN = level_ptr(nt);
    const double* uN1 = level_ptr(nt - 1);
    const double* uN2 = level_ptr(nt - 2);
    std::copy(uN, uN + S, tr.uT_.data().begin());
    for (std::size_t q = 0; q < S; ++q) tr.utT_[q] = (3 * uN[q] - 4 * uN1[q] + uN2[q]) / (2 * dt);
    if (opts.track_norms) sup_ut = std::max(sup_ut, tr.utT_.l2_norm());
  }
  if (opts.track_norms) {
    tr.sup_h1_ = sup_h1;
    tr.sup_ut_ = sup_ut;
  }
  return tr;
}

void SolverAccess::flip(WaveTrajectory& t) {
  const int nt = t.grid_.nt();
  const std::size_t S = t.grid_.slice_size();
  if (t.has_field()) {
    auto& v = t.field_.data();
    for (int k = 0; k < (nt + 1) / 2; ++k)
      std::swap_ranges(v.begin() + k * S, v.begin() + (k + 1) * S, v.begin() + (nt - k) * S);
  }
  std::swap(t.u0_, t.uT_);
  std::swap(t.ut0_, t.utT_);
  for (double& x : t.ut0_.data()) x = -x;
  for (double& x : t.utT_.data()) x = -x;
  auto& dn = t.dn_.re_data();
  const std::size_t N = static_cast<std::size_t>(t.dn_.node_count());
  for (int k = 0; k < (nt + 1) / 2; ++k)
    std::swap_ranges(dn.begin() + k * N, dn.begin() + (k + 1) * N, dn.begin() + (nt - k) * N);
}

WaveTrajectory solve_forward(const CoefficientPair& pair, const SolveData& data, const SolveOptions& opts) {
  return SolverAccess::run(pair, data, opts, false);
}

WaveTrajectory solve_backward(const CoefficientPair& pair, const SpaceField& uT, const SpaceField& utT,
                              const BoundarySignal* f, const SpaceTimeField* F, const SolveOptions& opts) {
  SolveData d;
  d.f = f;
  d.u0 = &uT;
  d.u1 = &utT;
  d.F = F;
  WaveTrajectory t = SolverAccess::run(pair, d, opts, true);
  SolverAccess::flip(t);
  return t;
}

ComplexTrajectory solve_forward_complex(const CoefficientPair& pair, const BoundarySignal& f,
                                        const SolveOptions& opts) {
  const BoundarySignal fr = f.real_part();
  const BoundarySignal fi = f.imag_part();
  ComplexTrajectory out;
  out.re = solve_forward(pair, {&fr, nullptr, nullptr, nullptr}, opts);
  out.im = solve_forward(pair, {&fi, nullptr, nullptr, nullptr}, opts);
  return out;
}

BoundarySignal neumann_trace(const WaveTrajectory& traj) { return traj.neumann(); }

BoundarySignal neumann_trace(const ComplexTrajectory& traj) {
  BoundarySignal s(traj.re.grid(), SignalKind::Neumann, true);
  s.re_data() = traj.re.neumann().re_data();
  s.im_data() = traj.im.neumann().re_data();
  return s;
}

EnergyReport energy_report(const WaveTrajectory& traj, const BoundarySignal* f, const SpaceField* u0,
                           const SpaceField* u1) {
  const auto& g = traj.grid();
  EnergyReport r;
  double sup_h1 = 0.0, sup_ut = 0.0;
  if (traj.sup_h1_u() && traj.sup_l2_ut()) {
    sup_h1 = *traj.sup_h1_u();
    sup_ut = *traj.sup_l2_ut();
  } else if (traj.has_field()) {
    const std::size_t S = g.slice_size();
    std::vector<double> vel(S);
    for (int k = 0; k <= g.nt(); ++k) {
      sup_h1 = std::max(sup_h1, h1_of(g, traj.field().level(k)));
      if (k == 0) {
        std::copy(traj.ut_initial().data().begin(), traj.ut_initial().data().end(), vel.begin());
      } else if (k == g.nt()) {
        std::copy(traj.ut_final().data().begin(), traj.ut_final().data().end(), vel.begin());
      } else {
        const double* a = traj.field().level(k + 1);
        const double* b = traj.field().level(k - 1);
        for (std::size_t q = 0; q < S; ++q) vel[q] = (a[q] - b[q]) / (2 * g.dt());
      }
      sup_ut = std::max(sup_ut, l2_of(g, vel.data()));
    }
  } else {
    throw Rejected("solver", "energy report needs tracked norms or the stored field");
  }
  r.numerator = traj.neumann().l2_norm() + sup_h1 + sup_ut;
  r.denominator = (f ? f->h1_norm() : 0.0) + (u0 ? u0->h1_norm() : 0.0) + (u1 ? u1->l2_norm() : 0.0);
  if (!(r.denominator > 0.0)) {
    r.degenerate = true;
    return r;
  }
  r.ratio = r.numerator / r.denominator;
  return r;
}

double scheme_residual(const WaveTrajectory& traj, const CoefficientPair& pair, const SpaceTimeField* F) {
  if (!traj.has_field()) throw Rejected("solver", "residual check needs the stored field");
  const auto& g = traj.grid();
  const auto& u = traj.field();
  const int nx = g.nx();
  const double dt = g.dt(), dx = g.dx();
  const double scale = std::max(1e-300, u.max_abs());
  double worst = 0.0;
  for (int k = 1; k < g.nt(); ++k) {
    const double* um = u.level(k - 1);
    const double* uc = u.level(k);
    const double* up = u.level(k + 1);
    for (std::size_t q = 0; q < g.slice_size(); ++q) {
      if (g.is_boundary(q)) continue;
      double lap = uc[q - 1] + uc[q + 1] - 2 * uc[q];
      if (g.n() == 2) lap += uc[q - nx] + uc[q + nx] - 2 * uc[q];
      lap /= dx * dx;
      const double res = (up[q] - 2 * uc[q] + um[q]) - dt * dt * lap +
                         0.5 * dt * pair.a.at(k, q) * (up[q] - um[q]) +
                         dt * dt * (pair.b.at(k, q) * uc[q] - (F ? F->at(k, q) : 0.0));
      worst = std::max(worst, std::abs(res));
    }
  }
  return worst / scale;
}

std::vector<double> discrete_energy(const WaveTrajectory& traj) {
  if (!traj.has_field()) throw Rejected("solver", "energy series needs the stored field");
  const auto& g = traj.grid();
  const auto& u = traj.field();
  const int nx = g.nx();
  const double dt = g.dt(), dx = g.dx(), w = std::pow(dx, g.n());
  std::vector<double> e(g.nt());
  for (int k = 0; k < g.nt(); ++k) {
    const double* a = u.level(k);
    const double* b = u.level(k + 1);
    double kin = 0.0, pot = 0.0;
    for (std::size_t q = 0; q < g.slice_size(); ++q) {
      const double v = (b[q] - a[q]) / dt;
      kin += v * v;
      const int i = static_cast<int>(g.n() == 2 ? q % nx : q);
      if (i + 1 < nx) pot += (b[q + 1] - b[q]) * (a[q + 1] - a[q]) / (dx * dx);
      if (g.n() == 2 && static_cast<int>(q / nx) + 1 < nx)
        pot += (b[q + nx] - b[q]) * (a[q + nx] - a[q]) / (dx * dx);
    }
    e[k] = 0.5 * (kin + pot) * w;
  }
  return e;
}

}  // namespace lct
