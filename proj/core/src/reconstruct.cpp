#include "lct/reconstruct.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lct/csv.hpp"
#include "lct/parallel.hpp"

namespace lct {

RegionId job_region(OperatorTag mode) {
  switch (mode) {
    case OperatorTag::Lambda: return RegionId::QrStar;
    case OperatorTag::Response: return RegionId::QrSharp;
    case OperatorTag::FullData: return RegionId::Q;
  }
  return RegionId::Q;
}

BoxField::BoxField(const ReconBox& box, std::vector<double> values) : box_(box), values_(std::move(values)) {
  if (values_.size() != box_.size()) throw Rejected("reconstruct", "box field size mismatch");
  support_.lo = {1e300, 1e300};
  support_.hi = {-1e300, -1e300};
  support_.t0 = 1e300;
  support_.t1 = -1e300;
  const int n = box_.nx;
  for (int k = 0; k < box_.nt; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        if (values_[(static_cast<std::size_t>(k) * n + j) * n + i] == 0.0) continue;
        // a node influences one cell on each side
        const Vec2 p = box_.node(i, j);
        support_.lo = {std::min(support_.lo[0], p[0] - box_.hx()), std::min(support_.lo[1], p[1] - box_.hx())};
        support_.hi = {std::max(support_.hi[0], p[0] + box_.hx()), std::max(support_.hi[1], p[1] + box_.hx())};
        support_.t0 = std::min(support_.t0, box_.time(k) - box_.ht());
        support_.t1 = std::max(support_.t1, box_.time(k) + box_.ht());
        support_.empty = false;
      }
  if (support_.empty) support_ = Box{};
}

double BoxField::operator()(const Vec2& x, double t) const {
  const int n = box_.nx;
  const double fx = (x[0] + box_.L) / box_.hx(), fy = (x[1] + box_.L) / box_.hx(), ft = (t - box_.t0) / box_.ht();
  const int i0 = static_cast<int>(std::floor(fx)), j0 = static_cast<int>(std::floor(fy)),
            k0 = static_cast<int>(std::floor(ft));
  const double wx = fx - i0, wy = fy - j0, wt = ft - k0;
  double v = 0.0;
  for (int c = 0; c < 8; ++c) {
    const int i = i0 + (c & 1), j = j0 + ((c >> 1) & 1), k = k0 + ((c >> 2) & 1);
    if (i < 0 || j < 0 || k < 0 || i >= n || j >= n || k >= box_.nt) continue;
    const double w = ((c & 1) ? wx : 1.0 - wx) * (((c >> 1) & 1) ? wy : 1.0 - wy) * (((c >> 2) & 1) ? wt : 1.0 - wt);
    v += w * values_[(static_cast<std::size_t>(k) * n + j) * n + i];
  }
  return v;
}

namespace {

enum class Target { A, B };

Box region_bounds(const SpaceTimeGrid& g, RegionId region) {
  Box b;
  const double L = g.half_side(), h = g.r() / 2.0;
  b.lo = {-L, -L};
  b.hi = {L, L};
  b.t0 = 0.0;
  b.t1 = g.T();
  if (region == RegionId::QrStar) {
    b.t0 = h;
    b.t1 = g.T() - h;
  } else if (region == RegionId::QrSharp) {
    b.t0 = h;
  }
  b.empty = false;
  return b;
}

bool in_box(const Box& b, const Vec2& x, double t) {
  return !b.empty && x[0] >= b.lo[0] && x[0] <= b.hi[0] && x[1] >= b.lo[1] && x[1] <= b.hi[1] && t >= b.t0 &&
         t <= b.t1;
}

// Whether the light line through y meets the prior box dilated by `pad` in space.
bool line_meets(const Box& b, const Vec2& y, const Vec2& omega, double pad) {
  const double step = 0.25 * std::max(pad, 0.02);
  for (double t = b.t0; t <= b.t1 + 1e-12; t += step) {
    const Vec2 x = y - t * omega;
    if (x[0] >= b.lo[0] - pad && x[0] <= b.hi[0] + pad && x[1] >= b.lo[1] - pad && x[1] <= b.hi[1] + pad)
      return true;
  }
  return false;
}

struct RayTask {
  int dir, i, j;
};

ReconstructionResult run_pipeline(const ReconstructionJob& job, Target target, const ScalarField* recovered_a,
                                  const ReconstructionResult* reuse) {
  if (!job.background || !job.unknown) throw Rejected("reconstruct", "job needs background and unknown pairs");
  const SpaceTimeGrid& g = job.background->grid();
  if (!(job.unknown->grid() == g)) throw Rejected("reconstruct", "background and unknown grids differ");
  if (g.n() != 2) throw Rejected("reconstruct", "the reconstruction pipeline runs in two space dimensions");
  if (job.probes.directions < 2 || !(job.probes.dy > 0.0)) throw Rejected("reconstruct", "invalid probe lattice");
  if (job.backend == FillBackend::Lagrange)
    throw Rejected("reconstruct",
                   "lagrange backend needs samples on the box lattice; the ray lattice yields other frequencies");
  const RegionId region = job_region(job.mode);
  const CoefficientPair diff = difference(*job.unknown, *job.background);
  const SpaceTimeField& truth_field = target == Target::A ? diff.a : diff.b;

  const Box prior = job.prior.empty ? region_bounds(g, region) : job.prior;
  const double h = job.probes.h > 0.0 ? job.probes.h : std::pow(job.probes.lambda, -1.0 / 7.0);
  const double radius = job.probes.radius > 0.0 ? job.probes.radius : g.r() / 2.0 + g.T();
  const bool extracted = job.source == LightRaySource::Extracted;
  const double pad = (extracted ? h : 0.0) + job.probes.dy;

  if (extracted && job.probes.lambda > g.lambda_max() * (1.0 + 1e-12))
    throw Rejected("reconstruct", "lambda exceeds the resolution limit of the grid");

  ReconstructionResult res;
  res.box = job.box;
  const int K = job.probes.directions;
  std::vector<RayGrid> grids;
  std::vector<RayTask> tasks;
  for (int k = 0; k < K; ++k) {
    const double th = 2.0 * M_PI * k / K;
    grids.push_back(make_ray_grid({std::cos(th), std::sin(th)}, radius, job.probes.dy));
    const RayGrid& R = grids.back();
    for (int j = 0; j < R.ny; ++j)
      for (int i = 0; i < R.ny; ++i) {
        const Vec2 y = R.node(i, j);
        if (!line_meets(prior, y, R.omega, pad)) continue;
        if (extracted) {
          if (job.mode == OperatorTag::Lambda && !region_contains(g, RegionId::AnnulusAr, y, 0.0)) continue;
          // the mollified probe must be admissible at y; other lines stay unprobed (value 0)
          ProbeSpec ps;
          ps.omega = R.omega;
          ps.lambda = job.probes.lambda;
          ps.phi = Mollifier(y, h, g.n());
          if (probe_violation(g, ps, probe_mode(job.mode))) {
            ++res.unprobed;
            continue;
          }
        }
        tasks.push_back({k, i, j});
      }
  }

  res.rays.resize(tasks.size());
  ExtractionOptions eo;
  eo.tag = job.mode;
  const DtnPair pair{job.background, job.unknown};
  const bool can_reuse = reuse && reuse->rays.size() == tasks.size();
  parallel_for(tasks.size(), job.jobs, [&](std::size_t q) {
    const RayTask& t = tasks[q];
    const Vec2 y = grids[t.dir].node(t.i, t.j);
    const Vec2& w = grids[t.dir].omega;
    LightRaySample s;
    if (!extracted) {
      s = lightray_direct(truth_field, y, w, g.T(), g.dt());
      s.flag = "direct";
    } else if (target == Target::A) {
      s = recover_lightray_a(pair, y, w, job.probes.lambda, h, eo);
    } else if (can_reuse && reuse->rays[q].y == y && reuse->rays[q].omega == w) {
      const LightRaySample& raw = reuse->rays[q];
      s = raw.flag == "outside_annulus"
              ? raw
              : lightray_b_from_functional(raw, damping_correction(recovered_a, Mollifier(y, raw.h, g.n()), w,
                                                                    g.T(), g.dt()));
    } else {
      s = recover_lightray_b(pair, recovered_a, y, w, job.probes.lambda, h, eo);
    }
    if (s.flag.empty()) s.flag = "ok";
    res.rays[q] = s;
  });
  for (std::size_t q = 0; q < tasks.size(); ++q) {
    RayGrid& R = grids[tasks[q].dir];
    R.values[static_cast<std::size_t>(tasks[q].j) * R.ny + tasks[q].i] = res.rays[q].value;
    res.signal = std::max(res.signal, std::abs(res.rays[q].value));
  }

  // Box nodes in the region, ground truth on them.
  const ReconBox& B = job.box;
  res.region_mask.assign(B.size(), 0);
  res.truth.assign(B.size(), 0.0);
  std::vector<char> support(B.size(), 0);
  for (int k = 0; k < B.nt; ++k)
    for (int j = 0; j < B.nx; ++j)
      for (int i = 0; i < B.nx; ++i) {
        const std::size_t p = (static_cast<std::size_t>(k) * B.nx + j) * B.nx + i;
        const Vec2 x = B.node(i, j);
        const double t = B.time(k);
        if (!region_contains(g, region, x, t)) continue;
        res.region_mask[p] = 1;
        res.truth[p] = truth_field(x, t);
        support[p] = in_box(prior, x, t);
      }
  res.field.assign(B.size(), 0.0);

  if (res.signal <= job.noise_floor) {
    res.no_signal = true;
    res.flag = "no recoverable signal";
  } else {
    res.flag = "ok";
    const double sample_dxi = 2.0 * M_PI / (grids.front().ny * grids.front().dy);
    for (const RayGrid& R : grids)
      for (const SpectralSample& s : fourier_slice_lattice(R, job.alpha, g.r(), g.T()))
        if (s.in_E) res.slices.push_back(s);
    FillOptions fo;
    fo.backend = job.backend;
    fo.alpha = job.alpha;
    fo.box = B;
    fo.support = support;
    fo.reg = job.reg;
    fo.reg_grad = job.reg_grad;
    fo.max_iter = job.max_iter;
    if (extracted) fo.transfer = [h](const Vec2& xi) { return mollifier_square_ft(h, norm(xi)); };
    const FilledSpectrum filled = fill_spectrum(res.slices, fo, sample_dxi);
    res.iterations = filled.iterations;
    res.residual = filled.residual;
    res.field = spectrum_to_field(filled);
    for (std::size_t p = 0; p < B.size(); ++p)
      if (!res.region_mask[p]) res.field[p] = 0.0;
  }

  std::vector<double> err(B.size());
  for (std::size_t p = 0; p < B.size(); ++p) err[p] = res.field[p] - res.truth[p];
  const double sp[3] = {B.ht(), B.hx(), B.hx()};
  for (std::size_t p = 0; p < B.size(); ++p) {
    res.linf_error = std::max(res.linf_error, std::abs(err[p]));
    res.linf_truth = std::max(res.linf_truth, std::abs(res.truth[p]));
  }
  res.l2_error = l2_norm_box(err, sp);
  res.l2_truth = l2_norm_box(res.truth, sp);
  const std::size_t dims[3] = {static_cast<std::size_t>(B.nt), static_cast<std::size_t>(B.nx),
                               static_cast<std::size_t>(B.nx)};
  res.hm1_error = h_minus1_norm(err, dims, sp);
  res.hm1_truth = h_minus1_norm(res.truth, dims, sp);
  return res;
}

}  // namespace

ReconstructionResult reconstruct_a(const ReconstructionJob& job) { return run_pipeline(job, Target::A, nullptr, nullptr); }

ReconstructionResult reconstruct_b(const ReconstructionJob& job, const ScalarField* recovered_a,
                                   const ReconstructionResult* reuse) {
  return run_pipeline(job, Target::B, recovered_a, reuse);
}

double theoretical_bound(BoundKind kind, double eps, const BoundParams& p) {
  if (!(eps > 0.0) || !(eps < 1.0)) throw Rejected("reconstruct", "bound needs 0 < eps < 1");
  const double le = std::abs(std::log(eps));
  if (kind == BoundKind::Thm1) return p.C * std::pow(std::pow(eps, p.mu1) + 1.0 / le, p.mu2);
  if (!(p.mu > 0.0)) throw Rejected("reconstruct", "mu must be positive");
  return p.C / (p.mu * std::log(le));
}

BoundFit fit_bound(BoundKind kind, const std::vector<double>& eps, const std::vector<double>& err) {
  if (eps.size() != err.size() || eps.size() < 2) throw Rejected("reconstruct", "fit needs at least two points");
  for (std::size_t i = 0; i < eps.size(); ++i)
    if (!(eps[i] > 0.0 && eps[i] < 1.0) || !(err[i] > 0.0))
      throw Rejected("reconstruct", "fit needs 0 < eps < 1 and positive errors");
  const std::size_t n = eps.size();
  std::vector<double> ly(n);
  for (std::size_t i = 0; i < n; ++i) ly[i] = std::log(err[i]);
  BoundFit fit;
  if (kind == BoundKind::Thm1) {
    // log err = log C + μ₂ log(ε^{μ₁} + 1/|log ε|); scan μ₁, solve the linear part.
    double best = 1e300;
    for (int s = 1; s <= 400; ++s) {
      const double mu1 = s * 0.005;
      std::vector<double> lx(n);
      for (std::size_t i = 0; i < n; ++i) lx[i] = std::log(std::pow(eps[i], mu1) + 1.0 / std::abs(std::log(eps[i])));
      const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / n;
      const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / n;
      double sxx = 0.0, sxy = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
      }
      const double mu2 = sxx > 0.0 ? sxy / sxx : 0.0;
      const double lc = my - mu2 * mx;
      double r2 = 0.0;
      for (std::size_t i = 0; i < n; ++i) r2 += std::pow(ly[i] - lc - mu2 * lx[i], 2);
      if (r2 < best) {
        best = r2;
        fit.params.mu1 = mu1;
        fit.params.mu2 = mu2;
        fit.params.C = std::exp(lc);
      }
    }
    fit.residual = std::sqrt(best / n);
  } else {
    for (std::size_t i = 0; i < n; ++i)
      if (!(std::abs(std::log(eps[i])) > 1.0)) throw Rejected("reconstruct", "double-log form needs eps < 1/e");
    fit.params.mu = 1.0;
    double lc = 0.0;
    for (std::size_t i = 0; i < n; ++i) lc += ly[i] + std::log(std::log(std::abs(std::log(eps[i]))));
    lc /= n;
    fit.params.C = std::exp(lc);
    double r2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) r2 += std::pow(ly[i] - std::log(theoretical_bound(kind, eps[i], fit.params)), 2);
    fit.residual = std::sqrt(r2 / n);
  }
  double shift = 1.0;
  for (std::size_t i = 0; i < n; ++i) shift = std::max(shift, err[i] / theoretical_bound(kind, eps[i], fit.params));
  // strict dominance, not equality at the worst point
  fit.shift = shift * (1.0 + 1e-9);
  fit.params.C *= fit.shift;
  return fit;
}

bool StabilityReport::envelope_dominates() const {
  for (const auto& r : rows)
    if (!(r.bound_thm1 > r.a_linf)) return false;
  return true;
}

StabilityReport stability_sweep(const SweepSpec& spec) {
  const auto& L = spec.ladder;
  if (L.size() < 4) throw Rejected("reconstruct", "sweep needs at least four amplitudes");
  for (std::size_t i = 1; i < L.size(); ++i)
    if (!(L[i] > L[i - 1])) throw Rejected("reconstruct", "amplitude ladder must be strictly increasing");
  if (!(L.front() > 0.0) || L.back() / L.front() < 100.0 * (1.0 - 1e-9))
    throw Rejected("reconstruct", "amplitude ladder must be positive and span two decades");
  if (!spec.job.background) throw Rejected("reconstruct", "sweep needs a background pair");
  const CoefficientPair& bg = *spec.job.background;
  const SpaceTimeGrid& g = bg.grid();
  const RegionId region = job_region(spec.job.mode);
  const std::vector<OperatorInput> probes = make_probe_dictionary(g, spec.dictionary, &bg.a);

  StabilityReport rep;
  rep.rows.resize(L.size());
  // Points run one after another; each point parallelizes its own probe solves.
  for (std::size_t q = 0; q < L.size(); ++q) {
    const double d = L[q];
    CoefficientPair u = bg;
    BumpSpec ab = spec.a_bump;
    ab.amplitude *= d;
    u.a += make_bump(g, ab, region);
    if (spec.perturb_b) {
      BumpSpec bb = spec.b_bump;
      bb.amplitude *= d;
      u.b += make_bump(g, bb, region);
    }
    ReconstructionJob job = spec.job;
    job.unknown = &u;
    StabilityRow& row = rep.rows[q];
    row.delta = d;
    row.eps = estimate_diff_norm(spec.job.mode, bg, u, probes, spec.job.jobs).eps;
    const ReconstructionResult ra = reconstruct_a(job);
    row.a_linf = ra.linf_error;
    row.a_l2_rel = ra.rel_l2();
    if (spec.perturb_b) {
      const BoxField rec = ra.recovered();
      const ReconstructionResult rb = reconstruct_b(job, &rec, &ra);
      row.b_hm1 = rb.hm1_error;
      row.b_hm1_rel = rb.rel_hm1();
    }
  }
  for (std::size_t q = 1; q < L.size(); ++q) {
    rep.eps_monotone = rep.eps_monotone && rep.rows[q].eps > rep.rows[q - 1].eps;
    rep.a_monotone = rep.a_monotone && rep.rows[q].a_linf > rep.rows[q - 1].a_linf;
    rep.b_monotone = rep.b_monotone && rep.rows[q].b_hm1 > rep.rows[q - 1].b_hm1;
  }
  if (!rep.eps_monotone) rep.flag = "probe dictionary insufficient";

  std::vector<double> e, ea, eb;
  for (const auto& r : rep.rows) {
    e.push_back(r.eps);
    ea.push_back(r.a_linf);
    eb.push_back(r.b_hm1);
  }
  rep.thm1_a = fit_bound(BoundKind::Thm1, e, ea);
  if (spec.perturb_b) rep.thm2_b = fit_bound(BoundKind::Thm2, e, eb);
  for (auto& r : rep.rows) {
    r.bound_thm1 = theoretical_bound(BoundKind::Thm1, r.eps, rep.thm1_a.params);
    if (spec.perturb_b) r.bound_thm2 = theoretical_bound(BoundKind::Thm2, r.eps, rep.thm2_b.params);
  }
  return rep;
}

void write_stability_csv(const std::filesystem::path& path, const StabilityReport& rep) {
  CsvWriter w(path, {"delta", "eps", "a_linf", "a_l2_rel", "b_hm1", "b_hm1_rel", "bound_thm1", "bound_thm2"});
  for (const auto& r : rep.rows) {
    w << r.delta << r.eps << r.a_linf << r.a_l2_rel << r.b_hm1 << r.b_hm1_rel << r.bound_thm1 << r.bound_thm2;
    w.end_row();
  }
}

void write_stability_plots(const std::filesystem::path& dir, const StabilityReport& rep) {
  std::filesystem::create_directories(dir);
  std::vector<double> d, e, a, b;
  for (const auto& r : rep.rows) {
    d.push_back(r.delta);
    e.push_back(r.eps);
    a.push_back(r.a_linf);
    b.push_back(r.b_hm1);
  }
  write_series(dir / "eps_vs_delta.csv", "delta", "eps", d, e);
  write_series(dir / "a_err_vs_eps.csv", "eps", "a_linf", e, a);
  write_series(dir / "b_err_vs_eps.csv", "eps", "b_hm1", e, b);
  // envelopes on a log-spaced ε grid covering the data
  const double lo = *std::min_element(e.begin(), e.end()), hi = *std::max_element(e.begin(), e.end());
  std::vector<double> xs, y1, y2;
  for (int i = 0; i <= 64; ++i) {
    const double x = lo * std::pow(hi / lo, i / 64.0);
    if (!(x > 0.0 && x < 1.0)) continue;
    xs.push_back(x);
    y1.push_back(theoretical_bound(BoundKind::Thm1, x, rep.thm1_a.params));
    y2.push_back(std::abs(std::log(x)) > 1.0 ? theoretical_bound(BoundKind::Thm2, x, rep.thm2_b.params) : NAN);
  }
  write_series(dir / "thm1_envelope.csv", "eps", "bound", xs, y1);
  write_series(dir / "thm2_envelope.csv", "eps", "bound", xs, y2);
}

}  // namespace lct
