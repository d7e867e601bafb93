#include "commands.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <random>

#include "lct/csv.hpp"

namespace lct::cli {

namespace fs = std::filesystem;

namespace {

struct Setup {
  SpaceTimeGrid grid;
  CoefficientPair background, unknown;
};

Setup make_setup(const ToolkitConfig& c) {
  Setup s{SpaceTimeGrid(c.grid), {}, {}};
  s.background = CoefficientPair::zero(s.grid);
  if (c.background_a.present) s.background.a += make_bump(s.grid, c.background_a.spec, c.background_a.region);
  if (c.background_b.present) s.background.b += make_bump(s.grid, c.background_b.spec, c.background_b.region);
  s.unknown = s.background;
  if (c.unknown_a.present) s.unknown.a += make_bump(s.grid, c.unknown_a.spec, c.unknown_a.region);
  if (c.unknown_b.present) s.unknown.b += make_bump(s.grid, c.unknown_b.spec, c.unknown_b.region);
  return s;
}

double width_for(const ToolkitConfig& c, double lambda) { return c.h > 0.0 ? c.h : std::pow(lambda, -1.0 / 7.0); }

// Probe centre on the ω = e₁ axis, halfway across the annulus.
Vec2 probe_center(const SpaceTimeGrid& g) { return {g.T() / 2.0, 0.0}; }

ProbeDictionarySpec dictionary(const ToolkitConfig& c) {
  ProbeDictionarySpec d;
  d.lambdas = c.lambdas;
  d.omega_count = c.omega_count;
  d.y_count = c.y_count;
  d.h = width_for(c, c.lambdas.front());
  d.random_bumps = c.random_bumps;
  d.seed = c.seed;
  return d;
}

ReconstructionJob make_job(const ToolkitConfig& c, const Setup& s) {
  ReconstructionJob j;
  j.mode = c.mode;
  j.background = &s.background;
  j.unknown = &s.unknown;
  j.probes.directions = c.directions;
  j.probes.dy = c.dy;
  j.probes.lambda = c.lambdas.front();
  j.probes.h = c.h;
  j.alpha = c.alpha;
  j.box = c.box;
  j.backend = c.backend;
  j.reg = c.reg;
  j.reg_grad = c.reg_grad;
  j.max_iter = c.max_iter;
  j.source = c.source;
  j.prior = c.prior;
  j.jobs = c.jobs;
  return j;
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

std::string cmd_forward(const ToolkitConfig& c, const fs::path& dir) {
  const Setup s = make_setup(c);
  ProbeSpec p;
  p.lambda = c.lambdas.front();
  p.phi = Mollifier(probe_center(s.grid), width_for(c, p.lambda), s.grid.n());
  const BoundarySignal f = probe_dirichlet_trace(s.grid, p, &s.background.a, probe_mode(c.mode)).real_part();
  SolveOptions o;
  o.keep_field = true;  // the energy series reads every level
  o.track_norms = true;
  SolveData d;
  d.f = &f;
  const WaveTrajectory tr = solve_forward(s.unknown, d, o);
  const EnergyReport e = energy_report(tr, &f, nullptr, nullptr);
  {
    CsvWriter w(dir / "energy.csv", {"ratio", "numerator", "denominator", "degenerate"});
    w << e.ratio << e.numerator << e.denominator << e.degenerate;
    w.end_row();
  }
  const std::vector<double> en = discrete_energy(tr);
  std::vector<double> t(en.size());
  for (std::size_t k = 0; k < t.size(); ++k) t[k] = s.grid.time(static_cast<int>(k));
  write_series(dir / "energy_series.csv", "t", "energy", t, en);
  write_signal_csv(dir / "neumann.csv", tr.neumann());
  write_field_dump(dir / "u_final.bin", tr.u_final());
  write_field_dump(dir / "ut_final.bin", tr.ut_final());
  if (c.dump_field) write_field_dump(dir / "trajectory.bin", tr.field());
  return fmt("energy ratio %.6g", e.ratio);
}

std::string cmd_dtn_diff(const ToolkitConfig& c, const fs::path& dir) {
  const Setup s = make_setup(c);
  const auto probes = make_probe_dictionary(s.grid, dictionary(c), &s.background.a);
  const DiffNormEstimate est = estimate_diff_norm(c.mode, s.background, s.unknown, probes, c.jobs);
  CsvWriter w(dir / "dtn_diff.csv", {"probe", "label", "ratio"});
  for (std::size_t i = 0; i < est.per_probe.size(); ++i) {
    w << i << probes[i].label << est.per_probe[i];
    w.end_row();
  }
  CsvWriter m(dir / "summary.csv", {"operator", "eps", "argmax"});
  m << operator_name(c.mode) << est.eps << est.argmax;
  m.end_row();
  return fmt("eps %.6g", est.eps);
}

std::string cmd_cloak(const ToolkitConfig& c, const fs::path& dir) {
  const Setup s = make_setup(c);
  CloakDemoSpec spec;
  spec.probes = dictionary(c);
  spec.jobs = c.jobs;
  const double delta = c.unknown_a.present ? std::abs(c.unknown_a.spec.amplitude) : 0.1;
  const CloakDemoResult r = cloaking_demo(s.background, delta, spec);
  const double ratio = r.eps_visible > 0.0 ? r.eps_cloak / r.eps_visible : 0.0;
  CsvWriter w(dir / "cloak.csv", {"delta", "eps_cloak", "eps_visible", "ratio"});
  w << delta << r.eps_cloak << r.eps_visible << ratio;
  w.end_row();
  return fmt("eps_cloak %.3g eps_visible %.3g ratio %.3g", r.eps_cloak, r.eps_visible, ratio);
}

std::string cmd_probe_check(const ToolkitConfig& c, const fs::path& dir) {
  const Setup s = make_setup(c);
  CsvWriter w(dir / "remainder.csv", {"lambda", "h", "sup_r", "sup_rt", "r_at_T", "rt_at_T"});
  double first = 0.0, last = 0.0;
  for (double l : c.lambdas) {
    ProbeSpec p;
    p.lambda = l;
    p.phi = Mollifier(probe_center(s.grid), width_for(c, l), s.grid.n());
    const RemainderReport r = remainder(p, s.unknown, probe_mode(c.mode));
    w << l << p.phi.width() << r.sup_r << r.sup_rt << r.r_at_T << r.rt_at_T;
    w.end_row();
    if (first == 0.0) first = r.sup_r;
    last = r.sup_r;
  }
  return fmt("sup_r first %.4g last %.4g", first, last);
}

std::string cmd_lightray(const ToolkitConfig& c, const fs::path& dir) {
  const Setup s = make_setup(c);
  const CoefficientPair diff = difference(s.unknown, s.background);
  const DtnPair pair{&s.background, &s.unknown};
  ExtractionOptions eo;
  eo.tag = c.mode;
  const double lambda = c.lambdas.front(), h = width_for(c, lambda);
  const double lo = s.grid.r() / 2.0 + h, hi = s.grid.T() - s.grid.r() / 2.0 - h;
  std::vector<LightRaySample> rows;
  const int m = std::max(1, c.y_count);
  double worst = 0.0;
  for (int i = 0; i < m; ++i) {
    const Vec2 y{m == 1 ? 0.5 * (lo + hi) : lo + (hi - lo) * i / (m - 1), 0.0};
    LightRaySample ex = recover_lightray_a(pair, y, {1.0, 0.0}, lambda, h, eo);
    LightRaySample di = lightray_direct(diff.a, y, {1.0, 0.0}, s.grid.T(), s.grid.dt());
    di.flag = "direct";
    if (std::abs(di.value) > 0.0) worst = std::max(worst, std::abs(ex.value - di.value) / std::abs(di.value));
    rows.push_back(ex);
    rows.push_back(di);
  }
  write_lightray_csv(dir / "lightray.csv", rows);
  return fmt("max relative error vs direct %.4g", worst);
}

std::string cmd_slice_check(const ToolkitConfig& c, const fs::path& dir) {
  const SpaceTimeGrid g(c.grid);
  BumpSpec spec = c.unknown_a.spec;
  if (!c.unknown_a.present) spec.amplitude = 1.0;
  const BumpField f(spec, g.n());
  const Box box{{-0.5, -0.5}, {0.5, 0.5}, 0.0, g.T(), false};
  const DirectTransform oracle(f, box, 96, 192);
  std::vector<SpectralSample> rows;
  std::vector<double> errs;
  double worst = 0.0;
  const int K = 8;
  for (int k = 0; k < K; ++k) {
    const double th = 2.0 * M_PI * k / K;
    RayGrid R = make_ray_grid({std::cos(th), std::sin(th)}, g.r() / 2.0 + g.T(), 0.05);
    fill_ray_grid(R, f, g.T(), 0.005);
    for (int q = 1; q <= 8; ++q) {
      const double rad = 0.5 * q, phi = th + 0.7;
      const Vec2 xi{rad * std::cos(phi), rad * std::sin(phi)};
      const SpectralSample s = fourier_slice(R, xi, g.r(), g.T());
      const cplx ref = oracle(xi, s.tau);
      const double e = std::abs(s.value - ref) / std::abs(ref);
      worst = std::max(worst, e);
      rows.push_back(s);
      errs.push_back(e);
    }
  }
  CsvWriter w(dir / "slice_check.csv", {"xi1", "xi2", "tau", "re", "im", "rel_error"});
  for (std::size_t i = 0; i < rows.size(); ++i) {
    w << rows[i].xi[0] << rows[i].xi[1] << rows[i].tau << rows[i].value.real() << rows[i].value.imag() << errs[i];
    w.end_row();
  }
  return fmt("max relative slice error %.3g over %g points", worst, static_cast<double>(rows.size()));
}

std::string cmd_continue(const ToolkitConfig& c, const fs::path& dir) {
  // g(s) = e^{is}: |g| ≤ e^{2ρ} on every disc of radius 2ρ centred in [−1, 1].
  ChainOptions o;
  o.rho = c.rho;
  o.M = std::exp(2.0 * c.rho);
  o.noise = c.noise;
  o.n_cap = c.n_cap;
  std::mt19937_64 rng(c.seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  const int S = 64;
  std::vector<double> s(S);
  std::vector<cplx> v(S);
  for (int i = 0; i < S; ++i) {
    s[i] = -0.2 + 0.4 * i / S;
    v[i] = std::exp(cplx(0.0, s[i])) + c.noise * cplx(unif(rng), unif(rng)) / std::sqrt(2.0);
  }
  const ChainResult r = three_circle_chain(s, v, o);
  std::vector<ContinuationRow> rows;
  double worst = 0.0;
  for (const auto& w : r.windows) {
    ContinuationRow row;
    row.line = w.index;
    row.n = w.n;
    row.bound_A47 = w.bound_A47;
    row.bound_A48 = w.bound_A48;
    row.gamma = w.theta;
    for (int q = -20; q <= 20; ++q) {
      const double x = w.center + o.rho * 0.5 * q / 20.0;
      if (x < -1.0 || x > 1.0) continue;
      row.empirical_error = std::max(row.empirical_error, std::abs(r(x) - std::exp(cplx(0.0, x))));
    }
    worst = std::max(worst, row.empirical_error);
    rows.push_back(row);
  }
  write_continuation_csv(dir / "continuation.csv", rows);
  return fmt("%g windows, gamma %.3g, max error on [-1,1] %.3g", static_cast<double>(r.n0), r.gamma, worst);
}

void write_metrics(const fs::path& path, const ReconstructionResult& r) {
  CsvWriter w(path, {"flag", "rays", "unprobed", "slices", "iterations", "residual", "linf_error", "linf_truth",
                     "l2_rel", "hm1_rel"});
  w << r.flag << r.rays.size() << r.unprobed << r.slices.size() << r.iterations << r.residual << r.linf_error
    << r.linf_truth << r.rel_l2() << r.rel_hm1();
  w.end_row();
}

void write_box_field(const fs::path& path, const ReconstructionResult& r) {
  const ReconBox& B = r.box;
  CsvWriter w(path, {"x1", "x2", "t", "recovered", "truth"});
  for (int k = 0; k < B.nt; ++k)
    for (int j = 0; j < B.nx; ++j)
      for (int i = 0; i < B.nx; ++i) {
        const std::size_t p = (static_cast<std::size_t>(k) * B.nx + j) * B.nx + i;
        if (!r.region_mask[p]) continue;
        const Vec2 x = B.node(i, j);
        w << x[0] << x[1] << B.time(k) << r.field[p] << r.truth[p];
        w.end_row();
      }
}

std::string cmd_reconstruct_a(const ToolkitConfig& c, const fs::path& dir) {
  const Setup s = make_setup(c);
  const ReconstructionResult r = reconstruct_a(make_job(c, s));
  write_lightray_csv(dir / "rays.csv", r.rays);
  write_spectral_csv(dir / "slices.csv", r.slices);
  write_metrics(dir / "metrics.csv", r);
  write_box_field(dir / "recovered_a.csv", r);
  return r.flag + fmt(": relative L2 error %.4g, Linf error %.4g", r.rel_l2(), r.linf_error);
}

std::string cmd_reconstruct_b(const ToolkitConfig& c, const fs::path& dir) {
  const Setup s = make_setup(c);
  const ReconstructionJob job = make_job(c, s);
  ReconstructionResult ra;
  std::optional<BoxField> rec;
  if (c.unknown_a.present) {
    ra = reconstruct_a(job);
    write_metrics(dir / "metrics_a.csv", ra);
    rec.emplace(ra.recovered());
  }
  const ReconstructionResult r = reconstruct_b(job, rec ? &*rec : nullptr, rec ? &ra : nullptr);
  write_lightray_csv(dir / "rays.csv", r.rays);
  write_spectral_csv(dir / "slices.csv", r.slices);
  write_metrics(dir / "metrics.csv", r);
  write_box_field(dir / "recovered_b.csv", r);
  return r.flag + fmt(": relative H^-1 error %.4g", r.rel_hm1());
}

std::string cmd_sweep(const ToolkitConfig& c, const fs::path& dir) {
  const Setup s = make_setup(c);
  SweepSpec sw;
  sw.job = make_job(c, s);
  sw.a_bump = c.unknown_a.spec;
  if (!c.unknown_a.present) sw.a_bump.amplitude = 1.0;
  sw.b_bump = c.unknown_b.spec;
  if (!c.unknown_b.present) sw.b_bump.amplitude = 1.0;
  sw.ladder = c.ladder;
  sw.dictionary = dictionary(c);
  const StabilityReport rep = stability_sweep(sw);
  write_stability_csv(dir / "stability.csv", rep);
  write_stability_plots(dir / "plots", rep);
  CsvWriter f(dir / "fit.csv", {"form", "C", "mu1", "mu2", "mu", "log_residual", "shift"});
  f << "thm1_a" << rep.thm1_a.params.C << rep.thm1_a.params.mu1 << rep.thm1_a.params.mu2 << rep.thm1_a.params.mu
    << rep.thm1_a.residual << rep.thm1_a.shift;
  f.end_row();
  f << "thm2_b" << rep.thm2_b.params.C << rep.thm2_b.params.mu1 << rep.thm2_b.params.mu2 << rep.thm2_b.params.mu
    << rep.thm2_b.residual << rep.thm2_b.shift;
  f.end_row();
  std::string summary = std::to_string(rep.rows.size()) + " rows";
  if (!rep.flag.empty()) summary += ", flagged: " + rep.flag;
  return summary;
}

using Handler = std::function<std::string(const ToolkitConfig&, const fs::path&)>;

const std::vector<std::pair<std::string, Handler>>& table() {
  static const std::vector<std::pair<std::string, Handler>> t = {
      {"forward", cmd_forward},         {"dtn-diff", cmd_dtn_diff},
      {"cloak-demo", cmd_cloak},        {"probe-check", cmd_probe_check},
      {"lightray", cmd_lightray},       {"slice-check", cmd_slice_check},
      {"continue", cmd_continue},       {"reconstruct-a", cmd_reconstruct_a},
      {"reconstruct-b", cmd_reconstruct_b}, {"sweep", cmd_sweep},
  };
  return t;
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    for (const auto& [k, v] : table()) n.push_back(k);
    return n;
  }();
  return names;
}

std::string run_command(const std::string& command, const ToolkitConfig& cfg, const fs::path& dir) {
  for (const auto& [name, fn] : table())
    if (name == command) return fn(cfg, dir);
  throw ConfigError("unknown command: " + command);
}

}  // namespace lct::cli
