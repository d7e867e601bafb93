#include "lct/boundary_ops.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <random>

#include "lct/error.hpp"
#include "lct/parallel.hpp"

namespace lct {

std::string_view operator_name(OperatorTag tag) {
  switch (tag) {
    case OperatorTag::Lambda: return "Lambda";
    case OperatorTag::Response: return "Response";
    case OperatorTag::FullData: return "FullData";
  }
  return "?";
}

MeasurementRecord apply_operator(OperatorTag tag, const CoefficientPair& pair, const OperatorInput& input) {
  if (input.f.empty()) throw Rejected("boundary_ops", "missing boundary input");
  if (input.f.is_complex()) throw Rejected("boundary_ops", "operator inputs are real; split complex probes");
  if (tag != OperatorTag::FullData) {
    double scale = 0.0;
    for (double v : input.f.re_data()) scale = std::max(scale, std::abs(v));
    if (input.f.initial_defect() > 1e-12 * scale)
      throw Rejected("boundary_ops", "f(.,0) != 0: input is not in H1_0(Sigma)");
    if (!input.u0.empty() || !input.u1.empty())
      throw Rejected("boundary_ops", std::string(operator_name(tag)) + " takes zero initial data");
  }
  SolveData d;
  d.f = &input.f;
  if (tag == OperatorTag::FullData) {
    if (!input.u0.empty()) d.u0 = &input.u0;
    if (!input.u1.empty()) d.u1 = &input.u1;
  }
  SolveOptions opts;
  opts.keep_field = false;
  WaveTrajectory tr = solve_forward(pair, d, opts);
  MeasurementRecord rec;
  rec.tag = tag;
  rec.input = input;
  rec.dn = tr.neumann();
  if (tag != OperatorTag::Lambda) {
    rec.uT = tr.u_final();
    rec.utT = tr.ut_final();
  }
  return rec;
}

double k_norm(OperatorTag tag, const BoundarySignal& dn, const SpaceField* uT, const SpaceField* utT) {
  double s = dn.l2_norm();
  if (tag != OperatorTag::Lambda) {
    if (uT && !uT->empty()) s += uT->h1_norm();
    if (utT && !utT->empty()) s += utT->l2_norm();
  }
  return s;
}

double input_norm(OperatorTag tag, const OperatorInput& in) {
  double s = in.f.h1_norm();
  if (tag == OperatorTag::FullData) {
    if (!in.u0.empty()) s += in.u0.h1_norm();
    if (!in.u1.empty()) s += in.u1.l2_norm();
  }
  return s;
}

DiffNormEstimate estimate_diff_norm(OperatorTag tag, const CoefficientPair& pair1, const CoefficientPair& pair2,
                                    const std::vector<OperatorInput>& probes, int jobs) {
  if (probes.empty()) throw Rejected("boundary_ops", "empty probe set");
  DiffNormEstimate est;
  est.per_probe.assign(probes.size(), 0.0);
  parallel_for(probes.size(), jobs, [&](std::size_t i) {
    const double nin = input_norm(tag, probes[i]);
    if (!(nin > 0.0)) throw Rejected("boundary_ops", "probe " + std::to_string(i) + " has zero norm");
    const MeasurementRecord r1 = apply_operator(tag, pair1, probes[i]);
    const MeasurementRecord r2 = apply_operator(tag, pair2, probes[i]);
    BoundarySignal dn = r2.dn;
    dn -= r1.dn;
    SpaceField duT, dutT;
    if (tag != OperatorTag::Lambda) {
      duT = r2.uT;
      dutT = r2.utT;
      for (std::size_t q = 0; q < duT.data().size(); ++q) {
        duT[q] -= r1.uT[q];
        dutT[q] -= r1.utT[q];
      }
    }
    est.per_probe[i] = k_norm(tag, dn, &duT, &dutT) / nin;
  });
  for (std::size_t i = 0; i < probes.size(); ++i)
    if (est.per_probe[i] > est.eps) {
      est.eps = est.per_probe[i];
      est.argmax = i;
    }
  return est;
}

std::vector<OperatorInput> make_probe_dictionary(const SpaceTimeGrid& g, const ProbeDictionarySpec& spec,
                                                 const ScalarField* background_a) {
  std::vector<OperatorInput> out;
  const double h = spec.h;
  const double lo = g.r() / 2.0 + h + 0.05, hi = g.T() - g.r() / 2.0 - h - 0.05;
  for (double lambda : spec.lambdas)
    for (int w = 0; w < spec.omega_count; ++w) {
      const Vec2 omega = unit_from_angle(2.0 * M_PI * w / spec.omega_count);
      for (int iy = 0; iy < spec.y_count; ++iy) {
        const double s = spec.y_count == 1 ? 0.5 * (lo + hi) : lo + (hi - lo) * iy / (spec.y_count - 1);
        ProbeSpec p;
        p.omega = omega;
        p.lambda = lambda;
        p.phi = Mollifier(s * omega, h, g.n());
        try {
          validate_probe(g, p, ProbeMode::QrStar);
        } catch (const Rejected&) {
          continue;
        }
        const BoundarySignal f = probe_dirichlet_trace(g, p, background_a);
        OperatorInput re{f.real_part(), {}, {}, "go_re"}, im{f.imag_part(), {}, {}, "go_im"};
        out.push_back(std::move(re));
        out.push_back(std::move(im));
      }
    }
  std::mt19937_64 rng(spec.seed);
  auto uniform = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  const double L = g.half_side();
  for (int b = 0; b < spec.random_bumps; ++b) {
    const int face = static_cast<int>(rng() % (g.n() == 2 ? 4 : 2));
    const double s = -L + 2.0 * L * uniform();
    const double t0 = 0.4 + (g.T() - 0.8) * uniform();
    Vec2 x0{0.0, 0.0};
    if (g.n() == 1) x0 = {face == 0 ? -L : L, 0.0};
    else if (face < 2) x0 = {face == 0 ? -L : L, s};
    else x0 = {s, face == 2 ? -L : L};
    const BumpField bump({x0, t0, 0.15, 0.25, 1.0}, g.n());
    BoundarySignal f(g, SignalKind::Dirichlet);
    for (int k = 0; k <= g.nt(); ++k)
      for (int id = 0; id < f.node_count(); ++id) f.re(k, id) = bump(f.position(id), g.time(k));
    out.push_back({std::move(f), {}, {}, "bump"});
  }
  return out;
}

CloakDemoResult cloaking_demo(const CoefficientPair& background, double delta, const CloakDemoSpec& spec) {
  CloakDemoResult res;
  if (delta == 0.0) return res;
  const auto& g = background.grid();
  auto perturbed = [&](BumpSpec b, RegionId region) {
    b.amplitude *= delta;
    CoefficientPair p = background;
    const SpaceTimeField bump = make_bump(g, b, region);
    (spec.perturb_b ? p.b : p.a) += bump;
    return p;
  };
  const CoefficientPair cloak = perturbed(spec.cloak_bump, spec.cloak_region);
  const CoefficientPair visible = perturbed(spec.visible_bump, RegionId::QrStar);
  const ScalarField* a1 = background.a.is_zero() ? nullptr : &background.a;
  const auto probes = make_probe_dictionary(g, spec.probes, a1);
  res.eps_cloak = estimate_diff_norm(OperatorTag::Lambda, background, cloak, probes, spec.jobs).eps;
  res.eps_visible = estimate_diff_norm(OperatorTag::Lambda, background, visible, probes, spec.jobs).eps;
  return res;
}

void save_record(const std::filesystem::path& dir, const MeasurementRecord& rec) {
  std::filesystem::create_directories(dir);
  write_signal_csv(dir / "input.csv", rec.input.f);
  write_signal_csv(dir / "output.csv", rec.dn);
  if (!rec.uT.empty()) write_field_dump(dir / "u_T.lct", rec.uT);
  if (!rec.utT.empty()) write_field_dump(dir / "ut_T.lct", rec.utT);
  if (!rec.input.u0.empty()) write_field_dump(dir / "u0.lct", rec.input.u0);
  if (!rec.input.u1.empty()) write_field_dump(dir / "u1.lct", rec.input.u1);
  std::ofstream os(dir / "meta.txt");
  const auto& g = rec.dn.grid();
  os << std::setprecision(17);
  os << "operator = " << operator_name(rec.tag) << '\n'
     << "label = " << rec.input.label << '\n'
     << "n = " << g.n() << '\n'
     << "r = " << g.r() << '\n'
     << "T = " << g.T() << '\n'
     << "Nx = " << g.nx() << '\n'
     << "Nt = " << g.nt() << '\n'
     << "input_h1_sigma = " << rec.input.f.h1_norm() << '\n'
     << "output_l2_sigma = " << rec.dn.l2_norm() << '\n'
     << "h1_sigma_weighting = tangential and time derivatives weighted equally\n";
}

}  // namespace lct
