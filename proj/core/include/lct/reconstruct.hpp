#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "lct/boundary_ops.hpp"
#include "lct/continuation.hpp"
#include "lct/lightray.hpp"

namespace lct {

/// Region where the unknown difference must live for a given measurement operator.
RegionId job_region(OperatorTag mode);

enum class LightRaySource {
  Extracted,  ///< boundary-measurement extraction (the real pipeline)
  Direct,     ///< quadrature of the ground truth, for isolating inversion error
};

struct ProbeLattice {
  int directions = 8;      ///< ω_k = (cos 2πk/K, sin 2πk/K)
  double dy = 0.1;         ///< spacing of the y lattice
  double lambda = 110.0;
  double h = 0.2;          ///< mollifier width; ≤ 0 selects λ^{-1/7}
  double radius = 0.0;     ///< y lattice half-width; 0 selects r/2 + T
};

struct ReconstructionJob {
  OperatorTag mode = OperatorTag::Lambda;
  const CoefficientPair* background = nullptr;
  const CoefficientPair* unknown = nullptr;  ///< ground truth for synthetic studies
  ProbeLattice probes;
  double alpha = 30.0;
  ReconBox box;
  FillBackend backend = FillBackend::Regularized;
  double reg = 1e-3;
  double reg_grad = 1e-3;
  int max_iter = 400;
  LightRaySource source = LightRaySource::Extracted;
  /// A-priori space-time support of the difference; empty means the bounding box of the mode's region.
  /// Only y whose light lines meet it (dilated by h + dy) are probed.
  Box prior;
  /// Below this sup|ray value| the run reports "no recoverable signal".
  double noise_floor = 1e-9;
  int jobs = 1;
};

/// Piecewise trilinear field on the nodes of a reconstruction box, zero outside.
class BoxField final : public ScalarField {
 public:
  BoxField(const ReconBox& box, std::vector<double> values);
  double operator()(const Vec2& x, double t) const override;
  Box support() const override { return support_; }
  const ReconBox& box() const { return box_; }
  const std::vector<double>& values() const { return values_; }

 private:
  ReconBox box_;
  std::vector<double> values_;
  Box support_;
};

struct ReconstructionResult {
  ReconBox box;
  std::vector<double> field;      ///< recovered difference on box nodes, zero outside the region
  std::vector<double> truth;      ///< ground truth on box nodes, zero outside the region
  std::vector<char> region_mask;  ///< box nodes inside the job region
  std::vector<LightRaySample> rays;
  std::vector<SpectralSample> slices;
  int unprobed = 0;               ///< lines meeting the prior where no admissible probe exists
  int iterations = 0;
  double residual = 0.0;
  double signal = 0.0;            ///< sup |ray value|
  bool no_signal = false;
  std::string flag;               ///< "ok" or "no recoverable signal"
  double linf_error = 0.0, linf_truth = 0.0;
  double l2_error = 0.0, l2_truth = 0.0;
  double hm1_error = 0.0, hm1_truth = 0.0;

  double rel_l2() const { return l2_truth > 0.0 ? l2_error / l2_truth : l2_error; }
  double rel_hm1() const { return hm1_truth > 0.0 ? hm1_error / hm1_truth : hm1_error; }
  BoxField recovered() const { return BoxField(box, field); }
};

/// Light rays of the a-difference, Fourier slices on E, spectral fill, inverse transform.
ReconstructionResult reconstruct_a(const ReconstructionJob& job);

/// Same pipeline for b. `recovered_a` enters the damping correction (null means a ≡ a₁).
/// When `reuse` comes from reconstruct_a on the same job, its boundary functionals are reused
/// instead of re-solving.
ReconstructionResult reconstruct_b(const ReconstructionJob& job, const ScalarField* recovered_a,
                                   const ReconstructionResult* reuse = nullptr);

enum class BoundKind { Thm1, Thm2 };

struct BoundParams {
  double C = 1.0;
  double mu1 = 0.5, mu2 = 0.5;  ///< log-Hölder form
  double mu = 1.0;              ///< double-log form
};

/// C(ε^{μ₁} + 1/|log ε|)^{μ₂}, or C/(μ log|log ε|). Requires 0 < ε < 1.
double theoretical_bound(BoundKind kind, double eps, const BoundParams& p);

struct BoundFit {
  BoundParams params;
  double residual = 0.0;  ///< RMS misfit in log coordinates before the dominance shift
  double shift = 1.0;     ///< factor applied to C so the curve dominates every point
};

/// Least squares in log coordinates, then C is raised until the curve lies above all points.
/// The double-log form fixes μ = 1 (only C/μ is identifiable).
BoundFit fit_bound(BoundKind kind, const std::vector<double>& eps, const std::vector<double>& err);

struct StabilityRow {
  double delta = 0.0;
  double eps = 0.0;
  double a_linf = 0.0, a_l2_rel = 0.0;
  double b_hm1 = 0.0, b_hm1_rel = 0.0;
  double bound_thm1 = 0.0, bound_thm2 = 0.0;
};

struct StabilityReport {
  std::vector<StabilityRow> rows;  ///< sorted by δ
  BoundFit thm1_a, thm2_b;
  bool eps_monotone = true;
  bool a_monotone = true;
  bool b_monotone = true;
  std::string flag;  ///< empty, or "probe dictionary insufficient" when ε is not increasing
  bool envelope_dominates() const;
};

struct SweepSpec {
  ReconstructionJob job;          ///< template; background set, unknown ignored
  BumpSpec a_bump;                ///< shape of the a perturbation at δ = 1
  BumpSpec b_bump;                ///< shape of the b perturbation at δ = 1
  bool perturb_b = true;
  std::vector<double> ladder;
  ProbeDictionarySpec dictionary;
};

StabilityReport stability_sweep(const SweepSpec& spec);

/// Header: delta,eps,a_linf,a_l2_rel,b_hm1,b_hm1_rel,bound_thm1,bound_thm2
void write_stability_csv(const std::filesystem::path& path, const StabilityReport& report);
/// One x,y file per curve: eps_vs_delta, a_err_vs_eps, b_err_vs_eps, thm1_envelope, thm2_envelope.
void write_stability_plots(const std::filesystem::path& dir, const StabilityReport& report);

}  // namespace lct
