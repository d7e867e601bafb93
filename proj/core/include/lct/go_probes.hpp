#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "lct/wavesolver.hpp"

namespace lct {

using cplx = std::complex<double>;

/// φ_h(x) = h^{−n/2} ψ((x−y)/h) with ψ = c·exp(−1/(1−|z|²)) on the unit ball, ‖ψ‖_{L²} = 1.
class Mollifier {
 public:
  Mollifier() = default;
  Mollifier(const Vec2& y, double h, int n = 2);

  double operator()(const Vec2& x) const;
  Vec2 gradient(const Vec2& x) const;
  const Vec2& center() const { return y_; }
  double width() const { return h_; }
  int dim() const { return n_; }

  /// Normalization constant c of ψ in dimension n.
  static double psi_constant(int n);

 private:
  Vec2 y_{0.0, 0.0};
  double h_ = 1.0;
  int n_ = 2;
  double scale_ = 0.0;  // c·h^{−n/2}
};

Mollifier mollifier_profile(const Vec2& y, double h, int n = 2);

/// ∫ φ_h(z)² e^{−i z·ξ} dz at |ξ| = k (real and radial since ψ is even and radial).
/// Averaging a function with weight φ_h²(· − y) multiplies its transform by this.
double mollifier_square_ft(double h, double k, int n = 2);

enum class ProbeSide { Plus, Minus };

/// Which support conditions a probe must satisfy: QrStar requires supp φ and
/// supp φ ± Tω to miss Ω; Sharp only supp φ; Full none.
enum class ProbeMode { QrStar, Sharp, Full };

struct ProbeSpec {
  Vec2 omega{1.0, 0.0};
  double lambda = 10.0;
  Mollifier phi;
  ProbeSide side = ProbeSide::Plus;
  /// Spatial wavenumber in the phase k·x·ω + λt. Zero means k = λ.
  double k_phase = 0.0;

  double wavenumber() const { return k_phase > 0.0 ? k_phase : lambda; }
};

/// Reason the probe is inadmissible for `mode`, if any.
std::optional<std::string> probe_violation(const SpaceTimeGrid& g, const ProbeSpec& spec, ProbeMode mode);
/// Checks the spec invariants (unit ω, λ > 0, h > 0, support conditions for `mode`,
/// λ ≤ λ_max of the grid). Throws Rejected("go_probes", ...).
void validate_probe(const SpaceTimeGrid& g, const ProbeSpec& spec, ProbeMode mode);

/// exp(∓½∫₀ᵗ a(x+(t−s)ω, s) ds) by composite trapezoid with step ≤ max_step.
/// `a` may be null (zero damping); the sign is − for Plus and + for Minus.
double amplitude(ProbeSide side, const ScalarField* a, const Vec2& x, double t, const Vec2& omega,
                 double max_step);

/// ∫ a(x+(t−s)ω, s) ds over s ∈ [0,t], composite trapezoid with M panels,
/// skipping the part of the path outside the support box of `a`.
double characteristic_integral(const ScalarField& a, const Vec2& x, double t, const Vec2& omega, int M);

/// Spatial wavenumber k for which e^{i(k x·ω + λt)} solves the discrete
/// leapfrog equation exactly (numerical dispersion relation).
double matched_wavenumber(const SpaceTimeGrid& g, double lambda, const Vec2& omega);

/// φ(x+tω)·A±(x,t)·e^{±i(k x·ω + λt)} evaluated analytically.
class GoLeadingTerm {
 public:
  GoLeadingTerm(const ProbeSpec& spec, const ScalarField* a, double max_step);

  cplx operator()(const Vec2& x, double t) const;
  /// ∂t of the leading term (amplitude derivative by a centered difference of the path integral).
  cplx dt(const Vec2& x, double t) const;
  /// Whether φ(x+tω) vanishes, the cheap early-out.
  bool vanishes(const Vec2& x, double t) const;
  const ProbeSpec& spec() const { return spec_; }

 private:
  double amp(const Vec2& x, double t, int nodes) const;
  int node_count(double t) const;

  ProbeSpec spec_;
  const ScalarField* a_;
  double step_;
  Box abox_;
};

/// Leading term restricted to Σ (complex signal). Plus side uses A⁺ and the + phase.
BoundarySignal probe_dirichlet_trace(const SpaceTimeGrid& g, const ProbeSpec& spec, const ScalarField* a,
                                     ProbeMode mode = ProbeMode::QrStar);

/// Leading term on Ω at level k (complex, two real SpaceFields).
std::pair<SpaceField, SpaceField> leading_term_slice(const SpaceTimeGrid& g, const GoLeadingTerm& lead, int k);
/// ∂t of the leading term on Ω at level k.
std::pair<SpaceField, SpaceField> leading_term_dt_slice(const SpaceTimeGrid& g, const GoLeadingTerm& lead, int k);

struct RemainderReport {
  double sup_r = 0.0;   ///< sup_t ‖r(·,t)‖_{L²(Ω)}
  double sup_rt = 0.0;  ///< sup_t ‖∂t r(·,t)‖_{L²(Ω)}
  std::vector<double> r_series, rt_series;
  double r_at_T = 0.0, rt_at_T = 0.0;
};

/// r = numerical solution − leading term on Ω. The plus side solves forward with
/// zero initial data; the minus side solves backward from the leading term at T.
RemainderReport remainder(const ProbeSpec& spec, const CoefficientPair& pair, ProbeMode mode = ProbeMode::QrStar);

}  // namespace lct
