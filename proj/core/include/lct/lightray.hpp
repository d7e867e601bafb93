#pragma once

#include <complex>
#include <filesystem>
#include <string>
#include <vector>

#include "lct/boundary_ops.hpp"

namespace lct {

struct LightRaySample {
  Vec2 y{0.0, 0.0};
  Vec2 omega{1.0, 0.0};
  double value = 0.0;
  bool extracted = false;
  double lambda = 0.0;
  double h = 0.0;
  /// "" when reliable; otherwise "clamped", "outside_annulus", "unprobed".
  std::string flag;
  /// Raw boundary functional B and the discrete frequency used to normalize it.
  cplx functional{0.0, 0.0};
  double lambda_eff = 0.0;
  double im_diagnostic = 0.0;  ///< |Im v| (a) or |Im B_b| (b)
};

/// ∫₀ᵀ f(y − tω, t) dt, composite trapezoid with M = ⌈T/max_step⌉ panels.
LightRaySample lightray_direct(const ScalarField& f, const Vec2& y, const Vec2& omega, double T, double max_step);

struct SpectralSample {
  Vec2 xi{0.0, 0.0};
  double tau = 0.0;
  cplx value{0.0, 0.0};
  bool in_E = false;
  double confidence = 1.0;
};

/// |τ| < |ξ| and ξ ≠ 0.
bool in_E(const Vec2& xi, double tau);

/// Background (known) and unknown coefficient pairs whose operators are compared.
struct DtnPair {
  const CoefficientPair* background = nullptr;
  const CoefficientPair* unknown = nullptr;
};

struct ExtractionOptions {
  OperatorTag tag = OperatorTag::Lambda;
  bool match_dispersion = true;  ///< use the discrete wavenumber in the probe phase
  double clamp_floor = 1e-6;
};

ProbeMode probe_mode(OperatorTag tag);

struct BoundaryFunctional {
  cplx B{0.0, 0.0};   ///< ∫_Σ (Op₂−Op₁)(f_λ)·u⁻ (plus final-time terms outside Lambda mode)
  cplx v{0.0, 0.0};   ///< −B/(2iλ_eff)
  double lambda_eff = 0.0;
};

/// Four real solves (background and unknown, real and imaginary parts) paired
/// with the analytic u⁻ leading term. The probe amplitude uses the background damping.
BoundaryFunctional extract_exp_functional(const DtnPair& pair, const ProbeSpec& spec,
                                          const ExtractionOptions& opts = {});

/// h ≤ 0 selects h = λ^{−1/7}.
LightRaySample recover_lightray_a(const DtnPair& pair, const Vec2& y, const Vec2& omega, double lambda, double h,
                                  const ExtractionOptions& opts = {});

/// ∫φ²(y')[exp(−½ R_a(y',ω)) − 1] dy' and the amplitude weight exp(−R_a(y,ω)/4)
/// for a recovered damping field (null means zero).
struct DampingCorrection {
  double v_a = 0.0;
  double amplitude = 1.0;
};
DampingCorrection damping_correction(const ScalarField* recovered_a, const Mollifier& phi, const Vec2& omega,
                                     double T, double max_step);

/// b light-ray sample from an already computed functional: Re(B + 2iλ_eff·v_a)/A.
LightRaySample lightray_b_from_functional(const LightRaySample& raw, const DampingCorrection& corr);

LightRaySample recover_lightray_b(const DtnPair& pair, const ScalarField* recovered_a, const Vec2& y,
                                  const Vec2& omega, double lambda, double h, const ExtractionOptions& opts = {});

/// ω = (τ/|ξ|²)ξ + √(1−τ²/|ξ|²) ζ. Rejects (ξ,τ) ∉ E and ζ not a unit vector orthogonal to ξ.
Vec2 omega_from_frequency(const Vec2& xi, double tau, const Vec2& zeta);

/// Light-ray transform R(·,ω) on a uniform y-grid: y = origin + (i,j)·dy, row-major (j slow).
struct RayGrid {
  Vec2 omega{1.0, 0.0};
  Vec2 origin{0.0, 0.0};
  double dy = 0.05;
  int ny = 0;
  std::vector<double> values;

  Vec2 node(int i, int j) const { return {origin[0] + i * dy, origin[1] + j * dy}; }
};

/// Grid covering B(0, radius) with spacing ≤ dy (ny odd so y = 0 is a node).
RayGrid make_ray_grid(const Vec2& omega, double radius, double dy);
/// Fills the grid with lightray_direct values.
void fill_ray_grid(RayGrid& grid, const ScalarField& f, double T, double max_step);

/// Σ R(y,ω) e^{−iy·ξ} dy², checking that the grid covers B(0, r/2+T).
SpectralSample fourier_slice(const RayGrid& R, const Vec2& xi, double r, double T);
/// All DFT-lattice frequencies ξ ≠ 0 with |ξ| ≤ alpha, computed by FFT.
std::vector<SpectralSample> fourier_slice_lattice(const RayGrid& R, double alpha, double r, double T);

/// Direct space-time Fourier transform Σ f(x,t) e^{−i(x·ξ+tτ)} ΔV (trapezoid weights).
cplx direct_space_time_ft(const SpaceTimeField& f, const Vec2& xi, double tau);

/// Samples an analytic field once on a box and evaluates its space-time
/// transform at arbitrary frequencies.
class DirectTransform {
 public:
  DirectTransform(const ScalarField& f, const Box& box, int nx, int nt);
  cplx operator()(const Vec2& xi, double tau) const;

 private:
  Box box_;
  int nx_, nt_;
  double hx_, ht_;
  std::vector<double> samples_;
};

void write_lightray_csv(const std::filesystem::path& path, const std::vector<LightRaySample>& rows);
void write_spectral_csv(const std::filesystem::path& path, const std::vector<SpectralSample>& rows);

}  // namespace lct
