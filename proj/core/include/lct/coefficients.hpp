#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "lct/field.hpp"

namespace lct {

struct BumpSpec {
  Vec2 center{0.0, 0.0};
  double tc = 0.0;
  double radius_x = 0.1;
  double radius_t = 0.1;
  double amplitude = 0.0;
};

/// amplitude·exp(1 − 1/(1 − s²)) with s² = |x−c|²/ρx² + (t−tc)²/ρt², zero for s ≥ 1.
class BumpField final : public ScalarField {
 public:
  explicit BumpField(const BumpSpec& s, int n = 2) : spec_(s), n_(n) {}
  double operator()(const Vec2& x, double t) const override;
  Box support() const override;
  const BumpSpec& spec() const { return spec_; }

 private:
  BumpSpec spec_;
  int n_;
};

/// Sum of analytic fields (used for multi-bump coefficients and oracles).
class SumField final : public ScalarField {
 public:
  void add(const BumpSpec& s, int n = 2) { parts_.emplace_back(s, n); }
  double operator()(const Vec2& x, double t) const override;
  Box support() const override;
  bool empty() const { return parts_.empty(); }

 private:
  std::vector<BumpField> parts_;
};

/// Samples a bump on the grid after checking that its closed support lies in
/// `constraint`. Throws Rejected naming the first offending node.
SpaceTimeField make_bump(const SpaceTimeGrid& grid, const BumpSpec& spec, RegionId constraint);

struct AdmissibilityReport {
  double a_sup = 0, a_d1 = 0, a_d2 = 0;
  double b_sup = 0, b_d1 = 0;
  bool ok = true;
};

/// Sampled damping a and potential b with their declared bounds.
struct CoefficientPair {
  SpaceTimeField a;
  SpaceTimeField b;
  double M1 = std::numeric_limits<double>::infinity();
  double M2 = std::numeric_limits<double>::infinity();
  RegionId support_region = RegionId::Q;

  static CoefficientPair zero(const SpaceTimeGrid& g);
  const SpaceTimeGrid& grid() const { return a.grid(); }

  /// Discrete surrogate of the admissible class: sup norms of a and its first and
  /// second difference quotients against M1, of b and its first differences against M2.
  AdmissibilityReport admissibility() const;
};

/// Difference (p2 − p1) of two pairs on the same grid.
CoefficientPair difference(const CoefficientPair& p2, const CoefficientPair& p1);

/// Mask of grid nodes (all levels) that lie in `region`.
std::vector<char> region_mask(const SpaceTimeGrid& g, RegionId region);

/// Max |f| over nodes in region. Rejects an empty region.
double sup_norm_region(const SpaceTimeField& f, RegionId region);
/// L² norm over the region nodes with trapezoid weights.
double l2_norm_region(const SpaceTimeField& f, RegionId region);

/// (Σ (1+|ζ|²)⁻¹ |f̂(ζ)|² dζ / (2π)^d)^{1/2} on a DFT lattice. `dims` lists the
/// axis sizes slowest first, `spacing` the matching steps. Each axis is zero
/// padded to `pad`·N; pad = 1 treats the box as periodic.
double h_minus1_norm(std::span<const double> data, std::span<const std::size_t> dims,
                     std::span<const double> spacing, int pad = 2);
double h_minus1_norm(const SpaceTimeField& f, int pad = 2);

/// Discrete L² norm sqrt(ΔV Σ f²), the weight-1 counterpart of h_minus1_norm.
double l2_norm_box(std::span<const double> data, std::span<const double> spacing);

}  // namespace lct
