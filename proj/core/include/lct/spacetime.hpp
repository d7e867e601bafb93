#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "lct/vec.hpp"

namespace lct {

/// Region tags. `CloakOmega` is the cloak cone intersected with the true
/// domain of dependence of the square Ω (see README, "Geometry").
enum class RegionId { Q, AnnulusAr, ConePlus, ConeMinus, QrStar, QrSharp, Cloak, CloakOmega };

std::optional<RegionId> parse_region(std::string_view name);
std::string_view region_name(RegionId id);

struct GridParams {
  int n = 2;
  double r = 1.0;
  double T = 2.5;
  int nx = 129;
  int nt = 0;         ///< 0 selects the CFL default
  double cfl = 0.9;   ///< Δt = cfl·Δx/√n when nt == 0
};

struct SpaceTimePoint {
  Vec2 x{0.0, 0.0};
  double t = 0.0;
};

/// Uniform grid on Ω×[0,T] where Ω = (−L,L)^n is the square inscribed in
/// B(0,r/2), L = r/(2√n). Nodes include the boundary; time levels 0..nt.
class SpaceTimeGrid {
 public:
  SpaceTimeGrid() : SpaceTimeGrid(GridParams{}) {}
  explicit SpaceTimeGrid(const GridParams& p);

  int n() const { return n_; }
  double r() const { return r_; }
  double T() const { return T_; }
  double half_side() const { return half_; }
  double dx() const { return dx_; }
  double dt() const { return dt_; }
  int nx() const { return nx_; }
  int nt() const { return nt_; }
  const GridParams& params() const { return params_; }

  /// Number of spatial nodes per time level (nx^n).
  std::size_t slice_size() const { return slice_; }
  std::size_t size() const { return slice_ * static_cast<std::size_t>(nt_ + 1); }

  double coord(int i) const { return -half_ + i * dx_; }
  double time(int k) const { return k * dt_; }
  std::size_t flat(int i, int j = 0) const {
    return static_cast<std::size_t>(j) * static_cast<std::size_t>(n_ == 2 ? nx_ : 1) + static_cast<std::size_t>(i);
  }
  Vec2 node(std::size_t flat) const;
  bool is_boundary(std::size_t flat) const;

  /// Largest λ allowed by the 10-points-per-wavelength rule.
  double lambda_max() const;

  bool operator==(const SpaceTimeGrid& o) const {
    return n_ == o.n_ && nx_ == o.nx_ && nt_ == o.nt_ && r_ == o.r_ && T_ == o.T_;
  }

 private:
  GridParams params_;
  int n_;
  double r_, T_, half_, dx_, dt_;
  int nx_, nt_;
  std::size_t slice_;
};

/// Exact evaluation of the defining strict inequalities. Points outside the
/// bounding box of Q_r = B(0,r/2)×(0,T) are outside every region except the
/// purely spatial annulus.
bool region_contains(const SpaceTimeGrid& grid, RegionId region, const Vec2& x, double t);

/// Samples the light-like line {(y − tω, t)}. Rejects |ω| ≠ 1 (tolerance 1e-12).
std::vector<SpaceTimePoint> characteristic_points(const Vec2& y, const Vec2& omega,
                                                  std::span<const double> t_samples);

void require_unit(const Vec2& omega, const char* stage);

}  // namespace lct
