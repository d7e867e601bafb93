#include "lct/spacetime.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lct/error.hpp"

namespace lct {

namespace {

constexpr std::pair<RegionId, std::string_view> kRegionNames[] = {
    {RegionId::Q, "Q"},
    {RegionId::AnnulusAr, "AnnulusAr"},
    {RegionId::ConePlus, "ConePlus"},
    {RegionId::ConeMinus, "ConeMinus"},
    {RegionId::QrStar, "QrStar"},
    {RegionId::QrSharp, "QrSharp"},
    {RegionId::Cloak, "Cloak"},
    {RegionId::CloakOmega, "CloakOmega"},
};

}  // namespace

std::optional<RegionId> parse_region(std::string_view name) {
  for (const auto& [id, s] : kRegionNames)
    if (s == name) return id;
  return std::nullopt;
}

std::string_view region_name(RegionId id) {
  for (const auto& [rid, s] : kRegionNames)
    if (rid == id) return s;
  throw Rejected("spacetime", "unknown region tag");
}

SpaceTimeGrid::SpaceTimeGrid(const GridParams& p) : params_(p) {
  if (p.n != 1 && p.n != 2) throw Rejected("spacetime", "n must be 1 or 2");
  if (!(p.r > 0.0)) throw Rejected("spacetime", "r must be positive");
  if (!(p.T > 2.0 * p.r)) throw Rejected("spacetime", "T must exceed 2r");
  if (p.nx < 5) throw Rejected("spacetime", "Nx must be at least 5");
  if (!(p.cfl > 0.0 && p.cfl <= 1.0)) throw Rejected("spacetime", "cfl must lie in (0,1]");
  n_ = p.n;
  r_ = p.r;
  T_ = p.T;
  nx_ = p.nx;
  half_ = r_ / (2.0 * std::sqrt(static_cast<double>(n_)));
  dx_ = 2.0 * half_ / (nx_ - 1);
  const double dt_cfl = dx_ / std::sqrt(static_cast<double>(n_));
  if (p.nt > 0) {
    nt_ = p.nt;
    dt_ = T_ / nt_;
    if (dt_ > dt_cfl * (1.0 + 1e-12))
      throw Rejected("spacetime", "CFL violated: dt=" + std::to_string(dt_) + " > dx/sqrt(n)=" +
                                      std::to_string(dt_cfl));
  } else {
    nt_ = static_cast<int>(std::ceil(T_ / (p.cfl * dt_cfl)));
    if (nt_ % 2) ++nt_;  // keeps t = T/2 on the grid
    dt_ = T_ / nt_;
  }
  params_.nt = nt_;
  slice_ = n_ == 2 ? static_cast<std::size_t>(nx_) * nx_ : static_cast<std::size_t>(nx_);
}

Vec2 SpaceTimeGrid::node(std::size_t flat) const {
  if (n_ == 1) return {coord(static_cast<int>(flat)), 0.0};
  const auto i = static_cast<int>(flat % nx_);
  const auto j = static_cast<int>(flat / nx_);
  return {coord(i), coord(j)};
}

bool SpaceTimeGrid::is_boundary(std::size_t flat) const {
  const auto i = static_cast<int>(n_ == 2 ? flat % nx_ : flat);
  if (i == 0 || i == nx_ - 1) return true;
  if (n_ == 1) return false;
  const auto j = static_cast<int>(flat / nx_);
  return j == 0 || j == nx_ - 1;
}

double SpaceTimeGrid::lambda_max() const { return 2.0 * M_PI / (10.0 * dx_); }

bool region_contains(const SpaceTimeGrid& g, RegionId region, const Vec2& x, double t) {
  const double ax = norm(x);
  const double h = g.r() / 2.0;
  if (region == RegionId::AnnulusAr) return h < ax && ax < g.T() - h;

  if (ax >= h || t <= 0.0 || t >= g.T()) {
    // outside the open cylinder Q_r
    return false;
  }
  const double L = g.half_side();
  const bool in_omega = std::abs(x[0]) < L && (g.n() == 1 || std::abs(x[1]) < L);
  const bool cone_plus = ax < t - h && t > h;
  const bool cone_minus = ax < g.T() - h - t && g.T() - h > t;
  const bool cloak = ax < h - t && t < h;
  switch (region) {
    case RegionId::Q: return in_omega;
    case RegionId::ConePlus: return cone_plus;
    case RegionId::ConeMinus: return cone_minus;
    case RegionId::QrStar: return in_omega && cone_plus && cone_minus;
    case RegionId::QrSharp: return in_omega && cone_plus;
    case RegionId::Cloak: return cloak;
    case RegionId::CloakOmega: {
      if (!(cloak && in_omega)) return false;
      double dist = L - std::abs(x[0]);
      if (g.n() == 2) dist = std::min(dist, L - std::abs(x[1]));
      return dist > t;
    }
    case RegionId::AnnulusAr: break;
  }
  throw Rejected("spacetime", "unknown region tag");
}

void require_unit(const Vec2& omega, const char* stage) {
  if (std::abs(norm(omega) - 1.0) > 1e-12) throw Rejected(stage, "direction omega is not a unit vector");
}

std::vector<SpaceTimePoint> characteristic_points(const Vec2& y, const Vec2& omega,
                                                  std::span<const double> t_samples) {
  require_unit(omega, "spacetime");
  std::vector<SpaceTimePoint> out;
  out.reserve(t_samples.size());
  for (double t : t_samples) out.push_back({y - t * omega, t});
  return out;
}

}  // namespace lct
