#pragma once

#include <filesystem>
#include <functional>
#include <optional>

#include "lct/coefficients.hpp"

namespace lct {

enum class SignalKind { Dirichlet, Neumann };

/// Trace on Σ = Γ×[0,T]. Γ-nodes are enumerated face by face (n = 2: faces
/// x1=−L, x1=+L, x2=−L, x2=+L with Nx nodes each, corners repeated; n = 1:
/// the two end points). Storage is level-major: value(k, id).
class BoundarySignal {
 public:
  BoundarySignal() = default;
  BoundarySignal(const SpaceTimeGrid& g, SignalKind kind, bool complex = false);

  const SpaceTimeGrid& grid() const { return grid_; }
  SignalKind kind() const { return kind_; }
  bool is_complex() const { return !im_.empty(); }
  bool empty() const { return re_.empty(); }

  int faces() const { return grid_.n() == 2 ? 4 : 2; }
  int nodes_per_face() const { return grid_.n() == 2 ? grid_.nx() : 1; }
  int node_count() const { return faces() * nodes_per_face(); }
  Vec2 position(int id) const;
  Vec2 normal(int id) const;
  std::size_t grid_flat(int id) const;
  /// Trapezoid weight of node `id` along its face (1 for n = 1).
  double surface_weight(int id) const;

  double& re(int k, int id) { return re_[static_cast<std::size_t>(k) * node_count() + id]; }
  double re(int k, int id) const { return re_[static_cast<std::size_t>(k) * node_count() + id]; }
  double& im(int k, int id) { return im_[static_cast<std::size_t>(k) * node_count() + id]; }
  double im(int k, int id) const { return im_[static_cast<std::size_t>(k) * node_count() + id]; }
  const double* re_level(int k) const { return re_.data() + static_cast<std::size_t>(k) * node_count(); }
  std::vector<double>& re_data() { return re_; }
  const std::vector<double>& re_data() const { return re_; }
  std::vector<double>& im_data() { return im_; }
  const std::vector<double>& im_data() const { return im_; }

  BoundarySignal real_part() const;
  BoundarySignal imag_part() const;
  /// Max |f(·,0)|, the 𝓗₀¹ compatibility defect.
  double initial_defect() const;

  /// L²(Σ) norm with trapezoid weights (complex: of |f|).
  double l2_norm() const;
  /// H¹(Σ) norm with first-order tangential and time differences, equally weighted.
  double h1_norm() const;

  BoundarySignal& operator-=(const BoundarySignal& o);

 private:
  SpaceTimeGrid grid_;
  SignalKind kind_ = SignalKind::Dirichlet;
  std::vector<double> re_, im_;
};

/// Writes "node_id,t,value" (plus value_im for complex signals).
void write_signal_csv(const std::filesystem::path& path, const BoundarySignal& s);

struct SolveData {
  const BoundarySignal* f = nullptr;   ///< Dirichlet data, real; null means 0
  const SpaceField* u0 = nullptr;      ///< null means 0
  const SpaceField* u1 = nullptr;
  const SpaceTimeField* F = nullptr;   ///< source; null means 0
};

struct SolveOptions {
  bool keep_field = true;    ///< store every level
  bool track_norms = false;  ///< accumulate sup_t ‖u‖_{H¹} and sup_t ‖∂t u‖_{L²}
  /// Called with (level, values) once each level is final, in solver time.
  std::function<void(int, const double*)> observer;
};

class WaveTrajectory {
 public:
  const SpaceTimeGrid& grid() const { return grid_; }
  bool has_field() const { return !field_.data().empty(); }
  const SpaceTimeField& field() const { return field_; }
  const SpaceField& u_initial() const { return u0_; }
  const SpaceField& ut_initial() const { return ut0_; }
  const SpaceField& u_final() const { return uT_; }
  const SpaceField& ut_final() const { return utT_; }
  const BoundarySignal& neumann() const { return dn_; }
  std::optional<double> sup_h1_u() const { return sup_h1_; }
  std::optional<double> sup_l2_ut() const { return sup_ut_; }

 private:
  friend class SolverAccess;
  SpaceTimeGrid grid_;
  SpaceTimeField field_;
  SpaceField u0_, ut0_, uT_, utT_;
  BoundarySignal dn_;
  std::optional<double> sup_h1_, sup_ut_;
};

/// Leapfrog solve of ∂t²u − Δu + a∂t u + bu = F with Dirichlet data f.
WaveTrajectory solve_forward(const CoefficientPair& pair, const SolveData& data, const SolveOptions& opts = {});

/// Solves ∂t²u − Δu − a∂t u + bu = F on (0,T) from final data (uT, ∂t u(T))
/// by running the forward scheme in reversed time s = T − t.
WaveTrajectory solve_backward(const CoefficientPair& pair, const SpaceField& uT, const SpaceField& utT,
                              const BoundarySignal* f, const SpaceTimeField* F = nullptr,
                              const SolveOptions& opts = {});

struct ComplexTrajectory {
  WaveTrajectory re, im;
};
/// Complex Dirichlet data with zero initial data, solved as two real problems.
ComplexTrajectory solve_forward_complex(const CoefficientPair& pair, const BoundarySignal& f,
                                        const SolveOptions& opts = {});

/// One-sided second-order normal derivative along the outward normal.
BoundarySignal neumann_trace(const WaveTrajectory& traj);
/// Complex Neumann trace assembled from the two real solves.
BoundarySignal neumann_trace(const ComplexTrajectory& traj);

struct EnergyReport {
  double ratio = 0.0;
  double numerator = 0.0;
  double denominator = 0.0;
  bool degenerate = false;
};
EnergyReport energy_report(const WaveTrajectory& traj, const BoundarySignal* f, const SpaceField* u0,
                           const SpaceField* u1);

/// Max over interior nodes and levels 1..Nt−1 of Δt²·|scheme residual|,
/// relative to max|u|. Needs the stored field.
double scheme_residual(const WaveTrajectory& traj, const CoefficientPair& pair, const SpaceTimeField* F = nullptr);

/// Staggered discrete energies E^{k+1/2}, k = 0..Nt−1 (valid for f = 0).
std::vector<double> discrete_energy(const WaveTrajectory& traj);

}  // namespace lct
