#pragma once

#include <cmath>
#include <complex>
#include <array>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "lct/error.hpp"
#include "lct/lightray.hpp"

namespace lct {

/// Samples of g at nodes x₀ < … < xₙ inside J̄ = [j_lo, j_hi]. `Real` and
/// `Complex` default to double precision; tests instantiate them with
/// multiprecision types to separate the extension error from rounding.
template <class Real = double, class Complex = std::complex<double>>
struct BasicLagrangeProblem {
  Real j_lo{-0.1};
  Real j_hi{0.1};
  std::vector<Real> nodes;
  std::vector<Complex> values;

  std::size_t degree() const { return nodes.empty() ? 0 : nodes.size() - 1; }
  Real length() const { return j_hi - j_lo; }
};
using LagrangeProblem = BasicLagrangeProblem<>;

/// Nodes x_i = j_lo + i|J|/(n+1), i = 0..n.
template <class Real>
std::vector<Real> equispaced_nodes(Real j_lo, Real j_hi, int n) {
  std::vector<Real> x(n + 1);
  const Real step = (j_hi - j_lo) / Real(n + 1);
  for (int i = 0; i <= n; ++i) x[i] = j_lo + Real(i) * step;
  return x;
}

template <class Real, class Complex, class Fn>
BasicLagrangeProblem<Real, Complex> make_equispaced(Real j_lo, Real j_hi, int n, Fn&& g) {
  BasicLagrangeProblem<Real, Complex> p;
  p.j_lo = j_lo;
  p.j_hi = j_hi;
  p.nodes = equispaced_nodes(j_lo, j_hi, n);
  p.values.reserve(p.nodes.size());
  for (const Real& x : p.nodes) p.values.push_back(g(x));
  return p;
}

inline LagrangeProblem make_equispaced(double j_lo, double j_hi, int n,
                                       const std::function<std::complex<double>(double)>& g) {
  return make_equispaced<double, std::complex<double>>(j_lo, j_hi, n, g);
}

/// Checks nodes ⊂ J̄ and spacing ≥ |J|/(n+1). Throws Rejected("continuation").
template <class Real, class Complex>
void check_nodes(const BasicLagrangeProblem<Real, Complex>& p) {
  using std::abs;
  if (p.nodes.empty() || p.nodes.size() != p.values.size())
    throw Rejected("continuation", "lagrange problem needs matching nonempty nodes and values");
  if (!(p.j_hi > p.j_lo)) throw Rejected("continuation", "empty interval J");
  const Real len = p.length();
  const Real tol = Real(1e-12) * len;
  const Real min_gap = len / Real(p.nodes.size());
  if (p.nodes.front() < p.j_lo - tol || p.nodes.back() > p.j_hi + tol)
    throw Rejected("continuation", "nodes leave the closure of J");
  for (std::size_t i = 1; i < p.nodes.size(); ++i)
    if (p.nodes[i] - p.nodes[i - 1] < min_gap - tol)
      throw Rejected("continuation", "node spacing below |J|/(n+1) at node " + std::to_string(i));
}

/// Barycentric weights 1/Π_{j≠i}(x_i − x_j), scaled by the node spacing to stay in range.
template <class Real>
std::vector<Real> barycentric_weights(const std::vector<Real>& x) {
  const std::size_t m = x.size();
  const Real scale = m > 1 ? (x.back() - x.front()) / Real(m - 1) : Real(1);
  std::vector<Real> w(m, Real(1));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      if (j != i) w[i] /= (x[i] - x[j]) / scale;
  return w;
}

/// P_n(z) in barycentric form. Rejects |z| > 1/2 and spacing violations.
template <class Real, class Complex>
Complex lagrange_extend(const BasicLagrangeProblem<Real, Complex>& p, const Complex& z) {
  using std::abs;
  check_nodes(p);
  if (abs(z) > Real(0.5) + Real(1e-12)) throw Rejected("continuation", "|z| > 1/2 lies outside the extension disc");
  const std::vector<Real> w = barycentric_weights(p.nodes);
  Complex num(0), den(0);
  for (std::size_t i = 0; i < p.nodes.size(); ++i) {
    const Complex d = z - Complex(p.nodes[i]);
    if (d == Complex(0)) return p.values[i];
    const Complex c = Complex(w[i]) / d;
    num += c * p.values[i];
    den += c;
  }
  return num / den;
}

/// A-priori constants of the extension: bound_A47 = e(6/|J|)ⁿ (times sup_J|g|) and
/// bound_A48 = 2(7/8)ⁿ (times the disc bound).
double growth_bound(double J, int n);
double residue_bound(int n);

struct NodeCount {
  int n = 0;
  double x0 = 0.0;       ///< unrounded minimizer
  bool useless = false;  ///< x₀ < 0: sup_J|g| too large for a useful extension
};
/// Rounds x₀ = log(log(8/7) / (e·s·log(6/|J|))) / log(48/(7|J|)) to the nearest nonnegative integer.
NodeCount optimal_node_count(double J, double sup_g);

/// Disc chain along [−1,1]: windows centred at s_j = −1 + (2j−1)ρ/5, j = 1..⌈5/ρ⌉,
/// each extended by lagrange_extend in the local variable z = (s − s_j)/ρ.
struct ChainOptions {
  double rho = 1.0;
  /// Certificate |g⁽ᵏ⁾(s)| ≤ M·k!/(2ρ)ᵏ on [−1,1].
  double M = 1.0;
  /// Absolute error of the seed samples (rounding or measurement noise).
  double noise = 0.0;
  int n_cap = 60;
  /// Floor on the node count of non-seed windows. The a-priori bound handed
  /// on from the previous window is usually of order M, for which the node
  /// formula returns 0 (constant extrapolation).
  int n_min = 2;
  bool check_certificate = true;
};

struct ChainWindow {
  int index = 0;          ///< 1-based window number
  double center = 0.0;
  double J = 0.0;         ///< |J| in local units
  int n = 0;
  double eps_in = 0.0;    ///< data error entering the window
  double bound_A47 = 0.0; ///< e(6/|J|)ⁿ·eps_in
  double bound_A48 = 0.0; ///< 2M(7/8)ⁿ
  double theta = 0.0;     ///< per-window Hölder exponent
  bool seed = false;
  LagrangeProblem problem;
  LagrangeProblem problem_lower;  ///< same window with fewer nodes (confidence estimate)
};

struct ChainResult {
  std::vector<ChainWindow> windows;
  int n0 = 0;
  int seed = 0;  ///< 0-based index into windows
  double gamma = 1.0;

  /// Extended value at s ∈ [−1,1] from the window whose centre is nearest.
  std::complex<double> operator()(double s) const;
  /// 1 − |P_n − P_lower|/max(|P_n|, floor), clipped to [0,1].
  double confidence(double s, double floor) const;
  /// Total error bound at s (the A47 and A48 terms of its window).
  double bound(double s) const;
};

/// Extends equispaced samples (s_i, g_i) of g on the known interval I = [s₀, s_last + Δs)
/// along [−1,1]. Rejects empty I and certificate violations found by finite differences.
ChainResult three_circle_chain(const std::vector<double>& s, const std::vector<std::complex<double>>& g,
                               const ChainOptions& opts = {});
/// Convenience overload sampling g at `samples` equispaced points of [i_lo, i_hi).
ChainResult three_circle_chain(const std::function<std::complex<double>(double)>& g, double i_lo, double i_hi,
                               int samples, const ChainOptions& opts = {});

/// Coordinate-wise extension from a product set I₁×…×I_d ⊂ [−1,1]^d to the
/// tensor grid of `target` points per axis on [−1,1]^d (restricted to the unit ball).
struct MultiDimProblem {
  int d = 2;
  std::vector<double> lo, hi;  ///< known intervals [lo_j, hi_j)
  int samples = 12;            ///< equispaced samples per known interval
  int target = 21;             ///< grid points per axis on [−1,1]
  std::function<std::complex<double>(const std::vector<double>&)> F;
  std::vector<ChainOptions> axis;  ///< per-axis certificates (size d)
};

struct MultiDimResult {
  int d = 0;
  std::vector<double> grid;  ///< shared axis coordinates
  std::vector<std::complex<double>> values;  ///< row-major, last axis fastest
  std::vector<char> in_ball;
  std::vector<double> axis_gamma;
  double gamma = 1.0;

  std::size_t index(const std::vector<int>& idx) const;
};

MultiDimResult multidim_extend(const MultiDimProblem& p);

enum class FillBackend { Lagrange, Regularized };

/// Space-time box on which filled spectra are represented: x ∈ [−L, L)^2 with
/// nx points, t ∈ [t0, t0+T) with nt levels. Its DFT lattice has spacings
/// 2π/(2L) in ξ and 2π/T in τ.
struct ReconBox {
  double L = 0.5;
  int nx = 32;
  double t0 = 0.0;
  double T = 2.5;
  int nt = 64;

  double hx() const { return 2.0 * L / nx; }
  double ht() const { return T / nt; }
  double dxi() const { return 2.0 * M_PI / (2.0 * L); }
  double dtau() const { return 2.0 * M_PI / T; }
  Vec2 node(int i, int j) const { return {-L + i * hx(), -L + j * hx()}; }
  double time(int k) const { return t0 + k * ht(); }
  std::size_t size() const { return static_cast<std::size_t>(nt) * nx * nx; }
};

struct FillOptions {
  FillBackend backend = FillBackend::Regularized;
  double alpha = 30.0;
  ReconBox box;
  /// Lagrange backend: continuation controls and the certificate ingredients
  /// ‖f‖_{L¹} (0 = estimate as 2·max|sample|) and the temporal support [t_lo, t_hi].
  double rho = 1.0;
  double l1_bound = 0.0;
  double t_lo = 0.0, t_hi = 2.5;
  double noise = 0.0;
  int n_cap = 60;
  /// Regularized backend: unknowns live on the box nodes inside `support`
  /// (true = allowed); empty means the whole box.
  std::vector<char> support;
  double reg = 1e-3;       ///< Tikhonov weight relative to the largest eigenvalue of A*A
  double reg_grad = 1e-3;  ///< gradient penalty, same scaling
  int max_iter = 400;
  double tol = 1e-6;
  /// Multiplier applied by the measurement to â(ξ, ·) (e.g. the mollifier transfer); null = 1.
  std::function<double(const Vec2&)> transfer;
};

struct FilledSpectrum {
  ReconBox box;
  double alpha = 0.0;
  /// Box-lattice samples with |(ξ,τ)| ≤ α.
  std::vector<SpectralSample> samples;
  /// Lattice indices (m1, m2, mt) matching `samples`.
  std::vector<std::array<int, 3>> index;
  /// Regularized backend only: the fitted field on the box grid (t slowest).
  std::vector<double> field;
  int iterations = 0;
  double residual = 0.0;
  /// Lagrange backend: number of lines and the smallest per-line γ.
  int lines = 0;
  double gamma_min = 1.0;
};

/// Lagrange backend: `samples` must lie on the box lattice inside E ∩ B(0,α).
/// Regularized backend: samples on a ξ-lattice of spacing `sample_dxi` with arbitrary τ.
FilledSpectrum fill_spectrum(const std::vector<SpectralSample>& samples, const FillOptions& opts,
                             double sample_dxi = 0.0);

/// Inverse DFT of a filled table onto the box grid (t slowest, x1 fastest).
std::vector<double> spectrum_to_field(const FilledSpectrum& s);

/// Continuation report rows: (line id, n, bound_A47, bound_A48, empirical_error, γ).
struct ContinuationRow {
  int line = 0;
  int n = 0;
  double bound_A47 = 0.0;
  double bound_A48 = 0.0;
  double empirical_error = 0.0;
  double gamma = 1.0;
};
void write_continuation_csv(const std::filesystem::path& path, const std::vector<ContinuationRow>& rows);

}  // namespace lct
