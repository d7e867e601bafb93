#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "lct/go_probes.hpp"

namespace lct {

enum class OperatorTag { Lambda, Response, FullData };

std::string_view operator_name(OperatorTag tag);

/// Real input of a measurement operator. u0/u1 are used only by FullData and
/// may be empty (zero) otherwise.
struct OperatorInput {
  BoundarySignal f;
  SpaceField u0, u1;
  std::string label;
};

struct MeasurementRecord {
  OperatorTag tag = OperatorTag::Lambda;
  OperatorInput input;
  BoundarySignal dn;       ///< ∂νu on Σ
  SpaceField uT, utT;      ///< Response/FullData only
};

MeasurementRecord apply_operator(OperatorTag tag, const CoefficientPair& pair, const OperatorInput& input);

/// Product-space norm ‖∂νu‖_{L²(Σ)} + ‖u(T)‖_{H¹} + ‖∂t u(T)‖_{L²} (final terms only for Response/FullData).
double k_norm(OperatorTag tag, const BoundarySignal& dn, const SpaceField* uT, const SpaceField* utT);
/// Input norm: ‖f‖_{H¹(Σ)}, plus ‖u0‖_{H¹} + ‖u1‖_{L²} for FullData.
double input_norm(OperatorTag tag, const OperatorInput& in);

struct DiffNormEstimate {
  double eps = 0.0;
  std::size_t argmax = 0;
  std::vector<double> per_probe;
};

/// max over probes of ‖(Op₂−Op₁)(input)‖_𝓚 / ‖input‖ (a lower bound on the operator norm).
DiffNormEstimate estimate_diff_norm(OperatorTag tag, const CoefficientPair& pair1, const CoefficientPair& pair2,
                                    const std::vector<OperatorInput>& probes, int jobs = 1);

struct ProbeDictionarySpec {
  std::vector<double> lambdas{10.0};
  int omega_count = 4;
  int y_count = 2;        ///< mollifier centers per direction, spread across the annulus
  double h = 0.2;
  int random_bumps = 4;   ///< smooth boundary bumps with seeded placement
  std::uint64_t seed = 0;
};

/// GO probes (real and imaginary parts of f_λ over a (y, ω, λ) lattice) plus
/// seeded random smooth boundary bumps, all with f(·,0) = 0.
std::vector<OperatorInput> make_probe_dictionary(const SpaceTimeGrid& g, const ProbeDictionarySpec& spec,
                                                 const ScalarField* background_a = nullptr);

struct CloakDemoSpec {
  BumpSpec cloak_bump{{0.0, 0.0}, 0.12, 0.1, 0.1, 1.0};
  BumpSpec visible_bump{{0.0, 0.0}, 1.25, 0.2, 0.3, 1.0};
  RegionId cloak_region = RegionId::CloakOmega;
  bool perturb_b = false;  ///< perturb b instead of a
  ProbeDictionarySpec probes;
  int jobs = 1;
};

struct CloakDemoResult {
  double eps_cloak = 0.0;
  double eps_visible = 0.0;
};

/// Lambda-difference estimates for a bump of amplitude δ placed in the cloak and in QrStar.
CloakDemoResult cloaking_demo(const CoefficientPair& background, double delta, const CloakDemoSpec& spec = {});

/// Persists a record as a directory: input.csv, output.csv, meta.txt and LCT1 final snapshots.
void save_record(const std::filesystem::path& dir, const MeasurementRecord& rec);

}  // namespace lct
