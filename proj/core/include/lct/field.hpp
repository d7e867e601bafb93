#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "lct/spacetime.hpp"

namespace lct {

/// Axis-aligned space-time box. `empty` marks a field with no support.
struct Box {
  Vec2 lo{0.0, 0.0};
  Vec2 hi{0.0, 0.0};
  double t0 = 0.0;
  double t1 = 0.0;
  bool empty = true;
};

/// A scalar function of (x,t), extended by zero outside its support box.
class ScalarField {
 public:
  virtual ~ScalarField() = default;
  virtual double operator()(const Vec2& x, double t) const = 0;
  virtual Box support() const = 0;
};

/// One time level on the spatial grid (row-major, x1 fastest).
class SpaceField {
 public:
  SpaceField() = default;
  explicit SpaceField(const SpaceTimeGrid& g) : grid_(g), data_(g.slice_size(), 0.0) {}

  const SpaceTimeGrid& grid() const { return grid_; }
  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }
  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }
  bool empty() const { return data_.empty(); }

  double l2_norm() const;
  /// ‖·‖_{H¹(Ω)} with first-order differences.
  double h1_norm() const;

 private:
  SpaceTimeGrid grid_;
  std::vector<double> data_;
};

/// Dense field sampled on every node of the space-time grid, stored
/// row-major as (t, x2, x1) with t slowest.
class SpaceTimeField final : public ScalarField {
 public:
  SpaceTimeField() = default;
  explicit SpaceTimeField(const SpaceTimeGrid& g) : grid_(g), data_(g.size(), 0.0) {}

  const SpaceTimeGrid& grid() const { return grid_; }
  std::vector<double>& data() {
    cached_.reset();
    return data_;
  }
  const std::vector<double>& data() const { return data_; }
  double at(int k, std::size_t flat) const { return data_[k * grid_.slice_size() + flat]; }
  double& at(int k, std::size_t flat) {
    cached_.reset();
    return data_[k * grid_.slice_size() + flat];
  }
  const double* level(int k) const { return data_.data() + k * grid_.slice_size(); }
  double* level(int k) {
    cached_.reset();
    return data_.data() + k * grid_.slice_size();
  }

  bool is_zero() const;
  double max_abs() const;

  /// Multilinear interpolation; zero outside the sampled box.
  double operator()(const Vec2& x, double t) const override;
  /// Bounding box of the nonzero nodes, padded by one cell (cached until the
  /// data is next accessed mutably).
  Box support() const override;

  SpaceTimeField& operator+=(const SpaceTimeField& o);
  SpaceTimeField& operator*=(double s);

 private:
  Box compute_support() const;

  SpaceTimeGrid grid_;
  std::vector<double> data_;
  mutable std::optional<Box> cached_;
};

/// Header of an "LCT1" dump: n, Nx per axis, Nt (data holds Nt+1 levels).
struct FieldDump {
  std::int64_t n = 0;
  std::vector<std::int64_t> nx;
  std::int64_t nt = 0;
  std::vector<double> data;
};

void write_field_dump(const std::filesystem::path& path, const SpaceTimeField& f);
void write_field_dump(const std::filesystem::path& path, const SpaceField& f);
FieldDump read_field_dump(const std::filesystem::path& path);

}  // namespace lct
