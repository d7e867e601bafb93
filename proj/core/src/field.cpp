#include "lct/field.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

#include "lct/error.hpp"

namespace lct {

double SpaceField::l2_norm() const {
  const double w = std::pow(grid_.dx(), grid_.n());
  double s = 0.0;
  for (double v : data_) s += v * v;
  return std::sqrt(s * w);
}

double SpaceField::h1_norm() const {
  const int nx = grid_.nx();
  const double dx = grid_.dx();
  const double w = std::pow(dx, grid_.n());
  double s = 0.0;
  for (double v : data_) s += v * v;
  if (grid_.n() == 1) {
    for (int i = 0; i + 1 < nx; ++i) {
      const double d = (data_[i + 1] - data_[i]) / dx;
      s += d * d;
    }
  } else {
    for (int j = 0; j < nx; ++j)
      for (int i = 0; i < nx; ++i) {
        const std::size_t id = static_cast<std::size_t>(j) * nx + i;
        if (i + 1 < nx) {
          const double d = (data_[id + 1] - data_[id]) / dx;
          s += d * d;
        }
        if (j + 1 < nx) {
          const double d = (data_[id + nx] - data_[id]) / dx;
          s += d * d;
        }
      }
  }
  return std::sqrt(s * w);
}

bool SpaceTimeField::is_zero() const { return data_.empty() || support().empty; }

double SpaceTimeField::max_abs() const {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

double SpaceTimeField::operator()(const Vec2& x, double t) const {
  if (data_.empty()) return 0.0;
  const double L = grid_.half_side();
  const double dx = grid_.dx();
  const double dt = grid_.dt();
  const int nx = grid_.nx();
  const int nt = grid_.nt();
  if (t < 0.0 || t > grid_.T() || x[0] < -L || x[0] > L) return 0.0;
  if (grid_.n() == 2 && (x[1] < -L || x[1] > L)) return 0.0;

  const double st = t / dt;
  int k = std::min(static_cast<int>(st), nt - 1);
  const double wt = st - k;
  const double s0 = (x[0] + L) / dx;
  int i = std::min(static_cast<int>(s0), nx - 2);
  const double w0 = s0 - i;
  const std::size_t S = grid_.slice_size();
  if (grid_.n() == 1) {
    const double* a = data_.data() + k * S;
    const double* b = a + S;
    const double va = a[i] * (1 - w0) + a[i + 1] * w0;
    const double vb = b[i] * (1 - w0) + b[i + 1] * w0;
    return va * (1 - wt) + vb * wt;
  }
  const double s1 = (x[1] + L) / dx;
  int j = std::min(static_cast<int>(s1), nx - 2);
  const double w1 = s1 - j;
  auto bilinear = [&](const double* p) {
    const double* r0 = p + static_cast<std::size_t>(j) * nx + i;
    const double* r1 = r0 + nx;
    return (r0[0] * (1 - w0) + r0[1] * w0) * (1 - w1) + (r1[0] * (1 - w0) + r1[1] * w0) * w1;
  };
  const double* a = data_.data() + k * S;
  return bilinear(a) * (1 - wt) + bilinear(a + S) * wt;
}

Box SpaceTimeField::support() const {
  if (!cached_) cached_ = compute_support();
  return *cached_;
}

Box SpaceTimeField::compute_support() const {
  Box b;
  const std::size_t S = grid_.slice_size();
  int kmin = grid_.nt() + 1, kmax = -1;
  Vec2 lo{1e300, 1e300}, hi{-1e300, -1e300};
  for (int k = 0; k <= grid_.nt(); ++k) {
    const double* p = level(k);
    for (std::size_t q = 0; q < S; ++q) {
      if (p[q] == 0.0) continue;
      kmin = std::min(kmin, k);
      kmax = std::max(kmax, k);
      const Vec2 x = grid_.node(q);
      for (int c = 0; c < 2; ++c) {
        lo[c] = std::min(lo[c], x[c]);
        hi[c] = std::max(hi[c], x[c]);
      }
    }
  }
  if (kmax < 0) return b;
  const double dx = grid_.dx();
  b.empty = false;
  b.lo = {lo[0] - dx, lo[1] - dx};
  b.hi = {hi[0] + dx, hi[1] + dx};
  b.t0 = std::max(0.0, grid_.time(kmin) - grid_.dt());
  b.t1 = std::min(grid_.T(), grid_.time(kmax) + grid_.dt());
  return b;
}

SpaceTimeField& SpaceTimeField::operator+=(const SpaceTimeField& o) {
  if (!(grid_ == o.grid_)) throw Rejected("coefficients", "field grid mismatch");
  cached_.reset();
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
  return *this;
}

SpaceTimeField& SpaceTimeField::operator*=(double s) {
  cached_.reset();
  for (double& v : data_) v *= s;
  return *this;
}

namespace {

void write_i64(std::ofstream& os, std::int64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((static_cast<std::uint64_t>(v) >> (8 * i)) & 0xff);
  os.write(reinterpret_cast<const char*>(b), 8);
}

std::int64_t read_i64(std::ifstream& is) {
  unsigned char b[8];
  if (!is.read(reinterpret_cast<char*>(b), 8)) throw Rejected("io", "truncated LCT1 header");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return static_cast<std::int64_t>(v);
}

void write_f64(std::ofstream& os, const std::vector<double>& data) {
  for (double d : data) {
    std::uint64_t u;
    std::memcpy(&u, &d, 8);
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((u >> (8 * i)) & 0xff);
    os.write(reinterpret_cast<const char*>(b), 8);
  }
}

void write_dump(const std::filesystem::path& path, const SpaceTimeGrid& g, std::int64_t nt,
                const std::vector<double>& data) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Rejected("io", "cannot open " + path.string());
  os.write("LCT1", 4);
  write_i64(os, g.n());
  for (int d = 0; d < g.n(); ++d) write_i64(os, g.nx());
  write_i64(os, nt);
  write_f64(os, data);
}

}  // namespace

void write_field_dump(const std::filesystem::path& path, const SpaceTimeField& f) {
  write_dump(path, f.grid(), f.grid().nt(), f.data());
}

void write_field_dump(const std::filesystem::path& path, const SpaceField& f) {
  write_dump(path, f.grid(), 0, f.data());
}

FieldDump read_field_dump(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Rejected("io", "cannot open " + path.string());
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, "LCT1", 4) != 0) throw Rejected("io", "bad LCT1 magic");
  FieldDump d;
  d.n = read_i64(is);
  if (d.n < 1 || d.n > 3) throw Rejected("io", "bad dimension in LCT1 header");
  std::size_t count = 1;
  for (std::int64_t i = 0; i < d.n; ++i) {
    d.nx.push_back(read_i64(is));
    count *= static_cast<std::size_t>(d.nx.back());
  }
  d.nt = read_i64(is);
  count *= static_cast<std::size_t>(d.nt + 1);
  d.data.resize(count);
  for (auto& v : d.data) {
    unsigned char b[8];
    if (!is.read(reinterpret_cast<char*>(b), 8)) throw Rejected("io", "truncated LCT1 data");
    std::uint64_t u = 0;
    for (int i = 0; i < 8; ++i) u |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    std::memcpy(&v, &u, 8);
  }
  return d;
}

}  // namespace lct
