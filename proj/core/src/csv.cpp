#include "lct/csv.hpp"

#include <charconv>
#include <cmath>

#include "lct/error.hpp"

namespace lct {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

CsvWriter::CsvWriter(const std::filesystem::path& path, std::initializer_list<std::string_view> header)
    : out_(path, std::ios::binary) {
  if (!out_) throw Rejected("io", "cannot open " + path.string());
  for (auto h : header) *this << h;
  end_row();
}

void CsvWriter::sep() {
  if (!first_) out_ << ',';
  first_ = false;
}

CsvWriter& CsvWriter::operator<<(double v) {
  sep();
  out_ << format_double(v);
  return *this;
}

CsvWriter& CsvWriter::operator<<(long long v) {
  sep();
  out_ << v;
  return *this;
}

CsvWriter& CsvWriter::operator<<(std::string_view s) {
  sep();
  out_ << s;
  return *this;
}

void CsvWriter::end_row() {
  out_ << '\n';
  first_ = true;
}

void write_series(const std::filesystem::path& path, std::string_view xname, std::string_view yname,
                  const std::vector<double>& x, const std::vector<double>& y) {
  CsvWriter w(path, {xname, yname});
  for (std::size_t i = 0; i < x.size() && i < y.size(); ++i) {
    w << x[i] << y[i];
    w.end_row();
  }
}

}  // namespace lct
