#pragma once

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

namespace lct {

/// Minimal CSV writer: '.' decimals, '\n' line endings, round-trippable doubles.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, std::initializer_list<std::string_view> header);

  CsvWriter& operator<<(double v);
  CsvWriter& operator<<(long long v);
  CsvWriter& operator<<(int v) { return *this << static_cast<long long>(v); }
  CsvWriter& operator<<(std::size_t v) { return *this << static_cast<long long>(v); }
  CsvWriter& operator<<(std::string_view s);
  CsvWriter& operator<<(const char* s) { return *this << std::string_view(s); }
  CsvWriter& operator<<(const std::string& s) { return *this << std::string_view(s); }
  CsvWriter& operator<<(bool b) { return *this << static_cast<long long>(b ? 1 : 0); }
  void end_row();

 private:
  void sep();
  std::ofstream out_;
  bool first_ = true;
};

/// Shortest round-trip formatting of a double ("nan"/"inf" spelled out).
std::string format_double(double v);

/// Writes an (x, y) series, one pair per line, with a header naming the columns.
void write_series(const std::filesystem::path& path, std::string_view xname, std::string_view yname,
                  const std::vector<double>& x, const std::vector<double>& y);

}  // namespace lct
