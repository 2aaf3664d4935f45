#pragma once

#include <cstdint>
#include <iomanip>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace wermer {

std::uint64_t fnv1a(std::string_view bytes);
std::string hex64(std::uint64_t v);

/// Decimal with `digits` significant digits; works for double and mp numbers.
template <class T>
std::string decimal(const T& x, int digits = 17) {
  std::ostringstream os;
  os << std::setprecision(digits) << x;
  return os.str();
}

/// CSV text with '#'-prefixed header comments and a column row.
class CsvWriter {
 public:
  CsvWriter(std::vector<std::string> columns, std::string config_hash);
  void comment(const std::string& line);
  void row(const std::vector<std::string>& cells);
  std::string str() const;
  std::size_t rows() const { return rows_; }

 private:
  std::vector<std::string> columns_;
  std::vector<std::string> comments_;
  std::ostringstream body_;
  std::size_t rows_ = 0;
};

/// Binary P5 graymap, 16-bit big-endian samples, one comment line.
std::string pgm16(int width, int height, const std::vector<std::uint16_t>& pixels, const std::string& comment);

/// Writes bytes to a file, creating parent directories; throws on failure.
void write_file(const std::string& path, std::string_view bytes);
std::string read_file(const std::string& path);

}  // namespace wermer
