#include "wermer/io.hpp"

#include <filesystem>
#include <fstream>

#include "wermer/errors.hpp"

namespace wermer {

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << v;
  return os.str();
}

CsvWriter::CsvWriter(std::vector<std::string> columns, std::string config_hash) : columns_(std::move(columns)) {
  comments_.push_back("config_hash=" + config_hash);
}

void CsvWriter::comment(const std::string& line) { comments_.push_back(line); }

void CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != columns_.size()) throw InvalidArgument("csv row width does not match header");
  for (std::size_t i = 0; i < cells.size(); ++i) body_ << (i ? "," : "") << cells[i];
  body_ << "\n";
  ++rows_;
}

std::string CsvWriter::str() const {
  std::ostringstream os;
  for (const auto& c : comments_) os << "# " << c << "\n";
  for (std::size_t i = 0; i < columns_.size(); ++i) os << (i ? "," : "") << columns_[i];
  os << "\n" << body_.str();
  return os.str();
}

std::string pgm16(int width, int height, const std::vector<std::uint16_t>& pixels, const std::string& comment) {
  if (pixels.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height))
    throw InvalidArgument("pixel count does not match raster size");
  std::string out = "P5\n# " + comment + "\n" + std::to_string(width) + " " + std::to_string(height) + "\n65535\n";
  out.reserve(out.size() + 2 * pixels.size());
  for (std::uint16_t v : pixels) {
    out.push_back(static_cast<char>(v >> 8));
    out.push_back(static_cast<char>(v & 0xff));
  }
  return out;
}

void write_file(const std::string& path, std::string_view bytes) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream f(p, std::ios::binary);
  if (!f) throw ConfigError("cannot open '" + path + "' for writing");
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw ConfigError("write to '" + path + "' failed");
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open '" + path + "'");
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

}  // namespace wermer
