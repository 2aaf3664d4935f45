#include "wermer/config.hpp"

#include <charconv>
#include <functional>
#include <set>
#include <sstream>

#include "wermer/io.hpp"

namespace wermer {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto p = s.find(sep, start);
    out.push_back(trim(s.substr(start, p == std::string_view::npos ? std::string_view::npos : p - start)));
    if (p == std::string_view::npos) break;
    start = p + 1;
  }
  return out;
}

template <class N>
N number(std::string_view v, std::string_view key) {
  N x{};
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || ptr != v.data() + v.size())
    throw ConfigError("bad value '" + std::string(v) + "' for " + std::string(key));
  return x;
}

int positive(std::string_view v, std::string_view key) {
  const int x = number<int>(v, key);
  if (x <= 0) throw ConfigError(std::string(key) + " must be positive");
  return x;
}

int nonnegative(std::string_view v, std::string_view key) {
  const int x = number<int>(v, key);
  if (x < 0) throw ConfigError(std::string(key) + " must be nonnegative");
  return x;
}

using Setter = std::function<void(RunConfig&, std::string_view, std::string_view)>;

const std::map<std::string, Setter, std::less<>>& setters() {
  static const std::map<std::string, Setter, std::less<>> table = {
      {"schedule.r",
       [](RunConfig& c, std::string_view v, std::string_view k) {
         c.r.clear();
         for (auto part : split(v, ',')) {
           try {
             c.r.push_back(RadiusFactor::parse(part));
           } catch (const Error& e) {
             throw ConfigError(std::string(k) + ": " + e.what());
           }
         }
       }},
      {"schedule.m",
       [](RunConfig& c, std::string_view v, std::string_view k) {
         c.m.clear();
         for (auto part : split(v, ',')) {
           try {
             c.m.push_back(Multiplicity::parse(part));
           } catch (const Error& e) {
             throw ConfigError(std::string(k) + ": " + e.what());
           }
         }
       }},
      {"schedule.depth", [](RunConfig& c, std::string_view v, std::string_view k) { c.depth = nonnegative(v, k); }},
      {"schedule.delta_offset",
       [](RunConfig& c, std::string_view v, std::string_view k) {
         c.delta_log_offset.clear();
         if (v.empty()) return;
         for (auto part : split(v, ',')) {
           const auto kv = split(part, ':');
           if (kv.size() != 2) throw ConfigError(std::string(k) + " expects n:offset pairs");
           c.delta_log_offset[positive(kv[0], k)] = number<double>(kv[1], k);
         }
       }},
      {"schedule.verify",
       [](RunConfig& c, std::string_view v, std::string_view k) {
         if (v == "true") c.verify = true;
         else if (v == "false") c.verify = false;
         else throw ConfigError(std::string(k) + " must be true or false");
       }},
      {"anchors.seed", [](RunConfig& c, std::string_view v, std::string_view k) { c.seed = number<std::uint64_t>(v, k); }},
      {"precision.max_bits", [](RunConfig& c, std::string_view v, std::string_view k) { c.max_bits = positive(v, k); }},
      {"plane.z0_re", [](RunConfig& c, std::string_view v, std::string_view k) { c.plane.z0.real(number<double>(v, k)); }},
      {"plane.z0_im", [](RunConfig& c, std::string_view v, std::string_view k) { c.plane.z0.imag(number<double>(v, k)); }},
      {"plane.gamma_re",
       [](RunConfig& c, std::string_view v, std::string_view k) { c.plane.gamma.real(number<double>(v, k)); }},
      {"plane.gamma_im",
       [](RunConfig& c, std::string_view v, std::string_view k) { c.plane.gamma.imag(number<double>(v, k)); }},
      {"grid.size", [](RunConfig& c, std::string_view v, std::string_view k) { c.grid.size = positive(v, k); }},
      {"grid.half_width",
       [](RunConfig& c, std::string_view v, std::string_view k) { c.grid.half_width = number<double>(v, k); }},
      {"converge.depth", [](RunConfig& c, std::string_view v, std::string_view k) { c.converge_depth = positive(v, k); }},
      {"harmonic.size", [](RunConfig& c, std::string_view v, std::string_view k) { c.harmonic_size = positive(v, k); }},
      {"raster.width", [](RunConfig& c, std::string_view v, std::string_view k) { c.raster.width = positive(v, k); }},
      {"raster.height", [](RunConfig& c, std::string_view v, std::string_view k) { c.raster.height = positive(v, k); }},
      {"raster.center_re",
       [](RunConfig& c, std::string_view v, std::string_view k) { c.raster.center.real(number<double>(v, k)); }},
      {"raster.center_im",
       [](RunConfig& c, std::string_view v, std::string_view k) { c.raster.center.imag(number<double>(v, k)); }},
      {"raster.half_width",
       [](RunConfig& c, std::string_view v, std::string_view k) { c.raster.half_width = number<double>(v, k); }},
      {"raster.depth", [](RunConfig& c, std::string_view v, std::string_view k) { c.raster_depth = nonnegative(v, k); }},
      {"profile.depth", [](RunConfig& c, std::string_view v, std::string_view k) { c.profile_depth = positive(v, k); }},
      {"profile.samples",
       [](RunConfig& c, std::string_view v, std::string_view k) { c.profile_samples = positive(v, k); }},
      {"jensen.samples", [](RunConfig& c, std::string_view v, std::string_view k) { c.jensen_samples = positive(v, k); }},
      {"capacity.depth", [](RunConfig& c, std::string_view v, std::string_view k) { c.capacity_depth = nonnegative(v, k); }},
      {"dimension.depths",
       [](RunConfig& c, std::string_view v, std::string_view k) {
         c.dimension_depths.clear();
         for (auto part : split(v, ',')) c.dimension_depths.push_back(nonnegative(part, k));
       }},
      {"gauge.h_power", [](RunConfig& c, std::string_view v, std::string_view k) { c.gauge_h_power = number<double>(v, k); }},
      {"gauge.h_log_power",
       [](RunConfig& c, std::string_view v, std::string_view k) { c.gauge_h_log_power = number<double>(v, k); }},
      {"out", [](RunConfig& c, std::string_view v, std::string_view) { c.out = std::string(v); }},
  };
  return table;
}

template <class Seq, class F>
std::string join(const Seq& seq, F f) {
  std::string s;
  for (const auto& x : seq) s += (s.empty() ? "" : ",") + f(x);
  return s;
}

}  // namespace

RunConfig parse_config(std::string_view text) {
  RunConfig c;
  std::set<std::string, std::less<>> seen;
  int line_no = 0;
  for (auto line : split(text, '\n')) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = trim(line.substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    const auto it = setters().find(key);
    if (it == setters().end()) throw ConfigError("unknown key '" + std::string(key) + "'");
    if (!seen.insert(std::string(key)).second) throw ConfigError("duplicate key '" + std::string(key) + "'");
    it->second(c, value, key);
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  return parse_config(text);
}

std::string canonical_config(const RunConfig& c) {
  std::ostringstream os;
  const auto num = [](double x) { return decimal(x); };
  os << "schedule.r=" << join(c.r, [](const RadiusFactor& r) { return r.str(); }) << '\n'
     << "schedule.m=" << join(c.m, [](const Multiplicity& m) { return m.str(); }) << '\n'
     << "schedule.depth=" << c.depth << '\n'
     << "schedule.delta_offset="
     << join(c.delta_log_offset, [&](const auto& kv) { return std::to_string(kv.first) + ":" + num(kv.second); })
     << '\n'
     << "schedule.verify=" << (c.verify ? "true" : "false") << '\n'
     << "anchors.seed=" << c.seed << '\n'
     << "precision.max_bits=" << c.max_bits << '\n'
     << "plane.z0_re=" << num(c.plane.z0.real()) << '\n'
     << "plane.z0_im=" << num(c.plane.z0.imag()) << '\n'
     << "plane.gamma_re=" << num(c.plane.gamma.real()) << '\n'
     << "plane.gamma_im=" << num(c.plane.gamma.imag()) << '\n'
     << "grid.size=" << c.grid.size << '\n'
     << "grid.half_width=" << num(c.grid.half_width) << '\n'
     << "converge.depth=" << c.converge_depth << '\n'
     << "harmonic.size=" << c.harmonic_size << '\n'
     << "raster.width=" << c.raster.width << '\n'
     << "raster.height=" << c.raster.height << '\n'
     << "raster.center_re=" << num(c.raster.center.real()) << '\n'
     << "raster.center_im=" << num(c.raster.center.imag()) << '\n'
     << "raster.half_width=" << num(c.raster.half_width) << '\n'
     << "raster.depth=" << c.raster_depth << '\n'
     << "profile.depth=" << c.profile_depth << '\n'
     << "profile.samples=" << c.profile_samples << '\n'
     << "jensen.samples=" << c.jensen_samples << '\n'
     << "capacity.depth=" << c.capacity_depth << '\n'
     << "dimension.depths=" << join(c.dimension_depths, [](int d) { return std::to_string(d); }) << '\n'
     << "gauge.h_power=" << num(c.gauge_h_power) << '\n'
     << "gauge.h_log_power=" << num(c.gauge_h_log_power) << '\n';
  return os.str();
}

std::string config_hash(const RunConfig& c) { return hex64(fnv1a(canonical_config(c))); }

ParameterSchedule make_schedule(const RunConfig& c) {
  ScheduleOptions opt;
  opt.delta_log_offset = c.delta_log_offset;
  opt.verify = c.verify;
  return build_schedule(c.r, c.m, c.depth, opt);
}

TowerModel make_tower(const RunConfig& c) {
  return TowerModel(make_schedule(c), AnchorSequence(c.seed), c.depth, c.max_bits);
}

}  // namespace wermer
