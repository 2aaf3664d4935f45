#pragma once

// Flat key=value run configuration. Lines are `section.key = value`; '#'
// starts a comment. Unknown keys, duplicates and bad values raise ConfigError.

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "wermer/analysis.hpp"

namespace wermer {

struct RunConfig {
  std::vector<RadiusFactor> r{RadiusFactor::rational(1, 10)};
  std::vector<Multiplicity> m{1, 4};
  int depth = 2;
  std::map<int, double> delta_log_offset;
  bool verify = true;
  std::uint64_t seed = 0;
  int max_bits = 1024;
  SlicePlane plane;
  SliceGrid grid;
  int converge_depth = 3;
  int harmonic_size = 50;
  RasterSpec raster;
  int raster_depth = 2;
  int profile_depth = 1;
  int profile_samples = 20;
  int jensen_samples = 20;
  int capacity_depth = 12;
  std::vector<int> dimension_depths{0, 1, 2};
  double gauge_h_power = 2;
  double gauge_h_log_power = 0;
  std::string out = "wermer_out";
};

RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::string& path);

/// Every key in a fixed order, `out` excluded so that the hash only depends
/// on what is computed.
std::string canonical_config(const RunConfig& c);
std::string config_hash(const RunConfig& c);

ParameterSchedule make_schedule(const RunConfig& c);
TowerModel make_tower(const RunConfig& c);

}  // namespace wermer
