#pragma once

// Run configuration. Files are JSON; relative paths resolve against the
// directory of the config file.

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "sbs/acquisition.hpp"
#include "sbs/avoidance.hpp"
#include "sbs/dynamics.hpp"
#include "sbs/encounters.hpp"
#include "sbs/metrics.hpp"

namespace sbs {

struct SimConfig {
  double dt = 1.0;          // s, [0.1, 1.0]
  double duration = 220.0;  // s
  std::uint64_t master_seed = 1;

  std::vector<double> beta_set = {4250.0, 8500.0, 12500.0, 17000.0};
  std::vector<double> visibility_set_nmi = {2.0, 3.0, 4.0, 5.0};
  std::vector<DovMode> dov_modes = {DovMode::uniform, DovMode::weighted_scaling};
  std::vector<AirframeClass> classes = {AirframeClass::fixed_wing, AirframeClass::rotary_wing};

  std::size_t encounter_count = 10000;
  ImportanceScheme scheme;
  std::map<AirframeClass, std::filesystem::path> encounter_paths;  // empty: generate
  std::map<AirframeClass, std::filesystem::path> area_tables;      // empty: bundled table

  double acuity_arcmin = 1.0;
  FovLimits fov;
  std::vector<DovPartition> dov_partitions = DovConfig{}.partitions;
  double dwell_period = 2.0;

  bool avoidance = true;
  WellClearParams well_clear;
  PilotResponseParams pilot;
  KinematicLimits limits;
  NmacCylinder nmac;

  int bootstrap_resamples = 1000;
  int jobs = 1;
  std::filesystem::path output = "sbs-out";

  /// Throws InputError.
  void validate() const;
  /// Number of integration steps, duration / dt.
  std::size_t steps() const;
  std::filesystem::path area_table_path(AirframeClass c) const;
};

/// Bundled data directory (airframe tables, example configs).
std::filesystem::path data_dir();

SimConfig parse_config(std::string_view json_text,
                       const std::filesystem::path& base_dir = {});
SimConfig load_config(const std::filesystem::path& path);

/// Canonical JSON of every field that affects results (not jobs/output).
std::string canonical_config(const SimConfig& config);

/// FNV-1a 64 of canonical_config.
std::uint64_t config_hash(const SimConfig& config);

}  // namespace sbs
