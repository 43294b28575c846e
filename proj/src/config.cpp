#include "sbs/config.hpp"

#include <cmath>
#include <fstream>
#include "json.hpp"
#include <sstream>

#include "sbs/errors.hpp"
#include "sbs/units.hpp"

#ifndef SBS_DATA_DIR
#define SBS_DATA_DIR "data"
#endif

namespace sbs {

using json = nlohmann::ordered_json;

namespace {

template <class T>
void read_into(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  if (path.is_relative() && !base.empty()) path = base / path;
  return path;
}

std::map<AirframeClass, std::filesystem::path> class_paths(const json& j,
                                                           const std::filesystem::path& base) {
  std::map<AirframeClass, std::filesystem::path> out;
  for (const auto& [k, v] : j.items()) out[parse_airframe_class(k)] = resolve(base, v.get<std::string>());
  return out;
}

void read_scheme(const json& j, ImportanceScheme& s) {
  read_into(j, "hmd_edges", s.hmd_edges);
  read_into(j, "vmd_edges", s.vmd_edges);
  read_into(j, "sampling_probs_hmd", s.sampling_probs_hmd);
  read_into(j, "sampling_probs_vmd", s.sampling_probs_vmd);
  read_into(j, "target_probs_hmd", s.target_probs_hmd);
  read_into(j, "target_probs_vmd", s.target_probs_vmd);
}

void check_keys(const json& j, std::initializer_list<const char*> allowed, const char* where) {
  for (const auto& [k, v] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || k == a;
    if (!ok) throw InputError(std::string("unknown config key '") + k + "' in " + where);
  }
}

}  // namespace

std::filesystem::path data_dir() {
  if (const char* env = std::getenv("SBS_DATA_DIR")) return env;
  return SBS_DATA_DIR;
}

std::size_t SimConfig::steps() const {
  return static_cast<std::size_t>(std::llround(duration / dt));
}

std::filesystem::path SimConfig::area_table_path(AirframeClass c) const {
  if (auto it = area_tables.find(c); it != area_tables.end()) return it->second;
  return data_dir() / "airframes" / "c172.csv";
}

void SimConfig::validate() const {
  if (!(dt >= 0.1 - 1e-12 && dt <= 1.0 + 1e-12)) throw InputError("dt must lie in [0.1, 1.0] s");
  if (!(duration > 0.0)) throw InputError("duration must be positive");
  const double n = duration / dt;
  if (std::abs(n - std::round(n)) > 1e-9 * n) throw InputError("dt must divide duration");
  if (beta_set.empty() || visibility_set_nmi.empty() || dov_modes.empty() || classes.empty())
    throw InputError("parameter sets must be non-empty");
  for (double b : beta_set)
    if (!(b >= 0.0)) throw InputError("beta values must be >= 0");
  for (double r : visibility_set_nmi)
    if (!(r > 0.0)) throw InputError("visibility values must be positive");
  if (encounter_count == 0 && encounter_paths.empty())
    throw InputError("encounter count must be positive");
  (void)scheme.resolved();
  fov.validate();
  DovConfig dov;
  dov.partitions = dov_partitions;
  dov.dwell_period = dwell_period;
  dov.validate();
  if (!(acuity_arcmin >= 0.0)) throw InputError("acuity must be >= 0");
  well_clear.validate();
  pilot.validate();
  if (!(nmac.horizontal > 0.0 && nmac.vertical > 0.0))
    throw InputError("NMAC cylinder dimensions must be positive");
  if (bootstrap_resamples < 0) throw InputError("bootstrap resamples must be >= 0");
}

SimConfig parse_config(std::string_view text, const std::filesystem::path& base) {
  SimConfig c;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw InputError(std::string("config is not valid JSON: ") + e.what());
  }
  try {
    check_keys(j,
               {"dt", "duration", "master_seed", "beta_set", "visibility_set_nmi", "dov_modes",
                "classes", "encounters", "airframe_tables", "acquisition", "avoidance", "nmac",
                "kinematics", "bootstrap_resamples", "jobs", "output"},
               "top level");
    read_into(j, "dt", c.dt);
    read_into(j, "duration", c.duration);
    read_into(j, "master_seed", c.master_seed);
    read_into(j, "beta_set", c.beta_set);
    read_into(j, "visibility_set_nmi", c.visibility_set_nmi);
    if (j.contains("dov_modes")) {
      c.dov_modes.clear();
      for (const auto& m : j["dov_modes"]) c.dov_modes.push_back(parse_dov_mode(m.get<std::string>()));
    }
    if (j.contains("classes")) {
      c.classes.clear();
      for (const auto& m : j["classes"])
        c.classes.push_back(parse_airframe_class(m.get<std::string>()));
    }
    if (j.contains("encounters")) {
      const auto& e = j["encounters"];
      check_keys(e, {"count", "scheme", "paths"}, "encounters");
      read_into(e, "count", c.encounter_count);
      if (e.contains("scheme")) read_scheme(e["scheme"], c.scheme);
      if (e.contains("paths")) c.encounter_paths = class_paths(e["paths"], base);
    }
    if (j.contains("airframe_tables")) c.area_tables = class_paths(j["airframe_tables"], base);
    if (j.contains("acquisition")) {
      const auto& a = j["acquisition"];
      check_keys(a, {"acuity_arcmin", "fov", "dov_partitions", "dwell_period"}, "acquisition");
      read_into(a, "acuity_arcmin", c.acuity_arcmin);
      if (a.contains("fov")) {
        const auto& f = a["fov"];
        read_into(f, "up", c.fov.up);
        read_into(f, "down", c.fov.down);
        read_into(f, "left", c.fov.left);
        read_into(f, "right", c.fov.right);
      }
      if (a.contains("dov_partitions")) {
        c.dov_partitions.clear();
        for (const auto& p : a["dov_partitions"])
          c.dov_partitions.push_back(
              {p.at("lower_az").get<double>(), p.at("upper_az").get<double>(),
               p.at("weight").get<double>()});
      }
      read_into(a, "dwell_period", c.dwell_period);
    }
    if (j.contains("avoidance")) {
      const auto& a = j["avoidance"];
      check_keys(a, {"enabled", "well_clear", "pilot"}, "avoidance");
      read_into(a, "enabled", c.avoidance);
      if (a.contains("well_clear")) {
        const auto& w = a["well_clear"];
        read_into(w, "horizontal_ft", c.well_clear.horizontal_threshold);
        read_into(w, "vertical_ft", c.well_clear.vertical_threshold);
        read_into(w, "time_s", c.well_clear.time_threshold);
        read_into(w, "lookahead_s", c.well_clear.lookahead);
      }
      if (a.contains("pilot")) {
        const auto& p = a["pilot"];
        read_into(p, "response_delay_s", c.pilot.response_delay);
        read_into(p, "p_horizontal", c.pilot.p_horizontal);
        read_into(p, "turn_deg", c.pilot.turn_magnitude);
        if (p.contains("vertical_rate_fpm"))
          c.pilot.vertical_rate_magnitude = units::fpm_to_fps(p["vertical_rate_fpm"].get<double>());
        read_into(p, "p_comply", c.pilot.p_comply);
      }
    }
    if (j.contains("nmac")) {
      read_into(j["nmac"], "horizontal_ft", c.nmac.horizontal);
      read_into(j["nmac"], "vertical_ft", c.nmac.vertical);
    }
    if (j.contains("kinematics")) {
      const auto& k = j["kinematics"];
      read_into(k, "max_turn_rate_dps", c.limits.max_turn_rate);
      read_into(k, "max_vertical_accel", c.limits.max_vertical_accel);
      read_into(k, "max_speed_accel", c.limits.max_speed_accel);
    }
    read_into(j, "bootstrap_resamples", c.bootstrap_resamples);
    read_into(j, "jobs", c.jobs);
    if (j.contains("output")) c.output = resolve(base, j["output"].get<std::string>());
  } catch (const json::exception& e) {
    throw InputError(std::string("bad config value: ") + e.what());
  }
  c.validate();
  return c;
}

SimConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.parent_path());
}

std::string canonical_config(const SimConfig& c) {
  json j;
  j["dt"] = c.dt;
  j["duration"] = c.duration;
  j["master_seed"] = c.master_seed;
  j["beta_set"] = c.beta_set;
  j["visibility_set_nmi"] = c.visibility_set_nmi;
  j["dov_modes"] = json::array();
  for (auto m : c.dov_modes) j["dov_modes"].push_back(std::string(to_string(m)));
  j["classes"] = json::array();
  for (auto k : c.classes) j["classes"].push_back(std::string(to_string(k)));
  const auto s = c.scheme.resolved();
  j["encounters"] = {{"count", c.encounter_count},
                     {"hmd_edges", s.hmd_edges},
                     {"vmd_edges", s.vmd_edges},
                     {"sampling_probs_hmd", s.sampling_probs_hmd},
                     {"sampling_probs_vmd", s.sampling_probs_vmd},
                     {"target_probs_hmd", s.target_probs_hmd},
                     {"target_probs_vmd", s.target_probs_vmd}};
  json paths = json::object();
  for (const auto& [k, p] : c.encounter_paths) paths[std::string(to_string(k))] = p.filename().string();
  j["encounters"]["paths"] = paths;
  json tables = json::object();
  for (auto k : c.classes) tables[std::string(to_string(k))] = c.area_table_path(k).filename().string();
  j["airframe_tables"] = tables;
  json parts = json::array();
  for (const auto& p : c.dov_partitions) parts.push_back({p.lower_az, p.upper_az, p.weight});
  j["acquisition"] = {{"acuity_arcmin", c.acuity_arcmin},
                      {"fov", {c.fov.up, c.fov.down, c.fov.left, c.fov.right}},
                      {"dov_partitions", parts},
                      {"dwell_period", c.dwell_period}};
  j["avoidance"] = {{"enabled", c.avoidance},
                    {"well_clear",
                     {c.well_clear.horizontal_threshold, c.well_clear.vertical_threshold,
                      c.well_clear.time_threshold, c.well_clear.lookahead}},
                    {"pilot",
                     {c.pilot.response_delay, c.pilot.p_horizontal, c.pilot.turn_magnitude,
                      c.pilot.vertical_rate_magnitude, c.pilot.p_comply, c.pilot.min_altitude,
                      c.pilot.max_altitude}}};
  j["nmac"] = {c.nmac.horizontal, c.nmac.vertical};
  j["kinematics"] = {c.limits.max_turn_rate, c.limits.max_vertical_accel,
                     c.limits.max_speed_accel, c.limits.min_speed_kts, c.limits.max_speed_kts};
  j["bootstrap_resamples"] = c.bootstrap_resamples;
  return j.dump();
}

std::uint64_t config_hash(const SimConfig& c) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : canonical_config(c)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace sbs
