#pragma once

// Importance-sampled pairwise encounter generation and encounter-set files.

#include <cstdint>
#include <filesystem>
#include <string_view>
#include <vector>

#include "sbs/dynamics.hpp"
#include "sbs/rng.hpp"

namespace sbs {

enum class AirframeClass { fixed_wing, rotary_wing };

std::string_view to_string(AirframeClass c);
AirframeClass parse_airframe_class(std::string_view text);

/// Nominal flight: an initial state plus timed guidance events.
struct ScriptedTrajectory {
  AircraftState initial;
  std::vector<ManeuverCommand> events;  // ascending onset_t

  bool operator==(const ScriptedTrajectory&) const = default;
};

/// Replays a scripted trajectory, applying each event at its exact onset
/// time even when it falls inside a step. An override command, once set,
/// replaces all remaining scripted events.
class ScriptedFlight {
 public:
  explicit ScriptedFlight(const ScriptedTrajectory& script, KinematicLimits limits = {});

  const AircraftState& state() const { return state_; }
  void advance(double dt);
  void override_with(const ManeuverCommand& cmd);
  bool overridden() const { return overridden_; }
  /// Replace the current state (used to resume from a cached trajectory).
  void reset_state(const AircraftState& s, std::size_t next_event,
                   const std::optional<ManeuverCommand>& active);
  std::size_t next_event() const { return next_event_; }
  const std::optional<ManeuverCommand>& active() const { return active_; }

 private:
  const ScriptedTrajectory* script_;
  KinematicLimits limits_;
  AircraftState state_;
  std::size_t next_event_ = 0;
  std::optional<ManeuverCommand> active_;
  bool overridden_ = false;
};

/// Merge a guidance event into the active command; absent fields keep the
/// previously active targets.
ManeuverCommand merge_command(const std::optional<ManeuverCommand>& active,
                              const ManeuverCommand& update);

struct ImportanceScheme {
  std::vector<double> hmd_edges = {-2000.0, -500.0, 500.0, 2000.0};
  std::vector<double> vmd_edges = {-450.0, -100.0, 100.0, 450.0};
  std::vector<double> sampling_probs_hmd;  // empty: uniform over bins
  std::vector<double> sampling_probs_vmd;
  std::vector<double> target_probs_hmd;  // empty: proportional to bin width
  std::vector<double> target_probs_vmd;

  /// Fill defaults and check invariants. Throws InputError.
  ImportanceScheme resolved() const;
};

struct EncounterBounds {
  double duration = 220.0;
  double t_cpa = 180.0;
  double min_initial_separation = 21266.40419947506;  // 3.5 nmi in ft
  double min_altitude = 200.0;
  double max_altitude = 4000.0;
  double min_speed_kts = 60.0;
  double max_speed_kts = 250.0;
};

struct EncounterSpec {
  std::uint64_t id = 0;
  AirframeClass airframe_class = AirframeClass::fixed_wing;
  ScriptedTrajectory ownship;
  ScriptedTrajectory intruder;
  double duration = 220.0;
  double t_cpa = 180.0;
  int hmd_bin = 0;
  int vmd_bin = 0;
  double sampled_hmd = 0.0;  // ft, + intruder passes to ownship's right
  double sampled_vmd = 0.0;  // ft, + intruder above
  double weight = 1.0;
  std::uint64_t seed = 0;

  bool operator==(const EncounterSpec&) const = default;
};

/// Per-class sampling profile.
struct ClassProfile {
  double min_speed_kts;
  double max_speed_kts;
  double p_heading_event;
  double p_vertical_event;
};

ClassProfile class_profile(AirframeClass c);

/// Samples one encounter. Throws RuntimeError when no feasible geometry is
/// found in 1000 attempts.
EncounterSpec sample_encounter(const ImportanceScheme& scheme, AirframeClass airframe_class,
                               Rng& rng, const EncounterBounds& bounds = {});

/// Deterministic set of `count` encounters; encounter i draws from the
/// stream keyed by (master_seed, class, i) regardless of `jobs`.
std::vector<EncounterSpec> generate_set(const ImportanceScheme& scheme,
                                        AirframeClass airframe_class, std::size_t count,
                                        std::uint64_t master_seed, int jobs = 1,
                                        const EncounterBounds& bounds = {});

/// Importance weight of a (hmd_bin, vmd_bin) pair.
double importance_weight(const ImportanceScheme& resolved, int hmd_bin, int vmd_bin);

struct EncounterSetHeader {
  int version = 1;
  ImportanceScheme scheme;
  std::uint64_t master_seed = 0;
  AirframeClass airframe_class = AirframeClass::fixed_wing;
};

inline constexpr int kEncounterFormatVersion = 1;

void write_set(const std::filesystem::path& path, const EncounterSetHeader& header,
               const std::vector<EncounterSpec>& specs);

struct EncounterSet {
  EncounterSetHeader header;
  std::vector<EncounterSpec> specs;
};

EncounterSet read_set(const std::filesystem::path& path);

}  // namespace sbs
