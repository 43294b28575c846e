#pragma once

// Flat-earth point-mass kinematics and two-aircraft relative geometry.

#include <optional>

#include "sbs/silhouette.hpp"

namespace sbs {

struct AircraftState {
  double t = 0.0;              // s
  double east = 0.0;           // ft
  double north = 0.0;          // ft
  double altitude = 0.0;       // ft AGL
  double ground_speed = 0.0;   // ft/s
  double heading = 0.0;        // deg clockwise from north, [0, 360)
  double vertical_rate = 0.0;  // ft/s, positive up
  double turn_rate = 0.0;      // deg/s, positive right
  double bank = 0.0;           // deg, positive right wing down
  double pitch = 0.0;          // deg, positive nose up

  bool operator==(const AircraftState&) const = default;
};

/// Guidance targets. An absent field holds the current rate on that axis
/// (turn rate, vertical rate or speed unchanged).
struct ManeuverCommand {
  std::optional<double> target_heading;        // deg
  std::optional<double> target_vertical_rate;  // ft/s
  std::optional<double> target_speed;          // ft/s
  std::optional<double> level_off_altitude;    // ft; vertical rate zeroed on reaching it
  double onset_t = 0.0;

  bool operator==(const ManeuverCommand&) const = default;
};

struct KinematicLimits {
  double max_turn_rate = 3.0;          // deg/s
  double max_vertical_accel = 2.0;     // ft/s^2
  double max_speed_accel = 3.4;        // ft/s^2
  double min_speed_kts = 60.0;
  double max_speed_kts = 250.0;
};

/// Clamps commanded speed to the envelope and level-off altitude to >= 0.
/// `clamped` reports whether anything changed.
ManeuverCommand clamp_command(const ManeuverCommand& cmd, const KinematicLimits& limits,
                              bool* clamped = nullptr);

/// Advances one aircraft by dt seconds. Heading, vertical rate and speed slew
/// towards the command at the limit rates; the position integral over each
/// constant-control segment is evaluated in closed form (constant turn rate,
/// linearly varying speed), so the result does not depend on how dt is
/// subdivided. Bank follows the coordinated turn, pitch the flight path.
AircraftState propagate(const AircraftState& state, const ManeuverCommand* command, double dt,
                        const KinematicLimits& limits = {});

/// Relative geometry of `tgt` as seen from `own`.
struct RelativeGeometry {
  double range = 0.0;             // ft, 3-D
  double horizontal_range = 0.0;  // ft
  double vertical_sep = 0.0;      // ft, target altitude minus own altitude
  double rel_bearing = 0.0;       // deg in the ownship body frame, + right
  double rel_elevation = 0.0;     // deg in the ownship body frame, + up
  ViewAngles target_view;         // ownship direction in the target body frame
  double closure_rate = 0.0;      // ft/s, positive when range decreases
  bool coincident = false;
};

RelativeGeometry relative_geometry(const AircraftState& own, const AircraftState& tgt);

/// Velocity components (east, north, up) in ft/s.
Vec3 velocity_enu(const AircraftState& s);

/// Heading difference target - current wrapped into (-180, 180].
double heading_delta(double current, double target);
double wrap_heading(double deg);

}  // namespace sbs
