#pragma once

// Well-clear conflict detection and the delayed, stochastic pilot response.

#include <optional>
#include <string_view>

#include "sbs/acquisition.hpp"
#include "sbs/dynamics.hpp"
#include "sbs/rng.hpp"

namespace sbs {

struct WellClearParams {
  double horizontal_threshold = 4000.0;  // ft
  double vertical_threshold = 450.0;     // ft
  double time_threshold = 35.0;          // s
  double lookahead = 60.0;               // s

  void validate() const;
};

struct PilotResponseParams {
  double response_delay = 10.0;           // s after acquisition
  double p_horizontal = 0.75;             // turn rather than vertical maneuver
  double turn_magnitude = 30.0;           // deg
  double vertical_rate_magnitude = 500.0 / 60.0;  // ft/s
  double p_comply = 1.0;
  double min_altitude = 200.0;            // vertical maneuvers level off here
  double max_altitude = 4000.0;

  void validate() const;
};

struct CpaPrediction {
  double t_cpa = 0.0;  // s from now
  double hmd = 0.0;    // ft, horizontal separation at t_cpa
  double vmd = 0.0;    // ft, target minus own altitude at t_cpa
};

/// Closed-form horizontal CPA of straight constant-velocity extrapolations;
/// t_cpa is clamped to [0, lookahead].
CpaPrediction predict_cpa(const AircraftState& own, const AircraftState& tgt,
                          double lookahead = 60.0);

/// Predicted loss of well clear within the time threshold, or current
/// separation already inside both distance thresholds.
bool well_clear_violated(const CpaPrediction& pred, const WellClearParams& params,
                         const RelativeGeometry& current);

enum class PilotPhase { searching, acquired_waiting, maneuvering, resumed };

std::string_view to_string(PilotPhase phase);

struct PilotState {
  PilotPhase phase = PilotPhase::searching;
  bool alert_active = false;
  bool declined = false;  // chose not to comply; no further commands
  std::optional<double> t_acquired;
  std::optional<ManeuverCommand> pending_command;
};

struct PilotContext {
  WellClearParams well_clear;
  PilotResponseParams response;
  bool evaluate_alerts = false;  // maintain alert_active every step
};

struct PilotDecision {
  PilotState state;
  std::optional<ManeuverCommand> command;  // newly issued this step
};

/// One decision step at time t for the pilot flying `own`.
PilotDecision pilot_step(const PilotState& pilot, const AcquisitionState& acq,
                         const AircraftState& own, const AircraftState& tgt,
                         const PilotContext& ctx, Rng& rng, double t);

/// Heading change (+right / -left) that maximizes predicted |hmd|; ties
/// resolve to the right.
double choose_turn_direction(const AircraftState& own, const AircraftState& tgt,
                             double turn_magnitude, double lookahead);

}  // namespace sbs
