#include "sbs/avoidance.hpp"

#include <algorithm>
#include <cmath>

#include "sbs/errors.hpp"
#include "sbs/units.hpp"

namespace sbs {

void WellClearParams::validate() const {
  if (!(horizontal_threshold > 0.0 && vertical_threshold > 0.0 && time_threshold > 0.0 &&
        lookahead > 0.0))
    throw InputError("well-clear thresholds must be positive");
}

void PilotResponseParams::validate() const {
  if (!(response_delay >= 0.0)) throw InputError("response delay must be >= 0");
  for (double p : {p_horizontal, p_comply})
    if (!(p >= 0.0 && p <= 1.0)) throw InputError("pilot probabilities must lie in [0, 1]");
  if (!(turn_magnitude > 0.0 && vertical_rate_magnitude > 0.0))
    throw InputError("maneuver magnitudes must be positive");
}

std::string_view to_string(PilotPhase phase) {
  switch (phase) {
    case PilotPhase::searching: return "searching";
    case PilotPhase::acquired_waiting: return "acquired-waiting";
    case PilotPhase::maneuvering: return "maneuvering";
    case PilotPhase::resumed: return "resumed";
  }
  return "searching";
}

CpaPrediction predict_cpa(const AircraftState& own, const AircraftState& tgt,
                          double lookahead) {
  const Vec3 vo = velocity_enu(own), vt = velocity_enu(tgt);
  const double dx = tgt.east - own.east, dy = tgt.north - own.north;
  const double dz = tgt.altitude - own.altitude;
  const double vx = vt.x - vo.x, vy = vt.y - vo.y, vz = vt.z - vo.z;
  const double v2 = vx * vx + vy * vy;
  double t = 0.0;
  if (v2 > 0.0) t = std::clamp(-(dx * vx + dy * vy) / v2, 0.0, lookahead);
  CpaPrediction p;
  p.t_cpa = t;
  p.hmd = std::hypot(dx + vx * t, dy + vy * t);
  p.vmd = dz + vz * t;
  return p;
}

bool well_clear_violated(const CpaPrediction& pred, const WellClearParams& params,
                         const RelativeGeometry& current) {
  const bool predicted = std::abs(pred.hmd) < params.horizontal_threshold &&
                         std::abs(pred.vmd) < params.vertical_threshold && pred.t_cpa >= 0.0 &&
                         pred.t_cpa <= params.time_threshold;
  const bool inside_now = current.horizontal_range < params.horizontal_threshold &&
                          std::abs(current.vertical_sep) < params.vertical_threshold;
  return predicted || inside_now;
}

double choose_turn_direction(const AircraftState& own, const AircraftState& tgt,
                             double turn_magnitude, double lookahead) {
  AircraftState right = own, left = own;
  right.heading = wrap_heading(own.heading + turn_magnitude);
  left.heading = wrap_heading(own.heading - turn_magnitude);
  const double hr = predict_cpa(right, tgt, lookahead).hmd;
  const double hl = predict_cpa(left, tgt, lookahead).hmd;
  // Differences within rounding of a mirror-image geometry count as ties.
  return hl > hr + 1e-6 * std::max(1.0, hr) ? -turn_magnitude : turn_magnitude;
}

PilotDecision pilot_step(const PilotState& pilot, const AcquisitionState& acq,
                         const AircraftState& own, const AircraftState& tgt,
                         const PilotContext& ctx, Rng& rng, double t) {
  PilotDecision out{pilot, std::nullopt};
  PilotState& p = out.state;

  std::optional<bool> violated;
  auto check = [&] {
    if (!violated) {
      const auto pred = predict_cpa(own, tgt, ctx.well_clear.lookahead);
      violated = well_clear_violated(pred, ctx.well_clear, relative_geometry(own, tgt));
    }
    return *violated;
  };
  if (ctx.evaluate_alerts) p.alert_active = check();

  if (p.phase == PilotPhase::maneuvering || p.phase == PilotPhase::resumed) return out;

  if (!acq.acquired) {
    p.phase = PilotPhase::searching;
    p.t_acquired.reset();
    p.pending_command.reset();
    return out;
  }
  if (p.phase == PilotPhase::searching) {
    p.phase = PilotPhase::acquired_waiting;
    p.t_acquired = acq.t_acquired.value_or(t);
  }
  if (p.declined) return out;
  const double earliest = *p.t_acquired + ctx.response.response_delay;
  if (t + 1e-9 < earliest) return out;
  if (!check()) return out;

  if (!rng.bernoulli(ctx.response.p_comply)) {
    p.declined = true;
    return out;
  }
  ManeuverCommand cmd;
  cmd.onset_t = t;
  if (rng.bernoulli(ctx.response.p_horizontal)) {
    const double delta = choose_turn_direction(own, tgt, ctx.response.turn_magnitude,
                                               ctx.well_clear.lookahead);
    cmd.target_heading = wrap_heading(own.heading + delta);
  } else {
    // Away in altitude from the intruder's predicted position; ties climb.
    const double vmd = predict_cpa(own, tgt, ctx.well_clear.lookahead).vmd;
    const bool climb = vmd <= 0.0;
    cmd.target_vertical_rate =
        climb ? ctx.response.vertical_rate_magnitude : -ctx.response.vertical_rate_magnitude;
    cmd.level_off_altitude = climb ? ctx.response.max_altitude : ctx.response.min_altitude;
  }
  p.phase = PilotPhase::maneuvering;
  p.pending_command = cmd;
  out.command = cmd;
  return out;
}

}  // namespace sbs
