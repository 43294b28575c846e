#include "sbs/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>

#include "sbs/errors.hpp"
#include "sbs/units.hpp"

namespace sbs {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kSnapTol = 1e-12;

double sign(double v) { return v < 0.0 ? -1.0 : 1.0; }

// Smallest tau > 0 with h + v tau + a tau^2 / 2 == level, or +inf.
double time_to_level(double h, double v, double a, double level) {
  const double c = h - level;
  if (c == 0.0) return kInf;
  if (a == 0.0) {
    if (v == 0.0) return kInf;
    const double t = -c / v;
    return t > 0.0 ? t : kInf;
  }
  const double disc = v * v - 2.0 * a * c;
  if (disc < 0.0) return kInf;
  const double sq = std::sqrt(disc);
  // Numerically stable roots of (a/2) t^2 + v t + c.
  const double q = -0.5 * (v + (v >= 0.0 ? sq : -sq));
  double best = kInf;
  const double r1 = q / (0.5 * a);
  const double r2 = q != 0.0 ? c / q : kInf;
  for (double r : {r1, r2})
    if (r > 0.0 && r < best) best = r;
  return best;
}

// Horizontal displacement (east, north) over T seconds with heading psi0,
// turn rate w (rad/s), initial speed v0 and constant acceleration a.
std::pair<double, double> arc_displacement(double psi0, double w, double v0, double a,
                                           double T) {
  using C = std::complex<double>;
  const C i(0.0, 1.0);
  C I0, I1;
  if (std::abs(w * T) < 1e-4) {
    const double T2 = T * T, T3 = T2 * T, T4 = T3 * T, T5 = T4 * T;
    I0 = C(T - w * w * T3 / 6.0, w * T2 / 2.0 - w * w * w * T4 / 24.0);
    I1 = C(T2 / 2.0 - w * w * T4 / 8.0, w * T3 / 3.0 - w * w * w * T5 / 30.0);
  } else {
    const C e = std::exp(i * (w * T));
    I0 = (e - 1.0) / (i * w);
    I1 = T * e / (i * w) + (e - 1.0) / (w * w);
  }
  const C dz = std::exp(i * psi0) * (v0 * I0 + a * I1);
  // Real part is north, imaginary part east.
  return {dz.imag(), dz.real()};
}

void to_body(double n, double e, double d, double heading_deg, double pitch_deg,
             double bank_deg, double& xb, double& yb, double& zb) {
  const double ps = heading_deg * units::kDegToRad;
  const double th = pitch_deg * units::kDegToRad;
  const double ph = bank_deg * units::kDegToRad;
  const double cps = std::cos(ps), sps = std::sin(ps);
  const double cth = std::cos(th), sth = std::sin(th);
  const double cph = std::cos(ph), sph = std::sin(ph);
  const double x1 = cps * n + sps * e;
  const double y1 = -sps * n + cps * e;
  const double z1 = d;
  const double x2 = cth * x1 - sth * z1;
  const double z2 = sth * x1 + cth * z1;
  xb = x2;
  yb = cph * y1 + sph * z2;
  zb = -sph * y1 + cph * z2;
}

}  // namespace

double wrap_heading(double deg) {
  double h = std::fmod(deg, 360.0);
  if (h < 0.0) h += 360.0;
  if (h >= 360.0) h -= 360.0;
  return h;
}

double heading_delta(double current, double target) {
  double d = std::remainder(target - current, 360.0);
  if (d <= -180.0) d += 360.0;
  return d;
}

ManeuverCommand clamp_command(const ManeuverCommand& cmd, const KinematicLimits& limits,
                              bool* clamped) {
  ManeuverCommand out = cmd;
  bool changed = false;
  if (out.target_speed) {
    const double lo = units::knots_to_fps(limits.min_speed_kts);
    const double hi = units::knots_to_fps(limits.max_speed_kts);
    const double v = std::clamp(*out.target_speed, lo, hi);
    changed |= v != *out.target_speed;
    out.target_speed = v;
  }
  if (out.level_off_altitude && *out.level_off_altitude < 0.0) {
    out.level_off_altitude = 0.0;
    changed = true;
  }
  if (out.target_heading) out.target_heading = wrap_heading(*out.target_heading);
  if (clamped) *clamped = changed;
  return out;
}

AircraftState propagate(const AircraftState& state, const ManeuverCommand* command, double dt,
                        const KinematicLimits& limits) {
  if (!(dt > 0.0)) throw InputError("propagate: dt must be positive");
  std::optional<ManeuverCommand> cmd;
  if (command) cmd = clamp_command(*command, limits);

  AircraftState s = state;
  double remaining = dt;
  double omega = s.turn_rate;
  for (int iter = 0; iter < 16 && remaining > 0.0; ++iter) {
    // Heading channel.
    double t_turn = kInf;
    omega = s.turn_rate;
    if (cmd && cmd->target_heading) {
      const double delta = heading_delta(s.heading, *cmd->target_heading);
      if (std::abs(delta) <= kSnapTol) {
        omega = 0.0;
        s.heading = *cmd->target_heading;
      } else {
        omega = sign(delta) * limits.max_turn_rate;
        t_turn = std::abs(delta) / limits.max_turn_rate;
      }
    }
    // Vertical channel.
    double a_v = 0.0, t_v = kInf;
    if (cmd && cmd->target_vertical_rate) {
      const double dv = *cmd->target_vertical_rate - s.vertical_rate;
      if (std::abs(dv) > kSnapTol) {
        a_v = sign(dv) * limits.max_vertical_accel;
        t_v = std::abs(dv) / limits.max_vertical_accel;
      } else {
        s.vertical_rate = *cmd->target_vertical_rate;
      }
    }
    // Altitude limits: a commanded level-off altitude in the direction of
    // travel, and the ground.
    double t_level = kInf, level = 0.0;
    auto consider_level = [&](double lvl, bool floor_only) {
      const bool ceiling = !floor_only && (lvl > s.altitude ||
                                           (lvl == s.altitude && (s.vertical_rate > 0.0 || a_v > 0.0)));
      const bool at = std::abs(s.altitude - lvl) <= 1e-9;
      if (at && ((ceiling && (s.vertical_rate > 0.0 || a_v > 0.0)) ||
                 (!ceiling && (s.vertical_rate < 0.0 || a_v < 0.0)))) {
        s.altitude = lvl;
        s.vertical_rate = 0.0;
        a_v = 0.0;
        t_v = kInf;
        return;
      }
      const double t = time_to_level(s.altitude, s.vertical_rate, a_v, lvl);
      if (t < t_level) {
        t_level = t;
        level = lvl;
      }
    };
    if (cmd && cmd->level_off_altitude) consider_level(*cmd->level_off_altitude, false);
    consider_level(0.0, true);
    // Speed channel.
    double a_s = 0.0, t_s = kInf;
    if (cmd && cmd->target_speed) {
      const double dv = *cmd->target_speed - s.ground_speed;
      if (std::abs(dv) > kSnapTol) {
        a_s = sign(dv) * limits.max_speed_accel;
        t_s = std::abs(dv) / limits.max_speed_accel;
      } else {
        s.ground_speed = *cmd->target_speed;
      }
    }

    const double seg = std::min({remaining, t_turn, t_v, t_level, t_s});
    const auto [de, dn] = arc_displacement(s.heading * units::kDegToRad,
                                           omega * units::kDegToRad, s.ground_speed, a_s, seg);
    s.east += de;
    s.north += dn;
    s.altitude += s.vertical_rate * seg + 0.5 * a_v * seg * seg;
    s.vertical_rate += a_v * seg;
    s.ground_speed += a_s * seg;
    s.heading = wrap_heading(s.heading + omega * seg);
    s.turn_rate = omega;

    if (seg == t_turn) {
      s.heading = *cmd->target_heading;
      s.turn_rate = 0.0;
      omega = 0.0;
    }
    if (seg == t_v) s.vertical_rate = *cmd->target_vertical_rate;
    if (seg == t_s) s.ground_speed = *cmd->target_speed;
    if (seg == t_level) {
      s.altitude = level;
      s.vertical_rate = 0.0;
    }
    remaining -= seg;
  }

  s.t = state.t + dt;
  s.altitude = std::max(s.altitude, 0.0);
  const double w = s.turn_rate * units::kDegToRad;
  s.bank = std::atan(s.ground_speed * w / units::kGravityFtPerSec2) * units::kRadToDeg;
  s.pitch = std::asin(std::clamp(s.vertical_rate / s.ground_speed, -1.0, 1.0)) *
            units::kRadToDeg;
  return s;
}

Vec3 velocity_enu(const AircraftState& s) {
  const double psi = s.heading * units::kDegToRad;
  return {s.ground_speed * std::sin(psi), s.ground_speed * std::cos(psi), s.vertical_rate};
}

RelativeGeometry relative_geometry(const AircraftState& own, const AircraftState& tgt) {
  RelativeGeometry g;
  const double de = tgt.east - own.east;
  const double dn = tgt.north - own.north;
  const double du = tgt.altitude - own.altitude;
  g.horizontal_range = std::hypot(de, dn);
  g.range = std::sqrt(de * de + dn * dn + du * du);
  g.vertical_sep = du;
  if (g.range == 0.0) {
    g.coincident = true;
    return g;
  }
  double xb, yb, zb;
  to_body(dn, de, -du, own.heading, own.pitch, own.bank, xb, yb, zb);
  g.rel_bearing = std::atan2(yb, xb) * units::kRadToDeg;
  g.rel_elevation = std::atan2(-zb, std::hypot(xb, yb)) * units::kRadToDeg;
  to_body(-dn, -de, du, tgt.heading, tgt.pitch, tgt.bank, xb, yb, zb);
  g.target_view.azimuth = std::atan2(yb, xb) * units::kRadToDeg;
  g.target_view.elevation = std::atan2(-zb, std::hypot(xb, yb)) * units::kRadToDeg;
  const Vec3 vo = velocity_enu(own), vt = velocity_enu(tgt);
  const double rate = (de * (vt.x - vo.x) + dn * (vt.y - vo.y) + du * (vt.z - vo.z)) / g.range;
  g.closure_rate = -rate;
  return g;
}

}  // namespace sbs
