#include <cmath>

#include "doctest.h"
#include "sbs/dynamics.hpp"
#include "sbs/units.hpp"

using namespace sbs;

namespace {

AircraftState at(double east, double north, double alt, double kts, double hdg) {
  AircraftState s;
  s.east = east;
  s.north = north;
  s.altitude = alt;
  s.ground_speed = units::knots_to_fps(kts);
  s.heading = hdg;
  return s;
}

AircraftState run(AircraftState s, const ManeuverCommand* cmd, double dt, double total) {
  const int n = static_cast<int>(std::lround(total / dt));
  for (int k = 0; k < n; ++k) s = propagate(s, cmd, dt);
  return s;
}

}  // namespace

TEST_CASE("straight flight displacement") {
  const auto s = propagate(at(0, 0, 1000, 100, 0), nullptr, 10);
  CHECK(s.north == doctest::Approx(1687.81).epsilon(0.01 / 1687.81));
  CHECK(std::abs(s.east) < 1e-9);
  CHECK(s.t == 10.0);
  CHECK(s.altitude == 1000.0);
}

TEST_CASE("standard-rate quarter turn") {
  auto s = at(0, 0, 1000, 100, 0);
  s.turn_rate = 3.0;
  s = propagate(s, nullptr, 30);
  CHECK(s.heading == doctest::Approx(90.0).epsilon(1e-12));
  // Arc radius v / omega; after a quarter turn the aircraft is at (r, r).
  const double r = units::knots_to_fps(100) / (3.0 * units::kDegToRad);
  CHECK(s.east == doctest::Approx(r).epsilon(1e-9));
  CHECK(s.north == doctest::Approx(r).epsilon(1e-9));
  CHECK(s.bank > 0.0);
  const double g = units::kGravityFtPerSec2;
  CHECK(std::tan(s.bank * units::kDegToRad) ==
        doctest::Approx(s.ground_speed * 3.0 * units::kDegToRad / g).epsilon(1e-9));
}

TEST_CASE("held climb") {
  auto s = at(0, 0, 1000, 100, 0);
  s.vertical_rate = 500.0 / 60.0;
  s = propagate(s, nullptr, 60);
  CHECK(s.altitude == doctest::Approx(1500.0).epsilon(1e-12));
  CHECK(s.pitch == doctest::Approx(std::asin(s.vertical_rate / s.ground_speed) *
                                   units::kRadToDeg).epsilon(1e-12));
}

TEST_CASE("heading command wraps through north") {
  ManeuverCommand cmd;
  cmd.target_heading = 10.0;
  auto s = at(0, 0, 1000, 100, 350);
  s = propagate(s, &cmd, 1);
  CHECK(s.turn_rate > 0.0);
  s = run(s, &cmd, 1, 10);
  CHECK(s.heading == doctest::Approx(10.0).epsilon(1e-9));
  CHECK(heading_delta(350, 10) == 20.0);
  CHECK(heading_delta(10, 350) == -20.0);
  CHECK(heading_delta(0, 180) == 180.0);
  CHECK(wrap_heading(-10) == 350.0);
  CHECK(wrap_heading(360) == 0.0);
}

TEST_CASE("half steps agree with full steps") {
  ManeuverCommand cmd;
  cmd.target_heading = 200.0;
  cmd.target_vertical_rate = -8.0;
  cmd.target_speed = units::knots_to_fps(140);
  const auto s0 = at(0, 0, 3000, 110, 20);
  const auto a = run(s0, &cmd, 1.0, 220);
  const auto b = run(s0, &cmd, 0.5, 220);
  CHECK(std::hypot(a.east - b.east, a.north - b.north) < 0.1);
  CHECK(std::abs(a.altitude - b.altitude) < 0.1);
}

TEST_CASE("commands are clamped to the envelope") {
  ManeuverCommand cmd;
  cmd.target_speed = units::knots_to_fps(300);
  cmd.level_off_altitude = -50;
  bool clamped = false;
  const auto c = clamp_command(cmd, {}, &clamped);
  CHECK(clamped);
  CHECK(*c.target_speed == doctest::Approx(units::knots_to_fps(250)));
  CHECK(*c.level_off_altitude == 0.0);
  ManeuverCommand ok;
  ok.target_heading = 45;
  clamp_command(ok, {}, &clamped);
  CHECK_FALSE(clamped);
}

TEST_CASE("head-on relative geometry") {
  const double sep = units::nmi_to_ft(2);
  const auto own = at(0, 0, 1000, 100, 0), tgt = at(0, sep, 1000, 100, 180);
  const auto g = relative_geometry(own, tgt);
  CHECK(g.range == doctest::Approx(sep));
  CHECK(g.rel_bearing == doctest::Approx(0.0));
  CHECK(g.rel_elevation == doctest::Approx(0.0));
  CHECK(g.closure_rate == doctest::Approx(337.56).epsilon(1e-4));
  CHECK(g.target_view.azimuth == doctest::Approx(0.0));
  CHECK(g.target_view.elevation == doctest::Approx(0.0));
}

TEST_CASE("elevation and side views") {
  const auto own = at(0, 0, 1000, 100, 0);
  CHECK(relative_geometry(own, at(0, 1000, 2000, 100, 0)).rel_elevation ==
        doctest::Approx(45.0));
  // Target heading north, ownship due east of it: ownship sees its left side.
  const auto g = relative_geometry(at(1000, 0, 1000, 100, 0), at(0, 0, 1000, 100, 0));
  CHECK(g.rel_bearing == doctest::Approx(-90.0));
  CHECK(std::abs(g.target_view.azimuth) == doctest::Approx(90.0));
}

TEST_CASE("crossing closure matches finite differences") {
  const double d = 10000, kts = 120;
  const auto own = at(0, -d, 1000, kts, 0), tgt = at(-d, 0, 1000, kts, 90);
  const auto g = relative_geometry(own, tgt);
  const double h = 0.01;
  const double r1 = relative_geometry(propagate(own, nullptr, h), propagate(tgt, nullptr, h)).range;
  CHECK(g.closure_rate == doctest::Approx((g.range - r1) / h).epsilon(1e-4));
  CHECK(g.closure_rate == doctest::Approx(units::knots_to_fps(kts) * std::sqrt(2.0)).epsilon(1e-9));
  CHECK(relative_geometry(tgt, own).closure_rate == doctest::Approx(g.closure_rate));
}

TEST_CASE("straight flight range follows the linear-motion closed form") {
  const auto own = at(0, 0, 1000, 90, 30), tgt = at(8000, 12000, 1400, 150, 250);
  const auto vo = velocity_enu(own), vt = velocity_enu(tgt);
  for (double t : {1e-3, 17.0, 60.0, 143.0}) {
    const auto g = relative_geometry(propagate(own, nullptr, t), propagate(tgt, nullptr, t));
    const double dx = 8000 + (vt.x - vo.x) * t, dy = 12000 + (vt.y - vo.y) * t, dz = 400;
    CHECK(g.range == doctest::Approx(std::sqrt(dx * dx + dy * dy + dz * dz)).epsilon(1e-12));
  }
}

TEST_CASE("coincident positions are flagged") {
  const auto g = relative_geometry(at(5, 5, 500, 100, 0), at(5, 5, 500, 100, 90));
  CHECK(g.coincident);
  CHECK(g.range == 0.0);
  CHECK(g.rel_bearing == 0.0);
}
