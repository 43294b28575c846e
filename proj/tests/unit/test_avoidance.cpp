#include <cmath>
#include <random>

#include "doctest.h"
#include "sbs/avoidance.hpp"
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

RelativeGeometry far_away() {
  RelativeGeometry g;
  g.horizontal_range = 1e6;
  g.vertical_sep = 1e4;
  return g;
}

AcquisitionState acquired_at(double t) {
  AcquisitionState a;
  a.acquired = true;
  a.tracking = true;
  a.t_acquired = t;
  return a;
}

}  // namespace

TEST_CASE("head-on CPA prediction") {
  const double sep = units::nmi_to_ft(2);
  const auto p = predict_cpa(at(0, 0, 1000, 100, 0), at(0, sep, 1000, 100, 180));
  CHECK(p.t_cpa == doctest::Approx(sep / (2 * units::knots_to_fps(100))).epsilon(1e-12));
  CHECK(p.t_cpa == doctest::Approx(36.0).epsilon(1e-3));
  CHECK(p.hmd == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(p.vmd == 0.0);
}

TEST_CASE("parallel tracks keep their offset") {
  const auto p = predict_cpa(at(0, 0, 1000, 120, 0), at(700, 500, 1200, 120, 0));
  CHECK(p.t_cpa == 0.0);
  CHECK(p.hmd == doctest::Approx(std::hypot(700.0, 500.0)));
  CHECK(p.vmd == 200.0);
}

TEST_CASE("perpendicular crossing against a brute-force sweep") {
  const double d = 3000;
  const auto own = at(0, -d, 1000, 120, 0), tgt = at(-d, 0, 1000, 120, 90);
  const auto p = predict_cpa(own, tgt);
  const auto vo = velocity_enu(own), vt = velocity_enu(tgt);
  double best = INFINITY, best_t = 0;
  for (int k = 0; k <= 6000; ++k) {
    const double t = 0.01 * k;
    const double h = std::hypot(-d + (vt.x - vo.x) * t, d + (vt.y - vo.y) * t);
    if (h < best) best = h, best_t = t;
  }
  CHECK(p.hmd == doctest::Approx(0.0).epsilon(1e-6));
  CHECK(best < 2.0);
  CHECK(p.t_cpa == doctest::Approx(best_t).epsilon(1e-3));
  CHECK(p.t_cpa == doctest::Approx(d / units::knots_to_fps(120)).epsilon(1e-12));
}

TEST_CASE("CPA time is clamped to the lookahead") {
  const auto p = predict_cpa(at(0, 0, 1000, 100, 0), at(0, 100000, 1000, 100, 180), 60.0);
  CHECK(p.t_cpa == 60.0);
  const auto q = predict_cpa(at(0, 0, 1000, 100, 0), at(0, -5000, 1000, 100, 180), 60.0);
  CHECK(q.t_cpa == 0.0);
}

TEST_CASE("well-clear examples") {
  const WellClearParams w;
  CHECK_FALSE(well_clear_violated({36, 0, 0}, w, far_away()));
  CHECK(well_clear_violated({20, 3000, 100}, w, far_away()));
  CHECK_FALSE(well_clear_violated({10, 5000, 0}, w, far_away()));
  CHECK_FALSE(well_clear_violated({10, 0, 500}, w, far_away()));
  RelativeGeometry close;
  close.horizontal_range = 3000;
  close.vertical_sep = -200;
  CHECK(well_clear_violated({50, 9000, 900}, w, close));
}

TEST_CASE("commands wait out the response delay") {
  PilotContext ctx;
  const auto own = at(0, 0, 1000, 100, 0), tgt0 = at(0, 9000, 1000, 100, 180);
  Rng rng(1);
  PilotState p;
  std::optional<double> issued;
  for (int t = 50; t <= 80 && !issued; ++t) {
    // Geometry held in conflict at every step.
    auto out = pilot_step(p, acquired_at(50), own, tgt0, ctx, rng, t);
    if (t < 60) CHECK_FALSE(out.command);
    CHECK(out.state.phase != PilotPhase::searching);
    if (out.command) {
      issued = out.command->onset_t;
      CHECK(out.state.phase == PilotPhase::maneuvering);
    }
    p = out.state;
  }
  REQUIRE(issued);
  CHECK(*issued == 60.0);
}

TEST_CASE("no conflict means no command") {
  PilotContext ctx;
  const auto own = at(0, 0, 1000, 100, 0), tgt = at(20000, 0, 3000, 100, 0);
  Rng rng(2);
  PilotState p;
  for (int t = 0; t <= 220; ++t) {
    const auto out = pilot_step(p, acquired_at(0), own, tgt, ctx, rng, t);
    CHECK_FALSE(out.command);
    p = out.state;
  }
  CHECK(p.phase == PilotPhase::acquired_waiting);
}

TEST_CASE("declining pilots never maneuver") {
  PilotContext ctx;
  ctx.response.p_comply = 0.0;
  const auto own = at(0, 0, 1000, 100, 0), tgt = at(0, 5000, 1000, 100, 180);
  Rng rng(3);
  PilotState p;
  for (int t = 0; t <= 40; ++t) {
    const auto out = pilot_step(p, acquired_at(0), own, tgt, ctx, rng, t);
    CHECK_FALSE(out.command);
    p = out.state;
  }
  CHECK(p.declined);
}

TEST_CASE("searching pilots hold no command and lose acquisition on FOV exit") {
  PilotContext ctx;
  const auto own = at(0, 0, 1000, 100, 0), tgt = at(0, 9000, 1000, 100, 180);
  Rng rng(4);
  PilotState p;
  p = pilot_step(p, acquired_at(0), own, tgt, ctx, rng, 0).state;
  CHECK(p.phase == PilotPhase::acquired_waiting);
  p = pilot_step(p, AcquisitionState{}, own, tgt, ctx, rng, 1).state;
  CHECK(p.phase == PilotPhase::searching);
  CHECK_FALSE(p.pending_command);
  CHECK_FALSE(p.t_acquired);
}

TEST_CASE("vertical maneuvers move away in altitude") {
  PilotContext ctx;
  ctx.response.p_horizontal = 0.0;
  Rng rng(5);
  const auto own = at(0, 0, 1000, 100, 0);
  auto below = pilot_step({}, acquired_at(0), own, at(0, 6000, 950, 100, 180), ctx, rng, 20);
  REQUIRE(below.command);
  CHECK(*below.command->target_vertical_rate > 0.0);
  CHECK(*below.command->level_off_altitude == ctx.response.max_altitude);
  auto above = pilot_step({}, acquired_at(0), own, at(0, 6000, 1050, 100, 180), ctx, rng, 20);
  REQUIRE(above.command);
  CHECK(*above.command->target_vertical_rate < 0.0);
  CHECK(*above.command->level_off_altitude == ctx.response.min_altitude);
}

TEST_CASE("turn direction never does worse than its mirror") {
  std::mt19937_64 g(9);
  std::uniform_real_distribution<double> pos(-8000, 8000), hdg(0, 360), kts(60, 250);
  for (int i = 0; i < 2000; ++i) {
    const auto own = at(0, 0, 1000, kts(g), hdg(g));
    const auto tgt = at(pos(g), pos(g), 1000, kts(g), hdg(g));
    const double d = choose_turn_direction(own, tgt, 30, 60);
    CHECK(std::abs(d) == 30.0);
    auto chosen = own, mirror = own;
    chosen.heading = wrap_heading(own.heading + d);
    mirror.heading = wrap_heading(own.heading - d);
    const double hc = predict_cpa(chosen, tgt, 60).hmd, hm = predict_cpa(mirror, tgt, 60).hmd;
    CHECK(hc >= hm - 1e-6 * std::max(1.0, hm));
  }
  // Symmetric head-on: both turns are equally good, so turn right.
  CHECK(choose_turn_direction(at(0, 0, 1000, 100, 0), at(0, 9000, 1000, 100, 180), 30, 60) ==
        30.0);
}
