#include <cmath>
#include <numbers>

#include "doctest.h"
#include "sbs/acquisition.hpp"
#include "sbs/errors.hpp"
#include "sbs/units.hpp"

using namespace sbs;

namespace {

long double rate_ld(long double beta, long double a, long double r, long double vis) {
  return beta * a / (r * r) * std::exp(-2.996L * r / vis);
}

}  // namespace

TEST_CASE("acquisition rate examples") {
  const double nmi = units::nmi_to_ft(1.0);
  const double lam = acquisition_rate(17000, 110, nmi, 18228.4);
  CHECK(lam == doctest::Approx(static_cast<double>(rate_ld(17000, 110, nmi, 18228.4))).epsilon(1e-13));
  CHECK(lam == doctest::Approx(0.018657).epsilon(1e-4));
  CHECK(acquisition_rate(17000, 0, nmi, 18228.4) == 0.0);
  CHECK(acquisition_rate(1, 1, 1, 1e300) == 1.0);
  CHECK_THROWS_AS(acquisition_rate(1, 1, 0, 1), InputError);
  CHECK_THROWS_AS(acquisition_rate(1, 1, -5, 1), InputError);
}

TEST_CASE("rate is strictly monotone in range and visibility") {
  double prev = INFINITY;
  for (double r = 500; r < 1e5; r *= 1.1) {
    const double l = acquisition_rate(8500, 143, r, 24000);
    CHECK(l < prev);
    prev = l;
  }
  prev = 0.0;
  for (double vis = 5000; vis < 1e6; vis *= 1.1) {
    const double l = acquisition_rate(8500, 143, 9000, vis);
    CHECK(l > prev);
    prev = l;
  }
}

TEST_CASE("angular size and the acuity threshold range") {
  const double nmi = units::nmi_to_ft(1.0);
  const long double rad = std::sqrt(430.0L / std::numbers::pi_v<long double>);
  const double oracle = static_cast<double>(2.0L * std::atan(rad / nmi) * 60.0L * 180.0L /
                                            std::numbers::pi_v<long double>);
  CHECK(angular_size_arcmin(430, nmi) == doctest::Approx(oracle).epsilon(1e-13));
  CHECK(angular_size_arcmin(430, nmi) == doctest::Approx(13.24).epsilon(1e-3));
  CHECK(angular_size_arcmin(0, nmi) == 0.0);
  // Range at which a 110 ft^2 target subtends one arc minute.
  const double r1 = std::sqrt(110.0 / std::numbers::pi) / std::tan(0.5 / 60.0 * std::numbers::pi / 180.0);
  CHECK(r1 == doctest::Approx(40680).epsilon(1e-3));
  CHECK(angular_size_arcmin(110, r1) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("field of view gate") {
  const FovLimits f;
  CHECK(in_fov(f, 0, 0));
  CHECK_FALSE(in_fov(f, -130, 0));
  CHECK_FALSE(in_fov(f, 0, 20));
  CHECK(in_fov(f, -120, -17));
  CHECK(in_fov(f, 80, 15));
  CHECK_FALSE(in_fov(f, 85, 0));
  CHECK_FALSE(in_fov(f, 0, -18));
}

TEST_CASE("direction-of-view factors") {
  DovConfig dov;
  dov.mode = DovMode::uniform;
  CHECK(dov_factor(dov, -100, 0).factor == 1.0);
  dov.mode = DovMode::weighted_scaling;
  CHECK(dov_factor(dov, -30, 0).factor == doctest::Approx(5.75 / 18.5 * 4).epsilon(1e-15));
  CHECK(dov_factor(dov, -30, 0).factor == doctest::Approx(1.2432).epsilon(1e-4));
  CHECK(dov_factor(dov, -90, 0).factor == doctest::Approx(0.7568).epsilon(1e-4));
  const auto out = dov_factor(dov, 100, 0);
  CHECK(out.factor == 0.0);
  CHECK(out.outside_partitions);

  // Equal weights reduce weighted scaling to uniform.
  for (auto& p : dov.partitions) p.weight = 2.0;
  for (double b = -120; b <= 90; b += 7) CHECK(dov_factor(dov, b, 0).factor == 1.0);
}

TEST_CASE("stochastic scan attends one sector per dwell") {
  DovConfig dov;
  dov.mode = DovMode::stochastic_scan;
  ScanSchedule s(dov, 99);
  CHECK_THROWS_AS(dov_factor(dov, 0, 0), InputError);
  std::array<int, 4> counts{};
  const int slots = 40000;
  for (int k = 0; k < slots; ++k) {
    const double t = 2.0 * k + 0.5;
    const auto att = s.attended_partition(t);
    CHECK(att == s.attended_partition(2.0 * k + 1.9));
    ++counts[att];
    double sum = 0.0;
    for (double b : {-90.0, -30.0, 30.0, 75.0}) sum += dov_factor(dov, b, t, &s).factor;
    CHECK(sum == 4.0);
  }
  const std::array<double, 4> w{3.5, 5.75, 5.75, 3.5};
  for (int i = 0; i < 4; ++i) {
    const double p = w[i] / 18.5;
    CHECK(std::abs(counts[i] / double(slots) - p) < 4 * std::sqrt(p * (1 - p) / slots));
  }
}

TEST_CASE("single step probability") {
  Rng rng(1);
  AcquisitionState s;
  s.draw_u = 0.9;
  const double lam = acquisition_rate(17000, 110, units::nmi_to_ft(1), 18228.4);
  const auto n = step_acquisition(s, {0, 1, lam, true, true}, rng);
  CHECK(n.cum_prob() == doctest::Approx(-std::expm1(-lam)).epsilon(1e-15));
  CHECK(n.cum_prob() == doctest::Approx(0.018484).epsilon(1e-4));
  CHECK_FALSE(n.acquired);
  const auto z = step_acquisition(n, {1, 1, 0.0, true, true}, rng);
  CHECK(z.cum_hazard == n.cum_hazard);
}

TEST_CASE("cumulative probability is monotone and bounded") {
  Rng rng(2);
  AcquisitionState s;
  s.draw_u = 0.9999999;
  s.cum_hazard = -std::log1p(-0.999999);
  for (double lam : {0.0, 1e-6, 0.5, 40.0}) {
    const auto n = step_acquisition(s, {0, 1, lam, true, true}, rng);
    CHECK(n.cum_prob() >= s.cum_prob());
    CHECK(n.cum_prob() <= 1.0);
  }
}

TEST_CASE("constant rate composes exactly") {
  Rng rng(3);
  for (double dt : {0.1, 0.25, 1.0}) {
    AcquisitionState s;
    s.draw_u = 1.0 - 1e-15;
    const double lam = 0.0123;
    const int n = static_cast<int>(std::lround(100.0 / dt));
    for (int k = 0; k < n; ++k) s = step_acquisition(s, {k * dt, dt, lam, true, true}, rng);
    CHECK(s.cum_prob() == doctest::Approx(-std::expm1(-lam * 100.0)).epsilon(1e-13));
  }
}

TEST_CASE("acquisition time is interpolated inside the step") {
  Rng rng(4);
  AcquisitionState s;
  s.draw_u = -std::expm1(-0.25);
  const auto n = step_acquisition(s, {10, 1, 1.0, true, true}, rng);
  CHECK(n.acquired);
  CHECK(n.tracking);
  REQUIRE(n.t_acquired);
  CHECK(*n.t_acquired == doctest::Approx(10.25).epsilon(1e-12));
}

TEST_CASE("leaving the field of view resets acquisition") {
  Rng rng(5);
  AcquisitionState s = initial_acquisition_state(rng);
  s.draw_u = 0.01;
  s = step_acquisition(s, {0, 1, 1.0, true, true}, rng);
  REQUIRE(s.acquired);
  s = step_acquisition(s, {1, 1, 1.0, true, true}, rng);
  CHECK(s.tracking);
  const auto out = step_acquisition(s, {2, 1, 1.0, false, true}, rng);
  CHECK_FALSE(out.acquired);
  CHECK_FALSE(out.tracking);
  CHECK_FALSE(out.t_acquired);
  CHECK(out.cum_hazard == 0.0);
  CHECK(out.draw_u != s.draw_u);
  CHECK(out.draw_u > 0.0);
  CHECK(out.draw_u < 1.0);
}

TEST_CASE("time in range accumulates only when visible") {
  Rng rng(6);
  AcquisitionState s;
  s.draw_u = 0.999;
  s = step_acquisition(s, {0, 1, 0.0, true, false}, rng);
  CHECK(s.time_in_range == 0.0);
  s = step_acquisition(s, {1, 1, 0.001, true, true}, rng);
  s = step_acquisition(s, {2, 0.5, 0.001, true, true}, rng);
  CHECK(s.time_in_range == 1.5);
}

TEST_CASE("step refinement converges along a closing track") {
  // Head-on at 337.56 ft/s from 4 nmi, target 110 ft^2, R = 3 nmi.
  const double v = 2 * units::knots_to_fps(100), r0 = units::nmi_to_ft(4);
  const double vis = units::nmi_to_ft(3);
  auto run = [&](double dt) {
    Rng rng(0);
    AcquisitionState s;
    s.draw_u = 1.0 - 1e-15;
    const int n = static_cast<int>(std::lround(60.0 / dt));
    auto lam = [&](double t) { return acquisition_rate(17000, 110, r0 - v * t, vis); };
    for (int k = 0; k < n; ++k) {
      const double t = k * dt;
      s = step_acquisition(s, {t, dt, 0.5 * (lam(t) + lam(t + dt)), true, true}, rng);
    }
    return s.cum_prob();
  };
  const double coarse = run(1.0), fine = run(0.1);
  CHECK(std::abs(coarse - fine) / fine < 0.01);
}

TEST_CASE("parameter validation") {
  AcquisitionParams p;
  CHECK_NOTHROW(p.validate());
  p.beta = 0;
  CHECK_THROWS_AS(p.validate(), InputError);
  p = {};
  p.fov.left = 200;
  CHECK_THROWS_AS(p.validate(), InputError);
  p = {};
  p.dov.partitions[1].lower_az = -50;
  CHECK_THROWS_AS(p.validate(), InputError);
  CHECK(parse_dov_mode("weighted-scaling") == DovMode::weighted_scaling);
  CHECK_THROWS_AS(parse_dov_mode("sideways"), InputError);
}
