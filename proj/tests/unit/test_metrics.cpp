#include <cmath>
#include <cstdio>
#include <random>
#include <vector>

#include "doctest.h"
#include "sbs/errors.hpp"
#include "sbs/metrics.hpp"

using namespace sbs;

namespace {

std::vector<AircraftState> track(double east, double north, double alt, double ve, double vn,
                                 int n = 21) {
  std::vector<AircraftState> out;
  for (int k = 0; k < n; ++k) {
    AircraftState s;
    s.t = k;
    s.east = east + ve * k;
    s.north = north + vn * k;
    s.altitude = alt;
    s.ground_speed = 100;
    out.push_back(s);
  }
  return out;
}

EncounterOutcome outcome(std::uint64_t id, bool nom, bool mit, double w) {
  EncounterOutcome o;
  o.id = id;
  o.nominal_nmac = nom;
  o.mitigated_nmac = mit;
  o.weight = w;
  return o;
}

std::vector<EncounterOutcome> random_outcomes(std::uint64_t seed, std::size_t n) {
  std::mt19937_64 g(seed);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<EncounterOutcome> out;
  for (std::size_t i = 0; i < n; ++i) {
    const bool nom = u(g) < 0.3;
    const bool mit = nom ? u(g) < 0.4 : u(g) < 0.02;
    out.push_back(outcome(i, nom, mit, 0.25 + 3 * u(g)));
  }
  return out;
}

}  // namespace

TEST_CASE("NMAC cylinder examples") {
  const auto own = track(0, 0, 1000, 0, 100);
  CHECK(detect_nmac(own, track(400, 0, 1050, 0, 100)).nmac);
  CHECK_FALSE(detect_nmac(own, track(600, 0, 1050, 0, 100)).nmac);
  CHECK_FALSE(detect_nmac(own, track(400, 0, 1150, 0, 100)).nmac);
  const auto r = detect_nmac(own, track(400, 0, 1050, 0, 100));
  REQUIRE(r.t_first);
  CHECK(*r.t_first == 0.0);
  CHECK(r.min_sep.horizontal == doctest::Approx(400.0));
  CHECK(r.min_sep.vertical == doctest::Approx(50.0));
}

TEST_CASE("NMAC between samples is found") {
  // Head-on pass at 300 ft/s each, meeting midway through a 1 s step.
  const auto own = track(0, 0, 1000, 0, 300), tgt = track(0, 5850, 1000, 0, -300);
  const auto r = detect_nmac(own, tgt);
  CHECK(r.nmac);
  CHECK(r.min_sep.horizontal == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(r.min_sep.t == doctest::Approx(9.75));
  REQUIRE(r.t_first);
  CHECK(*r.t_first == doctest::Approx((5850.0 - 500.0) / 600.0));
}

TEST_CASE("NMAC detection is symmetric") {
  std::mt19937_64 g(4);
  std::uniform_real_distribution<double> p(-3000, 3000), v(-300, 300), a(-150, 150);
  for (int i = 0; i < 500; ++i) {
    const auto own = track(0, 0, 1000, v(g), v(g)), tgt = track(p(g), p(g), 1000 + a(g), v(g), v(g));
    const auto ab = detect_nmac(own, tgt), ba = detect_nmac(tgt, own);
    CHECK(ab.nmac == ba.nmac);
    CHECK(ab.t_first == ba.t_first);
    CHECK(ab.min_sep.horizontal == ba.min_sep.horizontal);
  }
}

TEST_CASE("NMAC input errors") {
  const auto a = track(0, 0, 0, 0, 0, 5);
  CHECK_THROWS_AS(detect_nmac(a, track(0, 0, 0, 0, 0, 6)), InputError);
  CHECK_THROWS_AS(detect_nmac({}, {}), InputError);
}

TEST_CASE("risk ratio arithmetic") {
  std::vector<EncounterOutcome> o;
  for (int i = 0; i < 5; ++i) o.push_back(outcome(i, true, i == 0, 2.0));
  o.push_back(outcome(5, false, true, 0.4));
  o.push_back(outcome(6, false, false, 7.0));
  const auto r = risk_ratio(o);
  CHECK(r.weighted_nominal_nmacs == 10.0);
  CHECK(r.weighted_unresolved == 2.0);
  CHECK(r.weighted_induced == 0.4);
  CHECK(r.unresolved == doctest::Approx(0.20));
  CHECK(r.induced == doctest::Approx(0.04));
  CHECK(r.total == doctest::Approx(0.24));
  CHECK(r.total == r.unresolved + r.induced);
  CHECK(r.n_encounters == 7);
}

TEST_CASE("identity mitigation and full resolution") {
  auto o = random_outcomes(1, 500);
  for (auto& x : o) x.mitigated_nmac = x.nominal_nmac;
  const auto r = risk_ratio(o);
  CHECK(r.total == 1.0);
  CHECK(r.unresolved == 1.0);
  CHECK(r.induced == 0.0);
  for (auto& x : o) x.mitigated_nmac = false;
  CHECK(risk_ratio(o).total == 0.0);
}

TEST_CASE("total equals unresolved plus induced for random sets") {
  for (std::uint64_t s = 0; s < 50; ++s) {
    const auto r = risk_ratio(random_outcomes(s, 300), {200, s, 0.95});
    CHECK(r.total == r.unresolved + r.induced);
    CHECK(r.ci_total.lo <= r.ci_total.hi);
  }
}

TEST_CASE("weight scaling leaves ratios unchanged") {
  const auto base = random_outcomes(2, 1000);
  const auto r0 = risk_ratio(base, {300, 5, 0.95});
  for (double c : {0.125, 4.0, 1024.0}) {
    auto o = base;
    for (auto& x : o) x.weight *= c;
    const auto r = risk_ratio(o, {300, 5, 0.95});
    CHECK(r.total == r0.total);
    CHECK(r.unresolved == r0.unresolved);
    CHECK(r.induced == r0.induced);
    CHECK(r.ci_total.lo == r0.ci_total.lo);
    CHECK(r.ci_total.hi == r0.ci_total.hi);
  }
  for (double c : {0.3, 7.7, 1e6 / 3}) {
    auto o = base;
    for (auto& x : o) x.weight *= c;
    const auto r = risk_ratio(o, {300, 5, 0.95});
    CHECK(r.total == doctest::Approx(r0.total).epsilon(1e-14));
    CHECK(r.induced == doctest::Approx(r0.induced).epsilon(1e-14));
  }
}

TEST_CASE("zero denominator is a statistical error") {
  std::vector<EncounterOutcome> o{outcome(0, false, true, 1.0), outcome(1, false, false, 1.0)};
  CHECK_THROWS_AS(risk_ratio(o), StatisticalError);
  CHECK_THROWS_AS(risk_ratio({}), StatisticalError);
}

TEST_CASE("excluded outcomes are counted but not used") {
  auto o = random_outcomes(3, 200);
  const auto r0 = risk_ratio(o, {100, 1, 0.95});
  auto bad = outcome(999, true, true, 50.0);
  bad.excluded = true;
  o.push_back(bad);
  const auto r = risk_ratio(o, {100, 1, 0.95});
  CHECK(r.n_excluded == 1);
  CHECK(r.n_encounters == 201);
  CHECK(r.total == r0.total);
}

TEST_CASE("bootstrap intervals are seeded and cover the estimate") {
  const auto o = random_outcomes(4, 2000);
  const auto a = risk_ratio(o, {1000, 77, 0.95}), b = risk_ratio(o, {1000, 77, 0.95});
  CHECK(a.ci_total.lo == b.ci_total.lo);
  CHECK(a.ci_total.hi == b.ci_total.hi);
  CHECK(a.bootstrap_resamples == 1000);
  CHECK(a.ci_total.lo <= a.total);
  CHECK(a.total <= a.ci_total.hi);
  CHECK(a.ci_total.half_width() > 0.0);
  CHECK(a.ci_total.half_width() < 0.1);
}

TEST_CASE("paired difference interval") {
  const auto a = random_outcomes(5, 2000);
  const auto same = paired_total_difference_ci(a, a, {500, 1, 0.95});
  CHECK(same.lo == 0.0);
  CHECK(same.hi == 0.0);
  auto b = a;
  for (auto& x : b) x.mitigated_nmac = x.nominal_nmac;
  const auto d = paired_total_difference_ci(a, b, {500, 1, 0.95});
  CHECK(d.hi < 0.0);
  b.pop_back();
  CHECK_THROWS_AS(paired_total_difference_ci(a, b), InputError);
}

TEST_CASE("MAC probability chaining") {
  auto same15 = [](double x, double y) {
    char a[32], b[32];
    std::snprintf(a, sizeof a, "%.15g", x);
    std::snprintf(b, sizeof b, "%.15g", y);
    return std::string(a) == b;
  };
  CHECK(mac_probability(0.30, 0.001) == 0.0003);
  CHECK(same15(mac_probability(0.30, 0.0006), 0.00018));
  CHECK(std::abs(mac_probability(0.30, 0.0006) - 0.00018) <=
        std::nextafter(0.00018, 1.0) - 0.00018);
  CHECK(mac_probability(0.24, 0.025) == 0.006);
  CHECK(mac_probability(0.004, 0.025) == 0.0001);
  CHECK_THROWS_AS(mac_probability(-0.1, 0.5), InputError);
}
