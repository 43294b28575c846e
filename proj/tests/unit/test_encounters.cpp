#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "sbs/encounters.hpp"
#include "sbs/errors.hpp"
#include "sbs/units.hpp"

using namespace sbs;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Miss {
  double hmd;  // signed, + intruder on ownship's right
  double vmd;
};

Miss miss_at_cpa(const EncounterSpec& s) {
  ScriptedFlight own(s.ownship), intr(s.intruder);
  const int n = static_cast<int>(std::lround(s.t_cpa));
  for (int k = 0; k < n; ++k) {
    own.advance(1.0);
    intr.advance(1.0);
  }
  const auto& o = own.state();
  const auto& i = intr.state();
  const double de = i.east - o.east, dn = i.north - o.north;
  const double psi = o.heading * units::kDegToRad;
  const double side = de * std::cos(psi) - dn * std::sin(psi);
  const double h = std::hypot(de, dn);
  return {side < 0 ? -h : h, i.altitude - o.altitude};
}

}  // namespace

TEST_CASE("generated encounters meet the sampled miss distances") {
  const auto specs = generate_set({}, AirframeClass::fixed_wing, 300, 42);
  for (const auto& s : specs) {
    const Miss m = miss_at_cpa(s);
    CHECK(std::abs(m.hmd - s.sampled_hmd) <= 1.0);
    CHECK(std::abs(m.vmd - s.sampled_vmd) <= 1.0);
  }
}

TEST_CASE("importance weights") {
  ImportanceScheme s;
  s.hmd_edges = {-2, -1, 0, 1, 2};
  s.vmd_edges = {0, 1, 2};
  const auto r = s.resolved();
  for (int h = 0; h < 4; ++h)
    for (int v = 0; v < 2; ++v) CHECK(importance_weight(r, h, v) == 1.0);

  ImportanceScheme t;
  t.hmd_edges = {0, 1, 2};
  t.vmd_edges = {0, 1};
  t.sampling_probs_hmd = {0.2, 0.8};
  t.target_probs_hmd = {0.4, 0.6};
  CHECK(importance_weight(t.resolved(), 0, 0) == 2.0);

  ImportanceScheme bad;
  bad.sampling_probs_hmd = {0.5, 0.5};
  CHECK_THROWS_AS(bad.resolved(), InputError);
  bad = {};
  bad.vmd_edges = {0, 0, 1};
  CHECK_THROWS_AS(bad.resolved(), InputError);
}

TEST_CASE("large generated sets respect bounds and the target distribution") {
  ImportanceScheme scheme;
  scheme.sampling_probs_hmd = {0.2, 0.6, 0.2};
  const auto resolved = scheme.resolved();
  const std::size_t n = 100000;
  for (auto cls : {AirframeClass::fixed_wing, AirframeClass::rotary_wing}) {
    const auto specs = generate_set(scheme, cls, n, 2024);
    const auto prof = class_profile(cls);
    const EncounterBounds b;
    std::size_t violations = 0;
    // HMD cells finer than the importance bins.
    const std::vector<double> cells = {-2000, -1250, -500, -250, 0, 250, 500, 1250, 2000};
    std::vector<double> counts(cells.size() - 1, 0.0), weighted(cells.size() - 1, 0.0);
    for (const auto& s : specs) {
      const double sep0 = std::hypot(s.intruder.initial.east - s.ownship.initial.east,
                                     s.intruder.initial.north - s.ownship.initial.north);
      bool ok = s.weight > 0 && sep0 >= b.min_initial_separation && s.duration == 220.0 &&
                s.t_cpa == 180.0;
      for (const auto* tr : {&s.ownship, &s.intruder}) {
        const double kts = units::fps_to_knots(tr->initial.ground_speed);
        ok = ok && kts >= prof.min_speed_kts - 1e-9 && kts <= prof.max_speed_kts + 1e-9;
        ScriptedFlight f(*tr);
        for (int k = 0; k <= 220; ++k) {
          if (k > 0) f.advance(1.0);
          const double alt = f.state().altitude;
          ok = ok && alt >= b.min_altitude - 1e-6 && alt <= b.max_altitude + 1e-6;
        }
      }
      if (!ok) ++violations;
      const auto it = std::upper_bound(cells.begin(), cells.end(), s.sampled_hmd);
      const auto j = static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(it - cells.begin() - 1, 0, 7));
      counts[j] += 1.0;
      weighted[j] += s.weight;
    }
    CHECK(violations == 0);

    // Raw counts against the sampling density (multinomial chi-square).
    double chi2 = 0.0;
    for (std::size_t j = 0; j < counts.size(); ++j) {
      const double mid = 0.5 * (cells[j] + cells[j + 1]);
      const auto bin = static_cast<std::size_t>(
          std::upper_bound(resolved.hmd_edges.begin(), resolved.hmd_edges.end(), mid) -
          resolved.hmd_edges.begin() - 1);
      const double width = resolved.hmd_edges[bin + 1] - resolved.hmd_edges[bin];
      const double expected = n * resolved.sampling_probs_hmd[bin] * (cells[j + 1] - cells[j]) / width;
      chi2 += (counts[j] - expected) * (counts[j] - expected) / expected;
    }
    const boost::math::chi_squared dist(static_cast<double>(counts.size() - 1));
    CHECK(boost::math::cdf(boost::math::complement(dist, chi2)) > 0.01);

    // Weighted mass per cell against the target density (uniform over the
    // HMD envelope), within four standard errors.
    for (std::size_t j = 0; j < weighted.size(); ++j) {
      const double target = (cells[j + 1] - cells[j]) / 4000.0;
      const double w = weighted[j] / counts[j];
      const double p_sample = counts[j] / n;
      const double se = w * std::sqrt(p_sample * (1 - p_sample) / n);
      CHECK(std::abs(weighted[j] / n - target) < 4 * se);
    }
  }
}

TEST_CASE("generation is deterministic and independent of jobs") {
  const auto a = generate_set({}, AirframeClass::rotary_wing, 200, 7, 1);
  const auto b = generate_set({}, AirframeClass::rotary_wing, 200, 7, 3);
  CHECK(a == b);
  const auto dir = fs::temp_directory_path();
  EncounterSetHeader h;
  h.master_seed = 7;
  h.airframe_class = AirframeClass::rotary_wing;
  write_set(dir / "sbs_a.jsonl", h, a);
  write_set(dir / "sbs_b.jsonl", h, b);
  CHECK(slurp(dir / "sbs_a.jsonl") == slurp(dir / "sbs_b.jsonl"));
  fs::remove(dir / "sbs_a.jsonl");
  fs::remove(dir / "sbs_b.jsonl");
}

TEST_CASE("encounter set round trip") {
  const auto dir = fs::temp_directory_path();
  const auto specs = generate_set({}, AirframeClass::fixed_wing, 1000, 11);
  EncounterSetHeader h;
  h.master_seed = 11;
  write_set(dir / "sbs_rt.jsonl", h, specs);
  const auto back = read_set(dir / "sbs_rt.jsonl");
  CHECK(back.header.master_seed == 11);
  REQUIRE(back.specs.size() == specs.size());
  for (std::size_t i = 0; i < specs.size(); ++i) CHECK(back.specs[i] == specs[i]);

  write_set(dir / "sbs_empty.jsonl", h, {});
  CHECK(read_set(dir / "sbs_empty.jsonl").specs.empty());
  fs::remove(dir / "sbs_rt.jsonl");
  fs::remove(dir / "sbs_empty.jsonl");
}

TEST_CASE("corrupted record is reported by index") {
  const auto dir = fs::temp_directory_path();
  EncounterSetHeader h;
  write_set(dir / "sbs_bad.jsonl", h, generate_set({}, AirframeClass::fixed_wing, 10, 3));
  std::ifstream in(dir / "sbs_bad.jsonl");
  std::vector<std::string> lines;
  for (std::string l; std::getline(in, l);) lines.push_back(l);
  in.close();
  lines[1 + 7] = lines[1 + 7].substr(0, lines[1 + 7].size() / 2);
  std::ofstream out(dir / "sbs_bad.jsonl");
  for (const auto& l : lines) out << l << '\n';
  out.close();
  try {
    read_set(dir / "sbs_bad.jsonl");
    FAIL("expected an error");
  } catch (const InputError& e) {
    CHECK(std::string(e.what()).find("record 7") != std::string::npos);
  }
  fs::remove(dir / "sbs_bad.jsonl");
}

TEST_CASE("version mismatch is rejected") {
  const auto p = fs::temp_directory_path() / "sbs_ver.jsonl";
  write_set(p, {}, {});
  std::string text = slurp(p);
  const auto at = text.find("\"version\":1");
  REQUIRE(at != std::string::npos);
  text.replace(at, 11, "\"version\":9");
  std::ofstream(p, std::ios::binary) << text;
  CHECK_THROWS_AS(read_set(p), InputError);
  fs::remove(p);
}

TEST_CASE("scripted events apply at their onset inside a step") {
  ScriptedTrajectory tr;
  tr.initial.ground_speed = 200;
  ManeuverCommand c;
  c.onset_t = 10.5;
  c.target_vertical_rate = 10.0;
  tr.events.push_back(c);
  ScriptedFlight a(tr), b(tr);
  for (int k = 0; k < 40; ++k) a.advance(0.5);
  for (int k = 0; k < 20; ++k) b.advance(1.0);
  CHECK(a.state().altitude == doctest::Approx(b.state().altitude).epsilon(1e-12));
  CHECK(a.state().vertical_rate == doctest::Approx(10.0));
}
