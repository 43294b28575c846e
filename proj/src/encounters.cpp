#include "sbs/encounters.hpp"

#include <atomic>
#include <cmath>
#include <fstream>
#include "json.hpp"
#include <mutex>
#include <numeric>
#include <thread>

#include "sbs/errors.hpp"
#include "sbs/units.hpp"

namespace sbs {

using json = nlohmann::ordered_json;

std::string_view to_string(AirframeClass c) {
  return c == AirframeClass::fixed_wing ? "fixed-wing" : "rotary-wing";
}

AirframeClass parse_airframe_class(std::string_view text) {
  if (text == "fixed-wing" || text == "fixed") return AirframeClass::fixed_wing;
  if (text == "rotary-wing" || text == "rotary") return AirframeClass::rotary_wing;
  throw InputError("unknown airframe class '" + std::string(text) + "'");
}

ClassProfile class_profile(AirframeClass c) {
  if (c == AirframeClass::fixed_wing) return {90.0, 250.0, 0.3, 0.25};
  return {60.0, 155.0, 0.3, 0.4};
}

// ---------------------------------------------------------------------------
// Scripted flight

ManeuverCommand merge_command(const std::optional<ManeuverCommand>& active,
                              const ManeuverCommand& update) {
  if (!active) return update;
  ManeuverCommand m = *active;
  if (update.target_heading) m.target_heading = update.target_heading;
  if (update.target_vertical_rate) m.target_vertical_rate = update.target_vertical_rate;
  if (update.target_speed) m.target_speed = update.target_speed;
  if (update.level_off_altitude) m.level_off_altitude = update.level_off_altitude;
  m.onset_t = update.onset_t;
  return m;
}

ScriptedFlight::ScriptedFlight(const ScriptedTrajectory& script, KinematicLimits limits)
    : script_(&script), limits_(limits), state_(script.initial) {}

void ScriptedFlight::override_with(const ManeuverCommand& cmd) {
  active_ = merge_command(active_, cmd);
  overridden_ = true;
}

void ScriptedFlight::reset_state(const AircraftState& s, std::size_t next_event,
                                 const std::optional<ManeuverCommand>& active) {
  state_ = s;
  next_event_ = next_event;
  active_ = active;
}

void ScriptedFlight::advance(double dt) {
  const double t_end = state_.t + dt;
  const auto& events = script_->events;
  auto apply_due = [&](double now) {
    while (!overridden_ && next_event_ < events.size() &&
           events[next_event_].onset_t <= now + 1e-9) {
      active_ = merge_command(active_, events[next_event_]);
      ++next_event_;
    }
  };
  apply_due(state_.t);
  while (!overridden_ && next_event_ < events.size() &&
         events[next_event_].onset_t < t_end - 1e-9) {
    const double onset = events[next_event_].onset_t;
    if (onset > state_.t) {
      state_ = propagate(state_, active_ ? &*active_ : nullptr, onset - state_.t, limits_);
    }
    apply_due(onset);
  }
  const double rest = t_end - state_.t;
  if (rest > 0.0) state_ = propagate(state_, active_ ? &*active_ : nullptr, rest, limits_);
  state_.t = t_end;
}

// ---------------------------------------------------------------------------
// Importance scheme

namespace {

void check_probs(const std::vector<double>& p, std::size_t bins, const char* name) {
  if (p.size() != bins)
    throw InputError(std::string(name) + " must have one entry per bin");
  double total = 0.0;
  for (double v : p) {
    if (!(v > 0.0)) throw InputError(std::string(name) + " entries must be positive");
    total += v;
  }
  if (std::abs(total - 1.0) > 1e-9) throw InputError(std::string(name) + " must sum to 1");
}

void check_edges(const std::vector<double>& e, const char* name) {
  if (e.size() < 2) throw InputError(std::string(name) + " needs at least two edges");
  for (std::size_t i = 1; i < e.size(); ++i)
    if (!(e[i] > e[i - 1])) throw InputError(std::string(name) + " must be strictly ascending");
}

std::vector<double> uniform_probs(std::size_t bins) {
  return std::vector<double>(bins, 1.0 / static_cast<double>(bins));
}

std::vector<double> width_probs(const std::vector<double>& edges) {
  std::vector<double> p;
  const double span = edges.back() - edges.front();
  for (std::size_t i = 1; i < edges.size(); ++i) p.push_back((edges[i] - edges[i - 1]) / span);
  return p;
}

}  // namespace

ImportanceScheme ImportanceScheme::resolved() const {
  ImportanceScheme s = *this;
  check_edges(s.hmd_edges, "hmd_edges");
  check_edges(s.vmd_edges, "vmd_edges");
  const std::size_t nh = s.hmd_edges.size() - 1, nv = s.vmd_edges.size() - 1;
  if (s.sampling_probs_hmd.empty()) s.sampling_probs_hmd = uniform_probs(nh);
  if (s.sampling_probs_vmd.empty()) s.sampling_probs_vmd = uniform_probs(nv);
  if (s.target_probs_hmd.empty()) s.target_probs_hmd = width_probs(s.hmd_edges);
  if (s.target_probs_vmd.empty()) s.target_probs_vmd = width_probs(s.vmd_edges);
  check_probs(s.sampling_probs_hmd, nh, "sampling_probs_hmd");
  check_probs(s.sampling_probs_vmd, nv, "sampling_probs_vmd");
  check_probs(s.target_probs_hmd, nh, "target_probs_hmd");
  check_probs(s.target_probs_vmd, nv, "target_probs_vmd");
  return s;
}

double importance_weight(const ImportanceScheme& r, int hmd_bin, int vmd_bin) {
  return (r.target_probs_hmd[hmd_bin] / r.sampling_probs_hmd[hmd_bin]) *
         (r.target_probs_vmd[vmd_bin] / r.sampling_probs_vmd[vmd_bin]);
}

// ---------------------------------------------------------------------------
// Sampling

namespace {

constexpr double kLastEventOnset = 150.0;
constexpr double kFreeAltitude = 50000.0;

ScriptedTrajectory sample_script(const ClassProfile& prof, Rng& rng) {
  ScriptedTrajectory tr;
  auto& s = tr.initial;
  s.ground_speed = units::knots_to_fps(rng.uniform(prof.min_speed_kts, prof.max_speed_kts));
  s.heading = rng.uniform(0.0, 360.0);
  const bool level = rng.bernoulli(0.7);
  const double climb_sign = rng.bernoulli(0.5) ? 1.0 : -1.0;
  s.vertical_rate = level ? 0.0 : climb_sign * units::fpm_to_fps(rng.uniform(100.0, 500.0));
  s.pitch = std::asin(s.vertical_rate / s.ground_speed) * units::kRadToDeg;

  const bool heading_event = rng.bernoulli(prof.p_heading_event);
  const double heading_onset = static_cast<double>(10 + rng.below(141));
  const double turn = (rng.bernoulli(0.5) ? 1.0 : -1.0) * rng.uniform(15.0, 90.0);
  const bool vertical_event = rng.bernoulli(prof.p_vertical_event);
  const double vertical_onset = static_cast<double>(10 + rng.below(141));
  const double new_rate = (rng.bernoulli(0.5) ? 1.0 : -1.0) *
                          units::fpm_to_fps(rng.uniform(200.0, 800.0));

  if (heading_event) {
    ManeuverCommand c;
    c.onset_t = heading_onset;
    c.target_heading = wrap_heading(s.heading + turn);
    tr.events.push_back(c);
  }
  if (vertical_event) {
    ManeuverCommand c;
    c.onset_t = vertical_onset;
    c.target_vertical_rate = level ? new_rate : 0.0;
    tr.events.push_back(c);
  }
  std::stable_sort(tr.events.begin(), tr.events.end(),
                   [](const auto& a, const auto& b) { return a.onset_t < b.onset_t; });
  return tr;
}

int sample_bin(const std::vector<double>& probs, Rng& rng) {
  return static_cast<int>(rng.categorical(probs));
}

// Altitude range over the encounter, sampled at 0.5 s.
std::pair<double, double> altitude_envelope(const ScriptedTrajectory& tr, double duration) {
  ScriptedFlight f(tr);
  double lo = f.state().altitude, hi = lo;
  const int steps = static_cast<int>(std::lround(duration / 0.5));
  for (int k = 1; k <= steps; ++k) {
    f.advance(0.5);
    lo = std::min(lo, f.state().altitude);
    hi = std::max(hi, f.state().altitude);
  }
  return {lo, hi};
}

AircraftState state_at(const ScriptedTrajectory& tr, double t) {
  ScriptedFlight f(tr);
  f.advance(t);
  return f.state();
}

}  // namespace

EncounterSpec sample_encounter(const ImportanceScheme& scheme, AirframeClass airframe_class,
                               Rng& rng, const EncounterBounds& bounds) {
  const ImportanceScheme sch = scheme.resolved();
  ClassProfile prof = class_profile(airframe_class);
  prof.min_speed_kts = std::max(prof.min_speed_kts, bounds.min_speed_kts);
  prof.max_speed_kts = std::min(prof.max_speed_kts, bounds.max_speed_kts);

  int rejected_separation = 0, rejected_altitude = 0, rejected_geometry = 0;
  for (int attempt = 0; attempt < 1000; ++attempt) {
    EncounterSpec spec;
    spec.airframe_class = airframe_class;
    spec.duration = bounds.duration;
    spec.t_cpa = bounds.t_cpa;
    spec.ownship = sample_script(prof, rng);
    spec.intruder = sample_script(prof, rng);
    spec.hmd_bin = sample_bin(sch.sampling_probs_hmd, rng);
    spec.vmd_bin = sample_bin(sch.sampling_probs_vmd, rng);
    spec.sampled_hmd = rng.uniform(sch.hmd_edges[spec.hmd_bin], sch.hmd_edges[spec.hmd_bin + 1]);
    spec.sampled_vmd = rng.uniform(sch.vmd_edges[spec.vmd_bin], sch.vmd_edges[spec.vmd_bin + 1]);
    spec.ownship.initial.altitude = rng.uniform(bounds.min_altitude, bounds.max_altitude);

    // Ownship from the origin; intruder displacement from a free altitude so
    // the ground never interferes, then shifted into place.
    const AircraftState own_cpa = state_at(spec.ownship, spec.t_cpa);
    ScriptedTrajectory probe = spec.intruder;
    probe.initial.altitude = kFreeAltitude;
    const AircraftState intr_cpa = state_at(probe, spec.t_cpa);

    const Vec3 vo = velocity_enu(own_cpa), vi = velocity_enu(intr_cpa);
    const double rel_e = vi.x - vo.x, rel_n = vi.y - vo.y;
    const double rel_speed = std::hypot(rel_e, rel_n);
    if (rel_speed < 1.0) {
      ++rejected_geometry;
      continue;
    }
    // Unit normal to the relative velocity, oriented towards ownship's right.
    double ne = rel_n / rel_speed, nn = -rel_e / rel_speed;
    const double psi = own_cpa.heading * units::kDegToRad;
    const double right_e = std::cos(psi), right_n = -std::sin(psi);
    if (ne * right_e + nn * right_n < 0.0) {
      ne = -ne;
      nn = -nn;
    }
    auto& ii = spec.intruder.initial;
    ii.east = own_cpa.east + spec.sampled_hmd * ne - intr_cpa.east;
    ii.north = own_cpa.north + spec.sampled_hmd * nn - intr_cpa.north;
    ii.altitude = own_cpa.altitude + spec.sampled_vmd - (intr_cpa.altitude - kFreeAltitude);

    const double sep0 = std::hypot(ii.east - spec.ownship.initial.east,
                                   ii.north - spec.ownship.initial.north);
    if (sep0 < bounds.min_initial_separation) {
      ++rejected_separation;
      continue;
    }
    const auto [olo, ohi] = altitude_envelope(spec.ownship, spec.duration);
    const auto [ilo, ihi] = altitude_envelope(spec.intruder, spec.duration);
    if (olo < bounds.min_altitude || ohi > bounds.max_altitude || ilo < bounds.min_altitude ||
        ihi > bounds.max_altitude) {
      ++rejected_altitude;
      continue;
    }
    spec.weight = importance_weight(sch, spec.hmd_bin, spec.vmd_bin);
    return spec;
  }
  throw RuntimeError("encounter generation infeasible after 1000 attempts (separation " +
                     std::to_string(rejected_separation) + ", altitude " +
                     std::to_string(rejected_altitude) + ", geometry " +
                     std::to_string(rejected_geometry) + " rejections)");
}

std::vector<EncounterSpec> generate_set(const ImportanceScheme& scheme,
                                        AirframeClass airframe_class, std::size_t count,
                                        std::uint64_t master_seed, int jobs,
                                        const EncounterBounds& bounds) {
  const ImportanceScheme sch = scheme.resolved();
  std::vector<EncounterSpec> out(count);
  const auto cls = static_cast<std::uint64_t>(airframe_class);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        Rng rng(stream_seed({master_seed, cls, i,
                             static_cast<std::uint64_t>(StreamPurpose::generation)}));
        out[i] = sample_encounter(sch, airframe_class, rng, bounds);
        out[i].id = i;
        out[i].seed = stream_seed({master_seed, cls, i});
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const int n = std::max(1, jobs);
  std::vector<std::jthread> pool;
  for (int w = 1; w < n; ++w) pool.emplace_back(worker);
  worker();
  pool.clear();
  if (failure) std::rethrow_exception(failure);
  return out;
}

// ---------------------------------------------------------------------------
// Files

namespace {

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> get_opt(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

json state_to_json(const AircraftState& s) {
  return json{{"t", s.t},
              {"east", s.east},
              {"north", s.north},
              {"altitude", s.altitude},
              {"ground_speed", s.ground_speed},
              {"heading", s.heading},
              {"vertical_rate", s.vertical_rate},
              {"turn_rate", s.turn_rate},
              {"bank", s.bank},
              {"pitch", s.pitch}};
}

AircraftState state_from_json(const json& j) {
  AircraftState s;
  s.t = j.at("t").get<double>();
  s.east = j.at("east").get<double>();
  s.north = j.at("north").get<double>();
  s.altitude = j.at("altitude").get<double>();
  s.ground_speed = j.at("ground_speed").get<double>();
  s.heading = j.at("heading").get<double>();
  s.vertical_rate = j.at("vertical_rate").get<double>();
  s.turn_rate = j.at("turn_rate").get<double>();
  s.bank = j.at("bank").get<double>();
  s.pitch = j.at("pitch").get<double>();
  if (!(s.ground_speed > 0.0)) throw InputError("ground_speed must be positive");
  return s;
}

json script_to_json(const ScriptedTrajectory& tr) {
  json events = json::array();
  for (const auto& e : tr.events)
    events.push_back(json{{"onset_t", e.onset_t},
                          {"target_heading", opt(e.target_heading)},
                          {"target_vertical_rate", opt(e.target_vertical_rate)},
                          {"target_speed", opt(e.target_speed)},
                          {"level_off_altitude", opt(e.level_off_altitude)}});
  return json{{"initial", state_to_json(tr.initial)}, {"events", events}};
}

ScriptedTrajectory script_from_json(const json& j) {
  ScriptedTrajectory tr;
  tr.initial = state_from_json(j.at("initial"));
  for (const auto& e : j.at("events")) {
    ManeuverCommand c;
    c.onset_t = e.at("onset_t").get<double>();
    c.target_heading = get_opt(e, "target_heading");
    c.target_vertical_rate = get_opt(e, "target_vertical_rate");
    c.target_speed = get_opt(e, "target_speed");
    c.level_off_altitude = get_opt(e, "level_off_altitude");
    tr.events.push_back(c);
  }
  return tr;
}

json scheme_to_json(const ImportanceScheme& s) {
  return json{{"hmd_edges", s.hmd_edges},
              {"vmd_edges", s.vmd_edges},
              {"sampling_probs_hmd", s.sampling_probs_hmd},
              {"sampling_probs_vmd", s.sampling_probs_vmd},
              {"target_probs_hmd", s.target_probs_hmd},
              {"target_probs_vmd", s.target_probs_vmd}};
}

ImportanceScheme scheme_from_json(const json& j) {
  ImportanceScheme s;
  s.hmd_edges = j.at("hmd_edges").get<std::vector<double>>();
  s.vmd_edges = j.at("vmd_edges").get<std::vector<double>>();
  s.sampling_probs_hmd = j.value("sampling_probs_hmd", std::vector<double>{});
  s.sampling_probs_vmd = j.value("sampling_probs_vmd", std::vector<double>{});
  s.target_probs_hmd = j.value("target_probs_hmd", std::vector<double>{});
  s.target_probs_vmd = j.value("target_probs_vmd", std::vector<double>{});
  return s;
}

json spec_to_json(const EncounterSpec& s) {
  return json{{"id", s.id},
              {"airframe_class", std::string(to_string(s.airframe_class))},
              {"duration", s.duration},
              {"t_cpa", s.t_cpa},
              {"hmd_bin", s.hmd_bin},
              {"vmd_bin", s.vmd_bin},
              {"sampled_hmd", s.sampled_hmd},
              {"sampled_vmd", s.sampled_vmd},
              {"weight", s.weight},
              {"seed", s.seed},
              {"ownship", script_to_json(s.ownship)},
              {"intruder", script_to_json(s.intruder)}};
}

EncounterSpec spec_from_json(const json& j) {
  EncounterSpec s;
  s.id = j.at("id").get<std::uint64_t>();
  s.airframe_class = parse_airframe_class(j.at("airframe_class").get<std::string>());
  s.duration = j.at("duration").get<double>();
  s.t_cpa = j.at("t_cpa").get<double>();
  s.hmd_bin = j.at("hmd_bin").get<int>();
  s.vmd_bin = j.at("vmd_bin").get<int>();
  s.sampled_hmd = j.at("sampled_hmd").get<double>();
  s.sampled_vmd = j.at("sampled_vmd").get<double>();
  s.weight = j.at("weight").get<double>();
  s.seed = j.at("seed").get<std::uint64_t>();
  s.ownship = script_from_json(j.at("ownship"));
  s.intruder = script_from_json(j.at("intruder"));
  if (!(s.weight > 0.0)) throw InputError("weight must be positive");
  if (!(s.duration > 0.0)) throw InputError("duration must be positive");
  return s;
}

}  // namespace

void write_set(const std::filesystem::path& path, const EncounterSetHeader& header,
               const std::vector<EncounterSpec>& specs) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw RuntimeError("cannot write encounter set " + path.string());
  const json head{{"format", "sbs-encounter-set"},
                  {"version", kEncounterFormatVersion},
                  {"airframe_class", std::string(to_string(header.airframe_class))},
                  {"master_seed", header.master_seed},
                  {"count", specs.size()},
                  {"scheme", scheme_to_json(header.scheme)}};
  out << head.dump() << '\n';
  for (const auto& s : specs) out << spec_to_json(s).dump() << '\n';
  if (!out) throw RuntimeError("write failed for " + path.string());
}

EncounterSet read_set(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open encounter set " + path.string());
  EncounterSet set;
  std::string line;
  if (!std::getline(in, line)) throw InputError(path.string() + ": missing header");
  std::size_t expected = 0;
  try {
    const auto head = json::parse(line);
    if (head.value("format", std::string{}) != "sbs-encounter-set")
      throw InputError("not an encounter-set file");
    set.header.version = head.at("version").get<int>();
    if (set.header.version != kEncounterFormatVersion)
      throw InputError("unsupported encounter-set version " +
                       std::to_string(set.header.version) + " (expected " +
                       std::to_string(kEncounterFormatVersion) + ")");
    set.header.airframe_class =
        parse_airframe_class(head.at("airframe_class").get<std::string>());
    set.header.master_seed = head.at("master_seed").get<std::uint64_t>();
    set.header.scheme = scheme_from_json(head.at("scheme"));
    expected = head.at("count").get<std::size_t>();
  } catch (const json::exception& e) {
    throw InputError(path.string() + ": malformed header: " + e.what());
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
  std::size_t index = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      set.specs.push_back(spec_from_json(json::parse(line)));
    } catch (const std::exception& e) {
      throw InputError(path.string() + ": malformed record " + std::to_string(index) + ": " +
                       e.what());
    }
    ++index;
  }
  if (set.specs.size() != expected)
    throw InputError(path.string() + ": header announces " + std::to_string(expected) +
                     " records, found " + std::to_string(set.specs.size()));
  return set;
}

}  // namespace sbs
