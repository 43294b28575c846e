#include "sbs/runner.hpp"

#include <atomic>
#include <bit>
#include <cmath>
#include <map>
#include <mutex>
#include <thread>

#include "sbs/errors.hpp"
#include "sbs/kernels/kernels.hpp"
#include "sbs/units.hpp"

namespace sbs {

namespace {

struct View {
  double range = 0.0;
  double area = 0.0;
  double bearing = 0.0;
  bool in_fov = false;
  bool in_range = false;
  bool gate = false;  // rate is non-zero only when set
};

View view_of(const AircraftState& viewer, const AircraftState& target, const AreaTable& table,
             const SimContext& ctx) {
  View v;
  const RelativeGeometry g = relative_geometry(viewer, target);
  v.range = g.range;
  if (g.coincident) return v;
  v.area = lookup_area(table, g.target_view);
  v.bearing = g.rel_bearing;
  v.in_fov = in_fov(ctx.fov, g.rel_bearing, g.rel_elevation);
  v.in_range = angular_size_arcmin(v.area, v.range) >= ctx.acuity_arcmin;
  v.gate = v.in_fov && v.in_range;
  return v;
}

bool finite_state(const AircraftState& s) {
  return std::isfinite(s.east) && std::isfinite(s.north) && std::isfinite(s.altitude) &&
         std::isfinite(s.ground_speed) && std::isfinite(s.heading) &&
         std::isfinite(s.vertical_rate);
}

std::uint64_t pilot_stream(std::uint64_t seed, std::size_t pilot, StreamPurpose purpose) {
  return stream_seed({seed, static_cast<std::uint64_t>(pilot), static_cast<std::uint64_t>(purpose)});
}

}  // namespace

SimContext make_context(const SimConfig& c, const AreaTable& ownship_table,
                        const AreaTable& intruder_table) {
  SimContext ctx;
  ctx.dt = c.dt;
  ctx.ownship_table = &ownship_table;
  ctx.intruder_table = &intruder_table;
  ctx.acuity_arcmin = c.acuity_arcmin;
  ctx.fov = c.fov;
  ctx.dov.partitions = c.dov_partitions;
  ctx.dov.dwell_period = c.dwell_period;
  ctx.avoidance = c.avoidance;
  ctx.pilot.well_clear = c.well_clear;
  ctx.pilot.response = c.pilot;
  ctx.limits = c.limits;
  ctx.nmac = c.nmac;
  return ctx;
}

// ---------------------------------------------------------------------------
// Nominal cache

struct EncounterSimulator::Cache {
  std::size_t steps = 0;
  std::array<std::vector<AircraftState>, 2> states;
  std::array<std::vector<std::size_t>, 2> next_event;
  std::array<std::vector<std::optional<ManeuverCommand>>, 2> active;
  // Indexed by viewing pilot: 0 sees the intruder, 1 sees the ownship.
  std::array<std::vector<View>, 2> views;
  std::array<std::vector<double>, 2> range, area, weighted_factor;
  NmacResult nmac;
  bool finite = true;
  std::string diagnostic;
};

EncounterSimulator::EncounterSimulator(const EncounterSpec& spec, const SimContext& ctx)
    : spec_(&spec), ctx_(&ctx), cache_(std::make_unique<Cache>()) {
  if (ctx.ownship_table == nullptr || ctx.intruder_table == nullptr)
    throw InputError("simulation context lacks area tables");
  if (!(ctx.dt > 0.0)) throw InputError("dt must be positive");
  Cache& c = *cache_;
  c.steps = static_cast<std::size_t>(std::llround(spec.duration / ctx.dt));
  const std::array<const ScriptedTrajectory*, 2> scripts{&spec.ownship, &spec.intruder};
  for (std::size_t q = 0; q < 2; ++q) {
    ScriptedFlight f(*scripts[q], ctx.limits);
    auto& st = c.states[q];
    st.reserve(c.steps + 1);
    st.push_back(f.state());
    c.next_event[q].push_back(f.next_event());
    c.active[q].push_back(f.active());
    for (std::size_t k = 0; k < c.steps; ++k) {
      f.advance(ctx.dt);
      st.push_back(f.state());
      c.next_event[q].push_back(f.next_event());
      c.active[q].push_back(f.active());
      if (c.finite && !finite_state(f.state())) {
        c.finite = false;
        c.diagnostic = "non-finite nominal state at t=" + std::to_string(f.state().t);
      }
    }
  }
  DovConfig weighted = ctx.dov;
  weighted.mode = DovMode::weighted_scaling;
  for (std::size_t p = 0; p < 2; ++p) {
    const AreaTable& table = p == 0 ? *ctx.intruder_table : *ctx.ownship_table;
    auto& vs = c.views[p];
    vs.reserve(c.steps + 1);
    for (std::size_t k = 0; k <= c.steps; ++k) {
      const View v = c.finite ? view_of(c.states[p][k], c.states[1 - p][k], table, ctx) : View{};
      vs.push_back(v);
      c.range[p].push_back(v.range);
      c.area[p].push_back(v.area);
      c.weighted_factor[p].push_back(
          v.gate ? dov_factor(weighted, v.bearing, c.states[0][k].t).factor : 0.0);
    }
  }
  if (c.finite) c.nmac = detect_nmac(c.states[0], c.states[1], ctx.nmac);
}

EncounterSimulator::~EncounterSimulator() = default;

const NmacResult& EncounterSimulator::nominal_nmac() const { return cache_->nmac; }

RunTrace EncounterSimulator::run(const CellParams& cell, RunMode mode,
                                 bool keep_trajectories) const {
  const Cache& c = *cache_;
  const SimContext& ctx = *ctx_;
  const EncounterSpec& spec = *spec_;
  RunTrace trace;
  if (!c.finite) {
    trace.finite = false;
    trace.diagnostic = c.diagnostic;
    return trace;
  }
  const std::size_t K = c.steps;
  const double dt = ctx.dt;
  const auto& kern = kernels::active();

  DovConfig dov = ctx.dov;
  dov.mode = cell.dov_mode;
  std::array<std::optional<ScanSchedule>, 2> schedules;
  if (dov.mode == DovMode::stochastic_scan)
    for (std::size_t p = 0; p < 2; ++p)
      schedules[p].emplace(dov, pilot_stream(spec.seed, p, StreamPurpose::scan));

  auto factor_at = [&](std::size_t p, const View& v, double t, std::size_t k, bool cached) {
    if (!v.gate) return 0.0;
    switch (dov.mode) {
      case DovMode::uniform: return 1.0;
      case DovMode::weighted_scaling:
        return cached ? c.weighted_factor[p][k] : dov_factor(dov, v.bearing, t).factor;
      case DovMode::stochastic_scan: return dov_factor(dov, v.bearing, t, &*schedules[p]).factor;
    }
    return 0.0;
  };

  // Rates along the nominal flight for this cell.
  std::array<std::vector<double>, 2> lam;
  {
    std::vector<double> lanes(K + 1);
    for (std::size_t p = 0; p < 2; ++p) {
      for (std::size_t k = 0; k <= K; ++k)
        lanes[k] = cell.beta * factor_at(p, c.views[p][k], c.states[0][k].t, k, true);
      lam[p].resize(K + 1);
      kern.rate_batch(lanes.data(), c.area[p].data(), c.range[p].data(), cell.visibility_ft,
                      lam[p].data(), K + 1);
    }
  }
  auto live_rate = [&](std::size_t p, const View& v, double t) {
    const double b = cell.beta * factor_at(p, v, t, 0, false);
    double out = 0.0;
    kern.rate_batch(&b, &v.area, &v.range, cell.visibility_ft, &out, 1);
    return out;
  };

  std::array<Rng, 2> acq_rng{Rng(pilot_stream(spec.seed, 0, StreamPurpose::acquisition)),
                             Rng(pilot_stream(spec.seed, 1, StreamPurpose::acquisition))};
  std::array<Rng, 2> resp_rng{Rng(pilot_stream(spec.seed, 0, StreamPurpose::response)),
                              Rng(pilot_stream(spec.seed, 1, StreamPurpose::response))};
  std::array<AcquisitionState, 2> acq{initial_acquisition_state(acq_rng[0]),
                                      initial_acquisition_state(acq_rng[1])};
  std::array<PilotState, 2> pilots{};
  const bool respond = mode == RunMode::mitigated && ctx.avoidance;

  const std::array<const ScriptedTrajectory*, 2> scripts{&spec.ownship, &spec.intruder};
  std::array<std::optional<ScriptedFlight>, 2> flights;
  std::array<std::vector<AircraftState>, 2> live;  // full series once diverged

  std::array<AircraftState, 2> cur{c.states[0][0], c.states[1][0]};
  std::array<double, 2> lam_cur{lam[0][0], lam[1][0]};

  for (std::size_t k = 0; k < K; ++k) {
    const double t = c.states[0][k].t;
    if (respond) {
      for (std::size_t p = 0; p < 2; ++p) {
        PilotDecision d = pilot_step(pilots[p], acq[p], cur[p], cur[1 - p], ctx.pilot,
                                     resp_rng[p], t);
        pilots[p] = d.state;
        if (!d.command) continue;
        if (!trace.diverged) {
          trace.diverged = true;
          for (std::size_t q = 0; q < 2; ++q) {
            flights[q].emplace(*scripts[q], ctx.limits);
            flights[q]->reset_state(c.states[q][k], c.next_event[q][k], c.active[q][k]);
            live[q].assign(c.states[q].begin(), c.states[q].begin() + k + 1);
            live[q].reserve(K + 1);
          }
        }
        flights[p]->override_with(clamp_command(*d.command, ctx.limits));
        trace.pilots[p].maneuvered = true;
        trace.pilots[p].t_command = t;
      }
    }

    std::array<AircraftState, 2> next;
    std::array<double, 2> lam_next;
    std::array<View, 2> vnext;
    if (!trace.diverged) {
      next = {c.states[0][k + 1], c.states[1][k + 1]};
      for (std::size_t p = 0; p < 2; ++p) {
        lam_next[p] = lam[p][k + 1];
        vnext[p] = c.views[p][k + 1];
      }
    } else {
      for (std::size_t q = 0; q < 2; ++q) {
        flights[q]->advance(dt);
        next[q] = flights[q]->state();
        live[q].push_back(next[q]);
      }
      if (!finite_state(next[0]) || !finite_state(next[1])) {
        trace.finite = false;
        trace.diagnostic = "non-finite state after maneuver at t=" + std::to_string(next[0].t);
        return trace;
      }
      vnext[0] = view_of(next[0], next[1], *ctx.intruder_table, ctx);
      vnext[1] = view_of(next[1], next[0], *ctx.ownship_table, ctx);
      for (std::size_t p = 0; p < 2; ++p) lam_next[p] = live_rate(p, vnext[p], next[0].t);
    }

    for (std::size_t p = 0; p < 2; ++p) {
      AcquisitionStep step;
      step.t0 = t;
      step.dt = dt;
      step.lambda = 0.5 * (lam_cur[p] + lam_next[p]);
      step.in_fov = vnext[p].in_fov;
      step.in_range = vnext[p].in_range;
      acq[p] = step_acquisition(acq[p], step, acq_rng[p]);
      if (acq[p].acquired && !trace.pilots[p].t_acquired)
        trace.pilots[p].t_acquired = acq[p].t_acquired;
    }
    cur = next;
    lam_cur = lam_next;
  }
  for (std::size_t p = 0; p < 2; ++p) trace.pilots[p].time_in_range = acq[p].time_in_range;

  if (trace.diverged) {
    trace.nmac = detect_nmac(live[0], live[1], ctx.nmac);
    if (keep_trajectories) {
      trace.ownship = std::move(live[0]);
      trace.intruder = std::move(live[1]);
    }
  } else {
    trace.nmac = c.nmac;
    if (keep_trajectories) {
      trace.ownship = c.states[0];
      trace.intruder = c.states[1];
    }
  }
  return trace;
}

EncounterOutcome EncounterSimulator::outcome(const CellParams& cell) const {
  EncounterOutcome o;
  o.id = spec_->id;
  o.weight = spec_->weight;
  if (!cache_->finite) {
    o.excluded = true;
    o.diagnostic = cache_->diagnostic;
    return o;
  }
  o.nominal_nmac = cache_->nmac.nmac;
  o.nominal_min_sep = cache_->nmac.min_sep;
  const RunTrace m = run(cell, RunMode::mitigated);
  if (!m.finite) {
    o.excluded = true;
    o.diagnostic = m.diagnostic;
    return o;
  }
  o.mitigated_nmac = m.nmac.nmac;
  o.mitigated_min_sep = m.nmac.min_sep;
  for (std::size_t p = 0; p < 2; ++p) {
    o.acquisition_times[p] = m.pilots[p].t_acquired;
    o.maneuvered[p] = m.pilots[p].maneuvered;
  }
  return o;
}

RunTrace simulate_run(const EncounterSpec& spec, const SimContext& ctx, const CellParams& cell,
                      RunMode mode, bool keep_trajectories) {
  EncounterSimulator sim(spec, ctx);
  return sim.run(cell, mode, keep_trajectories);
}

EncounterOutcome simulate_encounter(const EncounterSpec& spec, const SimContext& ctx,
                                    const CellParams& cell) {
  EncounterSimulator sim(spec, ctx);
  return sim.outcome(cell);
}

// ---------------------------------------------------------------------------
// Batches

std::vector<std::vector<EncounterOutcome>> run_cells(const std::vector<EncounterSpec>& specs,
                                                     const SimContext& ctx,
                                                     const std::vector<CellParams>& cells,
                                                     int jobs) {
  std::vector<std::vector<EncounterOutcome>> out(cells.size(),
                                                 std::vector<EncounterOutcome>(specs.size()));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < specs.size(); i = next++) {
      try {
        EncounterSimulator sim(specs[i], ctx);
        for (std::size_t c = 0; c < cells.size(); ++c) out[c][i] = sim.outcome(cells[c]);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  std::vector<std::jthread> pool;
  for (int w = 1; w < std::max(1, jobs); ++w) pool.emplace_back(worker);
  worker();
  pool.clear();
  if (failure) std::rethrow_exception(failure);
  return out;
}

std::size_t SweepResult::invalid_cells() const {
  std::size_t n = 0;
  for (const auto& c : cells) n += c.valid ? 0 : 1;
  return n;
}

std::uint64_t cell_bootstrap_seed(std::uint64_t master_seed, const SweepCell& cell) {
  return stream_seed({master_seed, static_cast<std::uint64_t>(StreamPurpose::bootstrap),
                      static_cast<std::uint64_t>(cell.airframe_class),
                      static_cast<std::uint64_t>(cell.dov_mode),
                      std::bit_cast<std::uint64_t>(cell.beta),
                      std::bit_cast<std::uint64_t>(cell.visibility_nmi)});
}

CellReport reduce_cell(const SweepCell& cell, const std::vector<EncounterOutcome>& outcomes,
                       const BootstrapOptions& bootstrap) {
  CellReport r;
  r.cell = cell;
  try {
    r.report = risk_ratio(outcomes, bootstrap);
    r.valid = true;
  } catch (const StatisticalError& e) {
    r.valid = false;
    r.diagnostic = e.what();
    r.report.n_encounters = outcomes.size();
    for (const auto& o : outcomes) {
      r.report.n_excluded += o.excluded ? 1 : 0;
      if (!o.excluded && o.mitigated_nmac) r.report.weighted_induced += o.weight;
    }
    r.report.weighted_unresolved = 0.0;
  }
  return r;
}

std::vector<EncounterSpec> encounter_set(const SimConfig& config, AirframeClass c, int jobs) {
  if (auto it = config.encounter_paths.find(c); it != config.encounter_paths.end()) {
    EncounterSet set = read_set(it->second);
    if (set.header.airframe_class != c)
      throw InputError("encounter set " + it->second.string() + " holds " +
                       std::string(to_string(set.header.airframe_class)) + " encounters, not " +
                       std::string(to_string(c)));
    return std::move(set.specs);
  }
  EncounterBounds bounds;
  bounds.duration = config.duration;
  return generate_set(config.scheme, c, config.encounter_count, config.master_seed, jobs, bounds);
}

SweepResult run_sweep(const SimConfig& config, const SweepOptions& options) {
  config.validate();
  SweepResult result;
  result.provenance.config_hash = config_hash(config);
  result.provenance.master_seed = config.master_seed;
  result.provenance.dt = config.dt;
  auto log = [&](const std::string& msg) {
    if (options.log) options.log(msg);
  };

  std::map<std::filesystem::path, AreaTable> tables;
  for (AirframeClass cls : config.classes) {
    const auto path = config.area_table_path(cls);
    if (!tables.count(path)) tables.emplace(path, read_area_table(path));
    const AreaTable& table = tables.at(path);

    log("generating " + std::string(to_string(cls)) + " encounters");
    const auto specs = encounter_set(config, cls, options.jobs);
    result.provenance.encounters.emplace_back(cls, specs.size());

    std::vector<SweepCell> cells;
    std::vector<CellParams> params;
    for (DovMode mode : config.dov_modes)
      for (double beta : config.beta_set)
        for (double r_nmi : config.visibility_set_nmi) {
          cells.push_back({cls, mode, beta, r_nmi});
          params.push_back({beta, units::nmi_to_ft(r_nmi), mode});
        }
    const SimContext ctx = make_context(config, table, table);
    log("simulating " + std::to_string(specs.size()) + " encounters x " +
        std::to_string(cells.size()) + " cells");
    auto outcomes = run_cells(specs, ctx, params, options.jobs);
    for (std::size_t i = 0; i < cells.size(); ++i) {
      BootstrapOptions b;
      b.resamples = config.bootstrap_resamples;
      b.seed = cell_bootstrap_seed(config.master_seed, cells[i]);
      result.cells.push_back(reduce_cell(cells[i], outcomes[i], b));
      if (options.keep_outcomes) result.outcomes.push_back(std::move(outcomes[i]));
    }
  }
  return result;
}

}  // namespace sbs
