#pragma once

// Per-encounter simulation loop and parameter sweeps.

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sbs/acquisition.hpp"
#include "sbs/avoidance.hpp"
#include "sbs/config.hpp"
#include "sbs/encounters.hpp"
#include "sbs/metrics.hpp"
#include "sbs/silhouette.hpp"

namespace sbs {

inline constexpr const char* kVersion = "1.0.0";

/// Run parameters shared by both pilots.
struct CellParams {
  double beta = 17000.0;
  double visibility_ft = 18228.35;
  DovMode dov_mode = DovMode::weighted_scaling;
};

struct SimContext {
  double dt = 1.0;
  const AreaTable* ownship_table = nullptr;   // silhouette of the ownship airframe
  const AreaTable* intruder_table = nullptr;  // silhouette of the intruder airframe
  double acuity_arcmin = 1.0;
  FovLimits fov;
  DovConfig dov;  // mode is taken from the cell
  bool avoidance = true;
  PilotContext pilot;
  KinematicLimits limits;
  NmacCylinder nmac;
};

SimContext make_context(const SimConfig& config, const AreaTable& ownship_table,
                        const AreaTable& intruder_table);

enum class RunMode { nominal, mitigated };

struct PilotTrace {
  std::optional<double> t_acquired;  // first acquisition
  double time_in_range = 0.0;
  std::optional<double> t_command;
  bool maneuvered = false;
};

struct RunTrace {
  std::vector<AircraftState> ownship;  // empty unless requested
  std::vector<AircraftState> intruder;
  std::array<PilotTrace, 2> pilots;  // ownship pilot, intruder pilot
  NmacResult nmac;
  bool diverged = false;  // a pilot command changed the nominal flight
  bool finite = true;
  std::string diagnostic;
};

/// Simulates one encounter under any number of cells. The nominal
/// trajectories, geometry and silhouette areas are computed once; each cell
/// re-evaluates acquisition over them and only re-integrates the flights
/// after the first avoidance command.
class EncounterSimulator {
 public:
  EncounterSimulator(const EncounterSpec& spec, const SimContext& ctx);
  ~EncounterSimulator();
  EncounterSimulator(const EncounterSimulator&) = delete;
  EncounterSimulator& operator=(const EncounterSimulator&) = delete;

  const NmacResult& nominal_nmac() const;
  RunTrace run(const CellParams& cell, RunMode mode, bool keep_trajectories = false) const;
  EncounterOutcome outcome(const CellParams& cell) const;

 private:
  struct Cache;
  const EncounterSpec* spec_;
  const SimContext* ctx_;
  std::unique_ptr<Cache> cache_;
};

RunTrace simulate_run(const EncounterSpec& spec, const SimContext& ctx, const CellParams& cell,
                      RunMode mode, bool keep_trajectories = true);

/// Nominal and mitigated runs of one encounter, paired on the same draws.
EncounterOutcome simulate_encounter(const EncounterSpec& spec, const SimContext& ctx,
                                    const CellParams& cell);

/// outcomes[c][i] for cell c and encounter i. Deterministic for any jobs.
std::vector<std::vector<EncounterOutcome>> run_cells(const std::vector<EncounterSpec>& specs,
                                                     const SimContext& ctx,
                                                     const std::vector<CellParams>& cells,
                                                     int jobs);

struct SweepCell {
  AirframeClass airframe_class = AirframeClass::fixed_wing;
  DovMode dov_mode = DovMode::uniform;
  double beta = 0.0;
  double visibility_nmi = 0.0;
};

struct CellReport {
  SweepCell cell;
  bool valid = false;
  std::string diagnostic;
  RiskRatioReport report;
};

struct Provenance {
  std::uint64_t config_hash = 0;
  std::uint64_t master_seed = 0;
  std::string version = kVersion;
  double dt = 1.0;
  std::vector<std::pair<AirframeClass, std::size_t>> encounters;  // per class
};

struct SweepResult {
  Provenance provenance;
  std::vector<CellReport> cells;  // class, dov mode, beta, visibility order
  std::vector<std::vector<EncounterOutcome>> outcomes;  // parallel to cells when kept
  std::size_t invalid_cells() const;
};

struct SweepOptions {
  int jobs = 1;
  bool keep_outcomes = false;
  std::function<void(const std::string&)> log;
};

/// Encounter set of a class: read from the configured path or generated.
std::vector<EncounterSpec> encounter_set(const SimConfig& config, AirframeClass c, int jobs);

/// Reduces outcomes of one cell to a report; a zero denominator marks the
/// cell invalid instead of throwing.
CellReport reduce_cell(const SweepCell& cell, const std::vector<EncounterOutcome>& outcomes,
                       const BootstrapOptions& bootstrap);

SweepResult run_sweep(const SimConfig& config, const SweepOptions& options = {});

/// Bootstrap seed of a sweep cell.
std::uint64_t cell_bootstrap_seed(std::uint64_t master_seed, const SweepCell& cell);

}  // namespace sbs
