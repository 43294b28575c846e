// sbsim: command-line front end.
//
// Exit codes: 0 success, 1 input error, 2 runtime error, 3 cells with no
// nominal NMAC (reports are still written).

#include <cstdio>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "sbs/charts.hpp"
#include "sbs/config.hpp"
#include "sbs/encounters.hpp"
#include "sbs/errors.hpp"
#include "sbs/kernels/kernels.hpp"
#include "sbs/report.hpp"
#include "sbs/runner.hpp"
#include "sbs/silhouette.hpp"
#include "sbs/units.hpp"

namespace fs = std::filesystem;
using namespace sbs;

namespace {

constexpr int kExitInput = 1;
constexpr int kExitRuntime = 2;
constexpr int kExitStatistical = 3;

struct Common {
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;
  std::string output;
  std::string config;
  std::string avoidance;
};

void add_avoidance(CLI::App* app, Common& c) {
  app->add_option("--avoidance", c.avoidance, "on or off (off: pilots never maneuver)")
      ->check(CLI::IsMember({"on", "off"}));
}

void add_common(CLI::App* app, Common& c) {
  app->add_option("--seed", c.seed, "Master seed");
  app->add_option("--jobs", c.jobs, "Worker threads")->check(CLI::PositiveNumber);
  app->add_option("--output", c.output, "Output file or directory");
}

SimConfig load(const Common& c) {
  SimConfig cfg = c.config.empty() ? SimConfig{} : load_config(c.config);
  if (c.seed) cfg.master_seed = *c.seed;
  if (c.jobs) cfg.jobs = *c.jobs;
  if (!c.output.empty()) cfg.output = c.output;
  if (c.avoidance == "off") {
    cfg.avoidance = false;
    cfg.pilot.p_comply = 0.0;
  } else if (c.avoidance == "on") {
    cfg.avoidance = true;
  }
  return cfg;
}

void note(const std::string& msg) { std::cerr << "sbsim: " << msg << '\n'; }

int write_sweep_outputs(const SweepResult& result, const fs::path& outdir, bool charts) {
  write_report_csv(outdir / "report.csv", result);
  write_report_json(outdir / "report.json", result);
  if (charts) emit_charts(result, outdir / "charts");
  for (const auto& c : result.cells)
    if (!c.valid) note("cell " + cell_stem(c.cell) + " invalid: " + c.diagnostic);
  if (result.invalid_cells() > 0) {
    note(std::to_string(result.invalid_cells()) + " cell(s) without nominal NMACs");
    return kExitStatistical;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"see-and-be-seen Monte Carlo simulator"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  // generate
  Common gen_c;
  std::string gen_class = "fixed-wing";
  std::size_t gen_count = 1000;
  auto* gen = app.add_subcommand("generate", "Generate an importance-sampled encounter set");
  add_common(gen, gen_c);
  gen->add_option("--config", gen_c.config, "Config file (JSON)");
  gen->add_option("--class", gen_class, "fixed-wing or rotary-wing");
  gen->add_option("--count", gen_count, "Number of encounters");

  // project-areas
  Common pa_c;
  std::string pa_mesh, pa_pin, pa_id;
  double pa_az = 15.0, pa_el = 15.0;
  int pa_res = kDefaultResolution;
  auto* pa = app.add_subcommand("project-areas", "Build a silhouette area table from a mesh");
  add_common(pa, pa_c);
  pa->add_option("--mesh", pa_mesh, "OBJ mesh")->required();
  pa->add_option("--az-step", pa_az, "Azimuth step, deg");
  pa->add_option("--el-step", pa_el, "Elevation step, deg");
  pa->add_option("--resolution", pa_res, "Raster pixels per edge");
  pa->add_option("--pin", pa_pin, "CSV of azimuth,elevation,area nodes to overwrite");
  pa->add_option("--id", pa_id, "Airframe id (default: mesh file stem)");

  // simulate
  Common sim_c;
  std::string sim_class = "fixed-wing", sim_dov = "weighted", sim_set;
  double sim_beta = 17000.0, sim_vis = 5.0;
  std::optional<double> sim_dt;
  std::optional<std::size_t> sim_count;
  auto* sim = app.add_subcommand("simulate", "Run one parameter cell");
  add_common(sim, sim_c);
  sim->add_option("--config", sim_c.config, "Config file (JSON)");
  sim->add_option("--class", sim_class, "fixed-wing or rotary-wing");
  sim->add_option("--dov", sim_dov, "uniform, weighted or stochastic");
  sim->add_option("--beta", sim_beta, "Search effectiveness");
  sim->add_option("--visibility", sim_vis, "Atmospheric visual range, nmi");
  sim->add_option("--encounters", sim_set, "Encounter-set file (default: generate)");
  sim->add_option("--count", sim_count, "Encounters to generate");
  sim->add_option("--dt", sim_dt, "Time step, s");
  add_avoidance(sim, sim_c);

  // sweep
  Common sw_c;
  std::optional<double> sw_dt;
  std::optional<std::size_t> sw_count;
  bool sw_outcomes = false, sw_no_charts = false;
  auto* sw = app.add_subcommand("sweep", "Run the full parameter grid");
  add_common(sw, sw_c);
  sw->add_option("--config", sw_c.config, "Config file (JSON)");
  sw->add_option("--count", sw_count, "Encounters per class");
  sw->add_option("--dt", sw_dt, "Time step, s");
  add_avoidance(sw, sw_c);
  sw->add_flag("--save-outcomes", sw_outcomes, "Write per-cell outcome records");
  sw->add_flag("--no-charts", sw_no_charts, "Skip SVG charts");

  // analyze
  Common an_c;
  std::vector<std::string> an_files;
  int an_resamples = 1000;
  auto* an = app.add_subcommand("analyze", "Recompute reports from outcome records");
  add_common(an, an_c);
  an->add_option("outcomes", an_files, "Outcome files")->required();
  an->add_option("--resamples", an_resamples, "Bootstrap resamples");

  // chart
  Common ch_c;
  std::string ch_report;
  auto* ch = app.add_subcommand("chart", "Render SVG charts from a report");
  add_common(ch, ch_c);
  ch->add_option("report", ch_report, "report.json")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitInput;
  }

  try {
    if (*gen) {
      SimConfig cfg = load(gen_c);
      if (gen_c.output.empty()) throw InputError("generate needs --output");
      const auto cls = parse_airframe_class(gen_class);
      EncounterBounds bounds;
      bounds.duration = cfg.duration;
      const auto specs = generate_set(cfg.scheme, cls, gen_count, cfg.master_seed, cfg.jobs, bounds);
      EncounterSetHeader h;
      h.scheme = cfg.scheme;
      h.master_seed = cfg.master_seed;
      h.airframe_class = cls;
      write_set(gen_c.output, h, specs);
      return 0;
    }
    if (*pa) {
      if (pa_c.output.empty()) throw InputError("project-areas needs --output");
      const TriangleMesh mesh = read_obj(pa_mesh);
      AreaTable table = build_area_table(mesh, pa_az, pa_el, pa_res);
      table.airframe_id = pa_id.empty() ? fs::path(pa_mesh).stem().string() : pa_id;
      if (!pa_pin.empty()) pin_nodes(table, read_area_nodes(pa_pin));
      write_area_table(pa_c.output, table);
      return 0;
    }
    if (*sim) {
      SimConfig cfg = load(sim_c);
      if (sim_dt) cfg.dt = *sim_dt;
      if (sim_count) cfg.encounter_count = *sim_count;
      const auto cls = parse_airframe_class(sim_class);
      if (!sim_set.empty()) cfg.encounter_paths[cls] = sim_set;
      cfg.validate();
      const SweepCell cell{cls, parse_dov_mode(sim_dov), sim_beta, sim_vis};
      const AreaTable table = read_area_table(cfg.area_table_path(cls));
      const auto specs = encounter_set(cfg, cls, cfg.jobs);
      const SimContext ctx = make_context(cfg, table, table);
      const CellParams params{sim_beta, units::nmi_to_ft(sim_vis), cell.dov_mode};
      auto outcomes = run_cells(specs, ctx, {params}, cfg.jobs);
      BootstrapOptions b;
      b.resamples = cfg.bootstrap_resamples;
      b.seed = cell_bootstrap_seed(cfg.master_seed, cell);
      SweepResult result;
      result.provenance.config_hash = config_hash(cfg);
      result.provenance.master_seed = cfg.master_seed;
      result.provenance.dt = cfg.dt;
      result.provenance.encounters.emplace_back(cls, specs.size());
      result.cells.push_back(reduce_cell(cell, outcomes[0], b));
      write_outcomes(cfg.output / (cell_stem(cell) + ".outcomes.jsonl"),
                     {cell, cfg.master_seed, outcomes[0]});
      return write_sweep_outputs(result, cfg.output, false);
    }
    if (*sw) {
      SimConfig cfg = load(sw_c);
      if (sw_dt) cfg.dt = *sw_dt;
      if (sw_count) cfg.encounter_count = *sw_count;
      cfg.validate();
      note("kernels: " + std::string(kernels::isa_name(kernels::active().isa)));
      SweepOptions opt;
      opt.jobs = cfg.jobs;
      opt.keep_outcomes = sw_outcomes;
      opt.log = note;
      const SweepResult result = run_sweep(cfg, opt);
      if (sw_outcomes)
        for (std::size_t i = 0; i < result.cells.size(); ++i)
          write_outcomes(cfg.output / "outcomes" / (cell_stem(result.cells[i].cell) + ".jsonl"),
                         {result.cells[i].cell, cfg.master_seed, result.outcomes[i]});
      return write_sweep_outputs(result, cfg.output, !sw_no_charts);
    }
    if (*an) {
      const fs::path outdir = an_c.output.empty() ? fs::path(".") : fs::path(an_c.output);
      SweepResult result;
      for (const auto& f : an_files) {
        const OutcomeFile of = read_outcomes(f);
        BootstrapOptions b;
        b.resamples = an_resamples;
        b.seed = cell_bootstrap_seed(an_c.seed.value_or(of.master_seed), of.cell);
        result.provenance.master_seed = of.master_seed;
        result.cells.push_back(reduce_cell(of.cell, of.outcomes, b));
      }
      return write_sweep_outputs(result, outdir, false);
    }
    if (*ch) {
      const fs::path outdir = ch_c.output.empty() ? fs::path("charts") : fs::path(ch_c.output);
      for (const auto& p : emit_charts(read_report_json(ch_report), outdir))
        std::cout << p.string() << '\n';
      return 0;
    }
  } catch (const InputError& e) {
    note(std::string("input error: ") + e.what());
    return kExitInput;
  } catch (const StatisticalError& e) {
    note(e.what());
    return kExitStatistical;
  } catch (const std::exception& e) {
    note(std::string("error: ") + e.what());
    return kExitRuntime;
  }
  return 0;
}
