#include "sbs/report.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include "json.hpp"

#include "sbs/errors.hpp"

namespace sbs {

using json = nlohmann::ordered_json;

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  std::array<char, 64> buf;
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw RuntimeError("cannot write " + path.string());
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw RuntimeError("write failed for " + path.string());
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::uint64_t parse_hex64(const std::string& s) {
  std::uint64_t v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v, 16);
  if (res.ec != std::errc()) throw InputError("bad hex value '" + s + "'");
  return v;
}

// Doubles that may be NaN travel as strings in JSON.
json num(double v) { return std::isfinite(v) ? json(v) : json(format_number(v)); }
double get_num(const json& j) {
  if (j.is_string()) return std::nan("");
  return j.get<double>();
}

json interval(const Interval& i) { return json::array({num(i.lo), num(i.hi)}); }
Interval get_interval(const json& j) { return {get_num(j.at(0)), get_num(j.at(1))}; }

json cell_json(const SweepCell& c) {
  return json{{"airframe_class", to_string(c.airframe_class)},
              {"dov_mode", to_string(c.dov_mode)},
              {"beta", c.beta},
              {"visibility_nmi", c.visibility_nmi}};
}

SweepCell cell_from_json(const json& j) {
  SweepCell c;
  c.airframe_class = parse_airframe_class(j.at("airframe_class").get<std::string>());
  c.dov_mode = parse_dov_mode(j.at("dov_mode").get<std::string>());
  c.beta = j.at("beta").get<double>();
  c.visibility_nmi = j.at("visibility_nmi").get<double>();
  return c;
}

json opt_num(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }
std::optional<double> get_opt(const json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

}  // namespace

std::string cell_stem(const SweepCell& c) {
  return std::string(to_string(c.airframe_class)) + "_" + std::string(to_string(c.dov_mode)) +
         "_b" + format_number(c.beta) + "_r" + format_number(c.visibility_nmi);
}

void write_report_csv(const std::filesystem::path& path, const SweepResult& result) {
  auto out = open_out(path);
  out << "airframe_class,dov_mode,beta,visibility_nmi,valid,n_encounters,n_excluded,"
         "weighted_nominal_nmacs,weighted_unresolved,weighted_induced,total,unresolved,induced,"
         "total_ci_lo,total_ci_hi,unresolved_ci_lo,unresolved_ci_hi,induced_ci_lo,induced_ci_hi\n";
  for (const auto& c : result.cells) {
    const auto& r = c.report;
    auto v = [&](double x) { return c.valid ? format_number(x) : std::string(); };
    out << to_string(c.cell.airframe_class) << ',' << to_string(c.cell.dov_mode) << ','
        << format_number(c.cell.beta) << ',' << format_number(c.cell.visibility_nmi) << ','
        << (c.valid ? "true" : "false") << ',' << r.n_encounters << ',' << r.n_excluded << ','
        << format_number(r.weighted_nominal_nmacs) << ',' << format_number(r.weighted_unresolved)
        << ',' << format_number(r.weighted_induced) << ',' << v(r.total) << ','
        << v(r.unresolved) << ',' << v(r.induced) << ',' << v(r.ci_total.lo) << ','
        << v(r.ci_total.hi) << ',' << v(r.ci_unresolved.lo) << ',' << v(r.ci_unresolved.hi)
        << ',' << v(r.ci_induced.lo) << ',' << v(r.ci_induced.hi) << '\n';
  }
  finish(out, path);
}

void write_report_json(const std::filesystem::path& path, const SweepResult& result) {
  json enc = json::object();
  for (const auto& [cls, n] : result.provenance.encounters) enc[std::string(to_string(cls))] = n;
  json prov{{"config_hash", hex64(result.provenance.config_hash)},
            {"master_seed", result.provenance.master_seed},
            {"version", result.provenance.version},
            {"dt", result.provenance.dt},
            {"encounters", enc}};
  json cells = json::array();
  for (const auto& c : result.cells) {
    const auto& r = c.report;
    json j = cell_json(c.cell);
    j["valid"] = c.valid;
    if (!c.valid) j["diagnostic"] = c.diagnostic;
    j["n_encounters"] = r.n_encounters;
    j["n_excluded"] = r.n_excluded;
    j["weighted_nominal_nmacs"] = r.weighted_nominal_nmacs;
    j["weighted_unresolved"] = r.weighted_unresolved;
    j["weighted_induced"] = r.weighted_induced;
    if (c.valid) {
      j["total"] = r.total;
      j["unresolved"] = r.unresolved;
      j["induced"] = r.induced;
      j["ci_95"] = {{"total", interval(r.ci_total)},
                    {"unresolved", interval(r.ci_unresolved)},
                    {"induced", interval(r.ci_induced)}};
      j["bootstrap_resamples"] = r.bootstrap_resamples;
    }
    cells.push_back(std::move(j));
  }
  auto out = open_out(path);
  out << json{{"format", "sbs-report"}, {"provenance", prov}, {"cells", cells}}.dump(2) << '\n';
  finish(out, path);
}

SweepResult read_report_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open report " + path.string());
  SweepResult res;
  try {
    const json j = json::parse(in);
    if (j.value("format", "") != "sbs-report")
      throw InputError(path.string() + " is not an sbs report");
    const auto& p = j.at("provenance");
    res.provenance.config_hash = parse_hex64(p.at("config_hash").get<std::string>());
    res.provenance.master_seed = p.at("master_seed").get<std::uint64_t>();
    res.provenance.version = p.at("version").get<std::string>();
    res.provenance.dt = p.value("dt", 1.0);
    for (const auto& [k, v] : p.at("encounters").items())
      res.provenance.encounters.emplace_back(parse_airframe_class(k), v.get<std::size_t>());
    for (const auto& c : j.at("cells")) {
      CellReport r;
      r.cell = cell_from_json(c);
      r.valid = c.at("valid").get<bool>();
      r.diagnostic = c.value("diagnostic", "");
      r.report.n_encounters = c.at("n_encounters").get<std::size_t>();
      r.report.n_excluded = c.at("n_excluded").get<std::size_t>();
      r.report.weighted_nominal_nmacs = c.at("weighted_nominal_nmacs").get<double>();
      r.report.weighted_unresolved = c.at("weighted_unresolved").get<double>();
      r.report.weighted_induced = c.at("weighted_induced").get<double>();
      if (r.valid) {
        r.report.total = c.at("total").get<double>();
        r.report.unresolved = c.at("unresolved").get<double>();
        r.report.induced = c.at("induced").get<double>();
        const auto& ci = c.at("ci_95");
        r.report.ci_total = get_interval(ci.at("total"));
        r.report.ci_unresolved = get_interval(ci.at("unresolved"));
        r.report.ci_induced = get_interval(ci.at("induced"));
        r.report.bootstrap_resamples = c.value("bootstrap_resamples", 0);
      }
      res.cells.push_back(std::move(r));
    }
  } catch (const json::exception& e) {
    throw InputError("malformed report " + path.string() + ": " + e.what());
  }
  return res;
}

void write_outcomes(const std::filesystem::path& path, const OutcomeFile& file) {
  auto out = open_out(path);
  json head = cell_json(file.cell);
  head = json{{"format", "sbs-outcomes"},
              {"version", kOutcomeFormatVersion},
              {"master_seed", file.master_seed},
              {"cell", head},
              {"count", file.outcomes.size()}};
  out << head.dump() << '\n';
  for (const auto& o : file.outcomes) {
    json j{{"id", o.id},
           {"weight", o.weight},
           {"nominal_nmac", o.nominal_nmac},
           {"mitigated_nmac", o.mitigated_nmac},
           {"nominal_min_sep", {o.nominal_min_sep.horizontal, o.nominal_min_sep.vertical,
                                o.nominal_min_sep.t}},
           {"mitigated_min_sep", {o.mitigated_min_sep.horizontal, o.mitigated_min_sep.vertical,
                                  o.mitigated_min_sep.t}},
           {"acquisition_times", {opt_num(o.acquisition_times[0]), opt_num(o.acquisition_times[1])}},
           {"maneuvered", {o.maneuvered[0], o.maneuvered[1]}},
           {"excluded", o.excluded}};
    if (o.excluded) j["diagnostic"] = o.diagnostic;
    out << j.dump() << '\n';
  }
  finish(out, path);
}

OutcomeFile read_outcomes(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open outcome file " + path.string());
  OutcomeFile f;
  std::string line;
  std::size_t lineno = 0;
  try {
    if (!std::getline(in, line)) throw InputError(path.string() + " is empty");
    ++lineno;
    const json head = json::parse(line);
    if (head.value("format", "") != "sbs-outcomes")
      throw InputError(path.string() + " is not an outcome file");
    const int version = head.at("version").get<int>();
    if (version != kOutcomeFormatVersion)
      throw InputError(path.string() + ": unsupported outcome format version " +
                       std::to_string(version));
    f.master_seed = head.at("master_seed").get<std::uint64_t>();
    f.cell = cell_from_json(head.at("cell"));
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty()) continue;
      const json j = json::parse(line);
      EncounterOutcome o;
      o.id = j.at("id").get<std::uint64_t>();
      o.weight = j.at("weight").get<double>();
      o.nominal_nmac = j.at("nominal_nmac").get<bool>();
      o.mitigated_nmac = j.at("mitigated_nmac").get<bool>();
      const auto& n = j.at("nominal_min_sep");
      o.nominal_min_sep = {n.at(0).get<double>(), n.at(1).get<double>(), n.at(2).get<double>()};
      const auto& m = j.at("mitigated_min_sep");
      o.mitigated_min_sep = {m.at(0).get<double>(), m.at(1).get<double>(), m.at(2).get<double>()};
      o.acquisition_times = {get_opt(j.at("acquisition_times").at(0)),
                             get_opt(j.at("acquisition_times").at(1))};
      o.maneuvered = {j.at("maneuvered").at(0).get<bool>(), j.at("maneuvered").at(1).get<bool>()};
      o.excluded = j.at("excluded").get<bool>();
      o.diagnostic = j.value("diagnostic", "");
      if (!(o.weight > 0.0)) throw InputError("weight must be positive");
      f.outcomes.push_back(std::move(o));
    }
  } catch (const json::exception& e) {
    throw InputError(path.string() + ": malformed record " + std::to_string(lineno) + ": " +
                     e.what());
  }
  return f;
}

}  // namespace sbs
