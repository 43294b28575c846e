#pragma once

// Report (CSV/JSON) and outcome-record (JSONL) files. Numbers are written in
// shortest round-trip form so identical results give identical bytes.

#include <filesystem>
#include <string>
#include <vector>

#include "sbs/runner.hpp"

namespace sbs {

std::string format_number(double v);

void write_report_csv(const std::filesystem::path& path, const SweepResult& result);
void write_report_json(const std::filesystem::path& path, const SweepResult& result);
SweepResult read_report_json(const std::filesystem::path& path);

inline constexpr int kOutcomeFormatVersion = 1;

struct OutcomeFile {
  SweepCell cell;
  std::uint64_t master_seed = 0;
  std::vector<EncounterOutcome> outcomes;
};

void write_outcomes(const std::filesystem::path& path, const OutcomeFile& file);
OutcomeFile read_outcomes(const std::filesystem::path& path);

/// File stem used for per-cell outputs, e.g. "fixed-wing_uniform_b17000_r5".
std::string cell_stem(const SweepCell& cell);

}  // namespace sbs
