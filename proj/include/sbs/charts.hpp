#pragma once

// Static SVG bar charts of sweep results.

#include <filesystem>
#include <vector>

#include "sbs/runner.hpp"

namespace sbs {

/// Stacked unresolved/induced bars with total CI whiskers, one group per
/// beta and one bar per visibility. Invalid cells are drawn hatched.
void write_risk_chart(const std::filesystem::path& path, const SweepResult& result,
                      AirframeClass airframe_class, DovMode dov_mode);

struct DeltaCell {
  double beta = 0.0;
  double visibility_nmi = 0.0;
  bool valid = false;
  double delta = 0.0;  // weighted total - uniform total
};

std::vector<DeltaCell> dov_deltas(const SweepResult& result, AirframeClass airframe_class);

/// Increase in total risk ratio from weighted dwell over uniform dwell.
void write_delta_chart(const std::filesystem::path& path, const SweepResult& result,
                       AirframeClass airframe_class);

/// All charts for a result; returns the files written.
std::vector<std::filesystem::path> emit_charts(const SweepResult& result,
                                               const std::filesystem::path& outdir);

}  // namespace sbs
