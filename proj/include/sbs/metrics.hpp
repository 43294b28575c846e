#pragma once

// NMAC detection and importance-weighted risk ratios.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>

#include "sbs/dynamics.hpp"

namespace sbs {

struct NmacCylinder {
  double horizontal = 500.0;  // ft
  double vertical = 100.0;    // ft
};

struct MinSeparation {
  double horizontal = 0.0;  // ft
  double vertical = 0.0;    // ft, absolute
  double t = 0.0;           // s
};

struct NmacResult {
  bool nmac = false;
  std::optional<double> t_first;
  MinSeparation min_sep;
};

/// NMAC iff at some instant the horizontal separation is below the cylinder
/// radius and the vertical separation below its half-height. Between
/// samples the relative position is interpolated linearly; the test is exact
/// for that interpolant. Throws InputError for mismatched or empty series.
NmacResult detect_nmac(std::span<const AircraftState> own, std::span<const AircraftState> tgt,
                       const NmacCylinder& cylinder = {});

struct EncounterOutcome {
  std::uint64_t id = 0;
  bool nominal_nmac = false;
  bool mitigated_nmac = false;
  double weight = 1.0;
  MinSeparation nominal_min_sep;
  MinSeparation mitigated_min_sep;
  std::array<std::optional<double>, 2> acquisition_times;  // ownship, intruder pilot
  std::array<bool, 2> maneuvered{false, false};
  bool excluded = false;
  std::string diagnostic;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double half_width() const { return 0.5 * (hi - lo); }
};

struct RiskRatioReport {
  double total = 0.0;
  double unresolved = 0.0;
  double induced = 0.0;
  double weighted_nominal_nmacs = 0.0;
  double weighted_unresolved = 0.0;
  double weighted_induced = 0.0;
  std::size_t n_encounters = 0;
  std::size_t n_excluded = 0;
  Interval ci_total;
  Interval ci_unresolved;
  Interval ci_induced;
  int bootstrap_resamples = 0;
};

struct BootstrapOptions {
  int resamples = 1000;
  std::uint64_t seed = 0;
  double confidence = 0.95;
};

/// Weighted risk ratio with unresolved/induced decomposition and percentile
/// bootstrap intervals. Excluded outcomes are counted but not used. Throws
/// StatisticalError when no weighted nominal NMAC is present.
RiskRatioReport risk_ratio(std::span<const EncounterOutcome> outcomes,
                           const BootstrapOptions& options = {});

/// Percentile bootstrap interval for total(a) - total(b) where a[i] and b[i]
/// are outcomes of the same encounter under two configurations.
Interval paired_total_difference_ci(std::span<const EncounterOutcome> a,
                                    std::span<const EncounterOutcome> b,
                                    const BootstrapOptions& options = {});

/// P(MAC) = risk ratio * P(MAC | NMAC).
double mac_probability(double risk_ratio, double p_mac_given_nmac);

}  // namespace sbs
