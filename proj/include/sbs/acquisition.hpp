#pragma once

// Visual acquisition as a nonhomogeneous Poisson process.
//
// The hazard rate is
//   lambda = beta * (A / r^2) * exp(-2.996 r / R)
// with search effectiveness beta, projected target area A, range r and
// atmospheric visual range R. It is gated to zero when the target subtends
// less than the acuity limit or lies outside the cockpit field of view. The
// first acquisition time is sampled by inverse CDF: one uniform draw u per
// pilot, acquisition when the cumulative probability reaches u.

#include <optional>
#include <string_view>
#include <vector>

#include "sbs/rng.hpp"

namespace sbs {

/// Cockpit field of view, degrees (positive magnitudes).
struct FovLimits {
  double up = 15.0;
  double down = 17.0;
  double left = 120.0;
  double right = 80.0;

  void validate() const;
};

enum class DovMode { uniform, weighted_scaling, stochastic_scan };

std::string_view to_string(DovMode mode);
DovMode parse_dov_mode(std::string_view text);

/// A direction-of-view sector in relative bearing (negative = left).
struct DovPartition {
  double lower_az;
  double upper_az;
  double weight;
};

struct DovConfig {
  std::vector<DovPartition> partitions = {
      {-120.0, -60.0, 3.5}, {-60.0, 0.0, 5.75}, {0.0, 60.0, 5.75}, {60.0, 90.0, 3.5}};
  DovMode mode = DovMode::weighted_scaling;
  double dwell_period = 2.0;  // s, stochastic scan only

  void validate() const;
};

struct AcquisitionParams {
  double beta = 17000.0;             // acquisitions / (sr * s)
  double visibility_ft = 18228.35;   // atmospheric visual range R
  double acuity_arcmin = 1.0;
  FovLimits fov;
  DovConfig dov;
  std::optional<double> alerted_beta;  // unused unless set

  void validate() const;
};

/// lambda = beta * (A / r^2) * exp(-2.996 r / R). Throws InputError for r <= 0.
double acquisition_rate(double beta, double area, double range, double visibility);

/// Angular diameter, in arc minutes, of the circle with the target's area.
double angular_size_arcmin(double area, double range);

/// True iff -left <= bearing <= right and -down <= elevation <= up.
bool in_fov(const FovLimits& fov, double rel_bearing, double rel_elevation);

/// Attended-sector schedule for the stochastic scan. One sector is drawn
/// per dwell period from the normalized partition weights.
class ScanSchedule {
 public:
  ScanSchedule(const DovConfig& dov, std::uint64_t seed);
  std::size_t attended_partition(double time);

 private:
  std::vector<double> weights_;
  double period_;
  Rng rng_;
  std::vector<std::size_t> slots_;
};

struct DovFactor {
  double factor = 0.0;
  bool outside_partitions = false;  // bearing not covered by any sector
};

/// Multiplier on beta for a target at rel_bearing. Uniform mode gives 1;
/// weighted scaling gives (w_i / sum w) / (1 / N); stochastic scan gives N
/// when the attended sector contains the bearing and 0 otherwise (schedule
/// required).
DovFactor dov_factor(const DovConfig& dov, double rel_bearing, double time,
                     ScanSchedule* schedule = nullptr);

struct AcquisitionState {
  double cum_hazard = 0.0;   // integral of lambda since the last reset
  double draw_u = 0.5;       // inverse-CDF sample in (0, 1)
  bool acquired = false;
  bool tracking = false;
  std::optional<double> t_acquired;
  double time_in_range = 0.0;  // s spent above acuity and in FOV before acquisition

  double cum_prob() const;
  double threshold_hazard() const;
};

AcquisitionState initial_acquisition_state(Rng& rng);

/// One integration step over [t0, t0 + dt]. lambda is the effective rate for
/// the step (zero when gated); in_fov / in_range describe the target at the
/// end of the step. Leaving the field of view clears acquisition, resets
/// the accumulated probability and redraws u from `rng`.
struct AcquisitionStep {
  double t0 = 0.0;
  double dt = 1.0;
  double lambda = 0.0;
  bool in_fov = true;
  bool in_range = true;
};

AcquisitionState step_acquisition(const AcquisitionState& state, const AcquisitionStep& step,
                                  Rng& rng);

}  // namespace sbs
