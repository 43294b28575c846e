#include "sbs/acquisition.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "sbs/errors.hpp"
#include "sbs/units.hpp"

namespace sbs {

void FovLimits::validate() const {
  for (double v : {up, down, left, right})
    if (!(v > 0.0 && v <= 180.0)) throw InputError("FOV limits must lie in (0, 180]");
}

std::string_view to_string(DovMode mode) {
  switch (mode) {
    case DovMode::uniform: return "uniform";
    case DovMode::weighted_scaling: return "weighted";
    case DovMode::stochastic_scan: return "stochastic";
  }
  return "uniform";
}

DovMode parse_dov_mode(std::string_view text) {
  if (text == "uniform") return DovMode::uniform;
  if (text == "weighted" || text == "weighted-scaling") return DovMode::weighted_scaling;
  if (text == "stochastic" || text == "stochastic-scan") return DovMode::stochastic_scan;
  throw InputError("unknown DOV mode '" + std::string(text) + "'");
}

void DovConfig::validate() const {
  if (partitions.empty()) throw InputError("DOV needs at least one partition");
  for (std::size_t i = 0; i < partitions.size(); ++i) {
    const auto& p = partitions[i];
    if (!(p.upper_az > p.lower_az)) throw InputError("DOV partition bounds must ascend");
    if (!(p.weight > 0.0)) throw InputError("DOV weights must be positive");
    if (i > 0 && partitions[i - 1].upper_az != p.lower_az)
      throw InputError("DOV partitions must be contiguous and non-overlapping");
  }
  if (mode == DovMode::stochastic_scan && !(dwell_period > 0.0))
    throw InputError("DOV dwell period must be positive");
}

void AcquisitionParams::validate() const {
  if (!(beta > 0.0)) throw InputError("beta must be positive");
  if (!(visibility_ft > 0.0)) throw InputError("visibility must be positive");
  if (!(acuity_arcmin > 0.0)) throw InputError("acuity threshold must be positive");
  if (alerted_beta && !(*alerted_beta > 0.0)) throw InputError("alerted beta must be positive");
  fov.validate();
  dov.validate();
}

double acquisition_rate(double beta, double area, double range, double visibility) {
  if (!(range > 0.0)) throw InputError("acquisition_rate: range must be positive");
  return beta * (area / (range * range)) * std::exp(-2.996 * range / visibility);
}

double angular_size_arcmin(double area, double range) {
  const double radius = std::sqrt(area / std::numbers::pi);
  return 2.0 * std::atan(radius / range) * units::kArcminPerRad;
}

bool in_fov(const FovLimits& fov, double rel_bearing, double rel_elevation) {
  return rel_bearing >= -fov.left && rel_bearing <= fov.right && rel_elevation >= -fov.down &&
         rel_elevation <= fov.up;
}

ScanSchedule::ScanSchedule(const DovConfig& dov, std::uint64_t seed)
    : period_(dov.dwell_period), rng_(seed) {
  for (const auto& p : dov.partitions)
    weights_.push_back(dov.mode == DovMode::uniform ? 1.0 : p.weight);
}

std::size_t ScanSchedule::attended_partition(double time) {
  const auto slot = static_cast<std::size_t>(std::max(0.0, std::floor(time / period_)));
  while (slots_.size() <= slot) slots_.push_back(rng_.categorical(weights_));
  return slots_[slot];
}

DovFactor dov_factor(const DovConfig& dov, double rel_bearing, double time,
                     ScanSchedule* schedule) {
  if (dov.mode == DovMode::uniform) return {1.0, false};
  const auto& parts = dov.partitions;
  std::size_t hit = parts.size();
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (rel_bearing >= parts[i].lower_az && rel_bearing <= parts[i].upper_az) {
      hit = i;
      break;
    }
  }
  if (hit == parts.size()) return {0.0, true};
  const auto n = static_cast<double>(parts.size());
  if (dov.mode == DovMode::weighted_scaling) {
    double total = 0.0;
    for (const auto& p : parts) total += p.weight;
    return {(parts[hit].weight / total) * n, false};
  }
  if (schedule == nullptr) throw InputError("stochastic scan requires a schedule");
  return {schedule->attended_partition(time) == hit ? n : 0.0, false};
}

double AcquisitionState::cum_prob() const { return -std::expm1(-cum_hazard); }

double AcquisitionState::threshold_hazard() const { return -std::log1p(-draw_u); }

AcquisitionState initial_acquisition_state(Rng& rng) {
  AcquisitionState s;
  s.draw_u = rng.uniform_open();
  return s;
}

AcquisitionState step_acquisition(const AcquisitionState& state, const AcquisitionStep& step,
                                  Rng& rng) {
  AcquisitionState next = state;
  if (!step.in_fov) {
    if (state.acquired || state.cum_hazard > 0.0) {
      next = AcquisitionState{};
      next.draw_u = rng.uniform_open();
      next.time_in_range = state.time_in_range;
    }
    return next;
  }
  if (state.acquired) {
    next.tracking = true;
    return next;
  }
  if (step.in_range) next.time_in_range += step.dt;
  if (!(step.lambda > 0.0)) return next;

  const double increment = step.lambda * step.dt;
  next.cum_hazard = state.cum_hazard + increment;
  const double needed = state.threshold_hazard();
  if (next.cum_hazard >= needed) {
    const double frac = std::clamp((needed - state.cum_hazard) / increment, 0.0, 1.0);
    next.acquired = true;
    next.tracking = true;
    next.t_acquired = step.t0 + frac * step.dt;
  }
  return next;
}

}  // namespace sbs
