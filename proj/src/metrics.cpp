#include "sbs/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "sbs/errors.hpp"
#include "sbs/rng.hpp"

namespace sbs {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Span1 {
  double lo, hi;
  bool empty() const { return !(lo < hi); }
};

// {tau in [0,1] : |v0 + (v1 - v0) tau| < limit}
Span1 vertical_window(double v0, double v1, double limit) {
  const double dv = v1 - v0;
  if (dv == 0.0) return std::abs(v0) < limit ? Span1{0.0, 1.0} : Span1{1.0, 0.0};
  double a = (-limit - v0) / dv, b = (limit - v0) / dv;
  if (a > b) std::swap(a, b);
  return {std::max(a, 0.0), std::min(b, 1.0)};
}

// {tau in [0,1] : |p + q tau| < radius} for 2-D p, q.
Span1 horizontal_window(double px, double py, double qx, double qy, double radius) {
  const double a = qx * qx + qy * qy;
  const double b = 2.0 * (px * qx + py * qy);
  const double c = px * px + py * py - radius * radius;
  if (a == 0.0) return c < 0.0 ? Span1{0.0, 1.0} : Span1{1.0, 0.0};
  const double disc = b * b - 4.0 * a * c;
  if (disc <= 0.0) return {1.0, 0.0};
  const double sq = std::sqrt(disc);
  const double q = -0.5 * (b + (b >= 0.0 ? sq : -sq));
  double r1 = q / a, r2 = q != 0.0 ? c / q : 0.0;
  if (r1 > r2) std::swap(r1, r2);
  return {std::max(r1, 0.0), std::min(r2, 1.0)};
}

struct Rel {
  double x, y, z;
};

Rel relative(const AircraftState& a, const AircraftState& b) {
  return {b.east - a.east, b.north - a.north, b.altitude - a.altitude};
}

double quantile(std::vector<double>& v, double q) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto i = static_cast<std::size_t>(std::floor(pos));
  const double f = pos - static_cast<double>(i);
  if (i + 1 >= v.size()) return v.back();
  return v[i] + f * (v[i + 1] - v[i]);
}

struct Contribution {
  double nominal;
  double unresolved;
  double induced;
};

std::vector<Contribution> contributions(std::span<const EncounterOutcome> outcomes) {
  std::vector<Contribution> c;
  c.reserve(outcomes.size());
  for (const auto& o : outcomes) {
    if (o.excluded) continue;
    c.push_back({o.nominal_nmac ? o.weight : 0.0,
                 (o.nominal_nmac && o.mitigated_nmac) ? o.weight : 0.0,
                 (!o.nominal_nmac && o.mitigated_nmac) ? o.weight : 0.0});
  }
  return c;
}

}  // namespace

NmacResult detect_nmac(std::span<const AircraftState> own, std::span<const AircraftState> tgt,
                       const NmacCylinder& cyl) {
  if (own.size() != tgt.size()) throw InputError("detect_nmac: series lengths differ");
  if (own.empty()) throw InputError("detect_nmac: empty series");
  NmacResult res;
  double best = kInf;
  auto consider = [&](const Rel& r, double t) {
    const double h = std::hypot(r.x, r.y);
    const double v = std::abs(r.z);
    const double m = std::max(h / cyl.horizontal, v / cyl.vertical);
    if (m < best) {
      best = m;
      res.min_sep = {h, v, t};
    }
  };
  auto lerp = [](const Rel& a, const Rel& b, double tau) {
    return Rel{a.x + (b.x - a.x) * tau, a.y + (b.y - a.y) * tau, a.z + (b.z - a.z) * tau};
  };

  Rel prev = relative(own[0], tgt[0]);
  consider(prev, own[0].t);
  if (own.size() == 1) {
    if (std::hypot(prev.x, prev.y) < cyl.horizontal && std::abs(prev.z) < cyl.vertical) {
      res.nmac = true;
      res.t_first = own[0].t;
    }
    return res;
  }
  for (std::size_t k = 1; k < own.size(); ++k) {
    const Rel cur = relative(own[k], tgt[k]);
    const double t0 = own[k - 1].t, t1 = own[k].t;
    const double qx = cur.x - prev.x, qy = cur.y - prev.y;
    const Span1 vw = vertical_window(prev.z, cur.z, cyl.vertical);
    const Span1 hw = horizontal_window(prev.x, prev.y, qx, qy, cyl.horizontal);
    const Span1 both{std::max(vw.lo, hw.lo), std::min(vw.hi, hw.hi)};
    if (!res.nmac && !vw.empty() && !hw.empty() && !both.empty()) {
      res.nmac = true;
      res.t_first = t0 + both.lo * (t1 - t0);
    }
    // Candidate minima of the normalized cylinder distance.
    const double qq = qx * qx + qy * qy;
    if (qq > 0.0) {
      const double tau = std::clamp(-(prev.x * qx + prev.y * qy) / qq, 0.0, 1.0);
      consider(lerp(prev, cur, tau), t0 + tau * (t1 - t0));
    }
    if ((prev.z < 0.0) != (cur.z < 0.0) && cur.z != prev.z) {
      const double tau = std::clamp(-prev.z / (cur.z - prev.z), 0.0, 1.0);
      consider(lerp(prev, cur, tau), t0 + tau * (t1 - t0));
    }
    consider(cur, t1);
    prev = cur;
  }
  return res;
}

RiskRatioReport risk_ratio(std::span<const EncounterOutcome> outcomes,
                           const BootstrapOptions& options) {
  RiskRatioReport r;
  r.n_encounters = outcomes.size();
  for (const auto& o : outcomes) r.n_excluded += o.excluded ? 1 : 0;
  const auto contrib = contributions(outcomes);
  for (const auto& c : contrib) {
    r.weighted_nominal_nmacs += c.nominal;
    r.weighted_unresolved += c.unresolved;
    r.weighted_induced += c.induced;
  }
  if (!(r.weighted_nominal_nmacs > 0.0))
    throw StatisticalError(
        "no nominal NMACs in the encounter set; the risk ratio is undefined (use a larger or "
        "denser encounter set)");
  r.unresolved = r.weighted_unresolved / r.weighted_nominal_nmacs;
  r.induced = r.weighted_induced / r.weighted_nominal_nmacs;
  r.total = r.unresolved + r.induced;

  if (options.resamples <= 0 || contrib.empty()) {
    r.ci_total = {r.total, r.total};
    r.ci_unresolved = {r.unresolved, r.unresolved};
    r.ci_induced = {r.induced, r.induced};
    return r;
  }
  Rng rng(stream_seed({options.seed, static_cast<std::uint64_t>(StreamPurpose::bootstrap)}));
  const auto n = static_cast<std::uint64_t>(contrib.size());
  std::vector<double> tot, unr, ind;
  tot.reserve(options.resamples);
  for (int b = 0; b < options.resamples; ++b) {
    double sn = 0.0, su = 0.0, si = 0.0;
    for (std::uint64_t k = 0; k < n; ++k) {
      const auto& c = contrib[rng.below(n)];
      sn += c.nominal;
      su += c.unresolved;
      si += c.induced;
    }
    if (!(sn > 0.0)) continue;
    unr.push_back(su / sn);
    ind.push_back(si / sn);
    tot.push_back(su / sn + si / sn);
  }
  const double a = 0.5 * (1.0 - options.confidence);
  r.ci_total = {quantile(tot, a), quantile(tot, 1.0 - a)};
  r.ci_unresolved = {quantile(unr, a), quantile(unr, 1.0 - a)};
  r.ci_induced = {quantile(ind, a), quantile(ind, 1.0 - a)};
  r.bootstrap_resamples = static_cast<int>(tot.size());
  return r;
}

Interval paired_total_difference_ci(std::span<const EncounterOutcome> a,
                                    std::span<const EncounterOutcome> b,
                                    const BootstrapOptions& options) {
  if (a.size() != b.size()) throw InputError("paired outcomes must have equal length");
  std::vector<std::array<double, 4>> rows;  // nominal_a, mitigated_a, nominal_b, mitigated_b
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].id != b[i].id) throw InputError("paired outcomes must share encounter ids");
    if (a[i].excluded || b[i].excluded) continue;
    rows.push_back({a[i].nominal_nmac ? a[i].weight : 0.0,
                    a[i].mitigated_nmac ? a[i].weight : 0.0,
                    b[i].nominal_nmac ? b[i].weight : 0.0,
                    b[i].mitigated_nmac ? b[i].weight : 0.0});
  }
  if (rows.empty()) throw StatisticalError("no usable paired outcomes");
  Rng rng(stream_seed({options.seed, static_cast<std::uint64_t>(StreamPurpose::bootstrap), 1}));
  const auto n = static_cast<std::uint64_t>(rows.size());
  std::vector<double> diffs;
  for (int r = 0; r < options.resamples; ++r) {
    double na = 0, ma = 0, nb = 0, mb = 0;
    for (std::uint64_t k = 0; k < n; ++k) {
      const auto& row = rows[rng.below(n)];
      na += row[0];
      ma += row[1];
      nb += row[2];
      mb += row[3];
    }
    if (!(na > 0.0) || !(nb > 0.0)) continue;
    diffs.push_back(ma / na - mb / nb);
  }
  const double q = 0.5 * (1.0 - options.confidence);
  return {quantile(diffs, q), quantile(diffs, 1.0 - q)};
}

double mac_probability(double risk_ratio, double p_mac_given_nmac) {
  if (!(risk_ratio >= 0.0) || !(p_mac_given_nmac >= 0.0))
    throw InputError("mac_probability inputs must be non-negative");
  return risk_ratio * p_mac_given_nmac;
}

}  // namespace sbs
