#include "sbs/charts.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "sbs/errors.hpp"
#include "sbs/report.hpp"

namespace sbs {

namespace {

constexpr double kWidth = 960.0;
constexpr double kHeight = 480.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 20.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 80.0;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

double nice_ceiling(double v) {
  if (!(v > 0.0)) return 1.0;
  const double mag = std::pow(10.0, std::floor(std::log10(v)));
  for (double m : {1.0, 2.0, 2.5, 5.0, 10.0})
    if (m * mag >= v) return m * mag;
  return 10.0 * mag;
}

struct Axes {
  std::vector<double> betas;
  std::vector<double> visibilities;
};

Axes axes_of(const SweepResult& r, AirframeClass cls) {
  std::set<double> b, v;
  for (const auto& c : r.cells)
    if (c.cell.airframe_class == cls) {
      b.insert(c.cell.beta);
      v.insert(c.cell.visibility_nmi);
    }
  return {{b.begin(), b.end()}, {v.begin(), v.end()}};
}

const CellReport* find_cell(const SweepResult& r, AirframeClass cls, DovMode mode, double beta,
                            double vis) {
  for (const auto& c : r.cells)
    if (c.cell.airframe_class == cls && c.cell.dov_mode == mode && c.cell.beta == beta &&
        c.cell.visibility_nmi == vis)
      return &c;
  return nullptr;
}

void write_file(const std::filesystem::path& path, const std::string& svg) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  out << svg;
  out.flush();
  if (!out) throw RuntimeError("cannot write chart " + path.string());
}

// Shared frame: title, y axis with ticks between lo and hi, group labels.
void frame(std::ostringstream& s, const std::string& title, const std::string& y_label,
           double lo, double hi, const Axes& ax, double slot) {
  const double plot_h = kHeight - kTop - kBottom;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
    << kHeight << "\" font-family=\"sans-serif\" font-size=\"11\">\n"
    << "<defs><pattern id=\"hatch\" width=\"6\" height=\"6\" patternUnits=\"userSpaceOnUse\" "
       "patternTransform=\"rotate(45)\"><line x1=\"0\" y1=\"0\" x2=\"0\" y2=\"6\" "
       "stroke=\"#999\" stroke-width=\"2\"/></pattern></defs>\n"
    << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
    << title << "</text>\n";
  const int ticks = 5;
  for (int i = 0; i <= ticks; ++i) {
    const double v = lo + (hi - lo) * i / ticks;
    const double y = kTop + plot_h * (1.0 - (v - lo) / (hi - lo));
    s << "<line x1=\"" << kLeft << "\" y1=\"" << fmt(y) << "\" x2=\"" << kWidth - kRight
      << "\" y2=\"" << fmt(y) << "\" stroke=\"#e0e0e0\"/>\n"
      << "<text x=\"" << kLeft - 6 << "\" y=\"" << fmt(y + 4) << "\" text-anchor=\"end\">"
      << label(std::round(v * 1e6) / 1e6) << "</text>\n";
  }
  s << "<text transform=\"translate(16," << kTop + plot_h / 2
    << ") rotate(-90)\" text-anchor=\"middle\">" << y_label << "</text>\n";
  const double group_w = slot * static_cast<double>(ax.visibilities.size() + 1);
  for (std::size_t g = 0; g < ax.betas.size(); ++g) {
    const double gx = kLeft + group_w * static_cast<double>(g);
    for (std::size_t b = 0; b < ax.visibilities.size(); ++b) {
      const double x = gx + slot * (static_cast<double>(b) + 1.0);
      s << "<text x=\"" << fmt(x) << "\" y=\"" << kHeight - kBottom + 16
        << "\" text-anchor=\"middle\">R=" << label(ax.visibilities[b]) << "</text>\n";
    }
    s << "<text x=\"" << fmt(gx + group_w / 2 + slot / 2) << "\" y=\"" << kHeight - kBottom + 36
      << "\" text-anchor=\"middle\">beta=" << label(ax.betas[g]) << "</text>\n";
  }
  s << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 14
    << "\" text-anchor=\"middle\">search effectiveness beta, visibility R (nmi)</text>\n";
}

}  // namespace

void write_risk_chart(const std::filesystem::path& path, const SweepResult& result,
                      AirframeClass cls, DovMode mode) {
  const Axes ax = axes_of(result, cls);
  const double plot_h = kHeight - kTop - kBottom;
  const double groups = static_cast<double>(ax.betas.size());
  const double slot =
      (kWidth - kLeft - kRight) / (groups * static_cast<double>(ax.visibilities.size() + 1) + 1);
  double top = 0.0;
  for (const auto& c : result.cells)
    if (c.cell.airframe_class == cls && c.cell.dov_mode == mode && c.valid)
      top = std::max({top, c.report.total, c.report.ci_total.hi});
  top = nice_ceiling(top);
  auto y_of = [&](double v) { return kTop + plot_h * (1.0 - v / top); };

  std::ostringstream s;
  frame(s,
        "Risk ratio, " + std::string(to_string(cls)) + ", " + std::string(to_string(mode)) +
            " dwell",
        "risk ratio", 0.0, top, ax, slot);
  const double group_w = slot * static_cast<double>(ax.visibilities.size() + 1);
  const double bar_w = slot * 0.8;
  for (std::size_t g = 0; g < ax.betas.size(); ++g) {
    for (std::size_t b = 0; b < ax.visibilities.size(); ++b) {
      const double cx = kLeft + group_w * static_cast<double>(g) + slot * (b + 1.0);
      const double x = cx - bar_w / 2;
      const CellReport* c = find_cell(result, cls, mode, ax.betas[g], ax.visibilities[b]);
      if (c == nullptr || !c->valid) {
        s << "<g class=\"invalid\"><rect x=\"" << fmt(x) << "\" y=\"" << kTop << "\" width=\""
          << fmt(bar_w) << "\" height=\"" << fmt(plot_h)
          << "\" fill=\"url(#hatch)\" stroke=\"#999\"/>\n<text x=\"" << fmt(cx) << "\" y=\""
          << fmt(kTop + plot_h / 2) << "\" text-anchor=\"middle\" font-size=\"9\">no NMAC</text></g>\n";
        continue;
      }
      const auto& r = c->report;
      const double yu = y_of(r.unresolved), yt = y_of(r.total);
      s << "<g class=\"cell\"><rect class=\"unresolved\" x=\"" << fmt(x) << "\" y=\"" << fmt(yu)
        << "\" width=\"" << fmt(bar_w) << "\" height=\"" << fmt(y_of(0.0) - yu)
        << "\" fill=\"#31688e\"/>\n"
        << "<rect class=\"induced\" x=\"" << fmt(x) << "\" y=\"" << fmt(yt) << "\" width=\""
        << fmt(bar_w) << "\" height=\"" << fmt(yu - yt) << "\" fill=\"#fd9a44\"/>\n";
      if (std::isfinite(r.ci_total.lo) && std::isfinite(r.ci_total.hi))
        s << "<line x1=\"" << fmt(cx) << "\" y1=\"" << fmt(y_of(r.ci_total.lo)) << "\" x2=\""
          << fmt(cx) << "\" y2=\"" << fmt(y_of(r.ci_total.hi)) << "\" stroke=\"black\"/>\n";
      s << "</g>\n";
    }
  }
  const double lx = kWidth - kRight - 170;
  s << "<rect x=\"" << lx << "\" y=\"" << kTop << "\" width=\"10\" height=\"10\" fill=\"#31688e\"/>"
    << "<text x=\"" << lx + 14 << "\" y=\"" << kTop + 9 << "\">unresolved</text>\n"
    << "<rect x=\"" << lx + 85 << "\" y=\"" << kTop << "\" width=\"10\" height=\"10\" fill=\"#fd9a44\"/>"
    << "<text x=\"" << lx + 99 << "\" y=\"" << kTop + 9 << "\">induced</text>\n";
  s << "</svg>\n";
  write_file(path, s.str());
}

std::vector<DeltaCell> dov_deltas(const SweepResult& result, AirframeClass cls) {
  const Axes ax = axes_of(result, cls);
  std::vector<DeltaCell> out;
  for (double beta : ax.betas)
    for (double vis : ax.visibilities) {
      DeltaCell d{beta, vis, false, 0.0};
      const auto* w = find_cell(result, cls, DovMode::weighted_scaling, beta, vis);
      const auto* u = find_cell(result, cls, DovMode::uniform, beta, vis);
      if (w && u && w->valid && u->valid) {
        d.valid = true;
        d.delta = w->report.total - u->report.total;
      }
      out.push_back(d);
    }
  return out;
}

void write_delta_chart(const std::filesystem::path& path, const SweepResult& result,
                       AirframeClass cls) {
  const Axes ax = axes_of(result, cls);
  const auto deltas = dov_deltas(result, cls);
  double mag = 0.0;
  for (const auto& d : deltas)
    if (d.valid) mag = std::max(mag, std::abs(d.delta));
  mag = nice_ceiling(mag);
  const double plot_h = kHeight - kTop - kBottom;
  auto y_of = [&](double v) { return kTop + plot_h * (1.0 - (v + mag) / (2.0 * mag)); };
  const double slot = (kWidth - kLeft - kRight) /
                      (static_cast<double>(ax.betas.size() * (ax.visibilities.size() + 1)) + 1);
  std::ostringstream s;
  frame(s, "Increase in risk ratio, weighted over uniform dwell, " + std::string(to_string(cls)),
        "weighted - uniform total", -mag, mag, ax, slot);
  const double group_w = slot * static_cast<double>(ax.visibilities.size() + 1);
  const double bar_w = slot * 0.8;
  std::size_t i = 0;
  for (std::size_t g = 0; g < ax.betas.size(); ++g)
    for (std::size_t b = 0; b < ax.visibilities.size(); ++b, ++i) {
      const double cx = kLeft + group_w * static_cast<double>(g) + slot * (b + 1.0);
      const double x = cx - bar_w / 2;
      const auto& d = deltas[i];
      if (!d.valid) {
        s << "<g class=\"invalid\"><rect x=\"" << fmt(x) << "\" y=\"" << kTop << "\" width=\""
          << fmt(bar_w) << "\" height=\"" << fmt(plot_h)
          << "\" fill=\"url(#hatch)\" stroke=\"#999\"/></g>\n";
        continue;
      }
      const double y0 = y_of(0.0), y1 = y_of(d.delta);
      s << "<rect class=\"delta\" data-value=\"" << format_number(d.delta) << "\" x=\""
        << fmt(x) << "\" y=\"" << fmt(std::min(y0, y1)) << "\" width=\"" << fmt(bar_w)
        << "\" height=\"" << fmt(std::abs(y1 - y0)) << "\" fill=\""
        << (d.delta >= 0.0 ? "#b5367a" : "#2a9d8f") << "\"/>\n";
    }
  s << "<line x1=\"" << kLeft << "\" y1=\"" << fmt(y_of(0.0)) << "\" x2=\"" << kWidth - kRight
    << "\" y2=\"" << fmt(y_of(0.0)) << "\" stroke=\"black\"/>\n</svg>\n";
  write_file(path, s.str());
}

std::vector<std::filesystem::path> emit_charts(const SweepResult& result,
                                               const std::filesystem::path& outdir) {
  std::vector<AirframeClass> classes;
  std::vector<DovMode> modes;
  for (const auto& c : result.cells) {
    if (std::find(classes.begin(), classes.end(), c.cell.airframe_class) == classes.end())
      classes.push_back(c.cell.airframe_class);
    if (std::find(modes.begin(), modes.end(), c.cell.dov_mode) == modes.end())
      modes.push_back(c.cell.dov_mode);
  }
  std::vector<std::filesystem::path> files;
  for (auto cls : classes) {
    for (auto mode : modes) {
      auto p = outdir / ("risk_" + std::string(to_string(cls)) + "_" +
                         std::string(to_string(mode)) + ".svg");
      write_risk_chart(p, result, cls, mode);
      files.push_back(p);
    }
    const bool both = std::count(modes.begin(), modes.end(), DovMode::uniform) &&
                      std::count(modes.begin(), modes.end(), DovMode::weighted_scaling);
    if (both) {
      auto p = outdir / ("delta_" + std::string(to_string(cls)) + ".svg");
      write_delta_chart(p, result, cls);
      files.push_back(p);
    }
  }
  return files;
}

}  // namespace sbs
