#include "sbs/silhouette.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include "json.hpp"
#include <sstream>

#include "sbs/errors.hpp"
#include "sbs/kernels/kernels.hpp"
#include "sbs/units.hpp"

namespace sbs {

namespace {

Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

Vec3 normalized(const Vec3& v) {
  const double n = std::sqrt(dot(v, v));
  return {v.x / n, v.y / n, v.z / n};
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view s, const std::string& context) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw InputError(context + ": cannot parse number '" + std::string(s) + "'");
  return v;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find(sep, start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

bool is_strictly_ascending(const std::vector<double>& g) {
  for (std::size_t i = 1; i < g.size(); ++i)
    if (!(g[i] > g[i - 1])) return false;
  return true;
}

// Interval index and fraction for bilinear interpolation; the last node maps
// to the final interval with fraction 1.
std::pair<std::size_t, double> locate(const std::vector<double>& grid, double v) {
  v = std::clamp(v, grid.front(), grid.back());
  auto it = std::upper_bound(grid.begin(), grid.end(), v);
  std::size_t i = it == grid.begin() ? 0 : static_cast<std::size_t>(it - grid.begin()) - 1;
  if (i >= grid.size() - 1) i = grid.size() - 2;
  return {i, (v - grid[i]) / (grid[i + 1] - grid[i])};
}

std::size_t node_index(const std::vector<double>& grid, double v, const char* axis) {
  for (std::size_t i = 0; i < grid.size(); ++i)
    if (grid[i] == v) return i;
  throw InputError(std::string("value ") + format_double(v) + " is not a " + axis +
                   " grid node");
}

std::vector<double> make_grid(double lo, double hi, double step, const char* axis) {
  if (!(step > 0.0)) throw InputError(std::string(axis) + " step must be positive");
  const double count = (hi - lo) / step;
  const double rounded = std::round(count);
  if (std::abs(count - rounded) > 1e-9 || rounded < 1.0)
    throw InputError(std::string(axis) + " step must divide 180 evenly");
  std::vector<double> grid;
  const auto n = static_cast<int>(rounded);
  for (int i = 0; i <= n; ++i) grid.push_back(lo + step * i);
  grid.back() = hi;
  return grid;
}

}  // namespace

void TriangleMesh::validate() const {
  if (triangles.empty()) throw InputError("mesh has no triangles");
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    const auto& v = vertices[i];
    if (!std::isfinite(v.x) || !std::isfinite(v.y) || !std::isfinite(v.z))
      throw InputError("mesh vertex " + std::to_string(i) + " is not finite");
  }
  for (std::size_t t = 0; t < triangles.size(); ++t)
    for (auto idx : triangles[t])
      if (idx >= vertices.size())
        throw InputError("mesh triangle " + std::to_string(t) + " references vertex " +
                         std::to_string(idx) + " out of range");
}

TriangleMesh parse_obj(const std::string& text) {
  TriangleMesh mesh;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string ctx = "obj line " + std::to_string(line_no);
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag) || tag[0] == '#') continue;
    if (tag == "v") {
      std::string a, b, c;
      if (!(ls >> a >> b >> c)) throw InputError(ctx + ": vertex needs three coordinates");
      mesh.vertices.push_back({parse_double(a, ctx), parse_double(b, ctx), parse_double(c, ctx)});
    } else if (tag == "f") {
      std::vector<std::uint32_t> idx;
      std::string tok;
      while (ls >> tok) {
        const auto head = tok.substr(0, tok.find('/'));
        long value = 0;
        auto res = std::from_chars(head.data(), head.data() + head.size(), value);
        if (res.ec != std::errc{} || value == 0)
          throw InputError(ctx + ": bad face index '" + tok + "'");
        const long n = static_cast<long>(mesh.vertices.size());
        const long zero_based = value > 0 ? value - 1 : n + value;
        if (zero_based < 0) throw InputError(ctx + ": face index out of range");
        idx.push_back(static_cast<std::uint32_t>(zero_based));
      }
      if (idx.size() < 3) throw InputError(ctx + ": face needs at least three vertices");
      for (std::size_t k = 1; k + 1 < idx.size(); ++k)
        mesh.triangles.push_back({idx[0], idx[k], idx[k + 1]});
    }
  }
  mesh.validate();
  return mesh;
}

TriangleMesh read_obj(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open mesh file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_obj(buf.str());
}

void write_obj(const std::filesystem::path& path, const TriangleMesh& mesh) {
  std::ofstream out(path);
  if (!out) throw RuntimeError("cannot write " + path.string());
  for (const auto& v : mesh.vertices)
    out << "v " << format_double(v.x) << ' ' << format_double(v.y) << ' '
        << format_double(v.z) << '\n';
  for (const auto& t : mesh.triangles)
    out << "f " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
}

Vec3 view_direction(const ViewAngles& view) {
  const double az = view.azimuth * units::kDegToRad;
  const double el = view.elevation * units::kDegToRad;
  return {std::cos(el) * std::cos(az), std::cos(el) * std::sin(az), -std::sin(el)};
}

ProjectedArea project_silhouette_area(const TriangleMesh& mesh, const ViewAngles& view,
                                      int resolution) {
  mesh.validate();
  if (resolution < 64) throw InputError("rasterization resolution must be >= 64");

  const Vec3 d = view_direction(view);
  const Vec3 helper = std::abs(d.z) < 0.9 ? Vec3{0.0, 0.0, 1.0} : Vec3{1.0, 0.0, 0.0};
  const Vec3 u = normalized(cross(helper, d));
  const Vec3 w = cross(d, u);

  std::vector<double> px(mesh.vertices.size()), py(mesh.vertices.size());
  double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
    px[i] = dot(mesh.vertices[i], u);
    py[i] = dot(mesh.vertices[i], w);
  }
  for (const auto& t : mesh.triangles)
    for (auto i : t) {
      xmin = std::min(xmin, px[i]);
      xmax = std::max(xmax, px[i]);
      ymin = std::min(ymin, py[i]);
      ymax = std::max(ymax, py[i]);
    }
  const double side = std::max(xmax - xmin, ymax - ymin);
  if (!(side > 0.0)) return {0.0, true};

  // Work in pixel units: pixel (i, j) has its centre at (i + 0.5, j + 0.5).
  const double pixel = side / resolution;
  const auto n = static_cast<std::size_t>(resolution);
  std::vector<std::uint8_t> mask(n * n, 0);
  const auto& k = kernels::active();

  for (const auto& t : mesh.triangles) {
    double ax = (px[t[0]] - xmin) / pixel, ay = (py[t[0]] - ymin) / pixel;
    double bx = (px[t[1]] - xmin) / pixel, by = (py[t[1]] - ymin) / pixel;
    double cx = (px[t[2]] - xmin) / pixel, cy = (py[t[2]] - ymin) / pixel;
    const double twice_area = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax);
    if (std::abs(twice_area) < 1e-12) continue;
    if (twice_area < 0.0) {
      std::swap(bx, cx);
      std::swap(by, cy);
    }
    const double vx[3] = {ax, bx, cx};
    const double vy[3] = {ay, by, cy};
    kernels::EdgeSet edges{};
    for (int e = 0; e < 3; ++e) {
      const int f = (e + 1) % 3;
      const double a = -(vy[f] - vy[e]);
      const double b = vx[f] - vx[e];
      // Small outward tolerance so pixel centres on shared edges are kept.
      const double tol = 1e-7 * (std::abs(a) + std::abs(b));
      edges.a[e] = a;
      edges.b[e] = b;
      edges.c[e] = -(a * vx[e] + b * vy[e]) + tol;
    }
    const double tx0 = std::min({ax, bx, cx}), tx1 = std::max({ax, bx, cx});
    const double ty0 = std::min({ay, by, cy}), ty1 = std::max({ay, by, cy});
    const auto clampi = [&](double v) {
      return static_cast<long>(std::clamp(v, 0.0, static_cast<double>(n - 1)));
    };
    const long ix0 = clampi(std::floor(tx0 - 0.5)), ix1 = clampi(std::ceil(tx1 - 0.5));
    const long iy0 = clampi(std::floor(ty0 - 0.5)), iy1 = clampi(std::ceil(ty1 - 0.5));
    const auto span = static_cast<std::size_t>(ix1 - ix0 + 1);
    for (long iy = iy0; iy <= iy1; ++iy) {
      k.cover_row(edges, static_cast<double>(ix0) + 0.5, 1.0, static_cast<double>(iy) + 0.5,
                  span, mask.data() + static_cast<std::size_t>(iy) * n +
                            static_cast<std::size_t>(ix0));
    }
  }

  std::size_t covered = 0;
  for (auto m : mask) covered += m;
  const double area = static_cast<double>(covered) * pixel * pixel;
  return {area, covered == 0};
}

void AreaTable::validate() const {
  if (azimuth_grid.size() < 2 || elevation_grid.size() < 2)
    throw InputError("area table needs at least two nodes per axis");
  if (!is_strictly_ascending(azimuth_grid) || !is_strictly_ascending(elevation_grid))
    throw InputError("area table grids must be strictly ascending");
  if (azimuth_grid.front() > 0.0 || azimuth_grid.back() < 180.0)
    throw InputError("area table azimuth grid must cover [0, 180]");
  if (elevation_grid.front() > -90.0 || elevation_grid.back() < 90.0)
    throw InputError("area table elevation grid must cover [-90, 90]");
  if (areas.size() != azimuth_grid.size())
    throw InputError("area table row count does not match azimuth grid");
  for (const auto& row : areas) {
    if (row.size() != elevation_grid.size())
      throw InputError("area table column count does not match elevation grid");
    for (double a : row)
      if (!(a >= 0.0) || !std::isfinite(a))
        throw InputError("area table cells must be finite and non-negative");
  }
}

double AreaTable::at_node(double azimuth, double elevation) const {
  return areas[node_index(azimuth_grid, azimuth, "azimuth")]
              [node_index(elevation_grid, elevation, "elevation")];
}

AreaTable build_area_table(const TriangleMesh& mesh, double az_step, double el_step,
                           int resolution) {
  mesh.validate();
  AreaTable table;
  table.azimuth_grid = make_grid(0.0, 180.0, az_step, "azimuth");
  table.elevation_grid = make_grid(-90.0, 90.0, el_step, "elevation");
  table.areas.assign(table.azimuth_grid.size(),
                     std::vector<double>(table.elevation_grid.size(), 0.0));
  for (std::size_t i = 0; i < table.azimuth_grid.size(); ++i)
    for (std::size_t j = 0; j < table.elevation_grid.size(); ++j)
      table.areas[i][j] =
          project_silhouette_area(mesh, {table.azimuth_grid[i], table.elevation_grid[j]},
                                  resolution)
              .area;
  return table;
}

double lookup_area(const AreaTable& table, const ViewAngles& view) {
  const auto [i, tx] = locate(table.azimuth_grid, std::abs(view.azimuth));
  const auto [j, ty] = locate(table.elevation_grid, view.elevation);
  const auto& a = table.areas;
  const double lower = (1.0 - ty) * a[i][j] + ty * a[i][j + 1];
  const double upper = (1.0 - ty) * a[i + 1][j] + ty * a[i + 1][j + 1];
  return (1.0 - tx) * lower + tx * upper;
}

void pin_nodes(AreaTable& table, const std::vector<AreaNode>& nodes) {
  for (const auto& node : nodes) {
    if (!(node.area >= 0.0)) throw InputError("pinned area must be non-negative");
    table.areas[node_index(table.azimuth_grid, node.azimuth, "azimuth")]
               [node_index(table.elevation_grid, node.elevation, "elevation")] = node.area;
  }
}

void write_area_table(const std::filesystem::path& path, const AreaTable& table) {
  table.validate();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw RuntimeError("cannot write area table " + path.string());
  out << "azimuth\\elevation";
  for (double el : table.elevation_grid) out << ',' << format_double(el);
  out << '\n';
  for (std::size_t i = 0; i < table.azimuth_grid.size(); ++i) {
    out << format_double(table.azimuth_grid[i]);
    for (double a : table.areas[i]) out << ',' << format_double(a);
    out << '\n';
  }
  const auto step = [](const std::vector<double>& g) -> nlohmann::json {
    const double s = g[1] - g[0];
    for (std::size_t i = 1; i < g.size(); ++i)
      if (std::abs((g[i] - g[i - 1]) - s) > 1e-9) return nullptr;
    return s;
  };
  nlohmann::ordered_json meta;
  meta["airframe_id"] = table.airframe_id;
  meta["azimuth_step_deg"] = step(table.azimuth_grid);
  meta["elevation_step_deg"] = step(table.elevation_grid);
  meta["units"] = "ft^2";
  std::ofstream side(path.string() + ".meta.json", std::ios::binary);
  if (!side) throw RuntimeError("cannot write area table sidecar for " + path.string());
  side << meta.dump(2) << '\n';
}

AreaTable read_area_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open area table " + path.string());
  AreaTable table;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::string ctx = path.filename().string() + " line " + std::to_string(line_no);
    auto cells = split(line, ',');
    if (table.elevation_grid.empty()) {
      for (std::size_t c = 1; c < cells.size(); ++c)
        table.elevation_grid.push_back(parse_double(cells[c], ctx));
      continue;
    }
    if (cells.size() != table.elevation_grid.size() + 1)
      throw InputError(ctx + ": expected " + std::to_string(table.elevation_grid.size() + 1) +
                       " columns");
    table.azimuth_grid.push_back(parse_double(cells[0], ctx));
    std::vector<double> row;
    for (std::size_t c = 1; c < cells.size(); ++c) row.push_back(parse_double(cells[c], ctx));
    table.areas.push_back(std::move(row));
  }
  table.airframe_id = path.stem().string();
  const std::filesystem::path sidecar = path.string() + ".meta.json";
  if (std::filesystem::exists(sidecar)) {
    std::ifstream side(sidecar);
    try {
      const auto meta = nlohmann::json::parse(side);
      table.airframe_id = meta.value("airframe_id", table.airframe_id);
    } catch (const nlohmann::json::exception& e) {
      throw InputError("bad area table sidecar " + sidecar.string() + ": " + e.what());
    }
  }
  table.validate();
  return table;
}

std::vector<AreaNode> read_area_nodes(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open node file " + path.string());
  std::vector<AreaNode> nodes;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto cells = split(line, ',');
    if (cells.size() != 3) throw InputError(path.string() + ": expected 3 columns");
    if (line_no == 1 && std::isalpha(static_cast<unsigned char>(line[0]))) continue;
    const std::string ctx = path.filename().string() + " line " + std::to_string(line_no);
    nodes.push_back({parse_double(cells[0], ctx), parse_double(cells[1], ctx),
                     parse_double(cells[2], ctx)});
  }
  return nodes;
}

}  // namespace sbs
