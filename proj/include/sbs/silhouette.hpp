#pragma once

// Projected silhouette area of an airframe as a function of view direction.
//
// Body frame: x forward, y right, z down (feet). A view is the direction from
// the airframe to the observer: azimuth measured from the nose towards the
// right wing, elevation positive when the observer is above.

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace sbs {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

struct TriangleMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<std::uint32_t, 3>> triangles;

  /// Throws InputError on out-of-range indices, non-finite coordinates or
  /// an empty triangle list.
  void validate() const;
};

/// Reads the OBJ subset: `v x y z` and `f i j k ...` records (1-based or
/// negative indices, `i/t/n` forms accepted, polygons fan-triangulated).
TriangleMesh read_obj(const std::filesystem::path& path);
TriangleMesh parse_obj(const std::string& text);
void write_obj(const std::filesystem::path& path, const TriangleMesh& mesh);

struct ViewAngles {
  double azimuth = 0.0;    // degrees, [-180, 180]
  double elevation = 0.0;  // degrees, [-90, 90]
};

/// Unit vector from the airframe towards the observer, body frame.
Vec3 view_direction(const ViewAngles& view);

struct ProjectedArea {
  double area = 0.0;        // ft^2
  bool degenerate = false;  // the projected union has zero area
};

inline constexpr int kDefaultResolution = 1024;

/// Area of the union of all triangles projected orthographically onto the
/// plane normal to the view direction, by coverage rasterization of a
/// resolution x resolution grid over the projected bounding square.
ProjectedArea project_silhouette_area(const TriangleMesh& mesh, const ViewAngles& view,
                                      int resolution = kDefaultResolution);

/// Gridded silhouette areas. Azimuth covers [0, 180] (left/right symmetry),
/// elevation covers [-90, 90]. areas[i][j] is for azimuth_grid[i],
/// elevation_grid[j].
struct AreaTable {
  std::string airframe_id;
  std::vector<double> azimuth_grid;
  std::vector<double> elevation_grid;
  std::vector<std::vector<double>> areas;

  void validate() const;
  /// Stored value at a grid node; throws if (azimuth, elevation) is not a node.
  double at_node(double azimuth, double elevation) const;
};

AreaTable build_area_table(const TriangleMesh& mesh, double az_step, double el_step,
                           int resolution = kDefaultResolution);

/// Bilinear interpolation; |azimuth| is folded into [0, 180] and elevation
/// is clamped to [-90, 90]. Exact at grid nodes.
double lookup_area(const AreaTable& table, const ViewAngles& view);

struct AreaNode {
  double azimuth;
  double elevation;
  double area;
};

/// Overwrites the listed nodes (which must lie on the grid).
void pin_nodes(AreaTable& table, const std::vector<AreaNode>& nodes);

/// CSV with a header row of elevations and a first column of azimuths.
/// A sidecar `<path>.meta.json` holds airframe_id and the grid steps.
void write_area_table(const std::filesystem::path& path, const AreaTable& table);
AreaTable read_area_table(const std::filesystem::path& path);

/// Reads `azimuth,elevation,area` rows (header optional).
std::vector<AreaNode> read_area_nodes(const std::filesystem::path& path);

}  // namespace sbs
