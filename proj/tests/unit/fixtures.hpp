#pragma once

#include <array>
#include <cmath>
#include <map>
#include <utility>

#include "sbs/silhouette.hpp"

namespace fixtures {

// Axis-aligned unit cube centred on the origin.
inline sbs::TriangleMesh unit_cube() {
  sbs::TriangleMesh m;
  for (int i = 0; i < 8; ++i)
    m.vertices.push_back({(i & 1) ? 0.5 : -0.5, (i & 2) ? 0.5 : -0.5, (i & 4) ? 0.5 : -0.5});
  const std::array<std::array<std::uint32_t, 4>, 6> quads{{
      {0, 1, 3, 2}, {4, 6, 7, 5}, {0, 4, 5, 1}, {2, 3, 7, 6}, {0, 2, 6, 4}, {1, 5, 7, 3}}};
  for (const auto& q : quads) {
    m.triangles.push_back({q[0], q[1], q[2]});
    m.triangles.push_back({q[0], q[2], q[3]});
  }
  return m;
}

// Unit-radius icosphere.
inline sbs::TriangleMesh icosphere(int subdivisions) {
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  sbs::TriangleMesh m;
  auto push = [&](double x, double y, double z) {
    const double n = std::sqrt(x * x + y * y + z * z);
    m.vertices.push_back({x / n, y / n, z / n});
    return static_cast<std::uint32_t>(m.vertices.size() - 1);
  };
  for (auto [x, y, z] : std::array<std::array<double, 3>, 12>{{{-1, t, 0}, {1, t, 0}, {-1, -t, 0},
                                                              {1, -t, 0}, {0, -1, t}, {0, 1, t},
                                                              {0, -1, -t}, {0, 1, -t}, {t, 0, -1},
                                                              {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}}})
    push(x, y, z);
  m.triangles = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                 {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                 {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                 {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
  for (int s = 0; s < subdivisions; ++s) {
    std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint32_t> mid;
    auto midpoint = [&](std::uint32_t a, std::uint32_t b) {
      auto key = std::minmax(a, b);
      if (auto it = mid.find(key); it != mid.end()) return it->second;
      const auto& p = m.vertices[a];
      const auto& q = m.vertices[b];
      const auto i = push(p.x + q.x, p.y + q.y, p.z + q.z);
      mid[key] = i;
      return i;
    };
    std::vector<std::array<std::uint32_t, 3>> next;
    for (auto [a, b, c] : m.triangles) {
      const auto ab = midpoint(a, b), bc = midpoint(b, c), ca = midpoint(c, a);
      next.push_back({a, ab, ca});
      next.push_back({b, bc, ab});
      next.push_back({c, ca, bc});
      next.push_back({ab, bc, ca});
    }
    m.triangles = std::move(next);
  }
  return m;
}

}  // namespace fixtures
