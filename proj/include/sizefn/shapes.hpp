#pragma once

// Triangulated test surfaces: unit icosphere and the boundary of [-1,1]^3.

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

#include "sizefn/size_pair.hpp"

namespace sizefn {

/// Icosahedron refined `subdivisions` times by edge midpoints, projected to
/// the unit sphere. 10 * 4^s + 2 vertices.
inline TriangleMesh icosphere(unsigned subdivisions) {
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  TriangleMesh mesh;
  mesh.positions = {{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
                    {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
  mesh.triangles = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                    {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                    {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                    {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
  auto normalize = [](Point3 p) {
    const double n = std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]);
    return Point3{p[0] / n, p[1] / n, p[2] / n};
  };
  for (auto& p : mesh.positions) p = normalize(p);
  for (unsigned s = 0; s < subdivisions; ++s) {
    std::map<std::pair<VertexId, VertexId>, VertexId> midpoint;
    auto mid = [&](VertexId a, VertexId b) {
      const auto key = std::minmax(a, b);
      auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      const auto& pa = mesh.positions[a];
      const auto& pb = mesh.positions[b];
      mesh.positions.push_back(
          normalize({(pa[0] + pb[0]) / 2, (pa[1] + pb[1]) / 2, (pa[2] + pb[2]) / 2}));
      const auto id = static_cast<VertexId>(mesh.positions.size() - 1);
      midpoint.emplace(key, id);
      return id;
    };
    std::vector<Triangle> next;
    next.reserve(mesh.triangles.size() * 4);
    for (const auto& tri : mesh.triangles) {
      const auto ab = mid(tri[0], tri[1]);
      const auto bc = mid(tri[1], tri[2]);
      const auto ca = mid(tri[2], tri[0]);
      next.push_back({tri[0], ab, ca});
      next.push_back({tri[1], bc, ab});
      next.push_back({tri[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    mesh.triangles = std::move(next);
  }
  return mesh;
}

/// Surface of the cube [-1,1]^3 with an m x m grid on every face, each cell
/// split into two triangles. 6m^2 + 2 vertices.
inline TriangleMesh cube_surface(unsigned m) {
  if (m == 0) throw std::invalid_argument("cube_surface needs m >= 1");
  TriangleMesh mesh;
  std::map<std::array<long, 3>, VertexId> index;
  auto vertex = [&](const std::array<long, 3>& key) {
    auto it = index.find(key);
    if (it != index.end()) return it->second;
    const double h = static_cast<double>(m);
    mesh.positions.push_back({key[0] / h - 1.0, key[1] / h - 1.0, key[2] / h - 1.0});
    const auto id = static_cast<VertexId>(mesh.positions.size() - 1);
    index.emplace(key, id);
    return id;
  };
  const long full = 2 * static_cast<long>(m);
  // Lattice coordinates run over 0..2m; axis `a` is fixed at 0 or 2m.
  for (int a = 0; a < 3; ++a) {
    const int u = (a + 1) % 3;
    const int w = (a + 2) % 3;
    for (long side : {0L, full}) {
      auto key = [&](long i, long j) {
        std::array<long, 3> k{};
        k[a] = side;
        k[u] = i;
        k[w] = j;
        return k;
      };
      for (long i = 0; i < full; i += 2)
        for (long j = 0; j < full; j += 2) {
          const auto v00 = vertex(key(i, j));
          const auto v10 = vertex(key(i + 2, j));
          const auto v11 = vertex(key(i + 2, j + 2));
          const auto v01 = vertex(key(i, j + 2));
          if (side == 0) {
            mesh.triangles.push_back({v00, v11, v10});
            mesh.triangles.push_back({v00, v01, v11});
          } else {
            mesh.triangles.push_back({v00, v10, v11});
            mesh.triangles.push_back({v00, v11, v01});
          }
        }
    }
  }
  return mesh;
}

/// Size graph on a mesh whose k measuring components are computed from positions.
inline SizeGraph mesh_with_function(const TriangleMesh& mesh, std::size_t k,
                                    const std::function<std::vector<double>(const Point3&)>& phi) {
  std::vector<std::vector<double>> rows;
  rows.reserve(mesh.positions.size());
  for (const auto& p : mesh.positions) {
    rows.push_back(phi(p));
    if (rows.back().size() != k) throw std::invalid_argument("measuring function arity mismatch");
  }
  return make_mesh_graph(mesh, rows);
}

/// phi = (|x|, |z|).
inline SizeGraph abs_xz_graph(const TriangleMesh& mesh) {
  return mesh_with_function(mesh, 2, [](const Point3& p) {
    return std::vector<double>{std::abs(p[0]), std::abs(p[2])};
  });
}

/// phi = (x, z).
inline SizeGraph xz_graph(const TriangleMesh& mesh) {
  return mesh_with_function(mesh, 2, [](const Point3& p) { return std::vector<double>{p[0], p[2]}; });
}

}  // namespace sizefn
