#pragma once

// Conforming triangulations of the background domain with an optional thin
// tube inclusion whose boundary is resolved by mesh edges.

#include <array>
#include <iosfwd>
#include <optional>
#include <vector>

#include "striplab/geometry.hpp"

namespace striplab {

enum RegionTag : int { kBackground = 0, kInclusion = 1 };

struct BoundaryEdge {
  int a = 0;
  int b = 0;
  Vec2 normal;  // outward unit normal of the straight edge a -> b
};

struct Mesh {
  std::vector<Vec2> nodes;
  std::vector<std::array<int, 3>> triangles;  // counterclockwise
  std::vector<int> tags;                      // RegionTag per triangle
  std::vector<BoundaryEdge> boundary_edges;   // counterclockwise around the domain

  double triangle_area(int t) const;
  double area() const;
  double tagged_area(int tag) const;
  double boundary_length() const;
  /// Smallest interior angle over all triangles, in degrees.
  double min_angle_degrees() const;
  /// Index of the node within `tol` of p, or -1.
  int find_node(const Vec2& p, double tol = 1e-12) const;
};

struct MeshOptions {
  /// Largest element size away from the tube.
  double h = 0.1;
  /// Element size inside the tube; 0 selects half_width / 2.
  double tube_size = 0.0;
  /// Growth rate of the element size with distance from the tube.
  double grading = 0.25;
  /// Boundary points that must be mesh nodes.
  std::vector<Vec2> boundary_points;
  /// Element size near `boundary_points` is the local size divided by this.
  double point_refinement = 4.0;
};

/// Triangulates `domain`; with a tube, the tube boundary (including rounded
/// end caps for open curves) is a union of mesh edges and the triangles
/// inside are tagged kInclusion. Throws GeometryError for an invalid tube and
/// MeshError when the sizes cannot resolve it (tube size above half width).
Mesh generate_mesh(const Domain& domain, const std::optional<TubeRegion>& tube, const MeshOptions& options);

/// Criss-cross-free structured mesh of [lo, hi] with nx by ny cells, each
/// split along alternating diagonals.
Mesh structured_rectangle_mesh(const Vec2& lo, const Vec2& hi, int nx, int ny);

/// Plain text format: "nodes N triangles T edges E", then N lines "x y",
/// T lines "i j k tag", E lines "i j".
void write_mesh(const Mesh& mesh, std::ostream& os);
Mesh read_mesh(std::istream& is);

}  // namespace striplab
