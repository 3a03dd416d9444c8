#pragma once

// Incremental Bowyer-Watson Delaunay triangulation with exact integer
// predicates. Coordinates are snapped to a 2^22 grid over the bounding box
// for the predicates only; callers keep their own floating-point positions.

#include <array>
#include <cstdint>
#include <vector>

#include "striplab/tensor_core.hpp"

namespace striplab::detail {

class Delaunay {
 public:
  Delaunay(const Vec2& lo, const Vec2& hi);

  /// Inserts p and returns its vertex id (0-based over inserted points).
  /// A point that snaps onto an existing vertex returns that vertex's id.
  int insert(const Vec2& p);

  int vertex_count() const { return static_cast<int>(points_.size()) - 3; }

  /// True when the segment between vertices a and b is an edge.
  bool has_edge(int a, int b) const;

  /// Counterclockwise triangles not touching the enclosing super triangle.
  std::vector<std::array<int, 3>> triangles() const;

  /// Rebuilds the edge lookup used by has_edge.
  void index_edges();

 private:
  struct Tri {
    std::array<int, 3> v;
    std::array<int, 3> n;  // neighbour opposite v[i], -1 on the outer hull
    bool alive = true;
  };
  using IPoint = std::array<std::int64_t, 2>;

  IPoint snap(const Vec2& p) const;
  int locate(const IPoint& p);
  bool in_circle(const Tri& t, const IPoint& p) const;
  int new_tri(const std::array<int, 3>& v);

  Vec2 origin_;
  double scale_ = 1.0;
  std::vector<IPoint> points_;  // first three are the super vertices
  std::vector<Tri> tris_;
  std::vector<int> free_;
  std::vector<int> mark_;
  int stamp_ = 0;
  int last_ = 0;
  std::vector<std::uint64_t> edge_keys_;
};

}  // namespace striplab::detail
