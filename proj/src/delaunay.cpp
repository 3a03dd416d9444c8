#include "delaunay.hpp"

#include <algorithm>
#include <cmath>

#include "striplab/errors.hpp"

namespace striplab::detail {

namespace {

constexpr double kGrid = 4194304.0;  // 2^22
constexpr std::int64_t kSuper = std::int64_t{1} << 26;

using i128 = __int128;

std::int64_t orient(const std::array<std::int64_t, 2>& a, const std::array<std::int64_t, 2>& b,
                    const std::array<std::int64_t, 2>& c) {
  // Differences are below 2^28, so the products fit in 64 bits.
  const std::int64_t v = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
  return v;
}

std::uint64_t edge_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) | static_cast<std::uint32_t>(b);
}

}  // namespace

Delaunay::Delaunay(const Vec2& lo, const Vec2& hi) : origin_(lo) {
  const double extent = std::max(hi.x() - lo.x(), hi.y() - lo.y());
  if (!(extent > 0.0)) throw MeshError("empty bounding box");
  scale_ = kGrid / (extent * 1.0000001);
  points_.push_back({-kSuper, -kSuper});
  points_.push_back({2 * kSuper, -kSuper});
  points_.push_back({-kSuper, 2 * kSuper});
  tris_.push_back({{0, 1, 2}, {-1, -1, -1}, true});
  last_ = 0;
}

Delaunay::IPoint Delaunay::snap(const Vec2& p) const {
  const double x = std::round((p.x() - origin_.x()) * scale_);
  const double y = std::round((p.y() - origin_.y()) * scale_);
  if (x < -1.0 || y < -1.0 || x > kGrid + 1.0 || y > kGrid + 1.0) {
    throw MeshError("point outside the triangulation bounding box");
  }
  return {static_cast<std::int64_t>(x), static_cast<std::int64_t>(y)};
}

bool Delaunay::in_circle(const Tri& t, const IPoint& p) const {
  const IPoint& a = points_[t.v[0]];
  const IPoint& b = points_[t.v[1]];
  const IPoint& c = points_[t.v[2]];
  const i128 adx = a[0] - p[0], ady = a[1] - p[1];
  const i128 bdx = b[0] - p[0], bdy = b[1] - p[1];
  const i128 cdx = c[0] - p[0], cdy = c[1] - p[1];
  const i128 alift = adx * adx + ady * ady;
  const i128 blift = bdx * bdx + bdy * bdy;
  const i128 clift = cdx * cdx + cdy * cdy;
  const i128 det = alift * (bdx * cdy - bdy * cdx) + blift * (cdx * ady - cdy * adx) + clift * (adx * bdy - ady * bdx);
  return det > 0;
}

int Delaunay::new_tri(const std::array<int, 3>& v) {
  if (!free_.empty()) {
    const int id = free_.back();
    free_.pop_back();
    tris_[id] = Tri{v, {-1, -1, -1}, true};
    mark_[id] = 0;
    return id;
  }
  tris_.push_back(Tri{v, {-1, -1, -1}, true});
  mark_.push_back(0);
  return static_cast<int>(tris_.size()) - 1;
}

int Delaunay::locate(const IPoint& p) {
  int t = last_;
  std::size_t steps = 0;
  int rotate = 0;
  while (true) {
    const Tri& tri = tris_[t];
    bool moved = false;
    for (int k = 0; k < 3; ++k) {
      const int i = (k + rotate) % 3;
      const IPoint& a = points_[tri.v[(i + 1) % 3]];
      const IPoint& b = points_[tri.v[(i + 2) % 3]];
      if (orient(a, b, p) < 0) {
        if (tri.n[i] < 0) throw MeshError("point location left the triangulation");
        t = tri.n[i];
        moved = true;
        break;
      }
    }
    if (!moved) return t;
    rotate = (rotate + 1) % 3;
    if (++steps > 4 * tris_.size() + 100) {
      // Fall back to a linear scan; never expected for Delaunay meshes.
      for (int id = 0; id < static_cast<int>(tris_.size()); ++id) {
        const Tri& c = tris_[id];
        if (!c.alive) continue;
        bool inside = true;
        for (int i = 0; i < 3 && inside; ++i) {
          inside = orient(points_[c.v[(i + 1) % 3]], points_[c.v[(i + 2) % 3]], p) >= 0;
        }
        if (inside) return id;
      }
      throw MeshError("point location failed");
    }
  }
}

int Delaunay::insert(const Vec2& pos) {
  const IPoint p = snap(pos);
  if (mark_.size() < tris_.size()) mark_.resize(tris_.size(), 0);
  const int start = locate(p);
  for (int v : tris_[start].v) {
    if (points_[v] == p) return v - 3;
  }
  const int id = static_cast<int>(points_.size());
  points_.push_back(p);

  // Cavity: triangles whose circumcircle strictly contains p.
  ++stamp_;
  const int in_cavity = 2 * stamp_, rejected = 2 * stamp_ + 1;
  std::vector<int> cavity{start};
  mark_[start] = in_cavity;
  struct BoundaryEdge {
    int a, b, outside;
  };
  std::vector<BoundaryEdge> boundary;
  for (std::size_t k = 0; k < cavity.size(); ++k) {
    const int t = cavity[k];
    for (int i = 0; i < 3; ++i) {
      const int nb = tris_[t].n[i];
      bool outside = nb < 0;
      if (!outside && mark_[nb] != in_cavity) {
        if (mark_[nb] != rejected && in_circle(tris_[nb], p)) {
          mark_[nb] = in_cavity;
          cavity.push_back(nb);
        } else {
          mark_[nb] = rejected;
          outside = true;
        }
      }
      if (outside) boundary.push_back({tris_[t].v[(i + 1) % 3], tris_[t].v[(i + 2) % 3], nb});
    }
  }
  // A neighbour rejected early may have been accepted later from another
  // cavity triangle; drop edges that are now interior.
  std::erase_if(boundary, [&](const BoundaryEdge& e) { return e.outside >= 0 && mark_[e.outside] == in_cavity; });

  for (int t : cavity) {
    tris_[t].alive = false;
    free_.push_back(t);
  }
  std::vector<int> created;
  created.reserve(boundary.size());
  for (const auto& e : boundary) {
    if (orient(points_[e.a], points_[e.b], p) <= 0) throw MeshError("degenerate cavity in Delaunay insertion");
    const int nt = new_tri({e.a, e.b, id});
    tris_[nt].n[2] = e.outside;
    if (e.outside >= 0) {
      // Identify the shared edge by its vertices: slot ids of the cavity
      // triangles are being reused while this loop runs.
      Tri& out = tris_[e.outside];
      for (int j = 0; j < 3; ++j) {
        if (out.v[j] != e.a && out.v[j] != e.b) out.n[j] = nt;
      }
    }
    created.push_back(nt);
  }
  for (std::size_t i = 0; i < created.size(); ++i) {
    Tri& ti = tris_[created[i]];
    for (std::size_t j = 0; j < created.size(); ++j) {
      if (i == j) continue;
      const Tri& tj = tris_[created[j]];
      if (tj.v[0] == ti.v[1]) ti.n[0] = created[j];  // edge b -> p
      if (tj.v[1] == ti.v[0]) ti.n[1] = created[j];  // edge p -> a
    }
  }
  last_ = created.front();
  return id - 3;
}

void Delaunay::index_edges() {
  edge_keys_.clear();
  for (const Tri& t : tris_) {
    if (!t.alive) continue;
    for (int i = 0; i < 3; ++i) {
      const int a = t.v[i], b = t.v[(i + 1) % 3];
      if (a >= 3 && b >= 3) edge_keys_.push_back(edge_key(a - 3, b - 3));
    }
  }
  std::sort(edge_keys_.begin(), edge_keys_.end());
  edge_keys_.erase(std::unique(edge_keys_.begin(), edge_keys_.end()), edge_keys_.end());
}

bool Delaunay::has_edge(int a, int b) const {
  return std::binary_search(edge_keys_.begin(), edge_keys_.end(), edge_key(a, b));
}

std::vector<std::array<int, 3>> Delaunay::triangles() const {
  std::vector<std::array<int, 3>> out;
  for (const Tri& t : tris_) {
    if (!t.alive || t.v[0] < 3 || t.v[1] < 3 || t.v[2] < 3) continue;
    out.push_back({t.v[0] - 3, t.v[1] - 3, t.v[2] - 3});
  }
  return out;
}

}  // namespace striplab::detail
