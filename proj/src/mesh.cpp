#include "striplab/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>

#include "delaunay.hpp"
#include "striplab/errors.hpp"

namespace striplab {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kMaxRecoveryRounds = 60;

// ---------------------------------------------------------------------------
// Mesh size field

class SizeField {
 public:
  SizeField(const std::optional<TubeRegion>& tube, const MeshOptions& opt, double tube_size)
      : tube_(tube), opt_(opt), tube_size_(tube_size) {
    for (const Vec2& y : opt.boundary_points) anchors_.push_back({y, base(y) / opt.point_refinement});
  }

  double operator()(const Vec2& p) const {
    double s = base(p);
    for (const auto& [y, size] : anchors_) s = std::min(s, size + opt_.grading * (p - y).norm());
    return s;
  }

  double curve_distance(const Vec2& p) const { return tube_ ? tube_->curve.distance(p) : 0.0; }

 private:
  double base(const Vec2& p) const {
    double s = opt_.h;
    if (tube_) {
      const double d = std::max(0.0, tube_->curve.distance(p) - tube_->half_width);
      s = std::min(s, tube_size_ + opt_.grading * d);
    }
    return s;
  }

  const std::optional<TubeRegion>& tube_;
  const MeshOptions& opt_;
  double tube_size_;
  std::vector<std::pair<Vec2, double>> anchors_;
};

// A parametrised closed loop whose consecutive samples become constrained
// edges. Midpoints inserted during edge recovery are evaluated on the loop.
struct Loop {
  std::function<Vec2(double)> at;
  std::vector<double> params;  // increasing; the loop closes back to params[0]
  double period = 0.0;         // parameter length of the whole loop
};

struct Constraint {
  int a = 0, b = 0;
  int loop = 0;
  double ta = 0.0, tb = 0.0;  // tb may exceed the period for the closing edge
  bool boundary = false;
};

// Places points on [a, b] of a parametrised path with spacing following the
// size field: positions where the integral of |x'(t)| / size equals k * total / n.
std::vector<double> graded_params(const std::function<Vec2(double)>& at, double a, double b, const SizeField& size) {
  std::vector<double> ts{a}, phi{0.0};
  double t = a;
  const double span = b - a;
  int guard = 0;
  while (t < b) {
    const Vec2 p = at(t);
    const double probe = 1e-7 * span;
    const double speed = (at(t + probe) - p).norm() / probe;
    double dt = 0.1 * size(p) / speed;
    dt = std::min(dt, b - t);
    t += dt;
    const Vec2 q = at(t);
    const double local = 0.5 * (size(p) + size(q));
    phi.push_back(phi.back() + (q - p).norm() / local);
    ts.push_back(t);
    if (++guard > 10000000) throw MeshError("boundary point placement did not terminate");
  }
  const int n = std::max(1, static_cast<int>(std::lround(phi.back())));
  std::vector<double> out;
  out.reserve(n + 1);
  out.push_back(a);
  std::size_t j = 0;
  for (int k = 1; k < n; ++k) {
    const double target = phi.back() * k / n;
    while (phi[j + 1] < target) ++j;
    const double w = (target - phi[j]) / (phi[j + 1] - phi[j]);
    out.push_back(ts[j] + w * (ts[j + 1] - ts[j]));
  }
  out.push_back(b);
  return out;
}

// Hilbert index on a 2^16 grid for spatially coherent insertion order.
std::uint64_t hilbert_index(std::uint32_t x, std::uint32_t y) {
  constexpr std::uint32_t n = 1u << 16;
  std::uint64_t d = 0;
  for (std::uint32_t s = n / 2; s > 0; s /= 2) {
    const std::uint32_t rx = (x & s) > 0;
    const std::uint32_t ry = (y & s) > 0;
    d += static_cast<std::uint64_t>(s) * s * ((3 * rx) ^ ry);
    if (ry == 0) {
      if (rx == 1) {
        x = n - 1 - x;
        y = n - 1 - y;
      }
      std::swap(x, y);
    }
  }
  return d;
}

// Boundary loop of the domain, counterclockwise, with the fixed points
// (polygon vertices, evaluation points) as exact parameters.
Loop boundary_loop(const Domain& domain, const std::vector<Vec2>& fixed_points, const SizeField& size) {
  Loop loop;
  std::vector<double> fixed;
  if (domain.is_disk()) {
    const auto disk = domain.as_disk();
    loop.period = 2.0 * kPi;
    loop.at = [disk](double t) { return Vec2(disk.center + disk.radius * Vec2(std::cos(t), std::sin(t))); };
    for (const Vec2& y : fixed_points) {
      double a = std::atan2(y.y() - disk.center.y(), y.x() - disk.center.x());
      if (a < 0.0) a += 2.0 * kPi;
      fixed.push_back(a);
    }
  } else {
    const auto verts = domain.as_polygon().vertices;
    std::vector<double> cum{0.0};
    for (std::size_t i = 0; i < verts.size(); ++i) cum.push_back(cum.back() + (verts[(i + 1) % verts.size()] - verts[i]).norm());
    loop.period = cum.back();
    loop.at = [verts, cum](double t) {
      const double period = cum.back();
      t = std::fmod(t, period);
      if (t < 0.0) t += period;
      std::size_t i = std::upper_bound(cum.begin(), cum.end(), t) - cum.begin() - 1;
      i = std::min(i, verts.size() - 1);
      const double w = (t - cum[i]) / (cum[i + 1] - cum[i]);
      return Vec2((1.0 - w) * verts[i] + w * verts[(i + 1) % verts.size()]);
    };
    for (std::size_t i = 0; i < verts.size(); ++i) fixed.push_back(cum[i]);
    for (const Vec2& y : fixed_points) {
      double best = std::numeric_limits<double>::infinity(), param = 0.0;
      for (std::size_t i = 0; i < verts.size(); ++i) {
        const Vec2 a = verts[i], b = verts[(i + 1) % verts.size()];
        const double w = std::clamp((y - a).dot(b - a) / (b - a).squaredNorm(), 0.0, 1.0);
        const double d = (a + w * (b - a) - y).norm();
        if (d < best) {
          best = d;
          param = cum[i] + w * (cum[i + 1] - cum[i]);
        }
      }
      fixed.push_back(param);
    }
  }
  if (fixed.empty()) fixed.push_back(0.0);
  std::sort(fixed.begin(), fixed.end());
  fixed.erase(std::unique(fixed.begin(), fixed.end(), [&](double a, double b) { return b - a < 1e-12 * loop.period; }),
              fixed.end());
  if (fixed.size() > 1 && fixed.front() + loop.period - fixed.back() < 1e-12 * loop.period) fixed.pop_back();

  for (std::size_t i = 0; i < fixed.size(); ++i) {
    const double a = fixed[i];
    const double b = i + 1 < fixed.size() ? fixed[i + 1] : fixed[0] + loop.period;
    auto piece = graded_params(loop.at, a, b, size);
    piece.pop_back();
    loop.params.insert(loop.params.end(), piece.begin(), piece.end());
  }
  if (loop.params.size() < 3) throw MeshError("domain boundary needs at least three mesh nodes; reduce h");
  return loop;
}

struct TubeLayout {
  std::vector<Vec2> points;  // free points inside and around the tube
  std::vector<Loop> interfaces;
  double clearance = 0.0;    // background points closer than this to the curve are dropped
};

TubeLayout tube_layout(const TubeRegion& tube, double ts) {
  TubeLayout out;
  const Curve& c = tube.curve;
  const double eps = tube.half_width;
  const double length = c.length();
  const bool closed = c.closed();
  const int ns = std::max(2, static_cast<int>(std::ceil(length / ts)));
  const double ds = length / ns;
  const int nhalf = std::max(2, static_cast<int>(std::ceil(eps / ts - 1e-9)));
  const double row_gap = eps / nhalf;
  const double outer = eps + row_gap * std::sqrt(3.0) / 2.0;
  out.clearance = outer;

  auto offset_point = [&c](double s, double h) { return Vec2(c.point(s) + h * c.frame(s).n); };

  // Interior rows and the exterior row on each side. Rows are staggered so
  // that neighbouring rows form near-equilateral triangles; the interface
  // rows themselves are never staggered so they end on the cap arcs.
  auto add_row = [&](double h, bool staggered) {
    if (closed) {
      for (int i = 0; i < ns; ++i) out.points.push_back(offset_point((i + (staggered ? 0.5 : 0.0)) * ds, h));
    } else if (staggered) {
      for (int i = 0; i < ns; ++i) out.points.push_back(offset_point((i + 0.5) * ds, h));
    } else {
      for (int i = 0; i <= ns; ++i) out.points.push_back(offset_point(i * ds, h));
    }
  };
  for (int k = -(nhalf - 1); k <= nhalf - 1; ++k) add_row(k * row_gap, (nhalf - std::abs(k)) % 2 == 1);
  add_row(outer, true);
  add_row(-outer, true);

  if (!closed) {
    // Cap arcs around both ends at the interior row radii and outside.
    auto add_cap = [&](double radius, bool with_ends, bool at_end) {
      const int m = std::max(1, static_cast<int>(std::lround(kPi * radius / ts)));
      const double s = at_end ? length : 0.0;
      const Frame f = c.frame(s);
      const Vec2 x = c.point(s);
      const Vec2 axis = at_end ? Vec2(f.tau) : Vec2(-f.tau);
      for (int j = with_ends ? 0 : 1; j <= (with_ends ? m : m - 1); ++j) {
        const double phi = kPi / 2 - kPi * j / m;
        out.points.push_back(x + radius * (std::cos(phi) * axis + std::sin(phi) * f.n));
      }
    };
    for (bool at_end : {false, true}) {
      for (int k = 1; k < nhalf; ++k) add_cap(k * row_gap, (nhalf - k) % 2 == 1, at_end);
      add_cap(outer, true, at_end);
    }

    // One interface loop: +eps row, cap at s = L, -eps row backwards, cap at 0.
    Loop loop;
    loop.period = 4.0;
    loop.at = [c, eps, length](double t) {
      t = std::fmod(t, 4.0);
      if (t < 0.0) t += 4.0;
      if (t <= 1.0) {
        const double s = t * length;
        return Vec2(c.point(s) + eps * c.frame(s).n);
      }
      if (t <= 2.0) {
        const Frame f = c.frame(length);
        const double phi = kPi / 2 - kPi * (t - 1.0);
        return Vec2(c.point(length) + eps * (std::cos(phi) * f.tau + std::sin(phi) * f.n));
      }
      if (t <= 3.0) {
        const double s = length * (3.0 - t);
        return Vec2(c.point(s) - eps * c.frame(s).n);
      }
      const Frame f = c.frame(0.0);
      const double psi = -kPi / 2 + kPi * (t - 3.0);
      return Vec2(c.point(0.0) + eps * (std::cos(psi) * Vec2(-f.tau) + std::sin(psi) * f.n));
    };
    const int m = std::max(2, static_cast<int>(std::lround(kPi * eps / ts)));
    for (int i = 0; i < ns; ++i) loop.params.push_back(static_cast<double>(i) / ns);
    for (int j = 0; j < m; ++j) loop.params.push_back(1.0 + static_cast<double>(j) / m);
    for (int i = 0; i < ns; ++i) loop.params.push_back(2.0 + static_cast<double>(i) / ns);
    for (int j = 0; j < m; ++j) loop.params.push_back(3.0 + static_cast<double>(j) / m);
    out.interfaces.push_back(std::move(loop));
  } else {
    for (double sign : {1.0, -1.0}) {
      Loop loop;
      loop.period = 1.0;
      loop.at = [c, eps, length, sign](double t) {
        t = std::fmod(t, 1.0);
        if (t < 0.0) t += 1.0;
        const double s = t * length;
        return Vec2(c.point(s) + sign * eps * c.frame(s).n);
      };
      for (int i = 0; i < ns; ++i) loop.params.push_back(static_cast<double>(i) / ns);
      out.interfaces.push_back(std::move(loop));
    }
  }
  return out;
}

// Quadtree cell centres with cell size at most the local target size.
void quadtree_points(const Vec2& lo, double width, const SizeField& size, std::vector<Vec2>& out, int depth = 0) {
  const Vec2 centre = lo + Vec2(0.5 * width, 0.5 * width);
  if (width > size(centre) && depth < 16) {
    const double half = 0.5 * width;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) quadtree_points(lo + Vec2(i * half, j * half), half, size, out, depth + 1);
    return;
  }
  out.push_back(centre);
}

Vec2 edge_normal(const Vec2& a, const Vec2& b) {
  const Vec2 d = b - a;
  return Vec2(d.y(), -d.x()).normalized();
}

}  // namespace

// ---------------------------------------------------------------------------
// Mesh queries

double Mesh::triangle_area(int t) const {
  const auto& tri = triangles[t];
  const Vec2 a = nodes[tri[0]], b = nodes[tri[1]], c = nodes[tri[2]];
  return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x()));
}

double Mesh::area() const {
  double sum = 0.0;
  for (int t = 0; t < static_cast<int>(triangles.size()); ++t) sum += triangle_area(t);
  return sum;
}

double Mesh::tagged_area(int tag) const {
  double sum = 0.0;
  for (int t = 0; t < static_cast<int>(triangles.size()); ++t) {
    if (tags[t] == tag) sum += triangle_area(t);
  }
  return sum;
}

double Mesh::boundary_length() const {
  double sum = 0.0;
  for (const auto& e : boundary_edges) sum += (nodes[e.b] - nodes[e.a]).norm();
  return sum;
}

double Mesh::min_angle_degrees() const {
  double best = 180.0;
  for (const auto& tri : triangles) {
    for (int i = 0; i < 3; ++i) {
      const Vec2 p = nodes[tri[i]];
      const Vec2 u = nodes[tri[(i + 1) % 3]] - p, v = nodes[tri[(i + 2) % 3]] - p;
      const double ang = std::atan2(std::abs(u.x() * v.y() - u.y() * v.x()), u.dot(v));
      best = std::min(best, ang * 180.0 / kPi);
    }
  }
  return best;
}

int Mesh::find_node(const Vec2& p, double tol) const {
  int best = -1;
  double best_d = tol;
  for (int i = 0; i < static_cast<int>(nodes.size()); ++i) {
    const double d = (nodes[i] - p).norm();
    if (d <= best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// Generation

Mesh generate_mesh(const Domain& domain, const std::optional<TubeRegion>& tube, const MeshOptions& opt) {
  if (!(opt.h > 0.0)) throw InvalidArgument("mesh size h must be positive");
  if (!(opt.grading > 0.0)) throw InvalidArgument("mesh grading must be positive");
  if (!(opt.point_refinement >= 1.0)) throw InvalidArgument("point refinement factor must be >= 1");

  double ts = 0.0;
  if (tube) {
    validate_tube(*tube, domain);
    ts = opt.tube_size > 0.0 ? opt.tube_size : 0.5 * tube->half_width;
    if (ts > 0.5 * tube->half_width * (1.0 + 1e-12)) {
      throw MeshError("tube element size " + std::to_string(ts) + " cannot resolve half width " +
                      std::to_string(tube->half_width) + " with two layers");
    }
  }

  // Bounding box and boundary point checks.
  Vec2 lo, hi;
  if (domain.is_disk()) {
    const auto d = domain.as_disk();
    lo = d.center - Vec2(d.radius, d.radius);
    hi = d.center + Vec2(d.radius, d.radius);
  } else {
    lo = hi = domain.as_polygon().vertices.front();
    for (const Vec2& v : domain.as_polygon().vertices) {
      lo = lo.cwiseMin(v);
      hi = hi.cwiseMax(v);
    }
  }
  const double extent = std::max(hi.x() - lo.x(), hi.y() - lo.y());
  for (const Vec2& y : opt.boundary_points) {
    if (domain.distance_to_boundary(y) > 1e-9 * extent) {
      throw GeometryError("evaluation point (" + std::to_string(y.x()) + ", " + std::to_string(y.y()) +
                          ") is not on the domain boundary");
    }
  }

  const SizeField size(tube, opt, ts);

  // Constrained loops: the domain boundary first, then tube interfaces.
  std::vector<Loop> loops;
  loops.push_back(boundary_loop(domain, opt.boundary_points, size));
  std::vector<Vec2> free_points;
  double clearance = 0.0;
  if (tube) {
    TubeLayout layout = tube_layout(*tube, ts);
    free_points = std::move(layout.points);
    clearance = layout.clearance;
    for (auto& l : layout.interfaces) loops.push_back(std::move(l));
  }

  // Background points, pruned near the boundary and around the tube.
  std::vector<Vec2> background;
  quadtree_points(Vec2(0.5 * (lo.x() + hi.x()) - 0.5 * extent, 0.5 * (lo.y() + hi.y()) - 0.5 * extent), extent, size,
                  background);
  for (const Vec2& p : background) {
    if (!domain.contains(p)) continue;
    const double local = size(p);
    if (domain.distance_to_boundary(p) < 0.6 * local) continue;
    if (tube && tube->curve.distance(p) < clearance + 0.6 * local) continue;
    free_points.push_back(p);
  }

  // Assemble all points with their loop memberships, then insert in
  // Hilbert order.
  struct Pending {
    Vec2 p;
    int loop = -1;
    int index = -1;
  };
  std::vector<Pending> pending;
  for (int l = 0; l < static_cast<int>(loops.size()); ++l) {
    for (int i = 0; i < static_cast<int>(loops[l].params.size()); ++i) {
      pending.push_back({loops[l].at(loops[l].params[i]), l, i});
    }
  }
  for (const Vec2& p : free_points) pending.push_back({p, -1, -1});

  const Vec2 pad(1e-6 * extent, 1e-6 * extent);
  const Vec2 box_lo = lo - pad - Vec2(0.01 * extent, 0.01 * extent);
  const Vec2 box_hi = hi + pad + Vec2(0.01 * extent, 0.01 * extent);
  const double box = std::max(box_hi.x() - box_lo.x(), box_hi.y() - box_lo.y());
  std::vector<std::pair<std::uint64_t, int>> order;
  order.reserve(pending.size());
  for (int i = 0; i < static_cast<int>(pending.size()); ++i) {
    const Vec2 rel = (pending[i].p - box_lo) / box * 65535.0;
    order.push_back({hilbert_index(static_cast<std::uint32_t>(std::clamp(rel.x(), 0.0, 65535.0)),
                                   static_cast<std::uint32_t>(std::clamp(rel.y(), 0.0, 65535.0))),
                     i});
  }
  std::sort(order.begin(), order.end());

  detail::Delaunay dt(box_lo, box_lo + Vec2(box, box));
  std::vector<Vec2> nodes;
  auto insert = [&](const Vec2& p) {
    const int id = dt.insert(p);
    if (id == static_cast<int>(nodes.size())) nodes.push_back(p);
    return id;
  };
  std::vector<std::vector<int>> loop_ids(loops.size());
  for (std::size_t l = 0; l < loops.size(); ++l) loop_ids[l].resize(loops[l].params.size());
  for (const auto& [key, i] : order) {
    const int id = insert(pending[i].p);
    if (pending[i].loop >= 0) loop_ids[pending[i].loop][pending[i].index] = id;
  }

  std::vector<Constraint> constraints;
  for (int l = 0; l < static_cast<int>(loops.size()); ++l) {
    const auto& params = loops[l].params;
    const int n = static_cast<int>(params.size());
    for (int i = 0; i < n; ++i) {
      const double ta = params[i];
      const double tb = i + 1 < n ? params[i + 1] : params[0] + loops[l].period;
      const int a = loop_ids[l][i], b = loop_ids[l][(i + 1) % n];
      if (a == b) throw MeshError("constrained loop has coincident nodes; mesh sizes are too small for the grid");
      constraints.push_back({a, b, l, ta, tb, l == 0});
    }
  }

  // Recover constrained edges by splitting missing ones at their midpoint on
  // the exact loop.
  for (int round = 0;; ++round) {
    dt.index_edges();
    std::vector<Constraint> next;
    bool all_present = true;
    for (const Constraint& c : constraints) {
      if (dt.has_edge(c.a, c.b)) {
        next.push_back(c);
        continue;
      }
      all_present = false;
      const double tm = 0.5 * (c.ta + c.tb);
      const int m = insert(loops[c.loop].at(tm));
      if (m == c.a || m == c.b) throw MeshError("constrained edge recovery collapsed onto an end point");
      next.push_back({c.a, m, c.loop, c.ta, tm, c.boundary});
      next.push_back({m, c.b, c.loop, tm, c.tb, c.boundary});
    }
    constraints = std::move(next);
    if (all_present) break;
    if (round >= kMaxRecoveryRounds) throw MeshError("constrained edge recovery did not converge");
  }

  Mesh mesh;
  mesh.nodes = std::move(nodes);
  mesh.triangles = dt.triangles();
  std::sort(mesh.triangles.begin(), mesh.triangles.end());

  // Boundary edges in counterclockwise loop order.
  std::vector<Constraint> bnd;
  for (const Constraint& c : constraints) {
    if (c.boundary) bnd.push_back(c);
  }
  std::sort(bnd.begin(), bnd.end(), [](const Constraint& x, const Constraint& y) { return x.ta < y.ta; });
  for (const Constraint& c : bnd) {
    mesh.boundary_edges.push_back({c.a, c.b, edge_normal(mesh.nodes[c.a], mesh.nodes[c.b])});
  }

  // Validate: positive orientation and the outer boundary is exactly the
  // constrained loop.
  for (int t = 0; t < static_cast<int>(mesh.triangles.size()); ++t) {
    if (!(mesh.triangle_area(t) > 0.0)) throw MeshError("generated triangle has non-positive area");
  }
  {
    std::vector<std::pair<int, int>> edges;
    for (const auto& t : mesh.triangles) {
      for (int i = 0; i < 3; ++i) edges.push_back(std::minmax(t[i], t[(i + 1) % 3]));
    }
    std::sort(edges.begin(), edges.end());
    std::vector<std::pair<int, int>> single;
    for (std::size_t i = 0; i < edges.size();) {
      std::size_t j = i;
      while (j < edges.size() && edges[j] == edges[i]) ++j;
      if (j - i == 1) single.push_back(edges[i]);
      i = j;
    }
    std::vector<std::pair<int, int>> expected;
    for (const auto& e : mesh.boundary_edges) expected.push_back(std::minmax(e.a, e.b));
    std::sort(expected.begin(), expected.end());
    if (single != expected) throw MeshError("triangulation boundary does not match the domain boundary");
  }

  mesh.tags.assign(mesh.triangles.size(), kBackground);
  if (tube) {
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
      const auto& tri = mesh.triangles[t];
      const Vec2 g = (mesh.nodes[tri[0]] + mesh.nodes[tri[1]] + mesh.nodes[tri[2]]) / 3.0;
      if (tube->contains(g)) mesh.tags[t] = kInclusion;
    }
  }
  return mesh;
}

Mesh structured_rectangle_mesh(const Vec2& lo, const Vec2& hi, int nx, int ny) {
  if (nx < 1 || ny < 1) throw InvalidArgument("structured mesh needs at least one cell per direction");
  if (!(hi.x() > lo.x() && hi.y() > lo.y())) throw InvalidArgument("structured mesh needs hi > lo");
  Mesh mesh;
  auto id = [nx](int i, int j) { return j * (nx + 1) + i; };
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i)
      mesh.nodes.emplace_back(lo.x() + (hi.x() - lo.x()) * i / nx, lo.y() + (hi.y() - lo.y()) * j / ny);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const int a = id(i, j), b = id(i + 1, j), c = id(i + 1, j + 1), d = id(i, j + 1);
      if ((i + j) % 2 == 0) {
        mesh.triangles.push_back({a, b, c});
        mesh.triangles.push_back({a, c, d});
      } else {
        mesh.triangles.push_back({a, b, d});
        mesh.triangles.push_back({b, c, d});
      }
    }
  mesh.tags.assign(mesh.triangles.size(), kBackground);
  auto add = [&](int a, int b) { mesh.boundary_edges.push_back({a, b, edge_normal(mesh.nodes[a], mesh.nodes[b])}); };
  for (int i = 0; i < nx; ++i) add(id(i, 0), id(i + 1, 0));
  for (int j = 0; j < ny; ++j) add(id(nx, j), id(nx, j + 1));
  for (int i = nx; i > 0; --i) add(id(i, ny), id(i - 1, ny));
  for (int j = ny; j > 0; --j) add(id(0, j), id(0, j - 1));
  return mesh;
}

// ---------------------------------------------------------------------------
// Text I/O

void write_mesh(const Mesh& mesh, std::ostream& os) {
  const auto old = os.precision(17);
  os << "nodes " << mesh.nodes.size() << " triangles " << mesh.triangles.size() << " edges "
     << mesh.boundary_edges.size() << "\n";
  for (const Vec2& p : mesh.nodes) os << p.x() << " " << p.y() << "\n";
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tri = mesh.triangles[t];
    os << tri[0] << " " << tri[1] << " " << tri[2] << " " << mesh.tags[t] << "\n";
  }
  for (const auto& e : mesh.boundary_edges) os << e.a << " " << e.b << "\n";
  os.precision(old);
}

Mesh read_mesh(std::istream& is) {
  std::string w1, w2, w3;
  std::size_t n = 0, t = 0, e = 0;
  if (!(is >> w1 >> n >> w2 >> t >> w3 >> e) || w1 != "nodes" || w2 != "triangles" || w3 != "edges") {
    throw MeshError("mesh header must read 'nodes N triangles T edges E'");
  }
  Mesh mesh;
  mesh.nodes.resize(n);
  for (auto& p : mesh.nodes) {
    if (!(is >> p.x() >> p.y())) throw MeshError("truncated node list");
  }
  mesh.triangles.resize(t);
  mesh.tags.resize(t);
  for (std::size_t k = 0; k < t; ++k) {
    auto& tri = mesh.triangles[k];
    if (!(is >> tri[0] >> tri[1] >> tri[2] >> mesh.tags[k])) throw MeshError("truncated triangle list");
    for (int v : tri) {
      if (v < 0 || static_cast<std::size_t>(v) >= n) throw MeshError("triangle references a missing node");
    }
  }
  for (std::size_t k = 0; k < e; ++k) {
    int a = 0, b = 0;
    if (!(is >> a >> b)) throw MeshError("truncated edge list");
    if (a < 0 || b < 0 || static_cast<std::size_t>(a) >= n || static_cast<std::size_t>(b) >= n) {
      throw MeshError("edge references a missing node");
    }
    mesh.boundary_edges.push_back({a, b, edge_normal(mesh.nodes[a], mesh.nodes[b])});
  }
  return mesh;
}

}  // namespace striplab
