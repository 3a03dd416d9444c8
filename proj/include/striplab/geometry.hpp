#pragma once

// Inclusion spine curves, the background domain, tube neighbourhoods and
// line quadrature along the spine.

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "striplab/emt.hpp"
#include "striplab/tensor_core.hpp"

namespace striplab {

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
GaussRule gauss_legendre(int order);

struct SegmentSpec {
  Vec2 p0;
  Vec2 p1;
};

/// Circular arc, counterclockwise from angle0 to angle1 (radians). A span of
/// 2*pi describes a closed circle.
struct ArcSpec {
  Vec2 center;
  double radius = 1.0;
  double angle0 = 0.0;
  double angle1 = 0.0;
};

/// Natural cubic spline through the control points (chord-length knots).
struct SplineSpec {
  std::vector<Vec2> control_points;
};

using CurveKind = std::variant<SegmentSpec, ArcSpec, SplineSpec>;

struct ClosestPoint {
  double s = 0.0;         // footpoint arclength
  double distance = 0.0;  // |p - x(s)|
};

/// Simple C3 curve parametrised by arclength s in [0, length()].
class Curve {
 public:
  static Curve segment(const Vec2& p0, const Vec2& p1);
  static Curve arc(const Vec2& center, double radius, double angle0, double angle1);
  static Curve spline(std::vector<Vec2> control_points);

  /// Same point set traversed in the opposite direction.
  Curve reversed() const;

  const CurveKind& kind() const { return kind_; }
  std::string kind_name() const;
  bool is_reversed() const { return reversed_; }

  double length() const { return length_; }
  bool closed() const;

  Vec2 point(double s) const;
  Vec2 tangent(double s) const;
  /// Signed curvature d(tau)/ds . (tau rotated +90 deg).
  double curvature(double s) const;

  /// Tangent is the unit velocity; the normal is the tangent rotated by -90
  /// degrees, flipped for clockwise closed curves so it points outward.
  Frame frame(double s) const;

  ClosestPoint closest_point(const Vec2& p) const;
  double distance(const Vec2& p) const { return closest_point(p).distance; }

  /// Sampled two-sided reach: the largest r such that the two discs of
  /// radius r tangent to the curve at each sample contain no other sample.
  /// +infinity for straight segments.
  double reach() const { return reach_; }

  /// Evenly spaced arclength samples (both ends included for open curves).
  std::vector<double> sample_arclengths(int count) const;

 private:
  struct SplineData;

  Curve() = default;
  static std::shared_ptr<const SplineData> build_spline(const std::vector<Vec2>& pts);
  void finalize();
  double raw_param(double s) const;  // arclength on the unreversed curve
  Vec2 raw_point(double s) const;
  Vec2 raw_tangent(double s) const;
  double raw_curvature(double s) const;

  CurveKind kind_;
  bool reversed_ = false;
  double length_ = 0.0;
  double reach_ = 0.0;
  bool clockwise_ = false;
  std::shared_ptr<const SplineData> spline_;
};

/// Frame at arclength s; throws GeometryError when s is outside [0, length].
Frame frame_at(const Curve& curve, double s);

/// Background domain Omega.
class Domain {
 public:
  struct Disk {
    Vec2 center;
    double radius = 1.0;
  };
  struct Polygon {
    std::vector<Vec2> vertices;  // counterclockwise, convex
  };

  static Domain disk(const Vec2& center, double radius);
  static Domain polygon(std::vector<Vec2> vertices);
  static Domain rectangle(const Vec2& lo, const Vec2& hi);

  bool is_disk() const { return std::holds_alternative<Disk>(shape_); }
  const Disk& as_disk() const { return std::get<Disk>(shape_); }
  const Polygon& as_polygon() const { return std::get<Polygon>(shape_); }

  bool contains(const Vec2& p) const;
  /// Unsigned distance from p to the boundary.
  double distance_to_boundary(const Vec2& p) const;
  /// True when p is on the boundary to `tol`.
  bool on_boundary(const Vec2& p, double tol = 1e-9) const;
  double area() const;
  double perimeter() const;
  Vec2 centroid() const;

 private:
  using Shape = std::variant<Disk, Polygon>;
  explicit Domain(Shape shape) : shape_(std::move(shape)) {}
  Shape shape_;
};

struct GeometryCheck {
  std::string name;
  double value = 0.0;
  double bound = 0.0;
  bool ok = false;
};

struct GeometryReport {
  std::vector<GeometryCheck> checks;
  bool ok() const;
  std::string text() const;
};

/// Checks dist(curve, boundary) >= 1/K, 1/K <= length <= K and
/// reach >= 1/K. Violations are reported, never thrown.
GeometryReport validate(const Curve& curve, const Domain& domain, double k);

struct TubeCoords {
  double s = 0.0;
  double h = 0.0;  // signed offset along frame(s).n
};

/// Normal coordinates (s, h) with point = x(s) + h n(s). Returns nullopt when
/// the point is beyond the reach or its footpoint is an end point of an open
/// curve while the point is not on the end normal (the rounded end caps).
std::optional<TubeCoords> signed_tube_coordinates(const Curve& curve, const Vec2& p);

/// The thin inclusion omega_eps = {x : dist(x, curve) < eps}.
struct TubeRegion {
  Curve curve;
  double half_width = 0.0;
  double trim_exponent = 0.45;

  /// eps^beta, the end-cap exclusion length of the trimmed tube.
  double trim_length() const;
  bool contains(const Vec2& p) const { return curve.distance(p) < half_width; }
  /// 2 eps L + pi eps^2 for open curves, 2 eps L for closed ones.
  double exact_area() const;
};

/// Throws GeometryError unless 0 < eps < reach and the tube stays inside the
/// domain.
void validate_tube(const TubeRegion& tube, const Domain& domain);

struct CurveNode {
  Vec2 point;
  double s = 0.0;
  double weight = 0.0;
  Frame frame;
};

/// Composite Gauss rule with `panels` equal panels on [trim, length - trim].
/// Closed curves have no end points and ignore `trim`.
std::vector<CurveNode> quadrature_nodes(const Curve& curve, int order, double trim, int panels = 16);

}  // namespace striplab
