#include "striplab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "striplab/errors.hpp"

namespace striplab {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kReachSamples = 600;
constexpr int kSplineGauss = 16;
constexpr int kCurvatureSamples = 4096;

Vec2 rotate_minus90(const Vec2& v) { return {v.y(), -v.x()}; }

double segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double len2 = ab.squaredNorm();
  const double t = len2 > 0.0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
  return (p - (a + t * ab)).norm();
}

}  // namespace

GaussRule gauss_legendre(int order) {
  if (order < 1) throw InvalidArgument("Gauss-Legendre order must be >= 1");
  GaussRule rule;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  for (int i = 0; i < (order + 1) / 2; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (order + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= order; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      if (order == 1) p0 = 1.0;
      dp = order * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute the derivative at the converged root.
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= order; ++k) {
      const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = pk;
    }
    if (order == 1) {
      rule.nodes[0] = 0.0;
      rule.weights[0] = 2.0;
      return rule;
    }
    dp = order * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[order - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[order - 1 - i] = w;
  }
  return rule;
}

// ---------------------------------------------------------------------------
// Spline support

struct Curve::SplineData {
  // Piece i covers parameter [knots[i], knots[i+1]], x(t) = a + b dt + c dt^2 + d dt^3.
  std::vector<double> knots;
  std::vector<std::array<Vec2, 4>> coeffs;
  std::vector<double> cumulative;  // arclength at each knot

  Vec2 eval(int i, double t) const {
    const double dt = t - knots[i];
    const auto& c = coeffs[i];
    return c[0] + dt * (c[1] + dt * (c[2] + dt * c[3]));
  }
  Vec2 deriv(int i, double t) const {
    const double dt = t - knots[i];
    const auto& c = coeffs[i];
    return c[1] + dt * (2.0 * c[2] + dt * 3.0 * c[3]);
  }
  Vec2 deriv2(int i, double t) const {
    const double dt = t - knots[i];
    const auto& c = coeffs[i];
    return 2.0 * c[2] + 6.0 * dt * c[3];
  }
  double piece_arclength(int i, double t) const {
    static const GaussRule rule = gauss_legendre(kSplineGauss);
    const double a = knots[i];
    const double half = 0.5 * (t - a);
    double sum = 0.0;
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
      sum += rule.weights[q] * deriv(i, a + half * (rule.nodes[q] + 1.0)).norm();
    }
    return sum * half;
  }
  // Piece index and parameter for arclength s.
  std::pair<int, double> locate(double s) const {
    const int pieces = static_cast<int>(coeffs.size());
    int i = static_cast<int>(std::upper_bound(cumulative.begin(), cumulative.end(), s) - cumulative.begin()) - 1;
    i = std::clamp(i, 0, pieces - 1);
    const double target = s - cumulative[i];
    const double span = cumulative[i + 1] - cumulative[i];
    double lo = knots[i], hi = knots[i + 1];
    double t = lo + (hi - lo) * std::clamp(target / span, 0.0, 1.0);
    for (int iter = 0; iter < 50; ++iter) {
      const double f = piece_arclength(i, t) - target;
      if (f > 0.0) hi = t; else lo = t;
      const double step = f / deriv(i, t).norm();
      double next = t - step;
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      if (std::abs(next - t) < 1e-15 * (1.0 + std::abs(t))) {
        t = next;
        break;
      }
      t = next;
    }
    return {i, t};
  }
};

// Natural cubic spline via the tridiagonal second-derivative system.
std::shared_ptr<const Curve::SplineData> Curve::build_spline(const std::vector<Vec2>& pts) {
  const int n = static_cast<int>(pts.size());
  auto data = std::make_shared<Curve::SplineData>();
  data->knots.resize(n);
  data->knots[0] = 0.0;
  for (int i = 1; i < n; ++i) {
    const double chord = (pts[i] - pts[i - 1]).norm();
    if (chord <= 0.0) throw GeometryError("spline control points must be distinct");
    data->knots[i] = data->knots[i - 1] + chord;
  }
  // Second derivatives m_i with m_0 = m_{n-1} = 0.
  std::vector<Vec2> m(n, Vec2::Zero());
  if (n > 2) {
    std::vector<double> diag(n - 2), upper(n - 2), lower(n - 2);
    std::vector<Vec2> rhs(n - 2);
    for (int i = 1; i < n - 1; ++i) {
      const double h0 = data->knots[i] - data->knots[i - 1];
      const double h1 = data->knots[i + 1] - data->knots[i];
      lower[i - 1] = h0;
      diag[i - 1] = 2.0 * (h0 + h1);
      upper[i - 1] = h1;
      rhs[i - 1] = 6.0 * ((pts[i + 1] - pts[i]) / h1 - (pts[i] - pts[i - 1]) / h0);
    }
    // Thomas algorithm.
    for (int i = 1; i < n - 2; ++i) {
      const double w = lower[i] / diag[i - 1];
      diag[i] -= w * upper[i - 1];
      rhs[i] -= w * rhs[i - 1];
    }
    m[n - 2] = rhs[n - 3] / diag[n - 3];
    for (int i = n - 4; i >= 0; --i) m[i + 1] = (rhs[i] - upper[i] * m[i + 2]) / diag[i];
  }
  data->coeffs.resize(n - 1);
  for (int i = 0; i < n - 1; ++i) {
    const double h = data->knots[i + 1] - data->knots[i];
    auto& c = data->coeffs[i];
    c[0] = pts[i];
    c[1] = (pts[i + 1] - pts[i]) / h - h * (2.0 * m[i] + m[i + 1]) / 6.0;
    c[2] = 0.5 * m[i];
    c[3] = (m[i + 1] - m[i]) / (6.0 * h);
  }
  data->cumulative.resize(n);
  data->cumulative[0] = 0.0;
  for (int i = 0; i < n - 1; ++i) {
    data->cumulative[i + 1] = data->cumulative[i] + data->piece_arclength(i, data->knots[i + 1]);
  }
  return data;
}

// ---------------------------------------------------------------------------
// Curve

Curve Curve::segment(const Vec2& p0, const Vec2& p1) {
  if ((p1 - p0).norm() <= 0.0) throw GeometryError("segment end points coincide");
  Curve c;
  c.kind_ = SegmentSpec{p0, p1};
  c.finalize();
  return c;
}

Curve Curve::arc(const Vec2& center, double radius, double angle0, double angle1) {
  if (!(radius > 0.0)) throw GeometryError("arc radius must be positive");
  const double span = std::abs(angle1 - angle0);
  if (!(span > 0.0) || span > 2.0 * kPi + 1e-12) throw GeometryError("arc span must be in (0, 2*pi]");
  Curve c;
  c.kind_ = ArcSpec{center, radius, angle0, angle1};
  c.finalize();
  return c;
}

Curve Curve::spline(std::vector<Vec2> control_points) {
  if (control_points.size() < 2) throw GeometryError("spline needs at least two control points");
  if ((control_points.front() - control_points.back()).norm() == 0.0) {
    throw GeometryError("closed splines are not supported");
  }
  Curve c;
  c.spline_ = build_spline(control_points);
  c.kind_ = SplineSpec{std::move(control_points)};
  c.finalize();
  return c;
}

Curve Curve::reversed() const {
  Curve c = *this;
  c.reversed_ = !reversed_;
  c.finalize();
  return c;
}

std::string Curve::kind_name() const {
  if (std::holds_alternative<SegmentSpec>(kind_)) return "segment";
  if (std::holds_alternative<ArcSpec>(kind_)) return "arc";
  return "spline";
}

bool Curve::closed() const {
  if (const auto* a = std::get_if<ArcSpec>(&kind_)) return std::abs(a->angle1 - a->angle0) >= 2.0 * kPi - 1e-12;
  return false;
}

void Curve::finalize() {
  if (const auto* seg = std::get_if<SegmentSpec>(&kind_)) {
    length_ = (seg->p1 - seg->p0).norm();
  } else if (const auto* a = std::get_if<ArcSpec>(&kind_)) {
    length_ = a->radius * std::abs(a->angle1 - a->angle0);
  } else {
    length_ = spline_->cumulative.back();
  }

  clockwise_ = false;
  if (closed()) {
    double area2 = 0.0;
    const auto ss = sample_arclengths(256);
    for (std::size_t i = 0; i < ss.size(); ++i) {
      const Vec2 p = point(ss[i]);
      const Vec2 q = point(ss[(i + 1) % ss.size()]);
      area2 += p.x() * q.y() - q.x() * p.y();
    }
    clockwise_ = area2 < 0.0;
  }

  // Sampled two-disc reach: the disc of radius r centred at x_i +- r n_i
  // excludes x_j iff r <= |d|^2 / (2 |d . n_i|), d = x_j - x_i.
  const auto ss = sample_arclengths(kReachSamples);
  std::vector<Vec2> xs, ns;
  for (double s : ss) {
    xs.push_back(point(s));
    ns.push_back(rotate_minus90(tangent(s)));
  }
  double reach = std::numeric_limits<double>::infinity();
  for (double s : sample_arclengths(kCurvatureSamples)) {
    const double k = std::abs(curvature(s));
    if (k > 0.0) reach = std::min(reach, 1.0 / k);
  }
  for (std::size_t i = 0; i < xs.size(); ++i) {
    for (std::size_t j = 0; j < xs.size(); ++j) {
      if (i == j) continue;
      const Vec2 d = xs[j] - xs[i];
      const double dn = std::abs(d.dot(ns[i]));
      if (dn <= 1e-14 * d.norm()) continue;
      reach = std::min(reach, d.squaredNorm() / (2.0 * dn));
    }
  }
  reach_ = reach > 1e8 * length_ ? std::numeric_limits<double>::infinity() : reach;
}

double Curve::raw_param(double s) const { return reversed_ ? length_ - s : s; }

Vec2 Curve::raw_point(double s) const {
  if (const auto* seg = std::get_if<SegmentSpec>(&kind_)) {
    return seg->p0 + (s / length_) * (seg->p1 - seg->p0);
  }
  if (const auto* a = std::get_if<ArcSpec>(&kind_)) {
    const double sign = a->angle1 >= a->angle0 ? 1.0 : -1.0;
    const double th = a->angle0 + sign * s / a->radius;
    return a->center + a->radius * Vec2(std::cos(th), std::sin(th));
  }
  const auto [i, t] = spline_->locate(s);
  return spline_->eval(i, t);
}

Vec2 Curve::raw_tangent(double s) const {
  if (const auto* seg = std::get_if<SegmentSpec>(&kind_)) return (seg->p1 - seg->p0) / length_;
  if (const auto* a = std::get_if<ArcSpec>(&kind_)) {
    const double sign = a->angle1 >= a->angle0 ? 1.0 : -1.0;
    const double th = a->angle0 + sign * s / a->radius;
    return sign * Vec2(-std::sin(th), std::cos(th));
  }
  const auto [i, t] = spline_->locate(s);
  return spline_->deriv(i, t).normalized();
}

double Curve::raw_curvature(double s) const {
  if (std::holds_alternative<SegmentSpec>(kind_)) return 0.0;
  if (const auto* a = std::get_if<ArcSpec>(&kind_)) return (a->angle1 >= a->angle0 ? 1.0 : -1.0) / a->radius;
  const auto [i, t] = spline_->locate(s);
  const Vec2 d1 = spline_->deriv(i, t);
  const Vec2 d2 = spline_->deriv2(i, t);
  return (d1.x() * d2.y() - d1.y() * d2.x()) / std::pow(d1.norm(), 3);
}

Vec2 Curve::point(double s) const { return raw_point(raw_param(std::clamp(s, 0.0, length_))); }

Vec2 Curve::tangent(double s) const {
  const Vec2 t = raw_tangent(raw_param(std::clamp(s, 0.0, length_)));
  return reversed_ ? Vec2(-t) : t;
}

double Curve::curvature(double s) const {
  const double k = raw_curvature(raw_param(std::clamp(s, 0.0, length_)));
  return reversed_ ? -k : k;
}

Frame Curve::frame(double s) const {
  const Vec2 tau = tangent(s);
  Vec2 n = rotate_minus90(tau);
  if (clockwise_) n = -n;
  return {n, tau};
}

ClosestPoint Curve::closest_point(const Vec2& p) const {
  double raw_s = 0.0;
  if (const auto* seg = std::get_if<SegmentSpec>(&kind_)) {
    const Vec2 ab = seg->p1 - seg->p0;
    raw_s = std::clamp((p - seg->p0).dot(ab) / ab.squaredNorm(), 0.0, 1.0) * length_;
  } else if (const auto* a = std::get_if<ArcSpec>(&kind_)) {
    const Vec2 d = p - a->center;
    if (d.norm() == 0.0) {
      raw_s = 0.0;
    } else {
      const double sign = a->angle1 >= a->angle0 ? 1.0 : -1.0;
      const double span = std::abs(a->angle1 - a->angle0);
      // Angle of p measured from angle0 in the traversal direction.
      double rel = sign * (std::atan2(d.y(), d.x()) - a->angle0);
      rel = std::fmod(rel, 2.0 * kPi);
      if (rel < 0.0) rel += 2.0 * kPi;
      if (rel <= span) {
        raw_s = rel * a->radius;
      } else {
        const double d0 = (p - raw_point(0.0)).norm();
        const double d1 = (p - raw_point(length_)).norm();
        raw_s = d0 <= d1 ? 0.0 : length_;
      }
    }
  } else {
    const int samples = 64 * static_cast<int>(spline_->coeffs.size());
    double best = std::numeric_limits<double>::infinity();
    int best_i = 0;
    for (int i = 0; i <= samples; ++i) {
      const double d = (p - raw_point(length_ * i / samples)).squaredNorm();
      if (d < best) {
        best = d;
        best_i = i;
      }
    }
    double lo = length_ * std::max(0, best_i - 1) / samples;
    double hi = length_ * std::min(samples, best_i + 1) / samples;
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
    double f1 = (p - raw_point(x1)).squaredNorm(), f2 = (p - raw_point(x2)).squaredNorm();
    for (int iter = 0; iter < 80 && hi - lo > 1e-15 * length_; ++iter) {
      if (f1 < f2) {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - g * (hi - lo);
        f1 = (p - raw_point(x1)).squaredNorm();
      } else {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + g * (hi - lo);
        f2 = (p - raw_point(x2)).squaredNorm();
      }
    }
    raw_s = 0.5 * (lo + hi);
    // Golden section only resolves s to about sqrt(machine epsilon); polish
    // with Newton on the orthogonality condition (x(s) - p) . tau(s) = 0.
    for (int iter = 0; iter < 4; ++iter) {
      const Vec2 d = raw_point(raw_s) - p;
      const Vec2 t = raw_tangent(raw_s);
      const double denom = 1.0 + raw_curvature(raw_s) * d.dot(Vec2(-t.y(), t.x()));
      if (!(denom > 0.1)) break;
      raw_s = std::clamp(raw_s - d.dot(t) / denom, 0.0, length_);
    }
    for (double end : {0.0, length_}) {
      if ((p - raw_point(end)).squaredNorm() < (p - raw_point(raw_s)).squaredNorm()) raw_s = end;
    }
  }
  ClosestPoint cp;
  cp.s = reversed_ ? length_ - raw_s : raw_s;
  cp.distance = (p - raw_point(raw_s)).norm();
  return cp;
}

std::vector<double> Curve::sample_arclengths(int count) const {
  std::vector<double> ss(count);
  const double denom = closed() ? count : std::max(1, count - 1);
  for (int i = 0; i < count; ++i) ss[i] = length_ * i / denom;
  return ss;
}

Frame frame_at(const Curve& curve, double s) {
  if (!(s >= 0.0 && s <= curve.length())) {
    throw GeometryError("arclength " + std::to_string(s) + " outside [0, " + std::to_string(curve.length()) + "]");
  }
  return curve.frame(s);
}

// ---------------------------------------------------------------------------
// Domain

Domain Domain::disk(const Vec2& center, double radius) {
  if (!(radius > 0.0)) throw GeometryError("disk radius must be positive");
  return Domain(Disk{center, radius});
}

Domain Domain::polygon(std::vector<Vec2> vertices) {
  if (vertices.size() < 3) throw GeometryError("polygon needs at least three vertices");
  const std::size_t n = vertices.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a = vertices[(i + 1) % n] - vertices[i];
    const Vec2 b = vertices[(i + 2) % n] - vertices[(i + 1) % n];
    if (a.x() * b.y() - a.y() * b.x() <= 0.0) throw GeometryError("polygon must be convex and counterclockwise");
  }
  return Domain(Polygon{std::move(vertices)});
}

Domain Domain::rectangle(const Vec2& lo, const Vec2& hi) {
  return polygon({lo, Vec2(hi.x(), lo.y()), hi, Vec2(lo.x(), hi.y())});
}

bool Domain::contains(const Vec2& p) const {
  if (is_disk()) return (p - as_disk().center).norm() < as_disk().radius;
  const auto& v = as_polygon().vertices;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Vec2 a = v[(i + 1) % v.size()] - v[i];
    const Vec2 b = p - v[i];
    if (a.x() * b.y() - a.y() * b.x() <= 0.0) return false;
  }
  return true;
}

double Domain::distance_to_boundary(const Vec2& p) const {
  if (is_disk()) return std::abs(as_disk().radius - (p - as_disk().center).norm());
  const auto& v = as_polygon().vertices;
  double d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < v.size(); ++i) d = std::min(d, segment_distance(p, v[i], v[(i + 1) % v.size()]));
  return d;
}

bool Domain::on_boundary(const Vec2& p, double tol) const { return distance_to_boundary(p) <= tol; }

double Domain::area() const {
  if (is_disk()) return kPi * as_disk().radius * as_disk().radius;
  const auto& v = as_polygon().vertices;
  double a2 = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Vec2& p = v[i];
    const Vec2& q = v[(i + 1) % v.size()];
    a2 += p.x() * q.y() - q.x() * p.y();
  }
  return 0.5 * a2;
}

double Domain::perimeter() const {
  if (is_disk()) return 2.0 * kPi * as_disk().radius;
  const auto& v = as_polygon().vertices;
  double len = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) len += (v[(i + 1) % v.size()] - v[i]).norm();
  return len;
}

Vec2 Domain::centroid() const {
  if (is_disk()) return as_disk().center;
  const auto& v = as_polygon().vertices;
  Vec2 c = Vec2::Zero();
  double a2 = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Vec2& p = v[i];
    const Vec2& q = v[(i + 1) % v.size()];
    const double cross = p.x() * q.y() - q.x() * p.y();
    a2 += cross;
    c += cross * (p + q);
  }
  return c / (3.0 * a2);
}

// ---------------------------------------------------------------------------
// Validation

bool GeometryReport::ok() const {
  return std::all_of(checks.begin(), checks.end(), [](const GeometryCheck& c) { return c.ok; });
}

std::string GeometryReport::text() const {
  std::ostringstream os;
  for (const auto& c : checks) {
    os << c.name << ": " << c.value << (c.name == "length_upper" ? " <= " : " >= ") << c.bound << "  "
       << (c.ok ? "ok" : "VIOLATED") << "\n";
  }
  return os.str();
}

GeometryReport validate(const Curve& curve, const Domain& domain, double k) {
  if (!(k > 0.0)) throw InvalidArgument("K must be positive");
  GeometryReport report;
  const double inv_k = 1.0 / k;

  double dist = std::numeric_limits<double>::infinity();
  for (double s : curve.sample_arclengths(2000)) {
    const Vec2 p = curve.point(s);
    const double d = domain.distance_to_boundary(p);
    dist = std::min(dist, domain.contains(p) ? d : -d);
  }
  report.checks.push_back({"distance_to_boundary", dist, inv_k, dist >= inv_k});
  report.checks.push_back({"length_lower", curve.length(), inv_k, curve.length() >= inv_k});
  report.checks.push_back({"length_upper", curve.length(), k, curve.length() <= k});
  report.checks.push_back({"reach", curve.reach(), inv_k, curve.reach() >= inv_k});
  return report;
}

std::optional<TubeCoords> signed_tube_coordinates(const Curve& curve, const Vec2& p) {
  const ClosestPoint cp = curve.closest_point(p);
  if (cp.distance >= curve.reach()) return std::nullopt;
  const Frame f = curve.frame(cp.s);
  const Vec2 d = p - curve.point(cp.s);
  if (!curve.closed() && (cp.s <= 0.0 || cp.s >= curve.length())) {
    if (std::abs(d.dot(f.tau)) > 1e-12 * std::max(1.0, d.norm())) return std::nullopt;
  }
  return TubeCoords{cp.s, d.dot(f.n)};
}

double TubeRegion::trim_length() const { return std::pow(half_width, trim_exponent); }

double TubeRegion::exact_area() const {
  const double band = 2.0 * half_width * curve.length();
  return curve.closed() ? band : band + kPi * half_width * half_width;
}

void validate_tube(const TubeRegion& tube, const Domain& domain) {
  const double eps = tube.half_width;
  if (!(eps > 0.0)) throw GeometryError("tube half-width must be positive");
  if (!(eps < tube.curve.reach())) {
    throw GeometryError("tube half-width " + std::to_string(eps) + " is not below the curve reach " +
                        std::to_string(tube.curve.reach()) + "; the tube would self-intersect");
  }
  if (!(tube.trim_exponent > 0.0 && tube.trim_exponent < 1.0)) throw GeometryError("trim exponent must lie in (0, 1)");
  double dist = std::numeric_limits<double>::infinity();
  for (double s : tube.curve.sample_arclengths(2000)) {
    const Vec2 p = tube.curve.point(s);
    dist = std::min(dist, domain.contains(p) ? domain.distance_to_boundary(p) : -1.0);
  }
  if (!(eps < dist)) {
    throw GeometryError("tube of half-width " + std::to_string(eps) + " reaches the domain boundary (distance " +
                        std::to_string(dist) + ")");
  }
}

std::vector<CurveNode> quadrature_nodes(const Curve& curve, int order, double trim, int panels) {
  if (order < 1) throw InvalidArgument("quadrature order must be >= 1");
  if (panels < 1) throw InvalidArgument("quadrature needs at least one panel");
  const double length = curve.length();
  if (curve.closed()) trim = 0.0;
  if (!(trim >= 0.0 && trim < 0.5 * length)) {
    throw InvalidArgument("trim " + std::to_string(trim) + " must lie in [0, length/2)");
  }
  const GaussRule rule = gauss_legendre(order);
  const double a = trim;
  const double width = (length - 2.0 * trim) / panels;
  std::vector<CurveNode> nodes;
  nodes.reserve(static_cast<std::size_t>(order) * panels);
  for (int p = 0; p < panels; ++p) {
    const double left = a + p * width;
    for (int q = 0; q < order; ++q) {
      const double s = left + 0.5 * width * (rule.nodes[q] + 1.0);
      nodes.push_back({curve.point(s), s, 0.5 * width * rule.weights[q], curve.frame(s)});
    }
  }
  return nodes;
}

}  // namespace striplab
