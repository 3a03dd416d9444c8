#include <doctest.h>

#include <numbers>

#include "striplab/errors.hpp"
#include "striplab/geometry.hpp"
#include "support.hpp"

using namespace striplab;

namespace {

constexpr double kPi = std::numbers::pi;

// Nearest point by dense sampling of the curve, then ternary search on the
// bracketing sample interval.
double brute_distance(const Curve& c, const Vec2& p, int samples = 20000) {
  const auto ss = c.sample_arclengths(samples);
  std::size_t best = 0;
  for (std::size_t i = 0; i < ss.size(); ++i) {
    if ((c.point(ss[i]) - p).norm() < (c.point(ss[best]) - p).norm()) best = i;
  }
  double lo = ss[best == 0 ? 0 : best - 1], hi = ss[std::min(best + 1, ss.size() - 1)];
  for (int it = 0; it < 200; ++it) {
    const double a = lo + (hi - lo) / 3, b = hi - (hi - lo) / 3;
    if ((c.point(a) - p).norm() < (c.point(b) - p).norm()) hi = b; else lo = a;
  }
  return (c.point(0.5 * (lo + hi)) - p).norm();
}

std::vector<Curve> sample_curves() {
  return {Curve::segment({-0.3, 0.0}, {0.3, 0.0}), Curve::segment({0.1, -0.2}, {0.4, 0.5}),
          Curve::arc({0.0, 0.0}, 0.5, 0.2, 2.0), Curve::arc({0.1, 0.0}, 0.4, 2.0, -1.0),
          Curve::spline({{-0.4, 0.0}, {-0.1, 0.15}, {0.2, -0.1}, {0.4, 0.05}}),
          Curve::spline({{-0.4, 0.0}, {-0.1, 0.15}, {0.2, -0.1}, {0.4, 0.05}}).reversed()};
}

}  // namespace

TEST_SUITE("geometry") {
  TEST_CASE("Gauss-Legendre rules integrate polynomials exactly") {
    for (int order = 1; order <= 40; ++order) {
      const GaussRule r = gauss_legendre(order);
      for (int deg = 0; deg <= 2 * order - 1; ++deg) {
        double sum = 0.0;
        for (int q = 0; q < order; ++q) sum += r.weights[q] * std::pow(r.nodes[q], deg);
        const double exact = deg % 2 ? 0.0 : 2.0 / (deg + 1);
        CHECK(std::abs(sum - exact) < 1e-13);
      }
    }
    CHECK_THROWS_AS(gauss_legendre(0), InvalidArgument);
  }

  TEST_CASE("segment frame") {
    const Curve c = Curve::segment({0, 0}, {1, 0});
    for (double s : {0.0, 0.3, 1.0}) {
      const Frame f = frame_at(c, s);
      CHECK((f.tau - Vec2(1, 0)).norm() < 1e-15);
      CHECK((f.n - Vec2(0, -1)).norm() < 1e-15);
    }
    CHECK_THROWS_AS(frame_at(c, 1.5), GeometryError);
    CHECK_THROWS_AS(frame_at(c, -0.1), GeometryError);
  }

  TEST_CASE("closed circle has outward normals") {
    const double r = 0.3;
    for (const Curve& c : {Curve::arc({0.1, 0.2}, r, 0.0, 2 * kPi), Curve::arc({0.1, 0.2}, r, 2 * kPi, 0.0)}) {
      CHECK(c.closed());
      CHECK(c.length() == doctest::Approx(2 * kPi * r));
      for (double s : c.sample_arclengths(17)) {
        const Frame f = c.frame(s);
        const Vec2 radial = (c.point(s) - Vec2(0.1, 0.2)).normalized();
        CHECK((f.n - radial).norm() < 1e-12);
      }
    }
    const Frame f0 = Curve::arc({0, 0}, r, 0.0, 2 * kPi).frame(0.0);
    CHECK((f0.n - Vec2(1, 0)).norm() < 1e-14);
  }

  TEST_CASE("frames are orthonormal and tangents match finite differences") {
    std::mt19937_64 rng(31);
    for (const Curve& c : sample_curves()) {
      std::uniform_real_distribution<double> u(1e-3, c.length() - 1e-3);
      for (int t = 0; t < 100; ++t) {
        const double s = u(rng);
        const Frame f = c.frame(s);
        CHECK(std::abs(f.n.norm() - 1.0) < 1e-12);
        CHECK(std::abs(f.tau.norm() - 1.0) < 1e-12);
        CHECK(std::abs(f.n.dot(f.tau)) < 1e-12);
        const double h = 1e-6;
        const Vec2 fd = (c.point(s + h) - c.point(s - h)) / (2 * h);
        CHECK((fd - f.tau).norm() < 1e-6);
      }
    }
  }

  TEST_CASE("arclength parametrisation of splines") {
    const Curve c = Curve::spline({{-0.4, 0.0}, {-0.1, 0.15}, {0.2, -0.1}, {0.4, 0.05}});
    // Dense polyline length.
    double poly = 0.0;
    Vec2 prev = c.point(0.0);
    const int n = 200000;
    for (int i = 1; i <= n; ++i) {
      const Vec2 p = c.point(c.length() * i / n);
      poly += (p - prev).norm();
      prev = p;
    }
    CHECK(poly == doctest::Approx(c.length()).epsilon(1e-9));
    CHECK((c.point(0.0) - Vec2(-0.4, 0.0)).norm() < 1e-14);
    CHECK((c.point(c.length()) - Vec2(0.4, 0.05)).norm() < 1e-12);
    const Curve r = c.reversed();
    CHECK((r.point(0.0) - Vec2(0.4, 0.05)).norm() < 1e-12);
    CHECK((r.tangent(0.3) + c.tangent(c.length() - 0.3)).norm() < 1e-12);
    CHECK(r.curvature(0.3) == doctest::Approx(-c.curvature(c.length() - 0.3)));
  }

  TEST_CASE("curvature of arcs") {
    CHECK(Curve::arc({0, 0}, 0.5, 0.0, 1.0).curvature(0.1) == doctest::Approx(2.0));
    CHECK(Curve::arc({0, 0}, 0.5, 1.0, 0.0).curvature(0.1) == doctest::Approx(-2.0));
    CHECK(Curve::segment({0, 0}, {1, 1}).curvature(0.5) == 0.0);
  }

  TEST_CASE("reach") {
    CHECK(std::isinf(Curve::segment({0, 0}, {1, 0}).reach()));
    CHECK(Curve::arc({0, 0}, 0.05, 0.0, 2 * kPi).reach() == doctest::Approx(0.05).epsilon(1e-9));
    CHECK(Curve::arc({0, 0}, 0.4, 0.0, 1.5).reach() == doctest::Approx(0.4).epsilon(1e-9));
    const Curve sp = Curve::spline({{-0.4, 0.0}, {-0.1, 0.15}, {0.2, -0.1}, {0.4, 0.05}});
    double max_curv = 0.0;
    for (double s : sp.sample_arclengths(2000)) max_curv = std::max(max_curv, std::abs(sp.curvature(s)));
    CHECK(sp.reach() <= 1.0 / max_curv * (1 + 1e-3));
    CHECK(sp.reach() > 0.0);
  }

  TEST_CASE("validate reports each condition") {
    const Domain disk = Domain::disk({0, 0}, 1.0);
    const auto ok = validate(Curve::segment({-0.3, 0}, {0.3, 0}), disk, 10.0);
    CHECK(ok.ok());
    CHECK(ok.checks.size() == 4);
    CHECK(ok.checks[0].value == doctest::Approx(0.7));

    const auto touching = validate(Curve::segment({0.0, 0}, {1.0, 0}), disk, 10.0);
    CHECK_FALSE(touching.ok());
    CHECK_FALSE(touching.checks[0].ok);
    CHECK(touching.checks[1].ok);

    const auto small_circle = validate(Curve::arc({0, 0}, 0.05, 0, 2 * kPi), disk, 10.0);
    CHECK_FALSE(small_circle.ok());
    CHECK_FALSE(small_circle.checks[3].ok);
    CHECK(small_circle.checks[3].value == doctest::Approx(0.05).epsilon(1e-6));
    CHECK(small_circle.text().find("VIOLATED") != std::string::npos);
  }

  TEST_CASE("tube coordinates") {
    const Curve seg = Curve::segment({0, 0}, {1, 0});
    auto tc = signed_tube_coordinates(seg, {0.5, -0.2});
    REQUIRE(tc.has_value());
    CHECK(tc->s == doctest::Approx(0.5));
    CHECK(tc->h == doctest::Approx(0.2));
    auto on = signed_tube_coordinates(seg, {0.25, 0.0});
    REQUIRE(on.has_value());
    CHECK(on->h == 0.0);
    CHECK_FALSE(signed_tube_coordinates(seg, {1.1, 0.05}).has_value());

    std::mt19937_64 rng(32);
    for (const Curve& c : sample_curves()) {
      const double eps = std::min(0.05, 0.5 * c.reach());
      std::uniform_real_distribution<double> us(0.02 * c.length(), 0.98 * c.length()), uh(-eps, eps);
      for (int t = 0; t < 1000; ++t) {
        const double s = us(rng), h = uh(rng);
        const Frame f = c.frame(s);
        const Vec2 p = c.point(s) + h * f.n;
        const auto r = signed_tube_coordinates(c, p);
        REQUIRE(r.has_value());
        const Vec2 back = c.point(r->s) + r->h * c.frame(r->s).n;
        CHECK((back - p).norm() < 1e-10);
        CHECK(std::abs(r->h - h) < 1e-9);
      }
      // |h| equals the distance to a dense sampling of the curve.
      for (int t = 0; t < 20; ++t) {
        const double s = us(rng), h = uh(rng);
        const Vec2 p = c.point(s) + h * c.frame(s).n;
        CHECK(std::abs(std::abs(signed_tube_coordinates(c, p)->h) - brute_distance(c, p)) < 1e-9);
      }
    }
  }

  TEST_CASE("tube region") {
    const Domain disk = Domain::disk({0, 0}, 1.0);
    const TubeRegion tube{Curve::segment({-0.3, 0}, {0.3, 0}), 0.02};
    CHECK(tube.exact_area() == doctest::Approx(2 * 0.02 * 0.6 + kPi * 0.0004));
    CHECK(tube.trim_length() == doctest::Approx(std::pow(0.02, 0.45)));
    CHECK(tube.contains({0.31, 0.0}));
    CHECK_FALSE(tube.contains({0.0, 0.03}));
    CHECK_NOTHROW(validate_tube(tube, disk));
    const TubeRegion too_wide{Curve::arc({0, 0}, 0.2, 0, 2.0), 0.25};
    CHECK_THROWS_AS(validate_tube(too_wide, disk), GeometryError);
    const TubeRegion leaking{Curve::segment({-0.3, 0}, {0.99, 0}), 0.02};
    CHECK_THROWS_AS(validate_tube(leaking, disk), GeometryError);
  }

  TEST_CASE("quadrature along the curve") {
    const Curve seg = Curve::segment({0, 0}, {0.8, 0.6});
    double sum = 0.0, moment = 0.0;
    for (const auto& node : quadrature_nodes(seg, 3, 0.0)) {
      CHECK(node.weight > 0.0);
      sum += node.weight;
      moment += node.weight * node.s;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(moment == doctest::Approx(0.5).epsilon(1e-12));

    const double trim = 0.1;
    double trimmed = 0.0;
    for (const auto& node : quadrature_nodes(seg, 4, trim, 8)) {
      CHECK(node.s > trim);
      CHECK(node.s < 1.0 - trim);
      trimmed += node.weight;
    }
    CHECK(trimmed == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(quadrature_nodes(seg, 4, 0.0, 8).size() == 32);
    CHECK(quadrature_nodes(seg, 4, 0.0, 16).size() == 64);
    CHECK_THROWS_AS(quadrature_nodes(seg, 4, 0.6), InvalidArgument);
    CHECK_THROWS_AS(quadrature_nodes(seg, 0, 0.0), InvalidArgument);

    const Curve arc = Curve::arc({0, 0}, 0.5, 0.0, 2.0);
    double len = 0.0;
    for (const auto& node : quadrature_nodes(arc, 5, 0.0)) len += node.weight;
    CHECK(len == doctest::Approx(1.0).epsilon(1e-12));
  }

  TEST_CASE("domains") {
    const Domain sq = Domain::rectangle({0, 0}, {2, 1});
    CHECK(sq.area() == doctest::Approx(2.0));
    CHECK(sq.perimeter() == doctest::Approx(6.0));
    CHECK((sq.centroid() - Vec2(1.0, 0.5)).norm() < 1e-15);
    CHECK(sq.contains({1.0, 0.5}));
    CHECK_FALSE(sq.contains({2.5, 0.5}));
    CHECK(sq.distance_to_boundary({1.0, 0.4}) == doctest::Approx(0.4));
    CHECK(sq.on_boundary({2.0, 0.3}));
    CHECK_THROWS_AS(Domain::polygon({{0, 0}, {0, 1}, {1, 0}}), GeometryError);
    const Domain disk = Domain::disk({0.5, 0}, 2.0);
    CHECK(disk.area() == doctest::Approx(4 * kPi));
    CHECK(disk.distance_to_boundary({0.5, 1.0}) == doctest::Approx(1.0));
  }
}
