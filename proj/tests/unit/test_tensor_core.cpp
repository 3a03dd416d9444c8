#include <doctest.h>

#include "striplab/errors.hpp"
#include "striplab/tensor_core.hpp"
#include "support.hpp"

using namespace striplab;
using striplab::testing::components;
using striplab::testing::random_convex;
using striplab::testing::random_sym;

namespace {

// Quadruple-loop contraction, independent of the Mandel storage.
SymMat2 contract_by_components(const Tensor4& c, const SymMat2& a) {
  const auto comp = components(c);
  const Mat2 am = a.matrix();
  Mat2 out = Mat2::Zero();
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) out(i, j) += comp[i][j][k][l] * am(k, l);
  return SymMat2::symmetrize(out);
}

double diff(const SymMat2& a, const SymMat2& b) { return (a - b).norm(); }

}  // namespace

TEST_SUITE("tensor_core") {
  TEST_CASE("isotropic tensor acts as lambda tr(A) I + 2 mu A") {
    std::mt19937_64 rng(1);
    for (int t = 0; t < 50; ++t) {
      const double lam = std::uniform_real_distribution<double>(-1, 3)(rng);
      const double mu = std::uniform_real_distribution<double>(0.1, 3)(rng);
      const SymMat2 a = random_sym(rng);
      const SymMat2 expect = lam * a.trace() * SymMat2::identity() + 2.0 * mu * a;
      CHECK(diff(contract(make_isotropic(lam, mu), a), expect) < 1e-13);
    }
    CHECK(diff(contract(make_isotropic(0.0, 0.5), {0.3, -0.2, 1.1}), {0.3, -0.2, 1.1}) < 1e-15);
    CHECK(diff(contract(make_isotropic(1.0, 1.0), SymMat2::identity()), 4.0 * SymMat2::identity()) < 1e-15);
    const SymMat2 trace_free{0.7, 0.4, -0.7};
    CHECK(diff(contract(make_isotropic(5.0, 0.8), trace_free), 1.6 * trace_free) < 1e-14);
  }

  TEST_CASE("contract and double_contract match the component oracle") {
    std::mt19937_64 rng(2);
    for (int t = 0; t < 200; ++t) {
      const Tensor4 c = random_convex(rng);
      const SymMat2 a = random_sym(rng), b = random_sym(rng);
      CHECK(diff(contract(c, a), contract_by_components(c, a)) < 1e-14);
      const double oracle = frobenius(contract_by_components(c, a), b);
      CHECK(std::abs(double_contract(c, a, b) - oracle) < 1e-14);
      CHECK(std::abs(double_contract(c, a, b) - double_contract(c, b, a)) < 1e-14);
    }
    CHECK(double_contract(Tensor4::identity(), SymMat2::identity(), SymMat2::identity()) == doctest::Approx(2.0));
    const SymMat2 s = SymMat2::sym_outer(Vec2::UnitX(), Vec2::UnitY());
    CHECK(diff(contract(make_isotropic(3.0, 0.7), s), 1.4 * s) < 1e-15);
  }

  TEST_CASE("contract is linear") {
    std::mt19937_64 rng(3);
    for (int t = 0; t < 100; ++t) {
      const Tensor4 c = random_convex(rng);
      const SymMat2 a = random_sym(rng), b = random_sym(rng);
      const double x = 1.7, y = -0.4;
      CHECK(diff(contract(c, x * a + y * b), x * contract(c, a) + y * contract(c, b)) < 1e-13);
    }
  }

  TEST_CASE("component and Mandel forms round trip") {
    std::mt19937_64 rng(4);
    for (int t = 0; t < 100; ++t) {
      const Tensor4 c = random_convex(rng);
      const Tensor4 back = Tensor4::from_components(components(c));
      CHECK((back.mandel() - c.mandel()).cwiseAbs().maxCoeff() < 1e-14);
      CHECK((c.mandel() - c.mandel().transpose()).cwiseAbs().maxCoeff() < 1e-14);
    }
  }

  TEST_CASE("asymmetric input is rejected") {
    Eigen::Matrix3d m = Eigen::Matrix3d::Identity();
    m(0, 1) = 0.3;
    CHECK_THROWS_AS(Tensor4::from_mandel(m), SymmetryError);
    auto comp = components(make_isotropic(1.0, 1.0));
    comp[0][1][0][0] += 0.1;
    CHECK_THROWS_AS(Tensor4::from_components(comp), SymmetryError);
  }

  TEST_CASE("convexity margin matches brute-force minimisation") {
    std::mt19937_64 rng(5);
    auto brute = [&](const Tensor4& c) {
      double best = 1e300;
      for (int t = 0; t < 10000; ++t) {
        SymMat2 a = random_sym(rng);
        a *= 1.0 / a.norm();
        best = std::min(best, double_contract(c, a, a));
      }
      return best;
    };
    CHECK(convexity_margin(make_isotropic(1.0, 1.0)) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(brute(make_isotropic(1.0, 1.0)) == doctest::Approx(2.0).epsilon(1e-3));
    CHECK(convexity_margin(make_isotropic(-0.4, 0.5)) == doctest::Approx(0.2).epsilon(1e-13));
    CHECK(brute(make_isotropic(-0.4, 0.5)) == doctest::Approx(0.2).epsilon(2e-2));
    for (int t = 0; t < 5; ++t) {
      const Tensor4 c = random_convex(rng);
      const double margin = convexity_margin(c);
      CHECK(brute(c) >= margin - 1e-14);
      CHECK(brute(c) <= margin + 0.02);
      const Tensor4 shifted = c - margin * Tensor4::identity();
      CHECK(std::abs(convexity_margin(shifted)) < 1e-12);
    }
  }

  TEST_CASE("strong convexity bounds the quadratic form") {
    std::mt19937_64 rng(6);
    const Tensor4 c = random_convex(rng);
    const double margin = convexity_margin(c);
    for (int t = 0; t < 1000; ++t) {
      const SymMat2 a = random_sym(rng);
      CHECK(double_contract(c, a, a) >= margin * a.norm() * a.norm() - 1e-14);
    }
  }

  TEST_CASE("inverse composes to the identity") {
    std::mt19937_64 rng(7);
    CHECK((invert(Tensor4::identity()).mandel() - Eigen::Matrix3d::Identity()).norm() < 1e-15);
    const Tensor4 iso = make_isotropic(2.0, 0.75);
    CHECK((compose(iso, invert(iso)) - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() < 1e-12);
    // The inverse of an isotropic tensor is isotropic.
    CHECK(isotropic_parameters(invert(iso), 1e-12).has_value());
    for (int t = 0; t < 100; ++t) {
      const Tensor4 c = random_convex(rng);
      CHECK((compose(c, invert(c)) - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() < 1e-12);
    }
    CHECK_THROWS_AS(invert(make_isotropic(-0.5, 0.5)), SingularTensorError);
  }

  TEST_CASE("isotropic detection") {
    auto p = isotropic_parameters(make_isotropic(1.5, 0.25));
    REQUIRE(p.has_value());
    CHECK((*p)[0] == doctest::Approx(1.5));
    CHECK((*p)[1] == doctest::Approx(0.25));
    std::mt19937_64 rng(8);
    CHECK_FALSE(isotropic_parameters(random_convex(rng)).has_value());
  }

  TEST_CASE("rotation preserves isotropy and the quadratic form") {
    std::mt19937_64 rng(9);
    const Tensor4 iso = make_isotropic(1.0, 2.0);
    CHECK((rotate(iso, 0.7).mandel() - iso.mandel()).cwiseAbs().maxCoeff() < 1e-13);
    const Tensor4 c = random_convex(rng);
    const double angle = 1.1;
    const Mat2 q = rotation_matrix(angle);
    const SymMat2 a = random_sym(rng);
    const SymMat2 ra = SymMat2::symmetrize(q * a.matrix() * q.transpose());
    CHECK(double_contract(rotate(c, angle), ra, ra) == doctest::Approx(double_contract(c, a, a)).epsilon(1e-13));
  }

  TEST_CASE("rigid motions have zero symmetric gradient") {
    const RigidMotion r{0.4, Vec2(1.0, -2.0)};
    CHECK(SymMat2::symmetrize(r.gradient()).norm() == 0.0);
    const Vec2 x(0.3, 0.8);
    const double h = 1e-6;
    const Vec2 dx = (r(x + Vec2(h, 0)) - r(x - Vec2(h, 0))) / (2 * h);
    CHECK(dx.x() == doctest::Approx(r.gradient()(0, 0)));
    CHECK(dx.y() == doctest::Approx(r.gradient()(1, 0)));
  }

  TEST_CASE("symmetrize is idempotent") {
    Mat2 m;
    m << 1.0, 2.0, -3.0, 4.0;
    const SymMat2 s = SymMat2::symmetrize(m);
    CHECK(diff(SymMat2::symmetrize(s.matrix()), s) == 0.0);
    CHECK(s.a12 == doctest::Approx(-0.5));
  }
}
