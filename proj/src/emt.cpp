#include "striplab/emt.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "striplab/errors.hpp"

namespace striplab {

namespace {

constexpr double kUnitTol = 1e-12;
constexpr double kZeroContrast = 1e-13;
constexpr double kBoundsSlack = 1e-10;

void require_unit(const Vec2& n) {
  if (!n.allFinite() || std::abs(n.norm() - 1.0) > kUnitTol) {
    throw InvalidArgument("normal vector must have unit length (|n| = " + std::to_string(n.norm()) + ")");
  }
}

void require_convex(const Tensor4& c, const char* name) {
  const double margin = convexity_margin(c);
  if (!(margin > 0.0)) {
    throw ConvexityError(std::string(name) + " is not strongly convex (margin " + std::to_string(margin) + ")");
  }
}

}  // namespace

const char* to_string(Convention c) { return c == Convention::Expansion ? "expansion" : "constructive"; }

Convention convention_from_string(const std::string& s) {
  if (s == "expansion") return Convention::Expansion;
  if (s == "constructive") return Convention::Constructive;
  throw InvalidArgument("unknown sign convention '" + s + "' (expected expansion|constructive)");
}

MomentTensor MomentTensor::as(Convention target) const {
  if (target == convention) return *this;
  return {-tensor, target};
}

Mat2 q_inverse(const Tensor4& c1, const Vec2& n) {
  require_unit(n);
  require_convex(c1, "C1");
  const std::array<SymMat2, 2> s{SymMat2::sym_outer(Vec2::UnitX(), n), SymMat2::sym_outer(Vec2::UnitY(), n)};
  Mat2 q;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) q(a, b) = double_contract(c1, s[a], s[b]);
  return 0.5 * (q + q.transpose());
}

Mat2 q_matrix(const Tensor4& c1, const Vec2& n) {
  const Mat2 qi = q_inverse(c1, n);
  const double det = qi(0, 0) * qi(1, 1) - qi(0, 1) * qi(1, 0);
  Mat2 q;
  q << qi(1, 1) / det, -qi(0, 1) / det, -qi(1, 0) / det, qi(0, 0) / det;
  return q;
}

TransmissionState transmission_solve(const Tensor4& c0, const Tensor4& c1, const Vec2& n, const SymMat2& e_ext) {
  require_convex(c0, "C0");
  const Mat2 q = q_matrix(c1, n);
  const Vec2 w = contract(c0 - c1, e_ext).apply(n);
  const Vec2 delta = 0.5 * (q * w);
  return {e_ext + 2.0 * SymMat2::sym_outer(delta, n), delta};
}

SymMat2 constructive_apply(const Tensor4& c0, const Tensor4& c1, const Vec2& n, const SymMat2& h) {
  const Tensor4 d = c0 - c1;
  const Mat2 q = q_matrix(c1, n);
  const Vec2 w = contract(d, h).apply(n);
  return contract(d, h) + contract(d, SymMat2::sym_outer(q * w, n));
}

MomentTensor moment_tensor(const Tensor4& c0, const Tensor4& c1, const Vec2& n, Convention convention) {
  require_unit(n);
  require_convex(c0, "C0");
  require_convex(c1, "C1");
  if ((c0 - c1).norm() < kZeroContrast) return {Tensor4(), convention};

  Eigen::Matrix3d m;
  for (int k = 0; k < 3; ++k) {
    m.col(k) = constructive_apply(c0, c1, n, SymMat2::from_mandel(Mandel3::Unit(k))).mandel();
  }
  if (convention == Convention::Expansion) m = -m;
  return {Tensor4::from_mandel(m), convention};
}

IsotropicCoefficients isotropic_moment_coeffs(double l0, double m0, double l1, double m1) {
  if (!(m0 > 0.0 && m1 > 0.0 && l0 + m0 > 0.0 && l1 + m1 > 0.0)) {
    throw ConvexityError("isotropic coefficients need mu > 0 and lambda + mu > 0 in both phases");
  }
  const double den = m1 * (l1 + 2.0 * m1);
  IsotropicCoefficients k;
  k.a = (l0 - l1) * (l0 + 2.0 * m0) / (l1 + 2.0 * m1);
  k.b = (m0 - m1) * m0 / m1;
  k.c = (m0 - m1) * (2.0 * l1 * (m1 - m0) + m1 * (l1 - l0) + 2.0 * m1 * (m1 - m0)) / den;
  k.d = 2.0 * (m0 - m1) * (m1 * l0 - l1 * m0) / den;
  return k;
}

SymMat2 apply_isotropic_form(const IsotropicCoefficients& k, const Frame& f, const SymMat2& h) {
  const double h_tt = f.tau.dot(h.apply(f.tau));
  const double h_nn = f.n.dot(h.apply(f.n));
  return k.a * h.trace() * SymMat2::identity() + k.b * h + k.c * h_tt * SymMat2::sym_outer(f.tau, f.tau) +
         k.d * h_nn * SymMat2::sym_outer(f.n, f.n);
}

IsotropicFit fit_isotropic_form(const Tensor4& m, const Frame& f) {
  // Mandel matrix in the basis {tau(x)tau, n(x)n, sqrt2 sym(tau(x)n)}:
  //   [[a+b+c, a, 0], [a, a+b+d, 0], [0, 0, b]]
  const std::array<SymMat2, 3> basis{SymMat2::sym_outer(f.tau, f.tau), SymMat2::sym_outer(f.n, f.n),
                                     kSqrt2 * SymMat2::sym_outer(f.tau, f.n)};
  Eigen::Matrix3d local;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) local(i, j) = double_contract(m, basis[j], basis[i]);
  IsotropicFit fit;
  fit.coeffs.b = local(2, 2);
  fit.coeffs.a = local(0, 1);
  fit.coeffs.c = local(0, 0) - fit.coeffs.a - fit.coeffs.b;
  fit.coeffs.d = local(1, 1) - fit.coeffs.a - fit.coeffs.b;
  fit.residual = std::max({std::abs(local(0, 2)), std::abs(local(1, 2)), std::abs(local(0, 1) - local(1, 0))});
  return fit;
}

BoundsReport bounds_check(const Tensor4& c0, const Tensor4& c1, const MomentTensor& m, const SymMat2& e) {
  if (m.convention != Convention::Expansion) {
    throw InvalidArgument("bounds_check expects the moment tensor in the expansion convention");
  }
  const Eigen::Matrix3d lower_map = c0.mandel() * invert(c1).mandel() * (c1 - c0).mandel();
  const Mandel3 v = e.mandel();
  BoundsReport r;
  r.lower = v.dot(lower_map * v);
  r.value = double_contract(m.tensor, e, e);
  r.upper = double_contract(c1 - c0, e, e);
  const double slack = kBoundsSlack * std::max({1.0, std::abs(r.lower), std::abs(r.upper)});
  r.lower_ok = r.lower <= r.value + slack;
  r.upper_ok = r.value <= r.upper + slack;
  return r;
}

}  // namespace striplab
