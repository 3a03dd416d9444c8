#include "striplab/tensor_core.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "striplab/errors.hpp"

namespace striplab {

namespace {

constexpr double kSymmetryTol = 1e-12;
constexpr double kSingularTol = 1e-12;

// Mandel index and scaling of the (i, j) entry of a symmetric matrix.
int mandel_index(int i, int j) { return i == j ? i : 2; }
double mandel_factor(int i, int j) { return i == j ? 1.0 : 1.0 / kSqrt2; }

}  // namespace

SymMat2 SymMat2::symmetrize(const Mat2& m) { return {m(0, 0), 0.5 * (m(0, 1) + m(1, 0)), m(1, 1)}; }

SymMat2 SymMat2::sym_outer(const Vec2& a, const Vec2& b) {
  return {a.x() * b.x(), 0.5 * (a.x() * b.y() + a.y() * b.x()), a.y() * b.y()};
}

SymMat2 SymMat2::from_mandel(const Mandel3& v) { return {v(0), v(2) / kSqrt2, v(1)}; }

Mat2 SymMat2::matrix() const {
  Mat2 m;
  m << a11, a12, a12, a22;
  return m;
}

double SymMat2::norm() const { return std::sqrt(a11 * a11 + 2.0 * a12 * a12 + a22 * a22); }

SymMat2& SymMat2::operator+=(const SymMat2& o) {
  a11 += o.a11;
  a12 += o.a12;
  a22 += o.a22;
  return *this;
}

SymMat2& SymMat2::operator-=(const SymMat2& o) {
  a11 -= o.a11;
  a12 -= o.a12;
  a22 -= o.a22;
  return *this;
}

SymMat2& SymMat2::operator*=(double s) {
  a11 *= s;
  a12 *= s;
  a22 *= s;
  return *this;
}

SymMat2 operator+(SymMat2 a, const SymMat2& b) { return a += b; }
SymMat2 operator-(SymMat2 a, const SymMat2& b) { return a -= b; }
SymMat2 operator-(const SymMat2& a) { return {-a.a11, -a.a12, -a.a22}; }
SymMat2 operator*(double s, SymMat2 a) { return a *= s; }
SymMat2 operator*(SymMat2 a, double s) { return a *= s; }

double frobenius(const SymMat2& a, const SymMat2& b) {
  return a.a11 * b.a11 + 2.0 * a.a12 * b.a12 + a.a22 * b.a22;
}

Tensor4 Tensor4::from_mandel(const Eigen::Matrix3d& m) {
  if (!m.allFinite()) throw InvalidArgument("tensor has non-finite entries");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (asym > kSymmetryTol * scale) {
    throw SymmetryError("Mandel matrix is not symmetric (major symmetry violated by " + std::to_string(asym) + ")");
  }
  return Tensor4(0.5 * (m + m.transpose()));
}

Tensor4 Tensor4::from_components(
    const std::array<std::array<std::array<std::array<double, 2>, 2>, 2>, 2>& c) {
  double scale = 1.0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) scale = std::max(scale, std::abs(c[i][j][k][l]));
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) {
          const double v = c[i][j][k][l];
          if (std::abs(v - c[j][i][k][l]) > kSymmetryTol * scale || std::abs(v - c[k][l][i][j]) > kSymmetryTol * scale) {
            throw SymmetryError("component tensor lacks minor/major symmetry");
          }
        }
  Eigen::Matrix3d m;
  for (int i = 0; i < 2; ++i)
    for (int j = i; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = k; l < 2; ++l) {
          m(mandel_index(i, j), mandel_index(k, l)) = c[i][j][k][l] / (mandel_factor(i, j) * mandel_factor(k, l));
        }
  return from_mandel(m);
}

double Tensor4::component(int i, int j, int k, int l) const {
  return mandel_factor(i, j) * mandel_factor(k, l) * mandel_(mandel_index(i, j), mandel_index(k, l));
}

Tensor4& Tensor4::operator+=(const Tensor4& o) {
  mandel_ += o.mandel_;
  return *this;
}

Tensor4& Tensor4::operator-=(const Tensor4& o) {
  mandel_ -= o.mandel_;
  return *this;
}

Tensor4& Tensor4::operator*=(double s) {
  mandel_ *= s;
  return *this;
}

Tensor4 make_isotropic(double lambda, double mu) {
  const Eigen::Vector3d m(1.0, 1.0, 0.0);
  return Tensor4::from_mandel(lambda * m * m.transpose() + 2.0 * mu * Eigen::Matrix3d::Identity());
}

std::optional<std::array<double, 2>> isotropic_parameters(const Tensor4& c, double tol) {
  const Eigen::Matrix3d& m = c.mandel();
  const double lambda = m(0, 1);
  const double mu = 0.5 * m(2, 2);
  const Eigen::Matrix3d diff = m - make_isotropic(lambda, mu).mandel();
  if (diff.cwiseAbs().maxCoeff() > tol * std::max(1.0, m.cwiseAbs().maxCoeff())) return std::nullopt;
  return std::array<double, 2>{lambda, mu};
}

SymMat2 contract(const Tensor4& c, const SymMat2& a) { return SymMat2::from_mandel(c.mandel() * a.mandel()); }

double double_contract(const Tensor4& c, const SymMat2& a, const SymMat2& b) {
  return b.mandel().dot(c.mandel() * a.mandel());
}

double convexity_margin(const Tensor4& c) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(c.mandel(), Eigen::EigenvaluesOnly);
  return eig.eigenvalues()(0);
}

Eigen::Matrix3d compose(const Tensor4& a, const Tensor4& b) { return a.mandel() * b.mandel(); }

Tensor4 invert(const Tensor4& c) {
  const double margin = convexity_margin(c);
  if (margin <= kSingularTol) {
    throw SingularTensorError("tensor is not invertible on symmetric matrices (convexity margin " +
                              std::to_string(margin) + ")");
  }
  Eigen::Matrix3d inv = c.mandel().inverse();
  return Tensor4::from_mandel(0.5 * (inv + inv.transpose()));
}

Mat2 rotation_matrix(double angle) {
  Mat2 q;
  q << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
  return q;
}

Eigen::Matrix3d mandel_rotation(double angle) {
  const Mat2 q = rotation_matrix(angle);
  Eigen::Matrix3d r;
  for (int k = 0; k < 3; ++k) {
    const SymMat2 basis = SymMat2::from_mandel(Mandel3::Unit(k));
    r.col(k) = SymMat2::symmetrize(q * basis.matrix() * q.transpose()).mandel();
  }
  return r;
}

Tensor4 rotate(const Tensor4& c, double angle) {
  const Eigen::Matrix3d r = mandel_rotation(angle);
  const Eigen::Matrix3d m = r * c.mandel() * r.transpose();
  return Tensor4::from_mandel(0.5 * (m + m.transpose()));
}

}  // namespace striplab
