#pragma once

// Symmetric 2x2 matrices and fully symmetric fourth-order tensors in 2D.
//
// Tensors are stored in the orthonormal Mandel basis
//   { e1(x)e1, e2(x)e2, sqrt(2) sym(e1(x)e2) }
// of symmetric matrices, so a tensor is a symmetric 3x3 matrix whose
// eigenvalues are the extremes of the quadratic form C A : A on unit
// Frobenius-norm symmetric A.

#include <array>
#include <optional>

#include <Eigen/Dense>

namespace striplab {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;
using Mandel3 = Eigen::Vector3d;

inline constexpr double kSqrt2 = 1.4142135623730950488;

/// Symmetric 2x2 matrix (strain, stress).
struct SymMat2 {
  double a11 = 0.0;
  double a12 = 0.0;
  double a22 = 0.0;

  SymMat2() = default;
  SymMat2(double x11, double x12, double x22) : a11(x11), a12(x12), a22(x22) {}

  /// Symmetric part of an arbitrary 2x2 matrix.
  static SymMat2 symmetrize(const Mat2& m);
  static SymMat2 identity() { return {1.0, 0.0, 1.0}; }
  /// sym(a (x) b)
  static SymMat2 sym_outer(const Vec2& a, const Vec2& b);
  static SymMat2 from_mandel(const Mandel3& v);

  Mandel3 mandel() const { return {a11, a22, kSqrt2 * a12}; }
  Mat2 matrix() const;

  double trace() const { return a11 + a22; }
  double norm() const;  // Frobenius
  Vec2 apply(const Vec2& v) const { return {a11 * v.x() + a12 * v.y(), a12 * v.x() + a22 * v.y()}; }

  SymMat2& operator+=(const SymMat2& o);
  SymMat2& operator-=(const SymMat2& o);
  SymMat2& operator*=(double s);
};

SymMat2 operator+(SymMat2 a, const SymMat2& b);
SymMat2 operator-(SymMat2 a, const SymMat2& b);
SymMat2 operator-(const SymMat2& a);
SymMat2 operator*(double s, SymMat2 a);
SymMat2 operator*(SymMat2 a, double s);

/// Frobenius inner product A : B.
double frobenius(const SymMat2& a, const SymMat2& b);

/// Fully symmetric fourth-order elasticity tensor.
class Tensor4 {
 public:
  /// Zero tensor.
  Tensor4() : mandel_(Eigen::Matrix3d::Zero()) {}

  /// Throws InvalidArgument when `m` is not symmetric to 1e-12 (relative to
  /// its largest entry). The stored matrix is the exact symmetric part.
  static Tensor4 from_mandel(const Eigen::Matrix3d& m);

  /// Component form C[i][j][k][l], indices 0-based. Throws InvalidArgument if
  /// the minor or major symmetries fail beyond 1e-12.
  static Tensor4 from_components(const std::array<std::array<std::array<std::array<double, 2>, 2>, 2>, 2>& c);

  static Tensor4 identity() { return Tensor4(Eigen::Matrix3d::Identity()); }

  const Eigen::Matrix3d& mandel() const { return mandel_; }

  /// C_ijkl, indices 0-based.
  double component(int i, int j, int k, int l) const;

  double norm() const { return mandel_.norm(); }

  Tensor4& operator+=(const Tensor4& o);
  Tensor4& operator-=(const Tensor4& o);
  Tensor4& operator*=(double s);

  friend Tensor4 operator+(Tensor4 a, const Tensor4& b) { return a += b; }
  friend Tensor4 operator-(Tensor4 a, const Tensor4& b) { return a -= b; }
  friend Tensor4 operator-(const Tensor4& a) { return Tensor4(-a.mandel_); }
  friend Tensor4 operator*(double s, Tensor4 a) { return a *= s; }

 private:
  explicit Tensor4(const Eigen::Matrix3d& m) : mandel_(m) {}
  Eigen::Matrix3d mandel_;
};

/// Infinitesimal rigid motion R(x) = W x + c with W = [[0,-w],[w,0]].
struct RigidMotion {
  double spin = 0.0;
  Vec2 shift = Vec2::Zero();

  Vec2 operator()(const Vec2& x) const { return {-spin * x.y() + shift.x(), spin * x.x() + shift.y()}; }
  /// Full (non-symmetric) gradient; its symmetric part is identically zero.
  Mat2 gradient() const {
    Mat2 g;
    g << 0.0, -spin, spin, 0.0;
    return g;
  }
};

/// lambda tr(A) I + 2 mu A.
Tensor4 make_isotropic(double lambda, double mu);

/// Returns (lambda, mu) when the tensor is isotropic to `tol` (relative).
std::optional<std::array<double, 2>> isotropic_parameters(const Tensor4& c, double tol = 1e-12);

SymMat2 contract(const Tensor4& c, const SymMat2& a);
double double_contract(const Tensor4& c, const SymMat2& a, const SymMat2& b);

/// Smallest eigenvalue of the Mandel matrix = min of C A : A over |A| = 1.
double convexity_margin(const Tensor4& c);

/// Composition (a o b) as maps on symmetric matrices. Not symmetric in
/// general, so it is returned as a raw Mandel matrix.
Eigen::Matrix3d compose(const Tensor4& a, const Tensor4& b);

/// Inverse on symmetric matrices; throws SingularTensorError when the
/// convexity margin is <= 1e-12.
Tensor4 invert(const Tensor4& c);

/// Mandel-basis matrix of A -> Q A Q^T for the rotation by `angle`.
Eigen::Matrix3d mandel_rotation(double angle);

/// Tensor of the rotated material: (R C)(A) = Q C(Q^T A Q) Q^T.
Tensor4 rotate(const Tensor4& c, double angle);

Mat2 rotation_matrix(double angle);

}  // namespace striplab
