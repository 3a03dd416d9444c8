#pragma once

// Elastic moment tensor of a thin strip inclusion, built from the
// interface transmission conditions (laminate construction).
//
// Across an interface with unit normal n, the interior and exterior strains
// of a piecewise-affine field satisfy
//   e_int = e_ext + delta (x) n + n (x) delta,      (tangential continuity)
//   C1 e_int n = C0 e_ext n,                         (traction continuity)
// which gives delta = 1/2 q((C0 - C1) e_ext n), with q the inverse of the
// acoustic-type matrix zeta -> (C1 sym(zeta (x) n)) n.

#include <array>
#include <string>

#include "striplab/tensor_core.hpp"

namespace striplab {

/// Orthonormal frame on the inclusion spine.
struct Frame {
  Vec2 n;    // unit normal
  Vec2 tau;  // unit tangent
};

/// Which sign the returned tensor carries.
///  - Constructive: Mt with (C0 - C1) e_int = Mt e_ext.
///  - Expansion:    T = -Mt, i.e. (C1 - C0) e_int = T e_ext.
enum class Convention { Expansion, Constructive };

const char* to_string(Convention c);
Convention convention_from_string(const std::string& s);

struct MomentTensor {
  Tensor4 tensor;
  Convention convention = Convention::Expansion;

  /// Same tensor in the other convention (exact negation).
  MomentTensor as(Convention target) const;
};

/// Q with Q zeta . xi = C1 sym(zeta (x) n) : sym(xi (x) n).
Mat2 q_inverse(const Tensor4& c1, const Vec2& n);

/// Inverse of q_inverse.
Mat2 q_matrix(const Tensor4& c1, const Vec2& n);

struct TransmissionState {
  SymMat2 e_int;
  Vec2 delta;
};

/// Interior strain matching the exterior strain `e_ext` across an interface
/// with normal `n`.
TransmissionState transmission_solve(const Tensor4& c0, const Tensor4& c1, const Vec2& n, const SymMat2& e_ext);

/// Mt h = (C0 - C1) h + (C0 - C1) sym(q((C0 - C1) h n) (x) n), evaluated
/// directly (no Mandel assembly).
SymMat2 constructive_apply(const Tensor4& c0, const Tensor4& c1, const Vec2& n, const SymMat2& h);

MomentTensor moment_tensor(const Tensor4& c0, const Tensor4& c1, const Vec2& n,
                           Convention convention = Convention::Expansion);

/// Coefficients of the isotropic closed form
///   M h = a tr(h) I + b h + c ((h tau).tau) tau(x)tau + d ((h n).n) n(x)n.
struct IsotropicCoefficients {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double d = 0.0;
};

/// Reference rational expressions for (a, b, c, d) in terms of the Lame
/// parameters of the two phases. Throws ConvexityError unless mu0, mu1 > 0
/// and lambda0 + mu0, lambda1 + mu1 > 0.
IsotropicCoefficients isotropic_moment_coeffs(double lambda0, double mu0, double lambda1, double mu1);

/// Evaluates a tr(h) I + b h + c ((h tau).tau) tau(x)tau + d ((h n).n) n(x)n.
SymMat2 apply_isotropic_form(const IsotropicCoefficients& k, const Frame& frame, const SymMat2& h);

struct IsotropicFit {
  IsotropicCoefficients coeffs;
  /// Largest entry of the tensor not representable by the four-term form.
  double residual = 0.0;
};

/// Reads (a, b, c, d) off a tensor written in the frame (tau, n). `residual`
/// is zero exactly when the tensor has the four-term form.
IsotropicFit fit_isotropic_form(const Tensor4& m, const Frame& frame);

struct BoundsReport {
  bool lower_ok = false;
  bool upper_ok = false;
  double lower = 0.0;   // C0 C1^{-1} (C1 - C0) E : E
  double value = 0.0;   // T E : E
  double upper = 0.0;   // (C1 - C0) E : E
};

/// Checks C0 C1^{-1}(C1 - C0) E:E <= T E:E <= (C1 - C0) E:E with slack 1e-10
/// (scaled by the magnitudes involved). `m` must be in the Expansion
/// convention, otherwise InvalidArgument.
BoundsReport bounds_check(const Tensor4& c0, const Tensor4& c1, const MomentTensor& m, const SymMat2& e);

}  // namespace striplab
