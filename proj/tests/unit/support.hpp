#pragma once

#include <cmath>
#include <random>

#include "striplab/tensor_core.hpp"

namespace striplab::testing {

inline SymMat2 random_sym(std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, scale);
  return {g(rng), g(rng), g(rng)};
}

inline Vec2 random_unit(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 2.0 * 3.14159265358979323846);
  const double a = u(rng);
  return {std::cos(a), std::sin(a)};
}

/// Unit-Frobenius tensor with convexity margin >= min_margin.
inline Tensor4 random_convex(std::mt19937_64& rng, double min_margin = 0.1) {
  std::normal_distribution<double> g(0.0, 0.5);
  for (;;) {
    Eigen::Matrix3d a;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) a(i, j) = g(rng);
    Eigen::Matrix3d m = a * a.transpose() + 0.3 * Eigen::Matrix3d::Identity();
    m /= m.norm();
    m = 0.5 * (m + m.transpose());
    const Tensor4 c = Tensor4::from_mandel(m);
    if (convexity_margin(c) >= min_margin) return c;
  }
}

/// Lame pair with mu > 0 and lambda + mu > 0.
inline std::array<double, 2> random_lame(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> mu_d(0.2, 3.0), frac(-0.9, 3.0);
  const double mu = mu_d(rng);
  return {frac(rng) * mu, mu};
}

using Components = std::array<std::array<std::array<std::array<double, 2>, 2>, 2>, 2>;

inline Components components(const Tensor4& c) {
  Components out{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) out[i][j][k][l] = c.component(i, j, k, l);
  return out;
}

}  // namespace striplab::testing
