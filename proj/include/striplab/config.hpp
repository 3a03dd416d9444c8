#pragma once

// JSON study configurations and tensor/curve/domain literals.
//
// Tensor:   {"lambda": l, "mu": m} | {"mandel": [[..],[..],[..]]}
// Domain:   {"kind": "disk", "center": [x, y], "radius": r}
//           {"kind": "polygon", "vertices": [[x, y], ...]}
//           {"kind": "rectangle", "lo": [x, y], "hi": [x, y]}
// Curve:    {"kind": "segment", "p0": [..], "p1": [..]}
//           {"kind": "arc", "center": [..], "radius": r, "angle0": a, "angle1": b}
//           {"kind": "spline", "points": [[..], ...]}
//           each with an optional "reversed": true
// Traction: {"kind": "constant_stress", "E": [[e11, e12], [e12, e22]]}  (psi = (C0 E) nu)
//           {"kind": "polynomial_stress", "S0": .., "S1": .., "S2": ..} (psi = (S0 + x1 S1 + x2 S2) nu)
//
// Unknown keys and wrong types raise ConfigError.

#include <filesystem>
#include <string>

#include <Eigen/Dense>

#include "striplab/asymptotics.hpp"

namespace striplab {

/// Parses a study from JSON text; `output_dir` receives the "output" entry
/// when present.
StudyConfig parse_study(const std::string& text, std::string* output_dir = nullptr);
StudyConfig load_study(const std::filesystem::path& path, std::string* output_dir = nullptr);

/// Raw Mandel matrix of a tensor literal (no symmetry check).
Eigen::Matrix3d parse_tensor_matrix(const std::string& text);
/// Tensor literal; asymmetric Mandel input raises SymmetryError.
Tensor4 parse_tensor(const std::string& text);

Curve parse_curve(const std::string& text);
Domain parse_domain(const std::string& text);

/// Reads `arg` as a file when such a file exists, otherwise returns it as
/// inline text.
std::string read_text_or_literal(const std::string& arg);

}  // namespace striplab
