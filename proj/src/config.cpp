#include "striplab/config.hpp"

#include <fstream>
#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include <json.hpp>

#include "striplab/errors.hpp"

namespace striplab {

namespace {

using nlohmann::json;

// Typed field access with ConfigError messages that name the key path.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(where() + " must be an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  const json& at(const std::string& key) {
    used_.insert(key);
    if (!j_.contains(key)) throw ConfigError(where() + ": missing key \"" + key + "\"");
    return j_.at(key);
  }

  double number(const std::string& key) {
    const json& v = at(key);
    if (!v.is_number()) throw ConfigError(where(key) + " must be a number");
    return v.get<double>();
  }
  double number(const std::string& key, double fallback) { return has(key) ? number(key) : fallback; }

  int integer(const std::string& key, int fallback) {
    if (!has(key)) return fallback;
    const json& v = at(key);
    if (!v.is_number_integer()) throw ConfigError(where(key) + " must be an integer");
    return v.get<int>();
  }

  bool boolean(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const json& v = at(key);
    if (!v.is_boolean()) throw ConfigError(where(key) + " must be true or false");
    return v.get<bool>();
  }

  std::string string(const std::string& key) {
    const json& v = at(key);
    if (!v.is_string()) throw ConfigError(where(key) + " must be a string");
    return v.get<std::string>();
  }

  Vec2 vec(const std::string& key) { return to_vec(at(key), where(key)); }

  std::string where(const std::string& key = "") const { return key.empty() ? path_ : path_ + "." + key; }

  /// Rejects keys that were never read.
  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!used_.count(it.key())) throw ConfigError(where() + ": unknown key \"" + it.key() + "\"");
    }
  }

  static Vec2 to_vec(const json& v, const std::string& where) {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
      throw ConfigError(where + " must be a pair of numbers");
    }
    return {v[0].get<double>(), v[1].get<double>()};
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("JSON parse error: ") + e.what());
  }
}

SymMat2 sym_matrix(const json& v, const std::string& where) {
  if (!v.is_array() || v.size() != 2) throw ConfigError(where + " must be a 2x2 matrix");
  Mat2 m;
  for (int i = 0; i < 2; ++i) {
    const Vec2 row = Reader::to_vec(v[i], where);
    m.row(i) = row.transpose();
  }
  if (std::abs(m(0, 1) - m(1, 0)) > 1e-12 * std::max(1.0, m.cwiseAbs().maxCoeff())) {
    throw ConfigError(where + " must be symmetric");
  }
  return SymMat2::symmetrize(m);
}

Eigen::Matrix3d tensor_matrix(const json& j, const std::string& where) {
  Reader r(j, where);
  Eigen::Matrix3d m;
  if (r.has("mandel")) {
    const json& v = r.at("mandel");
    if (!v.is_array() || v.size() != 3) throw ConfigError(where + ".mandel must be a 3x3 matrix");
    for (int i = 0; i < 3; ++i) {
      if (!v[i].is_array() || v[i].size() != 3) throw ConfigError(where + ".mandel must be a 3x3 matrix");
      for (int k = 0; k < 3; ++k) {
        if (!v[i][k].is_number()) throw ConfigError(where + ".mandel entries must be numbers");
        m(i, k) = v[i][k].get<double>();
      }
    }
  } else {
    m = make_isotropic(r.number("lambda"), r.number("mu")).mandel();
  }
  r.finish();
  return m;
}

Tensor4 tensor_from(const json& j, const std::string& where) { return Tensor4::from_mandel(tensor_matrix(j, where)); }

Domain domain_from(const json& j, const std::string& where) {
  Reader r(j, where);
  const std::string kind = r.string("kind");
  Domain d = Domain::disk({0.0, 0.0}, 1.0);
  if (kind == "disk") {
    d = Domain::disk(r.vec("center"), r.number("radius"));
  } else if (kind == "rectangle") {
    d = Domain::rectangle(r.vec("lo"), r.vec("hi"));
  } else if (kind == "polygon") {
    const json& v = r.at("vertices");
    if (!v.is_array()) throw ConfigError(where + ".vertices must be an array");
    std::vector<Vec2> pts;
    for (const auto& p : v) pts.push_back(Reader::to_vec(p, where + ".vertices"));
    d = Domain::polygon(std::move(pts));
  } else {
    throw ConfigError(where + ".kind must be disk, rectangle or polygon");
  }
  r.finish();
  return d;
}

Curve curve_from(const json& j, const std::string& where) {
  Reader r(j, where);
  const std::string kind = r.string("kind");
  Curve c = Curve::segment({0.0, 0.0}, {1.0, 0.0});
  if (kind == "segment") {
    c = Curve::segment(r.vec("p0"), r.vec("p1"));
  } else if (kind == "arc") {
    c = Curve::arc(r.vec("center"), r.number("radius"), r.number("angle0"), r.number("angle1"));
  } else if (kind == "spline") {
    const json& v = r.at("points");
    if (!v.is_array()) throw ConfigError(where + ".points must be an array");
    std::vector<Vec2> pts;
    for (const auto& p : v) pts.push_back(Reader::to_vec(p, where + ".points"));
    c = Curve::spline(std::move(pts));
  } else {
    throw ConfigError(where + ".kind must be segment, arc or spline");
  }
  if (r.boolean("reversed", false)) c = c.reversed();
  r.finish();
  return c;
}

}  // namespace

Eigen::Matrix3d parse_tensor_matrix(const std::string& text) { return tensor_matrix(parse_json(text), "tensor"); }
Tensor4 parse_tensor(const std::string& text) { return tensor_from(parse_json(text), "tensor"); }
Curve parse_curve(const std::string& text) { return curve_from(parse_json(text), "curve"); }
Domain parse_domain(const std::string& text) { return domain_from(parse_json(text), "domain"); }

StudyConfig parse_study(const std::string& text, std::string* output_dir) {
  const json j = parse_json(text);
  Reader r(j, "config");
  StudyConfig c;
  if (r.has("name")) c.name = r.string("name");
  c.domain = domain_from(r.at("domain"), "config.domain");
  c.curve = curve_from(r.at("curve"), "config.curve");
  c.c0 = tensor_from(r.at("c0"), "config.c0");
  c.c1 = tensor_from(r.at("c1"), "config.c1");

  {
    Reader t(r.at("traction"), "config.traction");
    const std::string kind = t.string("kind");
    if (kind == "constant_stress") {
      c.traction.s0 = contract(c.c0, sym_matrix(t.at("E"), "config.traction.E"));
    } else if (kind == "polynomial_stress") {
      c.traction.s0 = sym_matrix(t.at("S0"), "config.traction.S0");
      if (t.has("S1")) c.traction.s1 = sym_matrix(t.at("S1"), "config.traction.S1");
      if (t.has("S2")) c.traction.s2 = sym_matrix(t.at("S2"), "config.traction.S2");
    } else {
      throw ConfigError("config.traction.kind must be constant_stress or polynomial_stress");
    }
    t.finish();
  }

  const json& pts = r.at("points");
  if (!pts.is_array()) throw ConfigError("config.points must be an array");
  for (const auto& p : pts) c.points.push_back(Reader::to_vec(p, "config.points"));
  const json& eps = r.at("eps");
  if (!eps.is_array()) throw ConfigError("config.eps must be an array");
  for (const auto& e : eps) {
    if (!e.is_number()) throw ConfigError("config.eps entries must be numbers");
    c.eps.push_back(e.get<double>());
  }

  if (r.has("mesh")) {
    Reader m(r.at("mesh"), "config.mesh");
    c.mesh.h = m.number("h", c.mesh.h);
    c.mesh.tube_size_factor = m.number("tube_size_factor", c.mesh.tube_size_factor);
    c.mesh.grading = m.number("grading", c.mesh.grading);
    c.mesh.point_refinement = m.number("point_refinement", c.mesh.point_refinement);
    c.mesh.order = m.integer("order", c.mesh.order);
    m.finish();
  }
  if (r.has("quadrature")) {
    Reader q(r.at("quadrature"), "config.quadrature");
    c.quadrature.order = q.integer("order", c.quadrature.order);
    c.quadrature.panels = q.integer("panels", c.quadrature.panels);
    c.quadrature.tol = q.number("tol", c.quadrature.tol);
    c.quadrature.max_order = q.integer("max_order", c.quadrature.max_order);
    q.finish();
  }
  c.trim_exponent = r.number("trim_exponent", c.trim_exponent);
  c.geometry_k = r.number("K", c.geometry_k);
  if (r.has("convention")) {
    try {
      c.convention = convention_from_string(r.string("convention"));
    } catch (const InvalidArgument& e) {
      throw ConfigError(std::string("config.convention: ") + e.what());
    }
  }
  if (r.has("thresholds")) {
    Reader t(r.at("thresholds"), "config.thresholds");
    Thresholds& th = c.thresholds;
    th.residual_slope_min = t.number("residual_slope_min", th.residual_slope_min);
    th.residual_fit_points = t.integer("residual_fit_points", th.residual_fit_points);
    th.h1_slope_min = t.number("h1_slope_min", th.h1_slope_min);
    th.h1_slope_max = t.number("h1_slope_max", th.h1_slope_max);
    th.l2_slope_min = t.number("l2_slope_min", th.l2_slope_min);
    th.representation_tol = t.number("representation_tol", th.representation_tol);
    th.check_residual = t.boolean("check_residual", th.check_residual);
    th.check_sign = t.boolean("check_sign", th.check_sign);
    th.check_energy = t.boolean("check_energy", th.check_energy);
    th.check_representation = t.boolean("check_representation", th.check_representation);
    th.check_quadrature = t.boolean("check_quadrature", th.check_quadrature);
    t.finish();
  }
  if (r.has("output")) {
    const std::string out = r.string("output");
    if (output_dir) *output_dir = out;
  }
  if (r.has("seed")) {
    const json& s = r.at("seed");
    if (!s.is_number_unsigned()) throw ConfigError("config.seed must be a non-negative integer");
    c.seed = s.get<std::uint64_t>();
  }
  r.finish();
  return c;
}

std::string read_text_or_literal(const std::string& arg) {
  std::error_code ec;
  if (std::filesystem::is_regular_file(arg, ec)) {
    std::ifstream is(arg);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
  }
  return arg;
}

StudyConfig load_study(const std::filesystem::path& path, std::string* output_dir) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read config " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return parse_study(ss.str(), output_dir);
}

}  // namespace striplab
