#include "striplab/asymptotics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "striplab/errors.hpp"
#include "striplab/mesh.hpp"

namespace striplab {

namespace {

Vec2 correction_sum(const std::vector<CurveNode>& nodes, const MomentField& moment, const StrainField& grad_u,
                    const NeumannStrains& grad_n) {
  Vec2 sum = Vec2::Zero();
  for (const auto& node : nodes) {
    const SymMat2 stress = contract(moment(node), grad_u(node.point));
    const auto gn = grad_n(node.point);
    sum.x() += node.weight * frobenius(stress, gn[0]);
    sum.y() += node.weight * frobenius(stress, gn[1]);
  }
  return sum;
}

std::string fmt(double v, const char* spec = "%.4g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

}  // namespace

Correction first_order_correction(const Curve& curve, const MomentField& moment, const StrainField& grad_u,
                                  const NeumannStrains& grad_n, double eps, const QuadratureOptions& options) {
  if (!(eps > 0.0)) throw InvalidArgument("eps must be positive");
  if (options.order < 1 || options.panels < 1) throw InvalidArgument("quadrature order and panels must be positive");
  auto eval = [&](int order) {
    return Vec2(2.0 * eps * correction_sum(quadrature_nodes(curve, order, 0.0, options.panels), moment, grad_u, grad_n));
  };
  Correction out;
  Vec2 prev = eval(options.order);
  out.value = prev;
  out.order = options.order;
  for (int order = 2 * options.order; order <= std::max(options.max_order, 2 * options.order); order *= 2) {
    const Vec2 cur = eval(order);
    const double diff = (cur - prev).norm();
    const double scale = cur.norm();
    out.value = cur;
    out.order = order;
    out.relative_change = diff == 0.0 ? 0.0 : (scale > 0.0 ? diff / scale : INFINITY);
    if (out.relative_change <= options.tol) {
      out.converged = true;
      return out;
    }
    prev = cur;
  }
  return out;
}

double MeasurePoints::total_weight() const {
  double sum = 0.0;
  for (const auto& e : entries) sum += e.weight;
  return sum;
}

Vec2 general_correction(const MeasurePoints& measure, double volume, const StrainField& grad_u,
                        const NeumannStrains& grad_n) {
  if (measure.normalization != MeasurePoints::Normalization::Probability) {
    throw InvalidArgument("general correction needs a probability-normalised measure");
  }
  if (measure.entries.empty()) throw InvalidArgument("empty measure");
  for (const auto& e : measure.entries) {
    if (!(e.weight > 0.0)) throw InvalidArgument("measure weights must be positive");
  }
  if (std::abs(measure.total_weight() - 1.0) > 1e-12) {
    throw InvalidArgument("measure total weight " + fmt(measure.total_weight(), "%.17g") + " is not 1");
  }
  Vec2 sum = Vec2::Zero();
  for (const auto& e : measure.entries) {
    const SymMat2 stress = contract(e.moment, grad_u(e.point));
    const auto gn = grad_n(e.point);
    sum.x() += e.weight * frobenius(stress, gn[0]);
    sum.y() += e.weight * frobenius(stress, gn[1]);
  }
  return volume * sum;
}

MeasurePoints tube_measure(const Curve& curve, const MomentField& moment, int order, int panels,
                           MeasurePoints::Normalization normalization) {
  MeasurePoints m;
  m.normalization = normalization;
  const double scale = normalization == MeasurePoints::Normalization::Probability ? 1.0 / curve.length() : 1.0;
  for (const auto& node : quadrature_nodes(curve, order, 0.0, panels)) {
    m.entries.push_back({node.point, node.weight * scale, moment(node)});
  }
  return m;
}

MomentField constant_phase_moment(const Tensor4& c0, const Tensor4& c1, Convention convention) {
  return [c0, c1, convention](const CurveNode& node) { return moment_tensor(c0, c1, node.frame.n, convention).tensor; };
}

CellMoment cell_average_moment(const NeumannSolver& solver, const TubeRegion& tube) {
  const FunctionSpace& sp = solver.space();
  const Mesh& mesh = sp.mesh();
  const Tensor4 jump = solver.phases().inclusion - solver.phases().background;
  const double trim = tube.curve.closed() ? 0.0 : tube.trim_length();
  const double length = tube.curve.length();

  // Cells of the trimmed sub-tube, chosen once for all three problems.
  std::vector<int> cells;
  std::vector<Vec2> centroids;
  double area = 0.0;
  for (int t = 0; t < sp.cell_count(); ++t) {
    if (mesh.tags[t] != kInclusion) continue;
    const auto& tri = mesh.triangles[t];
    const Vec2 g = (mesh.nodes[tri[0]] + mesh.nodes[tri[1]] + mesh.nodes[tri[2]]) / 3.0;
    const auto coords = signed_tube_coordinates(tube.curve, g);
    if (!coords || coords->s < trim || coords->s > length - trim) continue;
    cells.push_back(t);
    centroids.push_back(g);
    area += mesh.triangle_area(t);
  }
  if (cells.empty()) throw MeshError("no inclusion cells in the trimmed tube");

  CellMoment out;
  out.averaged_area = area;
  const std::array<std::array<int, 2>, 3> cases{{{0, 0}, {1, 1}, {0, 1}}};
  for (int col = 0; col < 3; ++col) {
    const FemField v = solve_cell(solver, cases[col][0], cases[col][1]);
    Mandel3 avg = Mandel3::Zero();
    // The strain of an order <= 2 field is affine per cell, so the centroid
    // value is the cell average.
    for (std::size_t k = 0; k < cells.size(); ++k) {
      avg += mesh.triangle_area(cells[k]) * contract(jump, v.strain(centroids[k])).mandel();
    }
    avg /= area;
    // E^{12} has Mandel coordinates (0, 0, 1/sqrt 2).
    out.raw.col(col) = col == 2 ? Mandel3(kSqrt2 * avg) : avg;
  }
  const Eigen::Matrix3d sym = 0.5 * (out.raw + out.raw.transpose());
  out.tensor = Tensor4::from_mandel(sym);
  const double norm = out.raw.norm();
  out.asymmetry = norm > 0.0 ? (out.raw - out.raw.transpose()).norm() / norm : 0.0;
  return out;
}

SlopeFit fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  SlopeFit fit;
  if (x.size() != y.size()) throw InvalidArgument("slope fit needs matching samples");
  fit.points = static_cast<int>(x.size());
  if (x.size() < 2) return fit;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0) || !std::isfinite(y[i])) return fit;
  }
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]) / n;
    my += std::log(y[i]) / n;
  }
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(y[i]) - my);
  }
  if (!(sxx > 0.0)) return fit;
  fit.slope = sxy / sxx;
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = std::log(y[i]) - (my + fit.slope * (std::log(x[i]) - mx));
    ss += r * r;
  }
  fit.fit_residual = std::sqrt(ss / n);
  fit.std_error = x.size() > 2 ? std::sqrt(ss / (n - 2.0) / sxx) : 0.0;
  fit.defined = true;
  return fit;
}

// ---------------------------------------------------------------------------
// Study

Traction TractionSpec::traction() const {
  return Traction{[s0 = s0, s1 = s1, s2 = s2](const Vec2& x, const Vec2& nu) {
    return (s0 + x.x() * s1 + x.y() * s2).apply(nu);
  }};
}

bool TractionSpec::constant() const { return s1.norm() == 0.0 && s2.norm() == 0.0; }

void validate_config(const StudyConfig& c) {
  if (c.eps.empty()) throw ConfigError("eps list is empty");
  for (std::size_t i = 0; i < c.eps.size(); ++i) {
    if (!(c.eps[i] > 0.0)) throw ConfigError("eps values must be positive");
    if (i > 0 && !(c.eps[i] < c.eps[i - 1])) throw ConfigError("eps list must be strictly decreasing");
  }
  if (c.points.empty()) throw ConfigError("no boundary evaluation points");
  for (const auto& y : c.points) {
    if (!c.domain.on_boundary(y, 1e-9)) {
      throw ConfigError("evaluation point (" + fmt(y.x()) + ", " + fmt(y.y()) + ") is not on the domain boundary");
    }
  }
  if (!(c.mesh.h > 0.0)) throw ConfigError("mesh.h must be positive");
  if (!(c.mesh.tube_size_factor > 0.0 && c.mesh.tube_size_factor <= 0.5)) {
    throw ConfigError("mesh.tube_size_factor must lie in (0, 0.5]");
  }
  if (!(c.mesh.grading > 0.0)) throw ConfigError("mesh.grading must be positive");
  if (!(c.mesh.point_refinement >= 1.0)) throw ConfigError("mesh.point_refinement must be >= 1");
  if (c.mesh.order != 1 && c.mesh.order != 2) throw ConfigError("mesh.order must be 1 or 2");
  if (c.quadrature.order < 1 || c.quadrature.panels < 1 || !(c.quadrature.tol > 0.0)) {
    throw ConfigError("quadrature order, panels and tol must be positive");
  }
  if (!(c.trim_exponent > 0.0 && c.trim_exponent < 1.0)) throw ConfigError("trim_exponent must lie in (0, 1)");
  if (c.thresholds.residual_fit_points < 2) throw ConfigError("thresholds.residual_fit_points must be >= 2");
  if (!(convexity_margin(c.c0) > 0.0)) throw ConvexityError("c0 is not strongly convex");
  if (!(convexity_margin(c.c1) > 0.0)) throw ConvexityError("c1 is not strongly convex");

  const GeometryReport report = validate(c.curve, c.domain, c.geometry_k);
  if (!report.ok()) throw GeometryError("curve violates the geometry conditions:\n" + report.text());
  for (double e : c.eps) validate_tube(TubeRegion{c.curve, e, c.trim_exponent}, c.domain);

  // Compatibility of the traction on a coarse discretisation of the domain.
  MeshOptions mo;
  mo.h = std::max(c.mesh.h, 0.05 * std::sqrt(c.domain.area()));
  const auto mesh = std::make_shared<Mesh>(generate_mesh(c.domain, std::nullopt, mo));
  const FunctionSpace space(mesh, 2);
  const double res = compatibility_residual(space, assemble_traction(space, c.traction.traction()));
  if (res > 1e-10) throw ConfigError("traction is not balanced (rigid-motion residual " + fmt(res) + ")");
}

EpsilonRow run_epsilon_case(const StudyConfig& c, double eps) {
  const TubeRegion tube{c.curve, eps, c.trim_exponent};
  MeshOptions mo;
  mo.h = c.mesh.h;
  mo.tube_size = c.mesh.tube_size_factor * eps;
  mo.grading = c.mesh.grading;
  mo.boundary_points = c.points;
  mo.point_refinement = c.mesh.point_refinement;
  const auto mesh = std::make_shared<Mesh>(generate_mesh(c.domain, tube, mo));
  const auto space = std::make_shared<FunctionSpace>(mesh, c.mesh.order);

  // Both solves share the mesh; the unperturbed one uses C0 in the tube.
  const NeumannSolver perturbed(space, Phases{c.c0, c.c1});
  const NeumannSolver background(space, Phases{c.c0, c.c0});
  const Eigen::VectorXd load = assemble_traction(*space, c.traction.traction());
  const FemField u_eps = perturbed.solve(load);
  const FemField u0 = background.solve(load);
  const FemField diff = u_eps - u0;

  EpsilonRow row;
  row.eps = eps;
  row.area = tube.exact_area();
  row.tagged_area = mesh->tagged_area(kInclusion);
  row.nodes = space->node_count();
  row.dofs = space->dof_count();
  const NormPair norms = energy_norms(u_eps, u0);
  row.l2_diff = norms.l2;
  row.h1_diff = norms.h1;

  const MomentField expansion = constant_phase_moment(c.c0, c.c1, Convention::Expansion);
  const MomentField constructive = constant_phase_moment(c.c0, c.c1, Convention::Constructive);
  const Tensor4 jump = c.c1 - c.c0;
  const StrainField grad_u = [&](const Vec2& x) { return u0.strain(x); };
  for (const Vec2& y : c.points) {
    const int node = boundary_node(*space, y);
    const FemField n0 = background.solve(neumann_load(*space, node, 0));
    const FemField n1 = background.solve(neumann_load(*space, node, 1));
    const NeumannStrains grad_n = [&](const Vec2& x) { return std::array<SymMat2, 2>{n0.strain(x), n1.strain(x)}; };

    PointResult p;
    p.lhs = diff.nodal(node);
    p.quadrature = first_order_correction(c.curve, expansion, grad_u, grad_n, eps, c.quadrature);
    p.rhs_exp = p.quadrature.value;
    const Correction neg = first_order_correction(c.curve, constructive, grad_u, grad_n, eps, c.quadrature);
    p.rhs_neg = neg.value;
    p.quadrature.converged = p.quadrature.converged && neg.converged;
    p.resid_exp = (p.lhs - p.rhs_exp).norm();
    p.resid_neg = (p.lhs - p.rhs_neg).norm();
    p.volume_form = {region_pairing(u_eps, n0, jump, kInclusion), region_pairing(u_eps, n1, jump, kInclusion)};
    row.points.push_back(p);
  }
  return row;
}

bool ConvergenceReport::passed() const {
  return std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.passed; });
}

void finalize_report(ConvergenceReport& r) {
  const StudyConfig& c = r.config;
  const Thresholds& th = c.thresholds;
  const std::size_t np = c.points.size();
  const bool expansion = c.convention == Convention::Expansion;

  double peak = 0.0;
  for (const auto& row : r.rows) {
    for (const auto& p : row.points) {
      peak = std::max({peak, p.lhs.norm(), p.rhs_exp.norm(), p.rhs_neg.norm(), p.volume_form.norm()});
    }
  }
  r.degenerate = peak == 0.0;

  std::vector<double> eps_all;
  for (const auto& row : r.rows) eps_all.push_back(row.eps);
  const std::size_t nfit = std::min<std::size_t>(th.residual_fit_points, r.rows.size());
  const std::vector<double> eps_fit(eps_all.end() - static_cast<std::ptrdiff_t>(nfit), eps_all.end());
  r.resid_exp_slopes.clear();
  r.resid_neg_slopes.clear();
  for (std::size_t k = 0; k < np; ++k) {
    std::vector<double> re, rn;
    for (std::size_t i = r.rows.size() - nfit; i < r.rows.size(); ++i) {
      re.push_back(r.rows[i].points[k].resid_exp);
      rn.push_back(r.rows[i].points[k].resid_neg);
    }
    r.resid_exp_slopes.push_back(fit_loglog_slope(eps_fit, re));
    r.resid_neg_slopes.push_back(fit_loglog_slope(eps_fit, rn));
  }
  std::vector<double> h1, l2;
  for (const auto& row : r.rows) {
    h1.push_back(row.h1_diff);
    l2.push_back(row.l2_diff);
  }
  r.h1_slope = fit_loglog_slope(eps_all, h1);
  r.l2_slope = fit_loglog_slope(eps_all, l2);

  r.verdicts.clear();
  const std::string degenerate_note = "degenerate: all residuals zero";
  const auto& primary = expansion ? r.resid_exp_slopes : r.resid_neg_slopes;
  const char* primary_name = expansion ? "expansion" : "negated";

  if (th.check_residual) {
    Verdict v{"residual_slope", true, ""};
    if (r.degenerate) {
      v.detail = degenerate_note;
    } else {
      std::ostringstream d;
      d << primary_name << " residual slopes over " << nfit << " smallest eps:";
      for (std::size_t k = 0; k < np; ++k) {
        const SlopeFit& f = primary[k];
        const bool ok = f.defined && f.points >= 2 && f.slope >= th.residual_slope_min;
        v.passed = v.passed && ok;
        d << " y" << k << "=" << (f.defined ? fmt(f.slope, "%.3f") : std::string("undefined"));
      }
      d << " (min " << th.residual_slope_min << ")";
      v.detail = d.str();
    }
    r.verdicts.push_back(v);
  }
  if (th.check_sign) {
    Verdict v{"sign_discrimination", true, ""};
    if (r.degenerate) {
      v.detail = degenerate_note;
    } else {
      int wins = 0, total = 0;
      for (const auto& row : r.rows) {
        for (const auto& p : row.points) {
          const double mine = expansion ? p.resid_exp : p.resid_neg;
          const double other = expansion ? p.resid_neg : p.resid_exp;
          wins += mine < other;
          ++total;
        }
      }
      v.passed = wins == total;
      v.detail = std::string(primary_name) + " residual smaller than the opposite sign in " + std::to_string(wins) +
                 " of " + std::to_string(total) + " cases";
    }
    r.verdicts.push_back(v);
  }
  if (th.check_energy) {
    Verdict h{"h1_slope", true, ""}, l{"l2_slope", true, ""};
    if (r.degenerate) {
      h.detail = l.detail = degenerate_note;
    } else {
      h.passed = r.h1_slope.defined && r.h1_slope.slope >= th.h1_slope_min && r.h1_slope.slope <= th.h1_slope_max;
      h.detail = "H1 slope " + (r.h1_slope.defined ? fmt(r.h1_slope.slope, "%.3f") : std::string("undefined")) +
                 " (range [" + fmt(th.h1_slope_min) + ", " + fmt(th.h1_slope_max) + "])";
      l.passed = r.l2_slope.defined && r.l2_slope.slope >= th.l2_slope_min;
      l.detail = "L2 slope " + (r.l2_slope.defined ? fmt(r.l2_slope.slope, "%.3f") : std::string("undefined")) +
                 " (min " + fmt(th.l2_slope_min) + ")";
    }
    r.verdicts.push_back(h);
    r.verdicts.push_back(l);
  }
  if (th.check_representation && !r.rows.empty()) {
    // The volume form (C1 - C0) pairs with the expansion tensor; the
    // negated convention pairs with (C0 - C1).
    Verdict v{"representation", true, ""};
    if (r.degenerate) {
      v.detail = degenerate_note;
    } else {
      const double sign = expansion ? 1.0 : -1.0;
      std::ostringstream d;
      d << "relative gap at eps=" << r.rows.front().eps << ":";
      for (std::size_t k = 0; k < np; ++k) {
        const PointResult& p = r.rows.front().points[k];
        const double gap = (p.lhs - sign * p.volume_form).norm() / std::max(p.lhs.norm(), 1e-300);
        v.passed = v.passed && gap <= th.representation_tol;
        d << " y" << k << "=" << fmt(gap, "%.3g");
      }
      d << " (tol " << th.representation_tol << ")";
      v.detail = d.str();
    }
    r.verdicts.push_back(v);
  }
  if (th.check_quadrature) {
    Verdict v{"quadrature", true, "order doubling changes every correction by less than " + fmt(c.quadrature.tol)};
    for (const auto& row : r.rows) {
      for (const auto& p : row.points) v.passed = v.passed && p.quadrature.converged;
    }
    if (!v.passed) v.detail = "quadrature did not converge within order " + std::to_string(c.quadrature.max_order);
    r.verdicts.push_back(v);
  }
}

ConvergenceReport convergence_study(const StudyConfig& config, int jobs) {
  validate_config(config);
  ConvergenceReport report;
  report.config = config;
  const std::size_t n = config.eps.size();
  report.rows.resize(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        report.rows[i] = run_epsilon_case(config, config.eps[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int threads = std::clamp(jobs, 1, static_cast<int>(n));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  finalize_report(report);
  return report;
}

// ---------------------------------------------------------------------------
// Output

void write_csv_rows(const ConvergenceReport& report, std::size_t point, std::ostream& os) {
  os << "eps,area,lhs_x,lhs_y,rhs_exp_x,rhs_exp_y,rhs_neg_x,rhs_neg_y,resid_exp,resid_neg,l2_diff,h1_diff\n";
  for (const auto& row : report.rows) {
    const PointResult& p = row.points.at(point);
    const double v[] = {row.eps,      row.area,     p.lhs.x(),   p.lhs.y(),   p.rhs_exp.x(), p.rhs_exp.y(),
                        p.rhs_neg.x(), p.rhs_neg.y(), p.resid_exp, p.resid_neg, row.l2_diff,   row.h1_diff};
    for (std::size_t i = 0; i < std::size(v); ++i) os << (i ? "," : "") << fmt(v[i], "%.17g");
    os << '\n';
  }
}

std::vector<std::filesystem::path> write_convergence_csv(const ConvergenceReport& report,
                                                         const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> out;
  for (std::size_t k = 0; k < report.config.points.size(); ++k) {
    const auto path = dir / ("convergence_y" + std::to_string(k) + ".csv");
    std::ofstream os(path);
    if (!os) throw Error("cannot write " + path.string());
    write_csv_rows(report, k, os);
    out.push_back(path);
  }
  return out;
}

namespace {

nlohmann::json slope_json(const SlopeFit& f) {
  if (!f.defined) return {{"defined", false}, {"points", f.points}};
  return {{"defined", true},
          {"slope", f.slope},
          {"std_error", f.std_error},
          {"fit_residual", f.fit_residual},
          {"points", f.points}};
}

nlohmann::json vec_json(const Vec2& v) { return nlohmann::json::array({v.x(), v.y()}); }

}  // namespace

std::filesystem::path write_summary_json(const ConvergenceReport& r, const std::filesystem::path& dir) {
  using nlohmann::json;
  const StudyConfig& c = r.config;
  json j;
  j["name"] = c.name;
  j["convention"] = to_string(c.convention);
  j["eps"] = c.eps;
  json pts = json::array();
  for (const auto& y : c.points) pts.push_back(vec_json(y));
  j["points"] = pts;
  j["degenerate"] = r.degenerate;
  if (r.degenerate) j["note"] = "degenerate: all residuals zero";

  json slopes;
  json re = json::array(), rn = json::array();
  for (const auto& f : r.resid_exp_slopes) re.push_back(slope_json(f));
  for (const auto& f : r.resid_neg_slopes) rn.push_back(slope_json(f));
  slopes["resid_exp"] = re;
  slopes["resid_neg"] = rn;
  slopes["h1_diff"] = slope_json(r.h1_slope);
  slopes["l2_diff"] = slope_json(r.l2_slope);
  j["slopes"] = slopes;

  json rows = json::array();
  for (const auto& row : r.rows) {
    json jr{{"eps", row.eps},          {"area", row.area},   {"tagged_area", row.tagged_area},
            {"nodes", row.nodes},      {"dofs", row.dofs},   {"l2_diff", row.l2_diff},
            {"h1_diff", row.h1_diff}};
    json jp = json::array();
    for (const auto& p : row.points) {
      const double lhs = p.lhs.norm();
      jp.push_back({{"lhs", vec_json(p.lhs)},
                    {"rhs_exp", vec_json(p.rhs_exp)},
                    {"rhs_neg", vec_json(p.rhs_neg)},
                    {"volume_form", vec_json(p.volume_form)},
                    {"representation_gap_as_stated", lhs > 0 ? (p.lhs - p.volume_form).norm() / lhs : 0.0},
                    {"representation_gap_flipped", lhs > 0 ? (p.lhs + p.volume_form).norm() / lhs : 0.0},
                    {"quadrature_order", p.quadrature.order},
                    {"quadrature_change", p.quadrature.relative_change},
                    {"quadrature_converged", p.quadrature.converged}});
    }
    jr["points"] = jp;
    rows.push_back(jr);
  }
  j["rows"] = rows;

  // Closed-form coefficients of the expansion tensor at mid-curve, when both
  // phases are isotropic.
  if (isotropic_parameters(c.c0) && isotropic_parameters(c.c1)) {
    const Frame f = c.curve.frame(0.5 * c.curve.length());
    const IsotropicFit fit = fit_isotropic_form(moment_tensor(c.c0, c.c1, f.n).tensor, f);
    j["expansion_tensor_coefficients"] = {
        {"a", fit.coeffs.a}, {"b", fit.coeffs.b}, {"c", fit.coeffs.c}, {"d", fit.coeffs.d}, {"residual", fit.residual}};
  }

  json verdicts = json::object();
  for (const auto& v : r.verdicts) verdicts[v.name] = {{"passed", v.passed}, {"detail", v.detail}};
  j["verdicts"] = verdicts;
  j["passed"] = r.passed();

  std::filesystem::create_directories(dir);
  const auto path = dir / "summary.json";
  std::ofstream os(path);
  if (!os) throw Error("cannot write " + path.string());
  os << j.dump(2) << '\n';
  return path;
}

}  // namespace striplab
