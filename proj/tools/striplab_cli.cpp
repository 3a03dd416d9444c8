// Command-line front end.
//
// Exit codes:
//   0  success
//   1  a convergence threshold failed
//   2  usage, parse, configuration or geometry error (including non-unit normals)
//   3  asymmetric, non-convex or singular tensor
//   4  numerical failure (meshing, incompatible load, solver)

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "striplab/asymptotics.hpp"
#include "striplab/config.hpp"
#include "striplab/emt.hpp"
#include "striplab/errors.hpp"
#include "striplab/fem.hpp"
#include "striplab/mesh.hpp"

using namespace striplab;
namespace fs = std::filesystem;

namespace {

constexpr int kExitThreshold = 1;
constexpr int kExitConfig = 2;
constexpr int kExitTensor = 3;
constexpr int kExitNumerical = 4;

std::string num(double v, const char* spec = "%.10g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

void print_matrix(std::ostream& os, const Eigen::Matrix3d& m) {
  for (int i = 0; i < 3; ++i) {
    os << "  [";
    for (int k = 0; k < 3; ++k) os << (k ? ", " : "") << num(m(i, k), "% .10g");
    os << "]\n";
  }
}

Vec2 parse_vec(const std::string& s) {
  std::stringstream ss(s);
  double x = 0.0, y = 0.0;
  char comma = 0;
  if (!(ss >> x >> comma >> y) || comma != ',') throw ConfigError("expected a vector \"x,y\", got \"" + s + "\"");
  return {x, y};
}

struct Options {
  std::string config;
  std::string out;
  int jobs = 1;
  std::uint64_t seed = 1;
  int quad_order = 0;
};

StudyConfig load(const Options& o, std::string& out_dir) {
  if (o.config.empty()) throw ConfigError("--config is required");
  std::string from_file;
  StudyConfig c = load_study(o.config, &from_file);
  out_dir = o.out.empty() ? (from_file.empty() ? "results" : from_file) : o.out;
  if (o.quad_order > 0) c.quadrature.order = o.quad_order;
  return c;
}

// ---------------------------------------------------------------------------

int cmd_check_tensor(const std::string& input) {
  const Eigen::Matrix3d m = parse_tensor_matrix(read_text_or_literal(input));
  std::cout << "mandel matrix:\n";
  print_matrix(std::cout, m);
  const double scale = std::max(m.cwiseAbs().maxCoeff(), 1e-300);
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff() / scale;
  std::cout << "symmetry residual: " << num(asym, "%.3e") << '\n';
  if (asym > 1e-12) {
    std::cout << "symmetry: VIOLATED (major symmetry C_ijkl = C_klij fails)\n";
    return kExitTensor;
  }
  const Tensor4 c = Tensor4::from_mandel(m);
  const double margin = convexity_margin(c);
  std::cout << "convexity margin: " << num(margin) << '\n';
  if (const auto iso = isotropic_parameters(c)) {
    std::cout << "isotropic: yes (lambda = " << num((*iso)[0]) << ", mu = " << num((*iso)[1]) << ")\n";
  } else {
    std::cout << "isotropic: no\n";
  }
  if (!(margin > 0.0)) {
    std::cout << "strong convexity: VIOLATED\n";
    return kExitTensor;
  }
  std::cout << "strong convexity: ok\n";
  return 0;
}

int cmd_emt(const std::string& c0s, const std::string& c1s, const std::string& normal, std::uint64_t seed) {
  const Tensor4 c0 = parse_tensor(read_text_or_literal(c0s));
  const Tensor4 c1 = parse_tensor(read_text_or_literal(c1s));
  const Vec2 n = parse_vec(normal);
  for (const Tensor4* c : {&c0, &c1}) {
    if (!(convexity_margin(*c) > 0.0)) throw ConvexityError("phase tensor is not strongly convex");
  }
  const MomentTensor t = moment_tensor(c0, c1, n, Convention::Expansion);
  const MomentTensor mt = t.as(Convention::Constructive);
  std::cout << "expansion tensor T ((C1 - C0) e_int = T e_ext):\n";
  print_matrix(std::cout, t.tensor.mandel());
  std::cout << "constructive tensor Mt = -T:\n";
  print_matrix(std::cout, mt.tensor.mandel());

  const Frame frame{n, Vec2(-n.y(), n.x())};
  const auto iso0 = isotropic_parameters(c0);
  const auto iso1 = isotropic_parameters(c1);
  if (iso0 && iso1) {
    const IsotropicCoefficients k = isotropic_moment_coeffs((*iso0)[0], (*iso0)[1], (*iso1)[0], (*iso1)[1]);
    std::cout << "closed-form coefficients: a=" << num(k.a) << " b=" << num(k.b) << " c=" << num(k.c)
              << " d=" << num(k.d) << '\n';
    const IsotropicFit fit = fit_isotropic_form(mt.tensor, frame);
    std::cout << "coefficients of Mt: a=" << num(fit.coeffs.a) << " b=" << num(fit.coeffs.b)
              << " c=" << num(fit.coeffs.c) << " d=" << num(fit.coeffs.d) << " (form residual "
              << num(fit.residual, "%.2e") << ")\n";
  }

  // Oracle: interior strain from the transmission conditions.
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  double oracle = 0.0;
  int upper_ok = 0, lower_ok = 0;
  const int samples = 200;
  for (int i = 0; i < samples; ++i) {
    const SymMat2 e{g(rng), g(rng), g(rng)};
    const SymMat2 e_int = transmission_solve(c0, c1, n, e).e_int;
    const SymMat2 lhs = contract(c1 - c0, e_int);
    oracle = std::max(oracle, (lhs - contract(t.tensor, e)).norm() / e.norm());
    const BoundsReport b = bounds_check(c0, c1, t, e);
    upper_ok += b.upper_ok;
    lower_ok += b.lower_ok;
  }
  std::cout << "oracle residual: " << num(oracle, "%.3e") << '\n';
  std::cout << "upper bound T E:E <= (C1-C0) E:E: " << (upper_ok == samples ? "ok" : "VIOLATED") << " (" << upper_ok
            << "/" << samples << ")\n";
  std::cout << "lower bound C0 C1^-1 (C1-C0) E:E <= T E:E: " << (lower_ok == samples ? "ok" : "violated") << " ("
            << lower_ok << "/" << samples << ")\n";
  return 0;
}

struct CaseMesh {
  std::shared_ptr<const Mesh> mesh;
  std::shared_ptr<const FunctionSpace> space;
};

CaseMesh case_mesh(const StudyConfig& c, double eps, double h_scale = 1.0) {
  validate_tube(TubeRegion{c.curve, eps, c.trim_exponent}, c.domain);
  MeshOptions mo;
  mo.h = c.mesh.h * h_scale;
  mo.tube_size = c.mesh.tube_size_factor * eps * h_scale;
  mo.grading = c.mesh.grading;
  mo.boundary_points = c.points;
  mo.point_refinement = c.mesh.point_refinement;
  auto mesh = std::make_shared<Mesh>(generate_mesh(c.domain, TubeRegion{c.curve, eps, c.trim_exponent}, mo));
  auto space = std::make_shared<FunctionSpace>(mesh, c.mesh.order);
  return {mesh, space};
}

void write_file(const fs::path& path, const std::function<void(std::ostream&)>& body) {
  fs::create_directories(path.parent_path());
  std::ofstream os(path);
  if (!os) throw Error("cannot write " + path.string());
  body(os);
  std::cout << "wrote " << path.string() << '\n';
}

int cmd_mesh_export(const Options& o, double eps_arg) {
  std::string out;
  const StudyConfig c = load(o, out);
  validate_config(c);
  const double eps = eps_arg > 0.0 ? eps_arg : c.eps.front();
  const CaseMesh m = case_mesh(c, eps);
  std::cout << "eps " << eps << ": " << m.mesh->nodes.size() << " nodes, " << m.mesh->triangles.size()
            << " triangles, inclusion area " << num(m.mesh->tagged_area(kInclusion)) << " (exact "
            << num(TubeRegion{c.curve, eps, c.trim_exponent}.exact_area()) << "), min angle "
            << num(m.mesh->min_angle_degrees(), "%.2f") << " deg\n";
  write_file(fs::path(out) / "mesh.txt", [&](std::ostream& os) { write_mesh(*m.mesh, os); });
  return 0;
}

int cmd_solve(const Options& o, double eps_arg) {
  std::string out;
  const StudyConfig c = load(o, out);
  validate_config(c);
  const double eps = eps_arg > 0.0 ? eps_arg : c.eps.front();
  const CaseMesh m = case_mesh(c, eps);
  const Eigen::VectorXd load = assemble_traction(*m.space, c.traction.traction());
  const FemField u_eps = NeumannSolver(m.space, Phases{c.c0, c.c1}).solve(load);
  const FemField u0 = NeumannSolver(m.space, Phases{c.c0, c.c0}).solve(load);
  const NormPair norms = energy_norms(u_eps, u0);
  std::cout << "eps " << eps << ": " << m.space->dof_count() << " dofs\n";
  std::cout << "normalisation residuals of u_eps: " << num(htilde_residuals(u_eps).norm(), "%.3e") << '\n';
  std::cout << "|u_eps - U|: L2 " << num(norms.l2) << ", H1 " << num(norms.h1) << '\n';
  for (std::size_t k = 0; k < c.points.size(); ++k) {
    const Vec2 d = (u_eps - u0).nodal(boundary_node(*m.space, c.points[k]));
    std::cout << "(u_eps - U)(y" << k << ") = (" << num(d.x()) << ", " << num(d.y()) << ")\n";
  }
  write_file(fs::path(out) / "mesh.txt", [&](std::ostream& os) { write_mesh(*m.mesh, os); });
  write_file(fs::path(out) / "u_eps.csv", [&](std::ostream& os) { write_field_csv(u_eps, os); });
  write_file(fs::path(out) / "u0.csv", [&](std::ostream& os) { write_field_csv(u0, os); });
  return 0;
}

int cmd_neumann(const Options& o, double eps_arg, int point) {
  std::string out;
  const StudyConfig c = load(o, out);
  validate_config(c);
  if (point < 0 || point >= static_cast<int>(c.points.size())) throw ConfigError("--point is out of range");
  const double eps = eps_arg > 0.0 ? eps_arg : c.eps.front();
  const Vec2 y = c.points[point];

  // Neumann columns on the study mesh and on a mesh refined by two, compared
  // at five curve points.
  std::array<std::array<std::vector<SymMat2>, 2>, 2> grads;
  std::vector<Vec2> samples;
  for (int i = 1; i <= 5; ++i) samples.push_back(c.curve.point(c.curve.length() * i / 6.0));
  for (int level = 0; level < 2; ++level) {
    const CaseMesh m = case_mesh(c, eps, level == 0 ? 1.0 : 0.5);
    const NeumannSolver solver(m.space, Phases{c.c0, c.c0});
    const int node = boundary_node(*m.space, y);
    for (int k = 0; k < 2; ++k) {
      const Eigen::VectorXd f = neumann_load(*m.space, node, k);
      const FemField n = solver.solve(f);
      grads[level][k] = evaluate_gradient(n, samples);
      if (level == 0) {
        std::cout << "column " << k << ": rigid-motion residual of load " << num(compatibility_residual(*m.space, f), "%.2e")
                  << ", normalisation residual " << num(htilde_residuals(n).norm(), "%.2e") << '\n';
        write_file(fs::path(out) / ("neumann_y" + std::to_string(point) + "_k" + std::to_string(k) + ".csv"),
                   [&](std::ostream& os) { write_field_csv(n, os); });
      }
    }
  }
  double worst = 0.0;
  for (int k = 0; k < 2; ++k) {
    double scale = 1e-300;
    for (const auto& g : grads[1][k]) scale = std::max(scale, g.norm());
    for (std::size_t i = 0; i < samples.size(); ++i) {
      worst = std::max(worst, (grads[0][k][i] - grads[1][k][i]).norm() / scale);
    }
  }
  std::cout << "largest change of grad N on the curve under refinement, relative to its maximum: " << num(worst, "%.3e") << '\n';
  return 0;
}

int cmd_convergence(const Options& o) {
  std::string out;
  const StudyConfig c = load(o, out);
  const ConvergenceReport r = convergence_study(c, o.jobs);
  const auto csv = write_convergence_csv(r, out);
  const auto summary = write_summary_json(r, out);
  for (const auto& p : csv) std::cout << "wrote " << p.string() << '\n';
  std::cout << "wrote " << summary.string() << '\n';
  std::cout << "eps          nodes    h1_diff      l2_diff\n";
  for (const auto& row : r.rows) {
    std::cout << num(row.eps, "%-12.5g") << ' ' << num(row.nodes, "%-8.0f") << ' ' << num(row.h1_diff, "%-12.5g") << ' '
              << num(row.l2_diff, "%-12.5g") << '\n';
  }
  if (r.degenerate) std::cout << "degenerate: all residuals zero\n";
  for (const auto& v : r.verdicts) std::cout << (v.passed ? "PASS " : "FAIL ") << v.name << ": " << v.detail << '\n';
  return r.passed() ? 0 : kExitThreshold;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Thin-inclusion elasticity toolkit"};
  app.require_subcommand(1);
  Options o;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "Study configuration (JSON)");
    sub->add_option("--out", o.out, "Output directory");
    sub->add_option("--jobs", o.jobs, "Parallel epsilon cases")->check(CLI::PositiveNumber);
    sub->add_option("--seed", o.seed, "Seed for randomised checks");
    sub->add_option("--quad-order", o.quad_order, "Starting Gauss order per panel")->check(CLI::PositiveNumber);
  };

  std::string tensor;
  auto* check = app.add_subcommand("check-tensor", "Inspect an elasticity tensor");
  check->add_option("tensor", tensor, "Tensor JSON or file")->required();
  add_common(check);

  std::string c0, c1, normal = "0,1";
  auto* emt = app.add_subcommand("emt", "Moment tensor of a phase pair across a strip with normal n");
  emt->add_option("--c0", c0, "Background tensor JSON or file")->required();
  emt->add_option("--c1", c1, "Inclusion tensor JSON or file")->required();
  emt->add_option("--normal", normal, "Unit normal \"x,y\"");
  add_common(emt);

  double eps = 0.0;
  int point = 0;
  auto* solve = app.add_subcommand("solve", "Perturbed and unperturbed solves at one eps");
  solve->add_option("--eps", eps, "Half width (default: first eps of the config)");
  add_common(solve);

  auto* neumann = app.add_subcommand("neumann", "Neumann function at a boundary point with a refinement check");
  neumann->add_option("--eps", eps, "Half width used for the mesh (default: first eps)");
  neumann->add_option("--point", point, "Index into the config points");
  add_common(neumann);

  auto* conv = app.add_subcommand("convergence", "Epsilon-convergence study");
  add_common(conv);

  auto* mesh = app.add_subcommand("mesh-export", "Write the study mesh at one eps");
  mesh->add_option("--eps", eps, "Half width (default: first eps)");
  add_common(mesh);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (check->parsed()) return cmd_check_tensor(tensor);
    if (emt->parsed()) return cmd_emt(c0, c1, normal, o.seed);
    if (solve->parsed()) return cmd_solve(o, eps);
    if (neumann->parsed()) return cmd_neumann(o, eps, point);
    if (conv->parsed()) return cmd_convergence(o);
    if (mesh->parsed()) return cmd_mesh_export(o, eps);
  } catch (const SymmetryError& e) {
    std::cerr << "symmetry error: " << e.what() << '\n';
    return kExitTensor;
  } catch (const ConvexityError& e) {
    std::cerr << "convexity error: " << e.what() << '\n';
    return kExitTensor;
  } catch (const SingularTensorError& e) {
    std::cerr << "singular tensor: " << e.what() << '\n';
    return kExitTensor;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const GeometryError& e) {
    std::cerr << "geometry violation: " << e.what() << '\n';
    return kExitConfig;
  } catch (const InvalidArgument& e) {
    std::cerr << "invalid argument: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  }
  return kExitConfig;
}
