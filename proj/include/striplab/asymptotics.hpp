#pragma once

// First-order boundary corrections for thin inclusions, a numerical moment
// tensor from cell problems, and the epsilon-convergence study.

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "striplab/emt.hpp"
#include "striplab/fem.hpp"
#include "striplab/geometry.hpp"

namespace striplab {

using MomentField = std::function<Tensor4(const CurveNode&)>;
using StrainField = std::function<SymMat2(const Vec2&)>;
/// Symmetric gradients of the two Neumann columns at a point.
using NeumannStrains = std::function<std::array<SymMat2, 2>(const Vec2&)>;

struct QuadratureOptions {
  int order = 4;        // starting Gauss order per panel
  int panels = 16;
  double tol = 1e-3;    // relative change allowed when doubling the order
  int max_order = 64;
};

struct Correction {
  Vec2 value = Vec2::Zero();
  int order = 0;               // Gauss order of the returned value
  double relative_change = 0;  // against the half-order result
  bool converged = false;
};

/// 2 eps int_{curve} (M grad^U) : grad^N_k ds for k = 1, 2, by composite
/// Gauss quadrature over the whole curve, doubling the order until the
/// relative change is below `tol` (or `max_order` is reached, which clears
/// `converged`).
Correction first_order_correction(const Curve& curve, const MomentField& moment, const StrainField& grad_u,
                                  const NeumannStrains& grad_n, double eps, const QuadratureOptions& options = {});

/// Weighted point family (x_k, w_k, M_k).
struct MeasurePoints {
  enum class Normalization { Probability, Arclength };

  struct Entry {
    Vec2 point;
    double weight = 0.0;
    Tensor4 moment;
  };
  std::vector<Entry> entries;
  Normalization normalization = Normalization::Probability;

  double total_weight() const;
};

/// |omega| sum_k w_k (M_k grad^U(x_k)) : grad^N(x_k). Throws InvalidArgument
/// unless the measure is probability-normalised (total weight 1 to 1e-12)
/// with positive weights.
Vec2 general_correction(const MeasurePoints& measure, double volume, const StrainField& grad_u,
                        const NeumannStrains& grad_n);

/// Gauss nodes of the curve as a measure: weights w_q / L (Probability) or
/// w_q (Arclength), moments from `moment`.
MeasurePoints tube_measure(const Curve& curve, const MomentField& moment, int order, int panels,
                           MeasurePoints::Normalization normalization = MeasurePoints::Normalization::Probability);

/// Moment field of a constant phase pair along a curve.
MomentField constant_phase_moment(const Tensor4& c0, const Tensor4& c1, Convention convention);

struct CellMoment {
  Eigen::Matrix3d raw;      // Mandel columns for E^{11}, E^{22}, E^{12}
  Tensor4 tensor;           // symmetric part
  double asymmetry = 0.0;   // |raw - raw^T| / |raw|
  double averaged_area = 0.0;
};

/// Averages (C1 - C0) grad^ v^{ij} over the inclusion cells whose centroid
/// lies at arclength in [eps^beta, L - eps^beta], for the three cell
/// problems solved with `solver` (phases C0 outside, C1 inside).
CellMoment cell_average_moment(const NeumannSolver& solver, const TubeRegion& tube);

struct SlopeFit {
  bool defined = false;
  double slope = 0.0;
  double std_error = 0.0;
  double fit_residual = 0.0;  // rms of log residuals
  int points = 0;
};

/// Least-squares slope of log y against log x. Undefined for fewer than two
/// points or any non-positive value.
SlopeFit fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

// ---------------------------------------------------------------------------
// Convergence study

struct MeshSettings {
  double h = 0.08;
  double tube_size_factor = 0.5;  // tube element size = factor * eps
  double grading = 0.25;
  double point_refinement = 4.0;
  int order = 2;
};

struct Thresholds {
  double residual_slope_min = 1.2;
  int residual_fit_points = 4;
  double h1_slope_min = 0.4;
  double h1_slope_max = 0.6;
  double l2_slope_min = 0.8;
  double representation_tol = 0.02;
  bool check_residual = true;
  bool check_sign = true;
  bool check_energy = true;
  bool check_representation = true;
  bool check_quadrature = true;
};

/// Boundary traction of a study: psi = S(x) nu with
/// S(x) = S0 + x1 S1 + x2 S2.
struct TractionSpec {
  SymMat2 s0, s1, s2;

  Traction traction() const;
  bool constant() const;
};

struct StudyConfig {
  std::string name = "study";
  Domain domain = Domain::disk({0.0, 0.0}, 1.0);
  Curve curve = Curve::segment({-0.3, 0.0}, {0.3, 0.0});
  Tensor4 c0;
  Tensor4 c1;
  TractionSpec traction;
  std::vector<Vec2> points;
  std::vector<double> eps;  // strictly decreasing
  MeshSettings mesh;
  QuadratureOptions quadrature;
  double trim_exponent = 0.45;
  double geometry_k = 10.0;
  /// Convention whose moment tensor the thresholds are asserted for.
  Convention convention = Convention::Expansion;
  Thresholds thresholds;
  std::uint64_t seed = 1;
};

/// Throws ConfigError, GeometryError or ConvexityError for an invalid study.
void validate_config(const StudyConfig& config);

struct PointResult {
  Vec2 lhs = Vec2::Zero();
  Vec2 rhs_exp = Vec2::Zero();  // Expansion tensor T
  Vec2 rhs_neg = Vec2::Zero();  // -T
  double resid_exp = 0.0;
  double resid_neg = 0.0;
  /// int_{omega} (C1 - C0) grad^u_eps : grad^N_k, k = 1, 2.
  Vec2 volume_form = Vec2::Zero();
  Correction quadrature;
};

struct EpsilonRow {
  double eps = 0.0;
  double area = 0.0;         // exact tube area
  double tagged_area = 0.0;  // area of inclusion cells
  int nodes = 0;
  int dofs = 0;
  double l2_diff = 0.0;
  double h1_diff = 0.0;
  std::vector<PointResult> points;
};

struct Verdict {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ConvergenceReport {
  StudyConfig config;
  std::vector<EpsilonRow> rows;  // eps strictly decreasing
  std::vector<SlopeFit> resid_exp_slopes;  // per point, smallest eps
  std::vector<SlopeFit> resid_neg_slopes;
  SlopeFit h1_slope;
  SlopeFit l2_slope;
  bool degenerate = false;  // every lhs and correction vanishes
  std::vector<Verdict> verdicts;

  bool passed() const;
};

/// One epsilon case: mesh, perturbed and unperturbed solves, Neumann fields
/// and corrections at every point.
EpsilonRow run_epsilon_case(const StudyConfig& config, double eps);

/// Runs every epsilon (up to `jobs` at a time), fits slopes and evaluates
/// the thresholds. Rows are assembled in epsilon order regardless of jobs.
ConvergenceReport convergence_study(const StudyConfig& config, int jobs = 1);

/// Fits and verdicts from finished rows.
void finalize_report(ConvergenceReport& report);

/// One CSV per point, convergence_y{k}.csv with columns
/// eps,area,lhs_x,lhs_y,rhs_exp_x,rhs_exp_y,rhs_neg_x,rhs_neg_y,resid_exp,resid_neg,l2_diff,h1_diff
/// Returns the written paths.
std::vector<std::filesystem::path> write_convergence_csv(const ConvergenceReport& report,
                                                         const std::filesystem::path& dir);
void write_csv_rows(const ConvergenceReport& report, std::size_t point, std::ostream& os);

/// summary.json: slopes, diagnostics and verdicts.
std::filesystem::path write_summary_json(const ConvergenceReport& report, const std::filesystem::path& dir);

}  // namespace striplab
