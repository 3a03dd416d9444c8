#include "striplab/fem.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <ostream>

#include "striplab/errors.hpp"
#include "striplab/geometry.hpp"

namespace striplab {

namespace {

struct QuadPoint {
  Eigen::Vector3d bary;
  double weight;  // fraction of the triangle area
};

// Centroid rule, degree 1.
const std::vector<QuadPoint>& rule_degree1() {
  static const std::vector<QuadPoint> r{{Eigen::Vector3d(1.0 / 3, 1.0 / 3, 1.0 / 3), 1.0}};
  return r;
}

// Interior three-point rule, degree 2.
const std::vector<QuadPoint>& rule_degree2() {
  static const std::vector<QuadPoint> r{{Eigen::Vector3d(2.0 / 3, 1.0 / 6, 1.0 / 6), 1.0 / 3},
                                        {Eigen::Vector3d(1.0 / 6, 2.0 / 3, 1.0 / 6), 1.0 / 3},
                                        {Eigen::Vector3d(1.0 / 6, 1.0 / 6, 2.0 / 3), 1.0 / 3}};
  return r;
}

// Seven-point rule, degree 5.
const std::vector<QuadPoint>& rule_degree5() {
  static const std::vector<QuadPoint> r = [] {
    const double s15 = std::sqrt(15.0);
    const double a = (6.0 - s15) / 21.0, b = (6.0 + s15) / 21.0;
    const double wa = (155.0 - s15) / 1200.0, wb = (155.0 + s15) / 1200.0;
    std::vector<QuadPoint> q{{Eigen::Vector3d(1.0 / 3, 1.0 / 3, 1.0 / 3), 9.0 / 40.0}};
    for (int i = 0; i < 3; ++i) {
      Eigen::Vector3d pa = Eigen::Vector3d::Constant(a), pb = Eigen::Vector3d::Constant(b);
      pa[i] = 1.0 - 2.0 * a;
      pb[i] = 1.0 - 2.0 * b;
      q.push_back({pa, wa});
      q.push_back({pb, wb});
    }
    return q;
  }();
  return r;
}

// Edge shape functions on s in [0, 1] for endpoints a, b and midpoint.
std::array<double, 3> edge_shape(int order, double s) {
  if (order == 1) return {1.0 - s, s, 0.0};
  return {(1.0 - s) * (1.0 - 2.0 * s), s * (2.0 * s - 1.0), 4.0 * s * (1.0 - s)};
}

// Strain-displacement matrix in Mandel form.
Eigen::Matrix<double, 3, 12> b_matrix(const Eigen::Matrix<double, 6, 2>& dn, int nl) {
  Eigen::Matrix<double, 3, 12> b = Eigen::Matrix<double, 3, 12>::Zero();
  for (int a = 0; a < nl; ++a) {
    const double gx = dn(a, 0), gy = dn(a, 1);
    b(0, 2 * a) = gx;
    b(2, 2 * a) = gy / kSqrt2;
    b(1, 2 * a + 1) = gy;
    b(2, 2 * a + 1) = gx / kSqrt2;
  }
  return b;
}

Mat2 cell_gradient(const FunctionSpace& space, const Eigen::VectorXd& values, int t, const Eigen::Vector3d& bary) {
  const auto dn = space.shape_gradients(t, bary);
  const auto& c = space.cell(t);
  Mat2 g = Mat2::Zero();
  for (int a = 0; a < space.local_count(); ++a) {
    g.row(0) += values[2 * c[a]] * dn.row(a);
    g.row(1) += values[2 * c[a] + 1] * dn.row(a);
  }
  return g;
}

Vec2 cell_value(const FunctionSpace& space, const Eigen::VectorXd& values, int t, const Eigen::Vector3d& bary) {
  const auto n = space.shape(bary);
  const auto& c = space.cell(t);
  Vec2 v = Vec2::Zero();
  for (int a = 0; a < space.local_count(); ++a) {
    v.x() += values[2 * c[a]] * n[a];
    v.y() += values[2 * c[a] + 1] * n[a];
  }
  return v;
}

Vec2 cell_point(const FunctionSpace& space, int t, const Eigen::Vector3d& bary) {
  const auto& c = space.cell(t);
  const auto& x = space.nodes();
  return bary[0] * x[c[0]] + bary[1] * x[c[1]] + bary[2] * x[c[2]];
}

// ell_j(R_m) for the three rigid motions.
Eigen::Matrix3d rigid_gram(const FunctionSpace& space) {
  return Eigen::Matrix3d(space.normalization_rows() * space.rigid_motions());
}

}  // namespace

// ---------------------------------------------------------------------------
// FunctionSpace

FunctionSpace::FunctionSpace(std::shared_ptr<const Mesh> mesh, int order) : mesh_(std::move(mesh)), order_(order) {
  if (!mesh_) throw InvalidArgument("function space needs a mesh");
  if (order_ != 1 && order_ != 2) throw InvalidArgument("element order must be 1 or 2");
  if (mesh_->triangles.empty()) throw MeshError("mesh has no triangles");

  nodes_ = mesh_->nodes;
  std::map<std::pair<int, int>, int> mids;
  auto midpoint = [&](int a, int b) {
    const auto key = std::minmax(a, b);
    auto [it, inserted] = mids.try_emplace({key.first, key.second}, static_cast<int>(nodes_.size()));
    if (inserted) nodes_.push_back(0.5 * (mesh_->nodes[a] + mesh_->nodes[b]));
    return it->second;
  };

  cells_.reserve(mesh_->triangles.size());
  bary_gradients_.reserve(mesh_->triangles.size());
  for (const auto& tri : mesh_->triangles) {
    std::array<int, 6> c{tri[0], tri[1], tri[2], -1, -1, -1};
    if (order_ == 2) {
      c[3] = midpoint(tri[0], tri[1]);
      c[4] = midpoint(tri[1], tri[2]);
      c[5] = midpoint(tri[2], tri[0]);
    }
    cells_.push_back(c);
    const Vec2& p0 = mesh_->nodes[tri[0]];
    const Vec2& p1 = mesh_->nodes[tri[1]];
    const Vec2& p2 = mesh_->nodes[tri[2]];
    const double det = (p1 - p0).x() * (p2 - p0).y() - (p1 - p0).y() * (p2 - p0).x();
    if (!(det > 0.0)) throw MeshError("triangle with non-positive area");
    Eigen::Matrix<double, 3, 2> g;
    g << p1.y() - p2.y(), p2.x() - p1.x(), p2.y() - p0.y(), p0.x() - p2.x(), p0.y() - p1.y(), p1.x() - p0.x();
    bary_gradients_.push_back(g / det);
  }

  std::vector<Eigen::Triplet<double>> trips;
  for (const auto& e : mesh_->boundary_edges) {
    BoundarySegment s;
    s.a = e.a;
    s.b = e.b;
    s.normal = e.normal;
    s.length = (mesh_->nodes[e.b] - mesh_->nodes[e.a]).norm();
    if (order_ == 2) {
      const auto it = mids.find({std::min(e.a, e.b), std::max(e.a, e.b)});
      if (it == mids.end()) throw MeshError("boundary edge is not a triangle edge");
      s.mid = it->second;
    }
    boundary_.push_back(s);

    const Vec2 t = (mesh_->nodes[e.b] - mesh_->nodes[e.a]) / s.length;
    std::vector<std::pair<int, double>> w;
    if (order_ == 1) {
      w = {{s.a, s.length / 2}, {s.b, s.length / 2}};
    } else {
      w = {{s.a, s.length / 6}, {s.b, s.length / 6}, {s.mid, 2 * s.length / 3}};
    }
    for (const auto& [node, weight] : w) {
      trips.emplace_back(0, 2 * node, weight);
      trips.emplace_back(1, 2 * node + 1, weight);
      trips.emplace_back(2, 2 * node, weight * t.x());
      trips.emplace_back(2, 2 * node + 1, weight * t.y());
    }
  }
  if (boundary_.empty()) throw MeshError("mesh has no boundary edges");
  rows_.resize(3, dof_count());
  rows_.setFromTriplets(trips.begin(), trips.end());

  // Point-location buckets.
  Vec2 lo = nodes_.front(), hi = nodes_.front();
  for (const auto& p : nodes_) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const Vec2 span = (hi - lo).cwiseMax(1e-300);
  grid_cell_ = std::sqrt(span.x() * span.y() / static_cast<double>(cells_.size())) * 1.5;
  grid_nx_ = std::clamp(static_cast<int>(std::ceil(span.x() / grid_cell_)), 1, 4096);
  grid_ny_ = std::clamp(static_cast<int>(std::ceil(span.y() / grid_cell_)), 1, 4096);
  grid_cell_ = std::max(span.x() / grid_nx_, span.y() / grid_ny_);
  grid_lo_ = lo;
  buckets_.assign(static_cast<std::size_t>(grid_nx_) * grid_ny_, {});
  const double pad = 1e-9 * grid_cell_;
  for (int t = 0; t < cell_count(); ++t) {
    Vec2 a = nodes_[cells_[t][0]], b = a;
    for (int k = 1; k < 3; ++k) {
      a = a.cwiseMin(nodes_[cells_[t][k]]);
      b = b.cwiseMax(nodes_[cells_[t][k]]);
    }
    const int i0 = std::clamp(static_cast<int>((a.x() - pad - lo.x()) / grid_cell_), 0, grid_nx_ - 1);
    const int i1 = std::clamp(static_cast<int>((b.x() + pad - lo.x()) / grid_cell_), 0, grid_nx_ - 1);
    const int j0 = std::clamp(static_cast<int>((a.y() - pad - lo.y()) / grid_cell_), 0, grid_ny_ - 1);
    const int j1 = std::clamp(static_cast<int>((b.y() + pad - lo.y()) / grid_cell_), 0, grid_ny_ - 1);
    for (int j = j0; j <= j1; ++j) {
      for (int i = i0; i <= i1; ++i) buckets_[static_cast<std::size_t>(j) * grid_nx_ + i].push_back(t);
    }
  }
}

std::vector<FunctionSpace::Location> FunctionSpace::locate(const Vec2& p) const {
  std::vector<Location> out;
  const double fx = (p.x() - grid_lo_.x()) / grid_cell_;
  const double fy = (p.y() - grid_lo_.y()) / grid_cell_;
  if (!std::isfinite(fx) || !std::isfinite(fy)) return out;
  const int i = static_cast<int>(std::floor(fx)), j = static_cast<int>(std::floor(fy));
  // Points on the far edge of the grid belong to the last bucket.
  const int ic = std::clamp(i, 0, grid_nx_ - 1), jc = std::clamp(j, 0, grid_ny_ - 1);
  if (i < -1 || j < -1 || i > grid_nx_ || j > grid_ny_) return out;
  for (int t : buckets_[static_cast<std::size_t>(jc) * grid_nx_ + ic]) {
    const auto& g = bary_gradients_[t];
    const auto& c = cells_[t];
    Eigen::Vector3d l;
    for (int k = 0; k < 3; ++k) l[k] = g.row(k).dot(p - nodes_[c[(k + 1) % 3]]);
    if (l.minCoeff() >= -1e-10) {
      // Clip roundoff so interpolation stays inside the cell.
      l = l.cwiseMax(0.0);
      out.push_back({t, l / l.sum()});
    }
  }
  return out;
}

Eigen::Matrix<double, 6, 1> FunctionSpace::shape(const Eigen::Vector3d& l) const {
  Eigen::Matrix<double, 6, 1> n = Eigen::Matrix<double, 6, 1>::Zero();
  if (order_ == 1) {
    n.head<3>() = l;
  } else {
    for (int i = 0; i < 3; ++i) n[i] = l[i] * (2.0 * l[i] - 1.0);
    n[3] = 4.0 * l[0] * l[1];
    n[4] = 4.0 * l[1] * l[2];
    n[5] = 4.0 * l[2] * l[0];
  }
  return n;
}

Eigen::Matrix<double, 6, 2> FunctionSpace::shape_gradients(int t, const Eigen::Vector3d& l) const {
  const auto& g = bary_gradients_[t];
  Eigen::Matrix<double, 6, 2> d = Eigen::Matrix<double, 6, 2>::Zero();
  if (order_ == 1) {
    d.topRows<3>() = g;
  } else {
    for (int i = 0; i < 3; ++i) d.row(i) = (4.0 * l[i] - 1.0) * g.row(i);
    d.row(3) = 4.0 * (l[0] * g.row(1) + l[1] * g.row(0));
    d.row(4) = 4.0 * (l[1] * g.row(2) + l[2] * g.row(1));
    d.row(5) = 4.0 * (l[2] * g.row(0) + l[0] * g.row(2));
  }
  return d;
}

Eigen::MatrixXd FunctionSpace::rigid_motions() const {
  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(dof_count(), 3);
  for (int i = 0; i < node_count(); ++i) {
    r(2 * i, 0) = 1.0;
    r(2 * i + 1, 1) = 1.0;
    r(2 * i, 2) = -nodes_[i].y();
    r(2 * i + 1, 2) = nodes_[i].x();
  }
  return r;
}

// ---------------------------------------------------------------------------
// FemField

FemField::FemField(std::shared_ptr<const FunctionSpace> space, Eigen::VectorXd values)
    : space_(std::move(space)), values_(std::move(values)) {
  if (!space_) throw InvalidArgument("field needs a function space");
  if (values_.size() != space_->dof_count()) throw InvalidArgument("field size does not match the space");
}

Vec2 FemField::value(const Vec2& p) const {
  const auto loc = space_->locate(p);
  if (loc.empty()) throw InvalidArgument("evaluation point outside the mesh");
  return cell_value(*space_, values_, loc.front().cell, loc.front().bary);
}

Mat2 FemField::gradient(const Vec2& p) const {
  const auto loc = space_->locate(p);
  if (loc.empty()) throw InvalidArgument("evaluation point outside the mesh");
  Mat2 g = Mat2::Zero();
  for (const auto& l : loc) g += cell_gradient(*space_, values_, l.cell, l.bary);
  return g / static_cast<double>(loc.size());
}

FemField FemField::operator-(const FemField& o) const {
  if (o.space_ != space_) throw InvalidArgument("fields live in different spaces");
  return FemField(space_, values_ - o.values_);
}

FemField FemField::operator+(const FemField& o) const {
  if (o.space_ != space_) throw InvalidArgument("fields live in different spaces");
  return FemField(space_, values_ + o.values_);
}

// ---------------------------------------------------------------------------
// Loads

Traction Traction::constant_stress(const SymMat2& stress) {
  return Traction{[stress](const Vec2&, const Vec2& normal) { return stress.apply(normal); }};
}

Eigen::VectorXd assemble_traction(const FunctionSpace& space, const Traction& traction) {
  if (!traction.density) throw InvalidArgument("empty traction");
  static const GaussRule rule = gauss_legendre(4);
  Eigen::VectorXd f = Eigen::VectorXd::Zero(space.dof_count());
  const auto& x = space.nodes();
  for (const auto& seg : space.boundary()) {
    const int ids[3] = {seg.a, seg.b, seg.mid};
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
      const double s = 0.5 * (rule.nodes[q] + 1.0);
      const double w = 0.5 * rule.weights[q] * seg.length;
      const Vec2 p = (1.0 - s) * x[seg.a] + s * x[seg.b];
      const Vec2 psi = traction.density(p, seg.normal);
      const auto n = edge_shape(space.order(), s);
      for (int k = 0; k < (space.order() == 1 ? 2 : 3); ++k) {
        f[2 * ids[k]] += w * n[k] * psi.x();
        f[2 * ids[k] + 1] += w * n[k] * psi.y();
      }
    }
  }
  return f;
}

Eigen::VectorXd assemble_body_load(const FunctionSpace& space, const BodyLoad& load) {
  if (!load) throw InvalidArgument("empty body load");
  Eigen::VectorXd f = Eigen::VectorXd::Zero(space.dof_count());
  for (int t = 0; t < space.cell_count(); ++t) {
    const double area = space.mesh().triangle_area(t);
    const auto& c = space.cell(t);
    for (const auto& q : rule_degree5()) {
      const Vec2 v = load(cell_point(space, t, q.bary));
      const auto n = space.shape(q.bary);
      for (int a = 0; a < space.local_count(); ++a) {
        f[2 * c[a]] += q.weight * area * n[a] * v.x();
        f[2 * c[a] + 1] += q.weight * area * n[a] * v.y();
      }
    }
  }
  return f;
}

double compatibility_residual(const FunctionSpace& space, const Eigen::VectorXd& load) {
  if (load.size() != space.dof_count()) throw InvalidArgument("load size does not match the space");
  const Eigen::MatrixXd r = space.rigid_motions();
  double worst = 0.0;
  for (int j = 0; j < 3; ++j) {
    const double scale = load.cwiseProduct(r.col(j)).cwiseAbs().sum();
    if (scale > 0.0) worst = std::max(worst, std::abs(load.dot(r.col(j))) / scale);
  }
  return worst;
}

// ---------------------------------------------------------------------------
// NeumannSolver

NeumannSolver::NeumannSolver(std::shared_ptr<const FunctionSpace> space, const Phases& phases)
    : space_(std::move(space)), phases_(phases) {
  if (!space_) throw InvalidArgument("solver needs a function space");
  for (const Tensor4* c : {&phases_.background, &phases_.inclusion}) {
    if (!(convexity_margin(*c) > 0.0)) throw ConvexityError("phase tensor is not strongly convex");
  }
  const FunctionSpace& sp = *space_;
  const int n = sp.dof_count();
  const int nl = sp.local_count();
  const auto& rule = sp.order() == 1 ? rule_degree1() : rule_degree2();

  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(sp.cell_count()) * 4 * nl * nl);
  for (int t = 0; t < sp.cell_count(); ++t) {
    const double area = sp.mesh().triangle_area(t);
    const Eigen::Matrix3d& c = phases_[sp.mesh().tags[t]].mandel();
    Eigen::Matrix<double, 12, 12> ke = Eigen::Matrix<double, 12, 12>::Zero();
    for (const auto& q : rule) {
      const auto b = b_matrix(sp.shape_gradients(t, q.bary), nl);
      ke.noalias() += (q.weight * area) * b.transpose() * c * b;
    }
    const auto& cell = sp.cell(t);
    for (int a = 0; a < 2 * nl; ++a) {
      for (int b = 0; b < 2 * nl; ++b) {
        trips.emplace_back(2 * cell[a / 2] + a % 2, 2 * cell[b / 2] + b % 2, ke(a, b));
      }
    }
  }
  stiffness_.resize(n, n);
  stiffness_.setFromTriplets(trips.begin(), trips.end());

  // Scale the constraint rows to the stiffness magnitude.
  const double kscale = stiffness_.diagonal().cwiseAbs().maxCoeff();
  const auto& rows = sp.normalization_rows();
  double lscale = 0.0;
  for (int k = 0; k < rows.outerSize(); ++k) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(rows, k); it; ++it) lscale = std::max(lscale, std::abs(it.value()));
  }
  const double alpha = kscale / lscale;
  for (int k = 0; k < rows.outerSize(); ++k) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(rows, k); it; ++it) {
      trips.emplace_back(n + static_cast<int>(it.row()), static_cast<int>(it.col()), alpha * it.value());
      trips.emplace_back(static_cast<int>(it.col()), n + static_cast<int>(it.row()), alpha * it.value());
    }
  }
  Eigen::SparseMatrix<double> saddle(n + 3, n + 3);
  saddle.setFromTriplets(trips.begin(), trips.end());
  saddle.makeCompressed();

  lu_ = std::make_unique<Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>>>();
  lu_->analyzePattern(saddle);
  lu_->factorize(saddle);
  if (lu_->info() != Eigen::Success) throw SolverError("factorisation of the constrained system failed: " + lu_->lastErrorMessage());
}

FemField NeumannSolver::solve(const Eigen::VectorXd& load, double compatibility_tol) const {
  const int n = space_->dof_count();
  if (load.size() != n) throw InvalidArgument("load size does not match the space");
  const double res = compatibility_residual(*space_, load);
  if (res > compatibility_tol) {
    throw IncompatibleLoadError("load is not orthogonal to rigid motions (relative residual " + std::to_string(res) + ")");
  }
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + 3);
  rhs.head(n) = load;
  const Eigen::VectorXd x = lu_->solve(rhs);
  if (lu_->info() != Eigen::Success || !x.allFinite()) throw SolverError("constrained solve failed");
  return FemField(space_, x.head(n));
}

FemField solve_neumann(std::shared_ptr<const FunctionSpace> space, const Phases& phases, const Traction& traction,
                       const std::optional<BodyLoad>& body) {
  NeumannSolver solver(space, phases);
  Eigen::VectorXd f = assemble_traction(*space, traction);
  if (body) f += assemble_body_load(*space, *body);
  return solver.solve(f);
}

FemField solve_cell(const NeumannSolver& solver, int i, int j) {
  if (i < 0 || i > 1 || j < 0 || j > 1) throw InvalidArgument("cell indices must be 0 or 1");
  const SymMat2 e = SymMat2::sym_outer(Vec2::Unit(i), Vec2::Unit(j));
  const SymMat2 stress = contract(solver.phases().background, e);
  return solver.solve(assemble_traction(solver.space(), Traction::constant_stress(stress)));
}

Eigen::VectorXd neumann_load(const FunctionSpace& space, int y_node, int k) {
  if (k < 0 || k > 1) throw InvalidArgument("Neumann column must be 0 or 1");
  if (y_node < 0 || y_node >= space.node_count()) throw InvalidArgument("node index out of range");
  double perimeter = 0.0;
  for (const auto& s : space.boundary()) perimeter += s.length;
  const auto& rows = space.normalization_rows();
  Eigen::VectorXd f = -Eigen::VectorXd(rows.row(k).transpose()) / perimeter;
  f[2 * y_node + k] += 1.0;
  // Remove the remaining rigid pairing (the torque of the point force about
  // the origin) with a combination of the functionals' Riesz vectors.
  const Eigen::MatrixXd r = space.rigid_motions();
  const Eigen::Matrix3d gram = rigid_gram(space);
  const Eigen::Vector3d c = gram.transpose().partialPivLu().solve(r.transpose() * f);
  f -= rows.transpose() * c;
  return f;
}

int boundary_node(const FunctionSpace& space, const Vec2& y) {
  const double tol = 1e-9 * std::max(1.0, y.norm());
  for (const auto& s : space.boundary()) {
    if ((space.nodes()[s.a] - y).norm() <= tol) return s.a;
  }
  throw InvalidArgument("point is not a boundary node of the mesh");
}

FemField neumann_field(const NeumannSolver& solver, const Vec2& y, int k) {
  return solver.solve(neumann_load(solver.space(), boundary_node(solver.space(), y), k));
}

FemField neumann_field(std::shared_ptr<const FunctionSpace> space, const Tensor4& c0, const Vec2& y, int k) {
  const NeumannSolver solver(std::move(space), Phases{c0, c0});
  return neumann_field(solver, y, k);
}

// ---------------------------------------------------------------------------
// Post-processing

std::vector<SymMat2> evaluate_gradient(const FemField& field, const std::vector<Vec2>& points,
                                       GradientRecovery recovery) {
  const FunctionSpace& sp = field.space();
  std::vector<SymMat2> out;
  out.reserve(points.size());
  if (recovery == GradientRecovery::None) {
    for (const auto& p : points) out.push_back(field.strain(p));
    return out;
  }
  if (sp.order() != 1) throw InvalidArgument("patch recovery is available for order 1 only");
  std::vector<Mat2> nodal(sp.node_count(), Mat2::Zero());
  std::vector<double> weight(sp.node_count(), 0.0);
  const Eigen::Vector3d centroid = Eigen::Vector3d::Constant(1.0 / 3);
  for (int t = 0; t < sp.cell_count(); ++t) {
    const double area = sp.mesh().triangle_area(t);
    const Mat2 g = cell_gradient(sp, field.values(), t, centroid);
    for (int a = 0; a < 3; ++a) {
      nodal[sp.cell(t)[a]] += area * g;
      weight[sp.cell(t)[a]] += area;
    }
  }
  for (const auto& p : points) {
    const auto loc = sp.locate(p);
    if (loc.empty()) throw InvalidArgument("evaluation point outside the mesh");
    Mat2 g = Mat2::Zero();
    for (int a = 0; a < 3; ++a) {
      const int node = sp.cell(loc.front().cell)[a];
      g += loc.front().bary[a] * nodal[node] / weight[node];
    }
    out.push_back(SymMat2::symmetrize(g));
  }
  return out;
}

NormPair energy_norms(const FemField& a, const FemField& b) {
  if (a.space_ptr() != b.space_ptr()) throw InvalidArgument("fields live in different spaces");
  const FunctionSpace& sp = a.space();
  const Eigen::VectorXd d = a.values() - b.values();
  double l2 = 0.0, semi = 0.0;
  for (int t = 0; t < sp.cell_count(); ++t) {
    const double area = sp.mesh().triangle_area(t);
    for (const auto& q : rule_degree5()) {
      l2 += q.weight * area * cell_value(sp, d, t, q.bary).squaredNorm();
      semi += q.weight * area * cell_gradient(sp, d, t, q.bary).squaredNorm();
    }
  }
  return {std::sqrt(l2), std::sqrt(l2 + semi)};
}

double l2_distance(const FemField& field, const std::function<Vec2(const Vec2&)>& exact) {
  const FunctionSpace& sp = field.space();
  double sum = 0.0;
  for (int t = 0; t < sp.cell_count(); ++t) {
    const double area = sp.mesh().triangle_area(t);
    for (const auto& q : rule_degree5()) {
      const Vec2 diff = cell_value(sp, field.values(), t, q.bary) - exact(cell_point(sp, t, q.bary));
      sum += q.weight * area * diff.squaredNorm();
    }
  }
  return std::sqrt(sum);
}

RigidMotion htilde_offset(const FunctionSpace& space, const std::function<Vec2(const Vec2&)>& u) {
  static const GaussRule rule = gauss_legendre(4);
  Eigen::Vector3d ell = Eigen::Vector3d::Zero();
  const auto& x = space.nodes();
  for (const auto& seg : space.boundary()) {
    const Vec2 t = (x[seg.b] - x[seg.a]) / seg.length;
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
      const double s = 0.5 * (rule.nodes[q] + 1.0);
      const double w = 0.5 * rule.weights[q] * seg.length;
      const Vec2 v = u((1.0 - s) * x[seg.a] + s * x[seg.b]);
      ell += w * Eigen::Vector3d(v.x(), v.y(), v.dot(t));
    }
  }
  const Eigen::Vector3d c = rigid_gram(space).partialPivLu().solve(ell);
  return RigidMotion{c[2], Vec2(c[0], c[1])};
}

FemField project_to_htilde(const FemField& field) {
  const FunctionSpace& sp = field.space();
  const Eigen::Vector3d ell = sp.normalization_rows() * field.values();
  const Eigen::Vector3d c = rigid_gram(sp).partialPivLu().solve(ell);
  return FemField(field.space_ptr(), field.values() - sp.rigid_motions() * c);
}

Eigen::Vector3d htilde_residuals(const FemField& field) {
  const FunctionSpace& sp = field.space();
  const Eigen::Vector3d ell = sp.normalization_rows() * field.values();
  double skew = 0.0;
  for (int t = 0; t < sp.cell_count(); ++t) {
    const double area = sp.mesh().triangle_area(t);
    for (const auto& q : rule_degree2()) {
      const Mat2 g = cell_gradient(sp, field.values(), t, q.bary);
      skew += q.weight * area * (g(1, 0) - g(0, 1));
    }
  }
  return {ell[0], ell[1], skew};
}

double region_pairing(const FemField& u, const FemField& w, const Tensor4& c, int tag) {
  if (u.space_ptr() != w.space_ptr()) throw InvalidArgument("fields live in different spaces");
  const FunctionSpace& sp = u.space();
  double sum = 0.0;
  for (int t = 0; t < sp.cell_count(); ++t) {
    if (sp.mesh().tags[t] != tag) continue;
    const double area = sp.mesh().triangle_area(t);
    for (const auto& q : rule_degree2()) {
      const SymMat2 eu = SymMat2::symmetrize(cell_gradient(sp, u.values(), t, q.bary));
      const SymMat2 ew = SymMat2::symmetrize(cell_gradient(sp, w.values(), t, q.bary));
      sum += q.weight * area * double_contract(c, eu, ew);
    }
  }
  return sum;
}

void write_field_csv(const FemField& field, std::ostream& os) {
  const auto old = os.precision(17);
  os << "node,x,y,ux,uy\n";
  for (int i = 0; i < field.space().node_count(); ++i) {
    const Vec2& p = field.space().nodes()[i];
    const Vec2 v = field.nodal(i);
    os << i << ',' << p.x() << ',' << p.y() << ',' << v.x() << ',' << v.y() << '\n';
  }
  os.precision(old);
}

}  // namespace striplab
