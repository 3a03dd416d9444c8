#pragma once

// Plane-strain linear elasticity with P1/P2 Lagrange triangles for pure
// traction (Neumann) problems.
//
// Fields are normalised in the space H~: zero boundary mean and zero
// integrated skew gradient. The three functionals
//   l1(u) = int_{dOmega} u1,  l2(u) = int_{dOmega} u2,  l3(u) = int_{dOmega} u . t
// (t the counterclockwise tangent, so l3(u) = int_Omega (d1 u2 - d2 u1) by
// Green's theorem) are imposed as Lagrange-multiplier rows of the linear
// system, which removes the rigid-motion kernel of the stiffness matrix.

#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <vector>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "striplab/mesh.hpp"
#include "striplab/tensor_core.hpp"

namespace striplab {

/// Lagrange space of order 1 or 2 on a mesh (two displacement components
/// per node, interleaved: dof 2i is u1 at node i, 2i+1 is u2).
class FunctionSpace {
 public:
  FunctionSpace(std::shared_ptr<const Mesh> mesh, int order);

  const Mesh& mesh() const { return *mesh_; }
  int order() const { return order_; }
  int local_count() const { return order_ == 1 ? 3 : 6; }
  int node_count() const { return static_cast<int>(nodes_.size()); }
  int dof_count() const { return 2 * node_count(); }
  const std::vector<Vec2>& nodes() const { return nodes_; }

  /// Local node numbering: vertices 0,1,2 then midpoints of edges (0,1),
  /// (1,2), (2,0). Only the first three entries are used for order 1.
  const std::array<int, 6>& cell(int t) const { return cells_[t]; }
  int cell_count() const { return static_cast<int>(cells_.size()); }

  struct BoundarySegment {
    int a = 0, b = 0;
    int mid = -1;  // midpoint node for order 2
    Vec2 normal;
    double length = 0.0;
  };
  const std::vector<BoundarySegment>& boundary() const { return boundary_; }

  struct Location {
    int cell = 0;
    Eigen::Vector3d bary;
  };
  /// Every cell containing p (several when p sits on an edge or vertex), in
  /// increasing cell order. Empty when p is outside the mesh.
  std::vector<Location> locate(const Vec2& p) const;

  /// Shape function values at barycentric coordinates.
  Eigen::Matrix<double, 6, 1> shape(const Eigen::Vector3d& bary) const;
  /// Shape function gradients (rows) in cell t at barycentric coordinates.
  Eigen::Matrix<double, 6, 2> shape_gradients(int t, const Eigen::Vector3d& bary) const;

  /// Discrete rigid motions as dof vectors: columns e1, e2, (-x2, x1).
  Eigen::MatrixXd rigid_motions() const;
  /// The three normalisation functionals as rows (3 x dofs).
  const Eigen::SparseMatrix<double>& normalization_rows() const { return rows_; }

 private:
  std::shared_ptr<const Mesh> mesh_;
  int order_;
  std::vector<Vec2> nodes_;
  std::vector<std::array<int, 6>> cells_;
  std::vector<BoundarySegment> boundary_;
  std::vector<Eigen::Matrix<double, 3, 2>> bary_gradients_;
  Eigen::SparseMatrix<double> rows_;
  // Uniform bucket grid for point location.
  Vec2 grid_lo_;
  double grid_cell_ = 1.0;
  int grid_nx_ = 1, grid_ny_ = 1;
  std::vector<std::vector<int>> buckets_;
};

/// Displacement field in a FunctionSpace.
class FemField {
 public:
  FemField(std::shared_ptr<const FunctionSpace> space, Eigen::VectorXd values);

  const FunctionSpace& space() const { return *space_; }
  const std::shared_ptr<const FunctionSpace>& space_ptr() const { return space_; }
  const Eigen::VectorXd& values() const { return values_; }

  Vec2 nodal(int node) const { return {values_[2 * node], values_[2 * node + 1]}; }
  /// Throws InvalidArgument for points outside the mesh.
  Vec2 value(const Vec2& p) const;
  /// Full gradient (du_i/dx_j), averaged over the cells sharing p.
  Mat2 gradient(const Vec2& p) const;
  SymMat2 strain(const Vec2& p) const { return SymMat2::symmetrize(gradient(p)); }

  FemField operator-(const FemField& o) const;
  FemField operator+(const FemField& o) const;

 private:
  std::shared_ptr<const FunctionSpace> space_;
  Eigen::VectorXd values_;
};

/// Boundary traction psi(x, nu), sampled at Gauss points of every boundary
/// edge (nu is the outward normal of the straight edge).
struct Traction {
  std::function<Vec2(const Vec2& x, const Vec2& normal)> density;

  /// psi = S nu for a constant symmetric stress S.
  static Traction constant_stress(const SymMat2& stress);
};

using BodyLoad = std::function<Vec2(const Vec2& x)>;

Eigen::VectorXd assemble_traction(const FunctionSpace& space, const Traction& traction);
Eigen::VectorXd assemble_body_load(const FunctionSpace& space, const BodyLoad& load);

/// Phase tensors indexed by RegionTag.
struct Phases {
  Tensor4 background;
  Tensor4 inclusion;
  const Tensor4& operator[](int tag) const { return tag == kInclusion ? inclusion : background; }
};

/// Largest relative rigid-motion pairing |F . R_j| / sum_i |F_i R_j,i|.
double compatibility_residual(const FunctionSpace& space, const Eigen::VectorXd& load);

/// Assembles and factorises the constrained system once; solves any number
/// of load vectors.
class NeumannSolver {
 public:
  NeumannSolver(std::shared_ptr<const FunctionSpace> space, const Phases& phases);

  const FunctionSpace& space() const { return *space_; }
  const std::shared_ptr<const FunctionSpace>& space_ptr() const { return space_; }
  const Phases& phases() const { return phases_; }
  const Eigen::SparseMatrix<double>& stiffness() const { return stiffness_; }

  /// Throws IncompatibleLoadError when compatibility_residual(load) > tol.
  FemField solve(const Eigen::VectorXd& load, double compatibility_tol = 1e-10) const;

 private:
  std::shared_ptr<const FunctionSpace> space_;
  Phases phases_;
  Eigen::SparseMatrix<double> stiffness_;
  std::unique_ptr<Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>>> lu_;
};

/// Single solve of div(C grad^ u) = -f, (C grad^ u) nu = psi.
FemField solve_neumann(std::shared_ptr<const FunctionSpace> space, const Phases& phases, const Traction& traction,
                       const std::optional<BodyLoad>& body = std::nullopt);

/// Cell problem with boundary traction (C0 E^{ij}) nu, E^{ij} = sym(e_i (x) e_j),
/// indices 0-based.
FemField solve_cell(const NeumannSolver& solver, int i, int j);

/// Load vector of the Neumann function column k at boundary node y_node:
/// unit point force e_k at y, uniform traction -e_k / |dOmega|, and a
/// combination of the normalisation functionals that makes the load
/// orthogonal to every rigid motion (the point force carries a torque).
Eigen::VectorXd neumann_load(const FunctionSpace& space, int y_node, int k);

/// Index of the boundary node at y (to 1e-9), or InvalidArgument.
int boundary_node(const FunctionSpace& space, const Vec2& y);

/// Column k of the Neumann function at boundary point y. Throws
/// InvalidArgument when y is not a boundary node of the mesh.
FemField neumann_field(const NeumannSolver& background_solver, const Vec2& y, int k);
FemField neumann_field(std::shared_ptr<const FunctionSpace> space, const Tensor4& c0, const Vec2& y, int k);

enum class GradientRecovery { None, PatchAverage };

/// Symmetric gradients at the given points. PatchAverage (order 1 only)
/// interpolates area-weighted nodal averages of the cell gradients.
std::vector<SymMat2> evaluate_gradient(const FemField& field, const std::vector<Vec2>& points,
                                       GradientRecovery recovery = GradientRecovery::None);

struct NormPair {
  double l2 = 0.0;
  double h1 = 0.0;  // full H1 norm
};
/// Norms of a - b; both fields must share the same space.
NormPair energy_norms(const FemField& a, const FemField& b);

/// L2 distance between a field and a function.
double l2_distance(const FemField& field, const std::function<Vec2(const Vec2&)>& exact);

/// Rigid motion R with u - R in H~ (computed on the mesh boundary).
RigidMotion htilde_offset(const FunctionSpace& space, const std::function<Vec2(const Vec2&)>& u);

/// Field minus the rigid motion that puts it in H~.
FemField project_to_htilde(const FemField& field);

/// (int_{dOmega} u1, int_{dOmega} u2, int_Omega (d1 u2 - d2 u1)); the last
/// entry by volume quadrature.
Eigen::Vector3d htilde_residuals(const FemField& field);

/// int over cells with `tag` of (C grad^ u) : grad^ w.
double region_pairing(const FemField& u, const FemField& w, const Tensor4& c, int tag);

/// CSV "node,x,y,ux,uy".
void write_field_csv(const FemField& field, std::ostream& os);

}  // namespace striplab
