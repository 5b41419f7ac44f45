#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "slipflow/mesh.hpp"
#include "slipflow/types.hpp"

namespace slipflow {

enum class SpaceFamily { ScalarQ1, ScalarQ2, VectorQ2, MixedQ2Q1 };

/// Degree-of-freedom layout over a mesh.
///
/// Vector velocity dofs are numbered comp * num_nodes + node (all nodes carry Q2 values).
/// Mixed spaces append one bilinear pressure dof per cell-vertex node. Scalar Q1 spaces
/// number their dofs in corner-node order. The referenced mesh must outlive the space.
class Space {
 public:
  Space(const Mesh& mesh, SpaceFamily family);

  const Mesh& mesh() const noexcept { return *mesh_; }
  SpaceFamily family() const noexcept { return family_; }
  bool has_velocity() const noexcept {
    return family_ == SpaceFamily::VectorQ2 || family_ == SpaceFamily::MixedQ2Q1;
  }
  bool has_pressure() const noexcept { return family_ == SpaceFamily::MixedQ2Q1; }

  int num_dofs() const noexcept { return num_dofs_; }
  int num_velocity_dofs() const noexcept { return has_velocity() ? 2 * num_nodes() : 0; }
  int num_pressure_dofs() const noexcept { return has_pressure() ? num_corners() : 0; }
  int num_nodes() const noexcept { return static_cast<int>(mesh_->num_nodes()); }
  int num_corners() const noexcept { return static_cast<int>(mesh_->corner_nodes().size()); }

  int velocity_dof(int node, int comp) const noexcept { return comp * num_nodes() + node; }
  /// Pressure dof of a corner node, -1 otherwise.
  int pressure_dof(int node) const noexcept {
    const int k = corner_index_[node];
    return k < 0 ? -1 : num_velocity_dofs() + k;
  }
  /// Scalar dof of a node (Q1: -1 for non-corner nodes).
  int scalar_dof(int node) const noexcept {
    return family_ == SpaceFamily::ScalarQ1 ? corner_index_[node] : node;
  }
  /// Global Q1 dofs of a cell in basis::q1_2d order (1D: left, right).
  std::array<int, 4> cell_corner_dofs(int cell) const;

  /// Orthogonal nodal frame: columns (n, tau) on wall nodes that are not end nodes,
  /// identity elsewhere.
  Mat2 rotation(int node) const;
  /// True when velocity dofs at the node are rotated into the wall frame.
  bool is_rotated(int node) const;

 private:
  const Mesh* mesh_;
  SpaceFamily family_;
  int num_dofs_ = 0;
  std::vector<int> corner_index_;
};

/// Discrete function: dof values over a space. The space must outlive the field.
struct Field {
  const Space* space = nullptr;
  Vector values;
  std::string name;

  Field() = default;
  Field(const Space& s, std::string label = {}) : space(&s), values(Vector::Zero(s.num_dofs())), name(std::move(label)) {}
  Field(const Space& s, Vector v, std::string label = {}) : space(&s), values(std::move(v)), name(std::move(label)) {}
};

/// Basis data at one point of a cell: Q2 values and physical gradients, Q1 values.
/// 1D cells use the first three Q2 and first two Q1 entries; gradients carry d/dx in x().
struct PointBasis {
  Vec2 x = Vec2::Zero();
  double det = 0.0;
  Mat2 jac = Mat2::Identity();
  Mat2 inv = Mat2::Identity();
  std::array<double, 9> phi{};
  std::array<Vec2, 9> dphi{};
  std::array<double, 4> psi{};
  std::array<Vec2, 4> dpsi{};
};

PointBasis basis_at(const Mesh& mesh, int cell, const Vec2& ref);

/// Volume quadrature of one cell: basis data plus weight times Jacobian determinant.
class CellQuadrature {
 public:
  explicit CellQuadrature(const Mesh& mesh) : mesh_(&mesh) {}
  void reinit(int cell);
  int size() const noexcept { return static_cast<int>(points_.size()); }
  const PointBasis& operator[](int q) const { return points_[q]; }
  double jxw(int q) const { return jxw_[q]; }

 private:
  const Mesh* mesh_;
  std::vector<PointBasis> points_;
  std::vector<double> jxw_;
};

/// One quadrature point on a boundary facet.
struct FacetPoint {
  Vec2 ref = Vec2::Zero();
  Vec2 x = Vec2::Zero();
  double ds = 0.0;                  // weight times arc-length element (1 in 1D)
  Vec2 normal = Vec2::Zero();       // outward normal of the discrete facet
};

std::vector<FacetPoint> facet_quadrature(const Mesh& mesh, const BoundaryFacet& facet);

ScalarSample eval_scalar(const Field& f, int cell, const Vec2& ref);
/// Second derivatives (xx, xy, yy) of a scalar Q2 field on a 2D isoparametric cell.
std::array<double, 3> eval_scalar_hessian(const Field& f, int cell, const Vec2& ref);
VectorSample eval_velocity(const Field& f, int cell, const Vec2& ref);
double eval_pressure(const Field& f, int cell, const Vec2& ref);
/// Same evaluations from precomputed basis data of the given cell.
ScalarSample eval_scalar(const Field& f, int cell, const PointBasis& b);
VectorSample eval_velocity(const Field& f, int cell, const PointBasis& b);
double eval_pressure(const Field& f, int cell, const PointBasis& b);

/// Nodal value of a velocity field.
Vec2 nodal_velocity(const Field& f, int node);
void set_nodal_velocity(Field& f, int node, const Vec2& u);

Field interpolate_scalar(const Space& space, const std::function<double(const Vec2&)>& fn, std::string name = {});
Field interpolate_velocity(const Space& space, const std::function<Vec2(const Vec2&)>& fn, std::string name = {});

double scalar_l2(const Field& f);
double scalar_grad_l2(const Field& f);
double scalar_integral(const Field& f);
double velocity_l2(const Field& f);
double velocity_grad_l2(const Field& f);
/// sqrt(||u||^2 + ||grad u||^2) with the volume quadrature of the space.
double velocity_h1(const Field& f);
double pressure_integral(const Field& f);

/// L2 distances to an exact function, evaluated with the volume quadrature.
double scalar_l2_error(const Field& f, const std::function<double(const Vec2&)>& exact);
double velocity_l2_error(const Field& f, const std::function<Vec2(const Vec2&)>& exact);
double pressure_l2_error(const Field& f, const std::function<double(const Vec2&)>& exact);

}  // namespace slipflow
