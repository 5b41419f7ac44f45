#pragma once

#include <functional>
#include <iosfwd>
#include <vector>

#include "slipflow/fem.hpp"

// Assembly of bilinear and linear forms. Every matrix has the full dof dimension of its
// space; velocity forms on a mixed space leave the pressure rows and columns empty.
namespace slipflow {

/// 2 (S u, S phi) with S u the symmetric gradient.
SparseMatrix assemble_stress_form(const Space& space);

/// alpha * int_wall (u . tau)(phi . tau) ds over Wall facets, tau the exact wall tangent.
/// Throws ContractViolation when the mesh has no wall geometry.
SparseMatrix assemble_slip_boundary_form(const Space& space, double alpha);

/// int ((b . grad) u) . phi dx for a fixed advecting velocity b.
SparseMatrix assemble_convection(const Space& space, const Field& b);

/// int ((u . grad) w) . phi dx: the derivative of the convection term in its advecting slot.
SparseMatrix assemble_convection_reaction(const Space& space, const Field& w);

/// Rows: pressure dofs, columns: velocity dofs; entry int psi_k d_a phi_j dx.
SparseMatrix assemble_divergence_coupling(const Space& space);

SparseMatrix assemble_velocity_mass(const Space& space);
/// Mass matrix of the bilinear pressure functions (pressure block of a mixed space).
SparseMatrix assemble_pressure_mass(const Space& space);
/// Vector m with m_k = int psi_k over the pressure dofs (zero elsewhere).
Vector pressure_mean_vector(const Space& space);

/// Scalar forms: int grad u . grad v, int u v, and alpha * int_wall u v ds (Robin term).
SparseMatrix assemble_scalar_stiffness(const Space& space);
SparseMatrix assemble_scalar_mass(const Space& space);
SparseMatrix assemble_robin_form(const Space& space, double alpha);
Vector assemble_scalar_load(const Space& space, const std::function<double(const Vec2&)>& f);
/// Load int f v with f given as a field on a (possibly different) space over the same mesh.
Vector assemble_scalar_load(const Space& space, const Field& f);

/// int f . phi dx.
Vector assemble_velocity_load(const Space& space, const std::function<Vec2(const Vec2&)>& f);
/// -int F : grad phi dx, the weak form of div F without boundary contribution.
Vector assemble_tensor_source(const Space& space, const std::function<Mat2(const Vec2&)>& F);
/// int_wall d (phi . tau) ds for tangential boundary data d.
Vector assemble_tangential_load(const Space& space, const std::function<double(const Vec2&)>& d);
/// int psi_k s dx on the pressure rows.
Vector assemble_pressure_load(const Space& space, const std::function<double(const Vec2&)>& s);

/// Plain-text "row col value" dump, one nonzero per line, preceded by "rows cols nnz".
void write_triplets(std::ostream& os, const SparseMatrix& m);

}  // namespace slipflow
