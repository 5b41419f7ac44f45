#pragma once

#include <functional>
#include <vector>

#include "slipflow/fem.hpp"

namespace slipflow {

/// Strong constraints expressed in rotated coordinates: full = T * rotated, where T is
/// block-orthogonal with the nodal (n, tau) frames on wall nodes. A fixed rotated dof
/// takes its value from fixed_values; the remaining rotated dofs are the unknowns.
struct ConstraintRecord {
  int size = 0;
  SparseMatrix rotation;
  std::vector<char> fixed;
  Vector fixed_values;
  std::vector<int> free_dofs;  // ascending; filled by finalize()

  int num_free() const noexcept { return static_cast<int>(free_dofs.size()); }
  void fix(int rotated_dof, double value);
  void finalize();
};

/// Rotation frames of the space; no dofs fixed.
ConstraintRecord make_rotated_record(const Space& space);
/// Fixes the normal component at every rotated wall node to zero.
void constrain_wall_normals(ConstraintRecord& rec, const Space& space);
/// Fixes both velocity components at every node on an InflowEnd or OutflowEnd facet.
void constrain_end_velocity(ConstraintRecord& rec, const Space& space,
                            const std::function<Vec2(int node)>& value);

struct AssembledSystem {
  SparseMatrix matrix;
  Vector rhs;
  ConstraintRecord constraints;
  bool reduced = false;
};

/// Eliminates the fixed dofs symmetrically: P T^t A T P^t y = P T^t (b - A T y_fixed).
AssembledSystem reduce_system(const SparseMatrix& matrix, const Vector& rhs, ConstraintRecord rec);
/// Rotates wall-node dofs into (n, tau), fixes the normal dofs to zero and eliminates them.
AssembledSystem apply_normal_constraint(const AssembledSystem& system, const Space& space);

/// Full Cartesian vector from the free unknowns and the fixed values.
Vector expand(const ConstraintRecord& rec, const Vector& free_values);
/// Free rotated components P T^t x of a full vector.
Vector restrict_to_free(const ConstraintRecord& rec, const Vector& full);
/// P T^t M T P^t for an operator M on the full space.
SparseMatrix reduce_matrix(const ConstraintRecord& rec, const SparseMatrix& m);

}  // namespace slipflow
