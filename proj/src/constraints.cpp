#include "slipflow/constraints.hpp"

#include "slipflow/errors.hpp"

namespace slipflow {

void ConstraintRecord::fix(int rotated_dof, double value) {
  fixed[rotated_dof] = 1;
  fixed_values[rotated_dof] = value;
}

void ConstraintRecord::finalize() {
  free_dofs.clear();
  for (int i = 0; i < size; ++i)
    if (!fixed[i]) free_dofs.push_back(i);
}

ConstraintRecord make_rotated_record(const Space& space) {
  ConstraintRecord rec;
  rec.size = space.num_dofs();
  rec.fixed.assign(rec.size, 0);
  rec.fixed_values = Vector::Zero(rec.size);
  std::vector<Triplet> t;
  t.reserve(rec.size + 2 * space.num_nodes());
  std::vector<char> done(rec.size, 0);
  if (space.has_velocity()) {
    for (int node = 0; node < space.num_nodes(); ++node) {
      if (!space.is_rotated(node)) continue;
      const Mat2 r = space.rotation(node);
      for (int a = 0; a < 2; ++a) {
        done[space.velocity_dof(node, a)] = 1;
        for (int b = 0; b < 2; ++b) t.emplace_back(space.velocity_dof(node, a), space.velocity_dof(node, b), r(a, b));
      }
    }
  }
  for (int i = 0; i < rec.size; ++i)
    if (!done[i]) t.emplace_back(i, i, 1.0);
  rec.rotation.resize(rec.size, rec.size);
  rec.rotation.setFromTriplets(t.begin(), t.end());
  rec.finalize();
  return rec;
}

void constrain_wall_normals(ConstraintRecord& rec, const Space& space) {
  if (!space.has_velocity()) throw ContractViolation("normal constraint needs a velocity space");
  for (int node = 0; node < space.num_nodes(); ++node)
    if (space.is_rotated(node)) rec.fix(space.velocity_dof(node, 0), 0.0);
  rec.finalize();
}

void constrain_end_velocity(ConstraintRecord& rec, const Space& space, const std::function<Vec2(int node)>& value) {
  if (!space.has_velocity()) throw ContractViolation("end constraint needs a velocity space");
  for (const BoundaryNode& b : space.mesh().boundary_nodes()) {
    if (!b.on_end) continue;
    const Vec2 u = value(b.node);
    rec.fix(space.velocity_dof(b.node, 0), u.x());
    rec.fix(space.velocity_dof(b.node, 1), u.y());
  }
  rec.finalize();
}

namespace {

SparseMatrix selection(const ConstraintRecord& rec) {
  std::vector<Triplet> t;
  t.reserve(rec.free_dofs.size());
  for (std::size_t k = 0; k < rec.free_dofs.size(); ++k) t.emplace_back(static_cast<int>(k), rec.free_dofs[k], 1.0);
  SparseMatrix p(rec.num_free(), rec.size);
  p.setFromTriplets(t.begin(), t.end());
  return p;
}

Vector fixed_part(const ConstraintRecord& rec) {
  Vector y = Vector::Zero(rec.size);
  for (int i = 0; i < rec.size; ++i)
    if (rec.fixed[i]) y[i] = rec.fixed_values[i];
  return y;
}

}  // namespace

SparseMatrix reduce_matrix(const ConstraintRecord& rec, const SparseMatrix& m) {
  const SparseMatrix p = selection(rec);
  const SparseMatrix pt = p * rec.rotation.transpose();
  SparseMatrix out = pt * m * SparseMatrix(pt.transpose());
  out.prune(0.0);
  return out;
}

AssembledSystem reduce_system(const SparseMatrix& matrix, const Vector& rhs, ConstraintRecord rec) {
  if (matrix.rows() != rec.size || rhs.size() != rec.size)
    throw ContractViolation("system dimensions do not match the constraint record");
  AssembledSystem out;
  const Vector lifted = rec.rotation * fixed_part(rec);
  out.matrix = reduce_matrix(rec, matrix);
  out.rhs = restrict_to_free(rec, rhs - matrix * lifted);
  out.constraints = std::move(rec);
  out.reduced = true;
  return out;
}

AssembledSystem apply_normal_constraint(const AssembledSystem& system, const Space& space) {
  if (system.reduced) throw ContractViolation("system is already reduced");
  ConstraintRecord rec = make_rotated_record(space);
  constrain_wall_normals(rec, space);
  return reduce_system(system.matrix, system.rhs, std::move(rec));
}

Vector expand(const ConstraintRecord& rec, const Vector& free_values) {
  if (free_values.size() != rec.num_free()) throw ContractViolation("free vector has the wrong length");
  Vector y = fixed_part(rec);
  for (std::size_t k = 0; k < rec.free_dofs.size(); ++k) y[rec.free_dofs[k]] = free_values[static_cast<int>(k)];
  return rec.rotation * y;
}

Vector restrict_to_free(const ConstraintRecord& rec, const Vector& full) {
  const Vector y = rec.rotation.transpose() * full;
  Vector out(rec.num_free());
  for (std::size_t k = 0; k < rec.free_dofs.size(); ++k) out[static_cast<int>(k)] = y[rec.free_dofs[k]];
  return out;
}

}  // namespace slipflow
