#include "slipflow/stokes.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "slipflow/errors.hpp"
#include "slipflow/forms.hpp"
#include "slipflow/linear_solver.hpp"

namespace slipflow {

SparseMatrix assemble_stokes_operator(const Space& space, double alpha) {
  const SparseMatrix b = assemble_divergence_coupling(space);
  SparseMatrix bt = b.transpose();
  SparseMatrix m = assemble_stress_form(space) - b - bt;
  if (alpha != 0.0) m += assemble_slip_boundary_form(space, alpha);
  return m;
}

int rigid_kernel_dimension(const Mesh& mesh) {
  Vec2 centre = Vec2::Zero();
  for (const Vec2& x : mesh.nodes()) centre += x;
  centre /= static_cast<double>(mesh.num_nodes());
  std::vector<Eigen::RowVector3d> rows;
  for (const BoundaryNode& b : mesh.boundary_nodes()) {
    if (b.on_end) return 0;
    if (!b.on_wall) continue;
    const Vec2 n = b.frame.normal, d = mesh.nodes()[b.node] - centre;
    rows.emplace_back(n.x(), n.y(), -d.y() * n.x() + d.x() * n.y());
  }
  Eigen::MatrixXd a(rows.size(), 3);
  for (std::size_t i = 0; i < rows.size(); ++i) a.row(static_cast<int>(i)) = rows[i];
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
  const auto s = svd.singularValues();
  const double scale = s.size() ? s[0] : 0.0;
  int rank = 0;
  for (int i = 0; i < s.size(); ++i)
    if (s[i] > 1e-8 * std::max(scale, 1.0)) ++rank;
  return 3 - rank;
}

Vector solve_constrained_saddle(const Space& space, const SparseMatrix& matrix, const Vector& rhs,
                                const ConstraintRecord& rec, double* residual) {
  const AssembledSystem red = reduce_system(matrix, rhs, rec);
  const Vector mean = restrict_to_free(red.constraints, pressure_mean_vector(space));
  const SparseMatrix bordered = border(red.matrix, mean);
  Vector b(red.rhs.size() + 1);
  b << red.rhs, 0.0;
  SparseLU lu;
  lu.factor(bordered);
  const Vector x = lu.solve(b);
  if (residual) *residual = (bordered * x - b).lpNorm<Eigen::Infinity>() / std::max(b.lpNorm<Eigen::Infinity>(), 1.0);
  return expand(red.constraints, x.head(red.rhs.size()));
}

StokesSolution solve_stokes(const Space& space, const StokesProblem& problem) {
  if (!space.has_pressure()) throw ContractViolation("Stokes problems need a mixed velocity-pressure space");
  const Mesh& mesh = space.mesh();
  if (problem.alpha < 0.0) throw ContractViolation("friction coefficient must be non-negative");
  if (problem.alpha == 0.0) {
    const int k = rigid_kernel_dimension(mesh);
    if (k > 0)
      throw SolverError("singular saddle-point system: rigid motions tangent to the walls are not controlled", k);
  }
  const SparseMatrix a = assemble_stokes_operator(space, problem.alpha);
  Vector rhs = Vector::Zero(space.num_dofs());
  if (problem.force) rhs += assemble_velocity_load(space, problem.force);
  if (problem.tensor_source) rhs += assemble_tensor_source(space, problem.tensor_source);
  if (problem.tangential_data) rhs += assemble_tangential_load(space, problem.tangential_data);
  if (problem.divergence_source) rhs -= assemble_pressure_load(space, problem.divergence_source);

  ConstraintRecord rec = make_rotated_record(space);
  constrain_wall_normals(rec, space);
  const auto& nodes = mesh.nodes();
  constrain_end_velocity(rec, space, [&](int node) {
    return problem.end_velocity ? problem.end_velocity(nodes[node]) : Vec2::Zero().eval();
  });

  StokesSolution out;
  double res = 0.0;
  out.state = Field(space, solve_constrained_saddle(space, a, rhs, rec, &res), "stokes");
  out.momentum_residual = res;
  // Mass residual: the pressure rows of the full operator.
  const Vector r = a * out.state.values - rhs;
  out.mass_residual = r.tail(space.num_pressure_dofs()).lpNorm<Eigen::Infinity>();
  return out;
}

}  // namespace slipflow
