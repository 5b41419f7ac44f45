#pragma once

#include <functional>

#include "slipflow/constraints.hpp"
#include "slipflow/fem.hpp"

namespace slipflow {

/// Linear Stokes problem with the Navier-slip condition: impermeability is imposed
/// strongly on Wall facets, friction and tangential data enter weakly; InflowEnd and
/// OutflowEnd facets carry Dirichlet velocity data. Empty callables mean zero data.
struct StokesProblem {
  double alpha = 1.0;
  std::function<Vec2(const Vec2&)> force;
  /// F in -div(2 S u) + grad p = f + div F.
  std::function<Mat2(const Vec2&)> tensor_source;
  /// s in div u = s.
  std::function<double(const Vec2&)> divergence_source;
  /// d in 2 (S u n)_tan + alpha u_tan = d on walls.
  std::function<double(const Vec2&)> tangential_data;
  /// Dirichlet velocity on end facets.
  std::function<Vec2(const Vec2&)> end_velocity;
};

struct StokesSolution {
  Field state;                     // velocity and pressure, pressure with zero mean
  double momentum_residual = 0.0;  // ||r||_inf / max(||b||_inf, 1) of the reduced system
  double mass_residual = 0.0;
};

/// 2 (S u, S v) + alpha <u_t, v_t> - (p, div v) - (q, div u) on a mixed space.
SparseMatrix assemble_stokes_operator(const Space& space, double alpha);

/// Number of independent rigid motions that are tangent to every wall; nonzero means the
/// problem without friction and without end constraints is singular.
int rigid_kernel_dimension(const Mesh& mesh);

/// Throws SolverError (with kernel_dimension set) when alpha = 0 and no end facets pin the
/// rigid motions, or when the factorization fails.
StokesSolution solve_stokes(const Space& space, const StokesProblem& problem);

/// Solves a reduced saddle-point system bordered by the zero-mean pressure constraint and
/// returns the full dof vector.
Vector solve_constrained_saddle(const Space& space, const SparseMatrix& matrix, const Vector& rhs,
                                const ConstraintRecord& rec, double* residual = nullptr);

}  // namespace slipflow
