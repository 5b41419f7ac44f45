#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "slipflow/fem.hpp"
#include "slipflow/profile_vector.hpp"

namespace slipflow {

struct NSOptions {
  double absolute_tolerance = 1e-10;
  double relative_tolerance = 1e-12;
  int picard_steps = 3;     // warm-start iterations before Newton
  int max_newton = 25;
  int max_picard = 200;     // cap for the Picard fallback
  double flux_ceiling = 1e3;
};

/// Steady Navier-Stokes flow in a truncated strip with Navier-slip walls. The deficit
/// v = u - a vanishes on the truncation ends. `profile` may be built for any positive
/// flux: the lifting is rescaled linearly to `flux`.
struct NSProblem {
  const Space* space = nullptr;  // MixedQ2Q1 on a strip mesh
  const ProfileVector* profile = nullptr;
  double flux = 0.0;
  NSOptions options;
};

struct NSIteration {
  std::string kind;  // "picard" or "newton"
  double residual = 0.0;
  double step = 0.0;  // ||update||_inf
  double damping = 1.0;
};

struct NSSolution {
  Field state;     // u and the pressure p of the u-formulation
  Field deficit;   // v = u - a_h (velocity part)
  Field lifting;   // a_h
  Field pi;        // Pi with zero mean (pressure part)
  Field pressure;  // p = Pi - flux (I(x2)/C_R - I(-x2)/C_L), I the antiderivative of eta
  std::vector<NSIteration> history;
  double flux = 0.0;
  double initial_residual = 0.0;
  double final_residual = 0.0;
  /// Multiplier of the zero-mean pressure constraint: div u equals this constant weakly.
  double gauge_multiplier = 0.0;
  int newton_steps = 0;
  int picard_steps = 0;
  bool converged = false;
  bool fell_back_to_picard = false;
  std::string status;
};

/// Discrete weak-form residual of the u-formulation in the dual norm induced by the
/// velocity and pressure mass matrices, over the unconstrained dofs, after removing the
/// component along the pressure-gauge multiplier.
double ns_residual_norm(const NSProblem& problem, const Field& state);

/// initial_deficit: velocity field on the problem's space (nullptr: zero).
NSSolution solve_ns(const NSProblem& problem, const Field* initial_deficit = nullptr);

struct ContinuationResult {
  std::vector<NSSolution> solutions;
  double largest_converged_flux = 0.0;  // empirical small-flux threshold proxy
  bool reached_end = true;
};

/// Solves for each flux in ascending order, each warm-started from the previous deficit
/// rescaled by the flux ratio. Stops at the first nonconvergence.
ContinuationResult continuation_sweep(const NSProblem& problem, const std::vector<double>& fluxes);

struct UniquenessResult {
  std::vector<NSSolution> solutions;
  std::vector<std::string> starts;
  std::vector<std::string> excluded;  // nonconvergent starts
  double max_distance = 0.0;           // max ||v_i - v_j||_H1 / max(||v_i||_H1, 1e-14)
  double max_absolute_distance = 0.0;  // max ||v_i - v_j||_H1
};

/// Solves from k >= 2 starts: zero, a masked multiple of a, then seeded divergence-free
/// noise fields.
UniquenessResult uniqueness_probe(const NSProblem& problem, int starts, std::uint64_t seed);

}  // namespace slipflow
