#pragma once

#include <functional>
#include <memory>

#include "slipflow/fem.hpp"

namespace slipflow {

/// Unit-load Robin problem -lap(phi) = 1, d phi/dn + alpha phi = 0 on a cross-section.
/// Throws ContractViolation for alpha <= 0 (the Neumann problem is singular).
Field solve_robin_poisson(const Space& space, double alpha);

struct FluxConstant {
  double value = 0.0;         // int phi
  double energy = 0.0;        // int |grad phi|^2 + alpha int_wall phi^2
  double relative_gap = 0.0;  // |value - energy| / |value|
  bool consistent = false;    // relative_gap <= tolerance
  double tolerance = 1e-10;
};

FluxConstant flux_constant(const Field& phi, double alpha, double tolerance = 1e-10);

/// Slip Poiseuille flow g = (flux / C_P) phi across a cross-section, with axial pressure
/// gradient -flux / C_P.
struct PoiseuilleProfile {
  DomainSpec spec;
  double alpha = 1.0;
  double flux = 0.0;
  std::shared_ptr<const Mesh> mesh;
  std::shared_ptr<const Space> space;
  Field phi;
  Field profile;
  FluxConstant flux_constant;
  double pressure_gradient = 0.0;

  /// Profile value at a point of a 1D cross-section.
  double value_at(double x1) const;
  double derivative_at(double x1) const;
  ScalarSample sample_at(double x1) const;
  /// int g over the cross-section.
  double integral() const { return scalar_integral(profile); }
  double h1_norm() const;
};

/// Builds the cross-section mesh at the given resolution and solves for the profile.
/// Requires flux >= 0 and an interval, disk or star-shaped spec.
PoiseuilleProfile poiseuille_profile(const DomainSpec& spec, int resolution, double flux);

/// Same profile on an existing cross-section mesh (kept alive by the shared pointer).
PoiseuilleProfile poiseuille_profile(std::shared_ptr<const Mesh> mesh, double flux);

struct ClosedFormPoiseuille {
  std::function<double(const Vec2&)> profile;
  double flux_constant = 0.0;
  double pressure_gradient = 0.0;
};

/// Exact profile on an interval [0, L] or a disk of radius R centred at the origin.
/// Throws ContractViolation for other cross-sections.
ClosedFormPoiseuille closed_form_reference(const DomainSpec& spec, double flux);

}  // namespace slipflow
