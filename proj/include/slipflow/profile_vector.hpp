#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "slipflow/fem.hpp"
#include "slipflow/poiseuille.hpp"

namespace slipflow {

/// Smooth monotone step in the axial coordinate: 0 below Z/2, 1 above Z, quintic
/// smoothstep in between (C2).
class CutoffEta {
 public:
  explicit CutoffEta(double z);

  double z() const noexcept { return z_; }
  double value(double x) const;
  double d1(double x) const;
  double d2(double x) const;
  /// int_{-inf}^{x} eta(s) ds.
  double integral(double x) const;

 private:
  double z_;
};

/// Compactly supported carrier h of the flux across a cross-section, int h = flux.
class FluxCarrier {
 public:
  enum class Kind { Bump, Radial, Profile };

  Kind kind() const noexcept { return kind_; }
  double flux() const noexcept { return flux_; }
  /// Support [lo, hi] for bumps, [0, radius] for radial carriers.
  double lo() const noexcept { return lo_; }
  double hi() const noexcept { return hi_; }

  /// Value and derivative on an interval cross-section.
  double value(double x1) const;
  double derivative(double x1) const;
  /// Value on a 2D cross-section (radial carriers; others use x.x()).
  double value(const Vec2& x) const;

  friend FluxCarrier build_flux_carrier(double lo, double hi, double flux, double section_length);
  friend FluxCarrier build_radial_flux_carrier(double radius, double section_radius, double flux);
  friend FluxCarrier poiseuille_flux_carrier(const PoiseuilleProfile& g);

 private:
  Kind kind_ = Kind::Bump;
  double flux_ = 0.0;
  double lo_ = 0.0;
  double hi_ = 0.0;
  double scale_ = 0.0;
  std::shared_ptr<const PoiseuilleProfile> profile_;
};

/// Normalized bump c exp(-1/(1-t^2)) on [lo, hi] inside the section [0, section_length].
/// Throws ContractViolation when [lo, hi] touches the walls or is empty, or flux < 0.
FluxCarrier build_flux_carrier(double lo, double hi, double flux, double section_length = 1.0);
/// Radial bump of the given radius centred in a disk-like cross-section.
FluxCarrier build_radial_flux_carrier(double radius, double section_radius, double flux);
/// h = g: the carrier that makes the profile vector equal the Poiseuille flow everywhere.
FluxCarrier poiseuille_flux_carrier(const PoiseuilleProfile& g);

/// A(x1) = int_0^x1 (h - g) on an interval cross-section.
class DivergencePotential1D {
 public:
  DivergencePotential1D(const FluxCarrier& h, const PoiseuilleProfile& g);

  double value(double x1) const;
  /// A' = h - g.
  double derivative(double x1) const;
  double length() const noexcept { return length_; }
  double max_abs() const;

 private:
  double integral(double a, double b) const;

  FluxCarrier h_;
  std::shared_ptr<const PoiseuilleProfile> g_;
  double length_ = 1.0;
  std::vector<double> knots_;
  std::vector<double> cumulative_;
};

/// Throws ConstructionError("zero_mean", ...) carrying the residual int (h - g) when it
/// exceeds 1e-12 times int |h - g|.
DivergencePotential1D solve_divergence_1d(const FluxCarrier& h, const PoiseuilleProfile& g);

/// Solution of div A = h - g with the 2D slip condition on a disk-like cross-section,
/// split as A = grad(phi) + G.
struct CrossSectionDivergence {
  std::shared_ptr<const Space> mixed_space;
  std::shared_ptr<const Space> scalar_space;
  Field phi;         // Neumann potential, zero mean
  Field gradient;    // projection of grad(phi) onto tangent Q2 fields
  Field correction;  // slip-Stokes correction G (velocity and pressure)
  Field field;       // A = gradient + correction (velocity part)
  double compatibility_residual = 0.0;  // int (h - g) before mean projection
  double mean = 0.0;                    // compatibility_residual / |section|
  double alpha = 1.0;
  std::shared_ptr<const PoiseuilleProfile> profile;
  FluxCarrier carrier;

  /// h - g - mean at a point of a cross-section cell.
  double source(int cell, const PointBasis& b) const;
};

/// Rejects carriers whose flux differs from the profile's with ConstructionError("compatibility").
/// The quadrature residual of int (h - g) that remains is recorded and projected out.
CrossSectionDivergence solve_divergence_2d(const PoiseuilleProfile& g, const FluxCarrier& h);

/// The same field from a single slip-Stokes solve with divergence source h - g.
Field solve_divergence_stokes(const CrossSectionDivergence& reference);

/// ||div A - (h - g)||_L2 for a cross-section solution.
double divergence_residual_l2(const CrossSectionDivergence& sol, const Field& a);

struct ProfileVectorChecks {
  double divergence_l2 = 0.0;              // analytic field, volume quadrature
  double interpolant_divergence_l2 = 0.0;  // nodal interpolant
  double flux_drift = 0.0;                 // max relative station flux error
  double outlet_mismatch = 0.0;            // max |a - g| at dofs with |x2| >= Z
  double normal_max = 0.0;                 // max |a . n| at wall nodes
};

/// Divergence-free field on a strip joining the left and right Poiseuille flows.
class ProfileVector {
 public:
  Vec2 value(const Vec2& x) const;
  /// grad(i, j) = d a_i / d x_j.
  Mat2 gradient(const Vec2& x) const;
  double flux() const noexcept { return flux_; }
  const CutoffEta& eta() const noexcept { return eta_; }
  const FluxCarrier& carrier() const noexcept { return h_; }
  const PoiseuilleProfile& left() const { return *gl_; }
  const PoiseuilleProfile& right() const { return *gr_; }
  const DivergencePotential1D& potential_left() const { return *al_; }
  const DivergencePotential1D& potential_right() const { return *ar_; }
  /// Nodal interpolant on the space passed at construction (pressure dofs zero).
  const Field& field() const noexcept { return field_; }
  const ProfileVectorChecks& checks() const noexcept { return checks_; }
  /// Axial stations (three Gauss lines per cell row) and the flux of the exact field there.
  const std::vector<double>& stations() const noexcept { return stations_; }
  double section_flux(double x2) const;

  friend ProfileVector assemble_profile_vector(const Space& space, const PoiseuilleProfile& gl,
                                               const PoiseuilleProfile& gr, const FluxCarrier& h,
                                               const CutoffEta& eta);

 private:
  ProfileVector(const PoiseuilleProfile& gl, const PoiseuilleProfile& gr, const FluxCarrier& h, const CutoffEta& eta);

  std::shared_ptr<const PoiseuilleProfile> gl_, gr_;
  FluxCarrier h_;
  CutoffEta eta_;
  std::shared_ptr<const DivergencePotential1D> al_, ar_;
  WallFunction lower_ = WallFunction::flat(0.0);
  WallFunction upper_ = WallFunction::flat(1.0);
  double flux_ = 0.0;
  Field field_;
  ProfileVectorChecks checks_;
  std::vector<double> stations_;
};

/// Builds a on a strip space (VectorQ2 or MixedQ2Q1). Throws ConstructionError naming the
/// violated check: straight_transition, carrier_support, zero_mean, divergence, flux,
/// outlet_match or impermeability.
ProfileVector assemble_profile_vector(const Space& space, const PoiseuilleProfile& gl, const PoiseuilleProfile& gr,
                                      const FluxCarrier& h, const CutoffEta& eta);

}  // namespace slipflow
