#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "slipflow/fem.hpp"
#include "slipflow/navier_stokes.hpp"

namespace slipflow {

/// One named check with an explicit tolerance. `relation` is "<=" (value must not exceed
/// the tolerance) or ">=" (value must reach it).
struct Check {
  std::string name;
  double value = 0.0;
  std::string relation = "<=";
  double tolerance = 0.0;
  bool passed = false;
  std::string provenance;  // field or run the value was measured on
  std::vector<std::pair<std::string, double>> details;
  bool timing = false;  // wall-clock value: excluded from machine-readable reports
};

Check make_check(std::string name, double value, std::string relation, double tolerance, std::string provenance,
                 std::vector<std::pair<std::string, double>> details = {});

struct Report {
  std::vector<std::pair<std::string, std::string>> environment;
  std::vector<Check> checks;

  bool passed() const;
  const Check* find(const std::string& name) const;
  /// Aligned human-readable table.
  std::string to_text() const;
};

// ---------------------------------------------------------------------------------------
// Flux through axial stations of a strip

struct FluxProfile {
  std::vector<double> stations;  // x2 of each Gauss line (three per cell row)
  std::vector<double> fluxes;
  double reference = 0.0;        // flux the drift is measured against
  double max_drift = 0.0;        // max |flux - reference| / reference (absolute when reference is 0)
};

/// Flux of the velocity through every Gauss line eta = const of a single-block strip grid.
/// reference < 0 selects the mean station flux.
FluxProfile flux_profile(const Field& u, double reference = -1.0);

// ---------------------------------------------------------------------------------------
// Integral identities and inequalities

/// Volume integral of |f|^2 + div f (y . f) + y . ((f . grad) f), y = x - x0, whose
/// vanishing for fields with f . n = 0 underlies the cross-sectional Poincare estimate.
/// Throws ContractViolation when f . n exceeds 1e-10 max(1, |f|_inf) at a wall node.
double payne_residual(const Field& f, const Vec2& x0);
/// Same integral for an exact field sampled on the mesh quadrature.
double payne_residual(const Mesh& mesh, const std::function<VectorSample(const Vec2&)>& f, const Vec2& x0);
/// Centroid of a mesh (volume quadrature).
Vec2 centroid(const Mesh& mesh);

enum class PoincareMode { Transverse, FluxSubtracted, Truncated };

const char* to_string(PoincareMode mode);

struct PoincareResult {
  double ratio = 0.0;      // ||w||_L2 / ||grad w||_L2
  double violation = 0.0;  // measured hypothesis violation
};

/// Checks the mode's hypotheses (Transverse: w . n = 0 on walls; FluxSubtracted: zero flux
/// through every station; Truncated: w . n = 0 and zero flux through the station nearest
/// x2 = Z/2) and returns the ratio. A violation above tolerance * max(||w||_L2, 1e-300)
/// throws ContractViolation quoting the measured value.
PoincareResult poincare_ratio(const Field& w, PoincareMode mode, double tolerance = 1e-8);

/// (2 int |S u|^2 + alpha int_wall |u_tan|^2) / int |grad u|^2.
double korn_combined_ratio(const Field& u, double alpha);

struct SlipResidual {
  std::vector<Vec2> points;         // wall facet quadrature points
  std::vector<double> residual;     // d_n u_tau - (kappa - alpha) u_tau
  std::vector<double> normal;       // u . n with the exact wall normal
  double l2 = 0.0;                  // wall L2 norms
  double normal_l2 = 0.0;
  double max_abs = 0.0;
  double nodal_normal_max = 0.0;    // max |u . n| at wall nodes
};

/// Strong-form slip condition in wall coordinates, with one-sided gradients from the
/// adjacent cell and the exact wall frame and curvature.
SlipResidual slip_residual_curvilinear(const Field& u, double alpha);

/// Wall L2 norm of d g/dn + alpha g for a scalar cross-sectional profile.
double robin_residual(const Field& g, double alpha);

// ---------------------------------------------------------------------------------------
// Exponential decay

enum class Outlet { Right, Left };

struct DecayFit {
  std::vector<double> stations;  // distances s from the axis origin
  std::vector<double> energies;  // G(s) = int_{outlet beyond s} |grad v|^2
  std::vector<double> sup_values;  // max |v| over nodes of the section nearest s
  std::vector<double> dropped;   // stations removed as numerical noise
  double noise_floor = 0.0;
  bool void_fit = true;
  double sigma = 0.0;
  double prefactor = 0.0;
  double r2 = 0.0;
  bool pointwise_void = true;
  double pointwise_sigma = 0.0;  // rate of max |v|
  double pointwise_prefactor = 0.0;
  double pointwise_r2 = 0.0;
};

/// Least-squares fit of log G(s) = log C - sigma s. Stations must be ordered, at least four,
/// and lie in (Z + 1, zeta - 1). Energies below 100 machine epsilons relative to the total
/// energy int |grad v|^2 (or of `reference`, if larger) are dropped. Pass the full velocity as
/// `reference` when v may be pure rounding noise.
DecayFit decay_fit(const Field& v, const std::vector<double>& stations, Outlet outlet = Outlet::Right,
                   const Field* reference = nullptr);

/// Tail energy G(s) of a velocity field on a strip grid.
double tail_energy(const Field& v, double s, Outlet outlet = Outlet::Right);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

// ---------------------------------------------------------------------------------------
// Nonlinear-solution checks

struct EnergyRow {
  double flux = 0.0;
  double h1 = 0.0;
  double ratio = 0.0;  // ||v||_H1 / flux
};

struct EnergyLinearity {
  std::vector<EnergyRow> rows;   // ascending flux
  double small_flux_deviation = 0.0;  // |r1 - r0| / max(|r0|, 1e-300) for the two smallest fluxes
  double max_deviation = 0.0;         // over all rows against the smallest flux
};

/// Requires at least two converged solutions at distinct positive fluxes.
EnergyLinearity energy_linearity(const std::vector<NSSolution>& solutions);

/// Second differences of the log-residual over the last three Newton-phase residuals
/// (the last Picard residual followed by the Newton residuals); both must be negative when
/// four values are available, the last one otherwise. False with fewer than three.
bool newton_quadratic(const std::vector<NSIteration>& history);

/// H1 distance between two velocity fields over the cells of `a` with |x2| <= extent. Both
/// meshes must contain identical cells there (same resolution, nested truncations).
double subdomain_h1_distance(const Field& a, const Field& b, double extent);

}  // namespace slipflow
