#include "slipflow/poiseuille.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "slipflow/errors.hpp"
#include "slipflow/forms.hpp"
#include "slipflow/linear_solver.hpp"

namespace slipflow {

Field solve_robin_poisson(const Space& space, double alpha) {
  if (!(alpha > 0.0)) throw ContractViolation("Robin problem needs alpha > 0; the Neumann limit is singular");
  if (space.family() != SpaceFamily::ScalarQ2) throw ContractViolation("Robin problem expects a scalar Q2 space");
  const SparseMatrix a = assemble_scalar_stiffness(space) + assemble_robin_form(space, alpha);
  const Vector b = assemble_scalar_load(space, [](const Vec2&) { return 1.0; });
  SparseSPD solver;
  solver.factor(a);
  return Field(space, solver.solve(b), "phi");
}

FluxConstant flux_constant(const Field& phi, double alpha, double tolerance) {
  const Space& space = *phi.space;
  FluxConstant out;
  out.tolerance = tolerance;
  out.value = scalar_integral(phi);
  const SparseMatrix robin = assemble_robin_form(space, alpha);
  const double grad = scalar_grad_l2(phi);
  out.energy = grad * grad + phi.values.dot(robin * phi.values);
  out.relative_gap = std::abs(out.value - out.energy) / std::abs(out.value);
  out.consistent = out.relative_gap <= tolerance;
  return out;
}

ScalarSample PoiseuilleProfile::sample_at(double x1) const {
  if (mesh->dim() != 1) throw ContractViolation("pointwise evaluation is defined for interval cross-sections");
  const auto& nodes = mesh->nodes();
  const double x0 = nodes.front().x(), xn = nodes.back().x();
  const int n = static_cast<int>(mesh->num_cells());
  int cell = static_cast<int>(std::floor((x1 - x0) / (xn - x0) * n));
  cell = std::clamp(cell, 0, n - 1);
  const auto c = mesh->cell(cell);
  const double a = nodes[c[0]].x(), b = nodes[c[2]].x();
  return eval_scalar(profile, cell, Vec2((x1 - a) / (b - a), 0.0));
}

double PoiseuilleProfile::value_at(double x1) const { return sample_at(x1).value; }

double PoiseuilleProfile::derivative_at(double x1) const { return sample_at(x1).grad.x(); }

double PoiseuilleProfile::h1_norm() const {
  const double l2 = scalar_l2(profile), g = scalar_grad_l2(profile);
  return std::sqrt(l2 * l2 + g * g);
}

PoiseuilleProfile poiseuille_profile(std::shared_ptr<const Mesh> mesh, double flux) {
  if (!(flux >= 0.0)) throw ContractViolation("Poiseuille flux must be non-negative");
  PoiseuilleProfile p;
  p.spec = mesh->spec();
  p.alpha = p.spec.alpha;
  p.flux = flux;
  p.mesh = mesh;
  p.space = std::make_shared<Space>(*mesh, SpaceFamily::ScalarQ2);
  p.phi = solve_robin_poisson(*p.space, p.alpha);
  p.flux_constant = flux_constant(p.phi, p.alpha);
  const double scale = flux / p.flux_constant.value;
  p.profile = Field(*p.space, scale * p.phi.values, "g");
  p.pressure_gradient = -scale;
  return p;
}

PoiseuilleProfile poiseuille_profile(const DomainSpec& spec, int resolution, double flux) {
  if (spec.is_strip()) throw ContractViolation("Poiseuille profiles live on interval, disk or star cross-sections");
  return poiseuille_profile(std::make_shared<const Mesh>(build_cross_section_mesh(spec, resolution)), flux);
}

ClosedFormPoiseuille closed_form_reference(const DomainSpec& spec, double flux) {
  const double alpha = spec.alpha;
  ClosedFormPoiseuille out;
  if (const auto* iv = std::get_if<IntervalDomain>(&spec.kind)) {
    const double l = iv->length;
    out.flux_constant = l * l * l / 12.0 + l * l / (2.0 * alpha);
    const double s = flux / out.flux_constant;
    out.profile = [=](const Vec2& x) { return s * (0.5 * (l * x.x() - x.x() * x.x()) + l / (2.0 * alpha)); };
  } else if (const auto* d = std::get_if<DiskDomain>(&spec.kind)) {
    const double r = d->radius;
    out.flux_constant = std::numbers::pi * std::pow(r, 4) / 8.0 + std::numbers::pi * std::pow(r, 3) / (2.0 * alpha);
    const double s = flux / out.flux_constant;
    out.profile = [=](const Vec2& x) { return s * (0.25 * (r * r - x.squaredNorm()) + r / (2.0 * alpha)); };
  } else {
    throw ContractViolation("closed-form Poiseuille profiles exist for interval and disk cross-sections only");
  }
  out.pressure_gradient = -flux / out.flux_constant;
  return out;
}

}  // namespace slipflow
