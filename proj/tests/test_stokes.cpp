#include <cmath>
#include <numbers>

#include "doctest.h"
#include "slipflow/errors.hpp"
#include "slipflow/forms.hpp"
#include "slipflow/poiseuille.hpp"
#include "slipflow/stokes.hpp"

using namespace slipflow;

namespace {

const double pi = std::numbers::pi;

// Manufactured solution on the unit square: u = curl of sin(pi x) cos(pi y) / pi, which
// is tangent to the walls x = 0 and x = 1, and p = cos(pi x) cos(pi y) with zero mean.
Vec2 mms_u(const Vec2& x) {
  return Vec2(-std::sin(pi * x.x()) * std::sin(pi * x.y()), -std::cos(pi * x.x()) * std::cos(pi * x.y()));
}

Mat2 mms_grad(const Vec2& x) {
  const double sx = std::sin(pi * x.x()), cx = std::cos(pi * x.x());
  const double sy = std::sin(pi * x.y()), cy = std::cos(pi * x.y());
  Mat2 g;
  g << -pi * cx * sy, -pi * sx * cy, pi * sx * cy, pi * cx * sy;
  return g;
}

double mms_p(const Vec2& x) { return std::cos(pi * x.x()) * std::cos(pi * x.y()); }

// -div(2 S u) = -lap u for solenoidal u, and lap u = -2 pi^2 u here.
Vec2 mms_force(const Vec2& x) {
  const Vec2 gp(-pi * std::sin(pi * x.x()) * std::cos(pi * x.y()), -pi * std::cos(pi * x.x()) * std::sin(pi * x.y()));
  return 2.0 * pi * pi * mms_u(x) + gp;
}

struct MmsErrors {
  double u = 0.0;
  double p = 0.0;
};

MmsErrors mms_errors(int n, double alpha) {
  const Mesh m = build_rectangle_mesh(0.0, 1.0, 0.0, 1.0, n, n, alpha);
  const Space s(m, SpaceFamily::MixedQ2Q1);
  StokesProblem prob;
  prob.alpha = alpha;
  prob.force = mms_force;
  prob.end_velocity = mms_u;
  prob.tangential_data = [alpha](const Vec2& x) {
    const Vec2 n = x.x() < 0.5 ? Vec2(-1.0, 0.0) : Vec2(1.0, 0.0);
    const Vec2 tau(-n.y(), n.x());
    const Mat2 g = mms_grad(x);
    const Mat2 two_s = g + g.transpose();
    return tau.dot(two_s * n) + alpha * tau.dot(mms_u(x));
  };
  const StokesSolution sol = solve_stokes(s, prob);
  CHECK(sol.momentum_residual < 1e-10);
  return {velocity_l2_error(sol.state, mms_u), pressure_l2_error(sol.state, mms_p)};
}

}  // namespace

TEST_CASE("manufactured solution converges at Taylor-Hood rates") {
  for (double alpha : {0.0, 1.0, 10.0}) {
    CAPTURE(alpha);
    const MmsErrors e4 = mms_errors(4, alpha), e8 = mms_errors(8, alpha), e16 = mms_errors(16, alpha);
    const double ou = std::log2(e8.u / e16.u), op = std::log2(e8.p / e16.p);
    CAPTURE(e16.u);
    CAPTURE(e16.p);
    CHECK(std::log2(e4.u / e8.u) > 2.7);
    CHECK(ou > 2.7);
    CHECK(op > 1.8);
    CHECK(e16.u < 1e-4);
  }
}

TEST_CASE("straight strip reproduces slip Poiseuille flow") {
  DistortedStripDomain strip;
  strip.half_length = 2.5;
  const DomainSpec spec{strip, 1.0};
  const Mesh m = build_strip_mesh(spec, 4);
  const Space s(m, SpaceFamily::MixedQ2Q1);
  // g = (12/7) ((x - x^2)/2 + 1/2) for unit flux through [0, 1] at alpha = 1.
  auto g = [](const Vec2& x) { return Vec2(0.0, 12.0 / 7.0 * ((x.x() - x.x() * x.x()) / 2.0 + 0.5)); };
  StokesProblem prob;
  prob.alpha = 1.0;
  prob.end_velocity = g;
  const StokesSolution sol = solve_stokes(s, prob);
  CHECK(velocity_l2_error(sol.state, g) < 1e-11);
  CHECK(pressure_l2_error(sol.state, [](const Vec2& x) { return -12.0 / 7.0 * x.y(); }) < 1e-10);
  CHECK(sol.mass_residual < 1e-12);
}

TEST_CASE("energy identity on a disk") {
  const Mesh m = build_cross_section_mesh(DomainSpec{DiskDomain{1.0}, 2.0}, 8);
  const Space s(m, SpaceFamily::MixedQ2Q1);
  StokesProblem prob;
  prob.alpha = 2.0;
  prob.force = [](const Vec2& x) { return Vec2(1.0 + x.y(), x.x() * x.x()); };
  const StokesSolution sol = solve_stokes(s, prob);
  const Vector& u = sol.state.values;
  const double lhs = u.dot(assemble_stress_form(s) * u) + u.dot(assemble_slip_boundary_form(s, 2.0) * u);
  const double rhs = u.dot(assemble_velocity_load(s, prob.force));
  CHECK(lhs > 0.0);
  CHECK(std::abs(lhs - rhs) < 1e-12 * std::abs(rhs));
  CHECK(std::abs(pressure_integral(sol.state)) < 1e-12);
  // Tangency: normal components vanish at the rotated wall nodes.
  for (const BoundaryNode& b : m.boundary_nodes())
    if (s.is_rotated(b.node)) CHECK(std::abs(nodal_velocity(sol.state, b.node).dot(b.frame.normal)) < 1e-13);
}

TEST_CASE("frictionless closed domains report the rigid kernel") {
  const Mesh disk = build_cross_section_mesh(DomainSpec{DiskDomain{1.0}, 1.0}, 4);
  CHECK(rigid_kernel_dimension(disk) == 1);
  const Space s(disk, SpaceFamily::MixedQ2Q1);
  StokesProblem prob;
  prob.alpha = 0.0;
  prob.force = [](const Vec2&) { return Vec2(1.0, 0.0); };
  try {
    solve_stokes(s, prob);
    FAIL("expected SolverError");
  } catch (const SolverError& e) {
    CHECK(e.kernel_dimension() == 1);
  }
  std::vector<double> ellipse;
  for (int k = 0; k < 32; ++k) {
    const double t = 2.0 * pi * k / 32;
    ellipse.push_back(1.0 / std::sqrt(std::cos(t) * std::cos(t) + std::sin(t) * std::sin(t) / 4.0));
  }
  const Mesh star = build_cross_section_mesh(DomainSpec{StarShapedDomain{ellipse}, 1.0}, 4);
  CHECK(rigid_kernel_dimension(star) == 0);
  const Mesh square = build_rectangle_mesh(0.0, 1.0, 0.0, 1.0, 2, 2, 0.0);
  CHECK(rigid_kernel_dimension(square) == 0);
}

TEST_CASE("invalid Stokes inputs") {
  const Mesh m = build_rectangle_mesh(0.0, 1.0, 0.0, 1.0, 2, 2);
  const Space v(m, SpaceFamily::VectorQ2);
  CHECK_THROWS_AS(solve_stokes(v, StokesProblem{}), ContractViolation);
  const Space s(m, SpaceFamily::MixedQ2Q1);
  StokesProblem prob;
  prob.alpha = -1.0;
  CHECK_THROWS_AS(solve_stokes(s, prob), ContractViolation);
}
