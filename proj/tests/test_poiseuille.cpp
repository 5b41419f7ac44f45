#include <cmath>
#include <numbers>

#include "doctest.h"
#include "slipflow/errors.hpp"
#include "slipflow/poiseuille.hpp"

using namespace slipflow;

namespace {

const double pi = std::numbers::pi;

DomainSpec interval(double alpha = 1.0) { return DomainSpec{IntervalDomain{1.0}, alpha}; }
DomainSpec disk(double alpha = 1.0) { return DomainSpec{DiskDomain{1.0}, alpha}; }

// Radial Robin problem (r phi')' = -r, phi'(0) = 0, phi'(1) + alpha phi(1) = 0, by shooting
// on the unknown centre value with a fourth-order Runge-Kutta march.
double shooting_centre_value(double alpha) {
  auto robin_residual = [alpha](double centre) {
    const int steps = 4000;
    const double h = 1.0 / steps;
    double r = 1e-8, y = centre, dy = -r / 2.0;
    auto f = [](double rr, double yy, double dd) {
      (void)yy;
      return std::pair<double, double>{dd, -1.0 - dd / rr};
    };
    for (int k = 0; k < steps; ++k) {
      const double hh = (k == 0) ? h - 1e-8 : h;
      auto [a1, b1] = f(r, y, dy);
      auto [a2, b2] = f(r + hh / 2, y + hh / 2 * a1, dy + hh / 2 * b1);
      auto [a3, b3] = f(r + hh / 2, y + hh / 2 * a2, dy + hh / 2 * b2);
      auto [a4, b4] = f(r + hh, y + hh * a3, dy + hh * b3);
      y += hh / 6 * (a1 + 2 * a2 + 2 * a3 + a4);
      dy += hh / 6 * (b1 + 2 * b2 + 2 * b3 + b4);
      r += hh;
    }
    return dy + alpha * y;
  };
  const double r0 = robin_residual(0.0), r1 = robin_residual(1.0);
  return -r0 / (r1 - r0);
}

double disk_profile_closed_form(double alpha, double flux, double r) {
  return 2.0 * (alpha + 2.0) * flux / ((alpha + 4.0) * pi) * (1.0 - alpha * r * r / (alpha + 2.0));
}

int centre_node(const Mesh& m) {
  for (std::size_t i = 0; i < m.num_nodes(); ++i)
    if (m.nodes()[i].norm() < 1e-14) return static_cast<int>(i);
  return -1;
}

}  // namespace

TEST_CASE("interval Robin problem is solved exactly") {
  const Mesh m = build_cross_section_mesh(interval(), 8);
  const Space s(m, SpaceFamily::ScalarQ2);
  const Field phi = solve_robin_poisson(s, 1.0);
  for (std::size_t i = 0; i < m.num_nodes(); ++i) {
    const double x = m.nodes()[i].x();
    CHECK(phi.values[static_cast<int>(i)] == doctest::Approx((x - x * x) / 2 + 0.5).epsilon(1e-13));
  }
  CHECK(phi.values[8] == doctest::Approx(5.0 / 8.0).epsilon(1e-14));
  const FluxConstant cp = flux_constant(phi, 1.0);
  CHECK(cp.value == doctest::Approx(7.0 / 12.0).epsilon(1e-13));
  CHECK(cp.consistent);
}

TEST_CASE("strip Poiseuille profile reproduces the two-dimensional closed form") {
  const PoiseuilleProfile p = poiseuille_profile(interval(), 8, 1.0);
  CHECK(std::abs(p.value_at(0.5) - 15.0 / 14.0) <= 1e-12);
  CHECK(std::abs(p.value_at(0.0) - 6.0 / 7.0) <= 1e-12);
  CHECK(std::abs(p.value_at(1.0) - 6.0 / 7.0) <= 1e-12);
  CHECK(std::abs(p.integral() - 1.0) <= 1e-12);
  CHECK(p.pressure_gradient == doctest::Approx(-12.0 / 7.0).epsilon(1e-13));
  const ClosedFormPoiseuille exact = closed_form_reference(interval(), 1.0);
  // Robin residual g'(0) - alpha g(0) of the exact quadratic; the one-sided stencil is exact for quadratics.
  auto g = [&](double x) { return exact.profile(Vec2(x, 0.0)); };
  const double slope0 = (-3.0 * g(0.0) + 4.0 * g(0.25) - g(0.5)) / 0.5;
  CHECK(std::abs(slope0 - 1.0 * g(0.0)) < 1e-13);
  // No-slip limit.
  const ClosedFormPoiseuille stiff = closed_form_reference(interval(1e12), 1.0);
  CHECK(stiff.profile(Vec2(0.5, 0.0)) == doctest::Approx(1.5).epsilon(1e-9));
}

TEST_CASE("disk Robin problem against a shooting oracle and the closed form") {
  const double centre = shooting_centre_value(1.0);
  CHECK(centre == doctest::Approx(0.75).epsilon(1e-8));
  const Mesh m = build_cross_section_mesh(disk(), 16);
  const Space s(m, SpaceFamily::ScalarQ2);
  const Field phi = solve_robin_poisson(s, 1.0);
  const int c = centre_node(m);
  REQUIRE(c >= 0);
  CHECK(std::abs(phi.values[c] - centre) < 1e-4);
  const FluxConstant cp = flux_constant(phi, 1.0);
  CHECK(cp.value == doctest::Approx(5.0 * pi / 8.0).epsilon(1e-5));
  CHECK(cp.relative_gap <= 1e-10);
}

TEST_CASE("disk Poiseuille values at alpha = 1, flux = 1") {
  CHECK(disk_profile_closed_form(1.0, 1.0, 0.0) == doctest::Approx(6.0 / (5.0 * pi)).epsilon(1e-15));
  CHECK(disk_profile_closed_form(1.0, 1.0, 1.0) == doctest::Approx(4.0 / (5.0 * pi)).epsilon(1e-15));
  const ClosedFormPoiseuille exact = closed_form_reference(disk(), 1.0);
  for (double r : {0.0, 0.3, 0.7, 1.0})
    CHECK(exact.profile(Vec2(r, 0.0)) == doctest::Approx(disk_profile_closed_form(1.0, 1.0, r)).epsilon(1e-14));
  CHECK(exact.pressure_gradient == doctest::Approx(-8.0 / (5.0 * pi)).epsilon(1e-14));
  const PoiseuilleProfile p = poiseuille_profile(disk(), 32, 1.0);
  const int c = centre_node(*p.mesh);
  CHECK(p.profile.values[c] == doctest::Approx(6.0 / (5.0 * pi)).epsilon(1e-5));
  CHECK(p.pressure_gradient == doctest::Approx(-8.0 / (5.0 * pi)).epsilon(1e-5));
  CHECK(std::abs(p.integral() - 1.0) <= 1e-10);
}

TEST_CASE("disk profile error converges at order 2.5 or better") {
  const ClosedFormPoiseuille exact = closed_form_reference(disk(), 1.0);
  double prev = 0.0;
  for (int res : {8, 16, 32}) {
    const PoiseuilleProfile p = poiseuille_profile(disk(), res, 1.0);
    const double err = scalar_l2_error(p.profile, exact.profile);
    if (prev > 0.0) CHECK(std::log2(prev / err) >= 2.5);
    prev = err;
  }
}

TEST_CASE("large friction approaches the no-slip profile") {
  const PoiseuilleProfile p = poiseuille_profile(disk(1e6), 16, 1.0);
  const double err = scalar_l2_error(p.phi, [](const Vec2& x) { return 0.25 * (1.0 - x.squaredNorm()); });
  CHECK(err < 1e-5);
}

TEST_CASE("profile invariants") {
  SUBCASE("flux constant decreases with friction") {
    double prev = 1e300;
    for (double alpha : {0.1, 1.0, 10.0, 100.0}) {
      const PoiseuilleProfile p = poiseuille_profile(disk(alpha), 8, 1.0);
      CHECK(p.flux_constant.value < prev);
      CHECK(p.flux_constant.value > 0.0);
      CHECK(p.flux_constant.relative_gap <= 1e-10);
      prev = p.flux_constant.value;
    }
  }
  SUBCASE("positivity and exact flux") {
    for (int res : {4, 8, 16}) {
      const PoiseuilleProfile p = poiseuille_profile(disk(), res, 0.7);
      CHECK(std::abs(p.integral() - 0.7) <= 1e-10 * 0.7);
      CHECK(p.profile.values.minCoeff() > 0.0);
    }
  }
  SUBCASE("zero flux gives the zero profile") {
    const PoiseuilleProfile p = poiseuille_profile(interval(), 8, 0.0);
    CHECK(p.profile.values.cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("H1 norm is linear in the flux") {
    const double a = poiseuille_profile(disk(), 8, 1e-3).h1_norm();
    const double b = poiseuille_profile(disk(), 8, 1e-1).h1_norm();
    CHECK(b / a == doctest::Approx(100.0).epsilon(1e-12));
  }
  SUBCASE("star-shaped cross-section satisfies the energy identity") {
    std::vector<double> r;
    for (int k = 0; k < 12; ++k) r.push_back(1.0 + 0.2 * std::sin(2.0 * pi * 2 * k / 12));
    const PoiseuilleProfile p = poiseuille_profile(DomainSpec{StarShapedDomain{r}, 2.0}, 8, 1.0);
    CHECK(p.flux_constant.relative_gap <= 1e-10);
  }
}

TEST_CASE("invalid inputs are rejected") {
  const Mesh m = build_cross_section_mesh(interval(), 4);
  const Space s(m, SpaceFamily::ScalarQ2);
  CHECK_THROWS_AS((void)solve_robin_poisson(s, 0.0), ContractViolation);
  CHECK_THROWS_AS((void)poiseuille_profile(interval(), 4, -1.0), ContractViolation);
  std::vector<double> r(8, 1.0);
  CHECK_THROWS_AS((void)closed_form_reference(DomainSpec{StarShapedDomain{r}, 1.0}, 1.0), ContractViolation);
}
