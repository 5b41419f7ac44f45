#include <cmath>
#include <numbers>

#include "doctest.h"
#include "slipflow/diagnostics.hpp"
#include "slipflow/errors.hpp"
#include "slipflow/poiseuille.hpp"

using namespace slipflow;
using std::numbers::pi;

namespace {

DomainSpec straight_strip(double zeta, double alpha = 1.0) {
  DistortedStripDomain s;
  s.half_length = zeta;
  s.distortion_half_length = 1.0;
  return DomainSpec{s, alpha};
}

DomainSpec disk(double alpha = 1.0) { return DomainSpec{DiskDomain{1.0}, alpha}; }

double strip_poiseuille(double x1, double alpha) {
  return 6.0 * alpha / (6.0 + alpha) * (x1 - x1 * x1) + 6.0 / (6.0 + alpha);
}

}  // namespace

TEST_CASE("station flux") {
  const Mesh mesh = build_strip_mesh(straight_strip(3.0), 4);
  const Space space(mesh, SpaceFamily::VectorQ2);
  const Field g = interpolate_velocity(space, [](const Vec2& x) { return Vec2(0.0, strip_poiseuille(x.x(), 1.0)); });
  const FluxProfile fp = flux_profile(g, 1.0);
  CHECK(fp.stations.size() == 3u * 24u);
  CHECK(fp.max_drift <= 1e-12);
  CHECK(fp.fluxes.front() == doctest::Approx(1.0).epsilon(1e-13));
  // Mean reference by default.
  CHECK(flux_profile(g).reference == doctest::Approx(1.0).epsilon(1e-13));

  const Mesh dm = build_cross_section_mesh(disk(), 4);
  const Space ds(dm, SpaceFamily::VectorQ2);
  CHECK_THROWS_AS(flux_profile(Field(ds)), ContractViolation);
}

TEST_CASE("Payne identity residual") {
  const Mesh mesh = build_cross_section_mesh(disk(), 8);
  const Space space(mesh, SpaceFamily::VectorQ2);
  const Vec2 c = centroid(mesh);
  CHECK(c.norm() < 1e-12);
  CHECK(payne_residual(Field(space), c) == 0.0);

  // Rigid rotation and swirl: the integrand vanishes pointwise.
  const Field rot = interpolate_velocity(space, [](const Vec2& x) { return Vec2(-x.y(), x.x()); });
  CHECK(payne_residual(rot, c) <= 1e-10);
  const auto swirl = [](const Vec2& x) {
    const double g = 1.0 + x.squaredNorm();
    VectorSample s;
    s.value = g * Vec2(-x.y(), x.x());
    // d/dx_j of g(r) (-y, x): g' terms from dg/dx = 2x, dg/dy = 2y.
    s.grad << -2.0 * x.x() * x.y(), -g - 2.0 * x.y() * x.y(), g + 2.0 * x.x() * x.x(), 2.0 * x.x() * x.y();
    return s;
  };
  CHECK(payne_residual(mesh, swirl, c) <= 1e-10);

  // Curl of psi = (1 - r^2)(1 + x): tangential on the circle, residual shrinks with h.
  double prev = 0.0;
  for (int res : {4, 8, 16}) {
    const Mesh m = build_cross_section_mesh(disk(), res);
    const Space s(m, SpaceFamily::VectorQ2);
    const Field f = interpolate_velocity(s, [](const Vec2& x) {
      const double r2 = x.squaredNorm();
      return Vec2(-2.0 * x.y() * (1.0 + x.x()), 2.0 * x.x() * (1.0 + x.x()) - (1.0 - r2));
    });
    const double r = payne_residual(f, centroid(m));
    if (res > 4) CHECK(r < 0.25 * prev);
    prev = r;
  }

  const Field radial = interpolate_velocity(space, [](const Vec2& x) { return x; });
  CHECK_THROWS_AS(payne_residual(radial, c), ContractViolation);
}

TEST_CASE("Poincare ratios") {
  const Mesh mesh = build_strip_mesh(straight_strip(3.0), 8);
  const Space space(mesh, SpaceFamily::VectorQ2);
  const Field s = interpolate_velocity(space, [](const Vec2& x) { return Vec2(0.0, std::sin(pi * x.x())); });
  CHECK(std::abs(poincare_ratio(s, PoincareMode::Transverse).ratio - 1.0 / pi) <= 1e-3);
  // sin has nonzero mean over the section.
  CHECK_THROWS_AS(poincare_ratio(s, PoincareMode::FluxSubtracted), ContractViolation);
  CHECK_THROWS_AS(poincare_ratio(s, PoincareMode::Truncated), ContractViolation);

  const Field c = interpolate_velocity(space, [](const Vec2& x) { return Vec2(0.0, std::cos(pi * x.x())); });
  const PoincareResult r = poincare_ratio(c, PoincareMode::FluxSubtracted);
  CHECK(std::abs(r.ratio - 1.0 / pi) <= 1e-3);
  CHECK(r.violation <= 1e-8);
  CHECK(std::abs(poincare_ratio(c, PoincareMode::Truncated).ratio - 1.0 / pi) <= 1e-3);

  const Field leak = interpolate_velocity(space, [](const Vec2& x) { return Vec2(1.0, std::cos(pi * x.x())); });
  CHECK_THROWS_AS(poincare_ratio(leak, PoincareMode::Transverse), ContractViolation);
  CHECK(to_string(PoincareMode::FluxSubtracted) == std::string("flux-subtracted"));
}

TEST_CASE("Korn combined ratio") {
  // Rigid rotation on the unit disk: S u = 0, int |grad u|^2 = 2 pi, int_wall |u_t|^2 = 2 pi.
  // The isoparametric boundary perturbs both integrals at fourth order.
  for (double alpha : {0.5, 1.0, 2.5}) {
    double prev = 0.0;
    for (int res : {8, 16}) {
      const Mesh mesh = build_cross_section_mesh(disk(alpha), res);
      const Space space(mesh, SpaceFamily::VectorQ2);
      const Field rot = interpolate_velocity(space, [](const Vec2& x) { return Vec2(-x.y(), x.x()); });
      const double err = std::abs(korn_combined_ratio(rot, alpha) - alpha) / alpha;
      CHECK(err <= 1e-4);
      if (res > 8) CHECK(err < prev / 8.0);
      prev = err;
    }
  }
  // u = (x1, -x2) on the unit square: 2 int |S u|^2 = 4, int |grad u|^2 = 2.
  const Mesh sq = build_rectangle_mesh(0.0, 1.0, 0.0, 1.0, 3, 3);
  const Space ss(sq, SpaceFamily::VectorQ2);
  const Field strain = interpolate_velocity(ss, [](const Vec2& x) { return Vec2(x.x(), -x.y()); });
  CHECK(korn_combined_ratio(strain, 0.0) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("curvilinear slip residual") {
  const Mesh mesh = build_strip_mesh(straight_strip(2.5), 4);
  const Space space(mesh, SpaceFamily::VectorQ2);
  const Field g = interpolate_velocity(space, [](const Vec2& x) { return Vec2(0.0, strip_poiseuille(x.x(), 1.0)); });
  const SlipResidual r = slip_residual_curvilinear(g, 1.0);
  CHECK(r.l2 <= 1e-12);
  CHECK(r.normal_l2 <= 1e-12);
  CHECK(r.nodal_normal_max == 0.0);

  // Rigid rotation on the unit disk: d_n u_t = 1, u_t = |x|, kappa = 1, so the residual is
  // 1 + (alpha - 1) |x|, i.e. alpha up to the distance of the facet points from the circle.
  for (int res : {8, 16}) {
    const Mesh dm = build_cross_section_mesh(disk(2.0), res);
    const Space ds(dm, SpaceFamily::VectorQ2);
    const Field rot = interpolate_velocity(ds, [](const Vec2& x) { return Vec2(-x.y(), x.x()); });
    const SlipResidual d = slip_residual_curvilinear(rot, 2.0);
    REQUIRE(!d.residual.empty());
    for (std::size_t k = 0; k < d.residual.size(); ++k) CHECK(d.residual[k] == doctest::Approx(1.0 + d.points[k].norm()).epsilon(1e-12));
    CHECK(slip_residual_curvilinear(rot, 0.0).max_abs <= 1e-4);
  }

  // Axial disk Poiseuille: Robin residual of order h^2 or better.
  double prev = 0.0;
  for (int res : {8, 16, 32}) {
    const PoiseuilleProfile p = poiseuille_profile(disk(), res, 1.0);
    const double rr = robin_residual(p.profile, 1.0);
    if (res > 8) CHECK(std::log2(prev / rr) > 1.5);
    prev = rr;
  }
}

TEST_CASE("decay fit") {
  const Mesh mesh = build_strip_mesh(straight_strip(10.0), 8);
  const Space space(mesh, SpaceFamily::VectorQ2);
  const std::vector<double> stations{3.5, 4.0, 4.5, 5.0};

  const DecayFit zero = decay_fit(Field(space), stations);
  CHECK(zero.void_fit);
  CHECK(zero.dropped.size() == 4u);
  CHECK(zero.pointwise_void);

  // grad v ~ exp(-0.7 x2): G decays at twice the rate.
  const Field v = interpolate_velocity(space, [](const Vec2& x) { return Vec2(0.0, std::exp(-0.7 * x.y())); });
  const DecayFit f = decay_fit(v, stations);
  REQUIRE_FALSE(f.void_fit);
  CHECK(std::abs(f.sigma - 1.4) <= 0.01 * 1.4);
  CHECK(f.r2 >= 0.9999);
  CHECK(std::abs(f.pointwise_sigma - 0.7) <= 0.01 * 0.7);
  const Field w = interpolate_velocity(space, [](const Vec2& x) { return Vec2(0.0, std::exp(0.7 * x.y())); });
  CHECK(std::abs(decay_fit(w, stations, Outlet::Left).sigma - 1.4) <= 0.01 * 1.4);

  // G(s) against the closed form 0.35 (exp(-1.4 s) - exp(-14)) on the unit-width outlet.
  CHECK(tail_energy(v, 4.0) == doctest::Approx(0.35 * (std::exp(-5.6) - std::exp(-14.0))).epsilon(1e-4));

  CHECK_THROWS_AS(decay_fit(v, {3.5, 4.0, 4.5}), ContractViolation);
  CHECK_THROWS_AS(decay_fit(v, {1.5, 4.0, 4.5, 5.0}), ContractViolation);
  CHECK_THROWS_AS(decay_fit(v, {3.5, 4.5, 4.0, 5.0}), ContractViolation);
  CHECK_THROWS_AS(decay_fit(v, {3.5, 4.0, 4.5, 9.5}), ContractViolation);

  const LineFit lf = fit_line({0.0, 1.0, 2.0}, {1.0, 3.0, 5.0});
  CHECK(lf.slope == doctest::Approx(2.0));
  CHECK(lf.intercept == doctest::Approx(1.0));
  CHECK(lf.r2 == doctest::Approx(1.0));
}

TEST_CASE("energy linearity and Newton ratio test") {
  const Mesh mesh = build_strip_mesh(straight_strip(3.0), 2);
  const Space space(mesh, SpaceFamily::MixedQ2Q1);
  const Field shape = interpolate_velocity(space, [](const Vec2& x) { return Vec2(x.x(), x.y()); });
  std::vector<NSSolution> sols;
  for (double flux : {1e-2, 1e-3, 1e-1}) {
    NSSolution s;
    s.flux = flux;
    s.converged = true;
    // Quadratic correction of relative size flux.
    s.deficit = Field(space, flux * (1.0 + flux) * shape.values);
    sols.push_back(s);
  }
  const EnergyLinearity e = energy_linearity(sols);
  REQUIRE(e.rows.size() == 3u);
  CHECK(e.rows[0].flux == 1e-3);
  CHECK(e.small_flux_deviation == doctest::Approx((1.01 - 1.001) / 1.001).epsilon(1e-9));
  CHECK(e.max_deviation == doctest::Approx((1.1 - 1.001) / 1.001).epsilon(1e-9));

  for (NSSolution& s : sols) s.deficit = Field(space);
  CHECK(energy_linearity(sols).max_deviation == 0.0);
  sols.resize(1);
  CHECK_THROWS_AS(energy_linearity(sols), ContractViolation);

  const auto hist = [](std::initializer_list<std::pair<const char*, double>> l) {
    std::vector<NSIteration> h;
    for (auto [k, r] : l) h.push_back(NSIteration{k, r, 0.0, 1.0});
    return h;
  };
  CHECK(newton_quadratic(hist({{"picard", 1e-2}, {"newton", 1e-5}, {"newton", 1e-11}})));
  CHECK(newton_quadratic(hist({{"picard", 1e-1}, {"newton", 1e-2}, {"newton", 1e-4}, {"newton", 1e-9}})));
  CHECK_FALSE(newton_quadratic(hist({{"picard", 1e-2}, {"newton", 1e-3}, {"newton", 1e-4}})));
  CHECK_FALSE(newton_quadratic(hist({{"picard", 1e-2}, {"newton", 1e-5}})));
}

TEST_CASE("truncation comparison on nested strips") {
  const Mesh a = build_strip_mesh(straight_strip(3.0), 4);
  const Mesh b = build_strip_mesh(straight_strip(6.0), 4);
  const Space sa(a, SpaceFamily::VectorQ2), sb(b, SpaceFamily::VectorQ2);
  const auto f = [](const Vec2& x) { return Vec2(x.x() * x.y(), x.y()); };
  const Field fa = interpolate_velocity(sa, f), fb = interpolate_velocity(sb, f);
  CHECK(subdomain_h1_distance(fa, fb, 2.0) <= 1e-13);
  const Field gb = interpolate_velocity(sb, [&](const Vec2& x) -> Vec2 { return f(x) + Vec2(0.0, 1.0); });
  CHECK(subdomain_h1_distance(fa, gb, 2.0) == doctest::Approx(2.0).epsilon(1e-12));
  const Mesh c = build_strip_mesh(straight_strip(6.0), 3);
  const Space sc(c, SpaceFamily::VectorQ2);
  CHECK_THROWS_AS(subdomain_h1_distance(fa, Field(sc), 2.0), ContractViolation);
}

TEST_CASE("report") {
  Report r;
  r.environment = {{"resolution", "8"}, {"alpha", "1"}};
  r.checks.push_back(make_check("a", 1e-12, "<=", 1e-10, "field"));
  r.checks.push_back(make_check("b", 0.5, ">=", 1e-3, "field"));
  CHECK(r.passed());
  r.checks.push_back(make_check("c", std::nan(""), "<=", 1.0, "field"));
  CHECK_FALSE(r.passed());
  CHECK(r.find("b")->passed);
  CHECK(r.find("missing") == nullptr);
  const std::string t = r.to_text();
  CHECK(t.find("FAIL") != std::string::npos);
  CHECK(t.find("resolution") != std::string::npos);
  CHECK_THROWS_AS(make_check("d", 1.0, "<", 1.0, ""), ContractViolation);
}
