#include <Eigen/Dense>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "slipflow/constraints.hpp"
#include "slipflow/errors.hpp"
#include "slipflow/forms.hpp"
#include "slipflow/linear_solver.hpp"

using namespace slipflow;

namespace {

double quad_form(const SparseMatrix& m, const Vector& u) { return u.dot(m * u); }

Vector random_vector(int n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = d(rng);
  return v;
}

// Tensor Gauss-Legendre rule with N points per direction over [x0,x1] x [y0,y1].
template <int N = 5, class F>
double integrate_box(double x0, double x1, double y0, double y1, F&& f) {
  using G = boost::math::quadrature::gauss<double, N>;
  return G::integrate([&](double x) { return G::integrate([&](double y) { return f(Vec2(x, y)); }, y0, y1); }, x0,
                      x1);
}

}  // namespace

TEST_CASE("volume quadrature integrates monomials up to degree five exactly") {
  const Mesh m = build_rectangle_mesh(0.0, 1.0, 0.0, 1.0, 3, 2);
  CellQuadrature cq(m);
  for (int a = 0; a <= 5; ++a)
    for (int b = 0; b <= 5; ++b) {
      double total = 0.0;
      for (std::size_t c = 0; c < m.num_cells(); ++c) {
        cq.reinit(static_cast<int>(c));
        for (int q = 0; q < cq.size(); ++q) total += cq.jxw(q) * std::pow(cq[q].x.x(), a) * std::pow(cq[q].x.y(), b);
      }
      CHECK(total == doctest::Approx(1.0 / ((a + 1) * (b + 1))).epsilon(1e-14));
    }
}

TEST_CASE("stress form vanishes on rigid motions and integrates a strain field") {
  const Mesh m = build_rectangle_mesh(0.0, 1.0, 0.0, 1.0, 3, 3);
  const Space v(m, SpaceFamily::VectorQ2);
  const SparseMatrix k = assemble_stress_form(v);
  const Field c = interpolate_velocity(v, [](const Vec2&) { return Vec2(0.3, -1.2); });
  const Field rot = interpolate_velocity(v, [](const Vec2& x) { return Vec2(-x.y(), x.x()); });
  const Field strain = interpolate_velocity(v, [](const Vec2& x) { return Vec2(x.x(), -x.y()); });
  CHECK(std::abs(quad_form(k, c.values)) < 1e-13);
  CHECK(std::abs(quad_form(k, rot.values)) < 1e-13);
  CHECK(quad_form(k, strain.values) == doctest::Approx(4.0).epsilon(1e-13));
  CHECK((SparseMatrix(k.transpose()) - k).norm() < 1e-13);
}

TEST_CASE("stress form kernel on an unconstrained mesh is the rigid motions") {
  const Mesh m = build_rectangle_mesh(0.0, 1.0, 0.0, 1.0, 2, 2);
  const Space v(m, SpaceFamily::VectorQ2);
  const Eigen::MatrixXd k = Eigen::MatrixXd(assemble_stress_form(v));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(k);
  const auto ev = es.eigenvalues();
  int zeros = 0;
  for (int i = 0; i < ev.size(); ++i) {
    CHECK(ev[i] > -1e-12);
    if (std::abs(ev[i]) < 1e-10) ++zeros;
  }
  CHECK(zeros == 3);
}

TEST_CASE("slip boundary form acts on tangential traces only") {
  const Mesh m = build_rectangle_mesh(0.0, 1.0, -2.0, 2.0, 2, 6);
  const Space v(m, SpaceFamily::VectorQ2);
  const SparseMatrix s = assemble_slip_boundary_form(v, 1.0);
  const Field normal = interpolate_velocity(v, [](const Vec2& x) { return Vec2(1.0 + x.y() * x.y(), 0.0); });
  const Field tangential = interpolate_velocity(v, [](const Vec2&) { return Vec2(0.0, 1.0); });
  CHECK(std::abs(quad_form(s, normal.values)) < 1e-14);
  CHECK(quad_form(s, tangential.values) == doctest::Approx(2.0 * 4.0).epsilon(1e-13));
  CHECK(assemble_slip_boundary_form(v, 0.0).nonZeros() == 0);
  const Mesh disk = build_cross_section_mesh(DomainSpec{DiskDomain{1.0}, 1.0}, 4);
  const Space sd(disk, SpaceFamily::ScalarQ2);
  CHECK_THROWS_AS((void)assemble_slip_boundary_form(sd, 1.0), ContractViolation);
}

TEST_CASE("convection form") {
  const Mesh m = build_rectangle_mesh(0.0, 1.0, 0.0, 1.0, 3, 3);
  const Space v(m, SpaceFamily::VectorQ2);
  SUBCASE("zero advection") {
    const Field zero(v);
    CHECK(assemble_convection(v, zero).norm() == 0.0);
  }
  SUBCASE("skew-symmetry for a solenoidal field tangent to the boundary") {
    const Field b = interpolate_velocity(v, [](const Vec2& x) {
      return Vec2(x.x() * (1 - x.x()) * (1 - 2 * x.y()), -(1 - 2 * x.x()) * x.y() * (1 - x.y()));
    });
    const Field u = interpolate_velocity(v, [](const Vec2& x) { return Vec2(x.x() + 2 * x.y(), x.x() * x.y() - 1.0); });
    const double value = quad_form(assemble_convection(v, b), u.values);
    CHECK(std::abs(value) <= 1e-10 * u.values.squaredNorm());
  }
  SUBCASE("axial advection of a linear profile") {
    const Field b = interpolate_velocity(v, [](const Vec2&) { return Vec2(0.0, 1.0); });
    const Field u = interpolate_velocity(v, [](const Vec2& x) { return Vec2(0.0, x.y()); });
    CHECK(quad_form(assemble_convection(v, b), u.values) == doctest::Approx(0.5).epsilon(1e-13));
  }
  SUBCASE("mismatched meshes are rejected") {
    const Mesh other = build_rectangle_mesh(0.0, 1.0, 0.0, 1.0, 2, 2);
    const Space vo(other, SpaceFamily::VectorQ2);
    CHECK_THROWS_AS((void)assemble_convection(v, Field(vo)), ContractViolation);
  }
}

TEST_CASE("divergence coupling") {
  const Mesh m = build_rectangle_mesh(0.0, 2.0, -1.0, 1.0, 3, 4);
  const Space s(m, SpaceFamily::MixedQ2Q1);
  const SparseMatrix b = assemble_divergence_coupling(s);
  const Field rot = interpolate_velocity(s, [](const Vec2& x) { return Vec2(-x.y(), x.x()); });
  CHECK((b * rot.values).norm() < 1e-13);
  const Field stretch = interpolate_velocity(s, [](const Vec2& x) { return Vec2(x.x(), 0.0); });
  CHECK((b * stretch.values - pressure_mean_vector(s)).norm() < 1e-13);
  // u = curl psi, psi = x^3 + x^2 y + x y^2 - y^3
  const Field curl = interpolate_velocity(s, [](const Vec2& x) {
    const double X = x.x(), Y = x.y();
    return Vec2(X * X + 2 * X * Y - 3 * Y * Y, -(3 * X * X + 2 * X * Y + Y * Y));
  });
  CHECK((b * curl.values).norm() < 1e-12);
}

TEST_CASE("assembled forms agree with an independent quadrature on two cells") {
  const Mesh m = build_rectangle_mesh(0.0, 2.0, 0.0, 1.0, 2, 1);
  const Space v(m, SpaceFamily::VectorQ2);
  const Vector coeffs = random_vector(v.num_dofs(), 7);
  const Field u(v, coeffs);
  const Field adv(v, random_vector(v.num_dofs(), 8));
  auto sample = [&](const Field& f, const Vec2& x) {
    const int cell = x.x() < 1.0 ? 0 : 1;
    const Vec2 ref(x.x() - cell, x.y());
    return eval_velocity(f, cell, ref);
  };
  auto over_cells = [&](auto&& integrand) {
    return integrate_box(0.0, 1.0, 0.0, 1.0, integrand) + integrate_box(1.0, 2.0, 0.0, 1.0, integrand);
  };
  auto over_cells_3 = [&](auto&& integrand) {
    return integrate_box<3>(0.0, 1.0, 0.0, 1.0, integrand) + integrate_box<3>(1.0, 2.0, 0.0, 1.0, integrand);
  };
  const double stress = over_cells([&](const Vec2& x) {
    const Mat2 g = sample(u, x).grad;
    const Mat2 s = 0.5 * (g + g.transpose());
    return 2.0 * s.squaredNorm();
  });
  CHECK(quad_form(assemble_stress_form(v), coeffs) == doctest::Approx(stress).epsilon(1e-12));
  const double mass = over_cells([&](const Vec2& x) { return sample(u, x).value.squaredNorm(); });
  CHECK(quad_form(assemble_velocity_mass(v), coeffs) == doctest::Approx(mass).epsilon(1e-12));
  const double conv = over_cells_3([&](const Vec2& x) {
    const VectorSample s = sample(u, x);
    return (s.grad * sample(adv, x).value).dot(s.value);
  });
  // The convection integrand exceeds degree five; compare against the same three-point rule.
  CHECK(quad_form(assemble_convection(v, adv), coeffs) == doctest::Approx(conv).epsilon(1e-12));
}

TEST_CASE("normal constraint on straight and curved walls") {
  SUBCASE("straight strip fixes the transverse component") {
    DistortedStripDomain st;
    const Mesh m = build_strip_mesh(DomainSpec{st, 1.0}, 4);
    const Space v(m, SpaceFamily::VectorQ2);
    ConstraintRecord rec = make_rotated_record(v);
    constrain_wall_normals(rec, v);
    for (int node = 0; node < v.num_nodes(); ++node) {
      if (!v.is_rotated(node)) continue;
      const Mat2 r = v.rotation(node);
      CHECK(std::abs(std::abs(r(0, 0)) - 1.0) < 1e-15);
      CHECK(rec.fixed[v.velocity_dof(node, 0)]);
      CHECK(!rec.fixed[v.velocity_dof(node, 1)]);
    }
  }
  SUBCASE("bump wall: solved field is impermeable and frames are orthogonal") {
    DistortedStripDomain st;
    st.upper = WallFunction::bump(1.0, 0.3, 1.0);
    const Mesh m = build_strip_mesh(DomainSpec{st, 1.0}, 4);
    const Space v(m, SpaceFamily::VectorQ2);
    AssembledSystem sys;
    sys.matrix = assemble_stress_form(v) + assemble_velocity_mass(v) + assemble_slip_boundary_form(v, 1.0);
    sys.rhs = assemble_velocity_load(v, [](const Vec2& x) { return Vec2(1.0 + x.y(), x.x()); });
    const AssembledSystem red = apply_normal_constraint(sys, v);
    CHECK(red.matrix.rows() == red.constraints.num_free());
    const Field u(v, expand(red.constraints, solve_sparse(red.matrix, red.rhs)));
    double worst = 0.0, ortho = 0.0;
    for (const BoundaryNode& b : m.boundary_nodes()) {
      if (!v.is_rotated(b.node)) continue;
      worst = std::max(worst, std::abs(nodal_velocity(u, b.node).dot(b.frame.normal)));
      const Mat2 r = v.rotation(b.node);
      ortho = std::max(ortho, (r.transpose() * r - Mat2::Identity()).norm());
    }
    CHECK(worst <= 1e-12);
    CHECK(ortho <= 1e-12);
    CHECK(velocity_l2(u) > 0.0);
  }
  SUBCASE("disk: constrained direction is radial") {
    const Mesh m = build_cross_section_mesh(DomainSpec{DiskDomain{1.0}, 1.0}, 4);
    const Space v(m, SpaceFamily::VectorQ2);
    for (const BoundaryNode& b : m.boundary_nodes()) {
      const Vec2 x = m.nodes()[b.node];
      CHECK((v.rotation(b.node).col(0) - x / x.norm()).norm() < 1e-12);
    }
  }
}

TEST_CASE("triplet dump lists every nonzero") {
  const Mesh m = build_rectangle_mesh(0.0, 1.0, 0.0, 1.0, 1, 1);
  const Space s(m, SpaceFamily::ScalarQ1);
  const SparseMatrix k = assemble_scalar_stiffness(s);
  std::ostringstream os;
  write_triplets(os, k);
  std::istringstream is(os.str());
  int rows = 0, cols = 0, nnz = 0;
  is >> rows >> cols >> nnz;
  CHECK(rows == 4);
  CHECK(nnz == k.nonZeros());
  SparseMatrix back(rows, cols);
  std::vector<Triplet> t;
  for (int i = 0; i < nnz; ++i) {
    int r = 0, c = 0;
    double v = 0.0;
    is >> r >> c >> v;
    t.emplace_back(r, c, v);
  }
  back.setFromTriplets(t.begin(), t.end());
  CHECK((back - k).norm() == 0.0);
}
