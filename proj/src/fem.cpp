#include "slipflow/fem.hpp"

#include <cmath>

#include "slipflow/basis.hpp"
#include "slipflow/errors.hpp"

namespace slipflow {

Space::Space(const Mesh& mesh, SpaceFamily family) : mesh_(&mesh), family_(family) {
  corner_index_.assign(mesh.num_nodes(), -1);
  const auto& corners = mesh.corner_nodes();
  for (std::size_t k = 0; k < corners.size(); ++k) corner_index_[corners[k]] = static_cast<int>(k);
  if (has_velocity() && mesh.dim() != 2) throw ContractViolation("vector spaces need a two-dimensional mesh");
  switch (family) {
    case SpaceFamily::ScalarQ1: num_dofs_ = num_corners(); break;
    case SpaceFamily::ScalarQ2: num_dofs_ = num_nodes(); break;
    case SpaceFamily::VectorQ2: num_dofs_ = 2 * num_nodes(); break;
    case SpaceFamily::MixedQ2Q1: num_dofs_ = 2 * num_nodes() + num_corners(); break;
  }
}

std::array<int, 4> Space::cell_corner_dofs(int cell) const {
  const auto c = mesh_->cell(cell);
  std::array<int, 4> out{-1, -1, -1, -1};
  const int offset = has_pressure() ? num_velocity_dofs() : 0;
  if (mesh_->dim() == 1) {
    out[0] = offset + corner_index_[c[0]];
    out[1] = offset + corner_index_[c[2]];
    return out;
  }
  for (int k = 0; k < 4; ++k) out[k] = offset + corner_index_[c[basis::kCornerNodes[k]]];
  return out;
}

bool Space::is_rotated(int node) const {
  const BoundaryNode* b = mesh_->boundary_node(node);
  return b && b->on_wall && !b->on_end && mesh_->has_wall_geometry();
}

Mat2 Space::rotation(int node) const {
  if (!is_rotated(node)) return Mat2::Identity();
  const BoundaryNode* b = mesh_->boundary_node(node);
  Mat2 r;
  r.col(0) = b->frame.normal;
  r.col(1) = b->frame.tangent;
  return r;
}

PointBasis basis_at(const Mesh& mesh, int cell, const Vec2& ref) {
  PointBasis p;
  const MapEval m = mesh.map(cell, ref);
  p.x = m.x;
  p.det = m.det;
  p.jac = m.jac;
  p.inv = m.inv;
  if (mesh.dim() == 1) {
    const auto l = basis::q2_1d(ref.x());
    const auto d = basis::q2_1d_d1(ref.x());
    for (int i = 0; i < 3; ++i) {
      p.phi[i] = l[i];
      p.dphi[i] = Vec2(d[i] / m.det, 0.0);
    }
    const auto l1 = basis::q1_1d(ref.x());
    constexpr auto d1 = basis::q1_1d_d1();
    for (int i = 0; i < 2; ++i) {
      p.psi[i] = l1[i];
      p.dpsi[i] = Vec2(d1[i] / m.det, 0.0);
    }
    return p;
  }
  const auto v = basis::q2_2d(ref);
  const Mat2 inv_t = m.inv.transpose();
  for (int k = 0; k < 9; ++k) {
    p.phi[k] = v.value[k];
    p.dphi[k] = inv_t * v.grad[k];
  }
  p.psi = basis::q1_2d(ref);
  const auto lx = basis::q1_1d(ref.x()), ly = basis::q1_1d(ref.y());
  constexpr auto d1 = basis::q1_1d_d1();
  const std::array<Vec2, 4> ref_grad{Vec2(d1[0] * ly[0], lx[0] * d1[0]), Vec2(d1[1] * ly[0], lx[1] * d1[0]),
                                     Vec2(d1[0] * ly[1], lx[0] * d1[1]), Vec2(d1[1] * ly[1], lx[1] * d1[1])};
  for (int k = 0; k < 4; ++k) p.dpsi[k] = inv_t * ref_grad[k];
  return p;
}

void CellQuadrature::reinit(int cell) {
  const int nq = mesh_->quad_per_cell();
  points_.resize(nq);
  jxw_.resize(nq);
  for (int q = 0; q < nq; ++q) {
    points_[q] = basis_at(*mesh_, cell, Mesh::quad_point(mesh_->dim(), q));
    jxw_[q] = Mesh::quad_weight(mesh_->dim(), q) * points_[q].det;
  }
}

std::vector<FacetPoint> facet_quadrature(const Mesh& mesh, const BoundaryFacet& facet) {
  if (mesh.dim() == 1) {
    FacetPoint p;
    p.ref = Vec2(facet.side == 0 ? 0.0 : 1.0, 0.0);
    p.x = mesh.nodes()[facet.nodes[0]];
    p.ds = 1.0;
    p.normal = Vec2(facet.side == 0 ? -1.0 : 1.0, 0.0);
    return {p};
  }
  std::vector<FacetPoint> out(3);
  const Vec2 dir = basis::side_direction(facet.side);
  const double orient = (facet.side == 0 || facet.side == 1) ? 1.0 : -1.0;
  for (int g = 0; g < 3; ++g) {
    FacetPoint& p = out[g];
    p.ref = basis::side_point(facet.side, basis::Gauss3::points[g]);
    const MapEval m = mesh.map(facet.cell, p.ref);
    p.x = m.x;
    const Vec2 t = orient * (m.jac * dir);
    const double len = t.norm();
    p.ds = basis::Gauss3::weights[g] * len;
    p.normal = Vec2(t.y(), -t.x()) / len;
  }
  return out;
}

namespace {

void require_scalar(const Field& f) {
  if (!f.space || f.space->has_velocity()) throw ContractViolation("expected a scalar field");
}

void require_velocity(const Field& f) {
  if (!f.space || !f.space->has_velocity()) throw ContractViolation("expected a velocity field");
}

}  // namespace

ScalarSample eval_scalar(const Field& f, int cell, const PointBasis& b) {
  const Space& s = *f.space;
  ScalarSample out;
  if (s.family() == SpaceFamily::ScalarQ1) {
    const auto dofs = s.cell_corner_dofs(cell);
    const int n = s.mesh().dim() == 1 ? 2 : 4;
    for (int k = 0; k < n; ++k) {
      out.value += b.psi[k] * f.values[dofs[k]];
      out.grad += b.dpsi[k] * f.values[dofs[k]];
    }
    return out;
  }
  const auto c = s.mesh().cell(cell);
  for (std::size_t k = 0; k < c.size(); ++k) {
    out.value += b.phi[k] * f.values[c[k]];
    out.grad += b.dphi[k] * f.values[c[k]];
  }
  return out;
}

VectorSample eval_velocity(const Field& f, int cell, const PointBasis& b) {
  const auto c = f.space->mesh().cell(cell);
  const int n = f.space->num_nodes();
  VectorSample out;
  for (int k = 0; k < 9; ++k) {
    const double u0 = f.values[c[k]], u1 = f.values[n + c[k]];
    out.value += b.phi[k] * Vec2(u0, u1);
    out.grad.row(0) += u0 * b.dphi[k].transpose();
    out.grad.row(1) += u1 * b.dphi[k].transpose();
  }
  return out;
}

double eval_pressure(const Field& f, int cell, const PointBasis& b) {
  const auto dofs = f.space->cell_corner_dofs(cell);
  double p = 0.0;
  for (int k = 0; k < 4; ++k) p += b.psi[k] * f.values[dofs[k]];
  return p;
}

ScalarSample eval_scalar(const Field& f, int cell, const Vec2& ref) {
  require_scalar(f);
  return eval_scalar(f, cell, basis_at(f.space->mesh(), cell, ref));
}

std::array<double, 3> eval_scalar_hessian(const Field& f, int cell, const Vec2& ref) {
  require_scalar(f);
  const Space& s = *f.space;
  if (s.family() != SpaceFamily::ScalarQ2 || s.mesh().dim() != 2)
    throw ContractViolation("Hessian evaluation needs a 2D scalar Q2 field");
  const auto c = s.mesh().cell(cell);
  const PointBasis b = basis_at(s.mesh(), cell, ref);
  const auto h = basis::q2_2d_hessian(ref);
  // Reference Hessians of the field and of both map components.
  Mat2 hu = Mat2::Zero(), hx = Mat2::Zero(), hy = Mat2::Zero();
  Vec2 g = Vec2::Zero();
  for (int k = 0; k < 9; ++k) {
    Mat2 hk;
    hk << h[k][0], h[k][1], h[k][1], h[k][2];
    const double u = f.values[c[k]];
    const Vec2& p = s.mesh().nodes()[c[k]];
    hu += u * hk;
    hx += p.x() * hk;
    hy += p.y() * hk;
    g += u * b.dphi[k];
  }
  const Mat2 phys = b.inv.transpose() * (hu - g.x() * hx - g.y() * hy) * b.inv;
  return {phys(0, 0), phys(0, 1), phys(1, 1)};
}

VectorSample eval_velocity(const Field& f, int cell, const Vec2& ref) {
  require_velocity(f);
  return eval_velocity(f, cell, basis_at(f.space->mesh(), cell, ref));
}

double eval_pressure(const Field& f, int cell, const Vec2& ref) {
  if (!f.space || !f.space->has_pressure()) throw ContractViolation("expected a mixed velocity-pressure field");
  return eval_pressure(f, cell, basis_at(f.space->mesh(), cell, ref));
}

Vec2 nodal_velocity(const Field& f, int node) {
  const int n = f.space->num_nodes();
  return Vec2(f.values[node], f.values[n + node]);
}

void set_nodal_velocity(Field& f, int node, const Vec2& u) {
  const int n = f.space->num_nodes();
  f.values[node] = u.x();
  f.values[n + node] = u.y();
}

Field interpolate_scalar(const Space& space, const std::function<double(const Vec2&)>& fn, std::string name) {
  Field f(space, std::move(name));
  if (space.has_velocity()) throw ContractViolation("interpolate_scalar needs a scalar space");
  const auto& nodes = space.mesh().nodes();
  for (int i = 0; i < space.num_nodes(); ++i) {
    const int d = space.scalar_dof(i);
    if (d >= 0) f.values[d] = fn(nodes[i]);
  }
  return f;
}

Field interpolate_velocity(const Space& space, const std::function<Vec2(const Vec2&)>& fn, std::string name) {
  if (!space.has_velocity()) throw ContractViolation("interpolate_velocity needs a velocity space");
  Field f(space, std::move(name));
  const auto& nodes = space.mesh().nodes();
  for (int i = 0; i < space.num_nodes(); ++i) set_nodal_velocity(f, i, fn(nodes[i]));
  return f;
}

namespace {

template <class Integrand>
double integrate(const Mesh& mesh, Integrand&& fn) {
  CellQuadrature cq(mesh);
  double total = 0.0;
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    cq.reinit(static_cast<int>(c));
    for (int q = 0; q < cq.size(); ++q) total += cq.jxw(q) * fn(static_cast<int>(c), q, cq[q]);
  }
  return total;
}

}  // namespace

double scalar_l2(const Field& f) {
  require_scalar(f);
  return std::sqrt(integrate(f.space->mesh(), [&](int c, int, const PointBasis& b) {
    const double v = eval_scalar(f, c, b).value;
    return v * v;
  }));
}

double scalar_grad_l2(const Field& f) {
  require_scalar(f);
  return std::sqrt(integrate(f.space->mesh(),
                             [&](int c, int, const PointBasis& b) { return eval_scalar(f, c, b).grad.squaredNorm(); }));
}

double scalar_integral(const Field& f) {
  require_scalar(f);
  return integrate(f.space->mesh(), [&](int c, int, const PointBasis& b) { return eval_scalar(f, c, b).value; });
}

double velocity_l2(const Field& f) {
  require_velocity(f);
  return std::sqrt(integrate(f.space->mesh(), [&](int c, int, const PointBasis& b) {
    return eval_velocity(f, c, b).value.squaredNorm();
  }));
}

double velocity_grad_l2(const Field& f) {
  require_velocity(f);
  return std::sqrt(integrate(f.space->mesh(), [&](int c, int, const PointBasis& b) {
    return eval_velocity(f, c, b).grad.squaredNorm();
  }));
}

double velocity_h1(const Field& f) {
  require_velocity(f);
  return std::sqrt(integrate(f.space->mesh(), [&](int c, int, const PointBasis& b) {
    const VectorSample s = eval_velocity(f, c, b);
    return s.value.squaredNorm() + s.grad.squaredNorm();
  }));
}

double pressure_integral(const Field& f) {
  if (!f.space || !f.space->has_pressure()) throw ContractViolation("expected a mixed velocity-pressure field");
  return integrate(f.space->mesh(), [&](int c, int, const PointBasis& b) { return eval_pressure(f, c, b); });
}

double scalar_l2_error(const Field& f, const std::function<double(const Vec2&)>& exact) {
  require_scalar(f);
  return std::sqrt(integrate(f.space->mesh(), [&](int c, int, const PointBasis& b) {
    const double e = eval_scalar(f, c, b).value - exact(b.x);
    return e * e;
  }));
}

double velocity_l2_error(const Field& f, const std::function<Vec2(const Vec2&)>& exact) {
  require_velocity(f);
  return std::sqrt(integrate(f.space->mesh(), [&](int c, int, const PointBasis& b) {
    return (eval_velocity(f, c, b).value - exact(b.x)).squaredNorm();
  }));
}

double pressure_l2_error(const Field& f, const std::function<double(const Vec2&)>& exact) {
  if (!f.space || !f.space->has_pressure()) throw ContractViolation("expected a mixed velocity-pressure field");
  return std::sqrt(integrate(f.space->mesh(), [&](int c, int, const PointBasis& b) {
    const double e = eval_pressure(f, c, b) - exact(b.x);
    return e * e;
  }));
}

}  // namespace slipflow
