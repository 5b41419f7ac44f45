#include "slipflow/forms.hpp"

#include <ostream>

#include "slipflow/basis.hpp"
#include "slipflow/errors.hpp"

namespace slipflow {

namespace {

SparseMatrix from_triplets(int n, const std::vector<Triplet>& t) {
  SparseMatrix m(n, n);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

void require_velocity_space(const Space& space) {
  if (!space.has_velocity()) throw ContractViolation("form needs a velocity space");
}

void require_same_mesh(const Space& space, const Field& f) {
  if (!f.space || &f.space->mesh() != &space.mesh())
    throw ContractViolation("field and space are defined on different meshes");
}

// Scalar basis of a cell in the family of the space.
struct ScalarBasis {
  int count = 0;
  std::array<int, 9> dofs{};
};

ScalarBasis scalar_basis(const Space& space, int cell) {
  ScalarBasis sb;
  if (space.family() == SpaceFamily::ScalarQ1) {
    const auto d = space.cell_corner_dofs(cell);
    sb.count = space.mesh().dim() == 1 ? 2 : 4;
    for (int k = 0; k < sb.count; ++k) sb.dofs[k] = d[k];
  } else {
    const auto c = space.mesh().cell(cell);
    sb.count = static_cast<int>(c.size());
    for (int k = 0; k < sb.count; ++k) sb.dofs[k] = c[k];
  }
  return sb;
}

double scalar_value(const Space& space, const PointBasis& b, int k) {
  return space.family() == SpaceFamily::ScalarQ1 ? b.psi[k] : b.phi[k];
}

Vec2 scalar_grad(const Space& space, const PointBasis& b, int k) {
  return space.family() == SpaceFamily::ScalarQ1 ? b.dpsi[k] : b.dphi[k];
}

void require_scalar_space(const Space& space) {
  if (space.has_velocity()) throw ContractViolation("form needs a scalar space");
}

}  // namespace

SparseMatrix assemble_stress_form(const Space& space) {
  require_velocity_space(space);
  const Mesh& mesh = space.mesh();
  std::vector<Triplet> t;
  t.reserve(mesh.num_cells() * 18 * 18);
  CellQuadrature cq(mesh);
  Eigen::Matrix<double, 18, 18> local;
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    cq.reinit(static_cast<int>(c));
    local.setZero();
    for (int q = 0; q < cq.size(); ++q) {
      const auto& b = cq[q];
      const double w = cq.jxw(q);
      for (int i = 0; i < 9; ++i)
        for (int j = 0; j < 9; ++j) {
          const double gg = b.dphi[i].dot(b.dphi[j]);
          for (int a = 0; a < 2; ++a)
            for (int bb = 0; bb < 2; ++bb)
              local(a * 9 + i, bb * 9 + j) += w * ((a == bb ? gg : 0.0) + b.dphi[i][bb] * b.dphi[j][a]);
        }
    }
    const auto nodes = mesh.cell(c);
    for (int a = 0; a < 2; ++a)
      for (int i = 0; i < 9; ++i)
        for (int bb = 0; bb < 2; ++bb)
          for (int j = 0; j < 9; ++j)
            t.emplace_back(space.velocity_dof(nodes[i], a), space.velocity_dof(nodes[j], bb),
                           local(a * 9 + i, bb * 9 + j));
  }
  return from_triplets(space.num_dofs(), t);
}

SparseMatrix assemble_slip_boundary_form(const Space& space, double alpha) {
  require_velocity_space(space);
  const Mesh& mesh = space.mesh();
  if (!mesh.has_wall_geometry()) throw ContractViolation("slip boundary form needs wall frames");
  std::vector<Triplet> t;
  if (alpha == 0.0) return from_triplets(space.num_dofs(), t);
  for (const BoundaryFacet& f : mesh.facets()) {
    if (f.tag != FacetTag::Wall) continue;
    const auto nodes = mesh.cell(f.cell);
    for (const FacetPoint& p : facet_quadrature(mesh, f)) {
      const PointBasis b = basis_at(mesh, f.cell, p.ref);
      const Vec2 tau = mesh.wall_frame(p.x).tangent;
      for (int i : basis::kSideNodes[f.side])
        for (int j : basis::kSideNodes[f.side]) {
          const double m = alpha * p.ds * b.phi[i] * b.phi[j];
          for (int a = 0; a < 2; ++a)
            for (int bb = 0; bb < 2; ++bb)
              t.emplace_back(space.velocity_dof(nodes[i], a), space.velocity_dof(nodes[j], bb), m * tau[a] * tau[bb]);
        }
    }
  }
  return from_triplets(space.num_dofs(), t);
}

SparseMatrix assemble_convection(const Space& space, const Field& bfield) {
  require_velocity_space(space);
  require_same_mesh(space, bfield);
  const Mesh& mesh = space.mesh();
  std::vector<Triplet> t;
  t.reserve(mesh.num_cells() * 2 * 81);
  CellQuadrature cq(mesh);
  Eigen::Matrix<double, 9, 9> local;
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const int cell = static_cast<int>(c);
    cq.reinit(cell);
    local.setZero();
    for (int q = 0; q < cq.size(); ++q) {
      const auto& b = cq[q];
      const Vec2 adv = eval_velocity(bfield, cell, b).value;
      const double w = cq.jxw(q);
      for (int j = 0; j < 9; ++j) {
        const double d = w * adv.dot(b.dphi[j]);
        for (int i = 0; i < 9; ++i) local(i, j) += d * b.phi[i];
      }
    }
    const auto nodes = mesh.cell(c);
    for (int a = 0; a < 2; ++a)
      for (int i = 0; i < 9; ++i)
        for (int j = 0; j < 9; ++j)
          t.emplace_back(space.velocity_dof(nodes[i], a), space.velocity_dof(nodes[j], a), local(i, j));
  }
  return from_triplets(space.num_dofs(), t);
}

SparseMatrix assemble_convection_reaction(const Space& space, const Field& wfield) {
  require_velocity_space(space);
  require_same_mesh(space, wfield);
  const Mesh& mesh = space.mesh();
  std::vector<Triplet> t;
  t.reserve(mesh.num_cells() * 4 * 81);
  CellQuadrature cq(mesh);
  Eigen::Matrix<double, 18, 18> local;
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const int cell = static_cast<int>(c);
    cq.reinit(cell);
    local.setZero();
    for (int q = 0; q < cq.size(); ++q) {
      const auto& b = cq[q];
      const Mat2 gw = eval_velocity(wfield, cell, b).grad;
      const double w = cq.jxw(q);
      for (int i = 0; i < 9; ++i)
        for (int j = 0; j < 9; ++j) {
          const double m = w * b.phi[i] * b.phi[j];
          for (int a = 0; a < 2; ++a)
            for (int bb = 0; bb < 2; ++bb) local(a * 9 + i, bb * 9 + j) += m * gw(a, bb);
        }
    }
    const auto nodes = mesh.cell(c);
    for (int a = 0; a < 2; ++a)
      for (int i = 0; i < 9; ++i)
        for (int bb = 0; bb < 2; ++bb)
          for (int j = 0; j < 9; ++j)
            t.emplace_back(space.velocity_dof(nodes[i], a), space.velocity_dof(nodes[j], bb),
                           local(a * 9 + i, bb * 9 + j));
  }
  return from_triplets(space.num_dofs(), t);
}

SparseMatrix assemble_divergence_coupling(const Space& space) {
  if (!space.has_pressure()) throw ContractViolation("divergence coupling needs a mixed space");
  const Mesh& mesh = space.mesh();
  std::vector<Triplet> t;
  t.reserve(mesh.num_cells() * 4 * 18);
  CellQuadrature cq(mesh);
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const int cell = static_cast<int>(c);
    cq.reinit(cell);
    const auto nodes = mesh.cell(c);
    const auto pdofs = space.cell_corner_dofs(cell);
    Eigen::Matrix<double, 4, 18> local = Eigen::Matrix<double, 4, 18>::Zero();
    for (int q = 0; q < cq.size(); ++q) {
      const auto& b = cq[q];
      const double w = cq.jxw(q);
      for (int k = 0; k < 4; ++k)
        for (int j = 0; j < 9; ++j)
          for (int a = 0; a < 2; ++a) local(k, a * 9 + j) += w * b.psi[k] * b.dphi[j][a];
    }
    for (int k = 0; k < 4; ++k)
      for (int a = 0; a < 2; ++a)
        for (int j = 0; j < 9; ++j) t.emplace_back(pdofs[k], space.velocity_dof(nodes[j], a), local(k, a * 9 + j));
  }
  return from_triplets(space.num_dofs(), t);
}

SparseMatrix assemble_velocity_mass(const Space& space) {
  require_velocity_space(space);
  const Mesh& mesh = space.mesh();
  std::vector<Triplet> t;
  t.reserve(mesh.num_cells() * 2 * 81);
  CellQuadrature cq(mesh);
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    cq.reinit(static_cast<int>(c));
    Eigen::Matrix<double, 9, 9> local = Eigen::Matrix<double, 9, 9>::Zero();
    for (int q = 0; q < cq.size(); ++q)
      for (int i = 0; i < 9; ++i)
        for (int j = 0; j < 9; ++j) local(i, j) += cq.jxw(q) * cq[q].phi[i] * cq[q].phi[j];
    const auto nodes = mesh.cell(c);
    for (int a = 0; a < 2; ++a)
      for (int i = 0; i < 9; ++i)
        for (int j = 0; j < 9; ++j)
          t.emplace_back(space.velocity_dof(nodes[i], a), space.velocity_dof(nodes[j], a), local(i, j));
  }
  return from_triplets(space.num_dofs(), t);
}

SparseMatrix assemble_pressure_mass(const Space& space) {
  if (!space.has_pressure()) throw ContractViolation("pressure mass needs a mixed space");
  const Mesh& mesh = space.mesh();
  std::vector<Triplet> t;
  CellQuadrature cq(mesh);
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const int cell = static_cast<int>(c);
    cq.reinit(cell);
    const auto pdofs = space.cell_corner_dofs(cell);
    for (int q = 0; q < cq.size(); ++q)
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) t.emplace_back(pdofs[i], pdofs[j], cq.jxw(q) * cq[q].psi[i] * cq[q].psi[j]);
  }
  return from_triplets(space.num_dofs(), t);
}

Vector pressure_mean_vector(const Space& space) {
  if (!space.has_pressure()) throw ContractViolation("pressure mean needs a mixed space");
  const Mesh& mesh = space.mesh();
  Vector m = Vector::Zero(space.num_dofs());
  CellQuadrature cq(mesh);
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const int cell = static_cast<int>(c);
    cq.reinit(cell);
    const auto pdofs = space.cell_corner_dofs(cell);
    for (int q = 0; q < cq.size(); ++q)
      for (int k = 0; k < 4; ++k) m[pdofs[k]] += cq.jxw(q) * cq[q].psi[k];
  }
  return m;
}

SparseMatrix assemble_scalar_stiffness(const Space& space) {
  require_scalar_space(space);
  const Mesh& mesh = space.mesh();
  std::vector<Triplet> t;
  CellQuadrature cq(mesh);
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const int cell = static_cast<int>(c);
    cq.reinit(cell);
    const ScalarBasis sb = scalar_basis(space, cell);
    for (int q = 0; q < cq.size(); ++q)
      for (int i = 0; i < sb.count; ++i)
        for (int j = 0; j < sb.count; ++j)
          t.emplace_back(sb.dofs[i], sb.dofs[j],
                         cq.jxw(q) * scalar_grad(space, cq[q], i).dot(scalar_grad(space, cq[q], j)));
  }
  return from_triplets(space.num_dofs(), t);
}

SparseMatrix assemble_scalar_mass(const Space& space) {
  require_scalar_space(space);
  const Mesh& mesh = space.mesh();
  std::vector<Triplet> t;
  CellQuadrature cq(mesh);
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const int cell = static_cast<int>(c);
    cq.reinit(cell);
    const ScalarBasis sb = scalar_basis(space, cell);
    for (int q = 0; q < cq.size(); ++q)
      for (int i = 0; i < sb.count; ++i)
        for (int j = 0; j < sb.count; ++j)
          t.emplace_back(sb.dofs[i], sb.dofs[j],
                         cq.jxw(q) * scalar_value(space, cq[q], i) * scalar_value(space, cq[q], j));
  }
  return from_triplets(space.num_dofs(), t);
}

SparseMatrix assemble_robin_form(const Space& space, double alpha) {
  require_scalar_space(space);
  const Mesh& mesh = space.mesh();
  std::vector<Triplet> t;
  for (const BoundaryFacet& f : mesh.facets()) {
    if (f.tag != FacetTag::Wall) continue;
    const ScalarBasis sb = scalar_basis(space, f.cell);
    for (const FacetPoint& p : facet_quadrature(mesh, f)) {
      const PointBasis b = basis_at(mesh, f.cell, p.ref);
      for (int i = 0; i < sb.count; ++i)
        for (int j = 0; j < sb.count; ++j) {
          const double v = alpha * p.ds * scalar_value(space, b, i) * scalar_value(space, b, j);
          if (v != 0.0) t.emplace_back(sb.dofs[i], sb.dofs[j], v);
        }
    }
  }
  return from_triplets(space.num_dofs(), t);
}

Vector assemble_scalar_load(const Space& space, const std::function<double(const Vec2&)>& f) {
  require_scalar_space(space);
  const Mesh& mesh = space.mesh();
  Vector r = Vector::Zero(space.num_dofs());
  CellQuadrature cq(mesh);
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const int cell = static_cast<int>(c);
    cq.reinit(cell);
    const ScalarBasis sb = scalar_basis(space, cell);
    for (int q = 0; q < cq.size(); ++q) {
      const double fv = cq.jxw(q) * f(cq[q].x);
      for (int i = 0; i < sb.count; ++i) r[sb.dofs[i]] += fv * scalar_value(space, cq[q], i);
    }
  }
  return r;
}

Vector assemble_scalar_load(const Space& space, const Field& f) {
  require_scalar_space(space);
  require_same_mesh(space, f);
  const Mesh& mesh = space.mesh();
  Vector r = Vector::Zero(space.num_dofs());
  CellQuadrature cq(mesh);
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const int cell = static_cast<int>(c);
    cq.reinit(cell);
    const ScalarBasis sb = scalar_basis(space, cell);
    for (int q = 0; q < cq.size(); ++q) {
      const double fv = cq.jxw(q) * eval_scalar(f, cell, cq[q]).value;
      for (int i = 0; i < sb.count; ++i) r[sb.dofs[i]] += fv * scalar_value(space, cq[q], i);
    }
  }
  return r;
}

Vector assemble_velocity_load(const Space& space, const std::function<Vec2(const Vec2&)>& f) {
  require_velocity_space(space);
  const Mesh& mesh = space.mesh();
  Vector r = Vector::Zero(space.num_dofs());
  CellQuadrature cq(mesh);
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    cq.reinit(static_cast<int>(c));
    const auto nodes = mesh.cell(c);
    for (int q = 0; q < cq.size(); ++q) {
      const Vec2 fv = cq.jxw(q) * f(cq[q].x);
      for (int i = 0; i < 9; ++i)
        for (int a = 0; a < 2; ++a) r[space.velocity_dof(nodes[i], a)] += fv[a] * cq[q].phi[i];
    }
  }
  return r;
}

Vector assemble_tensor_source(const Space& space, const std::function<Mat2(const Vec2&)>& F) {
  require_velocity_space(space);
  const Mesh& mesh = space.mesh();
  Vector r = Vector::Zero(space.num_dofs());
  CellQuadrature cq(mesh);
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    cq.reinit(static_cast<int>(c));
    const auto nodes = mesh.cell(c);
    for (int q = 0; q < cq.size(); ++q) {
      const Mat2 fv = cq.jxw(q) * F(cq[q].x);
      for (int i = 0; i < 9; ++i)
        for (int a = 0; a < 2; ++a) r[space.velocity_dof(nodes[i], a)] -= fv.row(a).dot(cq[q].dphi[i]);
    }
  }
  return r;
}

Vector assemble_tangential_load(const Space& space, const std::function<double(const Vec2&)>& d) {
  require_velocity_space(space);
  const Mesh& mesh = space.mesh();
  if (!mesh.has_wall_geometry()) throw ContractViolation("tangential boundary data needs wall frames");
  Vector r = Vector::Zero(space.num_dofs());
  for (const BoundaryFacet& f : mesh.facets()) {
    if (f.tag != FacetTag::Wall) continue;
    const auto nodes = mesh.cell(f.cell);
    for (const FacetPoint& p : facet_quadrature(mesh, f)) {
      const PointBasis b = basis_at(mesh, f.cell, p.ref);
      const Vec2 tau = mesh.wall_frame(p.x).tangent;
      const double dv = p.ds * d(p.x);
      for (int i : basis::kSideNodes[f.side])
        for (int a = 0; a < 2; ++a) r[space.velocity_dof(nodes[i], a)] += dv * b.phi[i] * tau[a];
    }
  }
  return r;
}

Vector assemble_pressure_load(const Space& space, const std::function<double(const Vec2&)>& s) {
  if (!space.has_pressure()) throw ContractViolation("pressure load needs a mixed space");
  const Mesh& mesh = space.mesh();
  Vector r = Vector::Zero(space.num_dofs());
  CellQuadrature cq(mesh);
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const int cell = static_cast<int>(c);
    cq.reinit(cell);
    const auto pdofs = space.cell_corner_dofs(cell);
    for (int q = 0; q < cq.size(); ++q) {
      const double sv = cq.jxw(q) * s(cq[q].x);
      for (int k = 0; k < 4; ++k) r[pdofs[k]] += sv * cq[q].psi[k];
    }
  }
  return r;
}

void write_triplets(std::ostream& os, const SparseMatrix& m) {
  os << m.rows() << ' ' << m.cols() << ' ' << m.nonZeros() << '\n';
  os.precision(17);
  for (int k = 0; k < m.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(m, k); it; ++it) os << it.row() << ' ' << it.col() << ' ' << it.value() << '\n';
}

}  // namespace slipflow
