#include "slipflow/profile_vector.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>
#include <sstream>

#include "slipflow/basis.hpp"
#include "slipflow/constraints.hpp"
#include "slipflow/errors.hpp"
#include "slipflow/forms.hpp"
#include "slipflow/linear_solver.hpp"
#include "slipflow/stokes.hpp"

namespace slipflow {

namespace {

using boost::math::quadrature::gauss_kronrod;

template <class F>
double integrate_1d(F&& f, double a, double b) {
  if (a == b) return 0.0;
  return gauss_kronrod<double, 31>::integrate(f, a, b, 8, 1e-12);
}

double mollifier(double t) { return std::abs(t) < 1.0 ? std::exp(-1.0 / (1.0 - t * t)) : 0.0; }

double mollifier_d1(double t) {
  if (std::abs(t) >= 1.0) return 0.0;
  const double q = 1.0 - t * t;
  return std::exp(-1.0 / q) * (-2.0 * t / (q * q));
}

std::string format(double v) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << v;
  return os.str();
}

}  // namespace

CutoffEta::CutoffEta(double z) : z_(z) {
  if (!(z > 0.0)) throw ContractViolation("cut-off length Z must be positive");
}

double CutoffEta::value(double x) const {
  const double h = z_ / 2.0;
  if (x <= h) return 0.0;
  if (x >= z_) return 1.0;
  const double t = (x - h) / h;
  return t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}

double CutoffEta::d1(double x) const {
  const double h = z_ / 2.0;
  if (x <= h || x >= z_) return 0.0;
  const double t = (x - h) / h;
  return 30.0 * t * t * (1.0 - t) * (1.0 - t) / h;
}

double CutoffEta::d2(double x) const {
  const double h = z_ / 2.0;
  if (x <= h || x >= z_) return 0.0;
  const double t = (x - h) / h;
  return (60.0 * t - 180.0 * t * t + 120.0 * t * t * t) / (h * h);
}

double CutoffEta::integral(double x) const {
  const double h = z_ / 2.0;
  if (x <= h) return 0.0;
  if (x >= z_) return h / 2.0 + (x - z_);
  const double t = (x - h) / h;
  return h * t * t * t * t * (2.5 + t * (-3.0 + t));
}

double FluxCarrier::value(double x1) const {
  switch (kind_) {
    case Kind::Bump: {
      const double m = 0.5 * (lo_ + hi_), w = 0.5 * (hi_ - lo_);
      return scale_ * mollifier((x1 - m) / w);
    }
    case Kind::Profile: return profile_->value_at(x1);
    case Kind::Radial: return value(Vec2(x1, 0.0));
  }
  return 0.0;
}

double FluxCarrier::derivative(double x1) const {
  switch (kind_) {
    case Kind::Bump: {
      const double m = 0.5 * (lo_ + hi_), w = 0.5 * (hi_ - lo_);
      return scale_ * mollifier_d1((x1 - m) / w) / w;
    }
    case Kind::Profile: return profile_->derivative_at(x1);
    case Kind::Radial: throw ContractViolation("radial carriers have no one-dimensional derivative");
  }
  return 0.0;
}

double FluxCarrier::value(const Vec2& x) const {
  if (kind_ == Kind::Radial) return scale_ * mollifier(x.norm() / hi_);
  return value(x.x());
}

FluxCarrier build_flux_carrier(double lo, double hi, double flux, double section_length) {
  if (!(flux >= 0.0)) throw ContractViolation("flux must be non-negative");
  if (!(lo > 0.0 && hi < section_length && lo < hi))
    throw ContractViolation("carrier support [" + format(lo) + ", " + format(hi) +
                            "] must lie strictly inside the cross-section");
  FluxCarrier c;
  c.kind_ = FluxCarrier::Kind::Bump;
  c.flux_ = flux;
  c.lo_ = lo;
  c.hi_ = hi;
  const double unit = integrate_1d(mollifier, -1.0, 1.0);
  c.scale_ = flux / (0.5 * (hi - lo) * unit);
  return c;
}

FluxCarrier build_radial_flux_carrier(double radius, double section_radius, double flux) {
  if (!(flux >= 0.0)) throw ContractViolation("flux must be non-negative");
  if (!(radius > 0.0 && radius < section_radius))
    throw ContractViolation("radial carrier must lie strictly inside the cross-section");
  FluxCarrier c;
  c.kind_ = FluxCarrier::Kind::Radial;
  c.flux_ = flux;
  c.lo_ = 0.0;
  c.hi_ = radius;
  const double unit = integrate_1d([](double s) { return mollifier(s) * s; }, 0.0, 1.0);
  c.scale_ = flux / (2.0 * std::numbers::pi * radius * radius * unit);
  return c;
}

FluxCarrier poiseuille_flux_carrier(const PoiseuilleProfile& g) {
  if (g.mesh->dim() != 1) throw ContractViolation("profile carriers need an interval cross-section");
  FluxCarrier c;
  c.kind_ = FluxCarrier::Kind::Profile;
  c.flux_ = g.flux;
  c.lo_ = g.mesh->nodes().front().x();
  c.hi_ = g.mesh->nodes().back().x();
  c.profile_ = std::make_shared<PoiseuilleProfile>(g);
  return c;
}

DivergencePotential1D::DivergencePotential1D(const FluxCarrier& h, const PoiseuilleProfile& g)
    : h_(h), g_(std::make_shared<PoiseuilleProfile>(g)) {
  if (g.mesh->dim() != 1) throw ContractViolation("one-dimensional divergence needs an interval cross-section");
  const auto& nodes = g.mesh->nodes();
  if (nodes.front().x() != 0.0) throw ContractViolation("interval cross-sections must start at 0");
  length_ = nodes.back().x();
  // Knots at the profile's cell boundaries (the integrand is piecewise smooth there),
  // refined so that no panel is wider than length / 256.
  const int cells = static_cast<int>(g.mesh->num_cells());
  const int per_cell = std::max(1, 256 / cells);
  knots_.push_back(0.0);
  for (int c = 0; c < cells; ++c) {
    const double a = nodes[g.mesh->cell(c)[0]].x(), b = nodes[g.mesh->cell(c)[2]].x();
    for (int k = 1; k <= per_cell; ++k) knots_.push_back(a + (b - a) * k / per_cell);
  }
  knots_.back() = length_;
  for (double c : {h.lo(), h.hi()})
    if (h.kind() == FluxCarrier::Kind::Bump && c > 0.0 && c < length_) knots_.push_back(c);
  std::sort(knots_.begin(), knots_.end());
  cumulative_.assign(knots_.size(), 0.0);
  for (std::size_t k = 1; k < knots_.size(); ++k)
    cumulative_[k] = cumulative_[k - 1] + integral(knots_[k - 1], knots_[k]);
}

double DivergencePotential1D::integral(double a, double b) const {
  // Panels are short and the integrand smooth on each, so a fixed rule suffices.
  if (a == b) return 0.0;
  return boost::math::quadrature::gauss<double, 20>::integrate([this](double x) { return derivative(x); }, a, b);
}

double DivergencePotential1D::derivative(double x1) const { return h_.value(x1) - g_->value_at(x1); }

double DivergencePotential1D::value(double x1) const {
  const auto it = std::upper_bound(knots_.begin(), knots_.end(), x1);
  const std::size_t k = it == knots_.begin() ? 0 : std::min<std::size_t>(it - knots_.begin() - 1, knots_.size() - 1);
  return cumulative_[k] + integral(knots_[k], x1);
}

double DivergencePotential1D::max_abs() const {
  double m = 0.0;
  for (double v : cumulative_) m = std::max(m, std::abs(v));
  return m;
}

DivergencePotential1D solve_divergence_1d(const FluxCarrier& h, const PoiseuilleProfile& g) {
  DivergencePotential1D a(h, g);
  const double l = a.length();
  const double total = integrate_1d([&](double x) { return std::abs(a.derivative(x)); }, 0.0, l);
  const double residual = a.value(l);
  if (std::abs(residual) > 1e-12 * total)
    throw ConstructionError("zero_mean", "int (h - g) = " + format(residual) + " is not zero");
  return a;
}

double CrossSectionDivergence::source(int cell, const PointBasis& b) const {
  return carrier.value(b.x) - eval_scalar(profile->profile, cell, b).value - mean;
}

CrossSectionDivergence solve_divergence_2d(const PoiseuilleProfile& g, const FluxCarrier& h) {
  const Mesh& mesh = *g.mesh;
  if (mesh.dim() != 2) throw ContractViolation("two-dimensional divergence needs a 2D cross-section");
  CrossSectionDivergence out;
  out.profile = std::make_shared<PoiseuilleProfile>(g);
  out.carrier = h;
  out.alpha = g.alpha;
  out.scalar_space = out.profile->space;
  out.mixed_space = std::make_shared<Space>(mesh, SpaceFamily::MixedQ2Q1);
  const Space& ss = *out.scalar_space;
  const Space& ms = *out.mixed_space;

  // Compatibility: int (h - g) must vanish up to quadrature error.
  CellQuadrature cq(mesh);
  double total = 0.0;
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    cq.reinit(static_cast<int>(c));
    for (int q = 0; q < cq.size(); ++q) total += cq.jxw(q) * out.source(static_cast<int>(c), cq[q]);
  }
  out.compatibility_residual = total;
  if (std::abs(h.flux() - g.flux) > 1e-12 * std::max(h.flux(), g.flux))
    throw ConstructionError("compatibility", "int (h - g) = " + format(h.flux() - g.flux) + " is not zero");
  out.mean = total / mesh.measure();

  // Neumann problem lap(phi) = h - g - mean, zero mean: K phi = -(f, v).
  Vector load = Vector::Zero(ss.num_dofs()), ones = Vector::Zero(ss.num_dofs());
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const int cell = static_cast<int>(c);
    cq.reinit(cell);
    const auto nodes = mesh.cell(c);
    for (int q = 0; q < cq.size(); ++q) {
      const double f = cq.jxw(q) * out.source(cell, cq[q]);
      for (int i = 0; i < 9; ++i) {
        load[nodes[i]] -= f * cq[q].phi[i];
        ones[nodes[i]] += cq.jxw(q) * cq[q].phi[i];
      }
    }
  }
  SparseLU lu;
  lu.factor(border(assemble_scalar_stiffness(ss), ones));
  Vector b(load.size() + 1);
  b << load, 0.0;
  out.phi = Field(ss, lu.solve(b).head(load.size()), "phi");

  // Tangent Q2 projection of grad(phi).
  const Space vs(mesh, SpaceFamily::VectorQ2);
  Vector rhs = Vector::Zero(vs.num_dofs());
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const int cell = static_cast<int>(c);
    cq.reinit(cell);
    const auto nodes = mesh.cell(c);
    for (int q = 0; q < cq.size(); ++q) {
      const Vec2 gp = cq.jxw(q) * eval_scalar(out.phi, cell, cq[q]).grad;
      for (int i = 0; i < 9; ++i)
        for (int a = 0; a < 2; ++a) rhs[vs.velocity_dof(nodes[i], a)] += gp[a] * cq[q].phi[i];
    }
  }
  ConstraintRecord vrec = make_rotated_record(vs);
  constrain_wall_normals(vrec, vs);
  const AssembledSystem proj = reduce_system(assemble_velocity_mass(vs), rhs, vrec);
  SparseSPD spd;
  spd.factor(proj.matrix);
  const Vector grad_full = expand(proj.constraints, spd.solve(proj.rhs));
  out.gradient = Field(ms, "grad_phi");
  out.gradient.values.head(vs.num_dofs()) = grad_full;

  // Slip-Stokes correction: 2 (S G n)_t + alpha G_t = -(2 (S grad phi) n)_t - alpha (grad phi)_t.
  Vector grhs = Vector::Zero(ms.num_dofs());
  for (const BoundaryFacet& f : mesh.facets()) {
    if (f.tag != FacetTag::Wall) continue;
    const auto nodes = mesh.cell(f.cell);
    for (const FacetPoint& p : facet_quadrature(mesh, f)) {
      const PointBasis pb = basis_at(mesh, f.cell, p.ref);
      const BoundaryFrame fr = mesh.wall_frame(p.x);
      const auto hs = eval_scalar_hessian(out.phi, f.cell, p.ref);
      Mat2 hess;
      hess << hs[0], hs[1], hs[1], hs[2];
      const Vec2 gphi = eval_scalar(out.phi, f.cell, pb).grad;
      const double d = -(2.0 * fr.tangent.dot(hess * fr.normal) + g.alpha * fr.tangent.dot(gphi));
      for (int i : basis::kSideNodes[f.side])
        for (int a = 0; a < 2; ++a) grhs[ms.velocity_dof(nodes[i], a)] += p.ds * d * pb.phi[i] * fr.tangent[a];
    }
  }
  // div G = 0 in the continuum; discretely G also absorbs the divergence defect of the
  // projected gradient, f - div(P grad phi), which vanishes under refinement.
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const int cell = static_cast<int>(c);
    cq.reinit(cell);
    const auto pdofs = ms.cell_corner_dofs(cell);
    for (int q = 0; q < cq.size(); ++q) {
      const double defect = out.source(cell, cq[q]) - eval_velocity(out.gradient, cell, cq[q]).grad.trace();
      for (int k = 0; k < 4; ++k) grhs[pdofs[k]] -= cq.jxw(q) * defect * cq[q].psi[k];
    }
  }
  ConstraintRecord rec = make_rotated_record(ms);
  constrain_wall_normals(rec, ms);
  out.correction = Field(ms, solve_constrained_saddle(ms, assemble_stokes_operator(ms, g.alpha), grhs, rec), "G");

  out.field = Field(ms, "A");
  const int nv = ms.num_velocity_dofs();
  out.field.values.head(nv) = out.gradient.values.head(nv) + out.correction.values.head(nv);
  return out;
}

Field solve_divergence_stokes(const CrossSectionDivergence& ref) {
  const Space& ms = *ref.mixed_space;
  const Mesh& mesh = ms.mesh();
  Vector rhs = Vector::Zero(ms.num_dofs());
  CellQuadrature cq(mesh);
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const int cell = static_cast<int>(c);
    cq.reinit(cell);
    const auto pdofs = ms.cell_corner_dofs(cell);
    for (int q = 0; q < cq.size(); ++q) {
      const double s = cq.jxw(q) * ref.source(cell, cq[q]);
      for (int k = 0; k < 4; ++k) rhs[pdofs[k]] -= s * cq[q].psi[k];
    }
  }
  ConstraintRecord rec = make_rotated_record(ms);
  constrain_wall_normals(rec, ms);
  Field a(ms, solve_constrained_saddle(ms, assemble_stokes_operator(ms, ref.alpha), rhs, rec), "A_direct");
  a.values.tail(ms.num_pressure_dofs()).setZero();
  return a;
}

double divergence_residual_l2(const CrossSectionDivergence& sol, const Field& a) {
  const Mesh& mesh = a.space->mesh();
  CellQuadrature cq(mesh);
  double sum = 0.0;
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const int cell = static_cast<int>(c);
    cq.reinit(cell);
    for (int q = 0; q < cq.size(); ++q) {
      const double r = eval_velocity(a, cell, cq[q]).grad.trace() - sol.source(cell, cq[q]);
      sum += cq.jxw(q) * r * r;
    }
  }
  return std::sqrt(sum);
}

ProfileVector::ProfileVector(const PoiseuilleProfile& gl, const PoiseuilleProfile& gr, const FluxCarrier& h,
                             const CutoffEta& eta)
    : gl_(std::make_shared<PoiseuilleProfile>(gl)),
      gr_(std::make_shared<PoiseuilleProfile>(gr)),
      h_(h),
      eta_(eta),
      flux_(gr.flux) {}

Vec2 ProfileVector::value(const Vec2& x) const {
  const double s = x.x(), t = x.y();
  if (t >= eta_.z()) return Vec2(0.0, gr_->value_at(s));
  if (t <= -eta_.z()) return Vec2(0.0, gl_->value_at(s));
  const double h = h_.value(s);
  const double er = eta_.value(t), el = eta_.value(-t);
  const double dr = eta_.d1(t), dl = eta_.d1(-t);
  // A is only evaluated where the cut-off actually varies.
  const double a1 = (dr != 0.0 ? ar_->value(s) * dr : 0.0) - (dl != 0.0 ? al_->value(s) * dl : 0.0);
  double a2 = h;
  if (er != 0.0) a2 += (gr_->value_at(s) - h) * er;
  if (el != 0.0) a2 += (gl_->value_at(s) - h) * el;
  return Vec2(a1, a2);
}

Mat2 ProfileVector::gradient(const Vec2& x) const {
  const double s = x.x(), t = x.y();
  Mat2 g = Mat2::Zero();
  if (std::abs(t) >= eta_.z()) {
    g(1, 0) = (t > 0 ? gr_ : gl_)->derivative_at(s);
    return g;
  }
  const double h = h_.value(s), dh = h_.derivative(s);
  const double er = eta_.value(t), el = eta_.value(-t);
  const double dr = eta_.d1(t), dl = eta_.d1(-t);
  const double gr = gr_->value_at(s), gl = gl_->value_at(s);
  g(0, 0) = (h - gr) * dr - (h - gl) * dl;
  const double d2r = eta_.d2(t), d2l = eta_.d2(-t);
  g(0, 1) = (d2r != 0.0 ? ar_->value(s) * d2r : 0.0) + (d2l != 0.0 ? al_->value(s) * d2l : 0.0);
  g(1, 0) = dh + (gr_->derivative_at(s) - dh) * er + (gl_->derivative_at(s) - dh) * el;
  g(1, 1) = (gr - h) * dr - (gl - h) * dl;
  return g;
}

double ProfileVector::section_flux(double x2) const {
  const double a = lower_.value(x2), b = upper_.value(x2);
  // Split at the carrier support so the integrand is smooth on each panel.
  std::vector<double> cuts{a};
  for (double c : {h_.lo(), h_.hi()})
    if (c > a && c < b) cuts.push_back(c);
  cuts.push_back(b);
  double total = 0.0;
  for (std::size_t k = 1; k < cuts.size(); ++k)
    total += integrate_1d([&](double s) { return value(Vec2(s, x2)).y(); }, cuts[k - 1], cuts[k]);
  return total;
}

ProfileVector assemble_profile_vector(const Space& space, const PoiseuilleProfile& gl, const PoiseuilleProfile& gr,
                                      const FluxCarrier& h, const CutoffEta& eta) {
  const Mesh& mesh = space.mesh();
  if (!space.has_velocity() || !mesh.spec().is_strip())
    throw ContractViolation("profile vectors live on a velocity space over a strip mesh");
  if (gl.flux != gr.flux || h.flux() != gr.flux)
    throw ContractViolation("left, right and carrier fluxes must agree");
  const auto& strip = std::get<DistortedStripDomain>(mesh.spec().kind);
  ProfileVector pv(gl, gr, h, eta);
  pv.lower_ = strip.lower;
  pv.upper_ = strip.upper;
  const double z = eta.z();

  if (z > strip.half_length)
    throw ConstructionError("straight_transition", "cut-off length exceeds the strip half-length");
  if (std::max(strip.lower.distortion_extent(), strip.upper.distortion_extent()) > z / 2.0 + 1e-12)
    throw ConstructionError("straight_transition", "walls must be straight for |x2| >= Z/2 = " + format(z / 2.0));
  if (h.kind() == FluxCarrier::Kind::Radial) throw ContractViolation("strip profile vectors need an interval carrier");
  if (h.kind() == FluxCarrier::Kind::Profile && !(strip.lower.is_flat() && strip.upper.is_flat()))
    throw ConstructionError("carrier_support", "profile carriers are only valid between straight walls");
  if (h.kind() == FluxCarrier::Kind::Bump) {
    double top = -1e300, bottom = 1e300;
    const int samples = 4000;
    for (int k = 0; k <= samples; ++k) {
      const double x2 = -z + 2.0 * z * k / samples;
      top = std::max(top, strip.lower.value(x2));
      bottom = std::min(bottom, strip.upper.value(x2));
    }
    if (!(h.lo() > top && h.hi() < bottom))
      throw ConstructionError("carrier_support", "carrier support must stay inside every cross-section");
  }

  pv.al_ = std::make_shared<DivergencePotential1D>(solve_divergence_1d(h, gl));
  pv.ar_ = std::make_shared<DivergencePotential1D>(solve_divergence_1d(h, gr));

  pv.field_ = interpolate_velocity(space, [&](const Vec2& x) { return pv.value(x); }, "a");

  ProfileVectorChecks& ck = pv.checks_;
  CellQuadrature cq(mesh);
  double div2 = 0.0, idiv2 = 0.0;
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const int cell = static_cast<int>(c);
    cq.reinit(cell);
    for (int q = 0; q < cq.size(); ++q) {
      const double d = pv.gradient(cq[q].x).trace();
      const double di = eval_velocity(pv.field_, cell, cq[q]).grad.trace();
      div2 += cq.jxw(q) * d * d;
      idiv2 += cq.jxw(q) * di * di;
    }
  }
  ck.divergence_l2 = std::sqrt(div2);
  ck.interpolant_divergence_l2 = std::sqrt(idiv2);
  if (ck.divergence_l2 > 1e-10)
    throw ConstructionError("divergence", "||div a|| = " + format(ck.divergence_l2));

  const auto grid = mesh.grid();
  for (int j = 0; j < grid[1]; ++j)
    for (int q = 0; q < 3; ++q)
      pv.stations_.push_back(mesh.map(j * grid[0], Vec2(0.5, basis::Gauss3::points[q])).x.y());
  const double scale = std::max(pv.flux_, 1e-300);
  for (double x2 : pv.stations_)
    ck.flux_drift = std::max(ck.flux_drift, std::abs(pv.section_flux(x2) - pv.flux_) / scale);
  if (ck.flux_drift > 1e-10 && pv.flux_ > 0.0)
    throw ConstructionError("flux", "section flux drift " + format(ck.flux_drift));

  const auto& nodes = mesh.nodes();
  for (int i = 0; i < space.num_nodes(); ++i) {
    const Vec2& x = nodes[i];
    if (std::abs(x.y()) < z) continue;
    const double g = (x.y() > 0 ? gr : gl).value_at(x.x());
    const Vec2 a = nodal_velocity(pv.field_, i);
    ck.outlet_mismatch = std::max({ck.outlet_mismatch, std::abs(a.x()), std::abs(a.y() - g)});
  }
  if (ck.outlet_mismatch != 0.0)
    throw ConstructionError("outlet_match", "a differs from the Poiseuille flow by " + format(ck.outlet_mismatch));

  for (const BoundaryNode& b : mesh.boundary_nodes())
    if (b.on_wall) ck.normal_max = std::max(ck.normal_max, std::abs(nodal_velocity(pv.field_, b.node).dot(b.frame.normal)));
  if (ck.normal_max > 1e-12 * std::max(1.0, pv.flux_))
    throw ConstructionError("impermeability", "max |a . n| = " + format(ck.normal_max));
  return pv;
}

}  // namespace slipflow
