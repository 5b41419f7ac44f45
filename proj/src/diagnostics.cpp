#include "slipflow/diagnostics.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>

#include "slipflow/basis.hpp"
#include "slipflow/errors.hpp"

namespace slipflow {

namespace {

using basis::Gauss3;

std::string format(double v) {
  std::ostringstream os;
  os << std::setprecision(6) << v;
  return os.str();
}

void require_velocity(const Field& f, const char* what) {
  if (!f.space || !f.space->has_velocity()) throw ContractViolation(std::string(what) + ": velocity field required");
}

const DistortedStripDomain& strip_of(const Mesh& mesh, const char* what) {
  const auto* st = std::get_if<DistortedStripDomain>(&mesh.spec().kind);
  if (!st || mesh.grid()[0] <= 0) throw ContractViolation(std::string(what) + ": single-block strip mesh required");
  return *st;
}

double wall_normal_max(const Field& f) {
  double m = 0.0;
  for (const BoundaryNode& b : f.space->mesh().boundary_nodes())
    if (b.on_wall) m = std::max(m, std::abs(nodal_velocity(f, b.node).dot(b.frame.normal)));
  return m;
}

double velocity_inf(const Field& f) {
  double m = 0.0;
  for (int i = 0; i < f.space->num_nodes(); ++i) m = std::max(m, nodal_velocity(f, i).norm());
  return m;
}

template <class Sample>
double payne_integrand(const Sample& s, const Vec2& y) {
  const double div = s.grad.trace();
  return s.value.squaredNorm() + div * y.dot(s.value) + y.dot(s.grad * s.value);
}

// Range of x2 over a cell row of a strip grid.
std::pair<double, double> row_range(const Mesh& mesh, int row) {
  const int cell = row * mesh.grid()[0];
  return {mesh.map(cell, Vec2(0.5, 0.0)).x.y(), mesh.map(cell, Vec2(0.5, 1.0)).x.y()};
}

// Reference eta at which the row reaches axial coordinate x2 (x2 is monotone in eta).
double row_eta(const Mesh& mesh, int row, double x2) {
  const int cell = row * mesh.grid()[0];
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    (mesh.map(cell, Vec2(0.5, mid)).x.y() < x2 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// int |grad v|^2 over the part eta in [e0, e1] of one cell.
double cell_gradient_energy(const Field& v, int cell, double e0, double e1) {
  const Mesh& mesh = v.space->mesh();
  double sum = 0.0;
  for (int qj = 0; qj < Gauss3::size; ++qj)
    for (int qi = 0; qi < Gauss3::size; ++qi) {
      const Vec2 ref(Gauss3::points[qi], e0 + (e1 - e0) * Gauss3::points[qj]);
      const PointBasis b = basis_at(mesh, cell, ref);
      const VectorSample s = eval_velocity(v, cell, b);
      sum += Gauss3::weights[qi] * Gauss3::weights[qj] * (e1 - e0) * b.det * s.grad.squaredNorm();
    }
  return sum;
}

double total_gradient_energy(const Field& v) {
  const double g = velocity_grad_l2(v);
  return g * g;
}

}  // namespace

Check make_check(std::string name, double value, std::string relation, double tolerance, std::string provenance,
                 std::vector<std::pair<std::string, double>> details) {
  if (relation != "<=" && relation != ">=") throw ContractViolation("check relation must be <= or >=");
  Check c;
  c.name = std::move(name);
  c.value = value;
  c.relation = std::move(relation);
  c.tolerance = tolerance;
  c.passed = std::isfinite(value) && (c.relation == "<=" ? value <= tolerance : value >= tolerance);
  c.provenance = std::move(provenance);
  c.details = std::move(details);
  return c;
}

bool Report::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

const Check* Report::find(const std::string& name) const {
  for (const Check& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

std::string Report::to_text() const {
  std::ostringstream os;
  std::size_t key = 0, name = 5;
  for (const auto& [k, v] : environment) key = std::max(key, k.size());
  for (const Check& c : checks) name = std::max(name, c.name.size());
  for (const auto& [k, v] : environment) os << std::left << std::setw(static_cast<int>(key)) << k << "  " << v << '\n';
  if (!environment.empty()) os << '\n';
  os << std::left << std::setw(static_cast<int>(name)) << "check" << "  " << std::setw(14) << "value"
     << "  " << std::setw(2) << "" << "  " << std::setw(12) << "tolerance" << "  result  provenance\n";
  for (const Check& c : checks) {
    os << std::left << std::setw(static_cast<int>(name)) << c.name << "  " << std::setw(14) << format(c.value) << "  "
       << c.relation << "  " << std::setw(12) << format(c.tolerance) << "  " << (c.passed ? "PASS  " : "FAIL  ") << "  "
       << c.provenance << '\n';
  }
  os << (passed() ? "all checks passed\n" : "some checks failed\n");
  return os.str();
}

FluxProfile flux_profile(const Field& u, double reference) {
  require_velocity(u, "flux_profile");
  const Mesh& mesh = u.space->mesh();
  strip_of(mesh, "flux_profile");
  const int across = mesh.grid()[0], along = mesh.grid()[1];
  FluxProfile fp;
  using Rule = boost::math::quadrature::gauss<double, 5>;
  for (int j = 0; j < along; ++j)
    for (int q = 0; q < Gauss3::size; ++q) {
      const double eta = Gauss3::points[q];
      double flux = 0.0;
      for (int i = 0; i < across; ++i) {
        const int cell = i + across * j;
        flux += Rule::integrate(
            [&](double xi) {
              const Vec2 ref(xi, eta);
              const MapEval m = mesh.map(cell, ref);
              const Vec2 w = eval_velocity(u, cell, ref).value;
              // Flux through the curve eta = const, oriented along +x2.
              return w.y() * m.jac(0, 0) - w.x() * m.jac(1, 0);
            },
            0.0, 1.0);
      }
      fp.stations.push_back(mesh.map(across * j, Vec2(0.5, eta)).x.y());
      fp.fluxes.push_back(flux);
    }
  if (reference < 0.0) {
    double s = 0.0;
    for (double f : fp.fluxes) s += f;
    reference = fp.fluxes.empty() ? 0.0 : s / static_cast<double>(fp.fluxes.size());
  }
  fp.reference = reference;
  const double scale = reference != 0.0 ? std::abs(reference) : 1.0;
  for (double f : fp.fluxes) fp.max_drift = std::max(fp.max_drift, std::abs(f - reference) / scale);
  return fp;
}

Vec2 centroid(const Mesh& mesh) {
  Vec2 s = Vec2::Zero();
  double area = 0.0;
  CellQuadrature cq(mesh);
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    cq.reinit(static_cast<int>(c));
    for (int q = 0; q < cq.size(); ++q) {
      s += cq.jxw(q) * cq[q].x;
      area += cq.jxw(q);
    }
  }
  return s / area;
}

double payne_residual(const Field& f, const Vec2& x0) {
  require_velocity(f, "payne_residual");
  const double nmax = wall_normal_max(f);
  if (nmax > 1e-10 * std::max(1.0, velocity_inf(f)))
    throw ContractViolation("payne_residual: normal trace " + format(nmax) + " at a wall node");
  const Mesh& mesh = f.space->mesh();
  CellQuadrature cq(mesh);
  double sum = 0.0;
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    cq.reinit(static_cast<int>(c));
    for (int q = 0; q < cq.size(); ++q)
      sum += cq.jxw(q) * payne_integrand(eval_velocity(f, static_cast<int>(c), cq[q]), cq[q].x - x0);
  }
  return std::abs(sum);
}

double payne_residual(const Mesh& mesh, const std::function<VectorSample(const Vec2&)>& f, const Vec2& x0) {
  CellQuadrature cq(mesh);
  double sum = 0.0;
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    cq.reinit(static_cast<int>(c));
    for (int q = 0; q < cq.size(); ++q) sum += cq.jxw(q) * payne_integrand(f(cq[q].x), cq[q].x - x0);
  }
  return std::abs(sum);
}

const char* to_string(PoincareMode mode) {
  switch (mode) {
    case PoincareMode::Transverse: return "transverse";
    case PoincareMode::FluxSubtracted: return "flux-subtracted";
    case PoincareMode::Truncated: return "truncated";
  }
  return "unknown";
}

PoincareResult poincare_ratio(const Field& w, PoincareMode mode, double tolerance) {
  require_velocity(w, "poincare_ratio");
  PoincareResult r;
  const double l2 = velocity_l2(w), g = velocity_grad_l2(w);
  const double scale = std::max(l2, 1e-300);
  if (mode == PoincareMode::Transverse || mode == PoincareMode::Truncated)
    r.violation = std::max(r.violation, wall_normal_max(w) / scale);
  if (mode == PoincareMode::FluxSubtracted || mode == PoincareMode::Truncated) {
    const FluxProfile fp = flux_profile(w, 0.0);
    if (mode == PoincareMode::FluxSubtracted) {
      for (double f : fp.fluxes) r.violation = std::max(r.violation, std::abs(f) / scale);
    } else {
      const double z = strip_of(w.space->mesh(), "poincare_ratio").distortion_half_length;
      std::size_t k = 0;
      for (std::size_t i = 1; i < fp.stations.size(); ++i)
        if (std::abs(fp.stations[i] - 0.5 * z) < std::abs(fp.stations[k] - 0.5 * z)) k = i;
      r.violation = std::max(r.violation, std::abs(fp.fluxes[k]) / scale);
    }
  }
  if (r.violation > tolerance)
    throw ContractViolation(std::string("poincare_ratio (") + to_string(mode) + "): hypothesis violated by " +
                            format(r.violation));
  if (g == 0.0) throw ContractViolation("poincare_ratio: zero gradient");
  r.ratio = l2 / g;
  return r;
}

double korn_combined_ratio(const Field& u, double alpha) {
  require_velocity(u, "korn_combined_ratio");
  const Mesh& mesh = u.space->mesh();
  CellQuadrature cq(mesh);
  double stress = 0.0, grad = 0.0, wall = 0.0;
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    cq.reinit(static_cast<int>(c));
    for (int q = 0; q < cq.size(); ++q) {
      const Mat2 g = eval_velocity(u, static_cast<int>(c), cq[q]).grad;
      const Mat2 s = 0.5 * (g + g.transpose());
      stress += cq.jxw(q) * s.squaredNorm();
      grad += cq.jxw(q) * g.squaredNorm();
    }
  }
  if (alpha != 0.0) {
    for (const BoundaryFacet& f : mesh.facets()) {
      if (f.tag != FacetTag::Wall) continue;
      for (const FacetPoint& p : facet_quadrature(mesh, f)) {
        const double t = mesh.wall_frame(p.x).tangent.dot(eval_velocity(u, f.cell, p.ref).value);
        wall += p.ds * t * t;
      }
    }
  }
  if (grad == 0.0) throw ContractViolation("korn_combined_ratio: zero gradient");
  return (2.0 * stress + alpha * wall) / grad;
}

SlipResidual slip_residual_curvilinear(const Field& u, double alpha) {
  require_velocity(u, "slip_residual_curvilinear");
  const Mesh& mesh = u.space->mesh();
  SlipResidual r;
  double sum = 0.0, nsum = 0.0;
  for (const BoundaryFacet& f : mesh.facets()) {
    if (f.tag != FacetTag::Wall) continue;
    for (const FacetPoint& p : facet_quadrature(mesh, f)) {
      const VectorSample s = eval_velocity(u, f.cell, p.ref);
      const BoundaryFrame fr = mesh.wall_frame(p.x);
      const double ut = fr.tangent.dot(s.value);
      const double dn_ut = fr.tangent.dot(s.grad * fr.normal);
      const double res = dn_ut - (fr.curvature - alpha) * ut;
      const double un = fr.normal.dot(s.value);
      r.points.push_back(p.x);
      r.residual.push_back(res);
      r.normal.push_back(un);
      sum += p.ds * res * res;
      nsum += p.ds * un * un;
      r.max_abs = std::max(r.max_abs, std::abs(res));
    }
  }
  r.l2 = std::sqrt(sum);
  r.normal_l2 = std::sqrt(nsum);
  r.nodal_normal_max = wall_normal_max(u);
  return r;
}

double robin_residual(const Field& g, double alpha) {
  if (!g.space || g.space->family() != SpaceFamily::ScalarQ2 || g.space->mesh().dim() != 2)
    throw ContractViolation("robin_residual: scalar Q2 field on a 2D cross-section required");
  const Mesh& mesh = g.space->mesh();
  double sum = 0.0;
  for (const BoundaryFacet& f : mesh.facets()) {
    if (f.tag != FacetTag::Wall) continue;
    for (const FacetPoint& p : facet_quadrature(mesh, f)) {
      const ScalarSample s = eval_scalar(g, f.cell, p.ref);
      const double r = s.grad.dot(mesh.wall_frame(p.x).normal) + alpha * s.value;
      sum += p.ds * r * r;
    }
  }
  return std::sqrt(sum);
}

double tail_energy(const Field& v, double s, Outlet outlet) {
  require_velocity(v, "tail_energy");
  const Mesh& mesh = v.space->mesh();
  strip_of(mesh, "tail_energy");
  const int across = mesh.grid()[0], along = mesh.grid()[1];
  double sum = 0.0;
  for (int j = 0; j < along; ++j) {
    const auto [lo, hi] = row_range(mesh, j);
    double e0 = 0.0, e1 = 1.0;
    if (outlet == Outlet::Right) {
      if (hi <= s) continue;
      if (lo < s) e0 = row_eta(mesh, j, s);
    } else {
      if (lo >= -s) continue;
      if (hi > -s) e1 = row_eta(mesh, j, -s);
    }
    for (int i = 0; i < across; ++i) sum += cell_gradient_energy(v, i + across * j, e0, e1);
  }
  return sum;
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw ContractViolation("fit_line needs at least two points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw ContractViolation("fit_line: abscissae coincide");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double sse = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = y[i] - (f.intercept + f.slope * x[i]);
    sse += e * e;
  }
  f.r2 = syy > 0.0 ? 1.0 - sse / syy : 1.0;
  return f;
}

DecayFit decay_fit(const Field& v, const std::vector<double>& stations, Outlet outlet, const Field* reference) {
  require_velocity(v, "decay_fit");
  const Mesh& mesh = v.space->mesh();
  const auto& st = strip_of(mesh, "decay_fit");
  if (stations.size() < 4) throw ContractViolation("decay_fit needs at least four stations");
  for (std::size_t i = 0; i < stations.size(); ++i) {
    if (!(stations[i] > st.distortion_half_length + 1.0 && stations[i] < st.half_length - 1.0))
      throw ContractViolation("decay_fit: station " + format(stations[i]) + " outside (Z + 1, zeta - 1)");
    if (i > 0 && !(stations[i] > stations[i - 1])) throw ContractViolation("decay_fit: stations must ascend");
  }
  DecayFit fit;
  const double eps = std::numeric_limits<double>::epsilon();
  double energy_scale = total_gradient_energy(v), sup_scale = velocity_inf(v);
  if (reference) {
    require_velocity(*reference, "decay_fit");
    energy_scale = std::max(energy_scale, total_gradient_energy(*reference));
    sup_scale = std::max(sup_scale, velocity_inf(*reference));
  }
  fit.noise_floor = 100.0 * eps * energy_scale;
  const double sup_floor = 100.0 * eps * sup_scale;
  const auto& nodes = mesh.nodes();
  std::vector<double> xs, ys, px, py;
  for (double s : stations) {
    const double g = tail_energy(v, s, outlet);
    fit.stations.push_back(s);
    fit.energies.push_back(g);
    if (g > fit.noise_floor && g > 0.0) {
      xs.push_back(s);
      ys.push_back(std::log(g));
    } else {
      fit.dropped.push_back(s);
    }
    // Node row closest to the station.
    const double target = outlet == Outlet::Right ? s : -s;
    double best = std::numeric_limits<double>::infinity();
    for (const Vec2& x : nodes) best = std::min(best, std::abs(x.y() - target));
    double sup = 0.0;
    for (int i = 0; i < v.space->num_nodes(); ++i)
      if (std::abs(std::abs(nodes[i].y() - target) - best) <= 1e-12) sup = std::max(sup, nodal_velocity(v, i).norm());
    fit.sup_values.push_back(sup);
    if (sup > sup_floor && sup > 0.0) {
      px.push_back(s);
      py.push_back(std::log(sup));
    }
  }
  if (xs.size() >= 2) {
    const LineFit f = fit_line(xs, ys);
    fit.void_fit = false;
    fit.sigma = -f.slope;
    fit.prefactor = std::exp(f.intercept);
    fit.r2 = f.r2;
  }
  if (px.size() >= 2) {
    const LineFit f = fit_line(px, py);
    fit.pointwise_void = false;
    fit.pointwise_sigma = -f.slope;
    fit.pointwise_prefactor = std::exp(f.intercept);
    fit.pointwise_r2 = f.r2;
  }
  return fit;
}

EnergyLinearity energy_linearity(const std::vector<NSSolution>& solutions) {
  std::vector<const NSSolution*> ok;
  for (const NSSolution& s : solutions)
    if (s.converged && s.flux > 0.0) ok.push_back(&s);
  std::sort(ok.begin(), ok.end(), [](const NSSolution* a, const NSSolution* b) { return a->flux < b->flux; });
  for (std::size_t i = 1; i < ok.size(); ++i)
    if (ok[i]->flux == ok[i - 1]->flux) throw ContractViolation("energy_linearity: repeated flux");
  if (ok.size() < 2) throw ContractViolation("energy_linearity needs two converged solutions at positive flux");
  EnergyLinearity e;
  for (const NSSolution* s : ok) {
    const double h1 = velocity_h1(s->deficit);
    e.rows.push_back({s->flux, h1, h1 / s->flux});
  }
  const double r0 = e.rows[0].ratio, scale = std::max(std::abs(r0), 1e-300);
  e.small_flux_deviation = std::abs(e.rows[1].ratio - r0) / scale;
  for (const EnergyRow& r : e.rows) e.max_deviation = std::max(e.max_deviation, std::abs(r.ratio - r0) / scale);
  // Exactly zero deficits (straight strips) give zero deviation.
  if (r0 == 0.0) {
    e.small_flux_deviation = e.rows[1].ratio;
    e.max_deviation = 0.0;
    for (const EnergyRow& r : e.rows) e.max_deviation = std::max(e.max_deviation, r.ratio);
  }
  return e;
}

bool newton_quadratic(const std::vector<NSIteration>& history) {
  std::vector<double> lr;
  for (const NSIteration& it : history) {
    if (it.kind == "newton") {
      lr.push_back(std::log10(std::max(it.residual, 1e-300)));
    } else {
      lr.assign(1, std::log10(std::max(it.residual, 1e-300)));
    }
  }
  if (lr.size() < 3) return false;
  const std::size_t n = lr.size();
  const auto second = [&](std::size_t k) { return lr[k] - 2.0 * lr[k - 1] + lr[k - 2]; };
  if (second(n - 1) >= 0.0) return false;
  return n < 4 || second(n - 2) < 0.0;
}

double subdomain_h1_distance(const Field& a, const Field& b, double extent) {
  require_velocity(a, "subdomain_h1_distance");
  require_velocity(b, "subdomain_h1_distance");
  const Mesh& ma = a.space->mesh();
  const Mesh& mb = b.space->mesh();
  const double tol = 1e-10;
  const auto key = [](const Vec2& x) { return std::make_pair(std::llround(x.x() * 1e8), std::llround(x.y() * 1e8)); };
  std::map<std::pair<long long, long long>, int> centers;
  for (std::size_t c = 0; c < mb.num_cells(); ++c) centers.emplace(key(mb.nodes()[mb.cell(c)[4]]), static_cast<int>(c));
  CellQuadrature cq(ma);
  double sum = 0.0;
  for (std::size_t c = 0; c < ma.num_cells(); ++c) {
    const auto na = ma.cell(c);
    bool inside = true;
    for (int n : na) inside = inside && std::abs(ma.nodes()[n].y()) <= extent + 1e-12;
    if (!inside) continue;
    const auto it = centers.find(key(ma.nodes()[na[4]]));
    if (it == centers.end()) throw ContractViolation("subdomain_h1_distance: meshes do not share a cell");
    const auto nb = mb.cell(it->second);
    for (int k = 0; k < 9; ++k)
      if ((ma.nodes()[na[k]] - mb.nodes()[nb[k]]).norm() > tol)
        throw ContractViolation("subdomain_h1_distance: meshes do not share a cell");
    cq.reinit(static_cast<int>(c));
    for (int q = 0; q < cq.size(); ++q) {
      const VectorSample sa = eval_velocity(a, static_cast<int>(c), cq[q]);
      const VectorSample sb = eval_velocity(b, it->second, cq[q]);
      sum += cq.jxw(q) * ((sa.value - sb.value).squaredNorm() + (sa.grad - sb.grad).squaredNorm());
    }
  }
  return std::sqrt(sum);
}

}  // namespace slipflow
