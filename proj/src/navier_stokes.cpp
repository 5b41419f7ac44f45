#include "slipflow/navier_stokes.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "slipflow/constraints.hpp"
#include "slipflow/errors.hpp"
#include "slipflow/forms.hpp"
#include "slipflow/linear_solver.hpp"
#include "slipflow/stokes.hpp"

namespace slipflow {

namespace {

void validate(const NSProblem& p) {
  if (!p.space || !p.space->has_pressure()) throw ContractViolation("Navier-Stokes problems need a mixed space");
  if (!p.space->mesh().spec().is_strip()) throw ContractViolation("Navier-Stokes problems are posed on strips");
  if (!p.profile) throw ContractViolation("Navier-Stokes problems need a profile vector");
  if (&p.profile->field().space->mesh() != &p.space->mesh())
    throw ContractViolation("profile vector and space live on different meshes");
  if (!(p.flux >= 0.0)) throw ContractViolation("flux must be non-negative");
  if (p.flux > 0.0 && !(p.profile->flux() > 0.0))
    throw ContractViolation("a zero-flux profile vector cannot be rescaled to a positive flux");
  if (p.flux > p.options.flux_ceiling) throw ContractViolation("flux exceeds the configured continuation ceiling");
  const NSOptions& o = p.options;
  if (!(o.absolute_tolerance > 0.0 && o.relative_tolerance > 0.0))
    throw ContractViolation("solver tolerances must be positive");
}

// Everything that stays fixed during one nonlinear solve.
struct Context {
  const Space& space;
  double alpha;
  Field lifting;
  SparseMatrix stokes;
  ConstraintRecord rec;    // walls: u . n = 0, ends: u = a_h
  ConstraintRecord rec0;   // same dofs, homogeneous values
  SparseSPD dual;
  Vector mean;             // reduced pressure-mean vector m
  Vector dual_mean;        // M^-1 m
  double mean_norm2 = 0.0; // m^t M^-1 m

  Context(const NSProblem& p) : space(*p.space), alpha(p.space->mesh().spec().alpha), lifting(*p.space, "a") {
    const int nv = space.num_velocity_dofs();
    const double scale = p.flux == 0.0 ? 0.0 : p.flux / p.profile->flux();
    lifting.values.head(nv) = scale * p.profile->field().values.head(nv);
    stokes = assemble_stokes_operator(space, alpha);
    rec = make_rotated_record(space);
    constrain_wall_normals(rec, space);
    constrain_end_velocity(rec, space, [&](int node) { return nodal_velocity(lifting, node); });
    rec0 = rec;
    rec0.fixed_values.setZero();
    const SparseMatrix mass = assemble_velocity_mass(space) + assemble_pressure_mass(space);
    dual.factor(reduce_matrix(rec, mass));
    mean = restrict_to_free(rec, pressure_mean_vector(space));
    dual_mean = dual.solve(mean);
    mean_norm2 = mean.dot(dual_mean);
  }

  Vector residual(const Vector& x) const {
    const Field u(space, x);
    return stokes * x + assemble_convection(space, u) * x;
  }

  // The pressure gauge multiplier lambda enters every solve as R + lambda m = 0; on curved
  // walls the constant pressure is not an exact kernel mode, so lambda is generally nonzero.
  // The residual is measured with the optimal lambda removed.
  double multiplier(const Vector& r) const { return -restrict_to_free(rec, r).dot(dual_mean) / mean_norm2; }

  double norm(const Vector& r) const {
    const Vector rr = restrict_to_free(rec, r) + multiplier(r) * mean;
    return std::sqrt(std::max(0.0, rr.dot(dual.solve(rr))));
  }

  Vector picard(const Vector& x) const {
    const Field u(space, x);
    const SparseMatrix m = stokes + assemble_convection(space, u);
    return solve_constrained_saddle(space, m, Vector::Zero(space.num_dofs()), rec);
  }

  Vector newton_step(const Vector& x, const Vector& r) const {
    const Field u(space, x);
    const SparseMatrix j = stokes + assemble_convection(space, u) + assemble_convection_reaction(space, u);
    return solve_constrained_saddle(space, j, -r, rec0);
  }

  Vector admissible(const Vector& x) const { return expand(rec, restrict_to_free(rec, x)); }
};

std::string describe(const std::vector<NSIteration>& h) {
  std::ostringstream os;
  os.precision(3);
  for (std::size_t k = 0; k < h.size(); ++k)
    os << (k ? "; " : "") << h[k].kind << ' ' << std::scientific << h[k].residual;
  return os.str();
}

void finish(const NSProblem& p, const Context& ctx, NSSolution& sol, const Vector& x) {
  const Space& s = ctx.space;
  const int nv = s.num_velocity_dofs();
  sol.state = Field(s, x, "u");
  sol.lifting = ctx.lifting;
  sol.deficit = Field(s, "v");
  sol.deficit.values.head(nv) = x.head(nv) - ctx.lifting.values.head(nv);

  // Pi = p + flux (I(x2) / C_R - I(-x2) / C_L), then gauged to zero mean.
  const CutoffEta& eta = p.profile->eta();
  const double cr = p.profile->right().flux_constant.value, cl = p.profile->left().flux_constant.value;
  Field shift(s, "shift");
  for (int node : s.mesh().corner_nodes()) {
    const double x2 = s.mesh().nodes()[node].y();
    shift.values[s.pressure_dof(node)] = p.flux * (eta.integral(x2) / cr - eta.integral(-x2) / cl);
  }
  sol.pi = Field(s, "Pi");
  sol.pi.values.tail(s.num_pressure_dofs()) = x.tail(s.num_pressure_dofs()) + shift.values.tail(s.num_pressure_dofs());
  const double mean = pressure_integral(sol.pi) / s.mesh().measure();
  sol.pi.values.tail(s.num_pressure_dofs()).array() -= mean;
  sol.pressure = Field(s, "p");
  sol.pressure.values.tail(s.num_pressure_dofs()) =
      sol.pi.values.tail(s.num_pressure_dofs()) - shift.values.tail(s.num_pressure_dofs());
}

}  // namespace

double ns_residual_norm(const NSProblem& problem, const Field& state) {
  validate(problem);
  const Context ctx(problem);
  return ctx.norm(ctx.residual(state.values));
}

NSSolution solve_ns(const NSProblem& problem, const Field* initial_deficit) {
  validate(problem);
  const Context ctx(problem);
  const Space& s = ctx.space;
  const int nv = s.num_velocity_dofs();
  const NSOptions& o = problem.options;

  NSSolution sol;
  sol.flux = problem.flux;
  Vector x = Vector::Zero(s.num_dofs());
  x.head(nv) = ctx.lifting.values.head(nv);
  if (initial_deficit) {
    if (initial_deficit->values.size() < nv) throw ContractViolation("initial deficit has the wrong size");
    x.head(nv) += initial_deficit->values.head(nv);
  }
  x = ctx.admissible(x);

  double r = ctx.norm(ctx.residual(x));
  sol.initial_residual = r;
  const double tol = std::max(o.absolute_tolerance, o.relative_tolerance * r);
  auto done = [&](double res) { return res <= tol; };
  auto abort = [&](const std::string& why) {
    sol.status = why + " (history: " + describe(sol.history) + ")";
    sol.final_residual = r;
    finish(problem, ctx, sol, x);
    return sol;
  };

  if (!done(r)) {
    for (int k = 0; k < o.picard_steps; ++k) {
      const Vector xn = ctx.picard(x);
      const double rn = ctx.norm(ctx.residual(xn));
      sol.history.push_back({"picard", rn, (xn - x).lpNorm<Eigen::Infinity>(), 1.0});
      ++sol.picard_steps;
      if (!std::isfinite(rn)) return abort("non-finite residual");
      x = xn;
      r = rn;
      if (done(r)) break;
    }
  }

  int slow = 0;
  bool stagnated = false;
  while (!done(r) && sol.newton_steps < o.max_newton) {
    const Vector res = ctx.residual(x);
    const Vector dx = ctx.newton_step(x, res);
    double lambda = 1.0, rn = 0.0;
    Vector xn;
    for (int t = 0; t < 6; ++t, lambda /= 2.0) {
      xn = x + lambda * dx;
      rn = ctx.norm(ctx.residual(xn));
      if (std::isfinite(rn) && rn < r) break;
    }
    ++sol.newton_steps;
    sol.history.push_back({"newton", rn, lambda * dx.lpNorm<Eigen::Infinity>(), lambda});
    if (!std::isfinite(rn)) return abort("non-finite residual");
    slow = (rn > 0.9 * r || lambda < 1.0) ? slow + 1 : 0;
    x = xn;
    r = rn;
    if (slow >= 3) {
      stagnated = true;
      break;
    }
  }

  if (!done(r) && (stagnated || sol.newton_steps >= o.max_newton)) {
    sol.fell_back_to_picard = true;
    for (int k = 0; k < o.max_picard && !done(r); ++k) {
      const Vector xn = ctx.picard(x);
      const double rn = ctx.norm(ctx.residual(xn));
      sol.history.push_back({"picard", rn, (xn - x).lpNorm<Eigen::Infinity>(), 1.0});
      ++sol.picard_steps;
      if (!std::isfinite(rn)) return abort("non-finite residual");
      x = xn;
      r = rn;
    }
  }

  sol.final_residual = r;
  sol.gauge_multiplier = ctx.multiplier(ctx.residual(x));
  sol.converged = done(r);
  if (sol.converged)
    sol.status = sol.fell_back_to_picard ? "converged after Picard fallback" : "converged";
  else
    sol.status = "not converged (history: " + describe(sol.history) + ")";
  finish(problem, ctx, sol, x);
  return sol;
}

ContinuationResult continuation_sweep(const NSProblem& problem, const std::vector<double>& fluxes) {
  for (std::size_t k = 1; k < fluxes.size(); ++k)
    if (fluxes[k] < fluxes[k - 1]) throw ContractViolation("continuation fluxes must be ascending");
  ContinuationResult out;
  Field start;
  double previous = 0.0;
  for (double flux : fluxes) {
    NSProblem p = problem;
    p.flux = flux;
    Field guess;
    const Field* init = nullptr;
    if (!out.solutions.empty() && previous > 0.0) {
      guess = out.solutions.back().deficit;
      guess.values *= flux / previous;
      init = &guess;
    }
    NSSolution sol = solve_ns(p, init);
    const bool ok = sol.converged;
    if (!ok && out.solutions.empty()) sol.status = "first step failed from a zero start: " + sol.status;
    out.solutions.push_back(std::move(sol));
    if (!ok) {
      out.reached_end = false;
      break;
    }
    out.largest_converged_flux = flux;
    previous = flux;
  }
  return out;
}

namespace {

// Streamfunction mask vanishing on both walls and, to second order, on both ends.
struct Mask {
  WallFunction lower, upper;
  double zeta;

  ScalarSample operator()(const Vec2& x) const {
    const double s = x.x(), t = x.y();
    const double bl = lower.value(t), bu = upper.value(t);
    const double w = (s - bl) * (bu - s);
    const double dws = (bu - s) - (s - bl);
    const double dwt = -lower.slope(t) * (bu - s) + (s - bl) * upper.slope(t);
    const double q = (zeta * zeta - t * t) / (zeta * zeta);
    const double e = q * q, de = 2.0 * q * (-2.0 * t / (zeta * zeta));
    ScalarSample m;
    m.value = w * e;
    m.grad = Vec2(dws * e, dwt * e + w * de);
    return m;
  }

  double axial(double t) const {
    const double q = (zeta * zeta - t * t) / (zeta * zeta);
    return q * q;
  }
};

Field noise_start(const Space& s, const Mask& mask, std::mt19937_64& rng, double amplitude) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> freq(0.5, 4.0), phase(0.0, 2.0 * std::acos(-1.0));
  struct Mode {
    double c, k1, k2, th;
  };
  std::vector<Mode> modes(8);
  for (Mode& m : modes) m = {normal(rng), freq(rng), freq(rng), phase(rng)};
  // u = curl psi with psi = mask * sum c sin(k . x + theta).
  Field f = interpolate_velocity(s, [&](const Vec2& x) {
    double r = 0.0;
    Vec2 dr = Vec2::Zero();
    for (const Mode& m : modes) {
      const double arg = m.k1 * x.x() + m.k2 * x.y() + m.th;
      r += m.c * std::sin(arg);
      dr += m.c * std::cos(arg) * Vec2(m.k1, m.k2);
    }
    const ScalarSample w = mask(x);
    const Vec2 g = r * w.grad + w.value * dr;
    return Vec2(g.y(), -g.x());
  });
  const double n = velocity_h1(f);
  if (n > 0.0) f.values *= amplitude / n;
  return f;
}

}  // namespace

UniquenessResult uniqueness_probe(const NSProblem& problem, int starts, std::uint64_t seed) {
  validate(problem);
  if (starts < 2) throw ContractViolation("uniqueness probe needs at least two starts");
  const Space& s = *problem.space;
  const auto& strip = std::get<DistortedStripDomain>(s.mesh().spec().kind);
  const Mask mask{strip.lower, strip.upper, strip.half_length};
  const int nv = s.num_velocity_dofs();
  const double scale = problem.flux == 0.0 ? 0.0 : problem.flux / problem.profile->flux();
  const double amplitude = 0.5 * std::max(scale * velocity_h1(problem.profile->field()), 1e-3);
  std::mt19937_64 rng(seed);

  UniquenessResult out;
  for (int k = 0; k < starts; ++k) {
    Field init(s, "start");
    std::string name;
    if (k == 0) {
      name = "zero";
    } else if (k == 1) {
      name = "masked profile";
      for (int i = 0; i < s.num_nodes(); ++i) {
        const Vec2 a = nodal_velocity(problem.profile->field(), i);
        set_nodal_velocity(init, i, 0.5 * scale * mask.axial(s.mesh().nodes()[i].y()) * a);
      }
    } else {
      name = "noise " + std::to_string(k - 1);
      init.values.head(nv) = noise_start(s, mask, rng, amplitude).values.head(nv);
    }
    NSSolution sol = solve_ns(problem, &init);
    if (!sol.converged) {
      out.excluded.push_back(name + ": " + sol.status);
      continue;
    }
    out.starts.push_back(name);
    out.solutions.push_back(std::move(sol));
  }
  for (std::size_t i = 0; i < out.solutions.size(); ++i)
    for (std::size_t j = 0; j < out.solutions.size(); ++j) {
      if (i == j) continue;
      Field d(s, out.solutions[i].deficit.values - out.solutions[j].deficit.values);
      const double ref = std::max(velocity_h1(out.solutions[i].deficit), 1e-14);
      const double dist = velocity_h1(d);
      out.max_absolute_distance = std::max(out.max_absolute_distance, dist);
      out.max_distance = std::max(out.max_distance, dist / ref);
    }
  return out;
}

}  // namespace slipflow
