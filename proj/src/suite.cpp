#include "slipflow/suite.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>

#include "slipflow/errors.hpp"
#include "slipflow/scenario.hpp"

namespace slipflow {

namespace {

using Clock = std::chrono::steady_clock;

const char* const kTitles[11] = {"closed-form strip Poiseuille", "closed-form disk Poiseuille",
                                 "cross-section energy identity", "profile vector", "straight-strip exactness",
                                 "flux constancy", "energy bound linearity", "uniqueness probe", "exponential decay",
                                 "identity suite", "construction independence"};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

Check timing_check(std::string name, double seconds, double limit) {
  Check c = make_check(std::move(name), seconds, "<=", limit, "wall clock, seconds");
  c.timing = true;
  return c;
}

double order(double coarse, double fine, double ratio = 2.0) { return std::log(coarse / fine) / std::log(ratio); }

// Shared state of one suite run: the reference solutions are reused across criteria.
struct Runner {
  const RunConfig& config;
  std::uint64_t seed;
  int base;
  int fine;
  double flux;
  std::vector<double> section_gaps;     // relative energy-identity gaps of every cross-section solve
  std::vector<double> korn;             // Korn-combined ratios of converged nonzero deficits

  std::unique_ptr<StripSetup> strip;
  NSSolution solution;
  Field checked;  // the solution velocity the checks see (after any injection)

  Runner(const RunConfig& c, std::uint64_t s)
      : config(c),
        seed(s),
        base(c.resolutions.front()),
        fine(c.resolutions.size() > 1 ? c.resolutions[1] : 2 * c.resolutions.front()),
        flux(c.flux()) {}

  void record(const PoiseuilleProfile& g) { section_gaps.push_back(g.flux_constant.relative_gap); }

  void keep_deficit(const NSSolution& s) {
    if (!s.converged || velocity_h1(s.deficit) == 0.0) return;
    korn.push_back(korn_combined_ratio(s.deficit, config.alpha));
  }

  const NSSolution& reference() {
    if (!strip) {
      strip = std::make_unique<StripSetup>(config, base, config.zeta);
      record(strip->section_profile());
      solution = solve_ns(strip->problem(flux));
      keep_deficit(solution);
      checked = solution.state;
      if (config.inject_normal != 0.0)
        for (const BoundaryNode& b : strip->mesh().boundary_nodes())
          if (b.on_wall && !b.on_end)
            set_nodal_velocity(checked, b.node, nodal_velocity(checked, b.node) + config.inject_normal * b.frame.normal);
    }
    return solution;
  }

  Criterion strip_poiseuille() {
    Criterion c{1, kTitles[0], {}, {}};
    const auto t0 = Clock::now();
    const PoiseuilleProfile p = poiseuille_profile(DomainSpec{IntervalDomain{1.0}, 1.0}, 8, 1.0);
    const double mid = p.value_at(0.5), lo = p.value_at(0.0), hi = p.value_at(1.0);
    const double t = seconds_since(t0);
    record(p);
    c.checks.push_back(make_check("midpoint", std::abs(mid - 15.0 / 14.0), "<=", 1e-10,
                                  "interval, alpha 1, flux 1, resolution 8", {{"value", mid}, {"expected", 15.0 / 14.0}}));
    c.checks.push_back(make_check("wall", std::max(std::abs(lo - 6.0 / 7.0), std::abs(hi - 6.0 / 7.0)), "<=", 1e-10,
                                  "interval, alpha 1, flux 1, resolution 8", {{"left", lo}, {"right", hi}, {"expected", 6.0 / 7.0}}));
    c.checks.push_back(timing_check("runtime", t, 1.0));
    return c;
  }

  Criterion disk_poiseuille() {
    Criterion c{2, kTitles[1], {}, {}};
    const auto t0 = Clock::now();
    const DomainSpec disk{DiskDomain{1.0}, 1.0};
    const ClosedFormPoiseuille exact = closed_form_reference(disk, 1.0);
    std::vector<double> rel;
    double cp = 0.0;
    std::vector<std::pair<std::string, double>> details;
    for (int res : {8, 16, 32, 64}) {
      const PoiseuilleProfile p = poiseuille_profile(disk, res, 1.0);
      record(p);
      const double norm = scalar_l2_error(Field(*p.space), exact.profile);
      rel.push_back(scalar_l2_error(p.profile, exact.profile) / norm);
      details.emplace_back("relative_l2_res" + std::to_string(res), rel.back());
      cp = p.flux_constant.value;
    }
    double worst = std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k < rel.size(); ++k) worst = std::min(worst, order(rel[k - 1], rel[k]));
    const double t = seconds_since(t0);
    const double cp_exact = 5.0 * std::numbers::pi / 8.0;
    c.checks.push_back(make_check("relative_l2_res64", rel.back(), "<=", 1e-4, "unit disk, alpha 1, flux 1", details));
    c.checks.push_back(make_check("order", worst, ">=", 2.5, "minimum over 8-16-32-64"));
    c.checks.push_back(make_check("flux_constant", std::abs(cp - cp_exact) / cp_exact, "<=", 1e-6, "resolution 64",
                                  {{"value", cp}, {"expected", cp_exact}}));
    c.checks.push_back(timing_check("runtime", t, 30.0));
    return c;
  }

  Criterion profile_vector() {
    Criterion c{4, kTitles[3], {}, {}};
    reference();
    const ProfileVectorChecks& k = strip->profile().checks();
    const std::string where = "reference strip, resolution " + std::to_string(base);
    c.checks.push_back(make_check("flux_drift", k.flux_drift, "<=", 1e-10, where));
    c.checks.push_back(make_check("divergence", k.divergence_l2, "<=", 1e-10, where + ", exact field"));
    c.checks.push_back(make_check("outlet_mismatch", k.outlet_mismatch, "<=", 0.0, where + ", dofs with |x2| >= Z"));
    c.checks.push_back(make_check("strip_slip_residual", slip_residual_curvilinear(strip->profile().field(), config.alpha).l2,
                                  "<=", 1e-10, where + ", interpolant"));
    // The cross-sectional divergence field carries the slip condition only discretely.
    const DomainSpec disk{DiskDomain{1.0}, 1.0};
    std::vector<double> slip;
    for (int res : {8, 16, 32}) {
      const PoiseuilleProfile g = poiseuille_profile(disk, res, 1.0);
      record(g);
      const CrossSectionDivergence a = solve_divergence_2d(g, build_radial_flux_carrier(0.5, 1.0, 1.0));
      slip.push_back(slip_residual_curvilinear(a.field, 1.0).l2);
    }
    c.checks.push_back(make_check("slip_order", std::min(order(slip[0], slip[1]), order(slip[1], slip[2])), ">=", 1.0,
                                  "unit disk cross-section field, resolutions 8-16-32",
                                  {{"res8", slip[0]}, {"res16", slip[1]}, {"res32", slip[2]}}));
    return c;
  }

  Criterion straight_strip() {
    Criterion c{5, kTitles[4], {}, {}};
    const auto t0 = Clock::now();
    RunConfig flat = config;
    flat.bump_wall = "none";
    flat.carrier = "profile";
    const StripSetup s(flat, base, config.zeta);
    record(s.section_profile());
    const NSSolution sol = solve_ns(s.problem(flux));
    const double t = seconds_since(t0);
    c.checks.push_back(make_check("converged", sol.converged ? 1.0 : 0.0, ">=", 1.0, "zero start"));
    c.checks.push_back(make_check("deficit_h1", velocity_h1(sol.deficit), "<=", 1e-10,
                                  "straight strip, resolution " + std::to_string(base)));
    c.checks.push_back(timing_check("runtime", t, 10.0));
    return c;
  }

  Criterion flux_constancy() {
    Criterion c{6, kTitles[5], {}, {}};
    const NSSolution& sol = reference();
    const std::string where = "reference strip, resolution " + std::to_string(base);
    c.checks.push_back(make_check("converged", sol.converged ? 1.0 : 0.0, ">=", 1.0, where,
                                  {{"final_residual", sol.final_residual}, {"newton_steps", double(sol.newton_steps)}}));
    double normal = 0.0;
    for (const BoundaryNode& b : strip->mesh().boundary_nodes())
      if (b.on_wall) normal = std::max(normal, std::abs(nodal_velocity(checked, b.node).dot(b.frame.normal)));
    c.checks.push_back(make_check("wall_normal_velocity", normal, "<=", 1e-10, where + ", wall nodes"));
    const double d0 = flux_profile(checked, flux).max_drift;
    const StripSetup s(config, fine, config.zeta);
    record(s.section_profile());
    const NSSolution f = solve_ns(s.problem(flux));
    keep_deficit(f);
    const double d1 = flux_profile(f.state, flux).max_drift;
    c.checks.push_back(make_check("drift", d0, "<=", 1e-3, where));
    c.checks.push_back(make_check("drift_order", order(d0, d1, double(fine) / base), ">=", 2.0,
                                  "resolutions " + std::to_string(base) + "-" + std::to_string(fine),
                                  {{"drift_fine", d1}, {"fine_converged", f.converged ? 1.0 : 0.0}}));
    return c;
  }

  Criterion energy_linearity_check() {
    Criterion c{7, kTitles[6], {}, {}};
    reference();
    std::vector<double> fluxes = config.fluxes;
    if (fluxes.size() < 2) fluxes = {flux / 10.0, flux};
    std::vector<NSSolution> sols;
    for (double q : fluxes) {
      sols.push_back(q == flux ? solution : solve_ns(strip->problem(q)));
      if (q != flux) keep_deficit(sols.back());
    }
    const EnergyLinearity e = energy_linearity(sols);
    std::vector<std::pair<std::string, double>> details;
    for (const EnergyRow& r : e.rows) details.emplace_back("ratio_flux_" + format_flux(r.flux), r.ratio);
    c.checks.push_back(make_check("small_flux_deviation", e.small_flux_deviation, "<=", 0.1,
                                  "||v||_H1 / flux, two smallest fluxes", details));
    return c;
  }

  Criterion uniqueness() {
    Criterion c{8, kTitles[7], {}, {}};
    reference();
    const UniquenessResult u = uniqueness_probe(strip->problem(flux), config.uniqueness_starts, seed);
    for (const NSSolution& s : u.solutions) keep_deficit(s);
    c.checks.push_back(make_check("excluded_starts", double(u.excluded.size()), "<=", 0.0,
                                  std::to_string(config.uniqueness_starts) + " starts, seed " + std::to_string(seed)));
    c.checks.push_back(make_check("max_relative_distance", u.max_distance, "<=", 1e-8, "pairwise H1",
                                  {{"max_absolute_distance", u.max_absolute_distance}}));
    return c;
  }

  Criterion decay() {
    Criterion c{9, kTitles[8], {}, {}};
    const NSSolution& sol = reference();
    const Outlet outlet = config.decay_outlet == "left" ? Outlet::Left : Outlet::Right;
    const DecayFit a = decay_fit(sol.deficit, config.decay_stations, outlet, &sol.state);
    const StripSetup s(config, base, 2.0 * config.zeta);
    const NSSolution l = solve_ns(s.problem(flux));
    keep_deficit(l);
    const DecayFit b = decay_fit(l.deficit, config.decay_stations, outlet, &l.state);
    const std::string where = "tail energy, zeta " + format_flux(config.zeta);
    c.checks.push_back(make_check("sigma", a.void_fit ? 0.0 : a.sigma, ">=", std::numeric_limits<double>::min(), where,
                                  {{"prefactor", a.prefactor}, {"dropped_stations", double(a.dropped.size())}}));
    c.checks.push_back(make_check("r2", a.r2, ">=", 0.98, where));
    const double spread = (a.void_fit || b.void_fit) ? std::numeric_limits<double>::quiet_NaN()
                                                     : std::abs(a.sigma - b.sigma) / a.sigma;
    c.checks.push_back(make_check("truncation_stability", spread, "<=", 0.1, "zeta against 2 zeta",
                                  {{"sigma_2zeta", b.sigma}, {"r2_2zeta", b.r2}}));
    // Planted rate: grad v ~ exp(-0.7 x2), so G decays at 1.4.
    DomainSpec straight = config.domain_spec();
    auto& st = std::get<DistortedStripDomain>(straight.kind);
    st.upper = WallFunction::flat(1.0);
    st.lower = WallFunction::flat(0.0);
    st.half_length = 10.0;
    st.distortion_half_length = 1.0;
    const Mesh m = build_strip_mesh(straight, 8);
    const Space vs(m, SpaceFamily::VectorQ2);
    const Field v = interpolate_velocity(vs, [](const Vec2& x) { return Vec2(0.0, std::exp(-0.7 * x.y())); });
    const DecayFit syn = decay_fit(v, {3.5, 4.0, 4.5, 5.0});
    c.checks.push_back(make_check("synthetic_rate", std::abs(syn.sigma - 1.4) / 1.4, "<=", 0.01, "planted rate 1.4",
                                  {{"sigma", syn.sigma}}));
    return c;
  }

  Criterion identities() {
    Criterion c{10, kTitles[9], {}, {}};
    const DomainSpec disk{DiskDomain{1.0}, 1.0};
    const Mesh dm = build_cross_section_mesh(disk, 8);
    const Space ds(dm, SpaceFamily::VectorQ2);
    const Vec2 x0 = centroid(dm);
    const Field rot = interpolate_velocity(ds, [](const Vec2& x) { return Vec2(-x.y(), x.x()); });
    const auto swirl = [](const Vec2& x) {
      const double g = 1.0 + x.squaredNorm();
      VectorSample s;
      s.value = g * Vec2(-x.y(), x.x());
      s.grad << -2.0 * x.x() * x.y(), -g - 2.0 * x.y() * x.y(), g + 2.0 * x.x() * x.x(), 2.0 * x.x() * x.y();
      return s;
    };
    const double p_rot = std::abs(payne_residual(rot, x0)), p_swirl = std::abs(payne_residual(dm, swirl, x0));
    c.checks.push_back(make_check("payne", std::max(p_rot, p_swirl), "<=", 1e-10, "unit disk, rotation and swirl",
                                  {{"rotation", p_rot}, {"swirl", p_swirl}}));

    DistortedStripDomain sd;
    sd.half_length = 3.0;
    sd.distortion_half_length = 1.0;
    const Mesh sm = build_strip_mesh(DomainSpec{sd, 1.0}, 8);
    const Space ss(sm, SpaceFamily::VectorQ2);
    const Field sn = interpolate_velocity(ss, [](const Vec2& x) { return Vec2(0.0, std::sin(std::numbers::pi * x.x())); });
    const double ratio = poincare_ratio(sn, PoincareMode::Transverse).ratio;
    c.checks.push_back(make_check("poincare_sin", std::abs(ratio - 1.0 / std::numbers::pi), "<=", 1e-3,
                                  "unit strip, resolution 8", {{"ratio", ratio}}));

    reference();
    const double floor =
        korn.empty() ? std::numeric_limits<double>::quiet_NaN() : *std::min_element(korn.begin(), korn.end());
    c.checks.push_back(make_check("korn_floor", floor, ">=", 1e-3, "all converged nonzero deficits",
                                  {{"deficits", double(korn.size())}}));
    if (is_reference(config))
      c.checks.push_back(make_check("korn_floor_pinned", std::abs(floor - kKornFloorPin) / kKornFloorPin, "<=",
                                    kKornPinTolerance, "reference config", {{"pinned", kKornFloorPin}}));
    return c;
  }

  Criterion carrier_independence() {
    Criterion c{11, kTitles[10], {}, {}};
    const NSSolution& sol = reference();
    RunConfig other = config;
    const double w = config.carrier_hi - config.carrier_lo;
    other.carrier = "bump";
    other.carrier_lo = config.carrier_lo + 0.1 * w;
    other.carrier_hi = config.carrier_hi - 0.2 * w;
    const StripSetup s(other, base, config.zeta);
    const NSSolution alt = solve_ns(s.problem(flux));
    keep_deficit(alt);
    Field du(s.space(), alt.state.values - sol.state.values);
    du.values.tail(s.space().num_pressure_dofs()).setZero();
    c.checks.push_back(make_check("velocity_h1_difference", velocity_h1(du), "<=", 10.0 * config.solver.absolute_tolerance,
                                  "carriers [" + format_flux(config.carrier_lo) + ", " + format_flux(config.carrier_hi) +
                                      "] and [" + format_flux(other.carrier_lo) + ", " + format_flux(other.carrier_hi) + "]",
                                  {{"deficit_difference", velocity_h1(Field(s.space(), alt.deficit.values - sol.deficit.values))}}));
    return c;
  }

  // Runs last: it reads every recorded cross-section solve.
  Criterion energy_identity() {
    Criterion c{3, kTitles[2], {}, {}};
    double worst = 0.0;
    for (double g : section_gaps) worst = std::max(worst, g);
    c.checks.push_back(make_check("relative_gap", worst, "<=", 1e-10, "every cross-section solve of this run",
                                  {{"solves", double(section_gaps.size())}}));
    return c;
  }

  static std::string format_flux(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", x);
    return buf;
  }
};

}  // namespace

bool Criterion::passed() const {
  return error.empty() && !checks.empty() &&
         std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

bool SuiteResult::passed() const {
  return std::all_of(criteria.begin(), criteria.end(), [](const Criterion& c) { return c.passed(); });
}

bool is_reference(const RunConfig& config) {
  RunConfig d;
  d.source = config.source;
  d.inject_normal = config.inject_normal;
  return canonical_text(d) == canonical_text(config);
}

SuiteResult run_suite(const RunConfig& config, std::uint64_t seed) {
  config.validate();
  if (config.domain != "strip") throw ConfigError("verify needs a strip domain", 0, "domain");
  Runner r(config, seed);
  SuiteResult out;
  const std::vector<std::pair<int, std::function<Criterion()>>> steps = {
      {1, [&] { return r.strip_poiseuille(); }},  {2, [&] { return r.disk_poiseuille(); }},
      {4, [&] { return r.profile_vector(); }},    {5, [&] { return r.straight_strip(); }},
      {6, [&] { return r.flux_constancy(); }},    {7, [&] { return r.energy_linearity_check(); }},
      {8, [&] { return r.uniqueness(); }},        {9, [&] { return r.decay(); }},
      {11, [&] { return r.carrier_independence(); }}, {10, [&] { return r.identities(); }},
      {3, [&] { return r.energy_identity(); }},
  };
  for (const auto& [id, step] : steps) {
    try {
      out.criteria.push_back(step());
    } catch (const Error& e) {
      Criterion c;
      c.id = id;
      c.title = kTitles[id - 1];
      c.error = e.what();
      out.criteria.push_back(c);
    }
  }
  std::sort(out.criteria.begin(), out.criteria.end(), [](const Criterion& a, const Criterion& b) { return a.id < b.id; });
  for (const Criterion& c : out.criteria) {
    for (Check k : c.checks) {
      k.name = std::to_string(c.id) + "." + k.name;
      out.report.checks.push_back(k);
    }
    if (!c.error.empty()) {
      Check k = make_check(std::to_string(c.id) + ".evaluation", std::numeric_limits<double>::quiet_NaN(), "<=", 0.0,
                           c.error);
      out.report.checks.push_back(k);
    }
  }
  return out;
}

}  // namespace slipflow
