#include "slipflow/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>

#include "slipflow/diagnostics.hpp"
#include "slipflow/errors.hpp"
#include "slipflow/io.hpp"
#include "slipflow/suite.hpp"

namespace slipflow {

namespace fs = std::filesystem;

namespace {

constexpr const char* kVersion = "0.1.0";

FluxCarrier make_carrier(const RunConfig& c, const PoiseuilleProfile& g, bool flat) {
  if (c.carrier == "profile" || (c.carrier == "auto" && flat)) return poiseuille_flux_carrier(g);
  const double L = c.upper_level;
  return build_flux_carrier(c.carrier_lo * L, c.carrier_hi * L, g.flux, L);
}

void require_strip(const RunConfig& c, const std::string& what) {
  if (c.domain != "strip") throw ConfigError(what + " needs domain = strip", 0, "domain");
}

std::string path_in(const std::string& dir, const std::string& name) { return (fs::path(dir) / name).string(); }

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw ConfigError("output directory '" + dir + "' is not writable", 0, "--out");
}

nlohmann::json mesh_info(const Mesh& m, const Space* s = nullptr) {
  nlohmann::json j = {{"cells", m.num_cells()}, {"nodes", m.num_nodes()}};
  if (s) j["dofs"] = s->num_dofs();
  return j;
}

nlohmann::json solution_json(const NSSolution& s, const Field& u) {
  const double vh1 = velocity_h1(s.deficit);
  nlohmann::json j = {{"flux", s.flux},
                      {"converged", s.converged},
                      {"status", s.status},
                      {"initial_residual", s.initial_residual},
                      {"final_residual", s.final_residual},
                      {"newton_steps", s.newton_steps},
                      {"picard_steps", s.picard_steps},
                      {"fell_back_to_picard", s.fell_back_to_picard},
                      {"gauge_multiplier", s.gauge_multiplier},
                      {"deficit_h1", vh1},
                      {"deficit_h1_over_flux", s.flux > 0.0 ? nlohmann::json(vh1 / s.flux) : nlohmann::json(nullptr)},
                      {"history", to_json(s.history)}};
  if (s.converged) j["flux_profile"] = to_json(flux_profile(u, s.flux));
  return j;
}

std::vector<std::vector<double>> profile_rows(const PoiseuilleProfile& p) {
  const Mesh& m = *p.mesh;
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < m.num_nodes(); ++i) {
    const Vec2& x = m.nodes()[i];
    const double v = p.profile.values[p.space->scalar_dof(static_cast<int>(i))];
    if (m.dim() == 1) rows.push_back({x.x(), v});
    else rows.push_back({x.x(), x.y(), v});
  }
  std::sort(rows.begin(), rows.end());
  return rows;
}

}  // namespace

StripSetup::StripSetup(const RunConfig& config, int resolution, double zeta) : options_(config.solver) {
  require_strip(config, "a strip setup");
  RunConfig c = config;
  c.zeta = zeta;
  const DomainSpec spec = c.domain_spec();
  mesh_ = std::make_unique<Mesh>(build_strip_mesh(spec, resolution));
  space_ = std::make_unique<Space>(*mesh_, SpaceFamily::MixedQ2Q1);
  g_ = poiseuille_profile(c.section_spec(), resolution, 1.0);
  const auto& strip = std::get<DistortedStripDomain>(spec.kind);
  const bool flat = strip.lower.is_flat() && strip.upper.is_flat();
  a_ = std::make_unique<ProfileVector>(
      assemble_profile_vector(*space_, g_, g_, make_carrier(c, g_, flat), CutoffEta(c.transition)));
}

nlohmann::json environment(const RunConfig& config, const std::string& subcommand, std::uint64_t seed) {
  return {{"program", "slipflow"},
          {"version", kVersion},
          {"schema_version", config.schema_version},
          {"config_hash", config_hash(config)},
          {"subcommand", subcommand},
          {"seed", seed}};
}

Outcome run_poiseuille(const RunConfig& config, const std::string& out_dir, std::uint64_t seed) {
  config.validate();
  ensure_dir(out_dir);
  Outcome out;
  const DomainSpec section = config.section_spec();
  nlohmann::json runs = nlohmann::json::array();
  std::vector<std::vector<double>> rows;
  for (int res : config.resolutions) {
    const PoiseuilleProfile p = poiseuille_profile(section, res, config.flux());
    nlohmann::json r = {{"resolution", res},
                        {"mesh", mesh_info(*p.mesh, p.space.get())},
                        {"flux_constant", p.flux_constant.value},
                        {"energy", p.flux_constant.energy},
                        {"energy_identity_gap", p.flux_constant.relative_gap},
                        {"pressure_gradient", p.pressure_gradient},
                        {"integral", p.integral()}};
    if (section.is_interval() || section.is_disk()) {
      const ClosedFormPoiseuille exact = closed_form_reference(section, config.flux());
      const double err = scalar_l2_error(p.profile, exact.profile);
      const double norm = scalar_l2_error(Field(*p.space), exact.profile);
      r["closed_form"] = {{"l2_error", err},
                          {"relative_l2_error", norm > 0.0 ? nlohmann::json(err / norm) : nlohmann::json(nullptr)},
                          {"flux_constant", exact.flux_constant},
                          {"pressure_gradient", exact.pressure_gradient}};
    }
    runs.push_back(r);
    rows = profile_rows(p);
  }
  const bool one_d = section.is_interval();
  write_csv(path_in(out_dir, "profile.csv"), one_d ? std::vector<std::string>{"x1", "g"} : std::vector<std::string>{"x1", "x2", "g"},
            rows);
  out.artifacts.push_back("profile.csv");
  out.summary = {{"environment", environment(config, "poiseuille", seed)},
                 {"section", section.kind_name()},
                 {"alpha", config.alpha},
                 {"flux", config.flux()},
                 {"runs", runs}};
  write_json(path_in(out_dir, "poiseuille.json"), out.summary);
  out.artifacts.push_back("poiseuille.json");
  return out;
}

Outcome run_solve(const RunConfig& config, const std::string& out_dir, std::uint64_t seed) {
  config.validate();
  require_strip(config, "solve");
  ensure_dir(out_dir);
  Outcome out;
  const StripSetup s(config, config.resolution(), config.zeta);
  const ContinuationResult cr = continuation_sweep(s.problem(0.0), config.fluxes);
  nlohmann::json sols = nlohmann::json::array();
  for (const NSSolution& sol : cr.solutions) sols.push_back(solution_json(sol, sol.state));
  const NSSolution& last = cr.solutions.back();
  out.status = cr.reached_end ? 0 : 3;
  out.summary = {{"environment", environment(config, "solve", seed)},
                 {"mesh", mesh_info(s.mesh(), &s.space())},
                 {"resolution", config.resolution()},
                 {"converged", cr.reached_end},
                 {"largest_converged_flux", cr.largest_converged_flux},
                 {"profile_vector",
                  {{"flux_drift", s.profile().checks().flux_drift},
                   {"divergence_l2", s.profile().checks().divergence_l2},
                   {"interpolant_divergence_l2", s.profile().checks().interpolant_divergence_l2}}},
                 {"solutions", sols}};
  if (last.converged) {
    Field u = last.state, v = last.deficit, a = last.lifting, p = last.pressure;
    u.name = "u";
    v.name = "v";
    a.name = "a";
    p.name = "p";
    write_vtk(path_in(out_dir, "solution.vtk"), {{&u, true, false}, {&v, true, false}, {&a, true, false}, {&p, false, true}},
              "slipflow steady flow, flux " + std::to_string(last.flux));
    out.artifacts.push_back("solution.vtk");
  }
  write_json(path_in(out_dir, "solve.json"), out.summary);
  out.artifacts.push_back("solve.json");
  return out;
}

Outcome run_decay_study(const RunConfig& config, const std::string& out_dir, std::uint64_t seed) {
  config.validate();
  require_strip(config, "decay-study");
  ensure_dir(out_dir);
  Outcome out;
  const Outlet outlet = config.decay_outlet == "left" ? Outlet::Left : Outlet::Right;
  nlohmann::json fits = nlohmann::json::array();
  std::vector<std::vector<double>> rows;
  std::vector<DecayFit> found;
  for (double zeta : {config.zeta, 2.0 * config.zeta}) {
    const StripSetup s(config, config.resolution(), zeta);
    const NSSolution sol = solve_ns(s.problem(config.flux()));
    if (!sol.converged) {
      out.status = 3;
      fits.push_back({{"zeta", zeta}, {"solution", solution_json(sol, sol.state)}});
      break;
    }
    const DecayFit f = decay_fit(sol.deficit, config.decay_stations, outlet, &sol.state);
    found.push_back(f);
    for (std::size_t k = 0; k < f.stations.size(); ++k)
      rows.push_back({zeta, f.stations[k], f.energies[k], f.energies[k] > 0.0 ? std::log(f.energies[k]) : std::nan("")});
    fits.push_back({{"zeta", zeta}, {"mesh", mesh_info(s.mesh(), &s.space())}, {"fit", to_json(f)},
                    {"deficit_h1", velocity_h1(sol.deficit)}});
  }
  out.summary = {{"environment", environment(config, "decay-study", seed)},
                 {"flux", config.flux()},
                 {"resolution", config.resolution()},
                 {"outlet", config.decay_outlet},
                 {"truncations", fits}};
  if (found.size() == 2) {
    const bool void_fit = found[0].void_fit || found[1].void_fit;
    out.summary["void_fit"] = void_fit;
    out.summary["sigma"] = void_fit ? nlohmann::json(nullptr) : nlohmann::json(found[0].sigma);
    out.summary["r2"] = void_fit ? nlohmann::json(nullptr) : nlohmann::json(found[0].r2);
    out.summary["sigma_agreement"] =
        void_fit ? nlohmann::json(nullptr) : nlohmann::json(std::abs(found[0].sigma - found[1].sigma) / found[0].sigma);
  }
  write_csv(path_in(out_dir, "decay.csv"), {"zeta", "s", "G", "log_G"}, rows);
  out.artifacts.push_back("decay.csv");
  write_json(path_in(out_dir, "decay.json"), out.summary);
  out.artifacts.push_back("decay.json");
  return out;
}

Outcome run_verify(const RunConfig& config, const std::string& out_dir, std::uint64_t seed) {
  config.validate();
  require_strip(config, "verify");
  ensure_dir(out_dir);
  SuiteResult r = run_suite(config, seed);
  const nlohmann::json env = environment(config, "verify", seed);
  for (auto it = env.begin(); it != env.end(); ++it)
    r.report.environment.emplace_back(it.key(), it->is_string() ? it->get<std::string>() : it->dump());
  Outcome out;
  out.status = r.passed() ? 0 : 4;
  out.summary = to_json(r.report);
  nlohmann::json criteria = nlohmann::json::array();
  for (const Criterion& c : r.criteria) {
    nlohmann::json j = {{"id", c.id}, {"title", c.title}, {"passed", c.passed()}};
    if (!c.error.empty()) j["error"] = c.error;
    criteria.push_back(j);
  }
  out.summary["criteria"] = criteria;
  write_json(path_in(out_dir, "report.json"), out.summary);
  write_text(path_in(out_dir, "report.txt"), r.report.to_text());
  out.artifacts = {"report.json", "report.txt"};
  return out;
}

Outcome run_subcommand(const std::string& name, const RunConfig& config, const std::string& out_dir, std::uint64_t seed) {
  if (name == "poiseuille") return run_poiseuille(config, out_dir, seed);
  if (name == "solve") return run_solve(config, out_dir, seed);
  if (name == "decay-study") return run_decay_study(config, out_dir, seed);
  if (name == "verify") return run_verify(config, out_dir, seed);
  throw ConfigError("unknown subcommand '" + name + "'", 0, "subcommand");
}

}  // namespace slipflow
