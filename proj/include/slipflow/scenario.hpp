#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "json.hpp"
#include "slipflow/config.hpp"
#include "slipflow/navier_stokes.hpp"
#include "slipflow/poiseuille.hpp"
#include "slipflow/profile_vector.hpp"

namespace slipflow {

/// Mesh, mixed space and unit-flux profile vector of a strip config.
class StripSetup {
 public:
  StripSetup(const RunConfig& config, int resolution, double zeta);

  const Mesh& mesh() const { return *mesh_; }
  const Space& space() const { return *space_; }
  const PoiseuilleProfile& section_profile() const { return g_; }
  const ProfileVector& profile() const { return *a_; }
  NSProblem problem(double flux) const { return NSProblem{space_.get(), a_.get(), flux, options_}; }

 private:
  std::unique_ptr<Mesh> mesh_;
  std::unique_ptr<Space> space_;
  PoiseuilleProfile g_;
  std::unique_ptr<ProfileVector> a_;
  NSOptions options_;
};

/// Result of one subcommand. `status` follows the CLI exit codes: 0 success,
/// 3 solver nonconvergence, 4 diagnostic failure.
struct Outcome {
  int status = 0;
  nlohmann::json summary;
  std::vector<std::string> artifacts;  // file names written under the output directory
};

/// Environment echo shared by every artifact of a run.
nlohmann::json environment(const RunConfig& config, const std::string& subcommand, std::uint64_t seed);

Outcome run_poiseuille(const RunConfig& config, const std::string& out_dir, std::uint64_t seed = 0);
Outcome run_solve(const RunConfig& config, const std::string& out_dir, std::uint64_t seed = 0);
Outcome run_decay_study(const RunConfig& config, const std::string& out_dir, std::uint64_t seed = 0);
Outcome run_verify(const RunConfig& config, const std::string& out_dir, std::uint64_t seed = 0);

/// Dispatches on "poiseuille", "solve", "decay-study" or "verify". Throws ConfigError for
/// any other name.
Outcome run_subcommand(const std::string& name, const RunConfig& config, const std::string& out_dir,
                       std::uint64_t seed = 0);

}  // namespace slipflow
