#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "slipflow/domain.hpp"
#include "slipflow/navier_stokes.hpp"

namespace slipflow {

inline constexpr int kSchemaVersion = 1;

/// One scenario. Defaults describe the reference bump strip.
struct RunConfig {
  int schema_version = kSchemaVersion;
  std::string domain = "strip";  // interval, disk, star, strip
  double alpha = 1.0;

  double length = 1.0;              // interval
  double radius = 1.0;              // disk
  std::vector<double> star_radii;   // star: r(theta_k) at equal angles

  double upper_level = 1.0;         // strip walls x1 = 0 and x1 = upper_level, before the bump
  std::string bump_wall = "upper";  // upper, lower, none
  double bump_amplitude = 0.3;
  double bump_half_width = 1.0;
  double bump_center = 0.0;
  double zeta = 6.0;                // truncation |x2| <= zeta
  double transition = 2.0;          // Z

  std::string carrier = "auto";     // auto, bump, profile
  double carrier_lo = 0.25;         // fractions of the section
  double carrier_hi = 0.75;

  std::vector<double> fluxes{1e-3, 1e-2};  // ascending; the last is the working flux
  std::vector<int> resolutions{16, 32};  // the first is the working resolution

  NSOptions solver;

  std::vector<double> decay_stations{3.25, 3.5, 3.75, 4.0, 4.25, 4.5, 4.75};
  std::string decay_outlet = "right";  // right, left

  int uniqueness_starts = 3;
  double inject_normal = 0.0;  // verify: add this multiple of n at wall nodes of u

  std::string source;  // file the config was read from (not hashed)

  DomainSpec domain_spec() const;
  /// Cross-section of a strip (the interval [0, upper_level]); the domain itself otherwise.
  DomainSpec section_spec() const;
  int resolution() const { return resolutions.front(); }
  double flux() const { return fluxes.back(); }

  /// Throws ConfigError naming the field of the first invalid value.
  void validate() const;
};

/// Parses `key = value` lines. '#' starts a comment; lists are comma separated.
/// `schema_version` is required. Errors carry the line and field.
RunConfig parse_config(const std::string& text, const std::string& source = "<string>");
RunConfig load_config(const std::string& path);

/// Every key with its effective value, sorted, one `key = value` per line.
std::string canonical_text(const RunConfig& config);
/// 64-bit FNV-1a of canonical_text, as 16 hex digits.
std::string config_hash(const RunConfig& config);
std::uint64_t fnv1a(const std::string& bytes);

/// Documented keys with their defaults, usable as a config file.
std::string config_template();

}  // namespace slipflow
