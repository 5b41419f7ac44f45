#include "slipflow/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "slipflow/errors.hpp"

namespace slipflow {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string number(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

double to_double(const std::string& v, int line, const std::string& key) {
  double x = 0.0;
  const auto r = std::from_chars(v.data(), v.data() + v.size(), x);
  if (v.empty() || r.ec != std::errc() || r.ptr != v.data() + v.size() || !std::isfinite(x))
    throw ConfigError("'" + key + "' expects a number, got '" + v + "'", line, key);
  return x;
}

int to_int(const std::string& v, int line, const std::string& key) {
  int x = 0;
  const auto r = std::from_chars(v.data(), v.data() + v.size(), x);
  if (v.empty() || r.ec != std::errc() || r.ptr != v.data() + v.size())
    throw ConfigError("'" + key + "' expects an integer, got '" + v + "'", line, key);
  return x;
}

std::string choice(const std::string& v, std::initializer_list<const char*> allowed, int line, const std::string& key) {
  std::string list;
  for (const char* a : allowed) {
    if (v == a) return v;
    list += (list.empty() ? "" : ", ") + std::string(a);
  }
  throw ConfigError("'" + key + "' must be one of " + list + ", got '" + v + "'",
                    line, key);
}

template <class T>
std::string join(const std::vector<T>& xs) {
  std::string out;
  for (const T& x : xs) {
    if (!out.empty()) out += ", ";
    if constexpr (std::is_same_v<T, int>) out += std::to_string(x);
    else out += number(x);
  }
  return out;
}

struct Key {
  std::function<void(RunConfig&, const std::string&, int)> set;
  std::function<std::string(const RunConfig&)> get;
  const char* doc;
};

#define SF_REAL(name, member, doc)                                                              \
  {name,                                                                                        \
   {[](RunConfig& c, const std::string& v, int l) { c.member = to_double(v, l, name); },        \
    [](const RunConfig& c) { return number(c.member); }, doc}}
#define SF_INT(name, member, doc)                                                               \
  {name,                                                                                        \
   {[](RunConfig& c, const std::string& v, int l) { c.member = to_int(v, l, name); },           \
    [](const RunConfig& c) { return std::to_string(c.member); }, doc}}
#define SF_REALS(name, member, doc)                                                             \
  {name,                                                                                        \
   {[](RunConfig& c, const std::string& v, int l) {                                             \
      c.member.clear();                                                                         \
      for (const std::string& s : split_list(v)) c.member.push_back(to_double(s, l, name));     \
    },                                                                                          \
    [](const RunConfig& c) { return join(c.member); }, doc}}

const std::map<std::string, Key>& keys() {
  static const std::map<std::string, Key> table = {
      SF_INT("schema_version", schema_version, "config format version (1)"),
      {"domain",
       {[](RunConfig& c, const std::string& v, int l) { c.domain = choice(v, {"interval", "disk", "star", "strip"}, l, "domain"); },
        [](const RunConfig& c) { return c.domain; }, "interval | disk | star | strip"}},
      SF_REAL("alpha", alpha, "friction coefficient"),
      SF_REAL("interval.length", length, "cross-section length"),
      SF_REAL("disk.radius", radius, "cross-section radius"),
      SF_REALS("star.radii", star_radii, "boundary radii at equally spaced angles"),
      SF_REAL("strip.upper_level", upper_level, "upper wall level (the lower wall sits at 0)"),
      {"strip.bump_wall",
       {[](RunConfig& c, const std::string& v, int l) { c.bump_wall = choice(v, {"upper", "lower", "none"}, l, "strip.bump_wall"); },
        [](const RunConfig& c) { return c.bump_wall; }, "upper | lower | none"}},
      SF_REAL("strip.bump_amplitude", bump_amplitude, "bump height (outward positive)"),
      SF_REAL("strip.bump_half_width", bump_half_width, "bump half-width along the axis"),
      SF_REAL("strip.bump_center", bump_center, "bump center on the axis"),
      SF_REAL("strip.zeta", zeta, "truncation half-length"),
      SF_REAL("strip.transition", transition, "walls straight for |x2| >= transition"),
      {"carrier",
       {[](RunConfig& c, const std::string& v, int l) { c.carrier = choice(v, {"auto", "bump", "profile"}, l, "carrier"); },
        [](const RunConfig& c) { return c.carrier; }, "auto | bump | profile"}},
      SF_REAL("carrier.lo", carrier_lo, "carrier support start (fraction of the section)"),
      SF_REAL("carrier.hi", carrier_hi, "carrier support end (fraction of the section)"),
      SF_REALS("flux", fluxes, "flux or ascending list of fluxes"),
      {"resolution",
       {[](RunConfig& c, const std::string& v, int l) {
          c.resolutions.clear();
          for (const std::string& s : split_list(v)) c.resolutions.push_back(to_int(s, l, "resolution"));
        },
        [](const RunConfig& c) { return join(c.resolutions); }, "cells across the section; a list refines"}},
      SF_REAL("solver.absolute_tolerance", solver.absolute_tolerance, "nonlinear residual tolerance"),
      SF_REAL("solver.relative_tolerance", solver.relative_tolerance, "relative residual tolerance"),
      SF_INT("solver.picard_steps", solver.picard_steps, "Picard steps before Newton"),
      SF_INT("solver.max_newton", solver.max_newton, "Newton iteration cap"),
      SF_INT("solver.max_picard", solver.max_picard, "Picard fallback cap"),
      SF_REAL("solver.flux_ceiling", solver.flux_ceiling, "largest admissible flux"),
      SF_REALS("decay.stations", decay_stations, "axial stations of the tail-energy fit"),
      {"decay.outlet",
       {[](RunConfig& c, const std::string& v, int l) { c.decay_outlet = choice(v, {"right", "left"}, l, "decay.outlet"); },
        [](const RunConfig& c) { return c.decay_outlet; }, "right | left"}},
      SF_INT("uniqueness.starts", uniqueness_starts, "number of initial guesses"),
      SF_REAL("verify.inject_normal", inject_normal, "wall normal velocity added before checks"),
  };
  return table;
}

#undef SF_REAL
#undef SF_INT
#undef SF_REALS

[[noreturn]] void bad(const std::string& field, const std::string& what) {
  throw ConfigError("'" + field + "' " + what, 0, field);
}

}  // namespace

DomainSpec RunConfig::domain_spec() const {
  if (domain == "interval") return DomainSpec{IntervalDomain{length}, alpha};
  if (domain == "disk") return DomainSpec{DiskDomain{radius}, alpha};
  if (domain == "star") return DomainSpec{StarShapedDomain{star_radii}, alpha};
  DistortedStripDomain s;
  s.lower = WallFunction::flat(0.0);
  s.upper = WallFunction::flat(upper_level);
  if (bump_wall == "upper" && bump_amplitude != 0.0)
    s.upper = WallFunction::bump(upper_level, bump_amplitude, bump_half_width, bump_center);
  // The lower wall bulges outward towards negative x1.
  if (bump_wall == "lower" && bump_amplitude != 0.0)
    s.lower = WallFunction::bump(0.0, -bump_amplitude, bump_half_width, bump_center);
  s.half_length = zeta;
  s.distortion_half_length = transition;
  return DomainSpec{s, alpha};
}

DomainSpec RunConfig::section_spec() const {
  if (domain == "strip") return DomainSpec{IntervalDomain{upper_level}, alpha};
  return domain_spec();
}

void RunConfig::validate() const {
  if (schema_version != kSchemaVersion)
    bad("schema_version", "must be " + std::to_string(kSchemaVersion) + ", got " + std::to_string(schema_version));
  if (!(alpha >= 0.0)) bad("alpha", "must be non-negative");
  if (domain == "interval" && !(length > 0.0)) bad("interval.length", "must be positive");
  if (domain == "disk" && !(radius > 0.0)) bad("disk.radius", "must be positive");
  if (domain == "star" && star_radii.size() < 8) bad("star.radii", "needs at least 8 samples");
  if (domain == "strip") {
    if (!(upper_level > 0.0)) bad("strip.upper_level", "must be positive");
    if (!(zeta > 0.0)) bad("strip.zeta", "must be positive");
    if (!(transition > 0.0 && transition < zeta)) bad("strip.transition", "must lie in (0, strip.zeta)");
    if (!(bump_half_width > 0.0)) bad("strip.bump_half_width", "must be positive");
    if (!(carrier_lo > 0.0 && carrier_lo < carrier_hi && carrier_hi < 1.0))
      bad("carrier.lo", "carrier bounds must satisfy 0 < lo < hi < 1");
  }
  if (fluxes.empty()) bad("flux", "needs at least one value");
  for (std::size_t i = 0; i < fluxes.size(); ++i) {
    if (!(fluxes[i] >= 0.0)) bad("flux", "must be non-negative");
    if (i > 0 && !(fluxes[i] > fluxes[i - 1])) bad("flux", "list must ascend");
  }
  if (resolutions.empty()) bad("resolution", "needs at least one value");
  for (std::size_t i = 0; i < resolutions.size(); ++i) {
    if (resolutions[i] < 1) bad("resolution", "must be positive");
    if (i > 0 && resolutions[i] <= resolutions[i - 1]) bad("resolution", "list must ascend");
  }
  if (!(solver.absolute_tolerance > 0.0)) bad("solver.absolute_tolerance", "must be positive");
  if (!(solver.relative_tolerance > 0.0)) bad("solver.relative_tolerance", "must be positive");
  if (solver.picard_steps < 0) bad("solver.picard_steps", "must be non-negative");
  if (solver.max_newton < 1) bad("solver.max_newton", "must be positive");
  if (solver.max_picard < 1) bad("solver.max_picard", "must be positive");
  if (uniqueness_starts < 2) bad("uniqueness.starts", "must be at least 2");
}

RunConfig parse_config(const std::string& text, const std::string& source) {
  RunConfig c;
  c.source = source;
  std::map<std::string, int> seen;  // key -> line
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string s = trim(raw.substr(0, raw.find('#')));
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string::npos)
      throw ConfigError(source + ":" + std::to_string(line) + ": expected 'key = value'", line);
    const std::string key = trim(s.substr(0, eq)), value = trim(s.substr(eq + 1));
    const auto it = keys().find(key);
    if (it == keys().end()) throw ConfigError(source + ":" + std::to_string(line) + ": unknown key '" + key + "'", line, key);
    if (!seen.emplace(key, line).second)
      throw ConfigError(source + ":" + std::to_string(line) + ": duplicate key '" + key + "'", line, key);
    try {
      it->second.set(c, value, line);
    } catch (const ConfigError& e) {
      throw ConfigError(source + ":" + std::to_string(line) + ": " + e.what(), line, key);
    }
  }
  if (!seen.count("schema_version")) throw ConfigError(source + ": missing 'schema_version'", 0, "schema_version");
  try {
    c.validate();
  } catch (const ConfigError& e) {
    const auto at = seen.find(e.field());
    const int l = at == seen.end() ? 0 : at->second;
    throw ConfigError(source + (l ? ":" + std::to_string(l) : "") + ": " + e.what(), l, e.field());
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str(), path);
}

std::string canonical_text(const RunConfig& config) {
  std::string out;
  for (const auto& [name, key] : keys()) out += name + " = " + key.get(config) + "\n";
  return out;
}

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string config_hash(const RunConfig& config) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(canonical_text(config))));
  return buf;
}

std::string config_template() {
  const RunConfig defaults;
  std::string out;
  for (const auto& [name, key] : keys()) out += "# " + std::string(key.doc) + "\n" + name + " = " + key.get(defaults) + "\n";
  return out;
}

}  // namespace slipflow
