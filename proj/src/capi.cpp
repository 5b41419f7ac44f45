#include "slipflow/slipflow.h"

#include <exception>
#include <new>
#include <sstream>
#include <string>
#include <vector>

#include "slipflow/config.hpp"
#include "slipflow/errors.hpp"
#include "slipflow/poiseuille.hpp"
#include "slipflow/scenario.hpp"

struct sf_config {
  slipflow::RunConfig config;
  std::string canonical;
  std::string hash;

  void refresh() {
    canonical = slipflow::canonical_text(config);
    hash = slipflow::config_hash(config);
  }
};

struct sf_result {
  sf_status status = SF_OK;
  std::string json;
  std::vector<std::string> artifacts;
};

struct sf_profile {
  slipflow::PoiseuilleProfile profile;
};

namespace {

struct LastError {
  std::string message;
  int line = 0;
  std::string field;
};

thread_local LastError last_error;

sf_status fail(sf_status s, const std::string& message, int line = 0, const std::string& field = {}) {
  last_error = {message, line, field};
  return s;
}

// Maps the exception in flight to a status.
sf_status translate() {
  try {
    throw;
  } catch (const slipflow::ConfigError& e) {
    return fail(SF_ERR_CONFIG, e.what(), e.line(), e.field());
  } catch (const slipflow::MeshError& e) {
    return fail(SF_ERR_MESH, e.what());
  } catch (const slipflow::ConstructionError& e) {
    return fail(SF_ERR_CONSTRUCTION, e.what(), 0, e.check());
  } catch (const slipflow::ContractViolation& e) {
    return fail(SF_ERR_CONTRACT, e.what());
  } catch (const slipflow::SolverError& e) {
    return fail(SF_ERR_SOLVER, e.what());
  } catch (const slipflow::Error& e) {
    return fail(SF_ERR_IO, e.what());
  } catch (const std::bad_alloc&) {
    return fail(SF_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(SF_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(SF_ERR_INTERNAL, "unknown error");
  }
}

template <class F>
sf_status guarded(F&& f) {
  last_error = {};
  try {
    return f();
  } catch (...) {
    return translate();
  }
}

}  // namespace

extern "C" {

const char* sf_version(void) { return "0.1.0"; }

const char* sf_status_name(sf_status status) {
  switch (status) {
    case SF_OK: return "ok";
    case SF_ERR_INVALID_ARGUMENT: return "invalid argument";
    case SF_ERR_CONFIG: return "config error";
    case SF_ERR_NONCONVERGENCE: return "nonconvergence";
    case SF_ERR_DIAGNOSTIC: return "diagnostic failure";
    case SF_ERR_MESH: return "mesh error";
    case SF_ERR_CONSTRUCTION: return "construction error";
    case SF_ERR_CONTRACT: return "contract violation";
    case SF_ERR_SOLVER: return "solver error";
    case SF_ERR_IO: return "i/o error";
    case SF_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* sf_last_error(void) { return last_error.message.c_str(); }
int sf_last_error_line(void) { return last_error.line; }
const char* sf_last_error_field(void) { return last_error.field.c_str(); }

sf_status sf_config_default(sf_config** out) {
  if (!out) return fail(SF_ERR_INVALID_ARGUMENT, "out is null");
  return guarded([&] {
    auto* c = new sf_config;
    c->refresh();
    *out = c;
    return SF_OK;
  });
}

sf_status sf_config_parse(const char* text, const char* source, sf_config** out) {
  if (!text || !out) return fail(SF_ERR_INVALID_ARGUMENT, "text and out must not be null");
  return guarded([&] {
    auto* c = new sf_config{slipflow::parse_config(text, source ? source : "<string>"), {}, {}};
    c->refresh();
    *out = c;
    return SF_OK;
  });
}

sf_status sf_config_load(const char* path, sf_config** out) {
  if (!path || !out) return fail(SF_ERR_INVALID_ARGUMENT, "path and out must not be null");
  return guarded([&] {
    auto* c = new sf_config{slipflow::load_config(path), {}, {}};
    c->refresh();
    *out = c;
    return SF_OK;
  });
}

sf_status sf_config_set(sf_config* config, const char* key, const char* value) {
  if (!config || !key || !value) return fail(SF_ERR_INVALID_ARGUMENT, "config, key and value must not be null");
  return guarded([&] {
    // Rewrite the canonical text with the new value and parse it again.
    std::istringstream in(config->canonical);
    std::string line, text;
    bool found = false;
    const std::string prefix = std::string(key) + " = ";
    while (std::getline(in, line)) {
      if (line.rfind(prefix, 0) == 0) {
        line = prefix + value;
        found = true;
      }
      text += line + "\n";
    }
    if (!found) return fail(SF_ERR_CONFIG, std::string("unknown key '") + key + "'", 0, key);
    slipflow::RunConfig next = slipflow::parse_config(text, config->config.source.empty() ? "<set>" : config->config.source);
    next.source = config->config.source;
    config->config = next;
    config->refresh();
    return SF_OK;
  });
}

const char* sf_config_canonical(const sf_config* config) { return config ? config->canonical.c_str() : ""; }
const char* sf_config_hash(const sf_config* config) { return config ? config->hash.c_str() : ""; }

const char* sf_config_template(void) {
  static const std::string text = slipflow::config_template();
  return text.c_str();
}

void sf_config_free(sf_config* config) { delete config; }

sf_status sf_run(const char* subcommand, const sf_config* config, const char* out_dir, uint64_t seed, sf_result** out) {
  if (!subcommand || !config || !out_dir || !out) return fail(SF_ERR_INVALID_ARGUMENT, "null argument to sf_run");
  *out = nullptr;
  return guarded([&] {
    const slipflow::Outcome o = slipflow::run_subcommand(subcommand, config->config, out_dir, seed);
    auto* r = new sf_result;
    r->status = static_cast<sf_status>(o.status);
    r->json = o.summary.dump(2);
    r->artifacts = o.artifacts;
    *out = r;
    if (r->status == SF_ERR_NONCONVERGENCE) return fail(r->status, "nonlinear solve did not converge");
    if (r->status == SF_ERR_DIAGNOSTIC) return fail(r->status, "diagnostic checks failed");
    return r->status;
  });
}

sf_status sf_result_status(const sf_result* result) { return result ? result->status : SF_ERR_INVALID_ARGUMENT; }
const char* sf_result_json(const sf_result* result) { return result ? result->json.c_str() : ""; }
size_t sf_result_artifact_count(const sf_result* result) { return result ? result->artifacts.size() : 0; }

const char* sf_result_artifact(const sf_result* result, size_t index) {
  if (!result || index >= result->artifacts.size()) return nullptr;
  return result->artifacts[index].c_str();
}

void sf_result_free(sf_result* result) { delete result; }

sf_status sf_profile_create(const sf_config* config, int resolution, double flux, sf_profile** out) {
  if (!config || !out) return fail(SF_ERR_INVALID_ARGUMENT, "config and out must not be null");
  return guarded([&] {
    *out = new sf_profile{slipflow::poiseuille_profile(config->config.section_spec(), resolution, flux)};
    return SF_OK;
  });
}

sf_status sf_profile_value(const sf_profile* profile, double x1, double* value) {
  if (!profile || !value) return fail(SF_ERR_INVALID_ARGUMENT, "profile and value must not be null");
  return guarded([&] {
    *value = profile->profile.value_at(x1);
    return SF_OK;
  });
}

double sf_profile_flux_constant(const sf_profile* profile) { return profile ? profile->profile.flux_constant.value : 0.0; }
double sf_profile_pressure_gradient(const sf_profile* profile) { return profile ? profile->profile.pressure_gradient : 0.0; }
double sf_profile_integral(const sf_profile* profile) { return profile ? profile->profile.integral() : 0.0; }
void sf_profile_free(sf_profile* profile) { delete profile; }

}  // extern "C"
