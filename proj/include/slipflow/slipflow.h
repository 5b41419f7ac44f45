#ifndef SLIPFLOW_H
#define SLIPFLOW_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define SF_API __declspec(dllexport)
#else
#define SF_API __attribute__((visibility("default")))
#endif

typedef enum sf_status {
  SF_OK = 0,
  SF_ERR_INVALID_ARGUMENT = 1,
  SF_ERR_CONFIG = 2,         /* malformed config; see sf_last_error_line/field */
  SF_ERR_NONCONVERGENCE = 3, /* a nonlinear solve failed; the result is still returned */
  SF_ERR_DIAGNOSTIC = 4,     /* a check failed; the result is still returned */
  SF_ERR_MESH = 5,
  SF_ERR_CONSTRUCTION = 6,
  SF_ERR_CONTRACT = 7,
  SF_ERR_SOLVER = 8,
  SF_ERR_IO = 9,
  SF_ERR_INTERNAL = 10
} sf_status;

typedef struct sf_config sf_config;
typedef struct sf_result sf_result;
typedef struct sf_profile sf_profile;

SF_API const char* sf_version(void);
SF_API const char* sf_status_name(sf_status status);

/* Message, config line (0 if unknown) and config field of the last failure on this thread. */
SF_API const char* sf_last_error(void);
SF_API int sf_last_error_line(void);
SF_API const char* sf_last_error_field(void);

/* Configs. The reference config is the default. */
SF_API sf_status sf_config_default(sf_config** out);
SF_API sf_status sf_config_parse(const char* text, const char* source, sf_config** out);
SF_API sf_status sf_config_load(const char* path, sf_config** out);
/* Replaces one key, validating the result. The config is unchanged on failure. */
SF_API sf_status sf_config_set(sf_config* config, const char* key, const char* value);
/* Canonical `key = value` text and its FNV-1a hash; owned by the handle. */
SF_API const char* sf_config_canonical(const sf_config* config);
SF_API const char* sf_config_hash(const sf_config* config);
SF_API const char* sf_config_template(void);
SF_API void sf_config_free(sf_config* config);

/* Runs "poiseuille", "solve", "decay-study" or "verify", writing artifacts to out_dir.
 * *out is set whenever the run completed, including SF_ERR_NONCONVERGENCE and
 * SF_ERR_DIAGNOSTIC. */
SF_API sf_status sf_run(const char* subcommand, const sf_config* config, const char* out_dir, uint64_t seed,
                        sf_result** out);
SF_API sf_status sf_result_status(const sf_result* result);
SF_API const char* sf_result_json(const sf_result* result);
SF_API size_t sf_result_artifact_count(const sf_result* result);
SF_API const char* sf_result_artifact(const sf_result* result, size_t index);
SF_API void sf_result_free(sf_result* result);

/* Poiseuille profile of the config's cross-section. */
SF_API sf_status sf_profile_create(const sf_config* config, int resolution, double flux, sf_profile** out);
/* Profile value at x1 (one-dimensional sections only). */
SF_API sf_status sf_profile_value(const sf_profile* profile, double x1, double* value);
SF_API double sf_profile_flux_constant(const sf_profile* profile);
SF_API double sf_profile_pressure_gradient(const sf_profile* profile);
SF_API double sf_profile_integral(const sf_profile* profile);
SF_API void sf_profile_free(sf_profile* profile);

#ifdef __cplusplus
}
#endif

#endif
