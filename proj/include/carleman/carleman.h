/* Public C interface of the carleman solver library.
 *
 * Usage: create a context from a config file, optionally apply overrides
 * ("section.key=value"), then run pipeline stages. All state lives behind the
 * opaque context handle; every call returns a status code, with the last
 * error message and symbolic error name retrievable from the context.
 */
#ifndef CARLEMAN_H
#define CARLEMAN_H

#ifdef __cplusplus
extern "C" {
#endif

typedef struct clm_context clm_context;

typedef enum clm_status {
  CLM_OK = 0,
  CLM_ERR_CONFIG = 2,        /* bad or missing configuration */
  CLM_ERR_NUMERIC = 3,       /* numeric guard: denominator, CFL, invariants */
  CLM_ERR_LEFT_SET = 4,      /* iterates left the admissible set */
  CLM_ERR_NOT_CONVERGED = 5, /* tolerance not reached or certificate failed */
  CLM_ERR_INTERNAL = 10
} clm_status;

const char* clm_version(void);

/* Creates a context from a sectioned key = value config file. */
clm_status clm_context_create(const char* config_path, clm_context** out);

/* Creates a context from config text instead of a file. */
clm_status clm_context_create_from_string(const char* config_text, clm_context** out);

void clm_context_destroy(clm_context* ctx);

/* Applies an override of the form "section.key=value". */
clm_status clm_context_set(clm_context* ctx, const char* dotted_override);

/* Worker threads for grid loops; results are identical for any count. */
clm_status clm_context_set_threads(clm_context* ctx, int threads);

/* Runs one stage: synth, preprocess, solve, reconstruct, verify, experiment.
 * Artifacts are written to the [io] dir of the configuration. */
clm_status clm_run(clm_context* ctx, const char* subcommand);

/* Message and symbolic name (for example "NONPOSITIVE_DENOMINATOR") of the
 * last error on this context; empty string when the last call succeeded. */
const char* clm_last_error(const clm_context* ctx);
const char* clm_last_error_name(const clm_context* ctx);

#ifdef __cplusplus
}
#endif

#endif /* CARLEMAN_H */
