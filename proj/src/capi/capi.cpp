#include "carleman/carleman.h"

#include <string>

#include "carleman/config.hpp"
#include "carleman/parallel.hpp"
#include "carleman/runner.hpp"

struct clm_context {
  carleman::Config config;
  int threads = 0;
  std::string last_error;
  std::string last_error_name;
};

namespace {

clm_status map_error(clm_context* ctx, const carleman::Error& e) {
  ctx->last_error = e.what();
  ctx->last_error_name = carleman::error_name(e.code());
  switch (carleman::exit_code_for(e.code())) {
    case 2: return CLM_ERR_CONFIG;
    case 3: return CLM_ERR_NUMERIC;
    case 4: return CLM_ERR_LEFT_SET;
    case 5: return CLM_ERR_NOT_CONVERGED;
    default: return CLM_ERR_INTERNAL;
  }
}

clm_status map_unknown(clm_context* ctx, const std::exception& e) {
  ctx->last_error = e.what();
  ctx->last_error_name = "INTERNAL";
  return CLM_ERR_INTERNAL;
}

void clear_error(clm_context* ctx) {
  ctx->last_error.clear();
  ctx->last_error_name.clear();
}

}  // namespace

extern "C" {

const char* clm_version(void) { return carleman::version_string(); }

clm_status clm_context_create(const char* config_path, clm_context** out) {
  if (!config_path || !out) return CLM_ERR_CONFIG;
  *out = nullptr;
  auto* ctx = new clm_context();
  try {
    ctx->config = carleman::Config::load(config_path);
  } catch (const carleman::Error& e) {
    clm_status st = map_error(ctx, e);
    delete ctx;
    (void)st;
    return CLM_ERR_CONFIG;
  } catch (const std::exception&) {
    delete ctx;
    return CLM_ERR_INTERNAL;
  }
  *out = ctx;
  return CLM_OK;
}

clm_status clm_context_create_from_string(const char* config_text, clm_context** out) {
  if (!config_text || !out) return CLM_ERR_CONFIG;
  *out = nullptr;
  auto* ctx = new clm_context();
  try {
    ctx->config = carleman::Config::parse(config_text);
  } catch (const std::exception&) {
    delete ctx;
    return CLM_ERR_CONFIG;
  }
  *out = ctx;
  return CLM_OK;
}

void clm_context_destroy(clm_context* ctx) { delete ctx; }

clm_status clm_context_set(clm_context* ctx, const char* dotted_override) {
  if (!ctx || !dotted_override) return CLM_ERR_CONFIG;
  clear_error(ctx);
  try {
    ctx->config.set_override(dotted_override);
    return CLM_OK;
  } catch (const carleman::Error& e) {
    return map_error(ctx, e);
  } catch (const std::exception& e) {
    return map_unknown(ctx, e);
  }
}

clm_status clm_context_set_threads(clm_context* ctx, int threads) {
  if (!ctx) return CLM_ERR_CONFIG;
  clear_error(ctx);
  ctx->threads = threads;
  ctx->config.set("run", "threads", std::to_string(threads));
  return CLM_OK;
}

clm_status clm_run(clm_context* ctx, const char* subcommand) {
  if (!ctx || !subcommand) return CLM_ERR_CONFIG;
  clear_error(ctx);
  try {
    carleman::Config cfg = ctx->config;  // stages must not mutate the context
    carleman::run_subcommand(subcommand, cfg);
    return CLM_OK;
  } catch (const carleman::Error& e) {
    return map_error(ctx, e);
  } catch (const std::exception& e) {
    return map_unknown(ctx, e);
  }
}

const char* clm_last_error(const clm_context* ctx) {
  return ctx ? ctx->last_error.c_str() : "null context";
}

const char* clm_last_error_name(const clm_context* ctx) {
  return ctx ? ctx->last_error_name.c_str() : "NULL_CONTEXT";
}

}  // extern "C"
