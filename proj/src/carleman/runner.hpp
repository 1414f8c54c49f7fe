#pragma once

#include "carleman/config.hpp"

namespace carleman {

// Executes one subcommand (synth, preprocess, solve, reconstruct, verify,
// experiment) against the configuration; artifacts go to [io] dir. Throws
// Error on failure; the CLI maps error codes to exit codes.
void run_subcommand(const std::string& name, Config& cfg);

const char* version_string();

}  // namespace carleman
