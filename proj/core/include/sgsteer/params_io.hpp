#pragma once

// Flat key=value configuration files.
//
//   # comment
//   mu_c = 1.0
//   sigma0 = 0.5
//
// Physical keys match the PhysParams fields (mu_c, b, B0, m, sigma0, hbar,
// k_y) plus transverse_phase = verbatim | corrected and preset = silver,
// which resets every field to the silver-atom values before later keys apply.
// Run files additionally accept n_atoms, schedule, settings (comma separated),
// evolution_time, seed, model and threads.

#include <map>
#include <string>
#include <string_view>

#include "sgsteer/protocol.hpp"
#include "sgsteer/wavefunction.hpp"

namespace sgsteer {

/// Ordered key/value pairs; throws std::invalid_argument on malformed lines
/// or duplicate keys.
std::map<std::string, std::string> parse_key_values(std::string_view text);

std::string read_text_file(const std::string& path);

/// Applies physical keys; returns false when the key is not a physical one.
bool apply_param(PhysParams& params, std::string_view key, std::string_view value);

/// Every key must be physical. The result is validated.
PhysParams parse_params(std::string_view text, PhysParams base = {});
PhysParams load_params_file(const std::string& path, PhysParams base = {});

/// Physical and run keys. The result is validated.
RunConfig parse_run_config(std::string_view text, RunConfig base = {});
RunConfig load_run_config_file(const std::string& path, RunConfig base = {});

/// Key=value text that parse_params reads back to the same values.
std::string format_params(const PhysParams& params);

}  // namespace sgsteer
