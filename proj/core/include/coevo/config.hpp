#pragma once

#include <string>

#include "coevo/engine.hpp"
#include "coevo/env.hpp"
#include "coevo/evolution.hpp"
#include "coevo/ltm.hpp"

namespace coevo {

// Everything a run needs, loadable from a flat key = value file.
struct RunConfig {
  int population_size = 16;  // actor molecules kept under selection
  int jobs = 1;              // trial workers during assessment

  EngineParams engine;     // t_steps, k_min, eta, baseline_beta
  EvolutionParams evolve;  // rate_a, rate_m, crossover_rate, game_rate, param_sigma
  LtmParams ltm;           // theta_fix, g_fix, lambda (negative: auto-scale)
  EnvParams env;

  // Defaults for scenario-built atoms that take them.
  double shc_sigma = 0.1;
  double shc_p_worse = 0.1;
  int mi_window = 64;
  int mi_bins = 8;
};

// Parses `key = value` lines ('#' starts a comment; blank lines ignored).
// Unknown keys, duplicate keys, and unparsable values all throw ParseError
// with the offending line number.
RunConfig parse_config(const std::string& text);
RunConfig load_config_file(const std::string& path);

// The accepted keys with their current values, one per line — usable as a
// config file and as documentation of the schema.
std::string dump_config(const RunConfig& config);

}  // namespace coevo
