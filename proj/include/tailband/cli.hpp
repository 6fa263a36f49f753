#pragma once

#include <string>
#include <utility>
#include <vector>

#include "tailband/experiment.hpp"

namespace tailband {

inline constexpr const char* kVersion = "tailband 0.1.0";

/// Parses a line-based `key = value` scenario config ('#' starts a comment).
///
/// Required keys: distribution, dist_params, n_machines, m_per_machine,
/// d_exceedances, replications, seed.
/// Optional keys: estimators (default "hill"), quantile_p,
/// xgrid / sgrid ("start,stop,count"), quantile_process_log_mean,
/// output_dir (default "./out").
///
/// Errors name the offending key.
ScenarioConfig parse_config(const std::string& text);

/// Reads and parses a config file.
ScenarioConfig load_config(const std::string& path);

struct RunManifest {
  std::string version;
  double seconds = 0.0;
  std::vector<std::pair<std::string, std::string>> config_echo;
  std::vector<std::string> outputs;  // paths written, existing on success
};

/// Runs the scenario and writes replications.csv, summary.csv,
/// oracle_gap.csv, curves.csv (only with opts.curves) and run_manifest.txt
/// into the output directory.  The TAILBAND_OUT environment variable, when
/// set, overrides cfg.output_dir.  Numbers are serialized with 17
/// significant digits, so doubles survive a round trip exactly.
RunManifest execute(const ScenarioConfig& cfg, const RunOptions& opts = {});

}  // namespace tailband
