#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "isac/scenario.hpp"

namespace isac {

struct RunOptions {
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed_override;
  std::optional<int> trials_override;
  std::optional<std::string> dump_iq_path;
  int threads = 1;
};

struct RunResult {
  std::string csv_path;
  std::string sidecar_path;
  bool infeasible = false;  // maps to CLI exit code 3
  std::string message;
};

/// Runs the configured experiment, writing <name>.csv and <name>.meta.json
/// into out_dir. Deterministic for a fixed config + master seed.
RunResult run_experiment(const ScenarioConfig& config, const RunOptions& options);

}  // namespace isac
