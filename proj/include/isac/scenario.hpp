#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "isac/grid.hpp"
#include "isac/metrics.hpp"

namespace isac {

// Scenario configuration mirrored from the JSON schema. All values are held
// in SI/linear units internally; dB and dBm conversions happen while parsing.

struct PathConfig {
  double range_m = 50.0;
  double velocity_mps = 0.0;
  std::optional<double> beam_gain;  // default sqrt(L)
};

struct UeConfig {
  std::vector<PathConfig> paths;
};

struct TargetConfig {
  double rcs_m2 = 1.0;
  double range_m = 50.0;
  double velocity_mps = 0.0;
  std::optional<double> beam_gain;  // default L
};

struct PowerConfig {
  enum class Mode { Fixed, Solve };
  Mode mode = Mode::Fixed;
  // Fixed mode (Table-I style split).
  double p_tot_w = 19.952623149688797;  // 43 dBm
  double sensing_ratio = 1e-3;          // (sigma_sen / sigma_com)^2, linear
  // Solve mode thresholds (linear) and limits.
  double gamma_thr_ft = 10.0;
  double gamma_thr_dd = 10.0;
  double aclr_rel = 100.0;
  double aclr_abs_w_per_hz = 5.0e-11;  // -13 dBm/MHz
  double p_max_w = 19.952623149688797;
};

struct ExperimentConfig {
  std::string name;
  int trials = 200;
  std::vector<double> ranges_m;
  std::vector<double> mcom_fracs;
  std::vector<double> etas;
  std::vector<double> separations_bins;
  std::vector<double> p_tot_dbm_axis;
  std::vector<double> snr_post_db;
  double tau_max_bins = 8.0;
  int slice_points = 321;
  MterVariant mter_variant = MterVariant::SqrtRatio;
  bool refine = false;
  int mc_delay_bin = 50;
  int mc_doppler_bin = 10;
};

struct ScenarioConfig {
  // grid
  int m = 1024;
  int n = 128;
  double delta_f_hz = 1e9 / 1024;
  double t_cp_s = 0.102e-6;
  double f0_hz = 30e9;
  // allocation
  int k = 1;
  int m_com = 512;
  double eta = 0.5;
  AllocationScheme scheme = AllocationScheme::RandomUniform;
  int hull_offset = 0;
  std::uint64_t seed = 1;
  // scene
  std::vector<UeConfig> ues;
  std::vector<TargetConfig> targets;
  int impulse_delay_bin = 0;
  int impulse_doppler_bin = 0;
  // power & noise
  PowerConfig power;
  double noise_figure_db = 10.0;
  int l_antennas = 100;
  // experiment
  ExperimentConfig experiment;

  GridSpec grid() const { return build_grid(m, n, delta_f_hz, t_cp_s, f0_hz); }
};

struct ValidationReport {
  std::vector<std::string> errors;    // schema violations, with key paths
  std::vector<std::string> warnings;  // physics advisories
  bool ok() const { return errors.empty(); }
};

/// Parses JSON text into a scenario; throws SchemaError naming the first
/// offending key when the document is invalid.
ScenarioConfig parse_scenario(const std::string& json_text);

/// Full report: schema walk plus physics checks (CP vs echo span, allocation
/// feasibility). Never throws.
ValidationReport validate_scenario(const std::string& json_text);

/// The resolved configuration re-serialized (defaults filled in), for the
/// experiment sidecar.
std::string scenario_to_json(const ScenarioConfig& config);

/// Human/machine-readable schema description for the `schema` subcommand.
std::string scenario_schema_json();

}  // namespace isac
