// Scenario-driven front end: validates configurations, runs the simulation
// experiments and writes CSV tables with JSON sidecars.
//
// Exit codes: 0 ok, 2 configuration/schema error, 3 infeasible or physics
// error.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"

#include "isac/errors.hpp"
#include "isac/experiments.hpp"
#include "isac/scenario.hpp"
#include "isac/version.hpp"

namespace {

constexpr int exit_ok = 0;
constexpr int exit_config = 2;
constexpr int exit_infeasible = 3;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw isac::ConfigError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dual-domain ISAC waveform simulator"};
  app.set_version_flag("--version", std::string("isac ") + isac::version_string);
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  bool seed_set = false;
  int trials = 0;
  bool trials_set = false;
  std::string dump_iq;
  int threads = 1;

  auto* run = app.add_subcommand("run", "run the experiment in a scenario file");
  run->add_option("config", config_path, "scenario JSON file")->required();
  run->add_option("--out-dir", out_dir, "output directory (default .)");
  run->add_option("--seed", seed, "override the master seed")
      ->each([&](const std::string&) { seed_set = true; });
  run->add_option("--trials", trials, "override the Monte Carlo trial count")
      ->each([&](const std::string&) { trials_set = true; });
  run->add_option("--dump-iq", dump_iq,
                  "write the Tx frame as interleaved little-endian float64 I/Q");
  run->add_option("--threads", threads, "worker threads for Monte Carlo trials");

  auto* validate = app.add_subcommand("validate", "check a scenario file");
  validate->add_option("config", config_path, "scenario JSON file")->required();

  auto* schema = app.add_subcommand("schema", "print the scenario schema");

  CLI11_PARSE(app, argc, argv);

  try {
    if (schema->parsed()) {
      std::cout << isac::scenario_schema_json() << "\n";
      return exit_ok;
    }

    const std::string text = read_file(config_path);

    if (validate->parsed()) {
      const auto report = isac::validate_scenario(text);
      for (const auto& e : report.errors) std::cout << "error: " << e << "\n";
      for (const auto& w : report.warnings) std::cout << "warning: " << w << "\n";
      std::cout << (report.ok() ? "valid" : "invalid") << " (" << report.errors.size()
                << " errors, " << report.warnings.size() << " warnings)\n";
      return report.ok() ? exit_ok : exit_config;
    }

    // run
    const auto cfg = isac::parse_scenario(text);
    isac::RunOptions options;
    options.out_dir = out_dir;
    options.threads = threads;
    if (seed_set) options.seed_override = seed;
    if (trials_set) options.trials_override = trials;
    if (!dump_iq.empty()) options.dump_iq_path = dump_iq;

    const auto result = isac::run_experiment(cfg, options);
    std::cout << "wrote " << result.csv_path << "\n";
    std::cout << "wrote " << result.sidecar_path << "\n";
    if (!result.message.empty()) std::cout << result.message << "\n";
    if (result.infeasible) return exit_infeasible;
    return exit_ok;
  } catch (const isac::SchemaError& err) {
    std::cerr << "schema error: " << err.what() << "\n";
    return exit_config;
  } catch (const isac::ConfigError& err) {
    std::cerr << "configuration error: " << err.what() << "\n";
    return exit_config;
  } catch (const isac::AllocationError& err) {
    std::cerr << "allocation error: " << err.what() << "\n";
    return exit_config;
  } catch (const isac::InfeasibleError& err) {
    std::cerr << "infeasible: " << err.what() << "\n";
    return exit_infeasible;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return exit_infeasible;
  }
}
