#include "maslov/run.hpp"

#include "CLI11.hpp"

#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"Maslov indices and singularities of integrable Hamiltonian systems"};
  app.name("maslov");
  std::string scenario;
  std::string config;
  std::string out_dir = ".";
  bool verbose = false;
  app.add_option("scenario", scenario, "index, singularities, liapunov or verify")
      ->required()
      ->check(CLI::IsMember({"index", "singularities", "liapunov", "verify"}));
  app.add_option("--config", config, "run configuration file")->required();
  app.add_option("--out", out_dir, "directory for the JSON record and CSV trace");
  app.add_flag("--verbose", verbose, "progress messages on standard error");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : maslov::kExitConfig;
  }

  maslov::RunConfig cfg;
  try {
    cfg = maslov::parse_config(config);
  } catch (const maslov::Error& e) {
    std::cerr << "error: " << config << ": " << e.what() << "\n";
    maslov::write_config_failure(out_dir, scenario, config, e.what());
    return maslov::kExitConfig;
  }
  const auto requested = *maslov::scenario_from_string(scenario);
  if (cfg.scenario_in_file && cfg.scenario != requested) {
    std::cerr << "error: " << config << " is written for scenario '" << maslov::to_string(cfg.scenario)
              << "', not '" << scenario << "'\n";
    return maslov::kExitConfig;
  }
  cfg.scenario = requested;
  return maslov::run_scenario(cfg, out_dir, verbose, std::cout, std::cerr);
}
