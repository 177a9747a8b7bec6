#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "marketsim/errors.hpp"
#include "marketsim/scenario/scenario.hpp"

namespace {

namespace sc = marketsim::scenario;

bool events_log_enabled() {
  const char* v = std::getenv("MARKETSIM_LOG");
  if (v == nullptr) return false;
  const std::string mode = v;
  if (mode == "events") return true;
  if (mode.empty() || mode == "off") return false;
  throw marketsim::ConfigError("MARKETSIM_LOG", "expected off or events, got '" + mode + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"marketsim: discrete-event market microstructure simulator"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::string out_dir;
  std::optional<uint64_t> seed;
  std::vector<std::string> overrides;
  std::vector<std::string> toggles;

  auto* run = app.add_subcommand("run", "Run one scenario");
  run->add_option("--scenario", scenario_path, "Scenario JSON file")->required();
  run->add_option("--seed", seed, "Master seed (overrides the scenario's)");
  run->add_option("--out", out_dir, "Output directory")->required();
  run->add_option("--override", overrides, "Config override path=value")->take_all();

  auto* cmp = app.add_subcommand("compare", "Run a baseline and a toggled variant with the same seed");
  cmp->add_option("--scenario", scenario_path, "Scenario JSON file")->required();
  cmp->add_option("--seed", seed, "Master seed")->required();
  cmp->add_option("--toggle", toggles, "Countermeasure override path=value")->required()->take_all();
  cmp->add_option("--out", out_dir, "Output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    const bool log = events_log_enabled();
    if (*run) {
      auto config = sc::load_scenario(scenario_path, overrides);
      if (seed) config.seed = *seed;
      const auto result = sc::run_to(config, out_dir, log);
      std::cout << result.scenario << " seed=" << result.seed << " trades=" << result.trace.trades.size()
                << " violations=" << result.report.violations.size() << "\n";
    } else {
      auto baseline = sc::load_scenario(scenario_path);
      auto toggled = sc::load_scenario(scenario_path, toggles);
      baseline.seed = *seed;
      toggled.seed = *seed;
      std::cout << sc::compare(baseline, toggled, toggles, out_dir, log);
    }
  } catch (const marketsim::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
