#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "marketsim/agents/agent.hpp"
#include "marketsim/agents/signal.hpp"
#include "marketsim/monitors/monitors.hpp"
#include "marketsim/simnet/sip.hpp"
#include "marketsim/venue/venue.hpp"

namespace marketsim::scenario {

struct LinkSpec {
  std::string from;
  std::string to;
  SimTime base{};
  SimTime jitter{};
  SimTime timestamp_noise{};
  bool bidirectional{true};

  bool operator==(const LinkSpec&) const = default;
};

struct SipSpec {
  bool enabled{true};
  SimTime latency{simnet::kDefaultSipLatency};

  bool operator==(const SipSpec&) const = default;
};

struct AgentSpec {
  std::string name;
  std::string strategy;
  std::string cohort;
  std::map<std::string, FeedLevel> feeds;  // venue name -> direct feed level
  bool sip{false};
  double processing_rate{0.0};
  bool knows_hide_and_light{false};
  bool knows_day_iso{false};
  agents::ParamMap params;
  std::vector<agents::ScriptAction> script;

  bool operator==(const AgentSpec&) const = default;
};

struct ScenarioConfig {
  std::string name;
  SimTime duration{};
  uint64_t seed{1};
  InstrumentId instrument{1};
  Price initial_value{1000};
  std::vector<venue::VenueConfig> venues;
  std::optional<SimTime> default_latency;
  std::vector<LinkSpec> links;
  SipSpec sip;
  agents::SignalConfig signal;
  monitors::MonitorConfig monitors;
  std::vector<AgentSpec> agents;

  bool operator==(const ScenarioConfig&) const = default;
};

/// Parses and validates a JSON scenario. Each override is `path=value`, with
/// paths like `venues[0].speed_bump_in_us` (`[*]` hits every element) and a
/// JSON value (bare words are taken as strings). Throws ConfigError naming the
/// offending field, or the line and column of a syntax error.
ScenarioConfig parse_scenario(std::string_view text, const std::vector<std::string>& overrides = {});
ScenarioConfig load_scenario(const std::filesystem::path& path, const std::vector<std::string>& overrides = {});
std::string to_json(const ScenarioConfig& config);
void validate(const ScenarioConfig& config);

struct RunOptions {
  std::ostream* events_log{nullptr};
};

struct RunResult {
  std::string scenario;
  uint64_t seed{0};
  SimTrace trace;
  monitors::Report report;
};

RunResult run(const ScenarioConfig& config, const RunOptions& options = {});

std::string trades_csv(const SimTrace& trace);
std::string metrics_json(const RunResult& result);
std::string violations_json(const RunResult& result);

/// Writes trades.csv, metrics.json and violations.json into `dir`.
void write_outputs(const RunResult& result, const std::filesystem::path& dir);

/// Runs into `dir`, with dir/events.log when `events_log` is set.
RunResult run_to(const ScenarioConfig& config, const std::filesystem::path& dir, bool events_log);

/// Runs the baseline and toggled configs (same seed, legs in parallel),
/// writes each leg under dir/baseline and dir/toggled plus dir/compare.json,
/// and returns the compare.json text.
std::string compare(const ScenarioConfig& baseline, const ScenarioConfig& toggled,
                    const std::vector<std::string>& toggles, const std::filesystem::path& dir,
                    bool events_log = false);

}  // namespace marketsim::scenario
