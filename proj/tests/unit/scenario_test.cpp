#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "marketsim/errors.hpp"
#include "marketsim/rng.hpp"
#include "scenario_helpers.hpp"

namespace marketsim::scenario {
namespace {

const char* kMinimal = R"({
  "duration_us": 10000,
  "default_latency_us": 100,
  "venues": [{"id": 1, "name": "E1"}, {"id": 2, "name": "E2"}],
  "links": [{"from": "a", "to": "E1", "base_us": 50}],
  "agents": [{"name": "a", "strategy": "scripted", "script": [
    {"at_us": 10, "venue": "E1", "side": "buy", "price": 999, "qty": 100}]}]
})";

std::string config_error(const std::string& text, const std::vector<std::string>& overrides = {}) {
  try {
    parse_scenario(text, overrides);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

TEST(Config, DefaultsAreFilledIn) {
  const auto c = parse_scenario(kMinimal);
  EXPECT_EQ(c.seed, 1u);
  EXPECT_EQ(c.initial_value, Price{1000});
  EXPECT_TRUE(c.sip.enabled);
  EXPECT_EQ(c.venues[0].round_lot, Qty{100});
  EXPECT_EQ(c.venues[0].algo, engine::MatchingAlgo::Fifo);
  EXPECT_TRUE(c.links[0].bidirectional);
  EXPECT_DOUBLE_EQ(c.monitors.otr_threshold, 50.0);
}

TEST(Config, RoundTripsThroughJson) {
  const auto c = parse_scenario(kMinimal);
  const auto again = parse_scenario(to_json(c));
  EXPECT_EQ(c, again);
  EXPECT_EQ(to_json(c), to_json(again));
}

TEST(Config, BundledScenariosRoundTrip) {
  for (const auto& entry : std::filesystem::directory_iterator(MARKETSIM_SCENARIO_DIR)) {
    if (entry.path().extension() != ".json") continue;
    const auto c = load_scenario(entry.path());
    EXPECT_EQ(c.name, entry.path().stem().string());
    EXPECT_EQ(parse_scenario(to_json(c)), c) << entry.path();
  }
}

TEST(Config, MissingLinkEndpointNamesTheField) {
  std::string text = kMinimal;
  text.replace(text.find(R"("to": "E1")"), 10, R"("to": "E9")");
  const auto err = config_error(text);
  EXPECT_NE(err.find("links[0].to"), std::string::npos) << err;
}

TEST(Config, UnknownKeysAreRejected) {
  std::string text = kMinimal;
  text.replace(text.find(R"("name": "E2")"), 12, R"("name": "E2", "speed_bump": 5)");
  const auto err = config_error(text);
  EXPECT_NE(err.find("venues[1].speed_bump"), std::string::npos) << err;
}

TEST(Config, SyntaxErrorsReportLineAndColumn) {
  const auto err = config_error("{\n  \"duration_us\": 10,\n  oops\n}");
  EXPECT_NE(err.find("line 3"), std::string::npos) << err;
  EXPECT_NE(err.find("column"), std::string::npos) << err;
}

TEST(Config, ValidationCatchesBadValues) {
  EXPECT_NE(config_error(kMinimal, {"duration_us=0"}).find("duration_us"), std::string::npos);
  EXPECT_NE(config_error(kMinimal, {"venues[1].id=1"}).find("venues[1].id"), std::string::npos);
  EXPECT_NE(config_error(kMinimal, {"venues[0].matching_algo=lifo"}).find("venues[0].matching_algo"),
            std::string::npos);
  EXPECT_NE(config_error(kMinimal, {"agents[0].strategy=psychic"}).find("agents[0].strategy"), std::string::npos);
  EXPECT_NE(config_error(kMinimal, {"agents[0].name=sip"}).find("agents[0].name"), std::string::npos);
  EXPECT_NE(config_error(kMinimal, {"agents[0].script[0].venue=E7"}).find("agents[0].script[0].venue"),
            std::string::npos);
}

TEST(Config, OverridesAddressElementsAndWildcards) {
  const auto c = parse_scenario(kMinimal, {"venues[*].speed_bump_in_us=350", "venues[1].protection=reject",
                                           "seed=99", "links[0].base_us=7"});
  EXPECT_EQ(c.venues[0].speed_bump_in, SimTime{350});
  EXPECT_EQ(c.venues[1].speed_bump_in, SimTime{350});
  EXPECT_EQ(c.venues[0].protection, venue::ProtectionPolicy::Route);
  EXPECT_EQ(c.venues[1].protection, venue::ProtectionPolicy::Reject);
  EXPECT_EQ(c.seed, 99u);
  EXPECT_EQ(c.links[0].base, SimTime{7});
}

TEST(Config, MalformedOverridesAreConfigErrors) {
  EXPECT_FALSE(config_error(kMinimal, {"venues[0].speed_bump_in_us"}).empty());
  EXPECT_FALSE(config_error(kMinimal, {"venues[5].speed_bump_in_us=1"}).empty());
  EXPECT_FALSE(config_error(kMinimal, {"venues[0].bogus=1"}).empty());
}

TEST(Run, SameSeedGivesIdenticalOutputs) {
  const auto path = oracle::bundled("honest_baseline");
  const auto a = run(load_scenario(path));
  const auto b = run(load_scenario(path));
  EXPECT_EQ(trades_csv(a.trace), trades_csv(b.trace));
  EXPECT_EQ(a.trace.event_hash, b.trace.event_hash);
  EXPECT_EQ(metrics_json(a), metrics_json(b));
  const auto c = run(load_scenario(path, {"seed=8"}));
  EXPECT_NE(a.trace.event_hash, c.trace.event_hash);
}

TEST(Run, TradesCsvHasTheFixedColumns) {
  const auto r = run(load_scenario(oracle::bundled("scalp")));
  std::istringstream csv(trades_csv(r.trace));
  std::string header, row;
  std::getline(csv, header);
  EXPECT_EQ(header, "ts_us,venue,instrument,price_ticks,qty,taker_order,maker_order,aggressor_side");
  std::getline(csv, row);
  EXPECT_EQ(row.rfind("10100,1,1,1000,100,", 0), 0u) << row;
}

TEST(Run, WritesOutputsAndOptionalEventLog) {
  const auto dir = std::filesystem::temp_directory_path() / "marketsim_scenario_test";
  std::filesystem::remove_all(dir);
  run_to(load_scenario(oracle::bundled("queue_jump_hl")), dir, true);
  for (const char* f : {"trades.csv", "metrics.json", "violations.json", "events.log"})
    EXPECT_TRUE(std::filesystem::exists(dir / f)) << f;
  std::ifstream v(dir / "violations.json");
  std::stringstream text;
  text << v.rdbuf();
  EXPECT_NE(text.str().find("\"QueueIntegrity\""), std::string::npos);
  std::filesystem::remove_all(dir);
}

TEST(Run, CompareOnAttackFreeToggleHasZeroDeltas) {
  const auto dir = std::filesystem::temp_directory_path() / "marketsim_compare_test";
  std::filesystem::remove_all(dir);
  const auto base = load_scenario(oracle::bundled("queue_jump_hl_control"));
  // Bump on a venue nobody races to changes timing but no attack metric.
  const std::vector<std::string> toggle = {"venues[1].speed_bump_out_us=10"};
  const auto text = compare(base, load_scenario(oracle::bundled("queue_jump_hl_control"), toggle), toggle, dir);
  EXPECT_NE(text.find("\"delta\""), std::string::npos);
  EXPECT_EQ(text.find("\"violations.total\": 1"), std::string::npos);
  EXPECT_TRUE(std::filesystem::exists(dir / "baseline" / "metrics.json"));
  EXPECT_TRUE(std::filesystem::exists(dir / "toggled" / "metrics.json"));
  std::filesystem::remove_all(dir);
}

// Hand-rolled generator of honest markets: random venue count, latencies,
// maker/noise mix and signal. Every run must conserve fills, close P&L and
// reproduce its own trace hash.
std::string random_market(uint64_t seed) {
  RngStream rng(seed, "scenario-generator");
  const int venues = static_cast<int>(rng.uniform(1, 3));
  std::ostringstream os;
  os << R"({"duration_us": )" << rng.uniform(200'000, 800'000) << R"(, "seed": )" << seed
     << R"(, "default_latency_us": )" << rng.uniform(10, 300) << R"(, "venues": [)";
  std::string names;
  for (int v = 1; v <= venues; ++v) {
    os << (v > 1 ? "," : "") << R"({"id": )" << v << R"(, "name": "V)" << v << R"(", "matching_algo": ")"
       << (rng.uniform(0, 3) == 0 ? "pro_rata" : "fifo") << R"(", "speed_bump_in_us": )"
       << (rng.uniform(0, 2) == 0 ? rng.uniform(1, 500) : 0) << "}";
    names += std::string(v > 1 ? "," : "") + "\"V" + std::to_string(v) + "\"";
  }
  os << R"(], "signal": {"mode": "random", "start_us": 1000, "interval_us": )" << rng.uniform(20'000, 100'000)
     << R"(, "jump_ticks": )" << rng.uniform(1, 3) << R"(}, "agents": [)";
  for (int v = 1; v <= venues; ++v)
    os << R"({"name": "mm)" << v << R"(", "strategy": "market_maker", "params": {"venue": "V)" << v
       << R"(", "half_spread": )" << rng.uniform(1, 3) << R"(, "size": )" << 100 * rng.uniform(1, 10) << "}},";
  const int noise = static_cast<int>(rng.uniform(1, 4));
  for (int n = 0; n < noise; ++n) {
    os << (n > 0 ? "," : "") << R"({"name": "n)" << n << R"(", "strategy": "noise", "feeds": {)";
    for (int v = 1; v <= venues; ++v) os << (v > 1 ? "," : "") << "\"V" << v << "\": \"l1\"";
    os << R"(}, "params": {"venues": [)" << names << R"(], "mean_interval_us": )" << rng.uniform(2'000, 20'000)
       << R"(, "qty": )" << 100 * rng.uniform(1, 5) << "}}";
  }
  os << "]}";
  return os.str();
}

TEST(Run, GeneratedMarketsConserveAndReplay) {
  for (uint64_t seed = 1; seed <= 25; ++seed) {
    const auto text = random_market(seed);
    const auto a = oracle::run_json(text);
    const auto b = oracle::run_json(text);
    EXPECT_EQ(a.report.buy_fills, a.report.sell_fills) << text;
    EXPECT_EQ(a.report.fair_access.pnl_sum, 0) << text;
    EXPECT_EQ(a.trace.event_hash, b.trace.event_hash) << text;
    Qty tape{};
    for (const auto& t : a.trace.trades) tape += t.qty;
    EXPECT_EQ(a.report.buy_fills, tape) << text;
  }
}

}  // namespace
}  // namespace marketsim::scenario
