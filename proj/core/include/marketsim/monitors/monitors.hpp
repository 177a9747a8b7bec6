#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "marketsim/trace.hpp"

namespace marketsim::monitors {

enum class Property : uint8_t {
  TradingIntegrity,
  FairMarketAccess,
  SymmetricInformation,
  QueueIntegrity,
  ParticipantAnonymity,
  DataConfidentiality,
};

std::string_view to_string(Property p);
const std::vector<Property>& all_properties();

struct Violation {
  Property property{Property::TradingIntegrity};
  SimTime ts{};
  std::vector<ParticipantId> subjects;
  std::vector<uint64_t> events;  // trade ids, order ids or public ids, per property
  std::string evidence;
};

struct MonitorConfig {
  double otr_threshold{50.0};
  SimTime otr_window{1'000'000};
  SimTime staleness_sample{1'000};
  SimTime lag_threshold{5'000};
  double anonymity_sigmas{3.0};
  size_t anonymity_min_decided{30};

  bool operator==(const MonitorConfig&) const = default;
};

/// Replays book events against pure price-time priority: arrival order only
/// changes on a fresh add, a reserve refill or a priority-losing modify.
/// One violation per execution whose maker ranks behind an earlier-arrived
/// order resting at the same venue, side, price and display class.
/// Pro-rata and call-auction venues are skipped.
std::vector<Violation> audit_queue_integrity(const SimTrace& trace);

struct AnonymityResult {
  size_t anonymous_orders{0};
  size_t senders{0};
  size_t guesses{0};
  size_t decided{0};
  size_t correct{0};
  double accuracy{0.0};          // correct / anonymous orders
  double decided_accuracy{0.0};  // correct / decided guesses
  double abstention{0.0};
  double baseline{0.0};          // 1 / number of anonymous senders
  double std_error{0.0};         // of decided_accuracy around the baseline
};
AnonymityResult measure_anonymity(const SimTrace& trace);

struct HiddenOrderOutcome {
  OrderId order{0};
  VenueId venue{0};
  std::optional<SimTime> belief_ts;
  std::optional<SimTime> reveal_ts;
  bool detected{false};
};

struct ConfidentialityResult {
  size_t hidden_orders{0};
  size_t detected{0};
  double rate{0.0};
  std::optional<double> mean_lead_us;
  std::optional<SimTime> min_lead;
  std::vector<HiddenOrderOutcome> orders;
};
/// Hidden orders are Hidden kinds and reserves. Public reveal is the first
/// published print of a trade against the order.
ConfidentialityResult measure_confidentiality(const SimTrace& trace);

struct AgentPnl {
  int64_t cash{0};      // ticks x shares
  int64_t position{0};  // shares
  int64_t pnl{0};       // cash + position at the final value
  Qty bought{};
  Qty sold{};
  size_t trades{0};
  size_t stale_captures{0};
};

struct FairAccessResult {
  std::map<ParticipantId, AgentPnl> agents;
  std::map<std::string, int64_t> cohorts;
  int64_t pnl_sum{0};
  size_t stale_captures{0};
  std::vector<uint64_t> capture_trades;
};
/// P&L per agent and cohort, plus stale captures: trades where a taker that
/// arrived after a value jump hit a quote entered before it, at a price
/// better than the new value.
FairAccessResult measure_fair_access(const SimTrace& trace);

struct StalenessStats {
  size_t samples{0};
  SimTime p50{};
  SimTime p99{};
  SimTime max{};
  SimTime lag_p99{};  // processing queue delay
  SimTime lag_max{};
};

/// now minus the venue time of the newest message processed by `t`.
std::optional<SimTime> staleness_at(const std::vector<simnet::ConsumerModel::Sample>& history, SimTime t);
std::map<ParticipantId, StalenessStats> measure_info_symmetry(const SimTrace& trace, const MonitorConfig& config);

struct OtrStats {
  size_t new_orders{0};
  size_t trades{0};
  double overall{0.0};       // new orders / max(1, trades) over the run
  double worst_window{0.0};  // same ratio over the worst sliding window
  std::optional<SimTime> flagged_at;
};
std::map<ParticipantId, OtrStats> order_to_trade(const SimTrace& trace, const MonitorConfig& config);
std::vector<Violation> flag_trading_integrity(const SimTrace& trace, const MonitorConfig& config);

struct Report {
  std::vector<Violation> violations;
  AnonymityResult anonymity;
  ConfidentialityResult confidentiality;
  FairAccessResult fair_access;
  std::map<ParticipantId, StalenessStats> staleness;
  std::map<ParticipantId, OtrStats> otr;
  std::map<ParticipantId, size_t> rank_inversions_won;
  Qty buy_fills{};
  Qty sell_fills{};

  size_t count(Property p) const;
};

Report evaluate(const SimTrace& trace, const MonitorConfig& config);

}  // namespace marketsim::monitors
