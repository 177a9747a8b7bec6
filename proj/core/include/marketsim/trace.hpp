#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "marketsim/messages.hpp"
#include "marketsim/simnet/consumer.hpp"

namespace marketsim {

struct TradeRecord {
  uint64_t trade_id{0};
  SimTime ts{};
  VenueId venue{0};
  InstrumentId instrument{0};
  Price price{};
  Qty qty{};
  OrderId taker_order{0};
  OrderId maker_order{0};
  ParticipantId taker{0};
  ParticipantId maker{0};
  Side aggressor{Side::Buy};
  engine::DisplayClass maker_class{engine::DisplayClass::Lit};
  bool auction{false};

  ParticipantId buyer() const { return aggressor == Side::Buy ? taker : maker; }
  ParticipantId seller() const { return aggressor == Side::Buy ? maker : taker; }
};

struct BookEventRecord {
  SimTime ts{};
  VenueId venue{0};
  engine::ChangeKind kind{engine::ChangeKind::Added};
  OrderId order{0};
  Side side{Side::Buy};
  Price price{};
  engine::DisplayClass display_class{engine::DisplayClass::Lit};
  Qty open{};
  Qty displayed{};
  bool priority_reset{false};
  SimTime entry_ts{};
  uint64_t entry_seq{0};
};

struct OrderRecord {
  OrderId order{0};
  VenueId venue{0};
  ParticipantId participant{0};
  engine::OrderKind kind{engine::OrderKind::Limit};
  Side side{Side::Buy};
  std::optional<Price> price;
  Qty total{};
  Qty display_size{};
  bool anonymous{false};
  SimTime claimed_submit_ts{};  // as received by the venue
  SimTime accepted_ts{};
  uint64_t public_id{0};
  bool routed{false};
};

struct MessageRecord {
  SimTime ts{};
  VenueId venue{0};
  ParticipantId participant{0};
  MsgType type{MsgType::New};
};

struct PrintPublication {
  uint64_t trade_id{0};
  SimTime ts{};
  VenueId venue{0};
};

/// A pinging agent's claim that hidden liquidity rests at (venue, side, price).
struct HiddenLiquidityBelief {
  ParticipantId agent{0};
  SimTime ts{};
  VenueId venue{0};
  Side side{Side::Buy};
  Price price{};
};

/// A fingerprinting agent's attribution of an anonymous order.
struct IdentityGuess {
  ParticipantId agent{0};
  SimTime ts{};
  VenueId venue{0};
  uint64_t public_id{0};
  std::optional<ParticipantId> guess;
};

struct SignalPoint {
  SimTime ts{};
  Price value{};
};

struct AgentInfo {
  ParticipantId id{0};
  std::string name;
  std::string strategy;
  std::string cohort;
  // Fill totals as the agent saw them in its execution reports.
  Qty reported_bought{};
  Qty reported_sold{};
};

/// Everything the omniscient regulator sees after a run.
struct SimTrace {
  SimTime duration{};
  Price initial_value{};
  std::vector<SignalPoint> signal;  // jumps only, in time order
  std::map<VenueId, std::string> venue_names;
  std::map<VenueId, engine::MatchingAlgo> venue_algo;
  std::map<VenueId, bool> venue_batch;

  std::vector<AgentInfo> agents;
  std::vector<TradeRecord> trades;
  std::vector<BookEventRecord> book_events;
  std::vector<OrderRecord> orders;
  std::vector<MessageRecord> messages;
  std::vector<PrintPublication> print_publications;
  std::vector<HiddenLiquidityBelief> beliefs;
  std::vector<IdentityGuess> guesses;
  std::map<ParticipantId, std::vector<simnet::ConsumerModel::Sample>> feed_samples;
  uint64_t pre_trade_messages{0};
  uint64_t post_trade_messages{0};

  uint64_t event_hash{0};
  size_t event_count{0};

  /// Fundamental value in force at `t` (after any jump at exactly t).
  Price value_at(SimTime t) const;
  const AgentInfo* agent(ParticipantId id) const;
  std::string agent_name(ParticipantId id) const;
};

}  // namespace marketsim
