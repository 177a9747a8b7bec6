#pragma once

#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "marketsim/engine/order_book.hpp"
#include "marketsim/simnet/network.hpp"
#include "marketsim/trace.hpp"

namespace marketsim::venue {

/// What a venue does with an order that would trade through a better away
/// quote.
enum class ProtectionPolicy : uint8_t { Route, Reject };

struct VenueConfig {
  VenueId id{0};
  std::string name;
  InstrumentId instrument{0};
  int64_t tick_size{1};
  Qty round_lot{100};
  engine::MatchingAlgo algo{engine::MatchingAlgo::Fifo};
  SimTime speed_bump_in{};
  SimTime speed_bump_out{};
  /// Cancels skip the inbound bump (lets resting liquidity withdraw ahead of
  /// delayed takers).
  bool bump_exempt_cancels{false};
  SimTime batch_interval{};  // 0 = continuous trading
  SimTime l1_interval{};     // 0 = publish on every change
  SimTime l2_interval{};
  size_t l2_depth{10};
  bool exec_report_immediate{true};
  bool dark{false};
  ProtectionPolicy protection{ProtectionPolicy::Route};
  uint64_t seed{0};

  bool operator==(const VenueConfig&) const = default;
};

/// One exchange: gateway with speed bumps, lock/cross handling, order
/// protection, execution reports and market-data publication. Driven
/// entirely by scheduler events addressed to its endpoint.
class Venue {
 public:
  Venue(VenueConfig config, simnet::Network& net, EndpointId self, SimTrace& trace);

  /// SIP endpoint for L1 publication and the endpoints of every venue (for
  /// routing).
  void connect(std::optional<EndpointId> sip, std::map<VenueId, EndpointId> venues);
  void subscribe(EndpointId subscriber, FeedLevel level);

  /// Arms feed and auction timers.
  void start();
  void handle(const simnet::Event& ev);

  const VenueConfig& config() const { return config_; }
  const engine::OrderBook& book() const { return book_; }
  EndpointId endpoint() const { return self_; }

  /// Best quote on `side` across other venues, as last heard from the SIP.
  std::optional<NbboSide> away_best(Side side) const;

 private:
  enum TimerTag : uint64_t { kL1Tick = 1, kL2Tick = 2, kAuction = 3 };

  void on_gateway(const OrderMessage& msg, EndpointId from);
  void process(const OrderMessage& msg);
  void on_new(const OrderMessage& msg);
  void on_cancel(const OrderMessage& msg);
  void on_modify(const OrderMessage& msg);
  void on_nbbo(const NbboQuote& q);
  void on_timer(uint64_t tag);

  bool locks(Side side, Price price) const;
  void route(engine::Order& order, const OrderMessage& msg, VenueId dest, Qty qty);
  void record_order(const engine::Order& order, const OrderMessage& msg);
  void emit_trades(const std::vector<engine::Trade>& trades, bool auction,
                   std::optional<std::pair<OrderId, Qty>> incoming = std::nullopt);
  void report(ParticipantId to, ExecutionReport r);
  void flush_reports();
  /// Journals book changes, derives order-level feed updates and publishes
  /// whatever event-driven feeds are due.
  void after_step();
  void publish(FeedLevel level);

  VenueConfig config_;
  simnet::Network& net_;
  EndpointId self_;
  SimTrace& trace_;
  engine::OrderBook book_;

  std::optional<EndpointId> sip_;
  std::map<VenueId, EndpointId> venue_endpoints_;
  std::map<VenueId, engine::L1View> away_;
  std::vector<EndpointId> l1_subscribers_;
  std::vector<EndpointId> l2_subscribers_;

  uint64_t next_public_id_{1};
  std::unordered_map<OrderId, uint64_t> public_ids_;
  std::unordered_map<OrderId, OrderRecord> records_;
  std::unordered_map<OrderId, BookUpdate> visible_;

  std::vector<BookUpdate> pending_updates_;
  std::vector<Print> pending_prints_l1_;
  std::vector<Print> pending_prints_l2_;
  bool l2_dirty_{false};
  engine::L1View last_l1_published_;
  engine::L1View last_sip_l1_;
  std::vector<std::pair<ParticipantId, ExecutionReport>> held_reports_;
  std::unordered_map<uint64_t, bool> published_trades_;
};

}  // namespace marketsim::venue
