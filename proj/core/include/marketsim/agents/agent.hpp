#pragma once

#include <map>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "marketsim/rng.hpp"
#include "marketsim/simnet/consumer.hpp"
#include "marketsim/simnet/network.hpp"
#include "marketsim/trace.hpp"

namespace marketsim::agents {

using ParamValue = std::variant<bool, int64_t, double, std::string, std::vector<std::string>>;
using ParamMap = std::map<std::string, ParamValue>;

/// Typed lookups over a strategy's free-form parameters. Missing keys give
/// the default; a present key of the wrong type throws ConfigError.
class Params {
 public:
  Params() = default;
  Params(ParamMap values, std::string path) : values_(std::move(values)), path_(std::move(path)) {}

  bool has(const std::string& key) const { return values_.count(key) > 0; }
  int64_t get_int(const std::string& key, int64_t def) const;
  double get_double(const std::string& key, double def) const;
  bool get_bool(const std::string& key, bool def) const;
  std::string get_string(const std::string& key, const std::string& def) const;
  std::vector<std::string> get_list(const std::string& key) const;

 private:
  ParamMap values_;
  std::string path_;
};

struct Capabilities {
  std::map<VenueId, FeedLevel> feeds;  // direct venue feeds
  bool sip{false};                     // consolidated NBBO subscription
  double processing_rate{0.0};         // market-data msgs per ms, 0 = unbounded
  bool knows_hide_and_light{false};
  bool knows_day_iso{false};
};

struct ScriptAction {
  enum class Op : uint8_t { New, Cancel, Modify };
  SimTime at{};
  Op op{Op::New};
  std::string tag;  // names the order for later cancel/modify
  VenueId venue{0};
  Side side{Side::Buy};
  engine::OrderKind kind{engine::OrderKind::Limit};
  std::optional<Price> price;
  Qty qty{};
  Qty display{};
  int64_t discretion{0};
  bool anonymous{false};
  bool routable{false};
  engine::TimeInForce tif{engine::TimeInForce::Day};
  std::optional<Price> new_price;
  std::optional<Qty> new_qty;

  bool operator==(const ScriptAction&) const = default;
};

/// What every agent can reach in the world it lives in.
struct AgentEnv {
  simnet::Network* net{nullptr};
  SimTrace* trace{nullptr};
  std::map<VenueId, EndpointId> venues;
  std::map<std::string, VenueId> venue_ids;
  std::map<VenueId, Qty> round_lots;
  InstrumentId instrument{0};
  Price initial_value{};
  uint64_t seed{0};
};

/// Base trader. Owns order-id allocation, working-order bookkeeping, the
/// market-data consumer queue and the latest processed views.
class Agent {
 public:
  Agent(ParticipantId id, std::string name, Capabilities caps, AgentEnv env, Params params);
  virtual ~Agent() = default;
  Agent(const Agent&) = delete;
  Agent& operator=(const Agent&) = delete;

  virtual void start() {}
  void handle(const simnet::Event& ev);

  ParticipantId id() const { return id_; }
  const std::string& name() const { return name_; }
  const Capabilities& capabilities() const { return caps_; }
  const simnet::ConsumerModel& consumer() const { return consumer_; }
  Qty bought() const { return bought_; }
  Qty sold() const { return sold_; }

 protected:
  struct Working {
    VenueId venue{0};
    Side side{Side::Buy};
    engine::OrderKind kind{engine::OrderKind::Limit};
    std::optional<Price> price;
    Qty leaves{};
  };

  virtual void on_report(const ExecutionReport&) {}
  virtual void on_market_data(const MarketData&) {}
  virtual void on_nbbo(const NbboQuote&) {}
  virtual void on_signal(const SignalUpdate&) {}
  virtual void on_timer(uint64_t) {}

  /// Fills id, participant, instrument and the claimed submit time, then
  /// sends. Throws OrderTypeNotPermitted for order types this agent was
  /// never told about.
  OrderId submit(VenueId venue, OrderMessage msg);
  OrderId submit_limit(VenueId venue, Side side, Price price, Qty qty,
                       engine::TimeInForce tif = engine::TimeInForce::Day);
  void cancel(OrderId id);
  void modify(OrderId id, std::optional<Price> price, std::optional<Qty> qty);
  void wake_at(SimTime at, uint64_t tag);

  SimTime now() const { return env_.net->scheduler().now(); }
  EndpointId endpoint() const { return static_cast<EndpointId>(id_); }
  RngStream stream(std::string_view purpose) const { return RngStream(env_.seed, purpose, id_); }
  VenueId venue_param(const std::string& key) const;
  std::vector<VenueId> venue_list_param(const std::string& key) const;
  Qty round_lot(VenueId venue) const;

  /// Latest processed top of book per venue (direct feeds only).
  const engine::L1View* l1(VenueId venue) const;
  const engine::L2View* l2(VenueId venue) const;

  ParticipantId id_;
  std::string name_;
  Capabilities caps_;
  AgentEnv env_;
  Params params_;

  Price value_{};  // latest public signal observed
  std::optional<NbboQuote> nbbo_;
  std::map<OrderId, Working> working_;

 private:
  void deliver(const MarketDataPtr& md);
  void deliver(const NbboQuote& q);
  void bookkeep(const ExecutionReport& r);

  simnet::ConsumerModel consumer_;
  uint64_t next_order_{1};
  std::map<VenueId, engine::L1View> l1_;
  std::map<VenueId, engine::L2View> l2_;
  Qty bought_{};
  Qty sold_{};
};

std::unique_ptr<Agent> make_agent(const std::string& strategy, ParticipantId id, std::string name, Capabilities caps,
                                  AgentEnv env, Params params, std::vector<ScriptAction> script);

/// Strategy names make_agent understands.
const std::vector<std::string>& known_strategies();

}  // namespace marketsim::agents
