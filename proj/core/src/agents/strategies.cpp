#include <cmath>
#include <deque>
#include <set>

#include "marketsim/agents/agent.hpp"
#include "marketsim/agents/latency_table.hpp"
#include "marketsim/errors.hpp"

namespace marketsim::agents {

namespace {

using engine::OrderKind;
using engine::TimeInForce;

Side parse_side(const std::string& s, const std::string& path) {
  if (s == "buy") return Side::Buy;
  if (s == "sell") return Side::Sell;
  throw ConfigError(path, "side must be buy or sell, got " + s);
}

SimTime micros_param(const Params& p, const std::string& key, int64_t def) { return SimTime{p.get_int(key, def)}; }

/// Replays a fixed list of order actions.
class Scripted : public Agent {
 public:
  Scripted(ParticipantId id, std::string name, Capabilities caps, AgentEnv env, Params params,
           std::vector<ScriptAction> script)
      : Agent(id, std::move(name), std::move(caps), std::move(env), std::move(params)), script_(std::move(script)) {}

  void start() override {
    for (size_t i = 0; i < script_.size(); ++i) wake_at(script_[i].at, i);
  }

 protected:
  void on_timer(uint64_t tag) override {
    const ScriptAction& a = script_.at(tag);
    switch (a.op) {
      case ScriptAction::Op::New: {
        OrderMessage msg;
        msg.side = a.side;
        msg.kind = a.kind;
        msg.price = a.price;
        msg.qty = a.qty;
        msg.display_size = a.display;
        msg.discretion_ticks = a.discretion;
        msg.anonymous = a.anonymous;
        msg.routable = a.routable;
        msg.tif = a.tif;
        const OrderId id = submit(a.venue, msg);
        if (!a.tag.empty()) tags_[a.tag] = id;
        break;
      }
      case ScriptAction::Op::Cancel:
        if (auto it = tags_.find(a.tag); it != tags_.end()) cancel(it->second);
        break;
      case ScriptAction::Op::Modify:
        if (auto it = tags_.find(a.tag); it != tags_.end()) modify(it->second, a.new_price, a.new_qty);
        break;
    }
  }

 private:
  std::vector<ScriptAction> script_;
  std::map<std::string, OrderId> tags_;
};

/// Two-sided quote around the public value; requotes on every signal.
class MarketMaker : public Agent {
 public:
  using Agent::Agent;

  void start() override {
    venue_ = venue_param("venue");
    half_ = params_.get_int("half_spread", 1);
    size_ = Qty{params_.get_int("size", 100)};
    refill_ = params_.get_bool("refill", true);
    wake_at(micros_param(params_, "start_us", 0), 0);
  }

 protected:
  void on_timer(uint64_t) override {
    live_ = true;
    quote(Side::Buy);
    quote(Side::Sell);
  }

  void on_signal(const SignalUpdate&) override {
    if (!live_) return;
    if (bid_) cancel(bid_);
    if (ask_) cancel(ask_);
    quote(Side::Buy);
    quote(Side::Sell);
  }

  void on_report(const ExecutionReport& r) override {
    if (r.kind != ReportKind::Fill || r.leaves.value > 0 || !refill_) return;
    if (r.order_id == bid_) quote(Side::Buy);
    if (r.order_id == ask_) quote(Side::Sell);
  }

 private:
  void quote(Side side) {
    if (side == Side::Buy)
      bid_ = submit_limit(venue_, Side::Buy, value_ - Price{half_}, size_);
    else
      ask_ = submit_limit(venue_, Side::Sell, value_ + Price{half_}, size_);
  }

  VenueId venue_{0};
  int64_t half_{1};
  Qty size_{};
  bool refill_{true};
  bool live_{false};
  OrderId bid_{0};
  OrderId ask_{0};
};

/// Uninformed liquidity taker: random side, IOC at the touch it last saw.
class NoiseTrader : public Agent {
 public:
  using Agent::Agent;

  void start() override {
    venues_ = venue_list_param("venues");
    mean_gap_ = static_cast<double>(params_.get_int("mean_interval_us", 50'000));
    qty_ = Qty{params_.get_int("qty", 100)};
    remaining_ = params_.get_int("count", 1'000'000);
    rng_ = stream("noise");
    schedule_next(micros_param(params_, "start_us", 0));
  }

 protected:
  void on_timer(uint64_t) override {
    const VenueId v = venues_.at(static_cast<size_t>(rng_.uniform(0, static_cast<int64_t>(venues_.size()) - 1)));
    const Side side = rng_.uniform(0, 1) == 0 ? Side::Buy : Side::Sell;
    std::optional<Price> px;
    if (const auto* q = l1(v)) {
      const auto& touch = side == Side::Buy ? q->ask : q->bid;
      if (touch) px = touch->price;
    }
    if (px) submit_limit(v, side, *px, qty_, TimeInForce::Ioc);
    if (--remaining_ > 0) schedule_next(now());
  }

 private:
  void schedule_next(SimTime from) {
    const double u = 1.0 - rng_.unit();
    const auto gap = static_cast<int64_t>(std::llround(-std::log(u) * mean_gap_));
    wake_at(from + SimTime{std::max<int64_t>(1, gap)}, 0);
  }

  std::vector<VenueId> venues_;
  double mean_gap_{0};
  Qty qty_{};
  int64_t remaining_{0};
  RngStream rng_;
};

/// Works a large parent either as one iceberg or as a train of child limits.
class Investor : public Agent {
 public:
  using Agent::Agent;

  void start() override {
    venue_ = venue_param("venue");
    side_ = parse_side(params_.get_string("side", "buy"), name_ + ".params.side");
    total_ = Qty{params_.get_int("total", 100'000)};
    iceberg_ = params_.get_string("style", "iceberg") == "iceberg";
    display_ = Qty{params_.get_int("display", 1'000)};
    slice_ = Qty{params_.get_int("slice", 1'000)};
    interval_ = micros_param(params_, "interval_us", 10'000);
    random_ = params_.get_string("replenish", "fixed") == "random";
    wake_at(micros_param(params_, "start_us", 0), 0);
  }

 protected:
  void on_timer(uint64_t) override {
    const Price px = params_.has("price") ? Price{params_.get_int("price", 0)}
                                          : value_ + Price{params_.get_int("price_offset", 0)};
    if (iceberg_) {
      OrderMessage msg;
      msg.side = side_;
      msg.kind = OrderKind::Reserve;
      msg.price = px;
      msg.qty = total_;
      msg.display_size = display_;
      msg.replenish = random_ ? engine::ReplenishPolicy::Random : engine::ReplenishPolicy::Fixed;
      submit(venue_, msg);
      return;
    }
    const Qty q = min(slice_, total_ - sent_);
    if (q.value <= 0) return;
    submit_limit(venue_, side_, px, q);
    sent_ += q;
    if (sent_ < total_) wake_at(now() + interval_, 0);
  }

 private:
  VenueId venue_{0};
  Side side_{Side::Buy};
  Qty total_{};
  bool iceberg_{true};
  Qty display_{};
  Qty slice_{};
  SimTime interval_{};
  bool random_{false};
  Qty sent_{};
};

/// Sends a parent order to the venue showing the best price (largest size on
/// ties) and lets venue order protection route what it cannot fill.
class Broker : public Agent {
 public:
  using Agent::Agent;

  void start() override {
    venues_ = venue_list_param("venues");
    side_ = parse_side(params_.get_string("side", "buy"), name_ + ".params.side");
    qty_ = Qty{params_.get_int("qty", 100'000)};
    cap_ = params_.get_int("limit_cap_ticks", 1);
    wake_at(micros_param(params_, "start_us", 0), 0);
  }

 protected:
  void on_timer(uint64_t) override {
    std::optional<std::pair<VenueId, engine::QuoteView>> best;
    for (VenueId v : venues_) {
      const auto* q = l1(v);
      if (!q) continue;
      const auto& touch = side_ == Side::Buy ? q->ask : q->bid;
      if (!touch) continue;
      const bool better =
          !best || (side_ == Side::Buy ? touch->price < best->second.price : touch->price > best->second.price) ||
          (touch->price == best->second.price && touch->qty > best->second.qty);
      if (better) best = std::pair(v, *touch);
    }
    if (!best) return;
    OrderMessage msg;
    msg.side = side_;
    msg.kind = OrderKind::Limit;
    msg.price = side_ == Side::Buy ? best->second.price + Price{cap_} : best->second.price - Price{cap_};
    msg.qty = qty_;
    msg.tif = TimeInForce::Ioc;
    msg.routable = true;
    msg.anonymous = params_.get_bool("anonymous", false);
    submit(best->first, msg);
  }

 private:
  std::vector<VenueId> venues_;
  Side side_{Side::Buy};
  Qty qty_{};
  int64_t cap_{1};
};

/// Steady passive flow from one sender: a labeled warm-up, then anonymous
/// orders. Each order is withdrawn after a fixed time.
class OrderFlow : public Agent {
 public:
  using Agent::Agent;

  enum : uint64_t { kSend = 0, kCancel = 1 };

  void start() override {
    venue_ = venue_param("venue");
    warmup_ = params_.get_int("warmup", 20);
    count_ = params_.get_int("count", 100);
    interval_ = micros_param(params_, "interval_us", 20'000);
    jitter_ = params_.get_int("interval_jitter_us", 0);
    offset_ = params_.get_int("offset_ticks", 10);
    cancel_after_ = micros_param(params_, "cancel_after_us", 5'000);
    rng_ = stream("order-flow");
    wake_at(micros_param(params_, "start_us", 0), kSend);
  }

 protected:
  void on_timer(uint64_t tag) override {
    if (tag == kCancel) {
      cancel(pending_.front());
      pending_.pop_front();
      return;
    }
    OrderMessage msg;
    msg.side = Side::Buy;
    msg.kind = OrderKind::Limit;
    msg.price = value_ - Price{offset_ + rng_.uniform(0, 4)};
    msg.qty = round_lot(venue_);
    msg.anonymous = sent_ >= warmup_;
    pending_.push_back(submit(venue_, msg));
    wake_at(now() + cancel_after_, kCancel);
    if (++sent_ < warmup_ + count_) wake_at(now() + interval_ + SimTime{rng_.uniform(0, jitter_)}, kSend);
  }

 private:
  VenueId venue_{0};
  int64_t warmup_{0};
  int64_t count_{0};
  SimTime interval_{};
  int64_t jitter_{0};
  int64_t offset_{0};
  SimTime cancel_after_{};
  int64_t sent_{0};
  std::deque<OrderId> pending_;
  RngStream rng_;
};

/// Latency fingerprinting: learns per-sender latency from labeled listings
/// and attributes anonymous ones.
class Fingerprinter : public Agent {
 public:
  using Agent::Agent;

  void start() override {
    venue_ = venue_param("venue");
    table_ = LatencyTable(micros_param(params_, "epsilon_us", 50));
  }

 protected:
  void on_market_data(const MarketData& md) override {
    if (md.venue != venue_ || md.level != FeedLevel::L2) return;
    for (const BookUpdate& u : md.updates) {
      if (u.op != BookUpdate::Op::Add || !seen_.insert(u.public_id).second) continue;
      const SimTime observed = u.entry_ts - u.claimed_submit_ts;
      if (u.participant != kGenericParticipant) {
        table_.add_sample(u.participant, observed);
      } else {
        env_.trace->guesses.push_back(IdentityGuess{id_, now(), venue_, u.public_id, table_.attribute(observed)});
      }
    }
  }

 private:
  VenueId venue_{0};
  LatencyTable table_;
  std::set<uint64_t> seen_;
};

/// Round-lot IOC probes at the displayed touch. More fills at a price than
/// the public book showed there means undisclosed liquidity.
class Pinger : public Agent {
 public:
  using Agent::Agent;

  void start() override {
    venue_ = venue_param("venue");
    probe_side_ = parse_side(params_.get_string("side", "sell"), name_ + ".params.side");
    interval_ = micros_param(params_, "interval_us", 5'000);
    max_probes_ = params_.get_int("max_probes", 100);
    if (params_.has("price")) {
      target_ = Price{params_.get_int("price", 0)};
      arm(micros_param(params_, "start_us", 0));
    }
  }

 protected:
  void on_market_data(const MarketData& md) override {
    if (md.venue != venue_ || md.level != FeedLevel::L2 || !md.pre_trade) return;
    shown_.clear();
    filled_.clear();
    const auto& levels = probe_side_ == Side::Sell ? md.l2.bids : md.l2.asks;
    for (const auto& lv : levels) shown_[lv.price] = lv.qty;
    if (!target_ && !levels.empty()) {
      target_ = levels.front().price;
      arm(now());
    }
  }

  void on_timer(uint64_t) override {
    if (!target_ || probes_ >= max_probes_) return;
    ++probes_;
    submit_limit(venue_, probe_side_, *target_, round_lot(venue_), TimeInForce::Ioc);
    wake_at(now() + interval_, 0);
  }

  void on_report(const ExecutionReport& r) override {
    if (r.kind != ReportKind::Fill || r.maker) return;
    Qty& f = filled_[r.fill_price];
    f += r.fill_qty;
    const Qty shown = shown_.count(r.fill_price) ? shown_.at(r.fill_price) : Qty{};
    if (f > shown && believed_.insert(r.fill_price.value).second)
      env_.trace->beliefs.push_back(HiddenLiquidityBelief{id_, now(), venue_, opposite(probe_side_), r.fill_price});
  }

 private:
  void arm(SimTime at) {
    if (interval_.value > 0 && max_probes_ > 0) wake_at(at, 0);
  }

  VenueId venue_{0};
  Side probe_side_{Side::Sell};
  SimTime interval_{};
  int64_t max_probes_{0};
  int64_t probes_{0};
  std::optional<Price> target_;
  std::map<Price, Qty> shown_;
  std::map<Price, Qty> filled_;
  std::set<int64_t> believed_;
};

/// Paired submit/cancel far from the touch at a fixed cadence.
class QuoteStuffer : public Agent {
 public:
  using Agent::Agent;

  enum : uint64_t { kSubmit = 0, kCancel = 1 };

  void start() override {
    venue_ = venue_param("venue");
    start_ = micros_param(params_, "start_us", 0);
    end_ = start_ + micros_param(params_, "duration_us", 100'000);
    period_ = micros_param(params_, "period_us", 80);
    cancel_delay_ = micros_param(params_, "cancel_delay_us", 40);
    offset_ = params_.get_int("offset_ticks", 50);
    wake_at(start_, kSubmit);
  }

 protected:
  void on_timer(uint64_t tag) override {
    if (tag == kCancel) {
      cancel(pending_.front());
      pending_.pop_front();
      return;
    }
    if (now() >= end_) return;
    pending_.push_back(submit_limit(venue_, Side::Buy, value_ - Price{offset_}, round_lot(venue_)));
    wake_at(now() + cancel_delay_, kCancel);
    wake_at(now() + period_, kSubmit);
  }

 private:
  VenueId venue_{0};
  SimTime start_{};
  SimTime end_{};
  SimTime period_{};
  SimTime cancel_delay_{};
  int64_t offset_{0};
  std::deque<OrderId> pending_;
};

/// Trades against quotes left stale by a public value jump.
class Sniper : public Agent {
 public:
  using Agent::Agent;

  void start() override {
    venues_ = venue_list_param("venues");
    max_qty_ = params_.get_int("max_qty", 0);
    exit_ = params_.get_bool("exit", false);
  }

 protected:
  void on_signal(const SignalUpdate& s) override {
    for (OrderId id : exits_) cancel(id);
    exits_.clear();
    const bool up = s.value > s.previous;
    for (VenueId v : venues_) {
      const auto* q = l1(v);
      if (!q) continue;
      const auto& touch = up ? q->ask : q->bid;
      if (!touch) continue;
      const bool stale = up ? touch->price < s.value : touch->price > s.value;
      if (!stale) continue;
      const Qty qty = max_qty_ > 0 ? min(touch->qty, Qty{max_qty_}) : touch->qty;
      submit_limit(v, up ? Side::Buy : Side::Sell, touch->price, qty, TimeInForce::Ioc);
    }
  }

  void on_report(const ExecutionReport& r) override {
    if (!exit_ || r.kind != ReportKind::Fill || r.maker) return;
    exits_.push_back(submit_limit(r.venue, opposite(r.side), value_, r.fill_qty));
  }

 private:
  std::vector<VenueId> venues_;
  int64_t max_qty_{0};
  bool exit_{false};
  std::vector<OrderId> exits_;
};

/// Rests a small ping in front of displayed size at one venue. When it
/// fills, races the broker's routed remainder to the other venue, buys out
/// the displayed size there and re-offers it at a markup.
class Scalper : public Agent {
 public:
  using Agent::Agent;

  void start() override {
    ping_venue_ = venue_param("ping_venue");
    target_venue_ = venue_param("target_venue");
    markup_ = params_.get_int("markup_ticks", 1);
    wake_at(micros_param(params_, "start_us", 0), 0);
  }

 protected:
  void on_timer(uint64_t) override {
    const Price px = params_.has("ping_price") ? Price{params_.get_int("ping_price", 0)} : value_;
    ping_ = submit_limit(ping_venue_, Side::Sell, px, Qty{params_.get_int("ping_qty", 100)});
  }

  void on_report(const ExecutionReport& r) override {
    if (fired_ || r.kind != ReportKind::Fill || r.order_id != ping_) return;
    const auto* q = l1(target_venue_);
    if (!q || !q->ask) return;
    fired_ = true;
    const auto ask = *q->ask;
    submit_limit(target_venue_, Side::Buy, ask.price, ask.qty, TimeInForce::Ioc);
    submit_limit(target_venue_, Side::Sell, ask.price + Price{markup_}, ask.qty);
  }

 private:
  VenueId ping_venue_{0};
  VenueId target_venue_{0};
  int64_t markup_{1};
  OrderId ping_{0};
  bool fired_{false};
};

/// Uses the special order types to rank ahead of earlier orders.
/// hide_and_light: posts at the lock-prone price (the away best ask).
/// day_iso: fires when the away ask it watches on a direct feed lifts.
class QueueJumper : public Agent {
 public:
  using Agent::Agent;

  void start() override {
    venue_ = venue_param("venue");
    iso_ = params_.get_string("mode", "hide_and_light") == "day_iso";
    if (iso_) away_ = venue_param("away_venue");
    qty_ = Qty{params_.get_int("qty", 100)};
    use_limit_ = params_.get_bool("plain_limit", false);
    if (!iso_) wake_at(micros_param(params_, "at_us", 0), 0);
  }

 protected:
  void on_timer(uint64_t) override {
    std::optional<Price> px;
    if (params_.has("price"))
      px = Price{params_.get_int("price", 0)};
    else if (nbbo_ && nbbo_->best_ask)
      px = nbbo_->best_ask->price;
    if (px) post(use_limit_ ? OrderKind::Limit : OrderKind::HideAndLight, *px);
  }

  void on_market_data(const MarketData& md) override {
    if (!iso_ || fired_ || md.venue != away_ || !md.pre_trade) return;
    const auto ask = md.l1.ask;
    if (last_ask_ && (!ask || ask->price > *last_ask_)) {
      fired_ = true;
      post(use_limit_ ? OrderKind::Limit : OrderKind::DayIso, *last_ask_);
    }
    if (ask) last_ask_ = ask->price;
  }

 private:
  void post(OrderKind kind, Price px) {
    OrderMessage msg;
    msg.side = Side::Buy;
    msg.kind = kind;
    msg.price = px;
    msg.qty = qty_;
    submit(venue_, msg);
  }

  VenueId venue_{0};
  VenueId away_{0};
  bool iso_{false};
  bool use_limit_{false};
  bool fired_{false};
  Qty qty_{};
  std::optional<Price> last_ask_;
};

}  // namespace

const std::vector<std::string>& known_strategies() {
  static const std::vector<std::string> names = {"scripted", "market_maker", "noise",   "investor",
                                                 "broker",   "order_flow",   "fingerprint", "ping",
                                                 "quote_stuff", "snipe",     "scalp",   "queue_jump"};
  return names;
}

std::unique_ptr<Agent> make_agent(const std::string& strategy, ParticipantId id, std::string name, Capabilities caps,
                                  AgentEnv env, Params params, std::vector<ScriptAction> script) {
  auto build = [&]<typename T>() -> std::unique_ptr<Agent> {
    return std::make_unique<T>(id, std::move(name), std::move(caps), std::move(env), std::move(params));
  };
  if (strategy == "scripted")
    return std::make_unique<Scripted>(id, std::move(name), std::move(caps), std::move(env), std::move(params),
                                      std::move(script));
  if (strategy == "market_maker") return build.operator()<MarketMaker>();
  if (strategy == "noise") return build.operator()<NoiseTrader>();
  if (strategy == "investor") return build.operator()<Investor>();
  if (strategy == "broker") return build.operator()<Broker>();
  if (strategy == "order_flow") return build.operator()<OrderFlow>();
  if (strategy == "fingerprint") return build.operator()<Fingerprinter>();
  if (strategy == "ping") return build.operator()<Pinger>();
  if (strategy == "quote_stuff") return build.operator()<QuoteStuffer>();
  if (strategy == "snipe") return build.operator()<Sniper>();
  if (strategy == "scalp") return build.operator()<Scalper>();
  if (strategy == "queue_jump") return build.operator()<QueueJumper>();
  throw ConfigError("", "unknown strategy " + strategy);
}

}  // namespace marketsim::agents
