#include "marketsim/venue/venue.hpp"

#include <algorithm>

#include "marketsim/errors.hpp"

namespace marketsim::venue {

using engine::DisplayState;
using engine::Order;
using engine::OrderKind;

Venue::Venue(VenueConfig config, simnet::Network& net, EndpointId self, SimTrace& trace)
    : config_(std::move(config)),
      net_(net),
      self_(self),
      trace_(trace),
      book_(engine::BookConfig{config_.instrument, config_.algo, config_.round_lot, config_.seed}) {}

void Venue::connect(std::optional<EndpointId> sip, std::map<VenueId, EndpointId> venues) {
  sip_ = sip;
  venue_endpoints_ = std::move(venues);
}

void Venue::subscribe(EndpointId subscriber, FeedLevel level) {
  (level == FeedLevel::L1 ? l1_subscribers_ : l2_subscribers_).push_back(subscriber);
}

void Venue::start() {
  auto& sched = net_.scheduler();
  const SimTime now = sched.now();
  if (config_.l1_interval.value > 0) sched.schedule(now + config_.l1_interval, self_, self_, Timer{kL1Tick});
  if (config_.l2_interval.value > 0) sched.schedule(now + config_.l2_interval, self_, self_, Timer{kL2Tick});
  if (config_.batch_interval.value > 0)
    sched.schedule(now + config_.batch_interval, self_, self_, Timer{kAuction});
}

void Venue::handle(const simnet::Event& ev) {
  if (const auto* msg = std::get_if<OrderMessage>(&ev.payload)) {
    on_gateway(*msg, ev.src);
  } else if (const auto* task = std::get_if<EngineTask>(&ev.payload)) {
    process(task->msg);
  } else if (const auto* q = std::get_if<NbboQuote>(&ev.payload)) {
    on_nbbo(*q);
  } else if (const auto* t = std::get_if<Timer>(&ev.payload)) {
    on_timer(t->tag);
  }
}

void Venue::on_gateway(const OrderMessage& msg, EndpointId from) {
  const SimTime now = net_.scheduler().now();
  if (!msg.routed) trace_.messages.push_back(MessageRecord{now, config_.id, msg.participant, msg.type});
  // Venue-to-venue routed orders are not participant traffic and pass straight through.
  SimTime bump = config_.speed_bump_in;
  if (msg.routed || (msg.type == MsgType::Cancel && config_.bump_exempt_cancels)) bump = SimTime{};
  if (bump.value > 0) {
    net_.scheduler().schedule(now + bump, self_, self_, EngineTask{msg, from});
    return;
  }
  process(msg);
}

void Venue::process(const OrderMessage& msg) {
  switch (msg.type) {
    case MsgType::New: on_new(msg); break;
    case MsgType::Cancel: on_cancel(msg); break;
    case MsgType::Modify: on_modify(msg); break;
  }
  after_step();
}

std::optional<NbboSide> Venue::away_best(Side side) const {
  std::optional<NbboSide> best;
  for (const auto& [venue, l1] : away_) {
    const auto& q = side == Side::Buy ? l1.bid : l1.ask;
    if (!q) continue;
    const bool better = !best || (side == Side::Buy ? q->price > best->price : q->price < best->price);
    if (better) best = NbboSide{q->price, q->qty, venue};
  }
  return best;
}

bool Venue::locks(Side side, Price price) const {
  const auto away = away_best(opposite(side));
  if (!away) return false;
  return side == Side::Buy ? away->price <= price : away->price >= price;
}

void Venue::record_order(const Order& order, const OrderMessage& msg) {
  OrderRecord rec;
  rec.order = order.id;
  rec.venue = config_.id;
  rec.participant = order.participant;
  rec.kind = order.kind;
  rec.side = order.side;
  rec.price = order.limit_price;
  rec.total = order.total_qty;
  rec.display_size = order.kind == OrderKind::Reserve ? order.display_size : order.total_qty;
  rec.anonymous = order.anonymous;
  rec.claimed_submit_ts = msg.claimed_submit_ts;
  rec.accepted_ts = net_.scheduler().now();
  rec.public_id = next_public_id_++;
  rec.routed = msg.routed;
  public_ids_[order.id] = rec.public_id;
  records_[order.id] = rec;
  trace_.orders.push_back(rec);
}

void Venue::on_new(const OrderMessage& msg) {
  const SimTime now = net_.scheduler().now();
  auto reject = [&](const std::string& why) {
    ExecutionReport r;
    r.kind = ReportKind::Rejected;
    r.order_id = msg.order_id;
    r.side = msg.side;
    r.reason = why;
    report(msg.participant, r);
  };
  if (msg.qty.value <= 0) return reject("non-positive quantity");
  if (msg.kind != OrderKind::Market && (!msg.price || msg.price->value < 0)) return reject("missing price");
  if (msg.kind == OrderKind::Reserve && msg.display_size.value <= 0) return reject("missing display size");
  if (msg.discretion_ticks < 0) return reject("negative discretion range");
  if (msg.instrument != config_.instrument) return reject("unknown instrument");
  if (book_.contains(msg.order_id)) return reject("duplicate order id");

  Order o = engine::make_order(msg.order_id, msg.side, msg.kind, msg.price, msg.qty, msg.participant);
  o.venue = config_.id;
  o.instrument = msg.instrument;
  if (msg.kind == OrderKind::Reserve) {
    o.display_size = msg.display_size;
    o.replenish = msg.replenish;
  }
  o.discretion_ticks = msg.discretion_ticks;
  o.anonymous = msg.anonymous;
  o.claimed_submit_ts = msg.claimed_submit_ts;
  if (msg.tif == engine::TimeInForce::Ioc || msg.routed) o.tif = engine::TimeInForce::Ioc;
  o.displayed_qty = engine::initial_display(o);

  record_order(o, msg);

  if (config_.batch_interval.value > 0) {
    try {
      book_.add_to_auction(o, now);
    } catch (const Error& e) {
      reject(e.what());
    }
    return;
  }

  // Day ISOs carry their own sweep responsibility; routed orders were
  // already protected by the sending venue.
  const bool protect = !msg.routed && o.kind != OrderKind::DayIso;
  std::optional<NbboSide> away;
  std::optional<Price> bound;
  if (protect && (away = away_best(opposite(o.side)))) bound = away->price;

  std::vector<engine::Trade> trades;
  try {
    trades = book_.match(o, now, bound);
    auto extra = book_.discretionary_probe(o, now, bound);
    trades.insert(trades.end(), extra.begin(), extra.end());
  } catch (const Error& e) {
    return reject(e.what());
  }
  emit_trades(trades, false, std::pair(o.id, o.open_qty));
  if (o.open_qty.value <= 0) return;

  const bool through_away = away && o.accepts(away->price);
  ExecutionReport r;
  r.order_id = o.id;
  r.side = o.side;
  if (through_away && msg.routable) {
    if (config_.protection != ProtectionPolicy::Route || !venue_endpoints_.count(away->venue)) {
      r.kind = ReportKind::Rejected;
      r.reason = "better price at away venue";
      report(o.participant, r);
      return;
    }
    // Take out the protected quote, then sweep the local book for the rest.
    const Qty sent = min(o.open_qty, away->qty);
    route(o, msg, away->venue, sent);
    o.open_qty -= sent;
    if (o.open_qty.value <= 0) return;
    try {
      trades = book_.match(o, now, std::nullopt);
    } catch (const Error& e) {
      return reject(e.what());
    }
    emit_trades(trades, false, std::pair(o.id, o.open_qty));
    if (o.open_qty.value <= 0) return;
  }
  if (o.is_market() || o.tif == engine::TimeInForce::Ioc) {
    r.kind = ReportKind::Canceled;
    r.reason = "unfilled remainder";
    report(o.participant, r);
    return;
  }
  if (through_away) {
    switch (o.kind) {
      case OrderKind::Limit:
        o.display_state = DisplayState::Slid;
        o.original_price = o.price();
        o.limit_price = o.is_buy() ? away->price - Price{1} : away->price + Price{1};
        break;
      case OrderKind::HideAndLight:
        o.display_state = DisplayState::Hidden;
        break;
      case OrderKind::Hidden:
        break;
      default:
        r.kind = ReportKind::Canceled;
        r.reason = "would lock or cross the market";
        report(o.participant, r);
        return;
    }
    o.displayed_qty = engine::initial_display(o);
  }
  book_.rest(o, now);
}

void Venue::route(Order& order, const OrderMessage& msg, VenueId dest, Qty qty) {
  OrderMessage child = msg;
  child.qty = qty;
  child.tif = engine::TimeInForce::Ioc;
  child.routed = true;
  child.routed_from = config_.id;
  net_.send(self_, venue_endpoints_.at(dest), child);

  ExecutionReport r;
  r.kind = ReportKind::Routed;
  r.order_id = order.id;
  r.side = order.side;
  r.fill_qty = qty;  // quantity sent away
  r.leaves = order.open_qty - qty;
  r.routed_to = dest;
  report(order.participant, r);
}

void Venue::on_cancel(const OrderMessage& msg) {
  const SimTime now = net_.scheduler().now();
  ExecutionReport r;
  r.order_id = msg.order_id;
  r.side = msg.side;
  const Order* o = book_.find(msg.order_id);
  bool owned = o && o->participant == msg.participant;
  if (!o) {
    for (const auto& p : book_.pending_market_orders())
      if (p.id == msg.order_id && p.participant == msg.participant) owned = true;
  }
  if (!owned) {
    r.kind = ReportKind::CancelRejected;
    r.reason = "unknown order";
    report(msg.participant, r);
    return;
  }
  const Order out = book_.cancel_order(msg.order_id, now);
  r.kind = ReportKind::Canceled;
  r.side = out.side;
  r.reason = "canceled " + std::to_string(out.open_qty.value);
  report(msg.participant, r);
}

void Venue::on_modify(const OrderMessage& msg) {
  const SimTime now = net_.scheduler().now();
  ExecutionReport r;
  r.order_id = msg.order_id;
  const Order* o = book_.find(msg.order_id);
  if (!o || o->participant != msg.participant) {
    r.kind = ReportKind::CancelRejected;
    r.reason = "unknown order";
    report(msg.participant, r);
    return;
  }
  try {
    auto m = book_.modify_order(msg.order_id, msg.new_price, msg.new_qty, now);
    emit_trades(m.trades, false, std::pair(msg.order_id, m.order.open_qty));
    r.kind = m.resting ? ReportKind::Modified : ReportKind::Canceled;
    r.side = m.order.side;
    r.leaves = m.resting ? m.order.open_qty : Qty{};
  } catch (const Error& e) {
    r.kind = ReportKind::CancelRejected;
    r.reason = e.what();
  }
  report(msg.participant, r);
}

void Venue::on_nbbo(const NbboQuote& q) {
  away_ = q.venues;
  away_.erase(config_.id);
  if (config_.batch_interval.value > 0) return;

  const SimTime now = net_.scheduler().now();
  std::vector<OrderId> relight;
  std::vector<Order> revert;
  std::vector<std::pair<OrderId, Price>> reslide;
  for (const Order& o : book_.resting_orders()) {
    if (o.kind == OrderKind::HideAndLight && o.display_state == DisplayState::Hidden) {
      if (!locks(o.side, o.price())) relight.push_back(o.id);
    } else if (o.display_state == DisplayState::Slid) {
      if (!locks(o.side, o.original_price)) {
        revert.push_back(o);
      } else {
        const auto away = away_best(opposite(o.side));
        const Price target = o.is_buy() ? away->price - Price{1} : away->price + Price{1};
        const auto local = book_.best_price(opposite(o.side), false);
        const bool marketable = local && (o.is_buy() ? *local <= target : *local >= target);
        if (target != o.price() && !marketable) reslide.emplace_back(o.id, target);
      }
    }
  }
  // Relit orders keep their place; reverted ones queue behind them.
  for (OrderId id : relight) book_.relight(id, now);
  std::sort(revert.begin(), revert.end(), [](const Order& a, const Order& b) {
    return std::pair(a.entry_ts, a.entry_seq) < std::pair(b.entry_ts, b.entry_seq);
  });
  for (const Order& o : revert) {
    if (!book_.contains(o.id)) continue;
    auto trades = book_.revert_slid(o.id, now);
    const Order* after = book_.find(o.id);
    emit_trades(trades, false, std::pair(o.id, after ? after->open_qty : Qty{}));
  }
  for (auto [id, price] : reslide)
    if (book_.contains(id)) book_.reslide(id, price, now);
  after_step();
}

void Venue::on_timer(uint64_t tag) {
  auto& sched = net_.scheduler();
  const SimTime now = sched.now();
  switch (tag) {
    case kL1Tick:
      flush_reports();
      if (book_.best_quotes() != last_l1_published_ || !pending_prints_l1_.empty()) publish(FeedLevel::L1);
      sched.schedule(now + config_.l1_interval, self_, self_, Timer{kL1Tick});
      break;
    case kL2Tick:
      if (l2_dirty_ || !pending_prints_l2_.empty()) publish(FeedLevel::L2);
      sched.schedule(now + config_.l2_interval, self_, self_, Timer{kL2Tick});
      break;
    case kAuction: {
      auto result = book_.clear_batch_auction(now);
      emit_trades(result.trades, true);
      for (const Order& o : result.expired) {
        ExecutionReport r;
        r.kind = ReportKind::Canceled;
        r.order_id = o.id;
        r.side = o.side;
        r.reason = "expired after call";
        report(o.participant, r);
      }
      after_step();
      sched.schedule(now + config_.batch_interval, self_, self_, Timer{kAuction});
      break;
    }
    default:
      break;
  }
}

void Venue::emit_trades(const std::vector<engine::Trade>& trades, bool auction,
                        std::optional<std::pair<OrderId, Qty>> incoming) {
  if (trades.empty()) return;
  // Leaves after each fill: what remains now plus every later fill.
  std::unordered_map<OrderId, Qty> later;
  auto current = [&](OrderId id) {
    if (incoming && incoming->first == id) return incoming->second;
    const Order* o = book_.find(id);
    return o ? o->open_qty : Qty{};
  };
  std::vector<std::pair<Qty, Qty>> leaves(trades.size());
  for (size_t i = trades.size(); i-- > 0;) {
    const auto& t = trades[i];
    leaves[i] = {current(t.taker_order_id) + later[t.taker_order_id], current(t.maker_order_id) + later[t.maker_order_id]};
    later[t.taker_order_id] += t.qty;
    later[t.maker_order_id] += t.qty;
  }
  for (size_t i = 0; i < trades.size(); ++i) {
    const auto& t = trades[i];
    TradeRecord rec;
    rec.trade_id = trace_.trades.size() + 1;
    rec.ts = t.ts;
    rec.venue = config_.id;
    rec.instrument = config_.instrument;
    rec.price = t.price;
    rec.qty = t.qty;
    rec.taker_order = t.taker_order_id;
    rec.maker_order = t.maker_order_id;
    rec.taker = t.taker_participant;
    rec.maker = t.maker_participant;
    rec.aggressor = t.aggressor_side;
    rec.maker_class = t.maker_class;
    rec.auction = auction;
    trace_.trades.push_back(rec);

    const Print print{rec.trade_id, t.ts, t.price, t.qty, t.aggressor_side};
    pending_prints_l1_.push_back(print);
    pending_prints_l2_.push_back(print);

    ExecutionReport r;
    r.kind = ReportKind::Fill;
    r.fill_qty = t.qty;
    r.fill_price = t.price;
    r.order_id = t.taker_order_id;
    r.side = t.aggressor_side;
    r.leaves = leaves[i].first;
    report(t.taker_participant, r);
    r.order_id = t.maker_order_id;
    r.side = opposite(t.aggressor_side);
    r.leaves = leaves[i].second;
    r.maker = true;
    report(t.maker_participant, r);
  }
}

void Venue::report(ParticipantId to, ExecutionReport r) {
  r.venue = config_.id;
  r.ts = net_.scheduler().now();
  if (!config_.exec_report_immediate && config_.l1_interval.value > 0) {
    held_reports_.emplace_back(to, std::move(r));
    return;
  }
  net_.send(self_, static_cast<EndpointId>(to), std::move(r), config_.speed_bump_out);
}

void Venue::flush_reports() {
  for (auto& [to, r] : held_reports_) net_.send(self_, static_cast<EndpointId>(to), std::move(r), config_.speed_bump_out);
  held_reports_.clear();
}

void Venue::after_step() {
  const SimTime now = net_.scheduler().now();
  for (const auto& c : book_.drain_changes()) {
    trace_.book_events.push_back(BookEventRecord{c.ts, config_.id, c.kind, c.id, c.side, c.price, c.display_class,
                                                 c.open_qty, c.displayed_qty, c.priority_reset, c.entry_ts,
                                                 c.entry_seq});
    const Order* o = book_.find(c.id);
    const bool shown = o && o->display_class() == engine::DisplayClass::Lit && o->displayed_qty.value > 0;
    auto it = visible_.find(c.id);
    if (shown) {
      BookUpdate u;
      u.op = BookUpdate::Op::Add;
      u.public_id = public_ids_.count(c.id) ? public_ids_.at(c.id) : 0;
      u.side = o->side;
      u.price = o->price();
      u.displayed = o->displayed_qty;
      u.participant = o->anonymous ? kGenericParticipant : o->participant;
      u.claimed_submit_ts = o->claimed_submit_ts;
      u.entry_ts = o->entry_ts;
      if (it == visible_.end()) {
        pending_updates_.push_back(u);
        visible_.emplace(c.id, u);
      } else if (it->second.price != u.price) {
        BookUpdate del = it->second;
        del.op = BookUpdate::Op::Delete;
        pending_updates_.push_back(del);
        pending_updates_.push_back(u);
        it->second = u;
      } else if (it->second.displayed != u.displayed) {
        u.op = BookUpdate::Op::Update;
        pending_updates_.push_back(u);
        it->second = u;
      }
    } else if (it != visible_.end()) {
      BookUpdate del = it->second;
      del.op = BookUpdate::Op::Delete;
      del.displayed = Qty{};
      pending_updates_.push_back(del);
      visible_.erase(it);
    }
  }
  if (!pending_updates_.empty()) l2_dirty_ = true;

  const engine::L1View l1 = book_.best_quotes();
  if (!config_.dark && sip_ && l1 != last_sip_l1_) {
    net_.send(self_, *sip_, VenueQuote{config_.id, l1, now}, config_.speed_bump_out);
    last_sip_l1_ = l1;
  }
  if (config_.l1_interval.value == 0 && (l1 != last_l1_published_ || !pending_prints_l1_.empty()))
    publish(FeedLevel::L1);
  if (config_.l2_interval.value == 0 && (l2_dirty_ || !pending_prints_l2_.empty())) publish(FeedLevel::L2);
}

void Venue::publish(FeedLevel level) {
  const SimTime now = net_.scheduler().now();
  auto md = std::make_shared<MarketData>();
  md->venue = config_.id;
  md->instrument = config_.instrument;
  md->level = level;
  md->venue_ts = now;
  auto& prints = level == FeedLevel::L1 ? pending_prints_l1_ : pending_prints_l2_;
  md->prints = std::move(prints);
  prints.clear();
  if (config_.dark) {
    md->pre_trade = false;
    pending_updates_.clear();
    l2_dirty_ = false;
  } else {
    md->l1 = book_.best_quotes();
    if (level == FeedLevel::L2) {
      md->l2 = book_.snapshot(config_.l2_depth);
      md->updates = std::move(pending_updates_);
      pending_updates_.clear();
      l2_dirty_ = false;
    } else {
      last_l1_published_ = md->l1;
    }
  }
  const auto& subs = level == FeedLevel::L1 ? l1_subscribers_ : l2_subscribers_;
  if (subs.empty() || (!md->pre_trade && md->prints.empty())) return;
  for (const Print& p : md->prints)
    if (published_trades_.emplace(p.trade_id, true).second)
      trace_.print_publications.push_back(PrintPublication{p.trade_id, now, config_.id});
  if (md->pre_trade) trace_.pre_trade_messages += subs.size();
  if (!md->prints.empty()) trace_.post_trade_messages += subs.size();
  MarketDataPtr shared = md;
  for (EndpointId sub : subs) net_.send(self_, sub, shared, config_.speed_bump_out);
}

}  // namespace marketsim::venue
