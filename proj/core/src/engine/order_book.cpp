#include "marketsim/engine/order_book.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "marketsim/errors.hpp"
#include "marketsim/rng.hpp"

namespace marketsim::engine {

namespace {

__extension__ using Wide = __int128;

bool price_reaches(Side taker_side, Price p, Price limit) {
  return taker_side == Side::Buy ? p <= limit : p >= limit;
}

bool before_in_time(const Order& a, const Order& b) {
  return std::pair(a.entry_ts, a.entry_seq) < std::pair(b.entry_ts, b.entry_seq);
}

}  // namespace

std::vector<Qty> pro_rata_allocation(Qty incoming, const std::vector<Qty>& resting) {
  std::vector<Qty> alloc(resting.size());
  const int64_t total = std::accumulate(resting.begin(), resting.end(), int64_t{0},
                                        [](int64_t acc, Qty q) { return acc + q.value; });
  if (total <= 0 || incoming.value <= 0) return alloc;
  if (incoming.value >= total) return resting;

  std::vector<int64_t> remainder(resting.size());
  int64_t allocated = 0;
  for (size_t i = 0; i < resting.size(); ++i) {
    const Wide num = static_cast<Wide>(incoming.value) * resting[i].value;
    alloc[i] = Qty{static_cast<int64_t>(num / total)};
    remainder[i] = static_cast<int64_t>(num % total);
    allocated += alloc[i].value;
  }
  std::vector<size_t> order(resting.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t a, size_t b) { return remainder[a] > remainder[b]; });
  int64_t leftover = incoming.value - allocated;
  for (size_t k = 0; k < order.size() && leftover > 0; ++k, --leftover) alloc[order[k]] += Qty{1};
  return alloc;
}

OrderBook::OrderBook(BookConfig config) : config_(config) {}

std::optional<Price> OrderBook::tighter(Side taker_side, std::optional<Price> a, std::optional<Price> b) {
  if (!a) return b;
  if (!b) return a;
  return taker_side == Side::Buy ? std::min(*a, *b) : std::max(*a, *b);
}

void OrderBook::record(ChangeKind kind, const Order& order, SimTime now, bool priority_reset) {
  changes_.push_back(BookChange{kind, order.id, order.side, order.limit_price.value_or(Price{}),
                                order.display_class(), order.open_qty, order.displayed_qty, now,
                                priority_reset, order.entry_ts, order.entry_seq});
}

std::vector<BookChange> OrderBook::drain_changes() {
  std::vector<BookChange> out;
  out.swap(changes_);
  return out;
}

void OrderBook::validate_new(const Order& order) const {
  if (order.instrument != config_.instrument)
    throw Error(ErrorCode::UnknownInstrument, "instrument " + std::to_string(order.instrument));
  if (orders_.count(order.id) ||
      std::any_of(pending_market_.begin(), pending_market_.end(),
                  [&](const Order& o) { return o.id == order.id; }))
    throw Error(ErrorCode::DuplicateOrderId, "order " + std::to_string(order.id));
  if (order.open_qty <= Qty{0} || order.open_qty > order.total_qty)
    throw Error(ErrorCode::InvalidOrder, "non-positive quantity");
  if (!order.is_market() && (!order.limit_price || order.limit_price->value < 0))
    throw Error(ErrorCode::InvalidOrder, "limit-family order without a valid price");
  if (order.kind == OrderKind::Reserve && order.display_size <= Qty{0})
    throw Error(ErrorCode::InvalidOrder, "reserve order without display size");
}

void OrderBook::link(const Order& order) {
  LevelQueue& queue = levels(order.side)[order.price()];
  const RankKey key = rank_key(order);
  auto pos = std::upper_bound(queue.begin(), queue.end(), key,
                              [&](const RankKey& k, OrderId id) { return k < rank_key(orders_.at(id)); });
  queue.insert(pos, order.id);
}

void OrderBook::unlink(const Order& order) {
  Levels& side = levels(order.side);
  auto it = side.find(order.price());
  if (it == side.end()) return;
  auto& queue = it->second;
  queue.erase(std::remove(queue.begin(), queue.end(), order.id), queue.end());
  if (queue.empty()) side.erase(it);
}

void OrderBook::reposition(Order& order) {
  LevelQueue& queue = levels(order.side).at(order.price());
  queue.erase(std::remove(queue.begin(), queue.end(), order.id), queue.end());
  const RankKey key = rank_key(order);
  auto pos = std::upper_bound(queue.begin(), queue.end(), key,
                              [&](const RankKey& k, OrderId id) { return k < rank_key(orders_.at(id)); });
  queue.insert(pos, order.id);
}

void OrderBook::fill(Order& taker, Order& maker, Qty qty, Price price, SimTime now,
                     std::vector<Trade>& out) {
  const DisplayClass maker_class = maker.display_class();
  taker.open_qty -= qty;
  if (taker.displayed_qty > taker.open_qty) taker.displayed_qty = taker.open_qty;
  maker.open_qty -= qty;
  maker.displayed_qty -= min(qty, maker.displayed_qty);
  out.push_back(Trade{taker.id, maker.id, taker.participant, maker.participant, price, qty, now,
                      taker.side, maker_class});
  last_trade_price_ = price;
  record(ChangeKind::Filled, maker, now, false);
}

bool OrderBook::replenish_reserve(Order& order, SimTime now) {
  if (order.kind != OrderKind::Reserve) return false;
  if (order.displayed_qty >= config_.round_lot) return false;
  if (order.open_qty <= order.displayed_qty) return false;

  Qty target = order.display_size;
  if (order.replenish == ReplenishPolicy::Random) {
    RngStream stream(config_.seed, "reserve", order.id);
    for (uint64_t i = 0; i < order.replenish_draws; ++i) stream.next_u64();
    const int64_t lo = std::min(config_.round_lot.value, order.display_size.value);
    target = Qty{stream.uniform(lo, order.display_size.value)};
    order.replenish_draws = stream.counter();
  }
  const Qty refilled = min(order.open_qty, max(target, order.displayed_qty));
  if (refilled == order.displayed_qty) return false;
  order.displayed_qty = refilled;
  order.entry_ts = now;
  order.entry_seq = next_seq();
  record(ChangeKind::Replenished, order, now, true);
  return true;
}

bool OrderBook::settle_maker(OrderId maker_id, SimTime now) {
  Order& maker = orders_.at(maker_id);
  LevelQueue& queue = levels(maker.side).at(maker.price());
  if (maker.open_qty <= Qty{0}) {
    queue.erase(std::remove(queue.begin(), queue.end(), maker_id), queue.end());
    orders_.erase(maker_id);
    return true;
  }
  if (replenish_reserve(maker, now)) {
    reposition(maker);
    return true;
  }
  return false;
}

std::vector<Trade> OrderBook::match(Order& incoming, SimTime now, std::optional<Price> bound) {
  const auto limit = tighter(incoming.side, incoming.limit_price, bound);
  if (config_.algo == MatchingAlgo::ProRata) return match_pro_rata(incoming, now, limit);
  return match_fifo(incoming, now, limit);
}

std::vector<Trade> OrderBook::match_fifo(Order& in, SimTime now, std::optional<Price> limit,
                                         bool lit_only) {
  std::vector<Trade> trades;
  Levels& book = levels(opposite(in.side));
  auto it = book.begin();
  while (in.open_qty > Qty{0} && it != book.end()) {
    const Price p = it->first;
    if (limit && !price_reaches(in.side, p, *limit)) break;
    LevelQueue& queue = it->second;
    size_t idx = 0;
    while (in.open_qty > Qty{0} && idx < queue.size()) {
      Order& maker = orders_.at(queue[idx]);
      const Qty q = min(in.open_qty, maker.executable_qty());
      if ((lit_only && maker.display_class() != DisplayClass::Lit) || q <= Qty{0}) {
        ++idx;
        continue;
      }
      fill(in, maker, q, p, now, trades);
      if (!settle_maker(maker.id, now)) ++idx;
    }
    if (queue.empty())
      it = book.erase(it);
    else
      ++it;
  }
  return trades;
}

std::vector<Trade> OrderBook::match_pro_rata(Order& in, SimTime now, std::optional<Price> limit,
                                             bool lit_only) {
  std::vector<Trade> trades;
  Levels& book = levels(opposite(in.side));
  auto it = book.begin();
  while (in.open_qty > Qty{0} && it != book.end()) {
    const Price p = it->first;
    if (limit && !price_reaches(in.side, p, *limit)) break;
    LevelQueue& queue = it->second;

    const bool any_lit = std::any_of(queue.begin(), queue.end(), [&](OrderId id) {
      return orders_.at(id).display_class() == DisplayClass::Lit;
    });
    if (!any_lit && (lit_only || queue.empty())) {
      if (queue.empty())
        it = book.erase(it);
      else
        ++it;
      continue;
    }
    const DisplayClass cls = any_lit ? DisplayClass::Lit : DisplayClass::Hidden;

    std::vector<OrderId> members;
    std::vector<Qty> sizes;
    for (OrderId id : queue) {
      const Order& o = orders_.at(id);
      if (o.display_class() != cls) continue;
      members.push_back(id);
      sizes.push_back(o.executable_qty());
    }
    const auto alloc = pro_rata_allocation(in.open_qty, sizes);
    for (size_t i = 0; i < members.size(); ++i)
      if (alloc[i] > Qty{0}) fill(in, orders_.at(members[i]), alloc[i], p, now, trades);
    for (size_t i = 0; i < members.size(); ++i)
      if (alloc[i] > Qty{0}) settle_maker(members[i], now);

    if (queue.empty()) it = book.erase(it);
  }
  return trades;
}

std::vector<Trade> OrderBook::discretionary_probe(Order& in, SimTime now, std::optional<Price> bound) {
  if (in.kind != OrderKind::Discretionary || in.open_qty <= Qty{0} || in.discretion_ticks <= 0 ||
      !in.limit_price)
    return {};
  const Price extended = in.is_buy() ? in.price() + Price{in.discretion_ticks}
                                     : Price{std::max<int64_t>(0, in.price().value - in.discretion_ticks)};
  const auto limit = tighter(in.side, extended, bound);
  if (config_.algo == MatchingAlgo::ProRata) return match_pro_rata(in, now, limit, true);
  return match_fifo(in, now, limit, true);
}

InsertResult OrderBook::insert_order(Order order, SimTime now) {
  validate_new(order);
  InsertResult result;
  result.trades = match(order, now);
  auto extra = discretionary_probe(order, now);
  result.trades.insert(result.trades.end(), extra.begin(), extra.end());
  if (order.open_qty > Qty{0}) {
    if (order.is_market() || order.tif == TimeInForce::Ioc)
      result.canceled = order.open_qty;
    else
      result.resting = rest(std::move(order), now);
  }
  return result;
}

const Order& OrderBook::rest(Order order, SimTime now) {
  if (orders_.count(order.id)) throw Error(ErrorCode::DuplicateOrderId, "order " + std::to_string(order.id));
  if (!order.limit_price) throw Error(ErrorCode::InvalidOrder, "cannot rest an order without a price");
  order.entry_ts = now;
  order.entry_seq = next_seq();
  order.displayed_qty = initial_display(order);
  order.head_priority = false;
  if (order.kind == OrderKind::DayIso) {
    auto [_, first] = iso_levels_.emplace(order.side, order.price().value);
    order.head_priority = first;
  }
  const OrderId id = order.id;
  auto [it, _] = orders_.emplace(id, std::move(order));
  link(it->second);
  record(ChangeKind::Added, it->second, now, true);
  return it->second;
}

Order OrderBook::cancel_order(OrderId id, SimTime now) {
  auto it = orders_.find(id);
  if (it == orders_.end()) {
    auto pm = std::find_if(pending_market_.begin(), pending_market_.end(),
                           [&](const Order& o) { return o.id == id; });
    if (pm == pending_market_.end())
      throw Error(ErrorCode::UnknownOrder, "order " + std::to_string(id));
    Order out = *pm;
    pending_market_.erase(pm);
    return out;
  }
  Order out = it->second;
  unlink(out);
  orders_.erase(it);
  record(ChangeKind::Canceled, out, now, false);
  return out;
}

ModifyResult OrderBook::modify_order(OrderId id, std::optional<Price> new_price, std::optional<Qty> new_qty,
                                     SimTime now) {
  auto it = orders_.find(id);
  if (it == orders_.end()) throw Error(ErrorCode::UnknownOrder, "order " + std::to_string(id));
  if (new_qty && *new_qty <= Qty{0}) throw Error(ErrorCode::InvalidModification, "quantity must be positive");

  Order& current = it->second;
  const Price asked = current.display_state == DisplayState::Slid ? current.original_price : current.price();
  const bool price_change = new_price && *new_price != asked;
  const bool size_up = new_qty && *new_qty > current.open_qty;

  if (!price_change && !size_up) {
    if (new_qty && *new_qty < current.open_qty) {
      const Qty delta = current.open_qty - *new_qty;
      current.open_qty = *new_qty;
      current.total_qty -= delta;
      if (current.displayed_qty > current.open_qty) current.displayed_qty = current.open_qty;
      record(ChangeKind::Modified, current, now, false);
    }
    return ModifyResult{current, {}, true};
  }

  // Loses priority: cancel and re-enter as a fresh order.
  Order reentry = cancel_order(id, now);
  if (new_qty) {
    reentry.total_qty += *new_qty - reentry.open_qty;
    reentry.open_qty = *new_qty;
  }
  if (new_price) {
    reentry.limit_price = *new_price;
    reentry.original_price = *new_price;
  } else if (reentry.display_state == DisplayState::Slid) {
    reentry.limit_price = reentry.original_price;
  }
  reentry.display_state = DisplayState::Displayed;
  reentry.displayed_qty = initial_display(reentry);
  auto inserted = insert_order(reentry, now);
  ModifyResult out;
  out.trades = std::move(inserted.trades);
  out.resting = inserted.resting.has_value();
  if (inserted.resting) {
    out.order = *inserted.resting;
  } else {
    out.order = reentry;
    out.order.open_qty = inserted.canceled;
  }
  return out;
}

void OrderBook::relight(OrderId id, SimTime now) {
  auto it = orders_.find(id);
  if (it == orders_.end()) throw Error(ErrorCode::UnknownOrder, "order " + std::to_string(id));
  Order& o = it->second;
  if (o.kind != OrderKind::HideAndLight || o.display_state != DisplayState::Hidden) return;
  o.display_state = DisplayState::Displayed;
  o.displayed_qty = o.open_qty;
  reposition(o);
  record(ChangeKind::Reclassed, o, now, false);
}

std::vector<Trade> OrderBook::revert_slid(OrderId id, SimTime now) {
  auto it = orders_.find(id);
  if (it == orders_.end()) throw Error(ErrorCode::UnknownOrder, "order " + std::to_string(id));
  if (it->second.display_state != DisplayState::Slid) return {};
  Order o = it->second;
  unlink(o);
  orders_.erase(it);
  o.limit_price = o.original_price;
  o.display_state = DisplayState::Displayed;
  auto trades = match(o, now);
  if (o.open_qty > Qty{0}) {
    o.entry_ts = now;
    o.entry_seq = next_seq();
    o.displayed_qty = initial_display(o);
    auto [pos, _] = orders_.emplace(id, std::move(o));
    link(pos->second);
    record(ChangeKind::Repriced, pos->second, now, false);
  }
  return trades;
}

void OrderBook::reslide(OrderId id, Price price, SimTime now) {
  auto it = orders_.find(id);
  if (it == orders_.end()) throw Error(ErrorCode::UnknownOrder, "order " + std::to_string(id));
  Order& o = it->second;
  if (o.display_state != DisplayState::Slid || o.price() == price) return;
  unlink(o);
  o.limit_price = price;
  o.entry_ts = now;
  o.entry_seq = next_seq();
  link(o);
  record(ChangeKind::Repriced, o, now, false);
}

void OrderBook::add_to_auction(Order order, SimTime now) {
  validate_new(order);
  if (order.is_market()) {
    order.entry_ts = now;
    order.entry_seq = next_seq();
    pending_market_.push_back(std::move(order));
    return;
  }
  rest(std::move(order), now);
}

AuctionVolume OrderBook::auction_volume_at(Price p) const {
  AuctionVolume v;
  for (const auto& [price, queue] : bids_)
    if (price >= p)
      for (OrderId id : queue) v.demand += orders_.at(id).open_qty;
  for (const auto& [price, queue] : asks_)
    if (price <= p)
      for (OrderId id : queue) v.supply += orders_.at(id).open_qty;
  for (const Order& o : pending_market_) (o.is_buy() ? v.demand : v.supply) += o.open_qty;
  return v;
}

AuctionResult OrderBook::clear_batch_auction(SimTime now) {
  AuctionResult result;

  std::set<Price> candidates;
  std::optional<Price> lo, hi;
  for (const Levels* side : {&bids_, &asks_})
    for (const auto& [price, _] : *side) {
      lo = lo ? std::min(*lo, price) : price;
      hi = hi ? std::max(*hi, price) : price;
    }
  if (lo) {
    for (const Levels* side : {&bids_, &asks_})
      for (const auto& [price, _] : *side)
        for (int64_t d : {-1, 0, 1}) {
          const Price c{price.value + d};
          if (c >= *lo && c <= *hi) candidates.insert(c);
        }
    if (last_trade_price_) candidates.insert(std::clamp(*last_trade_price_, *lo, *hi));
  } else if (last_trade_price_) {
    candidates.insert(*last_trade_price_);
  }

  Qty best{};
  std::optional<Price> first_best, last_best;
  for (Price c : candidates) {
    const Qty v = auction_volume_at(c).executable();
    if (v > best) {
      best = v;
      first_best = last_best = c;
    } else if (v == best && v > Qty{0}) {
      last_best = c;
    }
  }

  if (best > Qty{0}) {
    const Price p = last_trade_price_ ? std::clamp(*last_trade_price_, *first_best, *last_best) : *first_best;
    result.clearing_price = p;
    result.volume = best;

    struct Leg {
      Order* order;
      bool pending;
      Qty take;
    };
    auto collect = [&](Side side) {
      std::vector<Leg> legs;
      Qty remaining = best;
      for (Order& o : pending_market_)
        if (o.side == side && remaining > Qty{0}) {
          const Qty take = min(o.open_qty, remaining);
          legs.push_back({&o, true, take});
          remaining -= take;
        }
      for (auto& [price, queue] : levels(side)) {
        if (remaining <= Qty{0}) break;
        if (side == Side::Buy ? price < p : price > p) break;
        for (OrderId id : queue) {
          if (remaining <= Qty{0}) break;
          Order& o = orders_.at(id);
          const Qty take = min(o.open_qty, remaining);
          legs.push_back({&o, false, take});
          remaining -= take;
        }
      }
      return legs;
    };
    auto buys = collect(Side::Buy);
    auto sells = collect(Side::Sell);

    std::vector<OrderId> touched;
    size_t i = 0, j = 0;
    while (i < buys.size() && j < sells.size()) {
      Leg& b = buys[i];
      Leg& s = sells[j];
      const Qty q = min(b.take, s.take);
      const bool buy_later = before_in_time(*s.order, *b.order);
      Order& taker = buy_later ? *b.order : *s.order;
      Order& maker = buy_later ? *s.order : *b.order;
      const DisplayClass maker_class = maker.display_class();
      for (Order* o : {b.order, s.order}) {
        o->open_qty -= q;
        o->displayed_qty -= min(q, o->displayed_qty);
      }
      result.trades.push_back(Trade{taker.id, maker.id, taker.participant, maker.participant, p, q, now,
                                    taker.side, maker_class});
      for (const Leg* leg : {&b, &s})
        if (!leg->pending) {
          record(ChangeKind::Filled, *leg->order, now, false);
          touched.push_back(leg->order->id);
        }
      b.take -= q;
      s.take -= q;
      if (b.take <= Qty{0}) ++i;
      if (s.take <= Qty{0}) ++j;
    }
    last_trade_price_ = p;

    std::sort(touched.begin(), touched.end());
    touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
    // Settle in rank order so any refilled reserves get deterministic sequence numbers.
    std::sort(touched.begin(), touched.end(), [&](OrderId a, OrderId b) {
      return rank_key(orders_.at(a)) < rank_key(orders_.at(b));
    });
    for (OrderId id : touched) settle_maker(id, now);
    for (Levels* side : {&bids_, &asks_})
      for (auto it = side->begin(); it != side->end();)
        it = it->second.empty() ? side->erase(it) : std::next(it);
  }

  for (Order& o : pending_market_)
    if (o.open_qty > Qty{0}) result.expired.push_back(o);
  pending_market_.clear();
  std::vector<OrderId> ioc;
  for (const auto& [id, o] : orders_)
    if (o.tif == TimeInForce::Ioc) ioc.push_back(id);
  std::sort(ioc.begin(), ioc.end());
  for (OrderId id : ioc) result.expired.push_back(cancel_order(id, now));
  return result;
}

L1View OrderBook::best_quotes() const {
  L1View view;
  auto top = [&](const Levels& side) -> std::optional<QuoteView> {
    for (const auto& [price, queue] : side) {
      Qty shown{};
      for (OrderId id : queue) {
        const Order& o = orders_.at(id);
        if (o.display_class() == DisplayClass::Lit) shown += o.displayed_qty;
      }
      if (shown > Qty{0}) return QuoteView{price, shown};
    }
    return std::nullopt;
  };
  view.bid = top(bids_);
  view.ask = top(asks_);
  return view;
}

L2View OrderBook::snapshot(size_t depth) const {
  L2View view;
  auto walk = [&](const Levels& side, std::vector<LevelView>& out) {
    for (const auto& [price, queue] : side) {
      if (out.size() >= depth) break;
      LevelView level{price, Qty{}, 0};
      for (OrderId id : queue) {
        const Order& o = orders_.at(id);
        if (o.display_class() != DisplayClass::Lit || o.displayed_qty <= Qty{0}) continue;
        level.qty += o.displayed_qty;
        ++level.orders;
      }
      if (level.qty > Qty{0}) out.push_back(level);
    }
  };
  walk(bids_, view.bids);
  walk(asks_, view.asks);
  return view;
}

const Order* OrderBook::find(OrderId id) const {
  auto it = orders_.find(id);
  return it == orders_.end() ? nullptr : &it->second;
}

std::vector<Order> OrderBook::level_orders(Side side, Price price) const {
  std::vector<Order> out;
  const Levels& book = levels(side);
  auto it = book.find(price);
  if (it == book.end()) return out;
  for (OrderId id : it->second) out.push_back(orders_.at(id));
  return out;
}

std::vector<Order> OrderBook::resting_orders() const {
  std::vector<Order> out;
  for (const Levels* side : {&bids_, &asks_})
    for (const auto& [_, queue] : *side)
      for (OrderId id : queue) out.push_back(orders_.at(id));
  return out;
}

std::optional<Price> OrderBook::best_price(Side side, bool displayed_only) const {
  for (const auto& [price, queue] : levels(side)) {
    if (!displayed_only) return price;
    for (OrderId id : queue) {
      const Order& o = orders_.at(id);
      if (o.display_class() == DisplayClass::Lit && o.displayed_qty > Qty{0}) return price;
    }
  }
  return std::nullopt;
}

}  // namespace marketsim::engine
