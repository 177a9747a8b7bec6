#include "reference_book.hpp"

#include <algorithm>
#include <string>

#include "marketsim/errors.hpp"
#include "marketsim/rng.hpp"

namespace marketsim::oracle {

using engine::Order;
using engine::OrderKind;
using engine::Trade;

namespace {

bool is_hidden(const Order& o) {
  return o.kind == OrderKind::Hidden || o.display_state == engine::DisplayState::Hidden;
}

Qty takeable(const Order& o) { return o.kind == OrderKind::Reserve ? o.displayed_qty : o.open_qty; }

// Same-price, same-side tie-break: lit, then first-ISO head, then time.
bool earlier_in_queue(const Order& a, const Order& b) {
  if (is_hidden(a) != is_hidden(b)) return !is_hidden(a);
  if (a.head_priority != b.head_priority) return a.head_priority;
  if (a.entry_ts != b.entry_ts) return a.entry_ts < b.entry_ts;
  return a.entry_seq < b.entry_seq;
}

bool better_maker(const Order& a, const Order& b) {
  const Price pa = *a.limit_price, pb = *b.limit_price;
  if (pa != pb) return a.side == Side::Buy ? pa > pb : pa < pb;
  return earlier_in_queue(a, b);
}

}  // namespace

std::vector<Qty> reference_pro_rata(Qty incoming, const std::vector<Qty>& resting) {
  int64_t total = 0;
  for (Qty q : resting) total += q.value;
  std::vector<Qty> out(resting.size());
  if (total == 0) return out;
  if (incoming.value >= total) return resting;
  // exact share_i = incoming * q_i / total; compare fractional parts as
  // numerators over the common denominator `total`.
  std::vector<int64_t> frac(resting.size());
  int64_t handed = 0;
  for (size_t i = 0; i < resting.size(); ++i) {
    int64_t whole = 0;
    int64_t num = 0;
    // Long division by repeated subtraction keeps this independent of the
    // engine's 128-bit arithmetic.
    for (int64_t k = 0; k < incoming.value; ++k) {
      num += resting[i].value;
      while (num >= total) {
        num -= total;
        ++whole;
      }
    }
    out[i] = Qty{whole};
    frac[i] = num;
    handed += whole;
  }
  std::vector<bool> bumped(resting.size(), false);
  for (int64_t left = incoming.value - handed; left > 0; --left) {
    size_t pick = resting.size();
    for (size_t i = 0; i < resting.size(); ++i) {
      if (bumped[i]) continue;
      if (pick == resting.size() || frac[i] > frac[pick]) pick = i;
    }
    bumped[pick] = true;
    out[pick] += Qty{1};
  }
  return out;
}

bool ReferenceBook::contains(OrderId id) const {
  return std::any_of(book_.begin(), book_.end(), [&](const Order& o) { return o.id == id; });
}

bool ReferenceBook::eligible(const Order& in, const Order& maker, std::optional<Price> limit,
                             bool lit_only) const {
  if (maker.side == in.side) return false;
  if (lit_only && is_hidden(maker)) return false;
  if (takeable(maker) <= Qty{0}) return false;
  if (limit) {
    if (in.side == Side::Buy && *maker.limit_price > *limit) return false;
    if (in.side == Side::Sell && *maker.limit_price < *limit) return false;
  }
  return true;
}

void ReferenceBook::after_fill(size_t index, SimTime now) {
  Order& o = book_[index];
  if (o.open_qty <= Qty{0}) {
    book_.erase(book_.begin() + static_cast<std::ptrdiff_t>(index));
    return;
  }
  if (o.kind != OrderKind::Reserve || o.displayed_qty >= round_lot_ || o.open_qty <= o.displayed_qty) return;
  Qty target = o.display_size;
  if (o.replenish == engine::ReplenishPolicy::Random) {
    RngStream stream(seed_, "reserve", o.id);
    for (uint64_t i = 0; i < o.replenish_draws; ++i) stream.next_u64();
    target = Qty{stream.uniform(std::min(round_lot_.value, o.display_size.value), o.display_size.value)};
    o.replenish_draws = stream.counter();
  }
  Qty refill = target > o.displayed_qty ? target : o.displayed_qty;
  if (refill > o.open_qty) refill = o.open_qty;
  if (refill == o.displayed_qty) return;
  o.displayed_qty = refill;
  o.entry_ts = now;
  o.entry_seq = ++seq_;
}

std::vector<Trade> ReferenceBook::match(Order& in, std::optional<Price> limit, bool lit_only, SimTime now) {
  return algo_ == engine::MatchingAlgo::Fifo ? match_fifo(in, limit, lit_only, now)
                                             : match_pro_rata(in, limit, lit_only, now);
}

std::vector<Trade> ReferenceBook::match_fifo(Order& in, std::optional<Price> limit, bool lit_only, SimTime now) {
  std::vector<Trade> trades;
  while (in.open_qty > Qty{0}) {
    size_t best = book_.size();
    for (size_t i = 0; i < book_.size(); ++i) {
      if (!eligible(in, book_[i], limit, lit_only)) continue;
      if (best == book_.size() || better_maker(book_[i], book_[best])) best = i;
    }
    if (best == book_.size()) break;
    Order& maker = book_[best];
    const Qty q = std::min(in.open_qty, takeable(maker));
    const auto cls = is_hidden(maker) ? engine::DisplayClass::Hidden : engine::DisplayClass::Lit;
    trades.push_back(Trade{in.id, maker.id, in.participant, maker.participant, *maker.limit_price, q, now,
                           in.side, cls});
    in.open_qty -= q;
    maker.open_qty -= q;
    maker.displayed_qty -= std::min(q, maker.displayed_qty);
    after_fill(best, now);
  }
  return trades;
}

std::vector<Trade> ReferenceBook::match_pro_rata(Order& in, std::optional<Price> limit, bool lit_only,
                                                 SimTime now) {
  std::vector<Trade> trades;
  while (in.open_qty > Qty{0}) {
    std::optional<Price> best;
    for (const Order& o : book_) {
      if (!eligible(in, o, limit, lit_only)) continue;
      if (!best || (in.side == Side::Buy ? *o.limit_price < *best : *o.limit_price > *best)) best = *o.limit_price;
    }
    if (!best) break;
    bool any_lit = false;
    for (const Order& o : book_)
      if (eligible(in, o, limit, lit_only) && *o.limit_price == *best && !is_hidden(o)) any_lit = true;
    std::vector<OrderId> members;
    for (const Order& o : book_)
      if (eligible(in, o, limit, lit_only) && *o.limit_price == *best && is_hidden(o) != any_lit)
        members.push_back(o.id);
    auto find = [&](OrderId id) {
      return static_cast<size_t>(
          std::find_if(book_.begin(), book_.end(), [&](const Order& o) { return o.id == id; }) - book_.begin());
    };
    std::sort(members.begin(), members.end(),
              [&](OrderId a, OrderId b) { return earlier_in_queue(book_[find(a)], book_[find(b)]); });
    std::vector<Qty> sizes;
    for (OrderId id : members) sizes.push_back(takeable(book_[find(id)]));
    const auto alloc = reference_pro_rata(in.open_qty, sizes);
    for (size_t i = 0; i < members.size(); ++i) {
      if (alloc[i] <= Qty{0}) continue;
      Order& maker = book_[find(members[i])];
      const auto cls = is_hidden(maker) ? engine::DisplayClass::Hidden : engine::DisplayClass::Lit;
      trades.push_back(Trade{in.id, maker.id, in.participant, maker.participant, *best, alloc[i], now, in.side,
                             cls});
      in.open_qty -= alloc[i];
      maker.open_qty -= alloc[i];
      maker.displayed_qty -= std::min(alloc[i], maker.displayed_qty);
    }
    for (size_t i = 0; i < members.size(); ++i)
      if (alloc[i] > Qty{0}) after_fill(find(members[i]), now);
  }
  return trades;
}

void ReferenceBook::rest(Order o, SimTime now) {
  o.entry_ts = now;
  o.entry_seq = ++seq_;
  switch (o.kind) {
    case OrderKind::Hidden:
      o.displayed_qty = Qty{0};
      break;
    case OrderKind::Reserve:
      o.displayed_qty = std::min(o.display_size, o.open_qty);
      break;
    default:
      o.displayed_qty = o.display_state == engine::DisplayState::Hidden ? Qty{0} : o.open_qty;
  }
  o.head_priority = false;
  if (o.kind == OrderKind::DayIso) {
    const std::pair<Side, int64_t> level{o.side, o.limit_price->value};
    if (std::find(iso_levels_.begin(), iso_levels_.end(), level) == iso_levels_.end()) {
      iso_levels_.push_back(level);
      o.head_priority = true;
    }
  }
  book_.push_back(std::move(o));
}

std::vector<Trade> ReferenceBook::insert(Order o, SimTime now) {
  if (o.instrument != instrument_) throw Error(ErrorCode::UnknownInstrument, "instrument");
  if (contains(o.id)) throw Error(ErrorCode::DuplicateOrderId, std::to_string(o.id));
  if (o.open_qty <= Qty{0}) throw Error(ErrorCode::InvalidOrder, "qty");
  if (o.kind != OrderKind::Market && !o.limit_price) throw Error(ErrorCode::InvalidOrder, "price");

  auto trades = match(o, o.limit_price, false, now);
  if (o.kind == OrderKind::Discretionary && o.open_qty > Qty{0} && o.discretion_ticks > 0) {
    const Price ext = o.side == Side::Buy ? *o.limit_price + Price{o.discretion_ticks}
                                          : Price{std::max<int64_t>(0, o.limit_price->value - o.discretion_ticks)};
    auto more = match(o, ext, true, now);
    trades.insert(trades.end(), more.begin(), more.end());
  }
  if (o.open_qty > Qty{0} && o.kind != OrderKind::Market && o.tif != engine::TimeInForce::Ioc) rest(o, now);
  return trades;
}

bool ReferenceBook::cancel(OrderId id) {
  auto it = std::find_if(book_.begin(), book_.end(), [&](const Order& o) { return o.id == id; });
  if (it == book_.end()) return false;
  book_.erase(it);
  return true;
}

std::vector<Trade> ReferenceBook::modify(OrderId id, std::optional<Price> new_price, std::optional<Qty> new_qty,
                                         SimTime now) {
  auto it = std::find_if(book_.begin(), book_.end(), [&](const Order& o) { return o.id == id; });
  if (it == book_.end()) throw Error(ErrorCode::UnknownOrder, std::to_string(id));
  if (new_qty && new_qty->value <= 0) throw Error(ErrorCode::InvalidModification, "qty");
  const bool reprice = new_price && *new_price != *it->limit_price;
  const bool grow = new_qty && *new_qty > it->open_qty;
  if (!reprice && !grow) {
    if (new_qty && *new_qty < it->open_qty) {
      it->total_qty -= it->open_qty - *new_qty;
      it->open_qty = *new_qty;
      if (it->displayed_qty > it->open_qty) it->displayed_qty = it->open_qty;
    }
    return {};
  }
  Order o = *it;
  book_.erase(it);
  if (new_qty) {
    o.total_qty += *new_qty - o.open_qty;
    o.open_qty = *new_qty;
  }
  if (new_price) {
    o.limit_price = *new_price;
    o.original_price = *new_price;
  }
  return insert(o, now);
}

std::vector<Order> ReferenceBook::resting() const {
  std::vector<Order> bids, asks;
  for (const Order& o : book_) (o.side == Side::Buy ? bids : asks).push_back(o);
  std::sort(bids.begin(), bids.end(), better_maker);
  std::sort(asks.begin(), asks.end(), better_maker);
  bids.insert(bids.end(), asks.begin(), asks.end());
  return bids;
}

}  // namespace marketsim::oracle
