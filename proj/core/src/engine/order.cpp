#include "marketsim/engine/order.hpp"

#include <array>
#include <utility>

namespace marketsim::engine {

namespace {
constexpr std::array<std::pair<OrderKind, std::string_view>, 7> kKindNames{{
    {OrderKind::Market, "market"},
    {OrderKind::Limit, "limit"},
    {OrderKind::Reserve, "reserve"},
    {OrderKind::Discretionary, "discretionary"},
    {OrderKind::Hidden, "hidden"},
    {OrderKind::HideAndLight, "hide_and_light"},
    {OrderKind::DayIso, "day_iso"},
}};
}  // namespace

std::string_view to_string(OrderKind kind) {
  for (auto [k, name] : kKindNames)
    if (k == kind) return name;
  return "?";
}

std::optional<OrderKind> parse_order_kind(std::string_view s) {
  for (auto [k, name] : kKindNames)
    if (name == s) return k;
  return std::nullopt;
}

Qty initial_display(const Order& order) {
  switch (order.kind) {
    case OrderKind::Market:
    case OrderKind::Hidden:
      return Qty{0};
    case OrderKind::Reserve:
      return min(order.display_size, order.open_qty);
    case OrderKind::HideAndLight:
      return order.display_state == DisplayState::Hidden ? Qty{0} : order.open_qty;
    default:
      return order.open_qty;
  }
}

Order make_order(OrderId id, Side side, OrderKind kind, std::optional<Price> price, Qty qty,
                 ParticipantId participant) {
  Order o;
  o.id = id;
  o.side = side;
  o.kind = kind;
  o.participant = participant;
  o.limit_price = kind == OrderKind::Market ? std::nullopt : price;
  o.original_price = price.value_or(Price{});
  o.total_qty = qty;
  o.open_qty = qty;
  o.display_size = qty;
  o.displayed_qty = initial_display(o);
  if (kind == OrderKind::Market) o.tif = TimeInForce::Ioc;
  return o;
}

RankKey rank_key(const Order& order) {
  const int64_t p = order.limit_price ? order.limit_price->value : 0;
  return RankKey{
      order.is_buy() ? -p : p,
      order.display_class(),
      static_cast<uint8_t>(order.head_priority ? 0 : 1),
      order.entry_ts,
      order.entry_seq,
  };
}

}  // namespace marketsim::engine
