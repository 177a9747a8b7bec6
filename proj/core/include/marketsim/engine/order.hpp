#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

#include "marketsim/types.hpp"

namespace marketsim::engine {

enum class OrderKind : uint8_t { Market, Limit, Reserve, Discretionary, Hidden, HideAndLight, DayIso };
enum class ReplenishPolicy : uint8_t { Fixed, Random };
enum class DisplayState : uint8_t { Displayed, Hidden, Slid };
enum class TimeInForce : uint8_t { Day, Ioc };

/// Lit orders outrank hidden ones at the same price.
enum class DisplayClass : uint8_t { Lit = 0, Hidden = 1 };

std::string_view to_string(OrderKind kind);
std::optional<OrderKind> parse_order_kind(std::string_view s);

struct Order {
  OrderId id{0};
  ParticipantId participant{0};
  VenueId venue{0};
  InstrumentId instrument{0};
  Side side{Side::Buy};
  OrderKind kind{OrderKind::Limit};

  // Reserve only.
  Qty display_size{};
  ReplenishPolicy replenish{ReplenishPolicy::Fixed};
  uint64_t replenish_draws{0};

  // Discretionary only; never shown in any view.
  int64_t discretion_ticks{0};

  /// Executable price. While Slid this is the adjusted (displayed) price and
  /// `original_price` holds the one the sender asked for.
  std::optional<Price> limit_price;
  Price original_price{};

  Qty total_qty{};
  Qty open_qty{};
  Qty displayed_qty{};
  bool anonymous{false};

  SimTime claimed_submit_ts{};
  SimTime entry_ts{};
  uint64_t entry_seq{0};

  DisplayState display_state{DisplayState::Displayed};
  TimeInForce tif{TimeInForce::Day};

  /// Set on the first Day ISO to rest at its price level in a session.
  bool head_priority{false};

  bool is_buy() const { return side == Side::Buy; }
  bool is_market() const { return kind == OrderKind::Market; }
  Price price() const { return *limit_price; }

  DisplayClass display_class() const {
    if (kind == OrderKind::Hidden) return DisplayClass::Hidden;
    if (display_state == DisplayState::Hidden) return DisplayClass::Hidden;
    return DisplayClass::Lit;
  }

  /// Quantity a counterparty can take from this order right now: the shown
  /// slice for reserves, everything for other kinds.
  Qty executable_qty() const {
    if (kind == OrderKind::Reserve) return displayed_qty;
    return open_qty;
  }

  Qty reserve_qty() const { return open_qty - displayed_qty; }

  /// True when `p` is acceptable to this order as a taker.
  bool accepts(Price p) const {
    if (!limit_price) return true;
    return is_buy() ? p <= *limit_price : p >= *limit_price;
  }
};

/// Quantity an order shows when it first rests.
Qty initial_display(const Order& order);

/// Builds an order with open = total and the kind's initial display.
Order make_order(OrderId id, Side side, OrderKind kind, std::optional<Price> price, Qty qty,
                 ParticipantId participant = 0);

/// Total order on same-side resting orders; lower sorts first.
struct RankKey {
  int64_t price_priority;  // negated price for bids
  DisplayClass display_class;
  uint8_t tier;  // 0 for first-Day-ISO head priority
  SimTime entry_ts;
  uint64_t entry_seq;

  auto operator<=>(const RankKey&) const = default;
};

RankKey rank_key(const Order& order);

inline bool ranks_before(const Order& a, const Order& b) { return rank_key(a) < rank_key(b); }

}  // namespace marketsim::engine
