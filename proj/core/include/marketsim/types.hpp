#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <limits>
#include <ostream>
#include <string_view>

namespace marketsim {

/// Integer quantity tagged with its unit so prices, sizes and times never mix.
template <typename Tag>
struct Strong {
  int64_t value{0};

  constexpr Strong() = default;
  constexpr explicit Strong(int64_t v) : value(v) {}

  constexpr auto operator<=>(const Strong&) const = default;

  constexpr Strong operator+(Strong o) const { return Strong{value + o.value}; }
  constexpr Strong operator-(Strong o) const { return Strong{value - o.value}; }
  constexpr Strong& operator+=(Strong o) {
    value += o.value;
    return *this;
  }
  constexpr Strong& operator-=(Strong o) {
    value -= o.value;
    return *this;
  }
  constexpr bool is_zero() const { return value == 0; }
};

template <typename Tag>
std::ostream& operator<<(std::ostream& os, Strong<Tag> s) {
  return os << s.value;
}

using Price = Strong<struct PriceTag>;   // ticks
using Qty = Strong<struct QtyTag>;       // shares
using SimTime = Strong<struct TimeTag>;  // microseconds since start

constexpr Price ticks(int64_t v) { return Price{v}; }
constexpr Qty shares(int64_t v) { return Qty{v}; }
constexpr SimTime micros(int64_t v) { return SimTime{v}; }
constexpr SimTime millis(int64_t v) { return SimTime{v * 1000}; }

constexpr Qty min(Qty a, Qty b) { return a < b ? a : b; }
constexpr Qty max(Qty a, Qty b) { return a < b ? b : a; }
constexpr SimTime max(SimTime a, SimTime b) { return a < b ? b : a; }

using OrderId = uint64_t;
using ParticipantId = uint32_t;
using VenueId = uint32_t;
using InstrumentId = uint32_t;
using EndpointId = uint32_t;

/// Shown in every public view in place of the owner of an anonymous order.
inline constexpr ParticipantId kGenericParticipant = std::numeric_limits<ParticipantId>::max();

enum class Side : uint8_t { Buy, Sell };

constexpr Side opposite(Side s) { return s == Side::Buy ? Side::Sell : Side::Buy; }
constexpr std::string_view to_string(Side s) { return s == Side::Buy ? "buy" : "sell"; }

}  // namespace marketsim

template <typename Tag>
struct std::hash<marketsim::Strong<Tag>> {
  size_t operator()(marketsim::Strong<Tag> s) const noexcept { return std::hash<int64_t>{}(s.value); }
};
