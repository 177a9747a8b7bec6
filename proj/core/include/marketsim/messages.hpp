#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "marketsim/engine/order_book.hpp"

namespace marketsim {

enum class MsgType : uint8_t { New, Cancel, Modify };

/// Order-entry instruction as it travels from a participant (or a routing
/// venue) to a venue gateway.
struct OrderMessage {
  MsgType type{MsgType::New};
  OrderId order_id{0};
  ParticipantId participant{0};
  InstrumentId instrument{0};
  Side side{Side::Buy};
  engine::OrderKind kind{engine::OrderKind::Limit};
  std::optional<Price> price;
  Qty qty{};
  Qty display_size{};
  engine::ReplenishPolicy replenish{engine::ReplenishPolicy::Fixed};
  int64_t discretion_ticks{0};
  bool anonymous{false};
  engine::TimeInForce tif{engine::TimeInForce::Day};
  /// Venue may forward a marketable remainder to a better-priced venue.
  bool routable{false};
  SimTime claimed_submit_ts{};

  // Modify only.
  std::optional<Price> new_price;
  std::optional<Qty> new_qty;

  /// Set by a venue forwarding a remainder; such orders skip protection.
  bool routed{false};
  VenueId routed_from{0};
};

enum class ReportKind : uint8_t { Accepted, Fill, Canceled, Rejected, Routed, Modified, CancelRejected };

struct ExecutionReport {
  ReportKind kind{ReportKind::Accepted};
  OrderId order_id{0};
  VenueId venue{0};
  Side side{Side::Buy};
  Qty fill_qty{};
  Price fill_price{};
  Qty leaves{};
  SimTime ts{};  // venue engine time
  bool maker{false};
  std::optional<VenueId> routed_to;
  std::string reason;
};

enum class FeedLevel : uint8_t { L1, L2 };

/// Order-level change carried by L2 messages. Public ids are assigned per
/// venue; anonymous orders show kGenericParticipant.
struct BookUpdate {
  enum class Op : uint8_t { Add, Update, Delete };
  Op op{Op::Add};
  uint64_t public_id{0};
  Side side{Side::Buy};
  Price price{};
  Qty displayed{};
  ParticipantId participant{kGenericParticipant};
  SimTime claimed_submit_ts{};
  SimTime entry_ts{};
};

struct Print {
  uint64_t trade_id{0};
  SimTime ts{};
  Price price{};
  Qty qty{};
  Side aggressor{Side::Buy};
};

struct MarketData {
  VenueId venue{0};
  InstrumentId instrument{0};
  FeedLevel level{FeedLevel::L1};
  SimTime venue_ts{};
  bool pre_trade{true};  // false for print-only messages from dark venues
  engine::L1View l1;
  engine::L2View l2;
  std::vector<BookUpdate> updates;
  std::vector<Print> prints;
};
using MarketDataPtr = std::shared_ptr<const MarketData>;

/// Venue top of book sent to the SIP.
struct VenueQuote {
  VenueId venue{0};
  engine::L1View l1;
  SimTime venue_ts{};
};

struct NbboSide {
  Price price{};
  Qty qty{};
  VenueId venue{0};
  bool operator==(const NbboSide&) const = default;
};

struct NbboQuote {
  std::optional<NbboSide> best_bid;
  std::optional<NbboSide> best_ask;
  SimTime ts{};
  /// Latest L1 the SIP holds for every venue it has heard from.
  std::map<VenueId, engine::L1View> venues;
  /// Venue timestamp of the newest L1 folded into this quote.
  SimTime source_ts{};
};

struct SignalUpdate {
  Price value{};
  Price previous{};
  SimTime jump_ts{};
};

struct Timer {
  uint64_t tag{0};
};

/// Gateway message held back by an inbound speed bump.
struct EngineTask {
  OrderMessage msg;
  EndpointId from{0};
};

/// Market data that an agent's consumer model has finished processing.
struct ProcessedFeed {
  MarketDataPtr data;
  std::optional<NbboQuote> nbbo;
  SimTime arrived{};
};

using Payload = std::variant<OrderMessage, ExecutionReport, MarketDataPtr, VenueQuote, NbboQuote, SignalUpdate,
                             Timer, EngineTask, ProcessedFeed>;

/// One-line description used in the event log and the trace hash.
std::string summarize(const Payload& payload);

}  // namespace marketsim
